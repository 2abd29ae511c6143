//! Second moment of a ratio of quadratic forms in a Gaussian vector.
//!
//! For `θ ~ N(m, Σ)` and `B ⪰ 0`,
//!
//! ```text
//! E[(θᵀAθ / θᵀBθ)²] = ∫₀^∞ t |Δ| exp(-Σ μᵢ² tλᵢ/(1+2tλᵢ))
//!                       [2 tr R² + 4 ζᵀR²ζ + (tr R + ζᵀRζ)²] dt
//! ```
//!
//! where `Σ = CCᵀ`, `CᵀBC = VΛVᵀ`, `A* = VᵀCᵀACV`, `μ = VᵀC⁻¹m`,
//! `Δ = (I + 2tΛ)^{-1/2}`, `R = ΔA*Δ` and `ζ = Δμ`. The integral is mapped to
//! `u ∈ [0, 1)` by `t = s·u/(1-u)` and evaluated with adaptive 15-point
//! Gauss-Kronrod panels.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::moments::{Mat12, ThetaStats};
use crate::{Error, Result};

/// Relative accuracy requested from the quadrature.
pub const QUAD_TOL: f64 = 1e-8;
/// Panel budget before the quadrature is declared non-convergent.
pub const MAX_PANELS: usize = 5000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// `(Kronrod estimate, |Kronrod - Gauss|)` on `[a, b]`.
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive integration over `[0, 1]` starting from the given
/// breakpoints.
fn integrate(mut f: impl FnMut(f64) -> f64, breaks: &[f64]) -> Result<(f64, f64, usize)> {
    let mut panels: Vec<(f64, f64, f64, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = gk15(&mut f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= QUAD_TOL * total.abs() || err == 0.0 {
            return Ok((total, err, panels.len()));
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureNonConvergent { estimate: total, error: err, panels: panels.len() });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .expect("non-empty");
        let (a, b, _, _) = panels.swap_remove(worst);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            return Err(Error::QuadratureNonConvergent { estimate: total, error: err, panels: panels.len() });
        }
        let (v1, e1) = gk15(&mut f, a, m);
        let (v2, e2) = gk15(&mut f, m, b);
        panels.push((a, m, v1, e1));
        panels.push((m, b, v2, e2));
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RqgvDiagnostics {
    /// Diagonal jitter added to the correlation matrix (0 if none).
    pub jitter: f64,
    /// θ components that are identically zero and were removed.
    pub dropped: usize,
    /// Deterministic components given a tiny variance floor.
    pub floored: usize,
    /// Eigenvalues of the whitened denominator clamped to zero.
    pub clamped: usize,
    pub panels: usize,
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RqgvMoment {
    pub value: f64,
    pub diagnostics: RqgvDiagnostics,
}

/// Whitened coordinates for a fixed `(B, E[θ], Σ)`, reusable across several
/// numerator matrices.
#[derive(Clone, Debug)]
pub struct Whitened {
    keep: Vec<usize>,
    map: DMatrix<f64>,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    diag: RqgvDiagnostics,
}

impl Whitened {
    pub fn new(b: &Mat12, stats: &ThetaStats) -> Result<Self> {
        let mut diag = RqgvDiagnostics::default();
        let keep: Vec<usize> = (0..12).filter(|&j| stats.cov[(j, j)] > 0.0 || stats.mean[j] != 0.0).collect();
        diag.dropped = 12 - keep.len();
        let d = keep.len();
        if d == 0 {
            return Err(Error::DegenerateDenominator);
        }
        let mut sd = DVector::zeros(d);
        for (a, &j) in keep.iter().enumerate() {
            let v = stats.cov[(j, j)];
            sd[a] = if v > 0.0 {
                v.sqrt()
            } else {
                diag.floored += 1;
                1e-9 * stats.mean[j].abs()
            };
        }
        let mut omega = DMatrix::zeros(d, d);
        for (a, &i) in keep.iter().enumerate() {
            for (c, &j) in keep.iter().enumerate() {
                omega[(a, c)] = if a == c {
                    1.0
                } else if stats.cov[(i, i)] > 0.0 && stats.cov[(j, j)] > 0.0 {
                    stats.cov[(i, j)] / (sd[a] * sd[c])
                } else {
                    0.0
                };
            }
        }
        let chol = match Cholesky::new(omega.clone()) {
            Some(c) => c,
            None => {
                diag.jitter = 1e-12;
                let jittered = omega + DMatrix::identity(d, d) * diag.jitter;
                Cholesky::new(jittered).ok_or(Error::NotPositiveSemidefinite)?
            }
        };
        let l = chol.l();
        let c = DMatrix::from_diagonal(&sd) * &l;
        let bk = DMatrix::from_fn(d, d, |a, e| b[(keep[a], keep[e])]);
        let bt = c.transpose() * &bk * &c;
        let bt = (&bt + bt.transpose()) * 0.5;
        let eig = SymmetricEigen::new(bt);
        let trace: f64 = eig.eigenvalues.iter().map(|v| v.abs()).sum();
        let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        let mut lambda = Vec::with_capacity(d);
        for &v in eig.eigenvalues.iter() {
            if v < -1e-10 * trace {
                return Err(Error::NotPositiveSemidefinite);
            }
            if v <= 1e-13 * lmax {
                diag.clamped += 1;
                lambda.push(0.0);
            } else {
                lambda.push(v);
            }
        }
        if lambda.iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateDenominator);
        }
        let mk = DVector::from_fn(d, |a, _| stats.mean[keep[a]]);
        let z = l.solve_lower_triangular(&mk.component_div(&sd)).ok_or(Error::NotPositiveSemidefinite)?;
        let mu = (eig.eigenvectors.transpose() * z).iter().copied().collect();
        let map = c * eig.eigenvectors;
        Ok(Whitened { keep, map, lambda, mu, diag })
    }

    /// `A* = VᵀCᵀACV`, with rows and columns in the null space of `Λ`
    /// removed.
    fn transform(&self, a: &Mat12) -> DMatrix<f64> {
        let d = self.keep.len();
        let ak = DMatrix::from_fn(d, d, |i, j| a[(self.keep[i], self.keep[j])]);
        let mut s = self.map.transpose() * ak * &self.map;
        for i in 0..d {
            if self.lambda[i] == 0.0 {
                s.row_mut(i).fill(0.0);
                s.column_mut(i).fill(0.0);
            }
        }
        (&s + s.transpose()) * 0.5
    }

    pub fn second_moment(&self, a: &Mat12) -> Result<RqgvMoment> {
        let astar = self.transform(a);
        let d = self.lambda.len();
        let scale_sum: f64 = self.lambda.iter().zip(&self.mu).map(|(l, m)| l * (1.0 + m * m)).sum();
        let s = 1.0 / scale_sum;
        let mut breaks = vec![0.0, 1.0];
        for k in 1..8 {
            breaks.push(k as f64 / 8.0);
        }
        for (l, m) in self.lambda.iter().zip(&self.mu) {
            if *l > 0.0 {
                for f in [0.1, 1.0, 10.0] {
                    let t = f / (l * (1.0 + m * m));
                    breaks.push(t / (s + t));
                }
            }
        }
        breaks.retain(|u| (0.0..=1.0).contains(u));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

        let mut dvec = vec![0.0; d];
        let mut zeta = vec![0.0; d];
        let mut r = DMatrix::<f64>::zeros(d, d);
        let integrand = |u: f64| -> f64 {
            if u >= 1.0 {
                return 0.0;
            }
            let t = s * u / (1.0 - u);
            let jac = s / ((1.0 - u) * (1.0 - u));
            let mut log_det = 0.0;
            let mut expo = 0.0;
            for i in 0..d {
                let q = 1.0 + 2.0 * t * self.lambda[i];
                dvec[i] = q.sqrt().recip();
                zeta[i] = dvec[i] * self.mu[i];
                log_det -= 0.5 * q.ln();
                expo -= self.mu[i] * self.mu[i] * t * self.lambda[i] / q;
            }
            let (mut tr, mut tr2, mut zrz, mut zr2z) = (0.0, 0.0, 0.0, 0.0);
            for i in 0..d {
                let mut rz = 0.0;
                for j in 0..d {
                    let v = dvec[i] * astar[(i, j)] * dvec[j];
                    r[(i, j)] = v;
                    tr2 += v * v;
                    rz += v * zeta[j];
                }
                tr += r[(i, i)];
                zrz += zeta[i] * rz;
                zr2z += rz * rz;
            }
            let bracket = 2.0 * tr2 + 4.0 * zr2z + (tr + zrz).powi(2);
            t * (log_det + expo).exp() * bracket * jac
        };
        let (value, err, panels) = integrate(integrand, &breaks)?;
        let mut diagnostics = self.diag.clone();
        diagnostics.panels = panels;
        diagnostics.error_estimate = err;
        Ok(RqgvMoment { value, diagnostics })
    }
}

/// `E[(θᵀAθ / θᵀBθ)²]` for `θ ~ N(stats.mean, stats.cov)`.
pub fn rqgv_second_moment(a: &Mat12, b: &Mat12, stats: &ThetaStats) -> Result<RqgvMoment> {
    Whitened::new(b, stats)?.second_moment(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::moments::Vec12;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-14 && (g - 2.0).abs() < 1e-14);
        let (v, _) = gk15(&mut |x: f64| x.powi(6), 0.0, 1.0);
        assert!((v - 1.0 / 7.0).abs() < 1e-15);
    }

    fn stats() -> ThetaStats {
        let mut cov = Mat12::identity();
        for j in 0..12 {
            cov[(j, j)] = 0.5 + j as f64 * 0.1;
        }
        cov[(0, 6)] = 0.2;
        cov[(6, 0)] = 0.2;
        let mean = Vec12::from_fn(|j, _| 0.3 * j as f64 - 1.0);
        ThetaStats { mean, cov, n_samples: 1, alpha: 0.0 }
    }

    #[test]
    fn equal_forms_give_one() {
        let b = Mat12::from_fn(|i, j| if i == j { 1.0 + i as f64 } else { 0.1 });
        let s = stats();
        let r = rqgv_second_moment(&b, &b, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-7, "{}", r.value);
        let r = rqgv_second_moment(&(b * 3.0), &b, &s).unwrap();
        assert!((r.value - 9.0).abs() < 1e-6, "{}", r.value);
    }

    #[test]
    fn zero_denominator_is_rejected() {
        let s = stats();
        assert!(matches!(
            rqgv_second_moment(&Mat12::identity(), &Mat12::zeros(), &s),
            Err(Error::DegenerateDenominator)
        ));
    }
}
