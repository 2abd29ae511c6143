//! Exact first and second moments of the stacked correlation vector θ̂.
//!
//! Each signal is modelled as
//! `s(n) = e^{j2πfn/fs} Σ_l g(n/r - l) Σ_κ c_{κ,l} e^{j2πκΔf n/fs}`
//! with i.i.d. zero-mean data symbols (single carrier is the case of one
//! subcarrier at `κ = 0`). Every moment reduces to finite sums over sample
//! pairs that share at least one active symbol.

use std::f64::consts::PI;

use nalgebra::{SMatrix, SVector};

use crate::signals::{PulseShape, SignalSpec, SymbolMoments};
use crate::{Complex, Error, Result};

pub type Vec12 = SVector<f64, 12>;
pub type Mat12 = SMatrix<f64, 12, 12>;

/// Position of each correlation term inside the real (and, offset by six,
/// imaginary) half of θ.
pub mod idx {
    pub const ST: usize = 0;
    pub const SI: usize = 1;
    pub const ST_SI: usize = 2;
    pub const W: usize = 3;
    pub const ST_W: usize = 4;
    pub const SI_W: usize = 5;
    pub const IM: usize = 6;
}

/// Mean and covariance of θ̂ = [Re{R̂_st, R̂_si, R̂_stsi, R̂_w, R̂_stw, R̂_siw},
/// Im{…}].
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaStats {
    pub mean: Vec12,
    pub cov: Mat12,
    pub n_samples: usize,
    pub alpha: f64,
}

impl ThetaStats {
    /// `E[R̂_j]` of component `j`.
    pub fn component_mean(&self, j: usize) -> Complex {
        Complex::new(self.mean[j], self.mean[j + idx::IM])
    }

    /// `var(R̂_j) = E|R̂_j - E R̂_j|²`.
    pub fn component_var(&self, j: usize) -> f64 {
        self.cov[(j, j)] + self.cov[(j + idx::IM, j + idx::IM)]
    }

    /// `E|R̂_j|²`.
    pub fn component_second(&self, j: usize) -> f64 {
        self.component_var(j) + self.component_mean(j).norm_sqr()
    }
}

/// Per-sample structure of one transmitted signal.
struct SignalModel {
    active: Vec<Vec<(i64, f64)>>,
    sym: SymbolMoments,
    nc: f64,
    carrier_step: f64,
    minus: Option<DTable>,
    plus: Option<DTable>,
    reach: usize,
}

/// `D(d) = Σ_κ e^{j2πκ d Δf/fs}` tabulated on a contiguous range of `d`.
struct DTable {
    offset: i64,
    values: Vec<Complex>,
}

impl DTable {
    fn new(spec: &SignalSpec, fs: f64, lo: i64, hi: i64) -> Self {
        let kappas = spec.subcarrier_indices();
        let (k0, nc) = (kappas.start, (kappas.end - kappas.start) as f64);
        let step = spec.subcarrier_spacing / fs;
        let values = (lo..=hi)
            .map(|d| {
                let cyc = (step * d as f64).rem_euclid(1.0);
                let th = 2.0 * PI * cyc;
                let start = Complex::from_polar(1.0, th * k0 as f64);
                let den = Complex::new(1.0, 0.0) - Complex::from_polar(1.0, th);
                if den.norm() < 1e-9 {
                    start * nc
                } else {
                    start * (Complex::new(1.0, 0.0) - Complex::from_polar(1.0, th * nc)) / den
                }
            })
            .collect();
        DTable { offset: lo, values }
    }

    fn get(&self, d: i64) -> Complex {
        self.values[(d - self.offset) as usize]
    }
}

impl SignalModel {
    fn new(spec: &SignalSpec, n: usize, fs: f64) -> Result<Self> {
        let shape: PulseShape = spec.shape()?;
        if !(fs > spec.cyclic_frequency()) {
            return Err(Error::InvalidArgument(format!(
                "sample rate {fs} must exceed the cyclic frequency {}",
                spec.cyclic_frequency()
            )));
        }
        let sps = spec.symbol_period * fs;
        let active = (0..n).map(|k| shape.active(k as f64 / sps).collect()).collect();
        let nc = spec.num_subcarriers.max(1);
        let amp = (nc as f64).sqrt().recip();
        let sym = SymbolMoments::of_order(spec.modulation_order)?.scaled(amp);
        let ofdm = spec.subcarrier_indices().end - spec.subcarrier_indices().start > 1
            || spec.subcarrier_indices().start != 0;
        let last = n as i64 - 1;
        let (minus, plus) = if ofdm {
            (Some(DTable::new(spec, fs, -last, last)), Some(DTable::new(spec, fs, 0, 2 * last)))
        } else {
            (None, None)
        };
        let (lo, hi) = shape.support();
        let reach = ((hi - lo) * sps).ceil() as usize + 1;
        Ok(SignalModel { active, sym, nc: nc as f64, carrier_step: spec.carrier_freq / fs, minus, plus, reach })
    }

    fn d_minus(&self, d: i64) -> Complex {
        self.minus.as_ref().map_or(Complex::new(1.0, 0.0), |t| t.get(d))
    }

    fn d_plus(&self, s: i64) -> Complex {
        self.plus.as_ref().map_or(Complex::new(1.0, 0.0), |t| t.get(s))
    }

    fn carrier(&self, k: i64) -> Complex {
        Complex::from_polar(1.0, 2.0 * PI * (self.carrier_step * k as f64).rem_euclid(1.0))
    }

    /// `E|s(n)|²`.
    fn mean_power(&self, n: usize) -> f64 {
        self.sym.power * self.nc * self.active[n].iter().map(|(_, g)| g * g).sum::<f64>()
    }

    /// `(Σ_l g_l(n) g_l(m), Σ_l g_l(n)² g_l(m)²)`.
    fn overlap(&self, n: usize, m: usize) -> (f64, f64) {
        let (a, b) = (&self.active[n], &self.active[m]);
        let (mut i, mut j) = (0, 0);
        let (mut s1, mut s2) = (0.0, 0.0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let p = a[i].1 * b[j].1;
                    s1 += p;
                    s2 += p * p;
                    i += 1;
                    j += 1;
                }
            }
        }
        (s1, s2)
    }

    /// `E[s(n) s(m)*]` and `E[s(n) s(m)]`.
    fn correlations(&self, n: usize, m: usize) -> (Complex, Complex) {
        let (s1, _) = self.overlap(n, m);
        if s1 == 0.0 {
            return (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
        }
        let (ni, mi) = (n as i64, m as i64);
        let c = self.carrier(ni - mi) * self.d_minus(ni - mi) * (self.sym.power * s1);
        let p = self.carrier(ni + mi) * self.d_plus(ni + mi) * self.sym.pseudo * s1;
        (c, p)
    }

    /// `cov(|s(n)|², |s(m)|²)`.
    fn power_cov(&self, n: usize, m: usize) -> f64 {
        let (s1, s2) = self.overlap(n, m);
        if s1 == 0.0 && s2 == 0.0 {
            return 0.0;
        }
        let (ni, mi) = (n as i64, m as i64);
        let dm = self.d_minus(ni - mi);
        let dp = self.d_plus(ni + mi);
        let (mu2, e2, mu4, nc) = (self.sym.power, self.sym.pseudo, self.sym.fourth, self.nc);
        let m4 = nc * mu4 + mu2 * mu2 * (nc * nc - 2.0 * nc + dm.norm_sqr()) + e2.norm_sqr() * (dp.norm_sqr() - nc);
        let c2 = (mu2 * dm).norm_sqr();
        let p2 = (e2 * dp).norm_sqr();
        (m4 - (nc * mu2).powi(2)) * s2 + (c2 + p2) * (s1 * s1 - s2)
    }
}

/// Accumulates the 2×2 Re/Im covariance of `(1/N) Σ x(n) e^{-jωn}` from a
/// covariance kernel of the real sequence `x`.
struct Projector {
    cos: Vec<f64>,
    sin: Vec<f64>,
    n: usize,
}

impl Projector {
    fn new(alpha: f64, fs: f64, n: usize) -> Self {
        let step = alpha / fs;
        let ph: Vec<f64> = (0..n).map(|k| 2.0 * PI * (step * k as f64).fract()).collect();
        Projector { cos: ph.iter().map(|p| p.cos()).collect(), sin: ph.iter().map(|p| p.sin()).collect(), n }
    }

    fn mean(&self, e: impl Fn(usize) -> f64) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..self.n {
            let v = e(k);
            re += v * self.cos[k];
            im -= v * self.sin[k];
        }
        (re / self.n as f64, im / self.n as f64)
    }

    /// `[[var Re, cov(Re, Im)], [·, var Im]]` for kernel `kern(n, m)` that
    /// vanishes for `|n - m| > reach`.
    fn block(&self, reach: usize, kern: impl Fn(usize, usize) -> f64) -> [[f64; 2]; 2] {
        let (mut rr, mut ri, mut ii) = (0.0, 0.0, 0.0);
        for n in 0..self.n {
            let lo = n.saturating_sub(reach);
            let hi = (n + reach).min(self.n - 1);
            for m in lo..=hi {
                let k = kern(n, m);
                if k == 0.0 {
                    continue;
                }
                rr += k * self.cos[n] * self.cos[m];
                ri -= k * self.cos[n] * self.sin[m];
                ii += k * self.sin[n] * self.sin[m];
            }
        }
        let s = (self.n as f64).powi(-2);
        [[rr * s, ri * s], [ri * s, ii * s]]
    }

    fn diagonal_block(&self, v: impl Fn(usize) -> f64) -> [[f64; 2]; 2] {
        self.block(0, |n, m| if n == m { v(n) } else { 0.0 })
    }
}

fn put(cov: &mut Mat12, j: usize, b: [[f64; 2]; 2]) {
    cov[(j, j)] = b[0][0];
    cov[(j, j + idx::IM)] = b[0][1];
    cov[(j + idx::IM, j)] = b[1][0];
    cov[(j + idx::IM, j + idx::IM)] = b[1][1];
}

/// Analytic moments of θ̂ at the target's cyclic frequency.
pub fn theta_moments(spec_t: &SignalSpec, spec_i: &SignalSpec, n: usize, fs: f64, sigma_w2: f64) -> Result<ThetaStats> {
    theta_moments_at(spec_t, spec_i, n, fs, sigma_w2, spec_t.cyclic_frequency())
}

/// Analytic moments of θ̂ at an arbitrary cyclic frequency `alpha`.
pub fn theta_moments_at(
    spec_t: &SignalSpec,
    spec_i: &SignalSpec,
    n: usize,
    fs: f64,
    sigma_w2: f64,
    alpha: f64,
) -> Result<ThetaStats> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if !(sigma_w2 >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise variance must be >= 0, got {sigma_w2}")));
    }
    let t = SignalModel::new(spec_t, n, fs)?;
    let i = SignalModel::new(spec_i, n, fs)?;
    let proj = Projector::new(alpha, fs, n);
    let mut mean = Vec12::zeros();
    let mut cov = Mat12::zeros();

    let (re, im) = proj.mean(|k| t.mean_power(k));
    mean[idx::ST] = re;
    mean[idx::ST + idx::IM] = im;
    let (re, im) = proj.mean(|k| i.mean_power(k));
    mean[idx::SI] = re;
    mean[idx::SI + idx::IM] = im;
    let (re, im) = proj.mean(|_| sigma_w2);
    mean[idx::W] = re;
    mean[idx::W + idx::IM] = im;

    put(&mut cov, idx::ST, proj.block(t.reach, |a, b| t.power_cov(a, b)));
    put(&mut cov, idx::SI, proj.block(i.reach, |a, b| i.power_cov(a, b)));
    put(
        &mut cov,
        idx::ST_SI,
        proj.block(t.reach.min(i.reach), |a, b| {
            let (ct, pt) = t.correlations(a, b);
            if ct == Complex::new(0.0, 0.0) && pt == Complex::new(0.0, 0.0) {
                return 0.0;
            }
            let (ci, pi) = i.correlations(a, b);
            2.0 * (pt * pi.conj() + ct * ci.conj()).re
        }),
    );
    if sigma_w2 > 0.0 {
        put(&mut cov, idx::W, proj.diagonal_block(|_| sigma_w2 * sigma_w2));
        put(&mut cov, idx::ST_W, proj.diagonal_block(|k| 2.0 * sigma_w2 * t.mean_power(k)));
        put(&mut cov, idx::SI_W, proj.diagonal_block(|k| 2.0 * sigma_w2 * i.mean_power(k)));
    }
    Ok(ThetaStats { mean, cov, n_samples: n, alpha })
}

/// `E[R̂_si]` at `alpha` (the interferer's leakage into the target's feature).
pub fn power_line(spec: &SignalSpec, n: usize, fs: f64, alpha: f64) -> Result<Complex> {
    let m = SignalModel::new(spec, n, fs)?;
    let (re, im) = Projector::new(alpha, fs, n).mean(|k| m.mean_power(k));
    Ok(Complex::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::Pulse;

    fn sc(rate: f64) -> SignalSpec {
        SignalSpec::single_carrier(4, rate, 0.0)
    }

    #[test]
    fn noiseless_rows_vanish() {
        let s = theta_moments(&sc(20e6), &sc(25e6), 80, 200e6, 0.0).unwrap();
        for j in [idx::W, idx::ST_W, idx::SI_W] {
            for jj in [j, j + idx::IM] {
                assert_eq!(s.mean[jj], 0.0);
                assert!((0..12).all(|c| s.cov[(jj, c)] == 0.0 && s.cov[(c, jj)] == 0.0));
            }
        }
    }

    #[test]
    fn noise_mean_has_dirichlet_null() {
        let s = theta_moments(&sc(20e6), &sc(25e6), 500, 200e6, 1e-3).unwrap();
        assert!(s.component_mean(idx::W).norm() < 1e-15);
        // var(R̂_w) = σ⁴ / N.
        assert!((s.component_var(idx::W) - 1e-6 / 500.0).abs() < 1e-15);
    }

    #[test]
    fn rectangular_qpsk_power_is_deterministic() {
        let spec = sc(20e6).with_pulse(Pulse::Rectangular);
        let s = theta_moments(&spec, &spec, 64, 200e6, 0.0).unwrap();
        assert!(s.component_var(idx::ST).abs() < 1e-18);
        assert!(s.component_var(idx::ST_SI) > 0.0);
    }

    #[test]
    fn covariance_is_symmetric() {
        let t = SignalSpec::ofdm(4, 8, 312.5e3, 0.8e-6, 0.0).with_pulse(Pulse::RaisedCosine { rolloff: 0.3 });
        let i = SignalSpec::ofdm(2, 4, 200e3, 1e-6, 1e5);
        let s = theta_moments(&t, &i, 60, 5e6, 1e-2).unwrap();
        assert!((s.cov - s.cov.transpose()).abs().max() <= 1e-12 * s.cov.abs().max());
    }
}
