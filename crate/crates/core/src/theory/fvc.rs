//! CAC moments at one CR, sample-statistic moments and the theoretical FVC.

use super::moments::{idx, ThetaStats};
use super::quadform::Vec6;
use crate::{Complex, Error, Result};

/// Moments of the received CAC `R̂ = θ_rᵀp + jθ_iᵀp` at one CR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CacMoments {
    /// `E[R̂]`
    pub mean: Complex,
    /// Covariance of `(Re R̂, Im R̂)`.
    pub cov2: [[f64; 2]; 2],
    /// `var(R̂) = E|R̂ - E R̂|²`
    pub var: f64,
    /// `E|R̂|²`
    pub second: f64,
    /// `var(|R̂|²)`
    pub var_power: f64,
}

impl CacMoments {
    /// `var(R̂) / E|R̂|²`.
    pub fn fvc(&self) -> f64 {
        if self.second > 0.0 {
            self.var / self.second
        } else {
            f64::NAN
        }
    }
}

/// CAC moments for power vector `p` under the Gaussian model of θ̂.
pub fn cac_quadform_moments(p: &Vec6, stats: &ThetaStats) -> CacMoments {
    let s = &stats.cov;
    let q = |a: usize, b: usize| -> f64 {
        let mut acc = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                acc += p[i] * s[(i + a, j + b)] * p[j];
            }
        }
        acc
    };
    let cov2 = [[q(0, 0), q(0, idx::IM)], [q(idx::IM, 0), q(idx::IM, idx::IM)]];
    let mr: f64 = (0..6).map(|i| p[i] * stats.mean[i]).sum();
    let mi: f64 = (0..6).map(|i| p[i] * stats.mean[i + idx::IM]).sum();
    let mean = Complex::new(mr, mi);
    let var = cov2[0][0] + cov2[1][1];
    // With A_k = diag(ppᵀ, ppᵀ): tr(A_kΣ) = var, tr((A_kΣ)²) = tr(cov2²),
    // mᵀA_kΣA_k m = [mr, mi] cov2 [mr, mi]ᵀ.
    let tr2 = cov2[0][0].powi(2) + 2.0 * cov2[0][1] * cov2[1][0] + cov2[1][1].powi(2);
    let quad = mr * mr * cov2[0][0] + 2.0 * mr * mi * cov2[0][1] + mi * mi * cov2[1][1];
    CacMoments { mean, cov2, var, second: var + mean.norm_sqr(), var_power: 2.0 * tr2 + 4.0 * quad }
}

/// Means, variances and covariance of the sample statistics `v_s` and `e_s`
/// over `M` independent realizations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleStatMoments {
    pub mu_vs: f64,
    pub sigma_vs2: f64,
    pub mu_es: f64,
    pub sigma_es2: f64,
    pub sigma_vses: f64,
}

pub fn sample_stat_moments(m: &CacMoments, realizations: usize) -> Result<SampleStatMoments> {
    if realizations < 2 {
        return Err(Error::TooFewValues { needed: 2, got: realizations });
    }
    let mf = realizations as f64;
    let c = m.cov2;
    let tr2 = c[0][0].powi(2) + 2.0 * c[0][1] * c[1][0] + c[1][1].powi(2);
    // (M-1) v_s is the trace of a 2×2 Wishart matrix with M-1 degrees of
    // freedom and scale cov2.
    let sigma_vs2 = 2.0 * tr2 / (mf - 1.0);
    // e_s = ((M-1)/M) v_s + |m_s|², and m_s is independent of v_s.
    let sigma_vses = (mf - 1.0) / mf * sigma_vs2;
    Ok(SampleStatMoments {
        mu_vs: m.var,
        sigma_vs2,
        mu_es: m.second,
        sigma_es2: m.var_power / mf,
        sigma_vses,
    })
}

/// The interference-free, noise-free component moments entering the
/// received-power-ratio form of the FVC.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentMoments {
    pub st_var: f64,
    pub st_second: f64,
    pub si_second: f64,
    pub st_si_second: f64,
}

impl ComponentMoments {
    pub fn from_stats(stats: &ThetaStats) -> Self {
        ComponentMoments {
            st_var: stats.component_var(idx::ST),
            st_second: stats.component_second(idx::ST),
            si_second: stats.component_second(idx::SI),
            st_si_second: stats.component_second(idx::ST_SI),
        }
    }
}

/// FVC as a function of the received power ratio `ρ_k = p_t/p_i` (linear)
/// with noise terms neglected.
pub fn fvc_theoretical(rho_k: f64, c: &ComponentMoments) -> Result<f64> {
    if !(rho_k >= 0.0) {
        return Err(Error::InvalidArgument(format!("power ratio must be >= 0, got {rho_k}")));
    }
    let num = rho_k * rho_k * c.st_var + c.si_second + rho_k * c.st_si_second;
    let den = rho_k * rho_k * c.st_second + c.si_second + rho_k * c.st_si_second;
    if !(den > 0.0) {
        return Err(Error::UndefinedFvc);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::moments::{Mat12, Vec12};

    #[test]
    fn zero_covariance_moments() {
        let mut mean = Vec12::zeros();
        mean[0] = 0.3;
        mean[6] = -0.4;
        let st = ThetaStats { mean, cov: Mat12::zeros(), n_samples: 1, alpha: 0.0 };
        let p = Vec6::from([1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
        let m = cac_quadform_moments(&p, &st);
        assert_eq!(m.var_power, 0.0);
        assert!((m.second - 0.25).abs() < 1e-15);
        let s = sample_stat_moments(&m, 60).unwrap();
        assert_eq!((s.sigma_vs2, s.sigma_es2, s.sigma_vses), (0.0, 0.0, 0.0));
    }

    #[test]
    fn noise_only_vector_recovers_noise_moments() {
        let mut cov = Mat12::zeros();
        cov[(3, 3)] = 2e-3;
        cov[(9, 9)] = 1e-3;
        let mut mean = Vec12::zeros();
        mean[3] = 0.01;
        let st = ThetaStats { mean, cov, n_samples: 1, alpha: 0.0 };
        let m = cac_quadform_moments(&Vec6::from([0.0, 0.0, 0.0, 1.0, 0.0, 0.0]), &st);
        assert!((m.var - 3e-3).abs() < 1e-18);
        assert!((m.mean.re - 0.01).abs() < 1e-18);
    }

    #[test]
    fn fvc_limits() {
        let c = ComponentMoments { st_var: 0.2, st_second: 1.0, si_second: 0.5, st_si_second: 0.3 };
        assert_eq!(fvc_theoretical(0.0, &c).unwrap(), 1.0);
        assert!((fvc_theoretical(1e9, &c).unwrap() - 0.2).abs() < 1e-8);
    }
}
