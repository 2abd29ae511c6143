//! Non-asymptotic cyclic correlation estimators and the feature variation
//! coefficient (FVC).

use std::f64::consts::PI;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::signals::SampleBuffer;
use crate::theory::{sample_stat_moments, CacMoments};
use crate::{Complex, Error, Result};

/// Lower clamp applied to the automatic FVC resolution `δ`.
pub const DELTA_FLOOR: f64 = 1e-3;
/// Largest number of realizations [`select_m`] will consider.
pub const M_MAX: usize = 10_000;
/// Smallest admissible realization count for the Gaussian approximation.
pub const M_MIN: usize = 51;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CacEstimate {
    pub value: Complex,
    pub alpha: f64,
    pub n_samples: usize,
}

/// Precomputed `e^{-j2π α n T_s} / N` for `n = 0..N`.
#[derive(Clone, Debug)]
pub struct CyclicKernel {
    pub alpha: f64,
    weights: Vec<Complex>,
}

impl CyclicKernel {
    pub fn new(alpha: f64, fs: f64, n: usize) -> Self {
        let step = alpha / fs;
        let inv = 1.0 / n as f64;
        let weights = (0..n)
            .map(|k| Complex::from_polar(inv, -2.0 * PI * (step * k as f64).fract()))
            .collect();
        CyclicKernel { alpha, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `(1/N) Σ x(n) e^{-j2π α n T_s}` for a real sequence.
    pub fn apply<I: IntoIterator<Item = f64>>(&self, x: I) -> Complex {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }

    /// CAC of one buffer.
    pub fn cac(&self, buf: &SampleBuffer) -> Complex {
        self.apply(buf.samples.iter().map(|s| s.norm_sqr()))
    }

    /// CCC of two buffers.
    pub fn ccc(&self, u: &SampleBuffer, v: &SampleBuffer) -> Complex {
        self.apply(u.samples.iter().zip(&v.samples).map(|(a, b)| 2.0 * (a * b.conj()).re))
    }
}

/// Cyclic autocorrelation of `|r(n)|²` at `alpha`.
pub fn cac(buf: &SampleBuffer, alpha: f64) -> Result<CacEstimate> {
    if buf.is_empty() {
        return Err(Error::InvalidArgument("CAC of an empty buffer".into()));
    }
    let k = CyclicKernel::new(alpha, buf.sample_rate, buf.len());
    Ok(CacEstimate { value: k.cac(buf), alpha, n_samples: buf.len() })
}

/// Cyclic cross-correlation of `2Re{u v*}` at `alpha`.
pub fn ccc(u: &SampleBuffer, v: &SampleBuffer, alpha: f64) -> Result<CacEstimate> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    if u.is_empty() {
        return Err(Error::InvalidArgument("CCC of empty buffers".into()));
    }
    let k = CyclicKernel::new(alpha, u.sample_rate, u.len());
    Ok(CacEstimate { value: k.ccc(u, v), alpha, n_samples: u.len() })
}

/// The six correlation terms that make up the CAC of a received signal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CacComponents {
    pub st: Complex,
    pub si: Complex,
    pub st_si: Complex,
    pub w: Complex,
    pub st_w: Complex,
    pub si_w: Complex,
}

impl CacComponents {
    pub fn as_array(&self) -> [Complex; 6] {
        [self.st, self.si, self.st_si, self.w, self.st_w, self.si_w]
    }

    /// Stacked real parts followed by imaginary parts.
    pub fn theta(&self) -> [f64; 12] {
        let a = self.as_array();
        let mut t = [0.0; 12];
        for j in 0..6 {
            t[j] = a[j].re;
            t[j + 6] = a[j].im;
        }
        t
    }

    /// Received CAC for power pair `(p_t, p_i)` in linear units.
    pub fn combine(&self, p_t: f64, p_i: f64) -> Complex {
        let (a, b) = (p_t.sqrt(), p_i.sqrt());
        self.st * p_t + self.si * p_i + self.st_si * (a * b) + self.w + self.st_w * a + self.si_w * b
    }
}

/// Computes every term of the decomposition with a shared kernel.
pub fn component_estimates_with(
    kernel: &CyclicKernel,
    st: &SampleBuffer,
    si: &SampleBuffer,
    w: &SampleBuffer,
) -> Result<CacComponents> {
    for b in [si, w] {
        if b.len() != st.len() {
            return Err(Error::LengthMismatch { left: st.len(), right: b.len() });
        }
    }
    if kernel.len() != st.len() {
        return Err(Error::LengthMismatch { left: kernel.len(), right: st.len() });
    }
    Ok(CacComponents {
        st: kernel.cac(st),
        si: kernel.cac(si),
        st_si: kernel.ccc(st, si),
        w: kernel.cac(w),
        st_w: kernel.ccc(st, w),
        si_w: kernel.ccc(si, w),
    })
}

pub fn component_estimates(st: &SampleBuffer, si: &SampleBuffer, w: &SampleBuffer, alpha: f64) -> Result<CacComponents> {
    if st.is_empty() {
        return Err(Error::InvalidArgument("empty component buffers".into()));
    }
    let k = CyclicKernel::new(alpha, st.sample_rate, st.len());
    component_estimates_with(&k, st, si, w)
}

/// CAC of the received signal assembled from its six component terms.
pub fn decompose_cac(
    st: &SampleBuffer,
    si: &SampleBuffer,
    w: &SampleBuffer,
    p_tk: f64,
    p_ik: f64,
    alpha: f64,
) -> Result<CacEstimate> {
    if p_tk < 0.0 || p_ik < 0.0 {
        return Err(Error::NegativePower(p_tk.min(p_ik)));
    }
    let parts = component_estimates(st, si, w, alpha)?;
    Ok(CacEstimate { value: parts.combine(p_tk, p_ik), alpha, n_samples: st.len() })
}

/// `N_min = 10 ⌈fs / |α_t - α_i|⌉`.
pub fn min_samples(fs: f64, alpha_t: f64, alpha_i: f64) -> Result<usize> {
    let d = (alpha_t - alpha_i).abs();
    if d == 0.0 {
        return Err(Error::EqualCyclicFrequencies);
    }
    if !(fs > alpha_t.max(alpha_i)) {
        return Err(Error::InvalidArgument(format!(
            "fs = {fs} must exceed both cyclic frequencies"
        )));
    }
    let ratio = fs / d;
    Ok(10 * (ratio * (1.0 - 1e-12)).ceil() as usize)
}

/// Sample FVC of `M` CAC realizations, optionally with a confidence interval.
#[derive(Clone, Debug, PartialEq)]
pub struct FvcRecord {
    pub phi_hat: f64,
    pub m: usize,
    pub v_s: f64,
    pub e_s: f64,
    pub m_s: Complex,
    pub ci_center: Option<f64>,
    pub ci_halfwidth: Option<f64>,
    pub beta: Option<f64>,
}

pub fn fvc_from_values(values: &[Complex]) -> Result<FvcRecord> {
    let m = values.len();
    if m < 2 {
        return Err(Error::TooFewValues { needed: 2, got: m });
    }
    let mf = m as f64;
    let m_s = values.iter().sum::<Complex>() / mf;
    let v_s = values.iter().map(|r| (r - m_s).norm_sqr()).sum::<f64>() / (mf - 1.0);
    let e_s = (mf - 1.0) / mf * v_s + m_s.norm_sqr();
    if !(e_s > 0.0) {
        return Err(Error::UndefinedFvc);
    }
    Ok(FvcRecord {
        phi_hat: v_s / e_s,
        m,
        v_s,
        e_s,
        m_s,
        ci_center: None,
        ci_halfwidth: None,
        beta: None,
    })
}

pub fn fvc_sample(realizations: &[CacEstimate]) -> Result<FvcRecord> {
    let values: Vec<Complex> = realizations.iter().map(|r| r.value).collect();
    fvc_from_values(&values)
}

impl FvcRecord {
    /// Attaches the confidence interval implied by the given sample-statistic
    /// moments.
    pub fn with_confidence(mut self, sigma_vs2: f64, sigma_es2: f64, sigma_vses: f64, beta: f64) -> Result<Self> {
        let z = student_t_z(beta, self.m)?;
        let (c, s) = fvc_confidence(self.v_s, self.e_s, sigma_vs2, sigma_es2, sigma_vses, self.m, beta)?;
        self.ci_center = Some(c);
        self.ci_halfwidth = Some(z * s);
        self.beta = Some(beta);
        Ok(self)
    }
}

/// Two-sided Student-t quantile for confidence `beta` with `M-1` degrees of
/// freedom.
pub fn student_t_z(beta: f64, m: usize) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level must lie in (0, 1), got {beta}")));
    }
    if m < 2 {
        return Err(Error::TooFewValues { needed: 2, got: m });
    }
    let t = StudentsT::new(0.0, 1.0, (m - 1) as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(t.inverse_cdf((1.0 + beta) / 2.0))
}

/// Center `C` and standard error `S` of the ratio `v_s / e_s`.
pub fn fvc_confidence(
    v_s: f64,
    e_s: f64,
    sigma_vs2: f64,
    sigma_es2: f64,
    sigma_vses: f64,
    m: usize,
    beta: f64,
) -> Result<(f64, f64)> {
    if m < M_MIN {
        return Err(Error::InvalidArgument(format!(
            "the Gaussian approximation needs M > 50, got {m}"
        )));
    }
    if !(e_s > 0.0) {
        return Err(Error::UndefinedFvc);
    }
    let z2 = student_t_z(beta, m)?.powi(2);
    let e2 = e_s * e_s;
    let q = 1.0 - z2 * sigma_es2 / e2;
    if !(q > 0.0) {
        return Err(Error::ConfidenceUnattainable { m, q });
    }
    let r = v_s / e_s;
    let c = (r - z2 * sigma_vses / e2) / q;
    // σ_e²/e² [σ_v² - σ_ve²/σ_e²] written without dividing by σ_e².
    let cond = (sigma_es2 * sigma_vs2 - sigma_vses * sigma_vses) / e2;
    let num = sigma_vs2 - 2.0 * r * sigma_vses + r * r * sigma_es2 - z2 * cond;
    let s2 = (num / (e2 * q * q)).max(0.0);
    Ok((c, s2.sqrt()))
}

/// `z_β S` at realization count `m` for a CR with the given CAC moments,
/// evaluated at the expected values of `v_s` and `e_s`.
pub fn confidence_halfwidth(moments: &CacMoments, m: usize, beta: f64) -> Result<f64> {
    let s = sample_stat_moments(moments, m)?;
    let z = student_t_z(beta, m)?;
    let (_, se) = fvc_confidence(s.mu_vs, s.mu_es, s.sigma_vs2, s.sigma_es2, s.sigma_vses, m, beta)?;
    Ok(z * se)
}

/// Smallest `M > 50` with `z_β S < δ` at every CR.
pub fn select_m(moments: &[CacMoments], beta: f64, delta: f64) -> Result<usize> {
    select_m_bounded(moments, beta, delta, M_MAX)
}

pub fn select_m_bounded(moments: &[CacMoments], beta: f64, delta: f64, m_max: usize) -> Result<usize> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    if moments.is_empty() {
        return Err(Error::InvalidArgument("select_m needs at least one CR".into()));
    }
    let mut best = f64::INFINITY;
    for m in M_MIN..=m_max {
        let mut worst = 0.0f64;
        let mut ok = true;
        for mo in moments {
            match confidence_halfwidth(mo, m, beta) {
                Ok(h) => worst = worst.max(h),
                Err(Error::ConfidenceUnattainable { .. }) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if ok {
            best = best.min(worst);
            if worst < delta {
                return Ok(m);
            }
        }
    }
    Err(Error::NoAdmissibleM { m_max, delta, best })
}

/// Default `δ`: smallest gap between distinct FVC values, clamped below at
/// [`DELTA_FLOOR`]. The flag reports whether the clamp was applied.
pub fn default_delta(phis: &[f64]) -> (f64, bool) {
    let mut v: Vec<f64> = phis.to_vec();
    v.sort_by(f64::total_cmp);
    let gap = v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap < DELTA_FLOOR {
        (DELTA_FLOOR, true)
    } else {
        (gap, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::signals::{generate, SignalSpec};

    fn buf_from_power(p: &[f64], fs: f64) -> SampleBuffer {
        SampleBuffer::new(p.iter().map(|&x| Complex::new(x.sqrt(), 0.0)).collect(), fs)
    }

    #[test]
    fn dc_term_is_average_power() {
        let b = buf_from_power(&[2.0; 37], 1.0);
        assert!((cac(&b, 0.0).unwrap().value - Complex::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dirichlet_null_for_constant_power() {
        // α N T_s = 3, α T_s = 0.03.
        let b = buf_from_power(&[1.5; 100], 100.0);
        assert!(cac(&b, 3.0).unwrap().value.norm() < 1e-13);
    }

    #[test]
    fn cosine_power_line() {
        let (fs, n, a0) = (1000.0, 500, 40.0);
        let p: Vec<f64> = (0..n).map(|k| 1.0 + (2.0 * PI * a0 * k as f64 / fs).cos()).collect();
        let v = cac(&buf_from_power(&p, fs), a0).unwrap().value;
        assert!((v - Complex::new(0.5, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn ccc_identities() {
        let spec = SignalSpec::single_carrier(4, 20e6, 0.0);
        let u = generate(&spec, 200, 200e6, &mut seeded(1)).unwrap();
        let z = SampleBuffer::zeros(200, 200e6);
        assert_eq!(ccc(&u, &z, 20e6).unwrap().value, Complex::new(0.0, 0.0));
        let a = ccc(&u, &u, 20e6).unwrap().value;
        let b = cac(&u, 20e6).unwrap().value * 2.0;
        assert!((a - b).norm() <= 1e-15 * b.norm().max(1.0));
        assert!(ccc(&u, &SampleBuffer::zeros(3, 200e6), 1.0).is_err());
    }

    #[test]
    fn min_samples_examples() {
        assert_eq!(min_samples(200e6, 20e6, 25e6).unwrap(), 400);
        let n = min_samples(500e3, 250e3, 14e3).unwrap();
        assert_eq!(n, 30);
        assert!(100 > n);
        assert_eq!(min_samples(100.0, 30.0, 20.0).unwrap(), 100);
        assert!(matches!(min_samples(1.0, 0.2, 0.2), Err(Error::EqualCyclicFrequencies)));
    }

    #[test]
    fn fvc_boundaries() {
        let c = Complex::new(0.3, -0.2);
        let r = fvc_from_values(&[c; 5]).unwrap();
        assert!(r.phi_hat.abs() < 1e-15);
        let r = fvc_from_values(&[c, -c]).unwrap();
        assert!((r.phi_hat - 2.0).abs() < 1e-12);
        assert!(matches!(fvc_from_values(&[Complex::new(0.0, 0.0); 3]), Err(Error::UndefinedFvc)));
        assert!(fvc_from_values(&[c]).is_err());
    }

    #[test]
    fn confidence_degenerate_limits() {
        let (v, e) = (0.2, 0.8);
        let (c, s) = fvc_confidence(v, e, 1e-4, 0.0, 0.0, 100, 0.9).unwrap();
        assert!((c - v / e).abs() < 1e-15);
        assert!((s * s - 1e-4 / (e * e)).abs() < 1e-15);
        let (_, s) = fvc_confidence(v, e, 0.0, 0.0, 0.0, 100_000, 0.9).unwrap();
        assert_eq!(s, 0.0);
        assert!(matches!(
            fvc_confidence(v, e, 1e-4, 1.0, 0.0, 100, 0.9),
            Err(Error::ConfidenceUnattainable { .. })
        ));
    }

    #[test]
    fn student_t_quantiles() {
        // Tabulated t_{0.95} values.
        assert!((student_t_z(0.9, 11).unwrap() - 1.812).abs() < 1e-3);
        assert!((student_t_z(0.9, 61).unwrap() - 1.671).abs() < 1e-3);
        assert!((student_t_z(0.95, 31).unwrap() - 2.042).abs() < 1e-3);
    }

    #[test]
    fn default_delta_clamps() {
        assert_eq!(default_delta(&[0.1, 0.5, 0.3]), (0.19999999999999998, false));
        assert_eq!(default_delta(&[0.1, 0.1002, 0.5]), (DELTA_FLOOR, true));
    }
}
