//! Path loss, log-normal shadowing, tapped-delay-line multipath and AWGN.
//!
//! Powers are configured in dBm and converted to milliwatts for arithmetic.
//! A power of `-inf` dBm maps to exactly zero.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::signals::SampleBuffer;
use crate::{Complex, Error, Point, Result};

pub fn dbm_to_mw(dbm: f64) -> f64 {
    if dbm == f64::NEG_INFINITY {
        0.0
    } else {
        10f64.powf(dbm / 10.0)
    }
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Log-distance path loss with shadowing, in dBm.
pub fn received_power_db(p_tx_dbm: f64, tx: Point, rx: Point, gamma: f64, d0: f64, shadow_db: f64) -> Result<f64> {
    let d = tx.distance(rx);
    if d == 0.0 {
        return Err(Error::ZeroDistance { x: rx.x, y: rx.y });
    }
    Ok(p_tx_dbm - 10.0 * gamma * (d / d0).log10() - shadow_db)
}

/// Complex noise variance (mW) over the observed bandwidth `fs/2`.
pub fn noise_variance(noise_psd_dbm_hz: f64, fs: f64) -> f64 {
    dbm_to_mw(noise_psd_dbm_hz) * fs / 2.0
}

/// `k` i.i.d. `N(0, σ_q²)` shadowing values in dB.
pub fn draw_shadowing<R: Rng + ?Sized>(sigma_q_db: f64, k: usize, rng: &mut R) -> Result<Vec<f64>> {
    if !(sigma_q_db >= 0.0) {
        return Err(Error::InvalidArgument(format!("shadowing std must be >= 0, got {sigma_q_db}")));
    }
    if sigma_q_db == 0.0 {
        return Ok(vec![0.0; k]);
    }
    let dist = Normal::new(0.0, sigma_q_db).expect("finite positive std");
    Ok((0..k).map(|_| dist.sample(rng)).collect())
}

/// Geometry, power budget and noise level of one deployment.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkScenario {
    pub target_loc: Point,
    pub interferer_loc: Point,
    pub cr_locs: Vec<Point>,
    pub p_t_dbm: f64,
    pub p_i_dbm: f64,
    pub gamma: f64,
    pub d0: f64,
    pub sigma_q_db: f64,
    pub noise_psd_dbm_hz: f64,
    pub fs: f64,
    pub side_a: f64,
}

impl NetworkScenario {
    pub fn k(&self) -> usize {
        self.cr_locs.len()
    }

    pub fn noise_variance(&self) -> f64 {
        noise_variance(self.noise_psd_dbm_hz, self.fs)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_loc == self.interferer_loc {
            return Err(Error::InvalidArgument("target and interferer must be at different locations".into()));
        }
        if self.cr_locs.is_empty() {
            return Err(Error::InvalidArgument("at least one CR is required".into()));
        }
        if !(self.gamma > 0.0) || !(self.d0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma and d0 must be positive, got {} and {}",
                self.gamma, self.d0
            )));
        }
        if !(self.sigma_q_db >= 0.0) {
            return Err(Error::InvalidArgument(format!("sigma_q_db must be >= 0, got {}", self.sigma_q_db)));
        }
        if !(self.fs > 0.0) {
            return Err(Error::InvalidArgument(format!("fs must be positive, got {}", self.fs)));
        }
        let half = self.side_a / 2.0 + 1e-9;
        for (k, p) in self.cr_locs.iter().enumerate() {
            let rel = p.sub(self.target_loc);
            if rel.x.abs() > half || rel.y.abs() > half {
                return Err(Error::InvalidArgument(format!(
                    "CR {k} at {p} lies outside the side-{} square around the target",
                    self.side_a
                )));
            }
            if *p == self.target_loc || *p == self.interferer_loc {
                return Err(Error::ZeroDistance { x: p.x, y: p.y });
            }
        }
        Ok(())
    }

    /// Received target and interferer powers in dBm at every CR.
    pub fn received_powers_dbm(&self, q_t: &[f64], q_i: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.k();
        if q_t.len() != k || q_i.len() != k {
            return Err(Error::LengthMismatch { left: k, right: q_t.len().min(q_i.len()) });
        }
        let mut pt = Vec::with_capacity(k);
        let mut pi = Vec::with_capacity(k);
        for (j, &rx) in self.cr_locs.iter().enumerate() {
            pt.push(received_power_db(self.p_t_dbm, self.target_loc, rx, self.gamma, self.d0, q_t[j])?);
            pi.push(received_power_db(self.p_i_dbm, self.interferer_loc, rx, self.gamma, self.d0, q_i[j])?);
        }
        Ok((pt, pi))
    }

    /// Same as [`Self::received_powers_dbm`] in milliwatts.
    pub fn received_powers_mw(&self, q_t: &[f64], q_i: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (pt, pi) = self.received_powers_dbm(q_t, q_i)?;
        Ok((pt.into_iter().map(dbm_to_mw).collect(), pi.into_iter().map(dbm_to_mw).collect()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fading {
    Static,
    RayleighPerTrial,
}

/// Tapped-delay-line power profile. Tap powers are normalized to unit sum.
#[derive(Clone, Debug, PartialEq)]
pub struct TapProfile {
    delays: Vec<f64>,
    powers: Vec<f64>,
    pub doppler_hz: f64,
    pub fading: Fading,
}

impl TapProfile {
    /// Builds a profile from `(delay seconds, average power dB)` pairs.
    pub fn new(taps: &[(f64, f64)], doppler_hz: f64, fading: Fading) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::InvalidArgument("tap profile needs at least one tap".into()));
        }
        if taps.windows(2).any(|w| w[1].0 < w[0].0) || taps.iter().any(|t| t.0 < 0.0) {
            return Err(Error::InvalidArgument("tap delays must be non-negative and non-decreasing".into()));
        }
        let lin: Vec<f64> = taps.iter().map(|t| dbm_to_mw(t.1)).collect();
        let total: f64 = lin.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument("tap profile has zero total power".into()));
        }
        Ok(TapProfile {
            delays: taps.iter().map(|t| t.0).collect(),
            powers: lin.iter().map(|p| p / total).collect(),
            doppler_hz,
            fading,
        })
    }

    /// `n_taps` taps spaced by `spacing` seconds decaying by `decay_db` per tap.
    pub fn exponential(n_taps: usize, spacing: f64, decay_db: f64, fading: Fading) -> Result<Self> {
        let taps: Vec<(f64, f64)> = (0..n_taps).map(|j| (j as f64 * spacing, -decay_db * j as f64)).collect();
        Self::new(&taps, 0.0, fading)
    }

    pub fn identity() -> Self {
        Self::new(&[(0.0, 0.0)], 0.0, Fading::Static).expect("valid single tap")
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    /// Normalized linear tap powers.
    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn max_delay_samples(&self, fs: f64) -> usize {
        self.delays.iter().map(|d| (d * fs).round() as usize).max().unwrap_or(0)
    }
}

/// One channel draw: integer sample delays and complex gains.
#[derive(Clone, Debug, PartialEq)]
pub struct TapRealization {
    pub delays: Vec<usize>,
    pub gains: Vec<Complex>,
}

/// Draws tap gains for one trial. Static taps use `√p_j`; Rayleigh taps are
/// `CN(0, p_j)`.
pub fn realize_taps<R: Rng + ?Sized>(profile: &TapProfile, fs: f64, rng: &mut R) -> TapRealization {
    let delays = profile.delays.iter().map(|d| (d * fs).round() as usize).collect();
    let gains = profile
        .powers
        .iter()
        .map(|&p| match profile.fading {
            Fading::Static => Complex::new(p.sqrt(), 0.0),
            Fading::RayleighPerTrial => {
                let s = (p / 2.0).sqrt();
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(s * re, s * im)
            }
        })
        .collect();
    TapRealization { delays, gains }
}

/// FIR convolution `y(n) = Σ_j g_j s(n - d_j)`, zero before the buffer start.
pub fn convolve(sig: &SampleBuffer, taps: &TapRealization) -> SampleBuffer {
    let n = sig.len();
    let mut out = vec![Complex::new(0.0, 0.0); n];
    for (&d, &g) in taps.delays.iter().zip(&taps.gains) {
        for i in d..n {
            out[i] += g * sig.samples[i - d];
        }
    }
    SampleBuffer::new(out, sig.sample_rate)
}

/// Passes `sig` through one realization of `profile`.
pub fn apply_multipath<R: Rng + ?Sized>(sig: &SampleBuffer, profile: &TapProfile, rng: &mut R) -> Result<SampleBuffer> {
    let taps = realize_taps(profile, sig.sample_rate, rng);
    if taps.delays.iter().any(|&d| d >= sig.len()) {
        return Err(Error::InvalidArgument("tap delay exceeds the buffer duration".into()));
    }
    Ok(convolve(sig, &taps))
}

/// Circularly-symmetric complex Gaussian noise with total variance `var`.
pub fn gen_noise<R: Rng + ?Sized>(n: usize, var: f64, fs: f64, rng: &mut R) -> SampleBuffer {
    let s = (var / 2.0).sqrt();
    let samples = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(s * re, s * im)
        })
        .collect();
    SampleBuffer::new(samples, fs)
}

fn check_aligned(a: &SampleBuffer, b: &SampleBuffer) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.sample_rate != b.sample_rate {
        return Err(Error::InvalidArgument(format!(
            "sample rates differ: {} vs {}",
            a.sample_rate, b.sample_rate
        )));
    }
    Ok(())
}

/// `r(n) = √p_t s_t(n) + √p_i s_i(n) + w(n)` with powers in mW and an explicit
/// noise buffer.
pub fn compose_with_noise(
    st: &SampleBuffer,
    si: &SampleBuffer,
    p_tk_mw: f64,
    p_ik_mw: f64,
    w: &SampleBuffer,
) -> Result<SampleBuffer> {
    check_aligned(st, si)?;
    check_aligned(st, w)?;
    if p_tk_mw < 0.0 || p_ik_mw < 0.0 {
        return Err(Error::NegativePower(p_tk_mw.min(p_ik_mw)));
    }
    let (a, b) = (p_tk_mw.sqrt(), p_ik_mw.sqrt());
    let samples = st
        .samples
        .iter()
        .zip(&si.samples)
        .zip(&w.samples)
        .map(|((&x, &y), &z)| x * a + y * b + z)
        .collect();
    Ok(SampleBuffer::new(samples, st.sample_rate))
}

/// Received signal at one CR with powers in dBm and fresh noise.
pub fn compose_received<R: Rng + ?Sized>(
    st: &SampleBuffer,
    si: &SampleBuffer,
    p_tk_dbm: f64,
    p_ik_dbm: f64,
    noise_var: f64,
    rng: &mut R,
) -> Result<SampleBuffer> {
    check_aligned(st, si)?;
    let w = if noise_var > 0.0 {
        gen_noise(st.len(), noise_var, st.sample_rate, rng)
    } else {
        SampleBuffer::zeros(st.len(), st.sample_rate)
    };
    compose_with_noise(st, si, dbm_to_mw(p_tk_dbm), dbm_to_mw(p_ik_dbm), &w)
}
