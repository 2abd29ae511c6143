//! Theoretical localization RMSE, the optimal FVC threshold and the
//! interference leakage bound.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::moments::{power_line, ThetaStats};
use super::quadform::build_quadforms;
use super::rqgv::{RqgvDiagnostics, Whitened};
use crate::localize::{candidate_thresholds, select_crs};
use crate::signals::SignalSpec;
use crate::{Error, Point, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RmseResult {
    pub epsilon: f64,
    pub ex2: f64,
    pub ey2: f64,
    pub diag_x: RqgvDiagnostics,
    pub diag_y: RqgvDiagnostics,
}

/// `ε = √(E[x̂²] + E[ŷ²])` for CRs selected by `s0`. Locations must be
/// relative to the target.
pub fn rmse_theoretical(p_t: &[f64], p_i: &[f64], locs: &[Point], s0: &[bool], stats: &ThetaStats) -> Result<RmseResult> {
    let q = build_quadforms(p_t, p_i, locs, s0)?;
    let w = Whitened::new(&q.b, stats)?;
    let x = w.second_moment(&q.a_x)?;
    let y = w.second_moment(&q.a_y)?;
    Ok(RmseResult {
        epsilon: (x.value + y.value).sqrt(),
        ex2: x.value,
        ey2: y.value,
        diag_x: x.diagnostics,
        diag_y: y.diagnostics,
    })
}

/// `ε(φ₀)` at every candidate threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdCurve {
    pub candidates: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub phi0_opt: f64,
    pub eps_opt: f64,
}

impl ThresholdCurve {
    /// `ε(φ₀)`, constant between consecutive candidates; `None` below the
    /// smallest one.
    pub fn epsilon_at(&self, phi0: f64) -> Option<f64> {
        let n = self.candidates.partition_point(|&c| c <= phi0);
        (n > 0).then(|| self.epsilon[n - 1])
    }
}

/// Evaluates `ε` at each sorted distinct FVC value and returns the minimizer
/// (ties go to the smaller threshold).
pub fn optimal_threshold(
    p_t: &[f64],
    p_i: &[f64],
    locs: &[Point],
    fvc_hat: &[f64],
    stats: &ThetaStats,
) -> Result<ThresholdCurve> {
    if fvc_hat.len() != locs.len() {
        return Err(Error::LengthMismatch { left: locs.len(), right: fvc_hat.len() });
    }
    let candidates = candidate_thresholds(fvc_hat);
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no FVC candidates".into()));
    }
    let epsilon = candidates
        .par_iter()
        .map(|&c| {
            let sel = select_crs(fvc_hat, c);
            let mut s0 = vec![false; locs.len()];
            sel.iter().for_each(|&j| s0[j] = true);
            rmse_theoretical(p_t, p_i, locs, &s0, stats).map(|r| r.epsilon)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (j, e) in epsilon.iter().enumerate() {
        if *e < epsilon[best] {
            best = j;
        }
    }
    Ok(ThresholdCurve { phi0_opt: candidates[best], eps_opt: epsilon[best], candidates, epsilon })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leakage {
    /// Squared Dirichlet factor `[(1/N) sin(πΔαN T_s) / sin(πΔαT_s)]²` of the
    /// first spectral line.
    pub first_line: f64,
    /// `|E[R̂_si(α_t)]|² / |H'(α_i)|²` with every spectral line included;
    /// `None` when the first line vanishes (rectangular pulse).
    pub exact: Option<f64>,
}

/// Normalized power that the interferer's cyclic features leak into the
/// target's cyclic frequency after `n` samples.
pub fn interference_leakage(spec_i: &SignalSpec, n: usize, fs: f64, alpha_t: f64) -> Result<Leakage> {
    let alpha_i = spec_i.cyclic_frequency();
    let da = (alpha_t - alpha_i).abs();
    if da == 0.0 {
        return Err(Error::EqualCyclicFrequencies);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let x = da / fs;
    let num = (PI * (x * n as f64).fract()).sin();
    let den = (PI * x.fract()).sin();
    let first_line = if den.abs() < 1e-300 { 1.0 } else { (num / (n as f64 * den)).powi(2) };
    let line = spec_i.shape()?.squared_line(1.0).norm_sqr();
    let exact = if line > 1e-20 {
        Some(power_line(spec_i, n, fs, alpha_t)?.norm_sqr() / line)
    } else {
        None
    };
    Ok(Leakage { first_line, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::min_samples;
    use crate::signals::Pulse;

    #[test]
    fn leakage_examples() {
        let si = SignalSpec::single_carrier(4, 25e6, 0.0).with_pulse(Pulse::Rectangular);
        let n = min_samples(200e6, 20e6, 25e6).unwrap();
        let l = interference_leakage(&si, n, 200e6, 20e6).unwrap();
        assert!(l.first_line < 1e-3);
        assert!(l.first_line < 1e-28);
        assert!(l.exact.is_none());
        let l = interference_leakage(&si, 250, 200e6, 20e6).unwrap();
        assert!(l.first_line > 0.0);
        assert!(interference_leakage(&si, 100, 200e6, 25e6).is_err());
    }

    #[test]
    fn curve_lookup_is_piecewise_constant() {
        let c = ThresholdCurve { candidates: vec![0.1, 0.3], epsilon: vec![2.0, 1.0], phi0_opt: 0.3, eps_opt: 1.0 };
        assert_eq!(c.epsilon_at(0.05), None);
        assert_eq!(c.epsilon_at(0.1), Some(2.0));
        assert_eq!(c.epsilon_at(0.29), Some(2.0));
        assert_eq!(c.epsilon_at(0.9), Some(1.0));
    }
}
