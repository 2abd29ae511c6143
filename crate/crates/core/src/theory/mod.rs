//! Analytic statistics of the estimators.
//!
//! [`theta_moments`] gives the exact mean and covariance of the stacked
//! correlation vector. The location estimate is a ratio of quadratic forms in
//! that vector ([`build_quadforms`]); treating it as Gaussian,
//! [`rqgv_second_moment`] yields `E[x̂²]` and hence the RMSE.

mod fvc;
mod moments;
mod quadform;
mod rmse;
mod rqgv;

pub use fvc::{
    cac_quadform_moments, fvc_theoretical, sample_stat_moments, CacMoments, ComponentMoments, SampleStatMoments,
};
pub use moments::{idx, power_line, theta_moments, theta_moments_at, Mat12, ThetaStats, Vec12};
pub use quadform::{block_diag, build_power_vector, build_quadforms, QuadFormSet, Vec6};
pub use rmse::{interference_leakage, optimal_threshold, rmse_theoretical, Leakage, RmseResult, ThresholdCurve};
pub use rqgv::{rqgv_second_moment, RqgvDiagnostics, RqgvMoment, Whitened, MAX_PANELS, QUAD_TOL};

use crate::{Point, Result};

/// Theoretical FVC `var(R̂_k)/E|R̂_k|²` at every CR, with all noise terms kept.
pub fn fvc_per_cr(p_t: &[f64], p_i: &[f64], stats: &ThetaStats) -> Result<Vec<f64>> {
    p_t.iter()
        .zip(p_i)
        .map(|(&a, &b)| Ok(cac_quadform_moments(&build_power_vector(a, b)?, stats).fvc()))
        .collect()
}

/// CAC moments at every CR.
pub fn cac_moments_per_cr(p_t: &[f64], p_i: &[f64], stats: &ThetaStats) -> Result<Vec<CacMoments>> {
    p_t.iter()
        .zip(p_i)
        .map(|(&a, &b)| Ok(cac_quadform_moments(&build_power_vector(a, b)?, stats)))
        .collect()
}

/// Shifts locations into target-centric coordinates.
pub fn relative_to(locs: &[Point], origin: Point) -> Vec<Point> {
    locs.iter().map(|p| p.sub(origin)).collect()
}
