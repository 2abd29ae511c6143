//! Transmitter localization under spectrally overlapped interference using
//! cyclostationary weighted-centroid estimators.
//!
//! The crate is organized bottom-up:
//!
//! - [`signals`]: unit-power single-carrier and OFDM baseband generators.
//! - [`channel`]: path loss, log-normal shadowing, tapped-delay-line multipath
//!   and the composition of the received signal at each receiver.
//! - [`cyclo`]: non-asymptotic cyclic autocorrelation / cross-correlation
//!   estimators, the sample-count lower bound and the feature variation
//!   coefficient (FVC).
//! - [`localize`]: weighted centroid (WCL), cyclic WCL and improved cyclic WCL
//!   with k-means threshold selection.
//! - [`theory`]: Gaussian model of the stacked CAC/CCC vector, second moments
//!   of ratios of quadratic forms and the analytic RMSE.
//! - [`harness`]: scenario files, seeded Monte Carlo sweeps and CSV output.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cyclo;
pub mod error;
pub mod geom;
pub mod harness;
pub mod localize;
pub mod rng;
pub mod signals;
pub mod theory;

pub use error::{Error, Result};
pub use geom::Point;

/// Complex sample type used throughout the crate.
pub type Complex = num_complex::Complex64;
