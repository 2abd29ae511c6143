use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported modulation order {0} (expected 2, 4, 16 or 64)")]
    UnsupportedModulation(u32),

    #[error("invalid signal spec: {0}")]
    InvalidSignal(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("transmitter and receiver are colocated at ({x}, {y})")]
    ZeroDistance { x: f64, y: f64 },

    #[error("buffer length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("target and interferer cyclic frequencies are equal")]
    EqualCyclicFrequencies,

    #[error("FVC undefined: all realizations are zero")]
    UndefinedFvc,

    #[error("confidence level unattainable at M = {m}: Q = {q}")]
    ConfidenceUnattainable { m: usize, q: f64 },

    #[error("no M <= {m_max} satisfies z*S < {delta}; best z*S = {best}")]
    NoAdmissibleM { m_max: usize, delta: f64, best: f64 },

    #[error("all centroid weights are zero")]
    AllZeroWeights,

    #[error("no receiver passes threshold {phi0}; smallest FVC is {min_phi}")]
    EmptySelection { phi0: f64, min_phi: f64 },

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("pulse not supported on the analytic path: {0}")]
    UnsupportedPulse(String),

    #[error("denominator quadratic form is degenerate (all eigenvalues zero)")]
    DegenerateDenominator,

    #[error("quadrature did not converge: estimate {estimate}, error {error} after {panels} panels")]
    QuadratureNonConvergent {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("covariance is not positive semidefinite")]
    NotPositiveSemidefinite,

    #[error("negative power {0}")]
    NegativePower(f64),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("trial {trial}{}: {source}", cr.map(|k| format!(", CR {k}")).unwrap_or_default())]
    Trial {
        trial: usize,
        cr: Option<usize>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_trial(self, trial: usize, cr: Option<usize>) -> Error {
        Error::Trial {
            trial,
            cr,
            source: Box::new(self),
        }
    }
}
