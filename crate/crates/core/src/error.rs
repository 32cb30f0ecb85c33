use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    #[error("geodesic distance {distance} is within {tolerance:e} of the antipode")]
    NearAntipode { distance: f64, tolerance: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("non-finite integrand value {value} at x = {at}")]
    NonFiniteIntegrand { at: f64, value: String },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e}) after {panels} panels")]
    QuadratureNotConverged {
        panels: usize,
        estimate: f64,
        tolerance: f64,
    },

    #[error("grid with n_theta = {n_theta}, n_phi = {n_phi} too coarse: {reason}")]
    GridTooCoarse {
        n_theta: usize,
        n_phi: usize,
        reason: String,
    },

    #[error("band limit mismatch: state l_max {state} exceeds available {available}")]
    BandLimit { state: usize, available: usize },

    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("at N = {n}, t = {t}: {source}")]
    AtCell {
        n: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors raised by input validation rather than by a numerical
    /// routine failing to converge.
    pub fn is_config_error(&self) -> bool {
        if let Error::AtCell { source, .. } = self {
            return source.is_config_error();
        }
        matches!(
            self,
            Error::InvalidArgument { .. } | Error::Json(_) | Error::Io(_)
        )
    }
}
