use thiserror::Error;

/// Errors produced by the simulator library.
///
/// The variants map onto the three exit-code classes of the CLI:
/// configuration problems, numerical-validation failures and runtime (I/O)
/// failures.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A special function was called outside its admitted domain.
    #[error("{function}: argument {x} outside the admitted domain ({reason})")]
    Domain {
        function: &'static str,
        x: f64,
        reason: &'static str,
    },

    /// The frequency window of the field quadrature cuts through the spectrum.
    #[error("frequency window too small: boundary integrand is {ratio:.3e} of its peak (limit 1e-8)")]
    WindowTooSmall { ratio: f64 },

    /// The phase grid does not resolve the carrier.
    #[error("phase grid too coarse: step {step} exceeds 0.15")]
    GridTooCoarse { step: f64 },

    /// The grid does not contain the whole pulse.
    #[error("pulse truncated: |xi|/xi0 = {edge:.3e} at the grid boundary (limit 1e-3)")]
    TruncatedPulse { edge: f64 },

    /// An iterative numerical procedure did not converge.
    #[error("{what} did not converge: {detail}")]
    NoConvergence { what: &'static str, detail: String },

    /// Configuration file problem (unknown key, bad value, unreadable).
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Classification used for process exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter { .. } | Error::Config(_) => ErrorKind::Config,
            Error::Domain { .. }
            | Error::WindowTooSmall { .. }
            | Error::GridTooCoarse { .. }
            | Error::TruncatedPulse { .. }
            | Error::NoConvergence { .. } => ErrorKind::Numerical,
            Error::Io(_) => ErrorKind::Runtime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
    Runtime,
}

impl ErrorKind {
    /// Process exit code for this class of failure.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Runtime => 4,
        }
    }
}
