use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension d = {0}: need d >= 3")]
    InvalidDimension(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("divergent norm: {0}")]
    DivergentNorm(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("step size underflow at r = {r:e} (h = {h:e})")]
    Stiffness { r: f64, h: f64 },

    #[error("no ground-state bracket found for M in [{lo:e}, {hi:e}]: {detail}")]
    NoGroundState { lo: f64, hi: f64, detail: String },

    #[error("profile has no tail model; {0}")]
    IncompleteProfile(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("eigensolver hit its iteration limit: {0}")]
    IterationLimit(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag, used in error JSON and by the C bindings.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid_dimension",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DivergentNorm(_) => "divergent_norm",
            Error::InvalidInput(_) => "invalid_input",
            Error::Stiffness { .. } => "stiffness",
            Error::NoGroundState { .. } => "no_ground_state",
            Error::IncompleteProfile(_) => "incomplete_profile",
            Error::OutOfRange(_) => "out_of_range",
            Error::IterationLimit(_) => "iteration_limit",
            Error::NotFound(_) => "not_found",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
