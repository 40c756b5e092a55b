use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unitary is not excitation preserving (off-block mass {0:.3e})")]
    NotExcitationPreserving(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("bad probability distribution: {0}")]
    BadDistribution(String),

    #[error("depth {0} is odd; decoupled families need an even number of cycles")]
    OddDepth(usize),

    #[error("phase increment {increment:.4} rad between depths {from} and {to} exceeds the unwrap limit {limit:.4}")]
    UnwrapAmbiguity {
        from: usize,
        to: usize,
        increment: f64,
        limit: f64,
    },

    #[error("measured matrix is degenerate at depth {depth} (|det| = {det_abs:.3e})")]
    DegenerateMatrix { depth: usize, det_abs: f64 },

    #[error("swap-axis signs cannot be resolved: Bell-basis components are below the noise floor")]
    AmbiguousSign,

    #[error("integrator norm drift {0:.3e} exceeds tolerance; reduce the step size")]
    StepTooLarge(f64),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown plot kind `{0}`")]
    UnknownKind(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
