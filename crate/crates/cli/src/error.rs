use dsemi_core::{Error, EvalError, FlatError, NormalError, TransformError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input; the message carries the position.
    #[error("{origin}: {source}")]
    Input { origin: String, source: Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("emitted formula does not re-parse: {0}")]
    RoundTrip(String),
    #[error("cannot write {path}: {msg}")]
    Output { path: String, msg: String },
}

impl CliError {
    pub fn input(origin: &str, e: impl Into<Error>) -> Self {
        CliError::Input {
            origin: origin.to_string(),
            source: e.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input { .. } | CliError::Usage(_) | CliError::Output { .. } => 3,
            CliError::Engine(e) if is_input_fault(e) => 3,
            CliError::Engine(_) | CliError::RoundTrip(_) => 4,
        }
    }
}

/// Errors caused by what the user supplied rather than by engine limits.
fn is_input_fault(e: &Error) -> bool {
    match e {
        Error::Parse(_) | Error::Format(_) | Error::Scalar(_) | Error::Series(_) => true,
        Error::Eval(EvalError::UnboundVariable(_) | EvalError::SeriesArgumentOutOfDisk(_)) => true,
        Error::Normal(NormalError::QuantifierPresent) => true,
        Error::Transform(t) => matches!(
            t,
            TransformError::ArityMismatch { .. }
                | TransformError::UnknownVariable(_)
                | TransformError::WitnessInvalid(_)
                | TransformError::WitnessNotIntegral(_)
                | TransformError::QuantifierPresent
                | TransformError::NonPolynomialAtom(_)
                | TransformError::Eval(EvalError::UnboundVariable(_))
        ),
        Error::Flat(f) => matches!(
            f,
            FlatError::NonIntegralCoefficient(_)
                | FlatError::UnknownVariable(_)
                | FlatError::MissingImage(_)
                | FlatError::FlatnessNotAsserted
                | FlatError::PointNotIntegral(_)
                | FlatError::ArityMismatch { .. }
        ),
        _ => false,
    }
}
