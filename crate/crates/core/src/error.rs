use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("insufficient points: requested {requested}, deployment has {available}")]
    InsufficientPoints { requested: usize, available: usize },

    /// Path loss evaluated at zero distance.
    #[error("path loss singularity at r = {0}")]
    Singularity(f64),

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    /// Quadrature or another numerical procedure failed to converge.
    #[error("numerical failure in {context}: {detail}")]
    Numerical { context: String, detail: String },

    /// A trajectory could not be placed inside the guarded window.
    #[error("trajectory placement failed after {attempts} attempts: {reason}")]
    Placement { attempts: usize, reason: String },

    /// Malformed configuration: unknown key, unparsable value, missing field.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by user input rather than by a computation.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Parameter { .. } | Error::Config(_) | Error::Io(_))
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn numerical(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Numerical {
            context: context.into(),
            detail: detail.into(),
        }
    }
}

/// Fails with [`Error::Parameter`] unless `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be > 0, got {value}")))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
