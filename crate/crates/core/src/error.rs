use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numerical kernel produced or received a non-finite value, or failed to converge.
    #[error("numerical error: {message}{}", coordinate.map(|c| format!(" (coordinate {c})")).unwrap_or_default())]
    Numerical {
        message: String,
        coordinate: Option<usize>,
    },

    /// Root search was handed an interval without a sign change.
    #[error("no sign change on bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// Factorization met a pivot that is not positive (relative to the largest diagonal entry).
    #[error("matrix is not positive definite at pivot {pivot}{}", context_suffix(context))]
    SingularMatrix { pivot: usize, context: String },

    /// An argument lies outside the domain of the function or family.
    #[error("domain error: {0}")]
    Domain(String),

    /// An outcome model produced an invalid distribution.
    #[error("model error: {0}")]
    Model(String),

    /// Invalid run configuration.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

fn context_suffix(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" ({context})")
    }
}

impl Error {
    pub(crate) fn numerical(message: impl Into<String>) -> Self {
        Error::Numerical {
            message: message.into(),
            coordinate: None,
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub(crate) fn model(message: impl Into<String>) -> Self {
        Error::Model(message.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Attaches a description of where a singular matrix was met.
    pub fn with_context(self, ctx: &str) -> Self {
        match self {
            Error::SingularMatrix { pivot, context } if context.is_empty() => {
                Error::SingularMatrix {
                    pivot,
                    context: ctx.to_string(),
                }
            }
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
