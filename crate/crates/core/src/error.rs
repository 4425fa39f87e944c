use thiserror::Error;

/// Failures raised while evaluating a coefficient function or a scalar primitive.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("argument outside the domain of {function}: {detail}")]
    Domain { function: String, detail: String },
    #[error("{op} has no exact value at this argument; demote to float mode")]
    Inexact { op: String },
    #[error("function of arity {expected} evaluated with {got} arguments")]
    Arity { expected: usize, got: usize },
    #[error("derivative of order {requested} requested but the oracle is only reliable to order {reliable}")]
    OrderExceeded { requested: usize, reliable: usize },
}

impl EvalError {
    pub(crate) fn domain(function: &str, detail: impl Into<String>) -> Self {
        EvalError::Domain {
            function: function.to_string(),
            detail: detail.into(),
        }
    }

    pub(crate) fn inexact(op: &str) -> Self {
        EvalError::Inexact { op: op.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("skeleton error: {0}")]
    Skeleton(String),
    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
