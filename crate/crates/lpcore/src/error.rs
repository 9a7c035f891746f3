use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("constraint references unknown variable handle {0}")]
    UnknownVariable(usize),
    #[error("variable `{name}` has lower bound {lb} above upper bound {ub}")]
    InvalidBounds { name: String, lb: f64, ub: f64 },
    #[error("non-finite objective coefficient for variable `{0}`")]
    NonFiniteObjective(String),
    #[error("non-finite coefficient or right-hand side in constraint {0}")]
    NonFiniteRow(usize),
    #[error("unknown LP backend `{0}`")]
    UnknownBackend(String),
    #[error("backend `{0}` is not compiled into this build")]
    BackendUnavailable(&'static str),
    #[error("numerical failure in {backend}: {detail}")]
    Numerical { backend: &'static str, detail: String },
}
