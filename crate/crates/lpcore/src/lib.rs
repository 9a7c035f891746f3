//! Solver-agnostic sparse linear programs.
//!
//! A [`LpProblem`] is built incrementally with [`LpProblem::add_variable`] and
//! [`LpProblem::add_constraint`], then handed to [`solve`] together with
//! [`SolveOptions`] selecting a backend. The crate always ships the
//! [`Backend::Reference`] bounded-variable revised simplex; the HiGHS backend
//! is available behind the `highs` cargo feature.
//!
//! All problems are minimisations. Infinite bounds are encoded internally as
//! the sentinel [`INF`] (`1e30`); any bound with magnitude at or above the
//! sentinel is treated as infinite by every backend.

mod error;
#[cfg(feature = "highs")]
mod highs_backend;
mod lpfile;
mod problem;
mod simplex;
mod solution;

pub use error::LpError;
pub use lpfile::write_lp;
pub use problem::{Constraint, LpProblem, Relation, RowId, VarId, Variable, INF};
pub use simplex::ReferenceSimplex;
pub use solution::{LpSolution, SolveStatus};

use std::time::Duration;

/// Which solver implementation to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Built-in dense bounded-variable revised simplex. Fine up to a few
    /// thousand rows.
    Reference,
    /// HiGHS, available with the `highs` feature.
    Highs,
}

impl Backend {
    /// The fastest backend compiled into this build.
    pub fn preferred() -> Self {
        if cfg!(feature = "highs") {
            Backend::Highs
        } else {
            Backend::Reference
        }
    }

    pub fn is_available(self) -> bool {
        match self {
            Backend::Reference => true,
            Backend::Highs => cfg!(feature = "highs"),
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = LpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "reference" | "simplex" => Ok(Backend::Reference),
            "highs" => Ok(Backend::Highs),
            other => Err(LpError::UnknownBackend(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub backend: Backend,
    pub time_limit: Option<Duration>,
    /// Primal feasibility tolerance on normalized rows.
    pub tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            backend: Backend::preferred(),
            time_limit: None,
            tolerance: 1e-9,
        }
    }
}

impl SolveOptions {
    pub fn with_backend(backend: Backend) -> Self {
        SolveOptions {
            backend,
            ..Default::default()
        }
    }
}

/// A solver implementation.
pub trait LpBackend {
    fn solve(&self, problem: &LpProblem, options: &SolveOptions) -> Result<LpSolution, LpError>;
}

/// Solve `problem` with the backend named in `options`.
pub fn solve(problem: &LpProblem, options: &SolveOptions) -> Result<LpSolution, LpError> {
    match options.backend {
        Backend::Reference => ReferenceSimplex::default().solve(problem, options),
        #[cfg(feature = "highs")]
        Backend::Highs => highs_backend::HighsBackend.solve(problem, options),
        #[cfg(not(feature = "highs"))]
        Backend::Highs => Err(LpError::BackendUnavailable("highs")),
    }
}
