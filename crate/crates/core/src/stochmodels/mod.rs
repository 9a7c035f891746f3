//! Two-stage stochastic LPs for the day-ahead and balancing markets built on
//! a shared portfolio model, plus bid-curve extraction from their solutions.

mod balancing;
mod curves;
mod dayahead;
mod index;
mod penalty;
mod shared;

pub use balancing::{build_balancing, extract_regulation_curves, BalancingInput, BalancingModel};
pub use curves::{curves_csv, BidCurve, CurveKind, MAX_STEPS, MONOTONE_TOLERANCE};
pub use dayahead::{build_dayahead, extract_bid_curves, DayAheadInput, DayAheadModel, FIRST_STAGE_HOURS};
pub use index::{value_of, VariableIndex};
pub use penalty::{penalty_prices, PenaltyPrices, Regulation};
pub use shared::{build_shared_constraints, SharedInput, SLACK_COST};

use lpcore::{LpError, LpProblem, LpSolution, SolveOptions, SolveStatus};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("horizon of {got} hours is shorter than the required {need}")]
    HorizonTooShort { need: usize, got: usize },
    #[error("no scenario trajectory for unit `{0}`")]
    MissingTrajectory(String),
    #[error("inconsistent model input: {0}")]
    Shape(String),
    #[error("storage `{storage}` level {level} outside [{min}, {max}]")]
    StorageOutOfBounds { storage: String, level: f64, min: f64, max: f64 },
    #[error("scenario value {value} outside the capacity of `{unit}`")]
    ResOutOfBounds { unit: String, value: f64 },
    #[error("{kind} curve at hour {hour} is not monotone: {detail}")]
    Monotonicity { hour: usize, kind: &'static str, detail: String },
    #[error("{steps} steps at hour {hour} exceed the market limit")]
    TooManySteps { hour: usize, steps: usize },
    #[error("solver finished with status {0:?}")]
    NotOptimal(SolveStatus),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Solves `lp` and insists on optimality. Positive heat slack is logged as a
/// warning since it means demand could not be met (or heat had to be dumped).
pub fn solve_model(lp: &LpProblem, index: &VariableIndex, options: &SolveOptions) -> Result<LpSolution, ModelError> {
    let sol = lpcore::solve(lp, options)?;
    if !sol.is_optimal() {
        return Err(ModelError::NotOptimal(sol.status));
    }
    let slack = max_slack(&sol, index);
    if slack > 1e-6 {
        log::warn!("heat balance needed {slack:.4} MWh of slack");
    }
    Ok(sol)
}

/// Largest unmet or surplus heat over all hours and scenarios.
pub fn max_slack(sol: &LpSolution, index: &VariableIndex) -> f64 {
    index
        .unmet
        .iter()
        .chain(&index.surplus)
        .map(|&v| sol.value(v))
        .fold(0.0, f64::max)
}
