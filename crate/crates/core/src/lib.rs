//! District-heating portfolio planning and market bidding.
//!
//! The pipeline runs: [`forecast`] point forecasts, [`scengen`] scenario sets,
//! [`stochmodels`] day-ahead and balancing stochastic LPs (solved through
//! `lpcore`), and [`sim`] market clearing, settlement and rolling replays.

pub mod forecast;
pub mod portfolio;
pub mod scengen;
pub mod sim;
pub mod stochmodels;

pub use lpcore;
