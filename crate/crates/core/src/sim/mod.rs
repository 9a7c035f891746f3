//! Market clearing and settlement, the rolling day-by-day replay,
//! experiment presets and reports.

mod clearing;
mod data;
mod preset;
mod replay;
mod report;
mod settlement;

pub use clearing::{clear_balancing, clear_dayahead, MarketOutcome};
pub use data::{perturbed_weather, synthesize, MarketData, SyntheticSpec};
pub use preset::{ExperimentPreset, ResAblation, RunVariant, Uncertainty};
pub use replay::{
    balancing_scenarios, day_scenarios, derive_seed, forecast_day, history_balancing_stats, run_day, run_range, solve_dayahead_day,
    step_count_study, DayForecast, DayResult, DayScenarios, Purpose, SolvedDayAhead, StepStudy, YearReport,
};
pub use report::{aggregate_monthly, emit_report, emit_sweep, ledger_csv, monthly_csv, summary_text, MonthlyRow};
pub use settlement::{resolve_actuals, ActualsInput, LedgerEntry};

use chrono::NaiveDate;
use serde::Deserialize;
use thiserror::Error;

use crate::forecast::{ForecastError, SolarCollectorModel, DEFAULT_BINS};
use crate::lpcore::SolveOptions;
use crate::portfolio::{load_portfolio, ConfigError, Portfolio, SeriesError};
use crate::scengen::ScenarioError;
use crate::stochmodels::ModelError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("data: {0}")]
    Data(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("forecast: {0}")]
    Forecast(#[from] ForecastError),
    #[error("scenarios: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("{day}{}: {source}", hour.map(|h| format!(" hour {h}")).unwrap_or_default())]
    Model {
        day: NaiveDate,
        hour: Option<usize>,
        source: ModelError,
    },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e.to_string())
    }
}

impl SimError {
    /// Process exit code: 3 for solver failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Model {
                source: ModelError::NotOptimal(_) | ModelError::Lp(_),
                ..
            } => 3,
            _ => 2,
        }
    }
}

/// Replay settings, read from the `[simulation]` table of the config.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dayahead_horizon: usize,
    pub balancing_horizon: usize,
    pub history_days: usize,
    /// Reduced scenario counts.
    pub price_scenarios: usize,
    pub res_scenarios: usize,
    pub balancing_scenarios: usize,
    /// Simulated scenarios before reduction.
    pub raw_price_scenarios: usize,
    pub raw_res_scenarios: usize,
    pub raw_balancing_scenarios: usize,
    pub price_fourier_max: usize,
    pub power_curve_bins: usize,
    /// Relative noise of the weather forecasts.
    pub weather_noise: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dayahead_horizon: 72,
            balancing_horizon: 12,
            history_days: 15,
            price_scenarios: 10,
            res_scenarios: 3,
            balancing_scenarios: 10,
            raw_price_scenarios: 50,
            raw_res_scenarios: 30,
            raw_balancing_scenarios: 40,
            price_fourier_max: 3,
            power_curve_bins: DEFAULT_BINS,
            weather_noise: 0.15,
            seed: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Data(format!("simulation.{m}")));
        if self.dayahead_horizon < 24 {
            return bad("dayahead_horizon must be at least 24");
        }
        if self.balancing_horizon == 0 {
            return bad("balancing_horizon must be positive");
        }
        if self.history_days < 14 {
            return bad("history_days must be at least 14 (two weeks for the price model)");
        }
        for (name, k, raw) in [
            ("price_scenarios", self.price_scenarios, self.raw_price_scenarios),
            ("res_scenarios", self.res_scenarios, self.raw_res_scenarios),
            ("balancing_scenarios", self.balancing_scenarios, self.raw_balancing_scenarios),
        ] {
            if k == 0 || k > raw {
                return bad(&format!("{name} = {k} must be in 1..={raw}"));
            }
        }
        if !(self.weather_noise >= 0.0) {
            return bad("weather_noise must be non-negative");
        }
        Ok(())
    }
}

/// Portfolio, collector model and replay settings from one config file.
#[derive(Debug, Clone)]
pub struct Setup {
    pub portfolio: Portfolio,
    pub solar: Option<SolarCollectorModel>,
    pub config: SimConfig,
    pub options: SolveOptions,
}

#[derive(Deserialize)]
struct Extras {
    #[serde(default)]
    solar_collector: Option<SolarCollectorModel>,
    #[serde(default)]
    simulation: SimConfig,
}

impl Setup {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        let portfolio = load_portfolio(text)?;
        let extras: Extras = toml::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))?;
        if let Some(sc) = &extras.solar_collector {
            sc.validate()?;
        }
        extras.simulation.validate()?;
        Ok(Setup {
            portfolio,
            solar: extras.solar_collector,
            config: extras.simulation,
            options: SolveOptions::default(),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}
