//! Point forecasts: wind power from a binned power curve, solar collector
//! heat, and day-ahead prices from a SARMAX model with weekly Fourier terms.

mod power_curve;
mod price;
mod solar;

pub use power_curve::{fit_power_curve, predict_wind_power, PowerCurveModel, DEFAULT_BINS};
pub use price::{
    fit_price_model, fourier_regressors, hours_since_epoch, predict_price, PriceLags, PriceModel,
    LAGS, WEEK,
};
pub use solar::{predict_solar_heat, SolarCollectorModel};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ForecastError {
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no observations")]
    Empty,
    #[error("all wind speeds are equal; cannot fit a power curve")]
    ConstantSpeeds,
    #[error("negative or non-finite wind speed {0}")]
    BadSpeed(f64),
    #[error("need at least {need} hours of price history, got {got}")]
    InsufficientHistory { need: usize, got: usize },
    #[error("need {need} lagged observations, got {got}")]
    InsufficientLags { need: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
}
