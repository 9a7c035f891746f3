use serde::{Deserialize, Serialize};

use super::ForecastError;

/// Flat-plate collector field.
///
/// Units are up to the caller as long as they agree; the bundled config uses
/// area in 1000 m², radiation in kW/m² and temperatures in °C, which yields MW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolarCollectorModel {
    pub collector_area: f64,
    pub gamma: f64,
    pub eta1: f64,
    pub eta2: f64,
    #[serde(default = "default_t_avg")]
    pub t_avg: f64,
}

fn default_t_avg() -> f64 {
    45.0
}

impl SolarCollectorModel {
    pub fn validate(&self) -> Result<(), ForecastError> {
        if !(self.collector_area > 0.0) {
            return Err(ForecastError::Invalid("collector_area must be > 0".into()));
        }
        Ok(())
    }

    pub fn heat(&self, radiation: f64, ambient: f64) -> f64 {
        let dt = self.t_avg - ambient;
        let q = self.collector_area * (radiation * self.gamma - self.eta1 * dt - self.eta2 * dt * dt);
        q.max(0.0)
    }
}

/// Collector heat per hour, clamped at zero from below.
pub fn predict_solar_heat(
    model: &SolarCollectorModel,
    radiation: &[f64],
    ambient: &[f64],
) -> Result<Vec<f64>, ForecastError> {
    if radiation.len() != ambient.len() {
        return Err(ForecastError::LengthMismatch(radiation.len(), ambient.len()));
    }
    Ok(radiation
        .iter()
        .zip(ambient)
        .map(|(&i, &t)| model.heat(i, t))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(a: f64, gamma: f64, eta1: f64, eta2: f64) -> SolarCollectorModel {
        SolarCollectorModel {
            collector_area: a,
            gamma,
            eta1,
            eta2,
            t_avg: 45.0,
        }
    }

    #[test]
    fn zero_radiation_at_collector_temperature() {
        let m = model(3.0, 0.8, 0.01, 0.001);
        assert_eq!(predict_solar_heat(&m, &[0.0], &[45.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn optical_term_only() {
        let m = model(1.0, 0.8, 0.0, 0.0);
        let q = predict_solar_heat(&m, &[0.5], &[10.0]).unwrap()[0];
        assert!((q - 0.4).abs() < 1e-12);
    }

    #[test]
    fn losses_exceeding_gain_clamp_to_zero() {
        // 2 * (0.4 - 0.3 - 0.9) = -1.6
        let m = model(2.0, 0.8, 0.01, 0.001);
        assert_eq!(predict_solar_heat(&m, &[0.5], &[15.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn length_mismatch() {
        let m = model(1.0, 0.8, 0.0, 0.0);
        assert!(predict_solar_heat(&m, &[0.5, 0.1], &[10.0]).is_err());
    }
}
