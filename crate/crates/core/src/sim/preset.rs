use std::fmt;
use std::str::FromStr;

use super::{SimConfig, SimError};
use crate::portfolio::{Portfolio, UnitKind};

/// Which RES forecasts enter as scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResAblation {
    Wind,
    Solar,
    Both,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentPreset {
    PerfectInformation,
    SingleBidForecast,
    StochasticFull,
    StochasticNoBalancing,
    ResUncertaintyAblation(ResAblation),
    /// Tariff levels for the RES-fed electric heat, one run per level.
    TariffSweep(Vec<f64>),
    /// Price scenario counts, one run per value.
    StepCountSweep(Vec<usize>),
}

/// How a single run treats forecasts and markets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uncertainty {
    /// Realized prices and RES, one scenario each.
    Perfect,
    /// Point forecasts, one scenario each.
    PointForecast,
    Stochastic { wind: bool, solar: bool },
}

/// One concrete run produced by a preset.
#[derive(Debug, Clone)]
pub struct RunVariant {
    pub name: String,
    pub uncertainty: Uncertainty,
    pub balancing: bool,
    pub config: SimConfig,
    pub portfolio: Portfolio,
}

impl ExperimentPreset {
    /// `levels` equally spaced tariffs from `low` to `high`.
    pub fn tariff_levels(low: f64, high: f64, levels: usize) -> Vec<f64> {
        match levels {
            0 => Vec::new(),
            1 => vec![low],
            n => (0..n).map(|k| low + (high - low) * k as f64 / (n - 1) as f64).collect(),
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    /// Expands the preset into runs on copies of `config` and `portfolio`.
    pub fn variants(&self, config: &SimConfig, portfolio: &Portfolio) -> Result<Vec<RunVariant>, SimError> {
        let run = |name: String, uncertainty, balancing| RunVariant {
            name,
            uncertainty,
            balancing,
            config: config.clone(),
            portfolio: portfolio.clone(),
        };
        let full = Uncertainty::Stochastic { wind: true, solar: true };
        Ok(match self {
            ExperimentPreset::PerfectInformation => vec![run(self.name(), Uncertainty::Perfect, true)],
            ExperimentPreset::SingleBidForecast => vec![run(self.name(), Uncertainty::PointForecast, true)],
            ExperimentPreset::StochasticFull => vec![run(self.name(), full, true)],
            ExperimentPreset::StochasticNoBalancing => vec![run(self.name(), full, false)],
            &ExperimentPreset::ResUncertaintyAblation(which) => {
                let (wind, solar) = match which {
                    ResAblation::Wind => (true, false),
                    ResAblation::Solar => (false, true),
                    ResAblation::Both => (true, true),
                    ResAblation::None => (false, false),
                };
                vec![run(self.name(), Uncertainty::Stochastic { wind, solar }, true)]
            }
            ExperimentPreset::TariffSweep(levels) => {
                if levels.is_empty() || levels.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
                    return Err(SimError::Data("tariff levels must be non-negative".into()));
                }
                let eb: Vec<usize> = portfolio
                    .units
                    .iter()
                    .enumerate()
                    .filter(|(_, u)| u.kind == UnitKind::ElectricHeat && !u.tariffs.is_empty())
                    .map(|(i, _)| i)
                    .collect();
                if eb.is_empty() {
                    return Err(SimError::Data("tariff sweep needs an electric heat unit with a tariff".into()));
                }
                levels
                    .iter()
                    .map(|&level| {
                        let mut v = run(format!("tariff-{level:.2}"), full, true);
                        for &i in &eb {
                            v.portfolio.units[i].tariffs.values_mut().for_each(|t| *t = level);
                        }
                        v
                    })
                    .collect()
            }
            ExperimentPreset::StepCountSweep(ms) => {
                if ms.is_empty() {
                    return Err(SimError::Data("step sweep needs at least one scenario count".into()));
                }
                ms.iter()
                    .map(|&m| {
                        let mut v = run(format!("steps-{m}"), full, true);
                        v.config.price_scenarios = m;
                        v.config.validate().map(|_| v)
                    })
                    .collect::<Result<_, _>>()?
            }
        })
    }
}

impl fmt::Display for ExperimentPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: Vec<String>| xs.join(",");
        match self {
            ExperimentPreset::PerfectInformation => f.write_str("perfect-information"),
            ExperimentPreset::SingleBidForecast => f.write_str("single-bid-forecast"),
            ExperimentPreset::StochasticFull => f.write_str("stochastic-full"),
            ExperimentPreset::StochasticNoBalancing => f.write_str("stochastic-no-balancing"),
            ExperimentPreset::ResUncertaintyAblation(w) => write!(
                f,
                "res-ablation:{}",
                match w {
                    ResAblation::Wind => "wind",
                    ResAblation::Solar => "solar",
                    ResAblation::Both => "both",
                    ResAblation::None => "none",
                }
            ),
            ExperimentPreset::TariffSweep(l) => write!(f, "tariff-sweep:{}", join(l.iter().map(|x| x.to_string()).collect())),
            ExperimentPreset::StepCountSweep(m) => write!(f, "step-sweep:{}", join(m.iter().map(|x| x.to_string()).collect())),
        }
    }
}

impl FromStr for ExperimentPreset {
    type Err = String;

    /// Accepts the names printed by `Display`, e.g. `stochastic-full`,
    /// `res-ablation:wind`, `tariff-sweep:49.52,200,359.98`, `step-sweep:2,5,10,20`.
    fn from_str(s: &str) -> Result<Self, String> {
        let (head, arg) = s.split_once(':').unwrap_or((s, ""));
        let list = |what: &str| -> Result<Vec<String>, String> {
            let xs: Vec<String> = arg.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect();
            if xs.is_empty() {
                Err(format!("{head} needs a list of {what}"))
            } else {
                Ok(xs)
            }
        };
        Ok(match head {
            "perfect-information" => ExperimentPreset::PerfectInformation,
            "single-bid-forecast" => ExperimentPreset::SingleBidForecast,
            "stochastic-full" => ExperimentPreset::StochasticFull,
            "stochastic-no-balancing" => ExperimentPreset::StochasticNoBalancing,
            "res-ablation" => ExperimentPreset::ResUncertaintyAblation(match arg {
                "wind" => ResAblation::Wind,
                "solar" => ResAblation::Solar,
                "both" => ResAblation::Both,
                "none" => ResAblation::None,
                _ => return Err(format!("res-ablation takes wind|solar|both|none, got `{arg}`")),
            }),
            "tariff-sweep" => ExperimentPreset::TariffSweep(
                list("tariffs")?
                    .iter()
                    .map(|x| x.parse().map_err(|_| format!("bad tariff `{x}`")))
                    .collect::<Result<_, _>>()?,
            ),
            "step-sweep" => ExperimentPreset::StepCountSweep(
                list("scenario counts")?
                    .iter()
                    .map(|x| x.parse().map_err(|_| format!("bad count `{x}`")))
                    .collect::<Result<_, _>>()?,
            ),
            _ => return Err(format!("unknown preset `{s}`")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in [
            ExperimentPreset::PerfectInformation,
            ExperimentPreset::SingleBidForecast,
            ExperimentPreset::StochasticFull,
            ExperimentPreset::StochasticNoBalancing,
            ExperimentPreset::ResUncertaintyAblation(ResAblation::Solar),
            ExperimentPreset::TariffSweep(vec![49.52, 100.0]),
            ExperimentPreset::StepCountSweep(vec![2, 5, 10, 20]),
        ] {
            assert_eq!(p.to_string().parse::<ExperimentPreset>().unwrap(), p);
        }
        assert!("step-sweep:".parse::<ExperimentPreset>().is_err());
        assert!("fancy".parse::<ExperimentPreset>().is_err());
    }

    #[test]
    fn tariff_levels_span_the_range() {
        let l = ExperimentPreset::tariff_levels(49.52, 359.98, 3);
        assert_eq!(l.len(), 3);
        assert_eq!(l[0], 49.52);
        assert!((l[1] - 204.75).abs() < 1e-9);
        assert_eq!(l[2], 359.98);
    }

    #[test]
    fn step_sweep_rejects_counts_above_the_pool() {
        let cfg = SimConfig::default();
        let p = ExperimentPreset::StepCountSweep(vec![2, 500]);
        assert!(p.variants(&cfg, &Portfolio::default()).is_err());
        let v = ExperimentPreset::StepCountSweep(vec![2, 20]).variants(&cfg, &Portfolio::default()).unwrap();
        assert_eq!(v.iter().map(|r| r.config.price_scenarios).collect::<Vec<_>>(), vec![2, 20]);
    }
}
