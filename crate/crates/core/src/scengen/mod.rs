//! Scenario sets: random-walk simulation around point forecasts, reduction by
//! partitioning around medoids, and balancing-price scenarios from sampled
//! regulation events.

mod balancing;
mod pam;
mod random_walk;

pub use balancing::{
    combine_balancing_prices, estimate_balancing_stats, exponential, generate_balancing_deviations,
    generate_row_with_events, generate_with_source, uniform_stream, BalancingStats, Direction, DurationCurve, DEAD_BAND,
};
pub use pam::{reduce_jointly, reduce_scenarios_pam, MAX_SWAP_ITERATIONS};
pub use random_walk::{scenario_rng, simulate_random_walk_scenarios, UNBOUNDED};

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Probabilities must sum to one within this tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario set: {0}")]
    Invalid(String),
    #[error("cannot keep {k} medoids out of {n} scenarios")]
    TooManyMedoids { k: usize, n: usize },
    #[error("no {0} regulation events in the history window; use a longer window")]
    NoActivation(Direction),
    #[error("histories have different lengths: {0}")]
    Misaligned(String),
    #[error("RES scenario sets disagree: {0}")]
    ResMismatch(String),
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    DayAheadPrice,
    UpPrice,
    DownPrice,
    WindPower,
    SolarHeat,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::DayAheadPrice => "dayahead_price",
            Quantity::UpPrice => "up_price",
            Quantity::DownPrice => "down_price",
            Quantity::WindPower => "wind_power",
            Quantity::SolarHeat => "solar_heat",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Hourly trajectories with probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub label: Quantity,
    pub trajectories: Vec<Vec<f64>>,
    pub probabilities: Vec<f64>,
}

impl ScenarioSet {
    pub fn new(
        label: Quantity,
        trajectories: Vec<Vec<f64>>,
        probabilities: Vec<f64>,
    ) -> Result<Self, ScenarioError> {
        let set = ScenarioSet {
            label,
            trajectories,
            probabilities,
        };
        set.validate()?;
        Ok(set)
    }

    /// Equiprobable set.
    pub fn uniform(label: Quantity, trajectories: Vec<Vec<f64>>) -> Result<Self, ScenarioError> {
        let n = trajectories.len().max(1);
        let probs = vec![1.0 / n as f64; trajectories.len()];
        Self::new(label, trajectories, probs)
    }

    /// Single scenario with probability one.
    pub fn deterministic(label: Quantity, path: Vec<f64>) -> Self {
        ScenarioSet {
            label,
            trajectories: vec![path],
            probabilities: vec![1.0],
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.trajectories.is_empty() {
            return Err(ScenarioError::Invalid("no scenarios".into()));
        }
        if self.trajectories.len() != self.probabilities.len() {
            return Err(ScenarioError::Invalid(format!(
                "{} trajectories but {} probabilities",
                self.trajectories.len(),
                self.probabilities.len()
            )));
        }
        let h = self.trajectories[0].len();
        if let Some(row) = self.trajectories.iter().position(|r| r.len() != h) {
            return Err(ScenarioError::Invalid(format!("row {row} has a different horizon")));
        }
        if let Some(p) = self.probabilities.iter().find(|p| !(**p > 0.0)) {
            return Err(ScenarioError::Invalid(format!("probability {p} is not positive")));
        }
        let total: f64 = self.probabilities.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(ScenarioError::Invalid(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.trajectories.first().map_or(0, Vec::len)
    }

    /// Probability-weighted mean trajectory.
    pub fn expected(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.horizon()];
        for (row, p) in self.trajectories.iter().zip(&self.probabilities) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += p * v;
            }
        }
        mean
    }

    /// Keeps only the first `len` hours.
    pub fn truncated(&self, len: usize) -> ScenarioSet {
        ScenarioSet {
            label: self.label,
            trajectories: self
                .trajectories
                .iter()
                .map(|r| r[..len.min(r.len())].to_vec())
                .collect(),
            probabilities: self.probabilities.clone(),
        }
    }

    /// Matrix CSV (one row per scenario, header `scenario,h0,h1,...`).
    pub fn matrix_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["scenario".to_string()];
        header.extend((0..self.horizon()).map(|t| format!("h{t}")));
        w.write_record(&header).expect("write to Vec");
        for (i, row) in self.trajectories.iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).expect("write to Vec");
        }
        String::from_utf8(w.into_inner().expect("flush Vec")).expect("csv is utf-8")
    }

    /// Sidecar CSV `scenario,probability`.
    pub fn probability_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scenario", "probability"]).expect("write to Vec");
        for (i, p) in self.probabilities.iter().enumerate() {
            w.write_record([i.to_string(), p.to_string()]).expect("write to Vec");
        }
        String::from_utf8(w.into_inner().expect("flush Vec")).expect("csv is utf-8")
    }

    /// Writes `<stem>.csv` and `<stem>_prob.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(), ScenarioError> {
        let io = |e: std::io::Error| ScenarioError::Io(e.to_string());
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join(format!("{stem}.csv")), self.matrix_csv()).map_err(io)?;
        std::fs::write(dir.join(format!("{stem}_prob.csv")), self.probability_csv()).map_err(io)?;
        Ok(())
    }
}

/// Price scenarios crossed with RES scenarios that share one index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointScenarioSet {
    pub price: ScenarioSet,
    pub res: Vec<ScenarioSet>,
    /// π_price(i) · π_res(j) at position `i * n + j`.
    pub probabilities: Vec<f64>,
}

impl JointScenarioSet {
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn price_count(&self) -> usize {
        self.price.len()
    }

    pub fn res_count(&self) -> usize {
        self.res.first().map_or(1, ScenarioSet::len)
    }

    /// `(price index, RES index)` of joint scenario `s`.
    pub fn split(&self, s: usize) -> (usize, usize) {
        (s / self.res_count(), s % self.res_count())
    }
}

/// Crosses `m` price scenarios with `n` RES scenarios.
pub fn cross_join(price: &ScenarioSet, res: &[ScenarioSet]) -> Result<JointScenarioSet, ScenarioError> {
    price.validate()?;
    let res_probs: Vec<f64> = match res.first() {
        Some(first) => first.probabilities.clone(),
        None => vec![1.0],
    };
    for set in res {
        set.validate()?;
        if set.len() != res_probs.len() {
            return Err(ScenarioError::ResMismatch(format!(
                "{} has {} scenarios, expected {}",
                set.label,
                set.len(),
                res_probs.len()
            )));
        }
        if set
            .probabilities
            .iter()
            .zip(&res_probs)
            .any(|(a, b)| (a - b).abs() > 1e-12)
        {
            return Err(ScenarioError::ResMismatch(format!(
                "{} has different probabilities",
                set.label
            )));
        }
    }
    let probabilities = price
        .probabilities
        .iter()
        .flat_map(|p| res_probs.iter().map(move |q| p * q))
        .collect();
    Ok(JointScenarioSet {
        price: price.clone(),
        res: res.to_vec(),
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ScenarioSet::new(Quantity::WindPower, vec![vec![1.0]], vec![0.5]).is_err());
        assert!(ScenarioSet::new(Quantity::WindPower, vec![vec![1.0], vec![2.0]], vec![1.0, 0.0]).is_err());
        assert!(ScenarioSet::new(Quantity::WindPower, vec![vec![1.0], vec![2.0, 3.0]], vec![0.5, 0.5]).is_err());
        assert!(ScenarioSet::uniform(Quantity::WindPower, vec![vec![1.0]; 3]).is_ok());
    }

    #[test]
    fn product_probabilities() {
        let p = ScenarioSet::new(Quantity::DayAheadPrice, vec![vec![1.0], vec![2.0]], vec![0.6, 0.4]).unwrap();
        let r = ScenarioSet::uniform(Quantity::WindPower, vec![vec![0.0], vec![1.0]]).unwrap();
        let j = cross_join(&p, &[r]).unwrap();
        assert_eq!(j.probabilities, vec![0.3, 0.3, 0.2, 0.2]);
        assert_eq!(j.split(3), (1, 1));
    }

    #[test]
    fn mismatched_res_counts() {
        let p = ScenarioSet::deterministic(Quantity::DayAheadPrice, vec![1.0]);
        let a = ScenarioSet::uniform(Quantity::WindPower, vec![vec![0.0], vec![1.0]]).unwrap();
        let b = ScenarioSet::uniform(Quantity::SolarHeat, vec![vec![0.0]; 3]).unwrap();
        assert!(matches!(cross_join(&p, &[a, b]), Err(ScenarioError::ResMismatch(_))));
    }

    #[test]
    fn csv_shapes() {
        let s = ScenarioSet::uniform(Quantity::WindPower, vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(s.matrix_csv(), "scenario,h0,h1\n0,1,2\n1,3,4\n");
        assert_eq!(s.probability_csv(), "scenario,probability\n0,0.5\n1,0.5\n");
    }
}
