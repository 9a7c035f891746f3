//! Units, storages and the plant portfolio, plus config and time-series I/O.

mod config;
mod timeseries;

pub use config::{load_portfolio, to_toml, ConfigError};
pub use timeseries::{
    align_horizon, load_timeseries, HorizonData, SeriesError, SeriesLabel, TimeSeries,
};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub const DEFAULT_BETA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    /// Combined heat and power, heat and power in fixed ratio `phi`.
    Chp,
    /// Dispatchable heat-only unit (gas boiler).
    HeatOnly,
    /// Heat from electricity: grid-fed and/or fed by paired RES generators.
    ElectricHeat,
    /// Scenario-driven heat (solar collectors).
    StochasticHeat,
    /// Scenario-driven power generator (wind farm).
    PowerOnlyRes,
}

impl UnitKind {
    pub const ALL: [UnitKind; 5] = [
        UnitKind::Chp,
        UnitKind::HeatOnly,
        UnitKind::ElectricHeat,
        UnitKind::StochasticHeat,
        UnitKind::PowerOnlyRes,
    ];

    pub fn produces_heat(self) -> bool {
        self != UnitKind::PowerOnlyRes
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, UnitKind::StochasticHeat | UnitKind::PowerOnlyRes)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UnitKind::Chp => "chp",
            UnitKind::HeatOnly => "heat_only",
            UnitKind::ElectricHeat => "electric_heat",
            UnitKind::StochasticHeat => "stochastic_heat",
            UnitKind::PowerOnlyRes => "power_only_res",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub id: String,
    pub kind: UnitKind,
    /// Cost per MWh of heat (per MWh of grid power for electric heat).
    pub heat_cost: f64,
    /// Paired RES generator id to tariff cost per MWh fed from it.
    pub tariffs: IndexMap<String, f64>,
    pub q_min: f64,
    pub q_max: f64,
    /// Electric capacity; for RES generators the installed power.
    pub p_max: f64,
    /// Heat per unit of power, CHP and electric heat only.
    pub phi: Option<f64>,
    pub connected_dh: bool,
    /// Ids of storages this unit can charge.
    pub storages: Vec<String>,
}

impl Unit {
    pub fn connects_to(&self, storage: &str) -> bool {
        self.storages.iter().any(|s| s == storage)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Storage {
    pub id: String,
    pub s_min: f64,
    pub s_max: f64,
    pub s_initial: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio {
    pub units: Vec<Unit>,
    pub storages: Vec<Storage>,
    pub beta: f64,
}

impl Default for Portfolio {
    fn default() -> Self {
        Portfolio {
            units: Vec::new(),
            storages: Vec::new(),
            beta: DEFAULT_BETA,
        }
    }
}

impl Portfolio {
    pub fn unit(&self, id: &str) -> Option<&Unit> {
        self.units.iter().find(|u| u.id == id)
    }

    pub fn unit_mut(&mut self, id: &str) -> Option<&mut Unit> {
        self.units.iter_mut().find(|u| u.id == id)
    }

    pub fn storage_index(&self, id: &str) -> Option<usize> {
        self.storages.iter().position(|s| s.id == id)
    }

    pub fn units_of(&self, kind: UnitKind) -> impl Iterator<Item = (usize, &Unit)> {
        self.units
            .iter()
            .enumerate()
            .filter(move |(_, u)| u.kind == kind)
    }

    pub fn initial_levels(&self) -> Vec<f64> {
        self.storages.iter().map(|s| s.s_initial).collect()
    }

    /// Ids of all scenario-driven units, heat and power alike.
    pub fn stochastic_ids(&self) -> Vec<&str> {
        self.units
            .iter()
            .filter(|u| u.kind.is_stochastic())
            .map(|u| u.id.as_str())
            .collect()
    }

    /// Upper bound on heat deliverable in one hour, ignoring storage.
    pub fn dispatchable_heat_capacity(&self) -> f64 {
        self.units
            .iter()
            .filter(|u| u.kind.produces_heat() && u.kind != UnitKind::StochasticHeat)
            .map(|u| u.q_max)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_partition_heat_and_power() {
        let heat: Vec<_> = UnitKind::ALL
            .iter()
            .filter(|k| k.produces_heat())
            .collect();
        assert_eq!(heat.len(), 4);
        assert!(!UnitKind::PowerOnlyRes.produces_heat());
        for k in UnitKind::ALL {
            let parsed: UnitKind =
                toml::Value::String(k.as_str().into()).try_into().unwrap();
            assert_eq!(parsed, k);
        }
    }
}
