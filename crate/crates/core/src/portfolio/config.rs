//! Portfolio config file.
//!
//! ```toml
//! beta = 0.1
//!
//! [unit.CHP1]
//! kind = "chp"              # chp | heat_only | electric_heat | stochastic_heat | power_only_res
//! heat_cost = 689.01
//! q_max = 4.63
//! p_max = 3.62
//! phi = 1.28
//! connected_dh = false
//! storages = ["ST2"]
//!
//! [unit.EB]
//! kind = "electric_heat"
//! heat_cost = 359.98
//! tariffs = { WF = 49.52 }
//! q_max = 6.0
//! phi = 1.0
//! storages = ["ST2"]
//!
//! [storage.ST2]
//! s_min = 0.0
//! s_max = 48.67
//! s_initial = 24.34
//! ```
//!
//! `q_min`, `p_max`, `heat_cost` default to 0, `connected_dh` to false and
//! `storages`/`tariffs` to empty. The tables `[solar_collector]` and
//! `[simulation]` are accepted and left to the harness.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Portfolio, Storage, Unit, UnitKind, DEFAULT_BETA};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config schema: {0}")]
    Schema(String),
    #[error("duplicate id `{id}` at line {line} (first defined at line {first})")]
    DuplicateId { id: String, line: usize, first: usize },
    #[error("unit.{unit}.storages references unknown storage `{storage}`")]
    DanglingStorage { unit: String, storage: String },
    #[error("unit.{unit}.tariffs references `{generator}`, which is not a power_only_res unit")]
    DanglingTariff { unit: String, generator: String },
    #[error("unit.{unit}.q_min = {q_min} exceeds q_max = {q_max}")]
    QminAboveQmax { unit: String, q_min: f64, q_max: f64 },
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_beta")]
    beta: f64,
    #[serde(default)]
    unit: IndexMap<String, RawUnit>,
    #[serde(default)]
    storage: IndexMap<String, RawStorage>,
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    solar_collector: Option<toml::Table>,
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    simulation: Option<toml::Table>,
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUnit {
    kind: UnitKind,
    #[serde(default)]
    heat_cost: f64,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    tariffs: IndexMap<String, f64>,
    #[serde(default)]
    q_min: f64,
    #[serde(default)]
    q_max: f64,
    #[serde(default)]
    p_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(default)]
    connected_dh: bool,
    #[serde(default)]
    storages: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStorage {
    #[serde(default)]
    s_min: f64,
    s_max: f64,
    s_initial: f64,
}

/// Parses and validates a portfolio config.
pub fn load_portfolio(text: &str) -> Result<Portfolio, ConfigError> {
    check_duplicate_headers(text)?;
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))?;
    let units = raw
        .unit
        .into_iter()
        .map(|(id, u)| Unit {
            id,
            kind: u.kind,
            heat_cost: u.heat_cost,
            tariffs: u.tariffs,
            q_min: u.q_min,
            q_max: u.q_max,
            p_max: u.p_max,
            phi: u.phi,
            connected_dh: u.connected_dh,
            storages: u.storages,
        })
        .collect();
    let storages = raw
        .storage
        .into_iter()
        .map(|(id, s)| Storage {
            id,
            s_min: s.s_min,
            s_max: s.s_max,
            s_initial: s.s_initial,
        })
        .collect();
    let p = Portfolio {
        units,
        storages,
        beta: raw.beta,
    };
    validate(&p)?;
    Ok(p)
}

/// Serializes a portfolio back to config text.
pub fn to_toml(p: &Portfolio) -> String {
    let raw = RawConfig {
        beta: p.beta,
        unit: p
            .units
            .iter()
            .map(|u| {
                (
                    u.id.clone(),
                    RawUnit {
                        kind: u.kind,
                        heat_cost: u.heat_cost,
                        tariffs: u.tariffs.clone(),
                        q_min: u.q_min,
                        q_max: u.q_max,
                        p_max: u.p_max,
                        phi: u.phi,
                        connected_dh: u.connected_dh,
                        storages: u.storages.clone(),
                    },
                )
            })
            .collect(),
        storage: p
            .storages
            .iter()
            .map(|s| {
                (
                    s.id.clone(),
                    RawStorage {
                        s_min: s.s_min,
                        s_max: s.s_max,
                        s_initial: s.s_initial,
                    },
                )
            })
            .collect(),
        solar_collector: None,
        simulation: None,
    };
    toml::to_string(&raw).expect("portfolio serializes")
}

/// The TOML parser reports redefined tables generically; scan headers first
/// so a repeated id gets its own diagnostic.
fn check_duplicate_headers(text: &str) -> Result<(), ConfigError> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        let Some(header) = line.strip_prefix('[').and_then(|l| l.split(']').next()) else {
            continue;
        };
        let header = header.trim();
        let id = header
            .strip_prefix("unit.")
            .or_else(|| header.strip_prefix("storage."));
        if let Some(id) = id {
            let id = id.trim().trim_matches('"').to_string();
            if let Some(&first) = seen.get(&id) {
                return Err(ConfigError::DuplicateId {
                    id,
                    line: i + 1,
                    first,
                });
            }
            seen.insert(id, i + 1);
        }
    }
    Ok(())
}

fn invalid(key: String, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

pub(crate) fn validate(p: &Portfolio) -> Result<(), ConfigError> {
    if !(p.beta > 0.0 && p.beta.is_finite()) {
        return Err(invalid("beta".into(), "must be a finite number > 0"));
    }
    let mut ids: HashMap<&str, ()> = HashMap::new();
    for id in p
        .units
        .iter()
        .map(|u| u.id.as_str())
        .chain(p.storages.iter().map(|s| s.id.as_str()))
    {
        if ids.insert(id, ()).is_some() {
            return Err(ConfigError::DuplicateId {
                id: id.into(),
                line: 0,
                first: 0,
            });
        }
    }
    for s in &p.storages {
        let key = format!("storage.{}", s.id);
        for (name, v) in [("s_min", s.s_min), ("s_max", s.s_max), ("s_initial", s.s_initial)] {
            if !v.is_finite() {
                return Err(invalid(format!("{key}.{name}"), "must be finite"));
            }
        }
        if !(s.s_min <= s.s_initial && s.s_initial <= s.s_max) {
            return Err(invalid(
                format!("{key}.s_initial"),
                format!("{} outside [{}, {}]", s.s_initial, s.s_min, s.s_max),
            ));
        }
    }
    for u in &p.units {
        let key = format!("unit.{}", u.id);
        for (name, v) in [
            ("heat_cost", u.heat_cost),
            ("q_min", u.q_min),
            ("q_max", u.q_max),
            ("p_max", u.p_max),
        ] {
            if !v.is_finite() {
                return Err(invalid(format!("{key}.{name}"), "must be finite"));
            }
        }
        if u.q_min < 0.0 {
            return Err(invalid(format!("{key}.q_min"), "must be >= 0"));
        }
        if u.q_min > u.q_max {
            return Err(ConfigError::QminAboveQmax {
                unit: u.id.clone(),
                q_min: u.q_min,
                q_max: u.q_max,
            });
        }
        if u.p_max < 0.0 {
            return Err(invalid(format!("{key}.p_max"), "must be >= 0"));
        }
        match (u.kind, u.phi) {
            (UnitKind::Chp | UnitKind::ElectricHeat, None) => {
                return Err(invalid(format!("{key}.phi"), "required for this kind"));
            }
            (UnitKind::Chp | UnitKind::ElectricHeat, Some(phi)) if !(phi > 0.0 && phi.is_finite()) => {
                return Err(invalid(format!("{key}.phi"), "must be > 0"));
            }
            (UnitKind::Chp | UnitKind::ElectricHeat, _) => {}
            (_, Some(_)) => {
                return Err(invalid(format!("{key}.phi"), "only chp and electric_heat units take phi"));
            }
            (_, None) => {}
        }
        if !u.tariffs.is_empty() && u.kind != UnitKind::ElectricHeat {
            return Err(invalid(format!("{key}.tariffs"), "only electric_heat units take tariffs"));
        }
        for (g, c) in &u.tariffs {
            let ok = p
                .unit(g)
                .is_some_and(|gen| gen.kind == UnitKind::PowerOnlyRes);
            if !ok {
                return Err(ConfigError::DanglingTariff {
                    unit: u.id.clone(),
                    generator: g.clone(),
                });
            }
            if !c.is_finite() {
                return Err(invalid(format!("{key}.tariffs.{g}"), "must be finite"));
            }
        }
        for s in &u.storages {
            if p.storage_index(s).is_none() {
                return Err(ConfigError::DanglingStorage {
                    unit: u.id.clone(),
                    storage: s.clone(),
                });
            }
        }
        if u.kind.produces_heat() {
            if !u.connected_dh && u.storages.is_empty() {
                return Err(invalid(
                    format!("{key}.storages"),
                    "unit connects to neither the network nor a storage",
                ));
            }
        } else if u.connected_dh || !u.storages.is_empty() || u.q_max > 0.0 {
            return Err(invalid(
                key,
                "power_only_res units carry no heat connections or heat capacity",
            ));
        }
    }
    Ok(())
}
