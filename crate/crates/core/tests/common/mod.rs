#![allow(dead_code)]

use dhbid::lpcore::{LpSolution, SolveOptions};
use dhbid::portfolio::{Portfolio, Storage, Unit, UnitKind};
use dhbid::scengen::{Quantity, ScenarioSet};
use dhbid::stochmodels::{value_of, VariableIndex};
use indexmap::IndexMap;
use rand::Rng;
use testkit::toy::Toy;

pub fn options() -> SolveOptions {
    SolveOptions::default()
}

pub fn unit(id: &str, kind: UnitKind) -> Unit {
    Unit {
        id: id.into(),
        kind,
        heat_cost: 0.0,
        tariffs: IndexMap::new(),
        q_min: 0.0,
        q_max: 0.0,
        p_max: 0.0,
        phi: None,
        connected_dh: true,
        storages: Vec::new(),
    }
}

pub fn boiler(id: &str, cost: f64, q_max: f64) -> Unit {
    Unit {
        heat_cost: cost,
        q_max,
        ..unit(id, UnitKind::HeatOnly)
    }
}

pub fn chp(id: &str, cost: f64, q_max: f64, phi: f64) -> Unit {
    Unit {
        heat_cost: cost,
        q_max,
        p_max: q_max / phi,
        phi: Some(phi),
        ..unit(id, UnitKind::Chp)
    }
}

pub fn portfolio(units: Vec<Unit>, storages: Vec<Storage>) -> Portfolio {
    Portfolio {
        units,
        storages,
        beta: 0.1,
    }
}

/// The toy as a portfolio plus 24-hour price scenarios and demand; hours
/// after the toy's own are idle (zero price and demand).
pub fn toy_instance(toy: &Toy) -> (Portfolio, ScenarioSet, Vec<f64>) {
    let mut pf = portfolio(
        vec![
            chp("chp", toy.chp_cost, toy.chp_q_max, toy.phi),
            boiler("gb", toy.boiler_cost, toy.boiler_q_max),
        ],
        Vec::new(),
    );
    pf.beta = toy.beta;
    let hours = toy.prices[0].len();
    let pad = |row: &Vec<f64>| {
        let mut r = row.clone();
        r.resize(24, 0.0);
        r
    };
    let prices = ScenarioSet::new(
        Quantity::DayAheadPrice,
        vec![pad(&toy.prices[0]), pad(&toy.prices[1])],
        toy.probs.to_vec(),
    )
    .unwrap();
    let mut demand = vec![toy.demand; hours];
    demand.resize(24, 0.0);
    (pf, prices, demand)
}

pub fn random_toy<R: Rng>(rng: &mut R) -> Toy {
    let hours = 3;
    let price = |rng: &mut R| (rng.random_range(-50.0..400.0_f64) / 10.0).round() * 10.0;
    let p0 = rng.random_range(0.2..0.8);
    Toy {
        chp_cost: rng.random_range(300.0..800.0),
        chp_q_max: rng.random_range(1.0..3.0),
        phi: rng.random_range(1.0..2.0),
        boiler_cost: rng.random_range(300.0..500.0),
        boiler_q_max: 5.0,
        demand: rng.random_range(1.0..4.0),
        beta: 0.1,
        prices: [
            (0..hours).map(|_| price(rng)).collect(),
            (0..hours).map(|_| price(rng)).collect(),
        ],
        probs: [p0, 1.0 - p0],
    }
}

/// Small random instance: up to three units, up to two storages, 24 hours,
/// up to four price and four RES scenarios.
pub struct Instance {
    pub portfolio: Portfolio,
    pub prices: ScenarioSet,
    pub res: Vec<ScenarioSet>,
    pub res_units: Vec<String>,
    pub demand: Vec<f64>,
    pub storage_init: Vec<f64>,
}

pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let hours = 24;
    let ns = rng.random_range(0..=2);
    let storages: Vec<Storage> = (0..ns)
        .map(|k| {
            let s_max = rng.random_range(5.0..20.0);
            Storage {
                id: format!("st{k}"),
                s_min: 0.0,
                s_max,
                s_initial: rng.random_range(0.0..s_max),
            }
        })
        .collect();
    let nu = rng.random_range(1..=3);
    let kinds = [
        UnitKind::Chp,
        UnitKind::HeatOnly,
        UnitKind::ElectricHeat,
        UnitKind::StochasticHeat,
        UnitKind::PowerOnlyRes,
    ];
    let mut units = Vec::new();
    for u in 0..nu {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let id = format!("{}{u}", kind.as_str());
        let q_max = rng.random_range(2.0..8.0);
        let mut x = match kind {
            UnitKind::Chp => chp(&id, rng.random_range(300.0..800.0), q_max, rng.random_range(1.0..2.0)),
            UnitKind::HeatOnly => boiler(&id, rng.random_range(300.0..500.0), q_max),
            UnitKind::ElectricHeat => Unit {
                heat_cost: rng.random_range(50.0..400.0),
                q_max,
                phi: Some(rng.random_range(0.9..3.0)),
                ..unit(&id, kind)
            },
            UnitKind::StochasticHeat => Unit { q_max, ..unit(&id, kind) },
            UnitKind::PowerOnlyRes => Unit { p_max: q_max, ..unit(&id, kind) },
        };
        if kind.produces_heat() {
            x.storages = storages.iter().filter(|_| rng.random_bool(0.6)).map(|s| s.id.clone()).collect();
            x.connected_dh = x.storages.is_empty() || rng.random_bool(0.7);
        } else {
            x.connected_dh = false;
        }
        units.push(x);
    }
    let gens: Vec<String> = units.iter().filter(|u| u.kind == UnitKind::PowerOnlyRes).map(|u| u.id.clone()).collect();
    for u in units.iter_mut().filter(|u| u.kind == UnitKind::ElectricHeat) {
        for g in &gens {
            u.tariffs.insert(g.clone(), rng.random_range(0.0..100.0));
        }
    }
    let m = rng.random_range(1..=4);
    let n = rng.random_range(1..=4);
    let price_rows = (0..m)
        .map(|_| (0..hours).map(|_| (rng.random_range(-100.0..500.0_f64) / 25.0).round() * 25.0).collect())
        .collect();
    let prices = ScenarioSet::uniform(Quantity::DayAheadPrice, price_rows).unwrap();
    let mut res = Vec::new();
    let mut res_units = Vec::new();
    let res_probs: Vec<f64> = {
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        let t: f64 = w.iter().sum();
        w.iter().map(|v| v / t).collect()
    };
    for u in units.iter().filter(|u| u.kind.is_stochastic()) {
        let (cap, label) = match u.kind {
            UnitKind::StochasticHeat => (u.q_max, Quantity::SolarHeat),
            _ => (u.p_max, Quantity::WindPower),
        };
        let rows = (0..n).map(|_| (0..hours).map(|_| rng.random_range(0.0..cap)).collect()).collect();
        res.push(ScenarioSet::new(label, rows, res_probs.clone()).unwrap());
        res_units.push(u.id.clone());
    }
    let demand = (0..hours).map(|_| rng.random_range(0.0..8.0)).collect();
    let storage_init = storages.iter().map(|s| s.s_initial).collect();
    Instance {
        portfolio: portfolio(units, storages),
        prices,
        res,
        res_units,
        demand,
        storage_init,
    }
}

/// RES trajectories keyed by unit, per joint scenario `i * n + j`.
pub fn joint_res(inst: &Instance) -> IndexMap<String, Vec<Vec<f64>>> {
    let n = inst.res.first().map_or(1, ScenarioSet::len);
    let m = inst.prices.len();
    inst.res_units
        .iter()
        .zip(&inst.res)
        .map(|(id, set)| (id.clone(), (0..m * n).map(|s| set.trajectories[s % n].clone()).collect()))
        .collect()
}

/// Largest residual of the portfolio constraints and bounds, recomputed from
/// raw solution values.
pub fn max_residual(
    pf: &Portfolio,
    ix: &VariableIndex,
    sol: &LpSolution,
    res: &IndexMap<String, Vec<Vec<f64>>>,
    demand: &[f64],
    storage_init: &[f64],
    terminal: bool,
) -> f64 {
    let v = |x| value_of(sol, x);
    let mut worst: f64 = 0.0;
    let mut note = |r: f64| worst = worst.max(r.abs());
    let h = ix.horizon;
    for s in 0..ix.scenarios {
        for t in 0..h {
            let mut heat = -demand[t] + sol.value(ix.unmet(t, s)) - sol.value(ix.surplus(t, s));
            for (u, unit) in pf.units.iter().enumerate() {
                if unit.kind.produces_heat() {
                    let q = v(ix.q(u, t, s));
                    note((q - unit.q_min).min(0.0));
                    note((unit.q_max - q).min(0.0));
                    let mut split = q - v(ix.q_dh(u, t, s));
                    for k in 0..pf.storages.len() {
                        let x = v(ix.q_s(u, k, t, s));
                        note(x.min(0.0));
                        if !unit.connects_to(&pf.storages[k].id) {
                            note(x);
                        }
                        split -= x;
                    }
                    note(split);
                    if !unit.connected_dh {
                        note(v(ix.q_dh(u, t, s)));
                    }
                    heat += v(ix.q_dh(u, t, s));
                }
                let phi = unit.phi.unwrap_or(1.0);
                match unit.kind {
                    UnitKind::Chp => note(v(ix.q(u, t, s)) - phi * v(ix.p_chp(u, t, s))),
                    UnitKind::ElectricHeat => {
                        let fed: f64 = (0..pf.units.len()).map(|g| v(ix.p_heat(g, u, t, s))).sum();
                        note(v(ix.p_grid(u, t, s)).min(0.0));
                        note(v(ix.q(u, t, s)) - phi * (v(ix.p_grid(u, t, s)) + fed));
                    }
                    UnitKind::StochasticHeat => note(v(ix.q(u, t, s)) - res[&unit.id][s][t]),
                    UnitKind::PowerOnlyRes => {
                        let used: f64 = (0..pf.units.len()).map(|e| v(ix.p_heat(u, e, t, s))).sum();
                        note(v(ix.p_gen(u, t, s)) + used - res[&unit.id][s][t]);
                    }
                    UnitKind::HeatOnly => {}
                }
            }
            for (k, st) in pf.storages.iter().enumerate() {
                let level = sol.value(ix.sigma(k, t, s));
                let prev = if t == 0 { storage_init[k] } else { sol.value(ix.sigma(k, t - 1, s)) };
                let inflow: f64 = (0..pf.units.len()).map(|u| v(ix.q_s(u, k, t, s))).sum();
                let out = sol.value(ix.sigma_out(k, t, s));
                note(level - prev - inflow + out);
                note((level - st.s_min).min(0.0));
                note((st.s_max - level).min(0.0));
                heat += out;
            }
            note(heat);
        }
        if terminal && h > 0 {
            for (k, &s0) in storage_init.iter().enumerate() {
                note((sol.value(ix.sigma(k, h - 1, s)) - s0).min(0.0));
            }
        }
    }
    worst
}
