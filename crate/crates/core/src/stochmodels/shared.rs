use indexmap::IndexMap;
use lpcore::{LpProblem, Relation, VarId, INF};

use super::index::{Family, VariableIndex};
use super::ModelError;
use crate::portfolio::{Portfolio, UnitKind};

/// Cost per MWh of unmet or dumped heat.
pub const SLACK_COST: f64 = 1e6;

/// Inputs common to both market models.
#[derive(Debug, Clone, Copy)]
pub struct SharedInput<'a> {
    pub portfolio: &'a Portfolio,
    /// Probability of each scenario.
    pub probabilities: &'a [f64],
    /// RES unit id → trajectory per scenario (at least `demand.len()` hours).
    pub res: &'a IndexMap<String, Vec<Vec<f64>>>,
    pub demand: &'a [f64],
    /// Storage levels before the first hour, one per storage.
    pub storage_init: &'a [f64],
    /// Lowest allowed level after the last hour; `None` leaves it free. Per
    /// scenario the floor is capped at the initial level plus everything the
    /// connected units could deliver, so it cannot make the model infeasible
    /// unless a unit feeds several storages.
    pub terminal_floor: Option<&'a [f64]>,
}

fn family(
    lp: &mut LpProblem,
    name: &str,
    h: usize,
    n: usize,
    lb: f64,
    ub: f64,
    obj: impl Fn(usize, usize) -> f64,
) -> Result<Vec<VarId>, ModelError> {
    let mut out = Vec::with_capacity(h * n);
    for t in 0..h {
        for s in 0..n {
            out.push(lp.add_variable(format!("{name}_{t}_{s}"), lb, ub, obj(t, s))?);
        }
    }
    Ok(out)
}

/// Adds the portfolio variables and constraints (capacities, heat split over
/// connections, CHP and electric-boiler coupling, storage balance and end
/// level, heat demand with slacks, RES power split) plus the π-weighted
/// production costs.
pub fn build_shared_constraints(
    lp: &mut LpProblem,
    input: &SharedInput,
) -> Result<VariableIndex, ModelError> {
    let pf = input.portfolio;
    let h = input.demand.len();
    let n = input.probabilities.len();
    let pi = input.probabilities;
    if n == 0 {
        return Err(ModelError::Shape("no scenarios".into()));
    }
    if input.storage_init.len() != pf.storages.len() {
        return Err(ModelError::Shape(format!(
            "{} initial levels for {} storages",
            input.storage_init.len(),
            pf.storages.len()
        )));
    }
    for (st, &level) in pf.storages.iter().zip(input.storage_init) {
        if !(level >= st.s_min - 1e-6 && level <= st.s_max + 1e-6) {
            return Err(ModelError::StorageOutOfBounds {
                storage: st.id.clone(),
                level,
                min: st.s_min,
                max: st.s_max,
            });
        }
    }
    for u in pf.units.iter().filter(|u| u.kind.is_stochastic()) {
        let paths = input
            .res
            .get(&u.id)
            .ok_or_else(|| ModelError::MissingTrajectory(u.id.clone()))?;
        if paths.len() != n || paths.iter().any(|p| p.len() < h) {
            return Err(ModelError::MissingTrajectory(u.id.clone()));
        }
    }

    let nu = pf.units.len();
    let ns = pf.storages.len();
    let mut ix = VariableIndex {
        horizon: h,
        scenarios: n,
        q: vec![None; nu],
        q_dh: vec![None; nu],
        q_s: vec![vec![None; ns]; nu],
        p_chp: vec![None; nu],
        p_grid: vec![None; nu],
        p_heat: vec![vec![None; nu]; nu],
        p_gen: vec![None; nu],
        ..Default::default()
    };

    for (u, unit) in pf.units.iter().enumerate() {
        let id = &unit.id;
        if unit.kind.produces_heat() {
            let cost = match unit.kind {
                UnitKind::Chp | UnitKind::HeatOnly => unit.heat_cost,
                _ => 0.0,
            };
            let q = if unit.kind == UnitKind::StochasticHeat {
                // stochastic heat is pinned to its scenario value
                let path = &input.res[id];
                let mut v = Vec::with_capacity(h * n);
                for t in 0..h {
                    for s in 0..n {
                        let r = path[s][t];
                        if !(r >= unit.q_min - 1e-9 && r <= unit.q_max + 1e-9) {
                            return Err(ModelError::ResOutOfBounds {
                                unit: id.clone(),
                                value: r,
                            });
                        }
                        v.push(lp.add_variable(format!("q_{id}_{t}_{s}"), r, r, 0.0)?);
                    }
                }
                v
            } else {
                family(lp, &format!("q_{id}"), h, n, unit.q_min, unit.q_max, |_, s| pi[s] * cost)?
            };
            ix.q[u] = Some(q);
            if unit.connected_dh {
                ix.q_dh[u] = Some(family(lp, &format!("qdh_{id}"), h, n, 0.0, INF, |_, _| 0.0)?);
            }
            for (k, st) in pf.storages.iter().enumerate() {
                if unit.connects_to(&st.id) {
                    let name = format!("qs_{id}_{}", st.id);
                    ix.q_s[u][k] = Some(family(lp, &name, h, n, 0.0, INF, |_, _| 0.0)?);
                }
            }
        }
        match unit.kind {
            UnitKind::Chp => {
                ix.p_chp[u] = Some(family(lp, &format!("pchp_{id}"), h, n, 0.0, unit.p_max, |_, _| 0.0)?);
            }
            UnitKind::ElectricHeat => {
                let c = unit.heat_cost;
                ix.p_grid[u] = Some(family(lp, &format!("pgrid_{id}"), h, n, 0.0, INF, |_, s| pi[s] * c)?);
                for (gen, &tariff) in &unit.tariffs {
                    let g = pf
                        .units
                        .iter()
                        .position(|x| &x.id == gen)
                        .ok_or_else(|| ModelError::MissingTrajectory(gen.clone()))?;
                    let name = format!("pheat_{gen}_{id}");
                    ix.p_heat[u][g] = Some(family(lp, &name, h, n, 0.0, INF, |_, s| pi[s] * tariff)?);
                }
            }
            UnitKind::PowerOnlyRes => {
                ix.p_gen[u] = Some(family(lp, &format!("pgen_{id}"), h, n, 0.0, INF, |_, _| 0.0)?);
            }
            _ => {}
        }
    }
    for st in &pf.storages {
        let id = &st.id;
        ix.sigma.push(family(lp, &format!("sigma_{id}"), h, n, st.s_min, st.s_max, |_, _| 0.0)?);
        ix.sigma_out.push(family(lp, &format!("sout_{id}"), h, n, 0.0, st.s_max, |_, _| 0.0)?);
    }
    ix.unmet = family(lp, "unmet", h, n, 0.0, INF, |_, s| pi[s] * SLACK_COST)?;
    ix.surplus = family(lp, "surplus", h, n, 0.0, INF, |_, s| pi[s] * SLACK_COST)?;

    let get = |f: &Family, slot: usize| f.as_ref().map(|v| v[slot]);
    for t in 0..h {
        for s in 0..n {
            let slot = ix.slot(t, s);
            for (u, unit) in pf.units.iter().enumerate() {
                let Some(q) = get(&ix.q[u], slot) else {
                    continue;
                };
                // split over existing connections only
                let mut split = vec![(q, 1.0)];
                if let Some(v) = get(&ix.q_dh[u], slot) {
                    split.push((v, -1.0));
                }
                for k in 0..ns {
                    if let Some(v) = get(&ix.q_s[u][k], slot) {
                        split.push((v, -1.0));
                    }
                }
                lp.add_constraint(split, Relation::Eq, 0.0)?;
                let phi = unit.phi.unwrap_or(1.0);
                match unit.kind {
                    UnitKind::Chp => {
                        let p = get(&ix.p_chp[u], slot).expect("chp power");
                        lp.add_constraint(vec![(q, 1.0), (p, -phi)], Relation::Eq, 0.0)?;
                    }
                    UnitKind::ElectricHeat => {
                        let mut row = vec![(q, 1.0), (get(&ix.p_grid[u], slot).expect("grid"), -phi)];
                        for g in 0..nu {
                            if let Some(v) = get(&ix.p_heat[u][g], slot) {
                                row.push((v, -phi));
                            }
                        }
                        lp.add_constraint(row, Relation::Eq, 0.0)?;
                    }
                    _ => {}
                }
            }
            for k in 0..ns {
                let sig = ix.sigma[k][slot];
                let mut row = vec![(sig, 1.0), (ix.sigma_out[k][slot], 1.0)];
                let mut rhs = 0.0;
                if t == 0 {
                    rhs = input.storage_init[k];
                } else {
                    row.push((ix.sigma[k][ix.slot(t - 1, s)], -1.0));
                }
                for u in 0..nu {
                    if let Some(v) = get(&ix.q_s[u][k], slot) {
                        row.push((v, -1.0));
                    }
                }
                lp.add_constraint(row, Relation::Eq, rhs)?;
            }
            let mut row = vec![(ix.unmet[slot], 1.0), (ix.surplus[slot], -1.0)];
            for u in 0..nu {
                if let Some(v) = get(&ix.q_dh[u], slot) {
                    row.push((v, 1.0));
                }
            }
            for k in 0..ns {
                row.push((ix.sigma_out[k][slot], 1.0));
            }
            lp.add_constraint(row, Relation::Eq, input.demand[t])?;
            for (g, unit) in pf.units.iter().enumerate() {
                let Some(gen) = get(&ix.p_gen[g], slot) else {
                    continue;
                };
                let mut row = vec![(gen, 1.0)];
                for u in 0..nu {
                    if let Some(v) = get(&ix.p_heat[u][g], slot) {
                        row.push((v, 1.0));
                    }
                }
                lp.add_constraint(row, Relation::Eq, input.res[&unit.id][s][t])?;
            }
        }
    }
    if let (true, Some(floors)) = (h > 0, input.terminal_floor) {
        if floors.len() != ns {
            return Err(ModelError::Shape(format!("{} terminal levels for {ns} storages", floors.len())));
        }
        for k in 0..ns {
            let st = &pf.storages[k];
            let floor = floors[k].clamp(st.s_min, st.s_max);
            for s in 0..n {
                // never ask for more than the connected units can deliver
                let inflow: f64 = pf
                    .units
                    .iter()
                    .filter(|u| u.kind.produces_heat() && u.connects_to(&st.id))
                    .map(|u| match u.kind {
                        UnitKind::StochasticHeat => input.res[&u.id][s][..h].iter().sum(),
                        _ => u.q_max * h as f64,
                    })
                    .sum();
                let last = ix.sigma[k][ix.slot(h - 1, s)];
                lp.add_constraint(vec![(last, 1.0)], Relation::Ge, floor.min(input.storage_init[k] + inflow))?;
            }
        }
    }
    Ok(ix)
}
