use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::clearing::MarketOutcome;
use crate::lpcore::SolveOptions;
use crate::portfolio::{Portfolio, UnitKind};
use crate::scengen::{Quantity, ScenarioSet};
use crate::stochmodels::{
    build_balancing, solve_model, value_of, BalancingInput, ModelError, Regulation, SLACK_COST,
};

/// Settled quantities, prices and cash flows of one hour. Costs are positive,
/// revenues enter the total with a minus sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub hour: NaiveDateTime,
    pub committed: f64,
    pub up: f64,
    pub down: f64,
    pub imbalance_plus: f64,
    pub imbalance_minus: f64,
    pub dayahead_price: f64,
    pub up_price: f64,
    pub down_price: f64,
    pub regulation: Regulation,
    pub penalty_plus: f64,
    pub penalty_minus: f64,
    /// Heat per unit.
    pub heat: Vec<f64>,
    /// Net power per unit: CHP and RES output positive, grid draw negative.
    pub power: Vec<f64>,
    /// Grid power per unit (electric heat only, else 0).
    pub grid: Vec<f64>,
    /// RES power fed to electric heat, one entry per tariff pairing in
    /// portfolio order.
    pub fed: Vec<f64>,
    pub unmet: f64,
    pub surplus: f64,
    pub heat_cost: f64,
    pub tariff_cost: f64,
    pub dayahead_revenue: f64,
    pub up_revenue: f64,
    pub down_payment: f64,
    pub imbalance_cost: f64,
    pub slack_cost: f64,
    pub total_cost: f64,
    /// Storage levels at the end of the hour.
    pub storage: Vec<f64>,
}

impl LedgerEntry {
    /// Total cost from the component fields.
    pub fn components_total(&self) -> f64 {
        self.heat_cost + self.tariff_cost - self.dayahead_revenue - self.up_revenue
            + self.down_payment
            + self.imbalance_cost
            + self.slack_cost
    }
}

/// Everything known when settling one hour. Slices cover the remaining
/// planning window; index 0 is the hour being settled.
#[derive(Debug, Clone, Copy)]
pub struct ActualsInput<'a> {
    pub portfolio: &'a Portfolio,
    pub outcome: &'a MarketOutcome,
    pub committed: &'a [f64],
    pub dayahead: &'a [f64],
    /// Cleared (up, down) regulation.
    pub activated: (f64, f64),
    /// Per RES unit: realized value first, expected values after.
    pub res: &'a [Vec<f64>],
    pub res_units: &'a [String],
    pub demand: &'a [f64],
    pub storage_state: &'a [f64],
    pub terminal_floor: Option<&'a [f64]>,
}

/// Re-solves the hour with the cleared commitments fixed. Later hours of the
/// window are deterministic at their expected values and only keep the
/// storage decision forward-looking.
pub fn resolve_actuals(input: &ActualsInput, options: &SolveOptions) -> Result<LedgerEntry, ModelError> {
    let h = input.demand.len();
    let out = input.outcome;
    let mut up = input.dayahead[..h].to_vec();
    let mut down = up.clone();
    up[0] = out.up;
    down[0] = out.down;
    let up = ScenarioSet::deterministic(Quantity::UpPrice, up);
    let down = ScenarioSet::deterministic(Quantity::DownPrice, down);
    let res: Vec<ScenarioSet> = input
        .res
        .iter()
        .map(|r| ScenarioSet::deterministic(Quantity::WindPower, r[..h].to_vec()))
        .collect();
    let mut dayahead = input.dayahead[..h].to_vec();
    dayahead[0] = out.dayahead;
    let mut model = build_balancing(&BalancingInput {
        portfolio: input.portfolio,
        committed: input.committed,
        dayahead: &dayahead,
        up: &up,
        down: &down,
        res: &res,
        res_units: input.res_units,
        demand: input.demand,
        storage_state: input.storage_state,
        terminal_floor: input.terminal_floor,
    })?;
    let (a_up, a_down) = input.activated;
    let state = model.regulation[0][0];
    model.fix_regulation(if state.is_up() { a_up } else { 0.0 }, if state.is_down() { a_down } else { 0.0 })?;
    let sol = solve_model(&model.lp, &model.index, options)?;

    let pf = input.portfolio;
    let ix = &model.index;
    let v = |x| value_of(&sol, x);
    let pen = model.penalties[0][0];
    let mut heat = Vec::with_capacity(pf.units.len());
    let mut power = Vec::with_capacity(pf.units.len());
    let mut grid = Vec::with_capacity(pf.units.len());
    let mut fed = Vec::new();
    let mut heat_cost = 0.0;
    let mut tariff_cost = 0.0;
    for (u, unit) in pf.units.iter().enumerate() {
        let q = v(ix.q(u, 0, 0));
        let g = v(ix.p_grid(u, 0, 0));
        heat.push(q);
        grid.push(g);
        power.push(v(ix.p_chp(u, 0, 0)) + v(ix.p_gen(u, 0, 0)) - g);
        match unit.kind {
            UnitKind::Chp | UnitKind::HeatOnly => heat_cost += unit.heat_cost * q,
            UnitKind::ElectricHeat => heat_cost += unit.heat_cost * g,
            _ => {}
        }
        for (gen, &tariff) in &unit.tariffs {
            let gi = pf.units.iter().position(|x| &x.id == gen).expect("validated pairing");
            let x = v(ix.p_heat(gi, u, 0, 0));
            fed.push(x);
            tariff_cost += tariff * x;
        }
    }
    let storage: Vec<f64> = (0..pf.storages.len()).map(|k| sol.value(ix.sigma(k, 0, 0))).collect();
    let committed = input.committed[0];
    let up_mwh = v(ix.p_up(0, 0));
    let down_mwh = v(ix.p_down(0, 0));
    let plus = v(ix.p_plus(0, 0));
    let minus = v(ix.p_minus(0, 0));
    let unmet = sol.value(ix.unmet(0, 0));
    let surplus = sol.value(ix.surplus(0, 0));
    let mut entry = LedgerEntry {
        hour: out.hour,
        committed,
        up: up_mwh,
        down: down_mwh,
        imbalance_plus: plus,
        imbalance_minus: minus,
        dayahead_price: out.dayahead,
        up_price: out.up,
        down_price: out.down,
        regulation: state,
        penalty_plus: pen.plus,
        penalty_minus: pen.minus,
        heat,
        power,
        grid,
        fed,
        unmet,
        surplus,
        heat_cost,
        tariff_cost,
        dayahead_revenue: out.dayahead * committed,
        up_revenue: out.up * up_mwh,
        down_payment: out.down * down_mwh,
        imbalance_cost: pen.plus * plus - pen.minus * minus,
        slack_cost: SLACK_COST * (unmet + surplus),
        total_cost: 0.0,
        storage,
    };
    entry.total_cost = entry.components_total();
    if unmet + surplus > 1e-6 {
        log::warn!("{}: heat balance slack {:.4} MWh", out.hour, unmet + surplus);
    }
    Ok(entry)
}
