use lpcore::{LpProblem, LpSolution, Relation, VarId, INF};

use super::curves::{BidCurve, CurveKind};
use super::dayahead::{order_by_price, res_table};
use super::penalty::{penalty_prices, PenaltyPrices, Regulation};
use super::shared::{build_shared_constraints, SharedInput};
use super::{ModelError, VariableIndex};
use crate::portfolio::Portfolio;
use crate::scengen::{cross_join, JointScenarioSet, ScenarioSet};

#[derive(Debug, Clone, Copy)]
pub struct BalancingInput<'a> {
    pub portfolio: &'a Portfolio,
    /// Day-ahead commitment per hour of the horizon.
    pub committed: &'a [f64],
    /// Cleared day-ahead price per hour of the horizon.
    pub dayahead: &'a [f64],
    /// Up and down regulation price scenarios sharing one index.
    pub up: &'a ScenarioSet,
    pub down: &'a ScenarioSet,
    /// RES scenarios, first hour already realized.
    pub res: &'a [ScenarioSet],
    pub res_units: &'a [String],
    pub demand: &'a [f64],
    pub storage_state: &'a [f64],
    /// Lowest level after the last hour; `None` leaves it free.
    pub terminal_floor: Option<&'a [f64]>,
}

#[derive(Debug, Clone)]
pub struct BalancingModel {
    pub lp: LpProblem,
    pub index: VariableIndex,
    pub joint: JointScenarioSet,
    /// `[price scenario][hour]`.
    pub up: Vec<Vec<f64>>,
    pub down: Vec<Vec<f64>>,
    pub regulation: Vec<Vec<Regulation>>,
    pub penalties: Vec<Vec<PenaltyPrices>>,
    /// Offers for the next hour per price scenario.
    pub up_bids: Vec<VarId>,
    pub down_bids: Vec<VarId>,
}

impl BalancingModel {
    /// Pins the next-hour regulation to cleared amounts in every scenario.
    pub fn fix_regulation(&mut self, up: f64, down: f64) -> Result<(), ModelError> {
        for (&u, &d) in self.up_bids.iter().zip(&self.down_bids) {
            self.lp.set_bounds(u, up, up)?;
            self.lp.set_bounds(d, down, down)?;
        }
        Ok(())
    }
}

/// Builds the hourly balancing program. Next-hour regulation offers depend on
/// the price scenario only and are ordered by their price; later hours are
/// recourse. Regulation in a scenario and hour is possible only where that
/// direction is active.
pub fn build_balancing(input: &BalancingInput) -> Result<BalancingModel, ModelError> {
    let h = input.demand.len();
    if h == 0 {
        return Err(ModelError::HorizonTooShort { need: 1, got: 0 });
    }
    for (what, len) in [
        ("committed", input.committed.len()),
        ("dayahead", input.dayahead.len()),
    ] {
        if len < h {
            return Err(ModelError::Shape(format!("{what} has {len} hours, need {h}")));
        }
    }
    if input.up.len() != input.down.len() || input.up.probabilities != input.down.probabilities {
        return Err(ModelError::Shape("up and down price scenarios do not share an index".into()));
    }
    for set in [input.up, input.down] {
        if set.horizon() < h {
            return Err(ModelError::HorizonTooShort { need: h, got: set.horizon() });
        }
    }
    let joint = cross_join(input.up, input.res).map_err(|e| ModelError::Shape(e.to_string()))?;
    let res = res_table(&joint, input.res_units, h)?;
    let pf = input.portfolio;
    let mut lp = LpProblem::new();
    let mut index = build_shared_constraints(
        &mut lp,
        &SharedInput {
            portfolio: pf,
            probabilities: &joint.probabilities,
            res: &res,
            demand: input.demand,
            storage_init: input.storage_state,
            terminal_floor: input.terminal_floor,
        },
    )?;

    let m = joint.price_count();
    let n = joint.len();
    let up = &input.up.trajectories;
    let down = &input.down.trajectories;
    let regulation: Vec<Vec<Regulation>> = (0..m)
        .map(|i| (0..h).map(|t| Regulation::from_prices(input.dayahead[t], up[i][t], down[i][t])).collect())
        .collect();
    let penalties: Vec<Vec<PenaltyPrices>> = regulation
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(t, &r)| penalty_prices(input.dayahead[t], pf.beta, r))
                .collect()
        })
        .collect();

    let cap = |active: bool| if active { INF } else { 0.0 };
    let mut up_bids = Vec::with_capacity(m);
    let mut down_bids = Vec::with_capacity(m);
    for i in 0..m {
        let pi = input.up.probabilities[i];
        let r = regulation[i][0];
        up_bids.push(lp.add_variable(format!("pup_0_{i}"), 0.0, cap(r.is_up()), -pi * up[i][0])?);
        down_bids.push(lp.add_variable(format!("pdown_0_{i}"), 0.0, cap(r.is_down()), pi * down[i][0])?);
    }
    let mut p_up = Vec::with_capacity(h * n);
    let mut p_down = Vec::with_capacity(h * n);
    let mut p_plus = Vec::with_capacity(h * n);
    let mut p_minus = Vec::with_capacity(h * n);
    for t in 0..h {
        for s in 0..n {
            let pi = joint.probabilities[s];
            let i = joint.split(s).0;
            let r = regulation[i][t];
            let pen = penalties[i][t];
            let (vu, vd) = if t == 0 {
                (up_bids[i], down_bids[i])
            } else {
                (
                    lp.add_variable(format!("pup_{t}_{s}"), 0.0, cap(r.is_up()), -pi * up[i][t])?,
                    lp.add_variable(format!("pdown_{t}_{s}"), 0.0, cap(r.is_down()), pi * down[i][t])?,
                )
            };
            let plus = lp.add_variable(format!("pplus_{t}_{s}"), 0.0, INF, pi * pen.plus)?;
            let minus = lp.add_variable(format!("pminus_{t}_{s}"), 0.0, INF, -pi * pen.minus)?;
            let mut row = index.net_power_terms(t, s);
            row.extend([(plus, 1.0), (minus, -1.0), (vu, -1.0), (vd, 1.0)]);
            lp.add_constraint(row, Relation::Eq, input.committed[t])?;
            p_up.push(vu);
            p_down.push(vd);
            p_plus.push(plus);
            p_minus.push(minus);
        }
    }
    let first = |rows: &Vec<Vec<f64>>| rows.iter().map(|r| r[0]).collect::<Vec<_>>();
    order_by_price(&mut lp, &up_bids, &first(up), true)?;
    order_by_price(&mut lp, &down_bids, &first(down), false)?;
    index.p_up = Some(p_up);
    index.p_down = Some(p_down);
    index.p_plus = Some(p_plus);
    index.p_minus = Some(p_minus);
    Ok(BalancingModel {
        lp,
        index,
        up: up.iter().map(|r| r[..h].to_vec()).collect(),
        down: down.iter().map(|r| r[..h].to_vec()).collect(),
        joint,
        regulation,
        penalties,
        up_bids,
        down_bids,
    })
}

/// Next-hour up and down curves from the scenarios where each direction is
/// active; a direction active nowhere yields an empty curve.
pub fn extract_regulation_curves(
    model: &BalancingModel,
    sol: &LpSolution,
) -> Result<(BidCurve, BidCurve), ModelError> {
    let mut up = Vec::new();
    let mut down = Vec::new();
    for (i, row) in model.regulation.iter().enumerate() {
        match row[0] {
            Regulation::Up(p) => up.push((p, sol.value(model.up_bids[i]))),
            Regulation::Down(p) => down.push((p, sol.value(model.down_bids[i]))),
            Regulation::None => {}
        }
    }
    Ok((
        BidCurve::from_points(0, CurveKind::UpRegulation, up)?,
        BidCurve::from_points(0, CurveKind::DownRegulation, down)?,
    ))
}
