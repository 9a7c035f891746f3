use indexmap::IndexMap;
use lpcore::{LpProblem, LpSolution, Relation, VarId, INF};

use super::curves::{BidCurve, CurveKind};
use super::penalty::{penalty_prices, Regulation};
use super::shared::{build_shared_constraints, SharedInput};
use super::{ModelError, VariableIndex};
use crate::portfolio::Portfolio;
use crate::scengen::{cross_join, JointScenarioSet, ScenarioSet};

/// Hours whose bids are submitted; later hours are recourse only.
pub const FIRST_STAGE_HOURS: usize = 24;

#[derive(Debug, Clone, Copy)]
pub struct DayAheadInput<'a> {
    pub portfolio: &'a Portfolio,
    /// Day-ahead price scenarios, at least `demand.len()` hours.
    pub prices: &'a ScenarioSet,
    /// One scenario set per entry of `res_units`, all sharing one index.
    pub res: &'a [ScenarioSet],
    pub res_units: &'a [String],
    pub demand: &'a [f64],
    pub storage_init: &'a [f64],
    /// Lowest level after the last hour; `None` uses `storage_init`.
    pub terminal_floor: Option<&'a [f64]>,
}

#[derive(Debug, Clone)]
pub struct DayAheadModel {
    pub lp: LpProblem,
    pub index: VariableIndex,
    pub joint: JointScenarioSet,
    /// `[price scenario][hour]`.
    pub prices: Vec<Vec<f64>>,
    pub first_stage_hours: usize,
    /// Submitted bid per `[hour][price scenario]`, shared by all RES scenarios.
    pub bids: Vec<Vec<VarId>>,
}

impl DayAheadModel {
    /// Pins every first-stage bid to `rule(hour, price)`, e.g. the cleared
    /// quantity of a fixed curve.
    pub fn fix_bids(&mut self, rule: impl Fn(usize, f64) -> f64) -> Result<(), ModelError> {
        for (t, row) in self.bids.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                let q = rule(t, self.prices[i][t]);
                self.lp.set_bounds(v, q, q)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn res_table(
    joint: &JointScenarioSet,
    res_units: &[String],
    horizon: usize,
) -> Result<IndexMap<String, Vec<Vec<f64>>>, ModelError> {
    if res_units.len() != joint.res.len() {
        return Err(ModelError::Shape(format!(
            "{} RES unit ids for {} scenario sets",
            res_units.len(),
            joint.res.len()
        )));
    }
    let mut table = IndexMap::new();
    for (id, set) in res_units.iter().zip(&joint.res) {
        if set.horizon() < horizon {
            return Err(ModelError::HorizonTooShort { need: horizon, got: set.horizon() });
        }
        let rows = (0..joint.len())
            .map(|s| set.trajectories[joint.split(s).1][..horizon].to_vec())
            .collect();
        table.insert(id.clone(), rows);
    }
    Ok(table)
}

/// Adjacent-pair ordering after sorting by price: `vars[a] ≤ vars[b]` when
/// `increasing` (≥ otherwise), with equality for equal prices.
pub(crate) fn order_by_price(
    lp: &mut LpProblem,
    vars: &[VarId],
    prices: &[f64],
    increasing: bool,
) -> Result<(), ModelError> {
    let mut order: Vec<usize> = (0..vars.len()).collect();
    order.sort_by(|&a, &b| prices[a].total_cmp(&prices[b]));
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        let rel = if prices[a] == prices[b] {
            Relation::Eq
        } else if increasing {
            Relation::Le
        } else {
            Relation::Ge
        };
        lp.add_constraint(vec![(vars[a], 1.0), (vars[b], -1.0)], rel, 0.0)?;
    }
    Ok(())
}

/// Builds the day-ahead program. Bids for the first 24 hours depend on the
/// price scenario only and are ordered by price; bids for later hours are
/// free per scenario.
pub fn build_dayahead(input: &DayAheadInput) -> Result<DayAheadModel, ModelError> {
    let h = input.demand.len();
    if h < FIRST_STAGE_HOURS {
        return Err(ModelError::HorizonTooShort { need: FIRST_STAGE_HOURS, got: h });
    }
    if input.prices.horizon() < h {
        return Err(ModelError::HorizonTooShort { need: h, got: input.prices.horizon() });
    }
    let joint = cross_join(input.prices, input.res).map_err(|e| ModelError::Shape(e.to_string()))?;
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
            storage_init: input.storage_init,
            terminal_floor: Some(input.terminal_floor.unwrap_or(input.storage_init)),
        },
    )?;

    let m = joint.price_count();
    let n = joint.len();
    let prices = &input.prices.trajectories;
    let mut bids = Vec::with_capacity(FIRST_STAGE_HOURS);
    for t in 0..FIRST_STAGE_HOURS {
        let mut row = Vec::with_capacity(m);
        for i in 0..m {
            let obj = -input.prices.probabilities[i] * prices[i][t];
            row.push(lp.add_variable(format!("pbid_{t}_{i}"), -INF, INF, obj)?);
        }
        bids.push(row);
    }
    let mut p_bid = Vec::with_capacity(h * n);
    let mut p_plus = Vec::with_capacity(h * n);
    let mut p_minus = Vec::with_capacity(h * n);
    for t in 0..h {
        for s in 0..n {
            let pi = joint.probabilities[s];
            let i = joint.split(s).0;
            let lambda = prices[i][t];
            let pen = penalty_prices(lambda, pf.beta, Regulation::None);
            let bid = if t < FIRST_STAGE_HOURS {
                bids[t][i]
            } else {
                lp.add_variable(format!("pbid_{t}_{s}"), -INF, INF, -pi * lambda)?
            };
            let plus = lp.add_variable(format!("pplus_{t}_{s}"), 0.0, INF, pi * pen.plus)?;
            let minus = lp.add_variable(format!("pminus_{t}_{s}"), 0.0, INF, -pi * pen.minus)?;
            let mut row = vec![(bid, 1.0), (plus, -1.0), (minus, 1.0)];
            row.extend(index.net_power_terms(t, s).into_iter().map(|(v, c)| (v, -c)));
            lp.add_constraint(row, Relation::Eq, 0.0)?;
            p_bid.push(bid);
            p_plus.push(plus);
            p_minus.push(minus);
        }
    }
    for (t, row) in bids.iter().enumerate() {
        let lam: Vec<f64> = prices.iter().map(|p| p[t]).collect();
        order_by_price(&mut lp, row, &lam, true)?;
    }
    index.p_bid = Some(p_bid);
    index.p_plus = Some(p_plus);
    index.p_minus = Some(p_minus);
    Ok(DayAheadModel {
        lp,
        index,
        prices: prices.iter().map(|p| p[..h].to_vec()).collect(),
        joint,
        first_stage_hours: FIRST_STAGE_HOURS,
        bids,
    })
}

/// One curve per submitted hour from the price scenarios and their bids.
pub fn extract_bid_curves(model: &DayAheadModel, sol: &LpSolution) -> Result<Vec<BidCurve>, ModelError> {
    model
        .bids
        .iter()
        .enumerate()
        .map(|(t, row)| {
            let points = row
                .iter()
                .enumerate()
                .map(|(i, &v)| (model.prices[i][t], sol.value(v)))
                .collect();
            BidCurve::from_points(t, CurveKind::DayAhead, points)
        })
        .collect()
}
