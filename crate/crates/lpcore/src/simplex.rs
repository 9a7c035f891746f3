//! Bounded-variable revised primal simplex.
//!
//! Two phases with artificial variables on rows whose slack cannot absorb
//! the initial residual. The basis inverse is kept dense and updated with
//! product-form pivots, refactorized every [`REFACTOR_EVERY`] pivots.
//! Pricing is Dantzig's rule until [`DEGENERATE_LIMIT`] consecutive
//! degenerate pivots have been made, after which Bland's rule takes over.

use std::time::Instant;

use crate::{LpBackend, LpError, LpProblem, LpSolution, Relation, SolveOptions, SolveStatus, INF};

const REFACTOR_EVERY: usize = 100;
const DEGENERATE_LIMIT: usize = 1000;
const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default)]
pub struct ReferenceSimplex {
    /// Overrides the default iteration cap (`50·(rows+cols) + 10_000`).
    pub max_iterations: Option<usize>,
}

impl LpBackend for ReferenceSimplex {
    fn solve(&self, problem: &LpProblem, options: &SolveOptions) -> Result<LpSolution, LpError> {
        let n = problem.num_variables();
        let reduced = match Presolved::new(problem, options.tolerance.max(1e-9)) {
            Some(r) => r,
            None => return Ok(LpSolution::without_values(SolveStatus::Infeasible, n)),
        };
        let mut tableau = Revised::new(&reduced);
        let deadline = options.time_limit.map(|d| Instant::now() + d);
        let cap = self
            .max_iterations
            .unwrap_or(50 * (tableau.m + tableau.ncols) + 10_000);
        let status = tableau.run(deadline, cap, options.tolerance.max(1e-12))?;
        let mut values = problem
            .variables()
            .iter()
            .map(|v| if v.lb > -INF { v.lb } else { 0.0 })
            .collect::<Vec<_>>();
        for (&orig, &x) in reduced.kept.iter().zip(&tableau.x) {
            values[orig] = x;
        }
        for &(orig, val) in &reduced.fixed {
            values[orig] = val;
        }
        match status {
            SolveStatus::Optimal => {
                let viol = problem.max_violation(&values);
                if viol > 1e-6 {
                    return Err(LpError::Numerical {
                        backend: "reference",
                        detail: format!("final primal violation {viol:.3e}"),
                    });
                }
                Ok(LpSolution {
                    status,
                    objective: problem.objective_value(&values),
                    values,
                })
            }
            SolveStatus::TimeLimit => Ok(LpSolution {
                status,
                objective: problem.objective_value(&values),
                values,
            }),
            other => Ok(LpSolution::without_values(other, n)),
        }
    }
}

/// Problem after dropping fixed variables and empty rows, with rows scaled
/// to unit max coefficient. Columns are stored sparse.
struct Presolved {
    kept: Vec<usize>,
    fixed: Vec<(usize, f64)>,
    cost: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    /// (row, coeff) per kept column.
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    relation: Vec<Relation>,
}

impl Presolved {
    fn new(p: &LpProblem, tol: f64) -> Option<Self> {
        let vars = p.variables();
        let mut new_index = vec![usize::MAX; vars.len()];
        let mut kept = Vec::new();
        let mut fixed = Vec::new();
        for (j, v) in vars.iter().enumerate() {
            if v.lb == v.ub {
                fixed.push((j, v.lb));
            } else {
                new_index[j] = kept.len();
                kept.push(j);
            }
        }
        let mut cols = vec![Vec::new(); kept.len()];
        let mut rhs = Vec::new();
        let mut relation = Vec::new();
        for row in p.constraints() {
            let mut b = row.rhs;
            let mut live = Vec::new();
            for &(v, a) in &row.terms {
                let j = v.index();
                if new_index[j] == usize::MAX {
                    b -= a * vars[j].lb;
                } else {
                    live.push((new_index[j], a));
                }
            }
            if live.is_empty() {
                let ok = match row.relation {
                    Relation::Le => b >= -tol,
                    Relation::Ge => b <= tol,
                    Relation::Eq => b.abs() <= tol,
                };
                if !ok {
                    return None;
                }
                continue;
            }
            let scale = live.iter().map(|&(_, a)| a.abs()).fold(0.0, f64::max);
            let i = rhs.len();
            for (j, a) in live {
                cols[j].push((i, a / scale));
            }
            rhs.push(b / scale);
            relation.push(row.relation);
        }
        Some(Presolved {
            cost: kept.iter().map(|&j| vars[j].obj).collect(),
            lb: kept.iter().map(|&j| vars[j].lb).collect(),
            ub: kept.iter().map(|&j| vars[j].ub).collect(),
            kept,
            fixed,
            cols,
            rhs,
            relation,
        })
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Structural,
    Slack(usize),
    Artificial(usize, f64),
}

struct Revised {
    m: usize,
    ncols: usize,
    kinds: Vec<Kind>,
    cols: Vec<Vec<(usize, f64)>>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost2: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    /// Current value of every column (basic and nonbasic).
    xall: Vec<f64>,
    basic: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<f64>,
    /// Values of the structural columns after `run`.
    x: Vec<f64>,
    nstruct: usize,
}

impl Revised {
    fn new(p: &Presolved) -> Self {
        let m = p.rhs.len();
        let nstruct = p.cost.len();
        let mut kinds = vec![Kind::Structural; nstruct];
        let mut cols = p.cols.clone();
        let mut lb = p.lb.clone();
        let mut ub = p.ub.clone();
        let mut cost2 = p.cost.clone();
        let mut xall: Vec<f64> = (0..nstruct)
            .map(|j| {
                if lb[j] > -INF {
                    lb[j]
                } else if ub[j] < INF {
                    ub[j]
                } else {
                    0.0
                }
            })
            .collect();
        let mut residual = p.rhs.clone();
        for (j, col) in p.cols.iter().enumerate() {
            for &(i, a) in col {
                residual[i] -= a * xall[j];
            }
        }
        let mut basic = vec![0; m];
        let mut artificials = Vec::new();
        for i in 0..m {
            let (slb, sub) = match p.relation[i] {
                Relation::Le => (0.0, INF),
                Relation::Ge => (-INF, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            let s = kinds.len();
            kinds.push(Kind::Slack(i));
            cols.push(vec![(i, 1.0)]);
            lb.push(slb);
            ub.push(sub);
            cost2.push(0.0);
            let r = residual[i];
            if r >= slb && r <= sub {
                xall.push(r);
                basic[i] = s;
            } else {
                let at = if r < slb { slb } else { sub };
                xall.push(at);
                artificials.push((i, r - at));
            }
        }
        for (i, gap) in artificials {
            let sign = gap.signum();
            let a = kinds.len();
            kinds.push(Kind::Artificial(i, sign));
            cols.push(vec![(i, sign)]);
            lb.push(0.0);
            ub.push(INF);
            cost2.push(0.0);
            xall.push(gap.abs());
            basic[i] = a;
        }
        let ncols = kinds.len();
        let mut is_basic = vec![false; ncols];
        for &b in &basic {
            is_basic[b] = true;
        }
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = match kinds[basic[i]] {
                Kind::Artificial(_, s) => s,
                _ => 1.0,
            };
        }
        Revised {
            m,
            ncols,
            kinds,
            cols,
            lb,
            ub,
            cost: cost2.clone(),
            cost2,
            rhs: p.rhs.clone(),
            xall,
            basic,
            is_basic,
            binv,
            x: Vec::new(),
            nstruct,
        }
    }

    fn run(
        &mut self,
        deadline: Option<Instant>,
        cap: usize,
        tol: f64,
    ) -> Result<SolveStatus, LpError> {
        let has_art = self.kinds.iter().any(|k| matches!(k, Kind::Artificial(..)));
        if has_art {
            self.cost = self
                .kinds
                .iter()
                .map(|k| if matches!(k, Kind::Artificial(..)) { 1.0 } else { 0.0 })
                .collect();
            match self.iterate(deadline, cap, tol)? {
                SolveStatus::Optimal => {}
                SolveStatus::TimeLimit => return Ok(self.finish(SolveStatus::TimeLimit)),
                // Phase one is bounded below by zero.
                _ => unreachable!("phase one cannot be unbounded"),
            }
            let infeas: f64 = self
                .kinds
                .iter()
                .zip(&self.xall)
                .filter(|(k, _)| matches!(k, Kind::Artificial(..)))
                .map(|(_, x)| *x)
                .sum();
            let scale = self.rhs.iter().map(|b| b.abs()).fold(1.0, f64::max);
            if infeas > 1e-7 * scale {
                return Ok(SolveStatus::Infeasible);
            }
            for j in 0..self.ncols {
                if matches!(self.kinds[j], Kind::Artificial(..)) {
                    self.ub[j] = 0.0;
                    if !self.is_basic[j] {
                        self.xall[j] = 0.0;
                    }
                }
            }
            self.refactor()?;
        }
        self.cost = self.cost2.clone();
        let status = self.iterate(deadline, cap, tol)?;
        Ok(self.finish(status))
    }

    fn finish(&mut self, status: SolveStatus) -> SolveStatus {
        self.x = self.xall[..self.nstruct].to_vec();
        status
    }

    fn iterate(
        &mut self,
        deadline: Option<Instant>,
        cap: usize,
        tol: f64,
    ) -> Result<SolveStatus, LpError> {
        let m = self.m;
        let cmax = self.cost.iter().map(|c| c.abs()).fold(1.0, f64::max);
        let dual_tol = 1e-9 * cmax;
        let mut degenerate_run = 0usize;
        let mut since_refactor = 0usize;
        let mut y = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        for _ in 0..cap {
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    return Ok(SolveStatus::TimeLimit);
                }
            }
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
            // duals
            y.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..m {
                let cb = self.cost[self.basic[k]];
                if cb != 0.0 {
                    let row = &self.binv[k * m..(k + 1) * m];
                    for (yi, b) in y.iter_mut().zip(row) {
                        *yi += cb * b;
                    }
                }
            }
            let bland = degenerate_run >= DEGENERATE_LIMIT;
            let mut entering: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..self.ncols {
                if self.is_basic[j] || self.lb[j] == self.ub[j] {
                    continue;
                }
                let d = self.cost[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>();
                let x = self.xall[j];
                let can_up = x < self.ub[j] - tol || self.ub[j] >= INF;
                let can_down = x > self.lb[j] + tol || self.lb[j] <= -INF;
                let dir = if d < -dual_tol && can_up {
                    1.0
                } else if d > dual_tol && can_down {
                    -1.0
                } else {
                    continue;
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if d.abs() > best {
                    best = d.abs();
                    entering = Some((j, dir));
                }
            }
            let Some((q, dir)) = entering else {
                return Ok(SolveStatus::Optimal);
            };
            // alpha = B^-1 a_q
            alpha.iter_mut().for_each(|v| *v = 0.0);
            for &(i, a) in &self.cols[q] {
                for (k, al) in alpha.iter_mut().enumerate() {
                    *al += self.binv[k * m + i] * a;
                }
            }
            // Harris ratio test: first pass with relaxed bounds.
            let mut theta_relaxed = if self.ub[q] < INF && self.lb[q] > -INF {
                self.ub[q] - self.lb[q]
            } else {
                f64::INFINITY
            };
            for k in 0..m {
                let rate = dir * alpha[k];
                if rate.abs() <= PIVOT_TOL {
                    continue;
                }
                let b = self.basic[k];
                let xb = self.xall[b];
                let lim = if rate > 0.0 {
                    if self.lb[b] <= -INF {
                        continue;
                    }
                    (xb - self.lb[b] + tol) / rate
                } else {
                    if self.ub[b] >= INF {
                        continue;
                    }
                    (self.ub[b] - xb + tol) / -rate
                };
                theta_relaxed = theta_relaxed.min(lim);
            }
            if theta_relaxed.is_infinite() {
                return Ok(SolveStatus::Unbounded);
            }
            let mut leave: Option<usize> = None;
            let mut best_pivot = 0.0;
            let mut theta = 0.0;
            for k in 0..m {
                let rate = dir * alpha[k];
                if rate.abs() <= PIVOT_TOL {
                    continue;
                }
                let b = self.basic[k];
                let xb = self.xall[b];
                let lim = if rate > 0.0 {
                    if self.lb[b] <= -INF {
                        continue;
                    }
                    (xb - self.lb[b]) / rate
                } else {
                    if self.ub[b] >= INF {
                        continue;
                    }
                    (self.ub[b] - xb) / -rate
                };
                if lim <= theta_relaxed {
                    let better = if bland {
                        leave.is_none_or(|l| b < self.basic[l])
                    } else {
                        rate.abs() > best_pivot
                    };
                    if better {
                        best_pivot = rate.abs();
                        leave = Some(k);
                        theta = lim.max(0.0);
                    }
                }
            }
            let flip = self.ub[q] - self.lb[q];
            let bound_flip = self.ub[q] < INF && self.lb[q] > -INF && flip <= theta_relaxed && {
                // prefer the flip when it is no longer than the basis step
                leave.is_none() || flip <= theta
            };
            if bound_flip {
                theta = flip;
            } else if leave.is_none() {
                return Ok(SolveStatus::Unbounded);
            }
            if theta <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            // move
            self.xall[q] += dir * theta;
            for k in 0..m {
                if alpha[k] != 0.0 {
                    let b = self.basic[k];
                    self.xall[b] -= dir * theta * alpha[k];
                }
            }
            if bound_flip {
                self.xall[q] = if dir > 0.0 { self.ub[q] } else { self.lb[q] };
                continue;
            }
            let r = leave.expect("leaving row chosen");
            let out = self.basic[r];
            let rate = dir * alpha[r];
            self.xall[out] = if rate > 0.0 { self.lb[out] } else { self.ub[out] };
            self.is_basic[out] = false;
            self.is_basic[q] = true;
            self.basic[r] = q;
            let piv = alpha[r];
            {
                let (before, rest) = self.binv.split_at_mut(r * m);
                let (prow, after) = rest.split_at_mut(m);
                prow.iter_mut().for_each(|v| *v /= piv);
                for (k, chunk) in before.chunks_mut(m).enumerate() {
                    let f = alpha[k];
                    if f != 0.0 {
                        chunk.iter_mut().zip(prow.iter()).for_each(|(v, p)| *v -= f * p);
                    }
                }
                for (k, chunk) in after.chunks_mut(m).enumerate() {
                    let f = alpha[r + 1 + k];
                    if f != 0.0 {
                        chunk.iter_mut().zip(prow.iter()).for_each(|(v, p)| *v -= f * p);
                    }
                }
            }
            since_refactor += 1;
        }
        Err(LpError::Numerical {
            backend: "reference",
            detail: format!("iteration limit {cap} reached"),
        })
    }

    /// Rebuild `B^-1` from scratch and recompute basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (k, &j) in self.basic.iter().enumerate() {
            for &(i, a) in &self.cols[j] {
                b[i * m + k] = a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let (p, pv) = (c..m)
                .map(|r| (r, b[r * m + c].abs()))
                .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pv < 1e-12 {
                return Err(LpError::Numerical {
                    backend: "reference",
                    detail: "singular basis during refactorization".into(),
                });
            }
            if p != c {
                for k in 0..m {
                    b.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = b[c * m + c];
            for k in 0..m {
                b[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r != c {
                    let f = b[r * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            b[r * m + k] -= f * b[c * m + k];
                            inv[r * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        // x_B = B^-1 (b - N x_N)
        let mut r = self.rhs.clone();
        for j in 0..self.ncols {
            if !self.is_basic[j] && self.xall[j] != 0.0 {
                for &(i, a) in &self.cols[j] {
                    r[i] -= a * self.xall[j];
                }
            }
        }
        for k in 0..m {
            let v: f64 = (0..m).map(|i| self.binv[k * m + i] * r[i]).sum();
            self.xall[self.basic[k]] = v;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{solve, Backend};

    fn reference() -> SolveOptions {
        SolveOptions::with_backend(Backend::Reference)
    }

    #[test]
    fn empty_problem_is_optimal_with_zero_objective() {
        let sol = solve(&LpProblem::new(), &reference()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn fixed_variable_contributes_its_cost() {
        let mut p = LpProblem::new();
        p.add_variable("x", 3.0, 3.0, 2.0).unwrap();
        let sol = solve(&p, &reference()).unwrap();
        assert_eq!(sol.objective, 6.0);
    }

    #[test]
    fn box_optimum() {
        let mut p = LpProblem::new();
        let x = p.add_variable("x", 0.0, INF, -1.0).unwrap();
        let y = p.add_variable("y", 0.0, INF, -1.0).unwrap();
        p.add_constraint([(x, 1.0)], Relation::Le, 1.0).unwrap();
        p.add_constraint([(y, 1.0)], Relation::Le, 2.0).unwrap();
        let sol = solve(&p, &reference()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective + 3.0).abs() < 1e-12);
        assert!((sol.value(x) - 1.0).abs() < 1e-12);
        assert!((sol.value(y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_bounds_rows_are_infeasible() {
        let mut p = LpProblem::new();
        let x = p.add_variable("x", -INF, INF, 1.0).unwrap();
        p.add_constraint([(x, 1.0)], Relation::Ge, 1.0).unwrap();
        p.add_constraint([(x, 1.0)], Relation::Le, 0.0).unwrap();
        let sol = solve(&p, &reference()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut p = LpProblem::new();
        let x = p.add_variable("x", 0.0, INF, -1.0).unwrap();
        let y = p.add_variable("y", 0.0, INF, 0.0).unwrap();
        p.add_constraint([(x, 1.0), (y, -1.0)], Relation::Le, 1.0)
            .unwrap();
        let sol = solve(&p, &reference()).unwrap();
        assert_eq!(sol.status, SolveStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + 2y  s.t. x - y = -3, x + y >= 1, y <= 5, x free
        let mut p = LpProblem::new();
        let x = p.add_variable("x", -INF, INF, 1.0).unwrap();
        let y = p.add_variable("y", -INF, 5.0, 2.0).unwrap();
        p.add_constraint([(x, 1.0), (y, -1.0)], Relation::Eq, -3.0)
            .unwrap();
        p.add_constraint([(x, 1.0), (y, 1.0)], Relation::Ge, 1.0)
            .unwrap();
        let sol = solve(&p, &reference()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        // y = x + 3, 2x + 3 >= 1 -> x >= -1; cost 3x + 6 -> x = -1
        assert!((sol.value(x) + 1.0).abs() < 1e-9);
        assert!((sol.value(y) - 2.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn empty_infeasible_row_after_fixing() {
        let mut p = LpProblem::new();
        let x = p.add_variable("x", 1.0, 1.0, 0.0).unwrap();
        p.add_constraint([(x, 1.0)], Relation::Ge, 2.0).unwrap();
        let sol = solve(&p, &reference()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn zero_time_limit_reports_distinct_status() {
        let mut p = LpProblem::new();
        let x = p.add_variable("x", 0.0, 10.0, -1.0).unwrap();
        let y = p.add_variable("y", 0.0, 10.0, -1.0).unwrap();
        p.add_constraint([(x, 1.0), (y, 1.0)], Relation::Le, 5.0)
            .unwrap();
        let opts = SolveOptions {
            time_limit: Some(std::time::Duration::ZERO),
            ..reference()
        };
        let sol = solve(&p, &opts).unwrap();
        assert_eq!(sol.status, SolveStatus::TimeLimit);
        assert!(sol.objective.is_finite());
    }
}
