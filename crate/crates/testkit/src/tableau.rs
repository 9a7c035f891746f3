//! Dense two-phase tableau simplex with Bland's rule, straight from the
//! textbook. Slow and simple on purpose.

use lpcore::{LpProblem, Relation, INF};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal { objective: f64, values: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// How an original variable maps onto nonnegative tableau columns.
enum Map {
    Shift { col: usize, lb: f64 },
    Mirror { col: usize, ub: f64 },
    Split { pos: usize, neg: usize },
}

struct Row {
    coeffs: Vec<(usize, f64)>,
    rel: Relation,
    rhs: f64,
}

pub fn solve(problem: &LpProblem) -> Outcome {
    let mut maps = Vec::new();
    let mut ncols = 0;
    let mut rows: Vec<Row> = Vec::new();
    let mut cost: Vec<f64> = Vec::new();
    let mut offset = 0.0;
    for v in problem.variables() {
        if v.lb > -INF {
            maps.push(Map::Shift { col: ncols, lb: v.lb });
            cost.push(v.obj);
            offset += v.obj * v.lb;
            if v.ub < INF {
                rows.push(Row {
                    coeffs: vec![(ncols, 1.0)],
                    rel: Relation::Le,
                    rhs: v.ub - v.lb,
                });
            }
            ncols += 1;
        } else if v.ub < INF {
            maps.push(Map::Mirror { col: ncols, ub: v.ub });
            cost.push(-v.obj);
            offset += v.obj * v.ub;
            ncols += 1;
        } else {
            maps.push(Map::Split {
                pos: ncols,
                neg: ncols + 1,
            });
            cost.push(v.obj);
            cost.push(-v.obj);
            ncols += 2;
        }
    }
    for c in problem.constraints() {
        let mut coeffs = Vec::new();
        let mut rhs = c.rhs;
        for &(var, a) in &c.terms {
            match maps[var.index()] {
                Map::Shift { col, lb } => {
                    coeffs.push((col, a));
                    rhs -= a * lb;
                }
                Map::Mirror { col, ub } => {
                    coeffs.push((col, -a));
                    rhs -= a * ub;
                }
                Map::Split { pos, neg } => {
                    coeffs.push((pos, a));
                    coeffs.push((neg, -a));
                }
            }
        }
        rows.push(Row {
            coeffs,
            rel: c.relation,
            rhs,
        });
    }

    // Flip rows to nonnegative rhs, then add slack/surplus/artificial columns.
    for r in rows.iter_mut() {
        if r.rhs < 0.0 {
            r.rhs = -r.rhs;
            r.coeffs.iter_mut().for_each(|c| c.1 = -c.1);
            r.rel = match r.rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let m = rows.len();
    let nslack = rows.iter().filter(|r| r.rel != Relation::Eq).count();
    let nart = rows.iter().filter(|r| r.rel != Relation::Le).count();
    let width = ncols + nslack + nart + 1;
    let rhs_col = width - 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut basis = vec![0; m];
    let mut next_slack = ncols;
    let mut next_art = ncols + nslack;
    let art_start = ncols + nslack;
    for (i, r) in rows.iter().enumerate() {
        for &(c, a) in &r.coeffs {
            t[i][c] += a;
        }
        t[i][rhs_col] = r.rhs;
        match r.rel {
            Relation::Le => {
                t[i][next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                t[i][next_slack] = -1.0;
                next_slack += 1;
                t[i][next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                t[i][next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }

    // Phase 1: minimise the sum of artificials.
    if nart > 0 {
        let phase1: Vec<f64> = (0..width - 1)
            .map(|j| if j >= art_start { 1.0 } else { 0.0 })
            .collect();
        if !run(&mut t, &mut basis, &phase1, width - 1) {
            unreachable!("phase one is bounded");
        }
        let infeas: f64 = basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art_start)
            .map(|(i, _)| t[i][rhs_col])
            .sum();
        if infeas > 1e-7 {
            return Outcome::Infeasible;
        }
        // Drive remaining artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < t.len() {
            if basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| t[i][j].abs() > 1e-9) {
                    pivot(&mut t, &mut basis, i, j);
                    i += 1;
                } else {
                    t.remove(i);
                    basis.remove(i);
                }
            } else {
                i += 1;
            }
        }
    }
    // Phase 2 over the original columns only.
    for row in t.iter_mut() {
        let b = row[rhs_col];
        row.truncate(art_start);
        row.push(b);
    }
    let mut full_cost = cost.clone();
    full_cost.resize(art_start, 0.0);
    if !run(&mut t, &mut basis, &full_cost, art_start) {
        return Outcome::Unbounded;
    }
    let rc = art_start;
    let mut y = vec![0.0; ncols];
    for (i, &b) in basis.iter().enumerate() {
        if b < ncols {
            y[b] = t[i][rc];
        }
    }
    let values: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            Map::Shift { col, lb } => lb + y[col],
            Map::Mirror { col, ub } => ub - y[col],
            Map::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective = cost.iter().zip(&y).map(|(c, x)| c * x).sum::<f64>() + offset;
    Outcome::Optimal { objective, values }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, c: usize) {
    let p = t[r][c];
    t[r].iter_mut().for_each(|v| *v /= p);
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r {
            let f = row[c];
            if f != 0.0 {
                row.iter_mut().zip(&prow).for_each(|(v, p)| *v -= f * p);
            }
        }
    }
    basis[r] = c;
}

/// Bland's-rule simplex on `t` for columns `0..ncols`; returns false if unbounded.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], ncols: usize) -> bool {
    let rc = t.first().map(|r| r.len() - 1).unwrap_or(0);
    loop {
        let entering = (0..ncols).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let z: f64 = basis
                .iter()
                .enumerate()
                .map(|(i, &b)| cost[b] * t[i][j])
                .sum();
            cost[j] - z < -1e-9
        });
        let Some(j) = entering else {
            return true;
        };
        let mut best: Option<(usize, f64)> = None;
        for i in 0..t.len() {
            if t[i][j] > 1e-9 {
                let ratio = t[i][rc] / t[i][j];
                let better = match best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < br - 1e-12 || ((ratio - br).abs() <= 1e-12 && basis[i] < basis[bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = best else {
            return false;
        };
        pivot(t, basis, r, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_max_problem() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut p = LpProblem::new();
        let x = p.add_variable("x", 0.0, INF, -3.0).unwrap();
        let y = p.add_variable("y", 0.0, INF, -5.0).unwrap();
        p.add_constraint([(x, 1.0)], Relation::Le, 4.0).unwrap();
        p.add_constraint([(y, 2.0)], Relation::Le, 12.0).unwrap();
        p.add_constraint([(x, 3.0), (y, 2.0)], Relation::Le, 18.0)
            .unwrap();
        match solve(&p) {
            Outcome::Optimal { objective, values } => {
                assert!((objective + 36.0).abs() < 1e-9);
                assert!((values[0] - 2.0).abs() < 1e-9);
                assert!((values[1] - 6.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new();
        let x = p.add_variable("x", -INF, INF, 1.0).unwrap();
        p.add_constraint([(x, 1.0)], Relation::Ge, 1.0).unwrap();
        p.add_constraint([(x, 1.0)], Relation::Le, 0.0).unwrap();
        assert_eq!(solve(&p), Outcome::Infeasible);

        let mut q = LpProblem::new();
        q.add_variable("x", -INF, 3.0, 1.0).unwrap();
        assert_eq!(solve(&q), Outcome::Unbounded);
    }
}
