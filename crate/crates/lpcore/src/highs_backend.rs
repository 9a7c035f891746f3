use std::num::NonZeroU32;

use highs::{HighsModelStatus, RowProblem, Sense};

use crate::{LpBackend, LpError, LpProblem, LpSolution, Relation, SolveOptions, SolveStatus, INF};

pub(crate) struct HighsBackend;

fn bound(b: f64) -> f64 {
    if b >= INF {
        f64::INFINITY
    } else if b <= -INF {
        f64::NEG_INFINITY
    } else {
        b
    }
}

impl LpBackend for HighsBackend {
    fn solve(&self, problem: &LpProblem, options: &SolveOptions) -> Result<LpSolution, LpError> {
        let n = problem.num_variables();
        if n == 0 && problem.num_constraints() == 0 {
            return Ok(LpSolution {
                status: SolveStatus::Optimal,
                objective: 0.0,
                values: Vec::new(),
            });
        }
        let mut pb = RowProblem::default();
        let cols: Vec<_> = problem
            .variables()
            .iter()
            .map(|v| pb.add_column(v.obj, bound(v.lb)..=bound(v.ub)))
            .collect();
        for row in problem.constraints() {
            let factors: Vec<_> = row.terms.iter().map(|&(v, a)| (cols[v.index()], a)).collect();
            match row.relation {
                Relation::Le => pb.add_row(..=row.rhs, factors),
                Relation::Ge => pb.add_row(row.rhs.., factors),
                Relation::Eq => pb.add_row(row.rhs..=row.rhs, factors),
            }
        }
        let mut model = pb.optimise(Sense::Minimise);
        model.make_quiet();
        model.set_threads(NonZeroU32::MIN);
        model.set_option("primal_feasibility_tolerance", options.tolerance.max(1e-10));
        model.set_option("dual_feasibility_tolerance", 1e-9);
        if let Some(limit) = options.time_limit {
            model.set_option("time_limit", limit.as_secs_f64());
        }
        let solved = model.try_solve().map_err(|s| LpError::Numerical {
            backend: "highs",
            detail: format!("{s:?}"),
        })?;
        let status = match solved.status() {
            HighsModelStatus::Optimal | HighsModelStatus::ModelEmpty => SolveStatus::Optimal,
            HighsModelStatus::Infeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => {
                SolveStatus::Unbounded
            }
            HighsModelStatus::ReachedTimeLimit => SolveStatus::TimeLimit,
            other => {
                return Err(LpError::Numerical {
                    backend: "highs",
                    detail: format!("model status {other:?}"),
                })
            }
        };
        match status {
            SolveStatus::Optimal | SolveStatus::TimeLimit => {
                let values = solved.get_solution().columns().to_vec();
                let values = if values.len() == n { values } else { vec![0.0; n] };
                Ok(LpSolution {
                    status,
                    objective: problem.objective_value(&values),
                    values,
                })
            }
            other => Ok(LpSolution::without_values(other, n)),
        }
    }
}
