use crate::VarId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The time limit ran out. `LpSolution::objective` holds the objective of
    /// the best iterate known at that point (may be infeasible in phase one).
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: SolveStatus,
    pub objective: f64,
    pub values: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.index()]
    }

    pub(crate) fn without_values(status: SolveStatus, n: usize) -> Self {
        LpSolution {
            status,
            objective: f64::NAN,
            values: vec![0.0; n],
        }
    }
}
