//! Random dense LPs that are feasible by construction and bounded.

use lpcore::{LpProblem, Relation, INF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn dense_feasible(rows: usize, cols: usize, seed: u64) -> LpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = LpProblem::new();
    let mut x0 = Vec::with_capacity(cols);
    let mut vars = Vec::with_capacity(cols);
    for j in 0..cols {
        let obj: f64 = rng.random_range(-1.0..1.0);
        let kind = rng.random_range(0..10);
        let (lb, ub, obj) = match kind {
            0..=5 => (0.0, rng.random_range(1.0..10.0), obj),
            6 | 7 => {
                let lb = rng.random_range(-5.0..0.0);
                (lb, lb + rng.random_range(1.0..10.0), obj)
            }
            // lower bound only: keep the objective pulling down onto it
            _ => (rng.random_range(-2.0..2.0), INF, obj.abs() + 0.1),
        };
        let v = p.add_variable(format!("x{j}"), lb, ub, obj).unwrap();
        let hi = if ub < INF { ub } else { lb + 5.0 };
        x0.push(rng.random_range(lb..hi));
        vars.push(v);
    }
    for _ in 0..rows {
        let coeffs: Vec<f64> = (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        let act: f64 = coeffs.iter().zip(&x0).map(|(a, x)| a * x).sum();
        let (rel, rhs) = match rng.random_range(0..5) {
            0 => (Relation::Eq, act),
            1 | 2 => (Relation::Le, act + rng.random_range(0.0..2.0)),
            _ => (Relation::Ge, act - rng.random_range(0.0..2.0)),
        };
        p.add_constraint(vars.iter().copied().zip(coeffs), rel, rhs)
            .unwrap();
    }
    p
}
