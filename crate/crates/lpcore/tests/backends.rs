use lpcore::{solve, Backend, LpProblem, Relation, SolveOptions, SolveStatus, INF};
use testkit::{random_lp, tableau};

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

#[test]
fn reference_matches_textbook_oracle_on_random_dense_lps() {
    for seed in 0..100 {
        let p = random_lp::dense_feasible(20, 20, seed);
        let oracle = match tableau::solve(&p) {
            tableau::Outcome::Optimal { objective, .. } => objective,
            other => panic!("seed {seed}: oracle returned {other:?}"),
        };
        let sol = solve(&p, &SolveOptions::with_backend(Backend::Reference)).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "seed {seed}");
        assert!(
            rel_gap(sol.objective, oracle) < 1e-6,
            "seed {seed}: {} vs {oracle}",
            sol.objective
        );
        assert!(p.max_violation(&sol.values) < 1e-8, "seed {seed}");
        // objective recomputed from the returned point
        assert!(rel_gap(sol.objective, p.objective_value(&sol.values)) < 1e-9);
    }
}

#[test]
fn doubling_the_objective_keeps_the_argmin() {
    for seed in 200..220 {
        let p = random_lp::dense_feasible(12, 15, seed);
        let mut q = p.clone();
        for j in 0..q.num_variables() {
            let v = q.var(j).unwrap();
            let c = q.variable(v).obj;
            q.set_objective(v, 2.0 * c).unwrap();
        }
        let opts = SolveOptions::with_backend(Backend::Reference);
        let a = solve(&p, &opts).unwrap();
        let b = solve(&q, &opts).unwrap();
        assert!(rel_gap(2.0 * a.objective, b.objective) < 1e-9);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-7, "seed {seed}");
        }
    }
}

#[test]
fn solves_are_deterministic() {
    let p = random_lp::dense_feasible(20, 20, 7);
    let opts = SolveOptions::with_backend(Backend::Reference);
    let a = solve(&p, &opts).unwrap();
    let b = solve(&p, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn builder_handles_a_hundred_thousand_variables_quickly() {
    let start = std::time::Instant::now();
    let mut p = LpProblem::with_capacity(100_000, 50_000);
    let mut prev = None;
    for i in 0..100_000 {
        let v = p.add_variable(format!("x[{i}]"), 0.0, INF, 1.0).unwrap();
        if let Some(u) = prev {
            if i % 2 == 1 {
                p.add_constraint([(u, 1.0), (v, 1.0)], Relation::Ge, 1.0)
                    .unwrap();
            }
        }
        prev = Some(v);
    }
    let elapsed = start.elapsed();
    assert_eq!(p.num_variables(), 100_000);
    assert!(elapsed.as_secs_f64() < 1.0, "build took {elapsed:?}");
}

#[cfg(feature = "highs")]
#[test]
fn backends_agree_on_random_corpus() {
    for seed in 0..60 {
        let p = random_lp::dense_feasible(15, 25, 1000 + seed);
        let a = solve(&p, &SolveOptions::with_backend(Backend::Reference)).unwrap();
        let b = solve(&p, &SolveOptions::with_backend(Backend::Highs)).unwrap();
        assert_eq!(a.status, b.status);
        assert!(rel_gap(a.objective, b.objective) < 1e-5, "seed {seed}");
    }
}

#[cfg(feature = "highs")]
#[test]
fn highs_reports_infeasible_and_unbounded() {
    let opts = SolveOptions::with_backend(Backend::Highs);
    let mut p = LpProblem::new();
    let x = p.add_variable("x", -INF, INF, 1.0).unwrap();
    p.add_constraint([(x, 1.0)], Relation::Ge, 1.0).unwrap();
    p.add_constraint([(x, 1.0)], Relation::Le, 0.0).unwrap();
    assert_eq!(solve(&p, &opts).unwrap().status, SolveStatus::Infeasible);

    let mut q = LpProblem::new();
    let y = q.add_variable("y", 0.0, INF, -1.0).unwrap();
    q.add_constraint([(y, 1.0)], Relation::Ge, 0.0).unwrap();
    assert_eq!(solve(&q, &opts).unwrap().status, SolveStatus::Unbounded);

    assert_eq!(
        solve(&LpProblem::new(), &opts).unwrap().status,
        SolveStatus::Optimal
    );
}
