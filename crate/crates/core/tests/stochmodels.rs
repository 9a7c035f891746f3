mod common;

use common::*;
use dhbid::lpcore::solve;
use dhbid::portfolio::{Storage, Unit, UnitKind};
use dhbid::scengen::{Quantity, ScenarioSet};
use dhbid::stochmodels::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prices(rows: Vec<Vec<f64>>) -> ScenarioSet {
    ScenarioSet::uniform(Quantity::DayAheadPrice, rows).unwrap()
}

fn solve_da(input: &DayAheadInput) -> (DayAheadModel, dhbid::lpcore::LpSolution) {
    let model = build_dayahead(input).unwrap();
    let sol = solve_model(&model.lp, &model.index, &options()).unwrap();
    (model, sol)
}

#[test]
fn demand_at_capacity_forces_dispatch() {
    let pf = portfolio(vec![boiler("gb", 401.30, 5.0)], Vec::new());
    let p = prices(vec![vec![100.0; 24], vec![200.0; 24]]);
    let demand = vec![5.0; 24];
    let (model, sol) = solve_da(&DayAheadInput {
        portfolio: &pf,
        prices: &p,
        res: &[],
        res_units: &[],
        demand: &demand,
        storage_init: &[],
        terminal_floor: None,
    });
    for t in 0..24 {
        for s in 0..2 {
            assert!((sol.value(model.index.q(0, t, s).unwrap()) - 5.0).abs() < 1e-9);
        }
    }
}

#[test]
fn chp_power_follows_heat_ratio() {
    let pf = portfolio(vec![chp("chp1", 689.01, 4.63, 1.28)], Vec::new());
    let p = prices(vec![vec![300.0; 24]]);
    let demand = vec![4.63; 24];
    let (model, sol) = solve_da(&DayAheadInput {
        portfolio: &pf,
        prices: &p,
        res: &[],
        res_units: &[],
        demand: &demand,
        storage_init: &[],
        terminal_floor: None,
    });
    let power = sol.value(model.index.p_chp(0, 3, 0).unwrap());
    assert!((power - 3.6171875).abs() < 1e-9, "{power}");
}

#[test]
fn idle_electric_boiler_leaves_wind_on_the_grid() {
    let wind = Unit {
        p_max: 9.0,
        connected_dh: false,
        ..unit("wf", UnitKind::PowerOnlyRes)
    };
    let mut eb = Unit {
        heat_cost: 359.98,
        q_max: 6.0,
        phi: Some(1.0),
        ..unit("eb", UnitKind::ElectricHeat)
    };
    eb.tariffs.insert("wf".into(), 49.52);
    let pf = portfolio(vec![wind, eb], Vec::new());
    let p = prices(vec![vec![100.0; 24]]);
    let res = [ScenarioSet::deterministic(Quantity::WindPower, vec![2.0; 24])];
    let demand = vec![0.0; 24];
    let (model, sol) = solve_da(&DayAheadInput {
        portfolio: &pf,
        prices: &p,
        res: &res,
        res_units: &["wf".to_string()],
        demand: &demand,
        storage_init: &[],
        terminal_floor: None,
    });
    assert!((sol.value(model.index.p_gen(0, 0, 0).unwrap()) - 2.0).abs() < 1e-9);
    assert!(sol.value(model.index.q(1, 0, 0).unwrap()).abs() < 1e-9);
}

#[test]
fn one_price_scenario_gives_one_step() {
    let pf = portfolio(vec![chp("chp", 400.0, 4.0, 1.3), boiler("gb", 450.0, 6.0)], Vec::new());
    let p = prices(vec![(0..24).map(|t| 200.0 + 20.0 * t as f64).collect()]);
    let demand = vec![3.0; 24];
    let input = DayAheadInput {
        portfolio: &pf,
        prices: &p,
        res: &[],
        res_units: &[],
        demand: &demand,
        storage_init: &[],
        terminal_floor: None,
    };
    let (model, sol) = solve_da(&input);
    let curves = extract_bid_curves(&model, &sol).unwrap();
    assert_eq!(curves.len(), 24);
    assert!(curves.iter().all(|c| c.steps.len() == 1));
}

#[test]
fn equal_prices_force_equal_bids() {
    let pf = portfolio(vec![chp("chp", 400.0, 4.0, 1.3), boiler("gb", 450.0, 6.0)], Vec::new());
    let mut a = vec![300.0; 24];
    let mut b = vec![100.0; 24];
    a[5] = 250.0;
    b[5] = 250.0;
    let p = prices(vec![a, b]);
    let wind = Unit {
        p_max: 5.0,
        connected_dh: false,
        ..unit("wf", UnitKind::PowerOnlyRes)
    };
    let mut pf2 = pf.clone();
    pf2.units.push(wind);
    let res = [ScenarioSet::uniform(Quantity::WindPower, vec![vec![0.5; 24], vec![4.5; 24]]).unwrap()];
    let demand = vec![3.0; 24];
    let (model, sol) = solve_da(&DayAheadInput {
        portfolio: &pf2,
        prices: &p,
        res: &res,
        res_units: &["wf".to_string()],
        demand: &demand,
        storage_init: &[],
        terminal_floor: None,
    });
    let bid = |s| sol.value(model.index.p_bid(5, s).unwrap());
    for s in 1..4 {
        assert!((bid(s) - bid(0)).abs() < 1e-9);
    }
    let curves = extract_bid_curves(&model, &sol).unwrap();
    assert_eq!(curves[5].steps.len(), 1);
    assert_eq!(curves[0].steps.len(), 2);
}

#[test]
fn short_horizon_is_rejected() {
    let pf = portfolio(vec![boiler("gb", 400.0, 5.0)], Vec::new());
    let p = prices(vec![vec![100.0; 12]]);
    let err = build_dayahead(&DayAheadInput {
        portfolio: &pf,
        prices: &p,
        res: &[],
        res_units: &[],
        demand: &[1.0; 12],
        storage_init: &[],
        terminal_floor: None,
    })
    .unwrap_err();
    assert_eq!(err, ModelError::HorizonTooShort { need: 24, got: 12 });
}

#[test]
fn toy_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let toy = random_toy(&mut rng);
        let (pf, p, demand) = toy_instance(&toy);
        let (_, sol) = solve_da(&DayAheadInput {
            portfolio: &pf,
            prices: &p,
            res: &[],
            res_units: &[],
            demand: &demand,
            storage_init: &[],
            terminal_floor: None,
        });
        let oracle = toy.brute_force();
        assert!(sol.objective <= oracle + 1e-6, "{} > {oracle}", sol.objective);
        assert!(oracle - sol.objective <= toy.discretization_bound(), "{} vs {oracle}", sol.objective);
    }
}

#[test]
fn random_instances_satisfy_constraints() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let inst = random_instance(&mut rng);
        let (model, sol) = solve_da(&DayAheadInput {
            portfolio: &inst.portfolio,
            prices: &inst.prices,
            res: &inst.res,
            res_units: &inst.res_units,
            demand: &inst.demand,
            storage_init: &inst.storage_init,
            terminal_floor: None,
        });
        let r = max_residual(
            &inst.portfolio,
            &model.index,
            &sol,
            &joint_res(&inst),
            &inst.demand,
            &inst.storage_init,
            true,
        );
        assert!(r < 1e-6, "residual {r}");
        for c in extract_bid_curves(&model, &sol).unwrap() {
            assert!(c.is_monotone());
        }
        let handles = model.index.all_handles();
        assert!(handles.iter().all(|v| v.index() < model.lp.num_variables()));
    }
}

fn wind_portfolio() -> dhbid::portfolio::Portfolio {
    let wind = Unit {
        p_max: 9.0,
        connected_dh: false,
        ..unit("wf", UnitKind::PowerOnlyRes)
    };
    portfolio(vec![boiler("gb", 400.0, 10.0), wind], Vec::new())
}

fn reg(label: Quantity, rows: Vec<Vec<f64>>) -> ScenarioSet {
    ScenarioSet::uniform(label, rows).unwrap()
}

#[test]
fn inactive_market_means_no_regulation() {
    let pf = portfolio(vec![chp("chp", 400.0, 4.0, 1.3), boiler("gb", 450.0, 6.0)], Vec::new());
    let lam = vec![300.0; 12];
    let up = reg(Quantity::UpPrice, vec![lam.clone(); 2]);
    let down = reg(Quantity::DownPrice, vec![lam.clone(); 2]);
    let model = build_balancing(&BalancingInput {
        portfolio: &pf,
        committed: &[0.0; 12],
        dayahead: &lam,
        up: &up,
        down: &down,
        res: &[],
        res_units: &[],
        demand: &[3.0; 12],
        storage_state: &[],
        terminal_floor: None,
    })
    .unwrap();
    let sol = solve_model(&model.lp, &model.index, &options()).unwrap();
    for t in 0..12 {
        for s in 0..2 {
            assert_eq!(value_of(&sol, model.index.p_up(t, s)), 0.0);
            assert_eq!(value_of(&sol, model.index.p_down(t, s)), 0.0);
        }
    }
    let (u, d) = extract_regulation_curves(&model, &sol).unwrap();
    assert!(u.steps.is_empty() && d.steps.is_empty());
}

#[test]
fn perfect_delivery_has_no_imbalance() {
    let pf = wind_portfolio();
    let lam = vec![100.0; 4];
    let up = reg(Quantity::UpPrice, vec![lam.clone()]);
    let down = reg(Quantity::DownPrice, vec![lam.clone()]);
    let res = [ScenarioSet::deterministic(Quantity::WindPower, vec![2.0; 4])];
    let model = build_balancing(&BalancingInput {
        portfolio: &pf,
        committed: &[2.0; 4],
        dayahead: &lam,
        up: &up,
        down: &down,
        res: &res,
        res_units: &["wf".to_string()],
        demand: &[1.0; 4],
        storage_state: &[],
        terminal_floor: None,
    })
    .unwrap();
    let sol = solve_model(&model.lp, &model.index, &options()).unwrap();
    for t in 0..4 {
        for v in [model.index.p_plus(t, 0), model.index.p_minus(t, 0), model.index.p_up(t, 0), model.index.p_down(t, 0)] {
            assert!(value_of(&sol, v).abs() < 1e-9);
        }
    }
}

#[test]
fn surplus_wind_is_offered_upward_where_attractive() {
    // Hand solution: the spare MWh earns 2λ as up regulation in scenario 0
    // and 0.9λ as a negative imbalance in scenario 1; offering more than 1
    // would cost λ⁺ = 2.2λ per extra MWh.
    let pf = wind_portfolio();
    let lam = vec![100.0; 3];
    let up = reg(Quantity::UpPrice, vec![vec![200.0, 100.0, 100.0], lam.clone()]);
    let down = reg(Quantity::DownPrice, vec![lam.clone(), lam.clone()]);
    let res = [ScenarioSet::deterministic(Quantity::WindPower, vec![3.0; 3])];
    let model = build_balancing(&BalancingInput {
        portfolio: &pf,
        committed: &[2.0; 3],
        dayahead: &lam,
        up: &up,
        down: &down,
        res: &res,
        res_units: &["wf".to_string()],
        demand: &[1.0; 3],
        storage_state: &[],
        terminal_floor: None,
    })
    .unwrap();
    let sol = solve_model(&model.lp, &model.index, &options()).unwrap();
    assert!((value_of(&sol, model.index.p_up(0, 0)) - 1.0).abs() < 1e-9);
    assert!(value_of(&sol, model.index.p_up(0, 1)).abs() < 1e-9);
    assert!((value_of(&sol, model.index.p_minus(0, 1)) - 1.0).abs() < 1e-9);
    // heat 1 MWh at 400 each hour, hour 0: −0.5·200 − 0.5·90, hours 1–2: −90
    let want = 3.0 * 400.0 - 0.5 * 200.0 - 0.5 * 90.0 - 2.0 * 90.0;
    assert!((sol.objective - want).abs() < 1e-6, "{}", sol.objective);
    let (u, _) = extract_regulation_curves(&model, &sol).unwrap();
    assert_eq!(u.steps, vec![(200.0, 1.0)]);
}

#[test]
fn corrupted_storage_state_is_rejected() {
    let mut pf = portfolio(vec![boiler("gb", 400.0, 5.0)], Vec::new());
    pf.storages.push(Storage {
        id: "st".into(),
        s_min: 0.0,
        s_max: 10.0,
        s_initial: 5.0,
    });
    pf.units[0].storages.push("st".into());
    let lam = vec![100.0; 2];
    let up = reg(Quantity::UpPrice, vec![lam.clone()]);
    let down = reg(Quantity::DownPrice, vec![lam.clone()]);
    let err = build_balancing(&BalancingInput {
        portfolio: &pf,
        committed: &[0.0; 2],
        dayahead: &lam,
        up: &up,
        down: &down,
        res: &[],
        res_units: &[],
        demand: &[1.0; 2],
        storage_state: &[12.0],
        terminal_floor: None,
    })
    .unwrap_err();
    assert!(matches!(err, ModelError::StorageOutOfBounds { .. }));
}

#[test]
fn regulation_curves_are_ordered() {
    let pf = portfolio(
        vec![
            chp("chp", 300.0, 4.0, 1.3),
            boiler("gb", 450.0, 8.0),
            Unit {
                heat_cost: 100.0,
                q_max: 4.0,
                phi: Some(1.0),
                ..unit("eb", UnitKind::ElectricHeat)
            },
        ],
        Vec::new(),
    );
    let lam = vec![250.0; 6];
    let up_rows: Vec<Vec<f64>> = [250.0, 300.0, 400.0, 600.0, 250.0, 250.0]
        .iter()
        .map(|&p| {
            let mut r = lam.clone();
            r[0] = p;
            r
        })
        .collect();
    let down_rows: Vec<Vec<f64>> = [200.0, 250.0, 250.0, 250.0, 50.0, 120.0]
        .iter()
        .map(|&p| {
            let mut r = lam.clone();
            r[0] = p;
            r
        })
        .collect();
    let up = reg(Quantity::UpPrice, up_rows);
    let down = reg(Quantity::DownPrice, down_rows);
    let model = build_balancing(&BalancingInput {
        portfolio: &pf,
        committed: &[1.0; 6],
        dayahead: &lam,
        up: &up,
        down: &down,
        res: &[],
        res_units: &[],
        demand: &[4.0; 6],
        storage_state: &[],
        terminal_floor: None,
    })
    .unwrap();
    let sol = solve_model(&model.lp, &model.index, &options()).unwrap();
    let (u, d) = extract_regulation_curves(&model, &sol).unwrap();
    assert!(u.is_monotone() && d.is_monotone());
    assert_eq!(u.steps.len(), 3);
    assert_eq!(d.steps.len(), 3);
    assert!(u.steps.last().unwrap().1 > 0.0);
    assert!(d.steps.first().unwrap().1 > 0.0);
}

#[test]
fn reference_and_default_backends_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let inst = random_instance(&mut rng);
    let model = build_dayahead(&DayAheadInput {
        portfolio: &inst.portfolio,
        prices: &inst.prices,
        res: &inst.res,
        res_units: &inst.res_units,
        demand: &inst.demand,
        storage_init: &inst.storage_init,
        terminal_floor: None,
    })
    .unwrap();
    let a = solve(&model.lp, &options()).unwrap();
    let b = solve(&model.lp, &dhbid::lpcore::SolveOptions::with_backend(dhbid::lpcore::Backend::Reference)).unwrap();
    assert!((a.objective - b.objective).abs() <= 1e-6 * a.objective.abs().max(1.0));
}

proptest! {
    #[test]
    fn penalties_bracket_the_price(lambda in -1e4..1e4_f64, beta in 1e-3..1.0_f64) {
        let p = penalty_prices(lambda, beta, Regulation::None);
        prop_assert!(p.minus <= lambda && lambda <= p.plus);
    }

    #[test]
    fn regulation_penalties_bracket_the_price(lambda in -1e3..1e3_f64, dev in 0.02..500.0_f64, beta in 1e-3..1.0_f64) {
        let up = penalty_prices(lambda, beta, Regulation::Up(lambda + dev));
        prop_assert!(up.plus >= lambda + dev && up.minus <= lambda);
        let down = penalty_prices(lambda, beta, Regulation::Down(lambda - dev));
        prop_assert!(down.minus <= lambda - dev && down.plus >= lambda);
    }
}
