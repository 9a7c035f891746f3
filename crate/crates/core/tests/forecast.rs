use dhbid::forecast::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn logistic(x: f64) -> f64 {
    9.0 / (1.0 + (-(x - 0.45) * 14.0).exp())
}

fn rmse(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

#[test]
fn binned_curve_beats_a_single_line_on_logistic_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.3).unwrap();
    let speeds: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
    let powers: Vec<f64> = speeds
        .iter()
        .map(|&s| (logistic(s) + noise.sample(&mut rng)).max(0.0))
        .collect();
    let binned = fit_power_curve(&speeds, &powers, 10).unwrap();
    let single = fit_power_curve(&speeds, &powers, 1).unwrap();
    let pb = predict_wind_power(&binned, &speeds).unwrap();
    let ps = predict_wind_power(&single, &speeds).unwrap();
    let (eb, es) = (rmse(&pb, &powers), rmse(&ps, &powers));
    assert!(eb < es, "binned {eb} vs single line {es}");
}

#[test]
fn zero_speed_gives_zero_power_when_trained_so() {
    let speeds: Vec<f64> = (0..200).map(|i| i as f64 * 0.1).collect();
    let powers: Vec<f64> = speeds.iter().map(|&s| logistic(s / 20.0) - logistic(0.0)).collect();
    let m = fit_power_curve(&speeds, &powers, 10).unwrap();
    let p0 = predict_wind_power(&m, &[0.0]).unwrap()[0];
    // oracle: the first bin's line at zero, clamped
    let oracle = m.intercepts[0].clamp(0.0, m.rated_power);
    assert!((p0 - oracle).abs() < 1e-6 && p0 < 1e-2, "{p0} vs {oracle}");
}

#[test]
fn fourier_column_norms_follow_orthogonality() {
    let t = 168usize;
    let m = fourier_regressors(5, t as f64, 1..t as i64 + 1);
    for c in 0..m.ncols() {
        let norm = m.column(c).norm();
        assert!((norm - (t as f64 / 2.0).sqrt()).abs() < 1e-9, "column {c}: {norm}");
    }
}

#[test]
fn white_noise_has_small_arma_coefficients() {
    let mut passes = 0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = Normal::new(0.0, 30.0).unwrap();
        let h: Vec<f64> = (0..2000).map(|_| 250.0 + n.sample(&mut rng)).collect();
        let m = fit_price_model(&h, 0, 2).unwrap();
        if m.ar.iter().chain(&m.ma).all(|c| c.abs() < 0.1) {
            passes += 1;
        }
    }
    assert!(passes >= 19, "{passes}/20 within bounds");
}

#[test]
fn weekly_sinusoid_is_absorbed_by_fourier_terms() {
    let amp = 50.0;
    let t0 = 400_000;
    let h: Vec<f64> = (0..500)
        .map(|i| 200.0 + amp * (2.0 * std::f64::consts::PI * (t0 + i) as f64 / WEEK).sin())
        .collect();
    let m = fit_price_model(&h, t0, 3).unwrap();
    assert!(m.k >= 1);
    assert!(m.residual_sigma < 0.01 * amp, "sigma {}", m.residual_sigma);
    let x: Vec<f64> = (0..500).map(|i| m.exogenous(t0 + i)).collect();
    let var = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / v.len() as f64
    };
    assert!(var(&x) / var(&h) > 0.99, "explained {}", var(&x) / var(&h));
}

#[test]
fn ar1_coefficient_is_recovered() {
    let truth = PriceModel {
        ar: [0.9, 0.0, 0.0],
        ..PriceModel::constant(20.0)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = truth.simulate(5000, 0, 10.0, 200, &mut rng);
    let m = fit_price_model(&h, 0, 1).unwrap();
    assert!((0.85..=0.95).contains(&m.ar[0]), "phi1 = {}", m.ar[0]);
}

#[test]
fn mixed_model_parameters_are_recovered() {
    let truth = PriceModel {
        ar: [0.5, 0.0, 0.3],
        ma: [0.3, 0.0, 0.0],
        k: 1,
        alpha: vec![15.0],
        beta: vec![-10.0],
        ..PriceModel::constant(40.0)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = truth.simulate(6000, 1000, 10.0, 500, &mut rng);
    let m = fit_price_model(&h, 1000, 2).unwrap();
    for (got, want) in m.ar.iter().chain(&m.ma).zip(truth.ar.iter().chain(&truth.ma)) {
        assert!((got - want).abs() < 0.06, "{:?} {:?}", m.ar, m.ma);
    }
    assert!((m.residual_sigma - 10.0).abs() < 0.5);
}

#[test]
fn three_step_forecast_matches_hand_unrolled_recursion() {
    let m = PriceModel {
        mu: 10.0,
        ar: [0.5, 0.2, 0.1],
        ma: [0.3, -0.1, 0.05],
        ..PriceModel::constant(10.0)
    };
    let prices: Vec<f64> = (0..24).map(|i| 100.0 + i as f64).collect();
    let eps: Vec<f64> = (0..24).map(|i| (i as f64 - 12.0) * 0.5).collect();
    let lags = PriceLags {
        prices: prices.clone(),
        residuals: eps.clone(),
        t_next: 0,
    };
    let f = predict_price(&m, &lags, 3).unwrap();
    // lag 1 = index 23, lag 2 = 22, lag 24 = 0
    let l1 = 10.0 + 0.5 * 123.0 + 0.2 * 122.0 + 0.1 * 100.0 + 0.3 * 5.5 - 0.1 * 5.0 + 0.05 * -6.0;
    let l2 = 10.0 + 0.5 * l1 + 0.2 * 123.0 + 0.1 * 101.0 + 0.0 - 0.1 * 5.5 + 0.05 * -5.5;
    let l3 = 10.0 + 0.5 * l2 + 0.2 * l1 + 0.1 * 102.0 + 0.05 * -5.0;
    for (a, b) in f.iter().zip([l1, l2, l3]) {
        assert!((a - b).abs() < 1e-9, "{f:?} vs {:?}", [l1, l2, l3]);
    }
}

proptest! {
    #[test]
    fn zero_stochastic_part_reproduces_mu_plus_fourier(
        mu in -200.0..500.0f64,
        a in -50.0..50.0f64,
        b in -50.0..50.0f64,
        t in -10_000i64..10_000,
    ) {
        let m = PriceModel { k: 1, alpha: vec![a], beta: vec![b], ..PriceModel::constant(mu) };
        let lags = PriceLags { prices: vec![1.0; 24], residuals: vec![3.0; 24], t_next: t };
        let f = predict_price(&m, &lags, 4).unwrap();
        for (h, v) in f.iter().enumerate() {
            prop_assert_eq!(*v, mu + m.exogenous(t + h as i64));
        }
    }

    #[test]
    fn solar_heat_is_monotone_in_radiation(
        i1 in 0.0..1.2f64, di in 0.0..0.5f64, t_amb in -20.0..35.0f64,
        area in 0.1..20.0f64, gamma in 0.1..1.0f64, eta1 in 0.0..0.01f64, eta2 in 0.0..0.0001f64,
    ) {
        let m = SolarCollectorModel { collector_area: area, gamma, eta1, eta2, t_avg: 45.0 };
        let q = predict_solar_heat(&m, &[i1, i1 + di], &[t_amb, t_amb]).unwrap();
        prop_assert!(q[0] >= 0.0 && q[1] >= q[0]);
    }

    #[test]
    fn power_curve_is_monotone_and_bounded(
        seed in 0u64..1000, bins in 1usize..15, probe in proptest::collection::vec(0.0..40.0f64, 1..30),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let speeds: Vec<f64> = (0..300).map(|_| rng.random_range(0.0..25.0)).collect();
        let powers: Vec<f64> = speeds.iter().map(|&s| (logistic(s / 25.0) + rng.random_range(-1.0..1.0)).max(0.0)).collect();
        let m = fit_power_curve(&speeds, &powers, bins).unwrap();
        let mut sorted = probe.clone();
        sorted.sort_by(f64::total_cmp);
        let p = predict_wind_power(&m, &sorted).unwrap();
        for w in p.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        prop_assert!(p.iter().all(|&v| (0.0..=m.rated_power).contains(&v)));
    }
}
