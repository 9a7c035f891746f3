use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Quantity, ScenarioSet};

/// Bounds that leave a trajectory unclamped.
pub const UNBOUNDED: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

/// Counter-based generator for one scenario: the master seed picks the key,
/// `stream` the independent sequence.
pub fn scenario_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random walks around a point forecast. Scenario ω adds the running sum of
/// N(0, σ²) steps drawn from stream ω; each hour is then clamped to `bounds`.
pub fn simulate_random_walk_scenarios(
    label: Quantity,
    point_forecast: &[f64],
    sigma: f64,
    count: usize,
    seed: u64,
    bounds: (f64, f64),
) -> ScenarioSet {
    assert!(sigma >= 0.0 && count >= 1, "sigma >= 0 and count >= 1");
    let trajectories = (0..count)
        .map(|w| {
            let mut rng = scenario_rng(seed, w as u64);
            let mut walk = 0.0;
            point_forecast
                .iter()
                .map(|f| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    walk += sigma * z;
                    (f + walk).clamp(bounds.0, bounds.1)
                })
                .collect()
        })
        .collect();
    ScenarioSet {
        label,
        trajectories,
        probabilities: vec![1.0 / count as f64; count],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_reproduces_forecast() {
        let f = [1.0, 2.0, 3.0];
        let s = simulate_random_walk_scenarios(Quantity::WindPower, &f, 0.0, 4, 1, UNBOUNDED);
        assert!(s.trajectories.iter().all(|r| r == &f));
    }

    #[test]
    fn clamped_to_bounds() {
        let s = simulate_random_walk_scenarios(Quantity::WindPower, &[0.0; 48], 5.0, 20, 3, (0.0, 9.0));
        assert!(s.trajectories.iter().flatten().all(|v| (0.0..=9.0).contains(v)));
    }

    #[test]
    fn streams_are_order_independent() {
        let a = simulate_random_walk_scenarios(Quantity::DayAheadPrice, &[0.0; 5], 1.0, 3, 7, UNBOUNDED);
        let b = simulate_random_walk_scenarios(Quantity::DayAheadPrice, &[0.0; 5], 1.0, 5, 7, UNBOUNDED);
        assert_eq!(a.trajectories[..], b.trajectories[..3]);
    }
}
