use std::fmt;

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::random_walk::scenario_rng;
use super::{Quantity, ScenarioError, ScenarioSet};

/// Price differences at or below this are treated as no regulation.
pub const DEAD_BAND: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
        })
    }
}

/// Piecewise-linear map from regulation duration (hours) to mean price
/// deviation (%), flat beyond the observed durations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationCurve {
    pub durations: Vec<f64>,
    pub deviations: Vec<f64>,
}

impl DurationCurve {
    pub fn eval(&self, d: f64) -> f64 {
        let (xs, ys) = (&self.durations, &self.deviations);
        match xs.len() {
            0 => 0.0,
            _ if d <= xs[0] => ys[0],
            n if d >= xs[n - 1] => ys[n - 1],
            _ => {
                let i = xs.partition_point(|&x| x <= d);
                let w = (d - xs[i - 1]) / (xs[i] - xs[i - 1]);
                ys[i - 1] + w * (ys[i] - ys[i - 1])
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancingStats {
    /// Mean hours between two upward regulation periods.
    pub tau_gap_up: f64,
    pub tau_gap_down: f64,
    /// Mean duration of an upward regulation period.
    pub tau_dur_up: f64,
    pub tau_dur_down: f64,
    pub f_up: DurationCurve,
    pub f_down: DurationCurve,
    pub eps_sigma: f64,
}

impl BalancingStats {
    pub fn gap(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Up => self.tau_gap_up,
            Direction::Down => self.tau_gap_down,
        }
    }

    pub fn duration(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Up => self.tau_dur_up,
            Direction::Down => self.tau_dur_down,
        }
    }

    pub fn curve(&self, dir: Direction) -> &DurationCurve {
        match dir {
            Direction::Up => &self.f_up,
            Direction::Down => &self.f_down,
        }
    }
}

/// Run lengths of `true` stretches and of `false` stretches lying strictly
/// between two `true` stretches, with the start index of each `true` run.
fn runs(active: &[bool]) -> (Vec<(usize, usize)>, Vec<usize>) {
    let mut events = Vec::new();
    let mut gaps = Vec::new();
    let mut i = 0;
    let mut last_end = None;
    while i < active.len() {
        if active[i] {
            let start = i;
            while i < active.len() && active[i] {
                i += 1;
            }
            if let Some(end) = last_end {
                gaps.push(start - end);
            }
            events.push((start, i - start));
            last_end = Some(i);
        } else {
            i += 1;
        }
    }
    (events, gaps)
}

struct DirectionStats {
    gap: f64,
    duration: f64,
    curve: DurationCurve,
    /// (duration, deviation %) for every event hour with a usable base price.
    samples: Vec<(usize, f64)>,
}

fn direction_stats(
    dir: Direction,
    dayahead: &[f64],
    regulated: &[f64],
) -> Result<DirectionStats, ScenarioError> {
    let deviation = |t: usize| match dir {
        Direction::Up => regulated[t] - dayahead[t],
        Direction::Down => dayahead[t] - regulated[t],
    };
    let active: Vec<bool> = (0..dayahead.len()).map(|t| deviation(t) > DEAD_BAND).collect();
    let (events, gaps) = runs(&active);
    if events.is_empty() {
        return Err(ScenarioError::NoActivation(dir));
    }
    let duration = events.iter().map(|e| e.1 as f64).sum::<f64>() / events.len() as f64;
    let gap = if gaps.is_empty() {
        let idle = active.iter().filter(|a| !**a).count().max(1);
        warn!("only one {dir} regulation period in history; gap estimated from idle hours");
        idle as f64 / events.len() as f64
    } else {
        gaps.iter().sum::<usize>() as f64 / gaps.len() as f64
    };

    let mut samples = Vec::new();
    for &(start, len) in &events {
        for t in start..start + len {
            if dayahead[t].abs() > DEAD_BAND {
                samples.push((len, 100.0 * deviation(t) / dayahead[t].abs()));
            }
        }
    }
    let mut by_len: Vec<(usize, f64, usize)> = Vec::new();
    for &(len, v) in &samples {
        match by_len.iter_mut().find(|e| e.0 == len) {
            Some(e) => {
                e.1 += v;
                e.2 += 1;
            }
            None => by_len.push((len, v, 1)),
        }
    }
    by_len.sort_by_key(|e| e.0);
    let curve = DurationCurve {
        durations: by_len.iter().map(|e| e.0 as f64).collect(),
        deviations: by_len.iter().map(|e| e.1 / e.2 as f64).collect(),
    };
    Ok(DirectionStats {
        gap,
        duration,
        curve,
        samples,
    })
}

/// Regulation statistics from aligned day-ahead, up and down price histories.
pub fn estimate_balancing_stats(
    dayahead: &[f64],
    up: &[f64],
    down: &[f64],
) -> Result<BalancingStats, ScenarioError> {
    if dayahead.len() != up.len() || dayahead.len() != down.len() {
        return Err(ScenarioError::Misaligned(format!(
            "day-ahead {}, up {}, down {}",
            dayahead.len(),
            up.len(),
            down.len()
        )));
    }
    let u = direction_stats(Direction::Up, dayahead, up)?;
    let d = direction_stats(Direction::Down, dayahead, down)?;
    let resid: Vec<f64> = u
        .samples
        .iter()
        .map(|&(len, v)| v - u.curve.eval(len as f64))
        .chain(d.samples.iter().map(|&(len, v)| v - d.curve.eval(len as f64)))
        .collect();
    let eps_sigma = if resid.len() > 1 {
        let mean = resid.iter().sum::<f64>() / resid.len() as f64;
        (resid.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / resid.len() as f64).sqrt()
    } else {
        0.0
    };
    Ok(BalancingStats {
        tau_gap_up: u.gap,
        tau_gap_down: d.gap,
        tau_dur_up: u.duration,
        tau_dur_down: d.duration,
        f_up: u.curve,
        f_down: d.curve,
        eps_sigma,
    })
}

/// Inverse-transform exponential draw with mean `mean` from `u` in (0, 1].
pub fn exponential(mean: f64, u: f64) -> f64 {
    -mean * u.ln()
}

/// One row of deviations (%) over hours `1..=horizon` together with the
/// sampled event intervals `(t_start, t_end]`. `draw` yields uniforms in
/// (0, 1]; each event consumes two, then two per event hour for the
/// Box–Muller noise.
pub fn generate_row_with_events(
    stats: &BalancingStats,
    dir: Direction,
    horizon: usize,
    draw: &mut dyn FnMut() -> f64,
) -> (Vec<f64>, Vec<(usize, usize)>) {
    let mut row = vec![0.0; horizon];
    let mut events = Vec::new();
    let h = horizon as f64;
    let curve = stats.curve(dir);
    let mut t = 1.0;
    while t <= h {
        let gap = exponential(stats.gap(dir), draw());
        let dur = exponential(stats.duration(dir), draw());
        let t_start = h.min((t + gap).round());
        let t_end = h.min((t + gap + dur).round());
        let level = curve.eval(dur);
        let mut hour = t_start + 1.0;
        while hour <= t_end {
            let (a, b) = (draw(), draw());
            let z = (-2.0 * a.ln()).sqrt() * (2.0 * std::f64::consts::PI * b).cos();
            row[hour as usize - 1] = level + stats.eps_sigma * z;
            hour += 1.0;
        }
        events.push((t_start as usize, t_end as usize));
        t = t_end + 1.0;
    }
    (row, events)
}

fn generate_row(
    stats: &BalancingStats,
    dir: Direction,
    horizon: usize,
    draw: &mut dyn FnMut() -> f64,
) -> Vec<f64> {
    generate_row_with_events(stats, dir, horizon, draw).0
}

/// Deviation rows drawn sequentially from one uniform source.
pub fn generate_with_source(
    stats: &BalancingStats,
    dir: Direction,
    horizon: usize,
    count: usize,
    draw: &mut dyn FnMut() -> f64,
) -> Vec<Vec<f64>> {
    (0..count).map(|_| generate_row(stats, dir, horizon, draw)).collect()
}

/// Stream index for scenario `w` in direction `dir`.
fn stream(dir: Direction, w: usize) -> u64 {
    2 * w as u64 + matches!(dir, Direction::Down) as u64
}

/// Uniform source in (0, 1] for scenario `w`, direction `dir`.
pub fn uniform_stream(seed: u64, dir: Direction, w: usize) -> impl FnMut() -> f64 {
    let mut rng = scenario_rng(seed, stream(dir, w));
    move || 1.0 - rng.random::<f64>()
}

/// `count × horizon` deviation matrix; row ω uses its own stream.
pub fn generate_balancing_deviations(
    stats: &BalancingStats,
    dir: Direction,
    horizon: usize,
    count: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    (0..count)
        .map(|w| generate_row(stats, dir, horizon, &mut uniform_stream(seed, dir, w)))
        .collect()
}

/// Up and down price scenarios from deviation matrices around a day-ahead
/// price path. Only the net deviation's sign is active in each hour; for
/// non-positive prices the factor applies to |λ| so up ≥ λ ≥ down holds.
pub fn combine_balancing_prices(
    up_dev: &[Vec<f64>],
    down_dev: &[Vec<f64>],
    dayahead: &[f64],
) -> Result<(ScenarioSet, ScenarioSet), ScenarioError> {
    if up_dev.len() != down_dev.len() || up_dev.is_empty() {
        return Err(ScenarioError::Invalid(format!(
            "deviation matrices have {} and {} rows",
            up_dev.len(),
            down_dev.len()
        )));
    }
    let mut ups = Vec::with_capacity(up_dev.len());
    let mut downs = Vec::with_capacity(up_dev.len());
    for (ru, rd) in up_dev.iter().zip(down_dev) {
        if ru.len() != dayahead.len() || rd.len() != dayahead.len() {
            return Err(ScenarioError::Invalid("deviation row length differs from horizon".into()));
        }
        let mut up = Vec::with_capacity(dayahead.len());
        let mut down = Vec::with_capacity(dayahead.len());
        for t in 0..dayahead.len() {
            let delta = ru[t] - rd[t];
            let lam = dayahead[t];
            up.push(lam + lam.abs() * delta.max(0.0) / 100.0);
            down.push(lam - lam.abs() * (-delta).max(0.0) / 100.0);
        }
        ups.push(up);
        downs.push(down);
    }
    Ok((
        ScenarioSet::uniform(Quantity::UpPrice, ups)?,
        ScenarioSet::uniform(Quantity::DownPrice, downs)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_interpolates_and_extrapolates_flat() {
        let c = DurationCurve {
            durations: vec![1.0, 3.0],
            deviations: vec![10.0, 30.0],
        };
        assert_eq!(c.eval(0.2), 10.0);
        assert_eq!(c.eval(2.0), 20.0);
        assert_eq!(c.eval(9.0), 30.0);
    }

    #[test]
    fn run_lengths() {
        let a = [false, true, true, false, false, true, false];
        let (ev, gaps) = runs(&a);
        assert_eq!(ev, vec![(1, 2), (5, 1)]);
        assert_eq!(gaps, vec![2]);
    }

    #[test]
    fn combine_rule() {
        let (u, d) = combine_balancing_prices(&[vec![10.0, 20.0]], &[vec![30.0, 0.0]], &[100.0, 100.0]).unwrap();
        assert_eq!(u.trajectories[0], vec![100.0, 120.0]);
        assert_eq!(d.trajectories[0], vec![80.0, 100.0]);
    }

    #[test]
    fn negative_price_keeps_ordering() {
        let (u, d) = combine_balancing_prices(&[vec![50.0, 0.0]], &[vec![0.0, 50.0]], &[-100.0, -100.0]).unwrap();
        assert_eq!(u.trajectories[0], vec![-50.0, -100.0]);
        assert_eq!(d.trajectories[0], vec![-100.0, -150.0]);
    }
}
