use log::warn;
use serde::{Deserialize, Serialize};

use super::ForecastError;

pub const DEFAULT_BINS: usize = 10;
const GRID_POINTS: usize = 1001;

/// Piecewise-linear wind power curve on normalized speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurveModel {
    /// Raw speed that maps to normalized speed 1 (fitting-window maximum).
    pub speed_scale: f64,
    pub rated_power: f64,
    /// Normalized bin edges, `bins + 1` values from 0 to 1.
    pub bin_edges: Vec<f64>,
    pub slopes: Vec<f64>,
    pub intercepts: Vec<f64>,
    /// Monotone knots after the isotonic pass; evaluation interpolates these.
    knots: Vec<f64>,
}

impl PowerCurveModel {
    /// Raw per-bin line at normalized speed `x`, before the isotonic pass.
    fn line(&self, x: f64) -> f64 {
        let n = self.slopes.len();
        let b = self.bin_edges[1..n]
            .iter()
            .position(|&e| x <= e)
            .unwrap_or(n - 1);
        self.intercepts[b] + self.slopes[b] * x
    }

    /// Power at a normalized speed.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.knots.len() - 1;
        let step = 1.0 / last as f64;
        let y = if x >= 1.0 {
            // extrapolate the last bin, never dropping below the curve end
            self.line(x).max(self.knots[last])
        } else {
            let pos = (x.max(0.0) / step).min(last as f64);
            let i = (pos.floor() as usize).min(last - 1);
            let w = pos - i as f64;
            self.knots[i] * (1.0 - w) + self.knots[i + 1] * w
        };
        y.clamp(0.0, self.rated_power)
    }
}

/// Ordinary least squares line through `(x, y)`; `None` if `x` has no spread.
fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 1e-14 * n {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Pool-adjacent-violators: least-squares nondecreasing fit with unit weights.
pub(crate) fn isotonic(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a <= b {
                break;
            }
            blocks.pop();
            let merged = (a * na as f64 + b * nb as f64) / (na + nb) as f64;
            *blocks.last_mut().unwrap() = (merged, na + nb);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(v, n)| std::iter::repeat_n(v, n))
        .collect()
}

/// Fits per-bin least-squares lines over equal-count speed bins.
///
/// Bins with fewer than two points or no speed spread are merged into a
/// neighbour with a warning.
pub fn fit_power_curve(
    speeds: &[f64],
    powers: &[f64],
    n_bins: usize,
) -> Result<PowerCurveModel, ForecastError> {
    if speeds.len() != powers.len() {
        return Err(ForecastError::LengthMismatch(speeds.len(), powers.len()));
    }
    if speeds.is_empty() {
        return Err(ForecastError::Empty);
    }
    if n_bins == 0 {
        return Err(ForecastError::Invalid("n_bins must be >= 1".into()));
    }
    if let Some(&s) = speeds.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(ForecastError::BadSpeed(s));
    }
    let scale = speeds.iter().cloned().fold(f64::MIN, f64::max);
    let lo = speeds.iter().cloned().fold(f64::MAX, f64::min);
    if scale - lo <= 0.0 {
        return Err(ForecastError::ConstantSpeeds);
    }
    let mut order: Vec<usize> = (0..speeds.len()).collect();
    order.sort_by(|&a, &b| speeds[a].total_cmp(&speeds[b]));
    let xs: Vec<f64> = order.iter().map(|&i| speeds[i] / scale).collect();
    let ys: Vec<f64> = order.iter().map(|&i| powers[i]).collect();

    // equal-count chunks, with boundaries moved past tied speeds
    let n = xs.len();
    let mut cuts = vec![0];
    for b in 1..n_bins {
        let mut c = b * n / n_bins;
        while c > 0 && c < n && xs[c] == xs[c - 1] {
            c += 1;
        }
        if c > *cuts.last().unwrap() && c < n {
            cuts.push(c);
        }
    }
    cuts.push(n);

    let mut ranges: Vec<(usize, usize)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let mut fits = Vec::new();
    let mut i = 0;
    while i < ranges.len() {
        let (a, b) = ranges[i];
        match (b - a >= 2).then(|| ols(&xs[a..b], &ys[a..b])).flatten() {
            Some(fit) => {
                fits.push(fit);
                i += 1;
            }
            None => {
                warn!("power curve bin {i} has too few distinct speeds; merging with a neighbour");
                if i + 1 < ranges.len() {
                    ranges[i + 1].0 = a;
                    ranges.remove(i);
                } else if i > 0 {
                    ranges[i - 1].1 = b;
                    ranges.remove(i);
                    fits.pop();
                    i -= 1;
                } else {
                    return Err(ForecastError::ConstantSpeeds);
                }
            }
        }
    }
    let mut edges = vec![0.0];
    for w in ranges.windows(2) {
        let cut = w[1].0;
        edges.push(0.5 * (xs[cut - 1] + xs[cut]));
    }
    edges.push(1.0);
    let rated = ys.iter().cloned().fold(0.0, f64::max);
    let mut model = PowerCurveModel {
        speed_scale: scale,
        rated_power: rated,
        bin_edges: edges,
        slopes: fits.iter().map(|f| f.0).collect(),
        intercepts: fits.iter().map(|f| f.1).collect(),
        knots: Vec::new(),
    };
    let raw: Vec<f64> = (0..GRID_POINTS)
        .map(|k| model.line(k as f64 / (GRID_POINTS - 1) as f64))
        .collect();
    model.knots = isotonic(&raw);
    Ok(model)
}

/// Point forecast for raw wind speeds, each clamped to `[0, rated_power]`.
pub fn predict_wind_power(
    model: &PowerCurveModel,
    speed_forecast: &[f64],
) -> Result<Vec<f64>, ForecastError> {
    speed_forecast
        .iter()
        .map(|&s| {
            if !(s.is_finite() && s >= 0.0) {
                return Err(ForecastError::BadSpeed(s));
            }
            Ok(model.eval(s / model.speed_scale))
        })
        .collect()
}
