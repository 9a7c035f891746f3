//! SARMAX price model
//!
//! λ_t = μ + Σ_l φ_l λ_{t-l} + Σ_l θ_l ε_{t-l} + Σ_k α_k sin(2πkt/T) + β_k cos(2πkt/T)
//!
//! with lags l ∈ {1, 2, 24} and weekly period T = 168. Coefficients are
//! estimated by Hannan–Rissanen: an autoregression (order by BIC) supplies
//! residual proxies, then a least-squares regression on the lags, the lagged
//! proxies and the Fourier columns, refined by re-filtering the residuals a
//! few times. The number of harmonics K is picked by AICc over a common
//! estimation sample.

use std::ops::Range;

use chrono::NaiveDateTime;
use log::warn;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::ForecastError;

pub const LAGS: [usize; 3] = [1, 2, 24];
pub const WEEK: f64 = 168.0;
const MAX_LAG: usize = 24;
const LONG_AR: usize = 48;
/// Ridge weights per observation on standardized AR and MA coefficients.
const RIDGE_AR: f64 = 1e-6;
const RIDGE_MA: f64 = 1e-3;
/// Passes that re-filter residuals with the current estimate.
const REFINE_PASSES: usize = 3;

/// Hour index used as `t` in the Fourier terms.
pub fn hours_since_epoch(ts: NaiveDateTime) -> i64 {
    ts.and_utc().timestamp().div_euclid(3600)
}

/// `len(t) × 2K` matrix with columns `sin(2πkt/T), cos(2πkt/T)` for k = 1..=K.
pub fn fourier_regressors(k: usize, period: f64, t: Range<i64>) -> DMatrix<f64> {
    let rows = (t.end - t.start).max(0) as usize;
    DMatrix::from_fn(rows, 2 * k, |r, c| {
        let h = (c / 2 + 1) as f64;
        let arg = 2.0 * std::f64::consts::PI * h * (t.start + r as i64) as f64 / period;
        if c % 2 == 0 {
            arg.sin()
        } else {
            arg.cos()
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceModel {
    pub mu: f64,
    /// φ for lags 1, 2, 24.
    pub ar: [f64; 3],
    /// θ for lags 1, 2, 24.
    pub ma: [f64; 3],
    pub k: usize,
    pub period: f64,
    /// Sine coefficients α_1..α_K.
    pub alpha: Vec<f64>,
    /// Cosine coefficients β_1..β_K.
    pub beta: Vec<f64>,
    pub residual_sigma: f64,
}

/// Recent prices and residuals (oldest first) feeding a forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceLags {
    pub prices: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Fourier index of the first forecast hour.
    pub t_next: i64,
}

impl PriceModel {
    /// Intercept-only model.
    pub fn constant(mu: f64) -> Self {
        PriceModel {
            mu,
            ar: [0.0; 3],
            ma: [0.0; 3],
            k: 0,
            period: WEEK,
            alpha: Vec::new(),
            beta: Vec::new(),
            residual_sigma: 0.0,
        }
    }

    /// Fourier contribution X at hour index `t`.
    pub fn exogenous(&self, t: i64) -> f64 {
        (0..self.k)
            .map(|i| {
                let arg = 2.0 * std::f64::consts::PI * (i + 1) as f64 * t as f64 / self.period;
                self.alpha[i] * arg.sin() + self.beta[i] * arg.cos()
            })
            .sum()
    }

    /// Conditional mean of λ at position `i` of `prices`/`eps` (both already
    /// holding at least `i` entries).
    fn mean_at(&self, prices: &[f64], eps: &[f64], i: usize, t: i64) -> f64 {
        let mut m = self.mu + self.exogenous(t);
        for (j, &l) in LAGS.iter().enumerate() {
            m += self.ar[j] * prices[i - l] + self.ma[j] * eps[i - l];
        }
        m
    }

    /// In-sample one-step residuals; the first 24 are zero.
    pub fn residuals(&self, prices: &[f64], t0: i64) -> Vec<f64> {
        let mut eps = vec![0.0; prices.len()];
        for i in MAX_LAG..prices.len() {
            eps[i] = prices[i] - self.mean_at(prices, &eps, i, t0 + i as i64);
        }
        eps
    }

    /// Lags for forecasting right after the end of `prices`.
    pub fn lags_after(&self, prices: &[f64], t0: i64) -> PriceLags {
        let eps = self.residuals(prices, t0);
        let from = prices.len().saturating_sub(MAX_LAG);
        PriceLags {
            prices: prices[from..].to_vec(),
            residuals: eps[from..].to_vec(),
            t_next: t0 + prices.len() as i64,
        }
    }

    /// Draws a path of `n` hours after `warmup` discarded hours, with
    /// Gaussian innovations of standard deviation `sigma`.
    pub fn simulate<R: Rng>(&self, n: usize, t0: i64, sigma: f64, warmup: usize, rng: &mut R) -> Vec<f64> {
        let normal = Normal::new(0.0, sigma).expect("sigma is finite and >= 0");
        let total = n + warmup + MAX_LAG;
        let base = t0 - (warmup + MAX_LAG) as i64;
        let mut prices = vec![self.mu; total];
        let mut eps = vec![0.0; total];
        for i in MAX_LAG..total {
            let e = normal.sample(rng);
            prices[i] = self.mean_at(&prices, &eps, i, base + i as i64) + e;
            eps[i] = e;
        }
        prices.split_off(total - n)
    }
}

/// Recursive point forecast; future innovations are set to zero.
pub fn predict_price(
    model: &PriceModel,
    lags: &PriceLags,
    horizon_hours: usize,
) -> Result<Vec<f64>, ForecastError> {
    let have = lags.prices.len().min(lags.residuals.len());
    if have < MAX_LAG {
        return Err(ForecastError::InsufficientLags {
            need: MAX_LAG,
            got: have,
        });
    }
    let mut prices = lags.prices[lags.prices.len() - MAX_LAG..].to_vec();
    let mut eps = lags.residuals[lags.residuals.len() - MAX_LAG..].to_vec();
    for h in 0..horizon_hours {
        let i = prices.len();
        let m = model.mean_at(&prices, &eps, i, lags.t_next + h as i64);
        prices.push(m);
        eps.push(0.0);
    }
    Ok(prices.split_off(MAX_LAG))
}

/// Least squares with an optional diagonal penalty, via SVD so rank
/// deficiency yields the minimum-norm solution.
fn penalized_lsq(x: &DMatrix<f64>, y: &DVector<f64>, penalty: &[f64]) -> DVector<f64> {
    let mut xtx = x.transpose() * x;
    for (j, p) in penalty.iter().enumerate() {
        xtx[(j, j)] += p;
    }
    let xty = x.transpose() * y;
    xtx.svd(true, true)
        .solve(&xty, 1e-12)
        .expect("svd computed with u and v")
}

/// Indices of columns in `cols` that are numerically independent of the
/// columns before them (modified Gram–Schmidt).
fn independent_columns(x: &DMatrix<f64>, cols: Range<usize>) -> Vec<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut keep = Vec::new();
    for j in 0..x.ncols() {
        let mut v = x.column(j).clone_owned();
        let norm0 = v.norm();
        for b in &basis {
            let d = b.dot(&v);
            v -= b * d;
        }
        let norm = v.norm();
        let ok = norm0 > 0.0 && norm > 1e-8 * norm0.max(1.0);
        if ok {
            basis.push(v / norm);
        }
        if cols.contains(&j) && ok {
            keep.push(j);
        } else if cols.contains(&j) {
            warn!("price model: Fourier column {j} is collinear with earlier regressors; dropped");
        }
    }
    keep
}

/// Residual proxies from an autoregression plus `k` harmonics, with the AR
/// order picked by BIC over `0..=max_p` on the common sample `t >= max_p`.
fn long_ar_residuals(history: &[f64], t0: i64, k: usize, max_p: usize) -> Vec<f64> {
    let n = history.len();
    let rows = n - max_p;
    let four = fourier_regressors(k, WEEK, t0 + max_p as i64..t0 + n as i64);
    let width = 1 + 2 * k + max_p;
    let mut x = DMatrix::zeros(rows, width);
    for r in 0..rows {
        let i = r + max_p;
        x[(r, 0)] = 1.0;
        for c in 0..2 * k {
            x[(r, 1 + c)] = four[(r, c)];
        }
        for l in 1..=max_p {
            x[(r, 2 * k + l)] = history[i - l];
        }
    }
    let y = DVector::from_iterator(rows, history[max_p..].iter().cloned());
    let mut best: Option<(f64, DVector<f64>)> = None;
    for p in 0..=max_p {
        let xp = x.columns(0, 1 + 2 * k + p).clone_owned();
        let b = penalized_lsq(&xp, &y, &[]);
        let resid = &y - &xp * &b;
        let rss = resid.norm_squared().max(1e-300);
        let bic = rows as f64 * (rss / rows as f64).ln() + xp.ncols() as f64 * (rows as f64).ln();
        if best.as_ref().is_none_or(|(v, _)| bic < *v) {
            best = Some((bic, resid));
        }
    }
    let resid = best.expect("p = 0 always evaluated").1;
    let mut proxy = vec![0.0; n];
    proxy[max_p..].copy_from_slice(resid.as_slice());
    proxy
}

struct Fit {
    aicc: f64,
    rss: f64,
    params: usize,
    model: PriceModel,
}

/// One regression of prices on lagged prices, lagged residual proxies and
/// the kept Fourier columns.
fn stage_two(
    history: &[f64],
    y: &DVector<f64>,
    four: &DMatrix<f64>,
    first: usize,
    k: usize,
    keep: &[usize],
    proxy: &[f64],
) -> Fit {
    let rows = y.len();
    let arma = 1 + 2 * LAGS.len();
    let mut x = DMatrix::zeros(rows, arma + 2 * k);
    for r in 0..rows {
        let i = r + first;
        x[(r, 0)] = 1.0;
        for (j, &l) in LAGS.iter().enumerate() {
            x[(r, 1 + j)] = history[i - l];
            x[(r, 1 + LAGS.len() + j)] = proxy[i - l];
        }
        for c in 0..2 * k {
            x[(r, arma + c)] = four[(r, c)];
        }
    }
    let xk = x.select_columns(keep);
    let penalty: Vec<f64> = (0..keep.len())
        .map(|j| {
            let weight = match keep[j] {
                1..=3 => RIDGE_AR,
                4..=6 => RIDGE_MA,
                _ => return 0.0,
            };
            let col = xk.column(j);
            let mean = col.mean();
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / rows as f64;
            weight * rows as f64 * var
        })
        .collect();
    let b = penalized_lsq(&xk, y, &penalty);
    let resid = y - &xk * &b;
    let rss = resid.norm_squared().max(1e-300);
    let params = keep.len() + 1;
    let nf = rows as f64;
    let aicc = if nf - params as f64 - 1.0 > 0.0 {
        nf * (rss / nf).ln()
            + 2.0 * params as f64
            + 2.0 * (params * (params + 1)) as f64 / (nf - params as f64 - 1.0)
    } else {
        f64::INFINITY
    };
    let mut full = vec![0.0; arma + 2 * k];
    for (pos, &j) in keep.iter().enumerate() {
        full[j] = b[pos];
    }
    let dof = (nf - keep.len() as f64).max(1.0);
    let model = PriceModel {
        mu: full[0],
        ar: [full[1], full[2], full[3]],
        ma: [full[4], full[5], full[6]],
        k,
        period: WEEK,
        alpha: (0..k).map(|i| full[arma + 2 * i]).collect(),
        beta: (0..k).map(|i| full[arma + 2 * i + 1]).collect(),
        residual_sigma: (rss / dof).sqrt(),
    };
    Fit {
        aicc,
        rss,
        params,
        model,
    }
}

/// Fits the SARMAX model on `history` (first value at Fourier index `t0`),
/// choosing K in `0..=k_max` by AICc.
///
/// Lags 1 and 2 appear on both the AR and MA side, so the regression is
/// nearly flat along common-factor directions (white noise fits equally
/// well with any φ_l = -θ_l). For each K the MA block is therefore kept only
/// when BIC prefers it over the AR-only fit, and a small ridge weighted
/// towards the MA side breaks the remaining ties.
pub fn fit_price_model(history: &[f64], t0: i64, k_max: usize) -> Result<PriceModel, ForecastError> {
    let need = 2 * WEEK as usize;
    if history.len() < need {
        return Err(ForecastError::InsufficientHistory {
            need,
            got: history.len(),
        });
    }
    if let Some(v) = history.iter().find(|v| !v.is_finite()) {
        return Err(ForecastError::Invalid(format!("non-finite price {v}")));
    }
    let n = history.len();
    let max_p = LONG_AR.min(n / 6);
    let first = max_p + MAX_LAG;
    let rows = n - first;
    let y = DVector::from_iterator(rows, history[first..].iter().cloned());
    let arma = 1 + 2 * LAGS.len();
    let mut best: Option<(f64, PriceModel)> = None;
    for k in 0..=k_max {
        let four = fourier_regressors(k, WEEK, t0 + first as i64..t0 + n as i64);
        let mut base = DMatrix::zeros(rows, 1 + 2 * k);
        base.column_mut(0).fill(1.0);
        base.columns_mut(1, 2 * k).copy_from(&four);
        let fourier: Vec<usize> = independent_columns(&base, 1..1 + 2 * k)
            .into_iter()
            .map(|c| arma + c - 1)
            .collect();
        let ar_only: Vec<usize> = (0..=LAGS.len()).chain(fourier.iter().cloned()).collect();
        let full: Vec<usize> = (0..arma).chain(fourier).collect();
        let proxy = long_ar_residuals(history, t0, k, max_p);
        let plain = stage_two(history, &y, &four, first, k, &ar_only, &proxy);
        let mut arma_fit = stage_two(history, &y, &four, first, k, &full, &proxy);
        for _ in 0..REFINE_PASSES {
            // a non-invertible MA part makes the residual filter diverge
            let proxy = arma_fit.model.residuals(history, t0);
            let rms = (proxy.iter().map(|e| e * e).sum::<f64>() / n as f64).sqrt();
            if !(rms.is_finite() && rms <= 10.0 * arma_fit.model.residual_sigma.max(1e-12)) {
                break;
            }
            let next = stage_two(history, &y, &four, first, k, &full, &proxy);
            if !(next.rss <= arma_fit.rss) {
                break;
            }
            arma_fit = next;
        }
        let nf = rows as f64;
        let bic = |f: &Fit| nf * (f.rss / nf).ln() + f.params as f64 * nf.ln();
        let chosen = if bic(&arma_fit) < bic(&plain) { arma_fit } else { plain };
        let (aicc, model) = (chosen.aicc, chosen.model);
        if best.as_ref().is_none_or(|(a, _)| aicc < *a) {
            best = Some((aicc, model));
        }
    }
    Ok(best.expect("k = 0 always evaluated").1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_shapes() {
        assert_eq!(fourier_regressors(0, WEEK, 0..10).shape(), (10, 0));
        let m = fourier_regressors(1, WEEK, 42..43);
        assert!((m[(0, 0)] - 1.0).abs() < 1e-12);
        assert!(m[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn intercept_only_is_flat() {
        let m = PriceModel::constant(300.0);
        let lags = PriceLags {
            prices: vec![10.0; 24],
            residuals: vec![1.0; 24],
            t_next: 0,
        };
        assert_eq!(predict_price(&m, &lags, 5).unwrap(), vec![300.0; 5]);
    }

    #[test]
    fn random_walk_persists() {
        let mut m = PriceModel::constant(0.0);
        m.ar[0] = 1.0;
        let mut prices = vec![0.0; 23];
        prices.push(50.0);
        let lags = PriceLags {
            prices,
            residuals: vec![0.0; 24],
            t_next: 0,
        };
        assert_eq!(predict_price(&m, &lags, 4).unwrap(), vec![50.0; 4]);
    }

    #[test]
    fn short_lags_rejected() {
        let m = PriceModel::constant(1.0);
        let lags = PriceLags {
            prices: vec![1.0; 23],
            residuals: vec![0.0; 23],
            t_next: 0,
        };
        assert!(predict_price(&m, &lags, 1).is_err());
        assert!(fit_price_model(&[1.0; 335], 0, 2).is_err());
    }
}
