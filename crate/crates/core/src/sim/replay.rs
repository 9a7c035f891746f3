use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime};

use super::clearing::{clear_balancing, clear_dayahead, MarketOutcome};
use super::data::{perturbed_weather, MarketData};
use super::preset::{RunVariant, Uncertainty};
use super::settlement::{resolve_actuals, ActualsInput, LedgerEntry};
use super::{Setup, SimError};
use crate::forecast::{
    fit_power_curve, fit_price_model, hours_since_epoch, predict_price, predict_solar_heat, predict_wind_power,
    SolarCollectorModel,
};
use crate::portfolio::{Portfolio, SeriesLabel, UnitKind};
use crate::scengen::{
    combine_balancing_prices, estimate_balancing_stats, generate_balancing_deviations, reduce_jointly,
    reduce_scenarios_pam, simulate_random_walk_scenarios, BalancingStats, Direction, Quantity, ScenarioError,
    ScenarioSet, UNBOUNDED,
};
use crate::stochmodels::{
    build_balancing, build_dayahead, extract_bid_curves, extract_regulation_curves, solve_model, BalancingInput,
    BidCurve, DayAheadInput, DayAheadModel, ModelError, FIRST_STAGE_HOURS,
};

/// Random stream owners; each gets an independent seed per day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Weather,
    Price,
    Res(usize),
    Balancing(usize),
}

impl Purpose {
    fn code(self) -> u64 {
        match self {
            Purpose::Weather => 1,
            Purpose::Price => 2,
            Purpose::Res(k) => 0x100 + k as u64,
            Purpose::Balancing(h) => 0x1_0000 + h as u64,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, date: NaiveDate, purpose: Purpose) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ date.num_days_from_ce() as u64) ^ purpose.code())
}

/// Point forecasts, their spread and the realized values for one day's
/// planning horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct DayForecast {
    pub date: NaiveDate,
    pub start: NaiveDateTime,
    pub horizon: usize,
    pub price_point: Vec<f64>,
    /// Step deviation of the price random walk.
    pub price_sigma: f64,
    pub res_units: Vec<String>,
    pub res_labels: Vec<Quantity>,
    pub res_point: Vec<Vec<f64>>,
    pub res_sigma: Vec<f64>,
    pub res_bounds: Vec<(f64, f64)>,
    pub res_realized: Vec<Vec<f64>>,
    pub realized_price: Vec<f64>,
    pub realized_up: Vec<f64>,
    pub realized_down: Vec<f64>,
    pub demand: Vec<f64>,
}

fn history_start(data: &MarketData, start: NaiveDateTime, days: usize) -> Result<NaiveDateTime, SimError> {
    let h0 = start - Duration::days(days as i64);
    data.index_of(h0).map(|_| h0).ok_or_else(|| {
        SimError::Data(format!(
            "{} needs {days} days of history from {}, data starts {}",
            start.date(),
            h0.date(),
            data.start
        ))
    })
}

struct ResForecast {
    point: Vec<f64>,
    sigma: f64,
    realized: Vec<f64>,
}

/// Step deviation of a random walk matching the forecast errors: pooled
/// standard deviation of hour-to-hour error changes within each issued day.
fn walk_sigma(errors: &[f64]) -> f64 {
    let d: Vec<f64> = errors
        .chunks(24)
        .flat_map(|day| day.windows(2).map(|w| w[1] - w[0]))
        .collect();
    if d.len() < 2 {
        return 0.0;
    }
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / d.len() as f64).sqrt()
}

/// Weather forecasts issued at the start of each history day, 24 hours each.
fn past_forecasts(
    data: &MarketData,
    label: SeriesLabel,
    hist: NaiveDateTime,
    days: usize,
    noise: (u64, f64),
) -> Result<Vec<f64>, SimError> {
    let mut out = Vec::with_capacity(days * 24);
    for d in 0..days {
        out.extend(perturbed_weather(data, label, hist + Duration::days(d as i64), 24, noise.0, noise.1)?);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn wind_forecast(
    data: &MarketData,
    hist: NaiveDateTime,
    days: usize,
    start: NaiveDateTime,
    horizon: usize,
    cap: f64,
    bins: usize,
    noise: (u64, f64),
) -> Result<ResForecast, SimError> {
    let hist_len = days * 24;
    let speeds = data.window(SeriesLabel::WindSpeed, hist, hist_len)?;
    let powers: Vec<f64> = data.window(SeriesLabel::WindPower, hist, hist_len)?.iter().map(|p| p.clamp(0.0, cap)).collect();
    let model = fit_power_curve(speeds, &powers, bins)?;
    let past = predict_wind_power(&model, &past_forecasts(data, SeriesLabel::WindSpeed, hist, days, noise)?)?;
    let errors: Vec<f64> = powers.iter().zip(&past).map(|(a, f)| a - f.clamp(0.0, cap)).collect();
    let ahead = perturbed_weather(data, SeriesLabel::WindSpeed, start, horizon, noise.0, noise.1)?;
    Ok(ResForecast {
        point: predict_wind_power(&model, &ahead)?.into_iter().map(|p| p.clamp(0.0, cap)).collect(),
        sigma: walk_sigma(&errors),
        realized: data.window(SeriesLabel::WindPower, start, horizon)?.iter().map(|p| p.clamp(0.0, cap)).collect(),
    })
}

#[allow(clippy::too_many_arguments)]
fn solar_forecast(
    data: &MarketData,
    model: &SolarCollectorModel,
    hist: NaiveDateTime,
    days: usize,
    start: NaiveDateTime,
    horizon: usize,
    cap: f64,
    noise: (u64, f64),
) -> Result<ResForecast, SimError> {
    let hist_len = days * 24;
    let heat = |rad: &[f64], amb: &[f64]| -> Result<Vec<f64>, SimError> {
        Ok(predict_solar_heat(model, rad, amb)?.into_iter().map(|q| q.min(cap)).collect())
    };
    let actual = heat(
        data.window(SeriesLabel::SolarRadiation, hist, hist_len)?,
        data.window(SeriesLabel::AmbientTemp, hist, hist_len)?,
    )?;
    let past = heat(
        &past_forecasts(data, SeriesLabel::SolarRadiation, hist, days, noise)?,
        &past_forecasts(data, SeriesLabel::AmbientTemp, hist, days, noise)?,
    )?;
    let errors: Vec<f64> = actual.iter().zip(&past).map(|(x, f)| x - f).collect();
    Ok(ResForecast {
        point: heat(
            &perturbed_weather(data, SeriesLabel::SolarRadiation, start, horizon, noise.0, noise.1)?,
            &perturbed_weather(data, SeriesLabel::AmbientTemp, start, horizon, noise.0, noise.1)?,
        )?,
        sigma: walk_sigma(&errors),
        realized: heat(
            data.window(SeriesLabel::SolarRadiation, start, horizon)?,
            data.window(SeriesLabel::AmbientTemp, start, horizon)?,
        )?,
    })
}

/// Fits the forecast models on the trailing history and forecasts the
/// planning horizon of `date`: the configured day-ahead horizon, cut at the
/// end of the data but never below 24 hours.
pub fn forecast_day(
    data: &MarketData,
    date: NaiveDate,
    setup: &Setup,
    variant: &RunVariant,
) -> Result<DayForecast, SimError> {
    let cfg = &variant.config;
    let pf = &variant.portfolio;
    let start = date.and_hms_opt(0, 0, 0).expect("midnight");
    let horizon = cfg.dayahead_horizon.min(data.hours_from(start));
    if horizon < FIRST_STAGE_HOURS {
        return Err(SimError::Data(format!("{date}: only {horizon} hours of data left, need 24")));
    }
    let hist = history_start(data, start, cfg.history_days)?;
    let hist_len = cfg.history_days * 24;

    let prices = data.window(SeriesLabel::DayAheadPrice, hist, hist_len)?;
    let t0 = hours_since_epoch(hist);
    let model = fit_price_model(prices, t0, cfg.price_fourier_max)?;
    let price_point = predict_price(&model, &model.lags_after(prices, t0), horizon)?;

    let noise = (derive_seed(cfg.seed, data.first_date(), Purpose::Weather), cfg.weather_noise);
    let mut fc = DayForecast {
        date,
        start,
        horizon,
        price_point,
        price_sigma: model.residual_sigma,
        res_units: Vec::new(),
        res_labels: Vec::new(),
        res_point: Vec::new(),
        res_sigma: Vec::new(),
        res_bounds: Vec::new(),
        res_realized: Vec::new(),
        realized_price: data.window(SeriesLabel::DayAheadPrice, start, horizon)?.to_vec(),
        realized_up: data.window(SeriesLabel::UpPrice, start, horizon)?.to_vec(),
        realized_down: data.window(SeriesLabel::DownPrice, start, horizon)?.to_vec(),
        demand: data.window(SeriesLabel::HeatDemand, start, horizon)?.to_vec(),
    };
    for kind in [UnitKind::PowerOnlyRes, UnitKind::StochasticHeat] {
        let units: Vec<_> = pf.units_of(kind).collect();
        if units.len() > 1 {
            return Err(SimError::Data(format!(
                "the data holds one {} series but the portfolio has {} such units",
                kind.as_str(),
                units.len()
            )));
        }
        let Some(&(_, unit)) = units.first() else { continue };
        let (label, cap, f) = if kind == UnitKind::PowerOnlyRes {
            let f = wind_forecast(data, hist, cfg.history_days, start, horizon, unit.p_max, cfg.power_curve_bins, noise)?;
            (Quantity::WindPower, unit.p_max, f)
        } else {
            let model = setup
                .solar
                .as_ref()
                .ok_or_else(|| SimError::Data(format!("unit {} needs a [solar_collector] table", unit.id)))?;
            let f = solar_forecast(data, model, hist, cfg.history_days, start, horizon, unit.q_max, noise)?;
            (Quantity::SolarHeat, unit.q_max, f)
        };
        fc.res_units.push(unit.id.clone());
        fc.res_labels.push(label);
        fc.res_point.push(f.point);
        fc.res_sigma.push(f.sigma);
        fc.res_bounds.push((0.0, cap));
        fc.res_realized.push(f.realized);
    }
    Ok(fc)
}

/// Day-ahead price scenarios and jointly indexed RES scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct DayScenarios {
    pub prices: ScenarioSet,
    pub res: Vec<ScenarioSet>,
}

/// Raw random-walk price pool around the point forecast.
fn price_pool(fc: &DayForecast, count: usize, seed: u64) -> ScenarioSet {
    let seed = derive_seed(seed, fc.date, Purpose::Price);
    simulate_random_walk_scenarios(Quantity::DayAheadPrice, &fc.price_point, fc.price_sigma, count, seed, UNBOUNDED)
}

/// RES scenarios reduced to `keep`; units not flagged in `uncertain` keep
/// their point forecast in every scenario.
fn res_scenarios(
    fc: &DayForecast,
    uncertain: &[bool],
    raw: usize,
    keep: usize,
    seed: u64,
) -> Result<Vec<ScenarioSet>, ScenarioError> {
    if !uncertain.iter().any(|&u| u) {
        return Ok(fc
            .res_point
            .iter()
            .zip(&fc.res_labels)
            .map(|(p, &l)| ScenarioSet::deterministic(l, p.clone()))
            .collect());
    }
    let sets: Vec<ScenarioSet> = (0..fc.res_units.len())
        .map(|k| {
            let (point, label) = (&fc.res_point[k], fc.res_labels[k]);
            if uncertain[k] {
                let s = derive_seed(seed, fc.date, Purpose::Res(k));
                let mut set = simulate_random_walk_scenarios(label, point, fc.res_sigma[k], raw, s, fc.res_bounds[k]);
                if label == Quantity::SolarHeat {
                    // no collector heat where none is forecast (night)
                    for row in &mut set.trajectories {
                        row.iter_mut().zip(point).filter(|(_, &p)| p <= 0.0).for_each(|(v, _)| *v = 0.0);
                    }
                }
                set
            } else {
                ScenarioSet::uniform(label, vec![point.clone(); raw]).expect("non-empty")
            }
        })
        .collect();
    reduce_jointly(&sets, keep.min(raw))
}

fn uncertain_units(fc: &DayForecast, uncertainty: Uncertainty) -> Vec<bool> {
    match uncertainty {
        Uncertainty::Stochastic { wind, solar } => fc
            .res_labels
            .iter()
            .map(|&l| if l == Quantity::WindPower { wind } else { solar })
            .collect(),
        _ => vec![false; fc.res_labels.len()],
    }
}

/// Scenario sets the day-ahead model is solved on under `variant`.
pub fn day_scenarios(fc: &DayForecast, variant: &RunVariant) -> Result<DayScenarios, SimError> {
    let cfg = &variant.config;
    let det = |l, v: &Vec<f64>| ScenarioSet::deterministic(l, v.clone());
    Ok(match variant.uncertainty {
        Uncertainty::Perfect => DayScenarios {
            prices: det(Quantity::DayAheadPrice, &fc.realized_price),
            res: fc.res_realized.iter().zip(&fc.res_labels).map(|(v, &l)| det(l, v)).collect(),
        },
        Uncertainty::PointForecast => DayScenarios {
            prices: det(Quantity::DayAheadPrice, &fc.price_point),
            res: fc.res_point.iter().zip(&fc.res_labels).map(|(v, &l)| det(l, v)).collect(),
        },
        u @ Uncertainty::Stochastic { .. } => DayScenarios {
            prices: reduce_scenarios_pam(&price_pool(fc, cfg.raw_price_scenarios, cfg.seed), cfg.price_scenarios)?,
            res: res_scenarios(fc, &uncertain_units(fc, u), cfg.raw_res_scenarios, cfg.res_scenarios, cfg.seed)?,
        },
    })
}

/// Up and down price scenarios around `dayahead`, reduced jointly. Without
/// regulation statistics the window is regulation-free.
///
/// The sampler's first period is the gate-closure hour, which never carries
/// an event; rows are drawn one period longer and that period is dropped, so
/// the delivery hour `dayahead[0]` can be regulated.
pub fn balancing_scenarios(
    stats: Option<&BalancingStats>,
    dayahead: &[f64],
    raw: usize,
    keep: usize,
    seed: u64,
) -> Result<(ScenarioSet, ScenarioSet), ScenarioError> {
    let Some(stats) = stats else {
        return Ok((
            ScenarioSet::deterministic(Quantity::UpPrice, dayahead.to_vec()),
            ScenarioSet::deterministic(Quantity::DownPrice, dayahead.to_vec()),
        ));
    };
    let h = dayahead.len();
    let drop_gate = |rows: Vec<Vec<f64>>| -> Vec<Vec<f64>> { rows.into_iter().map(|r| r[1..].to_vec()).collect() };
    let up = drop_gate(generate_balancing_deviations(stats, Direction::Up, h + 1, raw, seed));
    let down = drop_gate(generate_balancing_deviations(stats, Direction::Down, h + 1, raw, seed));
    let (up, down) = combine_balancing_prices(&up, &down, dayahead)?;
    let mut r = reduce_jointly(&[up, down], keep.min(raw))?;
    let down = r.pop().expect("two sets");
    Ok((r.pop().expect("two sets"), down))
}

/// Regulation statistics over the `days` before `date`; `None` when one
/// direction never activated in that window.
pub fn history_balancing_stats(data: &MarketData, date: NaiveDate, days: usize) -> Result<Option<BalancingStats>, SimError> {
    let hist = history_start(data, date.and_hms_opt(0, 0, 0).expect("midnight"), days)?;
    let len = days * 24;
    match estimate_balancing_stats(
        data.window(SeriesLabel::DayAheadPrice, hist, len)?,
        data.window(SeriesLabel::UpPrice, hist, len)?,
        data.window(SeriesLabel::DownPrice, hist, len)?,
    ) {
        Ok(s) => Ok(Some(s)),
        Err(ScenarioError::NoActivation(dir)) => {
            log::warn!("{date}: no {dir} regulation in the history, balancing assumes none");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn model_err(day: NaiveDate, hour: Option<usize>) -> impl Fn(ModelError) -> SimError {
    move |source| SimError::Model { day, hour, source }
}

/// Built and solved day-ahead problem of one day.
pub struct SolvedDayAhead {
    pub forecast: DayForecast,
    pub scenarios: DayScenarios,
    pub model: DayAheadModel,
    pub curves: Vec<BidCurve>,
    pub objective: f64,
    /// Expected storage level per `[storage][hour]`.
    pub expected_storage: Vec<Vec<f64>>,
}

fn build_day(pf: &Portfolio, fc: &DayForecast, sc: &DayScenarios, opening: &[f64]) -> Result<DayAheadModel, ModelError> {
    build_dayahead(&DayAheadInput {
        portfolio: pf,
        prices: &sc.prices,
        res: &sc.res,
        res_units: &fc.res_units,
        demand: &fc.demand,
        storage_init: opening,
        terminal_floor: Some(&pf.initial_levels()),
    })
}

/// Forecasts, scenarios and the solved day-ahead model for `date`.
pub fn solve_dayahead_day(
    data: &MarketData,
    date: NaiveDate,
    opening: &[f64],
    setup: &Setup,
    variant: &RunVariant,
) -> Result<SolvedDayAhead, SimError> {
    let forecast = forecast_day(data, date, setup, variant)?;
    let scenarios = day_scenarios(&forecast, variant)?;
    let err = model_err(date, None);
    let model = build_day(&variant.portfolio, &forecast, &scenarios, opening).map_err(&err)?;
    let sol = solve_model(&model.lp, &model.index, &setup.options).map_err(&err)?;
    let curves = extract_bid_curves(&model, &sol).map_err(&err)?;
    let expected_storage = (0..variant.portfolio.storages.len())
        .map(|k| {
            (0..forecast.horizon)
                .map(|t| {
                    (0..model.joint.len())
                        .map(|s| model.joint.probabilities[s] * sol.value(model.index.sigma(k, t, s)))
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(SolvedDayAhead {
        forecast,
        scenarios,
        objective: sol.objective,
        model,
        curves,
        expected_storage,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayResult {
    pub date: NaiveDate,
    pub opening: Vec<f64>,
    pub closing: Vec<f64>,
    pub curves: Vec<BidCurve>,
    pub committed: Vec<f64>,
    pub ledger: Vec<LedgerEntry>,
    /// Expected cost of the day-ahead plan over its whole horizon.
    pub planned_cost: f64,
}

fn window_set(set: &ScenarioSet, from: usize, len: usize, first: f64) -> ScenarioSet {
    ScenarioSet {
        label: set.label,
        trajectories: set
            .trajectories
            .iter()
            .map(|r| {
                let mut w = r[from..from + len].to_vec();
                w[0] = first;
                w
            })
            .collect(),
        probabilities: set.probabilities.clone(),
    }
}

/// Runs one day: day-ahead bids and clearing, then for every hour the
/// balancing offers, their activation and the settlement of actuals.
pub fn run_day(
    data: &MarketData,
    date: NaiveDate,
    opening: &[f64],
    setup: &Setup,
    variant: &RunVariant,
) -> Result<DayResult, SimError> {
    let cfg = &variant.config;
    let pf = &variant.portfolio;
    let day = solve_dayahead_day(data, date, opening, setup, variant)?;
    let fc = &day.forecast;
    let committed: Vec<f64> = (0..FIRST_STAGE_HOURS)
        .map(|t| clear_dayahead(&day.curves[t], fc.realized_price[t]))
        .collect();

    let stats = if variant.balancing && variant.uncertainty != Uncertainty::Perfect {
        history_balancing_stats(data, date, cfg.history_days)?
    } else {
        None
    };

    let mut storage = opening.to_vec();
    let mut ledger = Vec::with_capacity(FIRST_STAGE_HOURS);
    for h in 0..FIRST_STAGE_HOURS {
        let err = model_err(date, Some(h));
        let hb = cfg.balancing_horizon.min(FIRST_STAGE_HOURS - h);
        let outcome = MarketOutcome::from_prices(
            fc.start + Duration::hours(h as i64),
            fc.realized_price[h],
            fc.realized_up[h],
            fc.realized_down[h],
        );
        let lam = &fc.realized_price[h..h + hb];
        let res: Vec<ScenarioSet> = day
            .scenarios
            .res
            .iter()
            .zip(&fc.res_realized)
            .map(|(set, real)| window_set(set, h, hb, real[h]))
            .collect();
        let floor: Vec<f64> = day.expected_storage.iter().map(|row| row[h + hb - 1]).collect();
        let demand = &fc.demand[h..h + hb];
        let committed_w = &committed[h..h + hb];

        let activated = if variant.balancing {
            let (up, down) = if variant.uncertainty == Uncertainty::Perfect {
                (
                    ScenarioSet::deterministic(Quantity::UpPrice, fc.realized_up[h..h + hb].to_vec()),
                    ScenarioSet::deterministic(Quantity::DownPrice, fc.realized_down[h..h + hb].to_vec()),
                )
            } else {
                let seed = derive_seed(cfg.seed, date, Purpose::Balancing(h));
                balancing_scenarios(stats.as_ref(), lam, cfg.raw_balancing_scenarios, cfg.balancing_scenarios, seed)?
            };
            let model = build_balancing(&BalancingInput {
                portfolio: pf,
                committed: committed_w,
                dayahead: lam,
                up: &up,
                down: &down,
                res: &res,
                res_units: &fc.res_units,
                demand,
                storage_state: &storage,
                terminal_floor: Some(&floor),
            })
            .map_err(&err)?;
            let sol = solve_model(&model.lp, &model.index, &setup.options).map_err(&err)?;
            let (up_curve, down_curve) = extract_regulation_curves(&model, &sol).map_err(&err)?;
            clear_balancing(&up_curve, &down_curve, &outcome)
        } else {
            (0.0, 0.0)
        };

        let res_actual: Vec<Vec<f64>> = res
            .iter()
            .map(|s| {
                let mut e = s.expected();
                e[0] = s.trajectories[0][0];
                e
            })
            .collect();
        let entry = resolve_actuals(
            &ActualsInput {
                portfolio: pf,
                outcome: &outcome,
                committed: committed_w,
                dayahead: lam,
                activated,
                res: &res_actual,
                res_units: &fc.res_units,
                demand,
                storage_state: &storage,
                terminal_floor: Some(&floor),
            },
            &setup.options,
        )
        .map_err(&err)?;
        storage.clone_from(&entry.storage);
        ledger.push(entry);
    }
    Ok(DayResult {
        date,
        opening: opening.to_vec(),
        closing: storage,
        curves: day.curves,
        committed,
        ledger,
        planned_cost: day.objective,
    })
}

/// Results of a replay over consecutive days.
#[derive(Debug, Clone, PartialEq)]
pub struct YearReport {
    pub name: String,
    pub days: Vec<DayResult>,
}

impl YearReport {
    pub fn ledger(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.days.iter().flat_map(|d| d.ledger.iter())
    }

    pub fn total_cost(&self) -> f64 {
        self.ledger().map(|e| e.total_cost).sum()
    }
}

fn check_range(data: &MarketData, from: NaiveDate, to: NaiveDate, history_days: usize) -> Result<(), SimError> {
    if from > to {
        return Ok(());
    }
    history_start(data, from.and_hms_opt(0, 0, 0).expect("midnight"), history_days)?;
    let end = to.and_hms_opt(0, 0, 0).expect("midnight");
    if data.hours_from(end) < FIRST_STAGE_HOURS {
        return Err(SimError::Data(format!("{to} is not fully covered by the data (last hour {})", data.last_date())));
    }
    Ok(())
}

/// Replays `from..=to` day by day, each day opening with the storage levels
/// the previous one settled at. An empty range gives an empty report.
pub fn run_range(
    data: &MarketData,
    from: NaiveDate,
    to: NaiveDate,
    setup: &Setup,
    variant: &RunVariant,
) -> Result<YearReport, SimError> {
    check_range(data, from, to, variant.config.history_days)?;
    let mut storage = variant.portfolio.initial_levels();
    let mut days = Vec::new();
    for date in from.iter_days().take_while(|d| *d <= to) {
        log::info!("{}: {date}", variant.name);
        let day = run_day(data, date, &storage, setup, variant)?;
        storage.clone_from(&day.closing);
        days.push(day);
    }
    Ok(YearReport {
        name: variant.name.clone(),
        days,
    })
}

/// In-sample study of the number of bid steps.
#[derive(Debug, Clone, PartialEq)]
pub struct StepStudy {
    /// Price scenario counts, i.e. steps per hourly curve.
    pub counts: Vec<usize>,
    /// Size of the simulated price pool the curves are evaluated on.
    pub pool: usize,
    pub res_scenarios: usize,
}

/// For each day, reduces one simulated price pool to each count, solves the
/// day-ahead model on the reduced set and evaluates the resulting curves on
/// the full pool with the bids fixed to what each curve clears at each
/// scenario's price. Days open at the initial storage levels. Returns the
/// evaluated expected cost summed over days, per count.
pub fn step_count_study(
    data: &MarketData,
    from: NaiveDate,
    to: NaiveDate,
    setup: &Setup,
    variant: &RunVariant,
    study: &StepStudy,
) -> Result<Vec<(usize, f64)>, SimError> {
    let cfg = &variant.config;
    check_range(data, from, to, cfg.history_days)?;
    if study.counts.iter().any(|&m| m == 0 || m > study.pool) {
        return Err(SimError::Data(format!("step counts must be in 1..={}", study.pool)));
    }
    let opening = variant.portfolio.initial_levels();
    let mut totals = vec![0.0; study.counts.len()];
    for date in from.iter_days().take_while(|d| *d <= to) {
        let err = model_err(date, None);
        let fc = forecast_day(data, date, setup, variant)?;
        let pool = price_pool(&fc, study.pool, cfg.seed);
        let uncertain = uncertain_units(&fc, variant.uncertainty);
        let res = res_scenarios(&fc, &uncertain, cfg.raw_res_scenarios, study.res_scenarios, cfg.seed)?;
        let full = DayScenarios { prices: pool.clone(), res: res.clone() };
        for (k, &m) in study.counts.iter().enumerate() {
            let reduced = DayScenarios {
                prices: reduce_scenarios_pam(&pool, m)?,
                res: res.clone(),
            };
            let model = build_day(&variant.portfolio, &fc, &reduced, &opening).map_err(&err)?;
            let sol = solve_model(&model.lp, &model.index, &setup.options).map_err(&err)?;
            let curves = extract_bid_curves(&model, &sol).map_err(&err)?;
            let mut eval = build_day(&variant.portfolio, &fc, &full, &opening).map_err(&err)?;
            eval.fix_bids(|t, price| clear_dayahead(&curves[t], price)).map_err(&err)?;
            let sol = solve_model(&eval.lp, &eval.index, &setup.options).map_err(&err)?;
            log::info!("{date}: {m} steps, expected cost {:.2}", sol.objective);
            totals[k] += sol.objective;
        }
    }
    Ok(study.counts.iter().copied().zip(totals).collect())
}
