use std::f64::consts::PI;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use indexmap::IndexMap;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::SimError;
use crate::portfolio::{SeriesLabel, TimeSeries};
use crate::scengen::scenario_rng;

/// Hourly series sharing one start and length.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketData {
    pub start: NaiveDateTime,
    pub len: usize,
    series: IndexMap<SeriesLabel, Vec<f64>>,
}

impl MarketData {
    pub fn from_series(series: Vec<TimeSeries>) -> Result<Self, SimError> {
        let first = series.first().ok_or_else(|| SimError::Data("no series".into()))?;
        let (start, len) = (first.start, first.len());
        let mut out = IndexMap::new();
        for s in series {
            if s.start != start || s.len() != len {
                return Err(SimError::Data(format!(
                    "{} covers {} + {}h, expected {start} + {len}h",
                    s.label,
                    s.start,
                    s.len()
                )));
            }
            out.insert(s.label, s.values);
        }
        Ok(MarketData { start, len, series: out })
    }

    /// Reads `<stem>.csv` for every series label from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, SimError> {
        let series = SeriesLabel::ALL
            .iter()
            .map(|&l| TimeSeries::load(&dir.join(format!("{}.csv", l.file_stem())), l))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_series(series)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), SimError> {
        std::fs::create_dir_all(dir)?;
        for (&label, values) in &self.series {
            let ts = TimeSeries::new(label, self.start, values.clone());
            std::fs::write(dir.join(format!("{}.csv", label.file_stem())), ts.to_csv())?;
        }
        Ok(())
    }

    pub fn get(&self, label: SeriesLabel) -> Result<&[f64], SimError> {
        self.series
            .get(&label)
            .map(Vec::as_slice)
            .ok_or_else(|| SimError::Data(format!("missing series {label}")))
    }

    /// Position of `ts` in the series.
    pub fn index_of(&self, ts: NaiveDateTime) -> Option<usize> {
        let h = (ts - self.start).num_hours();
        (ts >= self.start && (h as usize) < self.len && ts.minute() == 0).then_some(h as usize)
    }

    /// `len` values starting at `ts`.
    pub fn window(&self, label: SeriesLabel, ts: NaiveDateTime, len: usize) -> Result<&[f64], SimError> {
        let values = self.get(label)?;
        let i = self.index_of(ts).ok_or_else(|| SimError::Data(format!("{ts} outside the data")))?;
        values
            .get(i..i + len)
            .ok_or_else(|| SimError::Data(format!("{label}: {len}h from {ts} run past the data")))
    }

    /// Hours available from `ts` to the end of the data.
    pub fn hours_from(&self, ts: NaiveDateTime) -> usize {
        self.index_of(ts).map_or(0, |i| self.len - i)
    }

    pub fn first_date(&self) -> NaiveDate {
        self.start.date()
    }

    pub fn last_date(&self) -> NaiveDate {
        (self.start + Duration::hours(self.len as i64 - 1)).date()
    }
}

/// Weather forecast issued at `issue` for the next `len` hours: the realized
/// series times `1 + e_l`, where `e_l` is a Gaussian random walk over the lead
/// time `l` whose standard deviation reaches `noise` after 24 hours.
/// Temperatures get `10·e_l` °C added instead. The walk depends only on
/// `seed`, the label and the issue hour, so a re-issued forecast is identical.
pub fn perturbed_weather(
    data: &MarketData,
    label: SeriesLabel,
    issue: NaiveDateTime,
    len: usize,
    seed: u64,
    noise: f64,
) -> Result<Vec<f64>, SimError> {
    let values = data.window(label, issue, len)?;
    let i0 = data.index_of(issue).expect("window checked the start") as u64;
    let step = Normal::new(0.0, noise / 24f64.sqrt()).map_err(|e| SimError::Data(e.to_string()))?;
    let mut rng = scenario_rng(seed ^ (label as u64 + 1).wrapping_mul(0x9E37_79B9), i0);
    let mut e = 0.0;
    Ok(values
        .iter()
        .map(|&v| {
            e += step.sample(&mut rng);
            match label {
                SeriesLabel::AmbientTemp => v + 10.0 * e,
                _ => (v * (1.0 + e)).max(0.0),
            }
        })
        .collect())
}

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub start: NaiveDate,
    pub days: usize,
    pub seed: u64,
    /// Installed wind power.
    pub wind_capacity: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            start: NaiveDate::from_ymd_opt(2017, 3, 1).expect("valid date"),
            days: 45,
            seed: 2017,
            wind_capacity: 9.0,
        }
    }
}

fn wind_curve(v: f64) -> f64 {
    match v {
        v if v < 3.0 || v > 25.0 => 0.0,
        v if v >= 12.0 => 1.0,
        v => ((v - 3.0) / 9.0).powi(3),
    }
}

/// Seeded synthetic spring data.
///
/// * Day-ahead price: 250 + daily shape (peaks near 8 h and 18 h) − 30 at
///   weekends + x_t with x_t = 0.7x_{t−1} + 0.2x_{t−24} + N(0, 30²).
/// * Regulation: Markov chain over {none, up, down}; from none each
///   direction starts with probability 0.08, an active state persists with
///   probability 0.7. Active hours move the price by (8 + 25U + 5N)% of |λ|.
/// * Wind speed: 7 + sin(daily) + y_t, y_t = 0.95y_{t−1} + N(0, 0.8²);
///   power from a cubic curve (cut-in 3, rated 12, cut-out 25 m/s) with 3%
///   noise.
/// * Ambient temperature: 4 + 0.1·day + 3 sin(daily) + AR(1) noise.
/// * Radiation (kW/m²): half-sine between 6 h and 18 h scaled by an AR(1)
///   clearness index in [0.15, 1].
/// * Heat demand: 7 + 0.3(10 − T) plus morning and evening peaks and noise.
pub fn synthesize(spec: &SyntheticSpec) -> MarketData {
    let hours = spec.days * 24;
    let start = spec.start.and_hms_opt(0, 0, 0).expect("midnight");
    let mut rng = scenario_rng(spec.seed, 0);
    let n = |sd: f64, rng: &mut rand_chacha::ChaCha8Rng| Normal::new(0.0, sd).expect("sd > 0").sample(rng);

    let mut price = Vec::with_capacity(hours);
    let mut up = Vec::with_capacity(hours);
    let mut down = Vec::with_capacity(hours);
    let mut speed = Vec::with_capacity(hours);
    let mut power = Vec::with_capacity(hours);
    let mut temp = Vec::with_capacity(hours);
    let mut rad = Vec::with_capacity(hours);
    let mut demand = Vec::with_capacity(hours);
    let mut x = vec![0.0; hours];
    let (mut state, mut y, mut z, mut c) = (0u8, 0.0, 0.0, 0.6);
    for t in 0..hours {
        let ts = start + Duration::hours(t as i64);
        let h = ts.hour() as f64;
        let day = t as f64 / 24.0;
        let weekend = ts.weekday().number_from_monday() >= 6;
        x[t] = 0.7 * if t >= 1 { x[t - 1] } else { 0.0 } + 0.2 * if t >= 24 { x[t - 24] } else { 0.0 } + n(30.0, &mut rng);
        let shape = 0.6 * (2.0 * PI * (h - 6.0) / 24.0).sin() + 0.4 * (4.0 * PI * (h - 5.0) / 24.0).sin();
        let lam = 250.0 + 60.0 * shape - if weekend { 30.0 } else { 0.0 } + x[t];
        price.push(lam);

        let u: f64 = rng.random();
        state = match state {
            0 if u < 0.08 => 1,
            0 if u < 0.16 => 2,
            s @ (1 | 2) if u < 0.7 => s,
            _ => 0,
        };
        let dev = (8.0 + 25.0 * rng.random::<f64>() + n(5.0, &mut rng)).max(1.0) / 100.0;
        up.push(if state == 1 { lam + lam.abs() * dev } else { lam });
        down.push(if state == 2 { lam - lam.abs() * dev } else { lam });

        y = 0.95 * y + n(0.8, &mut rng);
        let v = (7.0 + (2.0 * PI * (h - 14.0) / 24.0).sin() + y).clamp(0.0, 30.0);
        speed.push(v);
        let p = spec.wind_capacity * wind_curve(v) * (1.0 + n(0.03, &mut rng));
        power.push(p.clamp(0.0, spec.wind_capacity));

        z = 0.97 * z + n(0.3, &mut rng);
        let temp_t = 4.0 + 0.1 * day + 3.0 * (2.0 * PI * (h - 9.0) / 24.0).sin() + z;
        temp.push(temp_t);

        c = (0.9 * c + 0.1 * 0.6 + n(0.05, &mut rng)).clamp(0.15, 1.0);
        let sun = (PI * (h - 6.0) / 12.0).sin().max(0.0);
        rad.push(0.6 * (1.0 + 0.3 * day / 45.0) * sun * c);

        let peaks = if (6.0..=9.0).contains(&h) {
            1.2
        } else if (17.0..=20.0).contains(&h) {
            0.6
        } else {
            0.0
        };
        demand.push((7.0 + 0.3 * (10.0 - temp_t) + peaks + n(0.2, &mut rng)).max(0.0));
    }
    let series = [
        (SeriesLabel::DayAheadPrice, price),
        (SeriesLabel::UpPrice, up),
        (SeriesLabel::DownPrice, down),
        (SeriesLabel::HeatDemand, demand),
        (SeriesLabel::WindSpeed, speed),
        (SeriesLabel::WindPower, power),
        (SeriesLabel::SolarRadiation, rad),
        (SeriesLabel::AmbientTemp, temp),
    ];
    MarketData {
        start,
        len: hours,
        series: series.into_iter().collect(),
    }
}
