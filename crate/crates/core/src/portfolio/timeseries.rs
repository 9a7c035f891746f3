use std::fmt;
use std::path::Path;

use chrono::{Duration, NaiveDateTime, Timelike};
use indexmap::IndexMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeriesLabel {
    DayAheadPrice,
    UpPrice,
    DownPrice,
    HeatDemand,
    WindSpeed,
    WindPower,
    SolarRadiation,
    AmbientTemp,
}

impl SeriesLabel {
    pub const ALL: [SeriesLabel; 8] = [
        SeriesLabel::DayAheadPrice,
        SeriesLabel::UpPrice,
        SeriesLabel::DownPrice,
        SeriesLabel::HeatDemand,
        SeriesLabel::WindSpeed,
        SeriesLabel::WindPower,
        SeriesLabel::SolarRadiation,
        SeriesLabel::AmbientTemp,
    ];

    /// File name stem used in data directories.
    pub fn file_stem(self) -> &'static str {
        match self {
            SeriesLabel::DayAheadPrice => "dayahead_price",
            SeriesLabel::UpPrice => "up_price",
            SeriesLabel::DownPrice => "down_price",
            SeriesLabel::HeatDemand => "heat_demand",
            SeriesLabel::WindSpeed => "wind_speed",
            SeriesLabel::WindPower => "wind_power",
            SeriesLabel::SolarRadiation => "solar_radiation",
            SeriesLabel::AmbientTemp => "ambient_temp",
        }
    }

    /// Prices and temperatures may be negative; quantities may not.
    pub fn non_negative(self) -> bool {
        !matches!(
            self,
            SeriesLabel::DayAheadPrice
                | SeriesLabel::UpPrice
                | SeriesLabel::DownPrice
                | SeriesLabel::AmbientTemp
        )
    }
}

impl fmt::Display for SeriesLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.file_stem())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("{label}: line {line}: {message}")]
    Parse {
        label: SeriesLabel,
        line: u64,
        message: String,
    },
    #[error("{label}: line {line}: expected {expected}, found {found} (gap; 23-hour DST days are not supported)")]
    Gap {
        label: SeriesLabel,
        line: u64,
        expected: NaiveDateTime,
        found: NaiveDateTime,
    },
    #[error("{label}: line {line}: timestamp {found} is not after the previous row (duplicate or out of order; 25-hour DST days are not supported)")]
    Duplicate {
        label: SeriesLabel,
        line: u64,
        found: NaiveDateTime,
    },
    #[error("{label}: line {line}: negative value {value}")]
    Negative {
        label: SeriesLabel,
        line: u64,
        value: f64,
    },
    #[error("{label}: no data rows")]
    Empty { label: SeriesLabel },
    #[error("{label}: series covers {have_start}..{have_end}, horizon needs {start}..{end}")]
    Coverage {
        label: SeriesLabel,
        start: NaiveDateTime,
        end: NaiveDateTime,
        have_start: NaiveDateTime,
        have_end: NaiveDateTime,
    },
    #[error("{label}: {detail}")]
    Io {
        label: SeriesLabel,
        detail: String,
    },
}

/// Hourly series with validated spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub label: SeriesLabel,
    pub start: NaiveDateTime,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(label: SeriesLabel, start: NaiveDateTime, values: Vec<f64>) -> Self {
        TimeSeries {
            label,
            start,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One hour past the last value.
    pub fn end(&self) -> NaiveDateTime {
        self.start + Duration::hours(self.values.len() as i64)
    }

    pub fn timestamp(&self, i: usize) -> NaiveDateTime {
        self.start + Duration::hours(i as i64)
    }

    /// Position of `ts`, if it falls on a covered hour.
    pub fn index_of(&self, ts: NaiveDateTime) -> Option<usize> {
        let h = (ts - self.start).num_hours();
        (h >= 0 && (h as usize) < self.values.len() && self.timestamp(h as usize) == ts)
            .then_some(h as usize)
    }

    pub fn window(&self, start: NaiveDateTime, len: usize) -> Result<&[f64], SeriesError> {
        let end = start + Duration::hours(len as i64);
        let offset = (start - self.start).num_hours();
        if len == 0 {
            return Ok(&[]);
        }
        if offset < 0 || end > self.end() || (start - self.start).num_minutes() % 60 != 0 {
            return Err(SeriesError::Coverage {
                label: self.label,
                start,
                end,
                have_start: self.start,
                have_end: self.end(),
            });
        }
        let o = offset as usize;
        Ok(&self.values[o..o + len])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("timestamp,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.timestamp(i).format(TS_OUT), v));
        }
        out
    }

    pub fn load(path: &Path, label: SeriesLabel) -> Result<Self, SeriesError> {
        let text = std::fs::read_to_string(path).map_err(|e| SeriesError::Io {
            label,
            detail: format!("{}: {e}", path.display()),
        })?;
        load_timeseries(&text, label)
    }
}

const TS_OUT: &str = "%Y-%m-%dT%H:%M:%S";
const TS_FORMATS: [&str; 4] = [
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

fn parse_ts(s: &str) -> Option<NaiveDateTime> {
    TS_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

/// Parses `timestamp,value` rows. Line numbers in errors count the header as 1.
pub fn load_timeseries(csv_text: &str, label: SeriesLabel) -> Result<TimeSeries, SeriesError> {
    let perr = |line: u64, message: String| SeriesError::Parse {
        label,
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| perr(1, e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "timestamp" || &headers[1] != "value" {
        return Err(perr(1, "header must be `timestamp,value`".into()));
    }
    let mut start = None;
    let mut prev: Option<NaiveDateTime> = None;
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            perr(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 2 || rec[1].is_empty() {
            return Err(perr(line, "expected two fields `timestamp,value`".into()));
        }
        let ts = parse_ts(&rec[0])
            .ok_or_else(|| perr(line, format!("bad timestamp `{}`", &rec[0])))?;
        if ts.minute() != 0 || ts.second() != 0 {
            return Err(perr(line, format!("timestamp {ts} is not on the hour")));
        }
        let v: f64 = rec[1]
            .parse()
            .map_err(|_| perr(line, format!("non-numeric value `{}`", &rec[1])))?;
        if !v.is_finite() {
            return Err(perr(line, format!("non-finite value `{}`", &rec[1])));
        }
        if label.non_negative() && v < 0.0 {
            return Err(SeriesError::Negative {
                label,
                line,
                value: v,
            });
        }
        if let Some(p) = prev {
            if ts <= p {
                return Err(SeriesError::Duplicate {
                    label,
                    line,
                    found: ts,
                });
            }
            let expected = p + Duration::hours(1);
            if ts != expected {
                return Err(SeriesError::Gap {
                    label,
                    line,
                    expected,
                    found: ts,
                });
            }
        } else {
            start = Some(ts);
        }
        prev = Some(ts);
        values.push(v);
    }
    let start = start.ok_or(SeriesError::Empty { label })?;
    Ok(TimeSeries::new(label, start, values))
}

/// Values of several series over a common window.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonData {
    pub start: NaiveDateTime,
    pub len: usize,
    pub series: IndexMap<SeriesLabel, Vec<f64>>,
}

impl HorizonData {
    pub fn get(&self, label: SeriesLabel) -> Option<&[f64]> {
        self.series.get(&label).map(Vec::as_slice)
    }
}

/// Cuts every series to `[start, start + len)`; values are copied, not resampled.
pub fn align_horizon<'a>(
    series: impl IntoIterator<Item = &'a TimeSeries>,
    start: NaiveDateTime,
    len: usize,
) -> Result<HorizonData, SeriesError> {
    let mut out = IndexMap::new();
    for s in series {
        out.insert(s.label, s.window(start, len)?.to_vec());
    }
    Ok(HorizonData {
        start,
        len,
        series: out,
    })
}
