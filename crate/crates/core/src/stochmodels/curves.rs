use serde::{Deserialize, Serialize};

use super::ModelError;

/// Most steps a market accepts per hour.
pub const MAX_STEPS: usize = 62;
/// Largest ordering violation accepted (and then removed) during extraction.
pub const MONOTONE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    DayAhead,
    UpRegulation,
    DownRegulation,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::DayAhead => "dayahead",
            CurveKind::UpRegulation => "up",
            CurveKind::DownRegulation => "down",
        }
    }

    fn increasing(self) -> bool {
        !matches!(self, CurveKind::DownRegulation)
    }
}

/// Stepwise price → quantity bid for one hour, steps sorted by price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidCurve {
    pub hour: usize,
    pub kind: CurveKind,
    pub steps: Vec<(f64, f64)>,
}

impl BidCurve {
    /// Sorts `(price, quantity)` points, merges equal prices by averaging and
    /// checks the ordering the market requires.
    pub fn from_points(hour: usize, kind: CurveKind, mut points: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut steps: Vec<(f64, f64, usize)> = Vec::with_capacity(points.len());
        for (price, qty) in points {
            match steps.last_mut() {
                Some(last) if last.0 == price => {
                    let mean = last.1 / last.2 as f64;
                    if (qty - mean).abs() > MONOTONE_TOLERANCE {
                        return Err(ModelError::Monotonicity {
                            hour,
                            kind: kind.as_str(),
                            detail: format!("quantities {mean} and {qty} at equal price {price}"),
                        });
                    }
                    last.1 += qty;
                    last.2 += 1;
                }
                _ => steps.push((price, qty, 1)),
            }
        }
        let mut out: Vec<(f64, f64)> = steps.into_iter().map(|(p, q, c)| (p, q / c as f64)).collect();
        for i in 1..out.len() {
            let (prev, cur) = (out[i - 1].1, out[i].1);
            let violation = if kind.increasing() { prev - cur } else { cur - prev };
            if violation > MONOTONE_TOLERANCE {
                return Err(ModelError::Monotonicity {
                    hour,
                    kind: kind.as_str(),
                    detail: format!("step {i}: {prev} then {cur}"),
                });
            }
            if violation > 0.0 {
                out[i].1 = prev;
            }
        }
        if out.len() > MAX_STEPS {
            return Err(ModelError::TooManySteps { hour, steps: out.len() });
        }
        Ok(BidCurve { hour, kind, steps: out })
    }

    /// True if quantities are ordered as the kind requires.
    pub fn is_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| {
            if self.kind.increasing() {
                w[0].1 <= w[1].1
            } else {
                w[0].1 >= w[1].1
            }
        })
    }
}

/// `hour,kind,price,quantity` rows.
pub fn curves_csv(curves: &[BidCurve]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["hour", "kind", "price", "quantity"]).expect("write to Vec");
    for c in curves {
        for (p, q) in &c.steps {
            w.write_record([c.hour.to_string(), c.kind.as_str().to_string(), p.to_string(), q.to_string()])
                .expect("write to Vec");
        }
    }
    String::from_utf8(w.into_inner().expect("flush Vec")).expect("csv is utf-8")
}
