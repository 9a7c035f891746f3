use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::stochmodels::{BidCurve, Regulation};

/// Realized prices of one hour and the regulation state they imply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketOutcome {
    pub hour: NaiveDateTime,
    pub dayahead: f64,
    pub up: f64,
    pub down: f64,
    pub state: Regulation,
}

impl MarketOutcome {
    pub fn from_prices(hour: NaiveDateTime, dayahead: f64, up: f64, down: f64) -> Self {
        MarketOutcome {
            hour,
            dayahead,
            up,
            down,
            state: Regulation::from_prices(dayahead, up, down),
        }
    }
}

/// Quantity won by a day-ahead curve: the step with the highest price at or
/// below the market price. Below the lowest step only a purchase (negative
/// quantity) clears.
pub fn clear_dayahead(curve: &BidCurve, price: f64) -> f64 {
    match curve.steps.iter().rev().find(|(p, _)| *p <= price) {
        Some(&(_, q)) => q,
        None => curve.steps.first().map_or(0.0, |&(_, q)| q.min(0.0)),
    }
}

/// Activated (up, down) regulation for the hour.
pub fn clear_balancing(up: &BidCurve, down: &BidCurve, outcome: &MarketOutcome) -> (f64, f64) {
    match outcome.state {
        Regulation::None => (0.0, 0.0),
        Regulation::Up(price) => {
            let q = up.steps.iter().rev().find(|(p, _)| *p <= price).map_or(0.0, |s| s.1);
            (q, 0.0)
        }
        Regulation::Down(price) => {
            let q = down.steps.iter().find(|(p, _)| *p >= price).map_or(0.0, |s| s.1);
            (0.0, q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochmodels::CurveKind;

    fn curve(kind: CurveKind, steps: Vec<(f64, f64)>) -> BidCurve {
        BidCurve { hour: 0, kind, steps }
    }

    #[test]
    fn dayahead_rule() {
        let c = curve(CurveKind::DayAhead, vec![(100.0, -2.0), (200.0, 1.0), (300.0, 3.0)]);
        assert_eq!(clear_dayahead(&c, 250.0), 1.0);
        assert_eq!(clear_dayahead(&c, 50.0), -2.0);
        assert_eq!(clear_dayahead(&c, 350.0), 3.0);
        assert_eq!(clear_dayahead(&c, 200.0), 1.0);
        let sell = curve(CurveKind::DayAhead, vec![(100.0, 2.0)]);
        assert_eq!(clear_dayahead(&sell, 50.0), 0.0);
        assert_eq!(clear_dayahead(&curve(CurveKind::DayAhead, vec![]), 50.0), 0.0);
    }

    #[test]
    fn balancing_rule() {
        let t = chrono::NaiveDate::from_ymd_opt(2017, 3, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
        let up = curve(CurveKind::UpRegulation, vec![(300.0, 1.0), (400.0, 2.0)]);
        let down = curve(CurveKind::DownRegulation, vec![(200.0, 3.0), (250.0, 1.0)]);
        let none = MarketOutcome::from_prices(t, 280.0, 280.0, 280.0);
        assert_eq!(clear_balancing(&up, &down, &none), (0.0, 0.0));
        let u = MarketOutcome::from_prices(t, 280.0, 350.0, 280.0);
        assert_eq!(clear_balancing(&up, &down, &u), (1.0, 0.0));
        let d = MarketOutcome::from_prices(t, 280.0, 280.0, 220.0);
        assert_eq!(clear_balancing(&up, &down, &d), (0.0, 1.0));
    }
}
