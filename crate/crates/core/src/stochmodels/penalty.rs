use serde::{Deserialize, Serialize};

use crate::scengen::DEAD_BAND;

/// Imbalance prices for one hour and scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyPrices {
    /// Paid per MWh delivered short of the commitment.
    pub plus: f64,
    /// Received per MWh delivered beyond the commitment.
    pub minus: f64,
}

/// Balancing-market state of an hour as seen by the imbalance settlement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Regulation {
    None,
    /// Up regulation active at this price.
    Up(f64),
    /// Down regulation active at this price.
    Down(f64),
}

impl Regulation {
    /// Reads the state from realized or scenario prices: up if the up price
    /// exceeds `lambda` by more than the dead band, down symmetrically.
    pub fn from_prices(lambda: f64, up: f64, down: f64) -> Self {
        let (du, dd) = (up - lambda, lambda - down);
        if du > DEAD_BAND && du >= dd {
            Regulation::Up(up)
        } else if dd > DEAD_BAND {
            Regulation::Down(down)
        } else {
            Regulation::None
        }
    }

    pub fn is_up(self) -> bool {
        matches!(self, Regulation::Up(_))
    }

    pub fn is_down(self) -> bool {
        matches!(self, Regulation::Down(_))
    }
}

fn raise(base: f64, beta: f64) -> f64 {
    if base >= 0.0 {
        base + beta * base
    } else {
        base - beta * base
    }
}

fn lower(base: f64, beta: f64) -> f64 {
    if base >= 0.0 {
        base - beta * base
    } else {
        base + beta * base
    }
}

/// λ⁺ and λ⁻ around the day-ahead price `lambda`. When regulation is
/// active the regulation price replaces `lambda` as the base on its side.
///
/// The sign case follows the base actually used, so λ⁻ ≤ λ ≤ λ⁺ and the
/// imbalance price never beats the regulation price even when the two have
/// opposite signs.
pub fn penalty_prices(lambda: f64, beta: f64, regulation: Regulation) -> PenaltyPrices {
    let (up_base, down_base) = match regulation {
        Regulation::None => (lambda, lambda),
        Regulation::Up(up) => (up, lambda),
        Regulation::Down(down) => (lambda, down),
    };
    PenaltyPrices {
        plus: raise(up_base, beta),
        minus: lower(down_base, beta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases() {
        let p = penalty_prices(100.0, 0.1, Regulation::None);
        assert!((p.plus - 110.0).abs() < 1e-12 && (p.minus - 90.0).abs() < 1e-12);
        let p = penalty_prices(-100.0, 0.1, Regulation::None);
        assert!((p.plus + 90.0).abs() < 1e-12 && (p.minus + 110.0).abs() < 1e-12);
        assert_eq!(penalty_prices(0.0, 0.1, Regulation::None), PenaltyPrices { plus: 0.0, minus: 0.0 });
        let p = penalty_prices(100.0, 0.1, Regulation::Up(150.0));
        assert!((p.plus - 165.0).abs() < 1e-12 && (p.minus - 90.0).abs() < 1e-12);
        let p = penalty_prices(100.0, 0.1, Regulation::Down(-20.0));
        assert!((p.minus + 22.0).abs() < 1e-12);
    }

    #[test]
    fn state_from_prices() {
        assert_eq!(Regulation::from_prices(100.0, 100.005, 100.0), Regulation::None);
        assert_eq!(Regulation::from_prices(100.0, 130.0, 100.0), Regulation::Up(130.0));
        assert_eq!(Regulation::from_prices(100.0, 100.0, 60.0), Regulation::Down(60.0));
    }
}
