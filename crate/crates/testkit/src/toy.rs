//! Exhaustive dispatch search for a small day-ahead toy: one CHP, one
//! boiler, no storage, flat demand and two price scenarios.

pub const GRID: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct Toy {
    pub chp_cost: f64,
    pub chp_q_max: f64,
    pub phi: f64,
    pub boiler_cost: f64,
    pub boiler_q_max: f64,
    pub demand: f64,
    pub beta: f64,
    /// `[scenario][hour]`.
    pub prices: [Vec<f64>; 2],
    pub probs: [f64; 2],
}

fn imbalance(lambda: f64, beta: f64, d: f64) -> f64 {
    let plus = if lambda >= 0.0 { lambda * (1.0 + beta) } else { lambda * (1.0 - beta) };
    let minus = if lambda >= 0.0 { lambda * (1.0 - beta) } else { lambda * (1.0 + beta) };
    if d > 0.0 {
        plus * d
    } else {
        minus * d
    }
}

impl Toy {
    fn scenario_cost(&self, lambda: f64, q: f64, bid: f64) -> f64 {
        let p = q / self.phi;
        self.chp_cost * q + self.boiler_cost * (self.demand - q) - lambda * bid + imbalance(lambda, self.beta, bid - p)
    }

    /// Minimum expected cost with CHP heat on a `GRID` lattice and bids
    /// chosen exactly among the kinks of the piecewise-linear bid cost.
    pub fn brute_force(&self) -> f64 {
        let top = self.chp_q_max.min(self.demand);
        let steps = (top / GRID + 1e-9).floor() as usize;
        let hours = self.prices[0].len();
        let mut total = 0.0;
        for t in 0..hours {
            let (l1, l2) = (self.prices[0][t], self.prices[1][t]);
            let mut best = f64::INFINITY;
            for a in 0..=steps {
                let q1 = a as f64 * GRID;
                if self.demand - q1 > self.boiler_q_max + 1e-12 {
                    continue;
                }
                for b in 0..=steps {
                    let q2 = b as f64 * GRID;
                    if self.demand - q2 > self.boiler_q_max + 1e-12 {
                        continue;
                    }
                    let (p1, p2) = (q1 / self.phi, q2 / self.phi);
                    for (b1, b2) in [(p1, p2), (p1, p1), (p2, p2)] {
                        let ordered = if l1 == l2 {
                            b1 == b2
                        } else if l1 < l2 {
                            b1 <= b2
                        } else {
                            b1 >= b2
                        };
                        if !ordered {
                            continue;
                        }
                        let c = self.probs[0] * self.scenario_cost(l1, q1, b1)
                            + self.probs[1] * self.scenario_cost(l2, q2, b2);
                        best = best.min(c);
                    }
                }
            }
            total += best;
        }
        total
    }

    /// Largest change in expected cost from moving CHP heat by one grid step.
    pub fn discretization_bound(&self) -> f64 {
        let mut bound = 0.0;
        for (w, row) in self.probs.iter().zip(&self.prices) {
            for &l in row {
                let power = l.abs() * (1.0 + self.beta) / self.phi;
                bound += w * GRID * ((self.chp_cost - self.boiler_cost).abs() + 2.0 * power);
            }
        }
        bound
    }
}
