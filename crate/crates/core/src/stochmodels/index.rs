use lpcore::{LpSolution, VarId};

/// Handles of one variable family, `t * scenarios + s`.
pub(crate) type Family = Option<Vec<VarId>>;

/// Where each model variable lives in the built `LpProblem`. Families that
/// a unit's kind or connections rule out are absent rather than fixed to 0.
#[derive(Debug, Clone, Default)]
pub struct VariableIndex {
    pub horizon: usize,
    pub scenarios: usize,
    pub(crate) q: Vec<Family>,
    pub(crate) q_dh: Vec<Family>,
    /// `[unit][storage]`.
    pub(crate) q_s: Vec<Vec<Family>>,
    pub(crate) p_chp: Vec<Family>,
    pub(crate) p_grid: Vec<Family>,
    /// `[electric unit][RES unit]`.
    pub(crate) p_heat: Vec<Vec<Family>>,
    pub(crate) p_gen: Vec<Family>,
    pub(crate) sigma: Vec<Vec<VarId>>,
    pub(crate) sigma_out: Vec<Vec<VarId>>,
    pub(crate) unmet: Vec<VarId>,
    pub(crate) surplus: Vec<VarId>,
    pub(crate) p_bid: Family,
    pub(crate) p_plus: Family,
    pub(crate) p_minus: Family,
    pub(crate) p_up: Family,
    pub(crate) p_down: Family,
}

impl VariableIndex {
    fn at(&self, f: &Family, t: usize, s: usize) -> Option<VarId> {
        f.as_ref().map(|v| v[t * self.scenarios + s])
    }

    pub(crate) fn slot(&self, t: usize, s: usize) -> usize {
        t * self.scenarios + s
    }

    pub fn q(&self, u: usize, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.q[u], t, s)
    }

    pub fn q_dh(&self, u: usize, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.q_dh[u], t, s)
    }

    pub fn q_s(&self, u: usize, storage: usize, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.q_s[u][storage], t, s)
    }

    pub fn p_chp(&self, u: usize, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.p_chp[u], t, s)
    }

    pub fn p_grid(&self, u: usize, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.p_grid[u], t, s)
    }

    pub fn p_heat(&self, g: usize, u: usize, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.p_heat[u][g], t, s)
    }

    pub fn p_gen(&self, g: usize, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.p_gen[g], t, s)
    }

    pub fn sigma(&self, storage: usize, t: usize, s: usize) -> VarId {
        self.sigma[storage][self.slot(t, s)]
    }

    pub fn sigma_out(&self, storage: usize, t: usize, s: usize) -> VarId {
        self.sigma_out[storage][self.slot(t, s)]
    }

    pub fn unmet(&self, t: usize, s: usize) -> VarId {
        self.unmet[self.slot(t, s)]
    }

    pub fn surplus(&self, t: usize, s: usize) -> VarId {
        self.surplus[self.slot(t, s)]
    }

    pub fn p_bid(&self, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.p_bid, t, s)
    }

    pub fn p_plus(&self, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.p_plus, t, s)
    }

    pub fn p_minus(&self, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.p_minus, t, s)
    }

    pub fn p_up(&self, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.p_up, t, s)
    }

    pub fn p_down(&self, t: usize, s: usize) -> Option<VarId> {
        self.at(&self.p_down, t, s)
    }

    /// Electric output net of grid consumption: Σp_CHP + Σp_GEN − Σp_GRID.
    pub fn net_power_terms(&self, t: usize, s: usize) -> Vec<(VarId, f64)> {
        let mut terms = Vec::new();
        for u in 0..self.p_chp.len() {
            if let Some(v) = self.p_chp(u, t, s) {
                terms.push((v, 1.0));
            }
            if let Some(v) = self.p_gen(u, t, s) {
                terms.push((v, 1.0));
            }
            if let Some(v) = self.p_grid(u, t, s) {
                terms.push((v, -1.0));
            }
        }
        terms
    }

    /// Every handle, for consistency checks.
    pub fn all_handles(&self) -> Vec<VarId> {
        let fams = self
            .q
            .iter()
            .chain(&self.q_dh)
            .chain(self.q_s.iter().flatten())
            .chain(&self.p_chp)
            .chain(&self.p_grid)
            .chain(self.p_heat.iter().flatten())
            .chain(&self.p_gen)
            .chain([&self.p_bid, &self.p_plus, &self.p_minus, &self.p_up, &self.p_down]);
        let mut out: Vec<VarId> = fams.flatten().flatten().cloned().collect();
        for v in self.sigma.iter().chain(&self.sigma_out) {
            out.extend(v);
        }
        out.extend(&self.unmet);
        out.extend(&self.surplus);
        out
    }
}

/// Value of an optional handle, 0 when the variable does not exist.
pub fn value_of(sol: &LpSolution, v: Option<VarId>) -> f64 {
    v.map_or(0.0, |v| sol.value(v))
}
