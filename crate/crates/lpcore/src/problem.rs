use std::collections::HashMap;
use std::fmt;

use crate::LpError;

/// Sentinel magnitude for infinite bounds.
pub const INF: f64 = 1e30;

fn normalize_bound(b: f64) -> f64 {
    if b >= INF {
        INF
    } else if b <= -INF {
        -INF
    } else {
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RowId(pub(crate) usize);

impl RowId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub obj: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sorted by variable, no duplicates.
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Violation of the row at `values`, scaled by the largest coefficient
    /// magnitude (1 for empty rows).
    pub fn normalized_violation(&self, values: &[f64]) -> f64 {
        let scale = self
            .terms
            .iter()
            .map(|&(_, a)| a.abs())
            .fold(0.0_f64, f64::max)
            .max(1.0);
        let act = self.activity(values);
        let raw = match self.relation {
            Relation::Le => (act - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - act).max(0.0),
            Relation::Eq => (act - self.rhs).abs(),
        };
        raw / scale
    }
}

/// A minimisation LP over continuous variables.
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    vars: Vec<Variable>,
    rows: Vec<Constraint>,
    names: HashMap<String, VarId>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(vars: usize, rows: usize) -> Self {
        LpProblem {
            vars: Vec::with_capacity(vars),
            rows: Vec::with_capacity(rows),
            names: HashMap::with_capacity(vars),
        }
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        lb: f64,
        ub: f64,
        obj: f64,
    ) -> Result<VarId, LpError> {
        let name = name.into();
        if !obj.is_finite() {
            return Err(LpError::NonFiniteObjective(name));
        }
        let (lb, ub) = (normalize_bound(lb), normalize_bound(ub));
        if lb.is_nan() || ub.is_nan() || lb > ub {
            return Err(LpError::InvalidBounds { name, lb, ub });
        }
        if self.names.contains_key(&name) {
            return Err(LpError::DuplicateName(name));
        }
        let id = VarId(self.vars.len());
        self.names.insert(name.clone(), id);
        self.vars.push(Variable { name, lb, ub, obj });
        Ok(id)
    }

    /// Adds `Σ coeff·var (relation) rhs`. Repeated variables are summed.
    pub fn add_constraint(
        &mut self,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<RowId, LpError> {
        let row = self.rows.len();
        let mut terms: Vec<(VarId, f64)> = terms.into_iter().collect();
        for &(v, a) in &terms {
            if v.0 >= self.vars.len() {
                return Err(LpError::UnknownVariable(v.0));
            }
            if !a.is_finite() {
                return Err(LpError::NonFiniteRow(row));
            }
        }
        if !rhs.is_finite() {
            return Err(LpError::NonFiniteRow(row));
        }
        terms.sort_unstable_by_key(|&(v, _)| v);
        terms.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
        terms.retain(|&(_, a)| a != 0.0);
        self.rows.push(Constraint {
            terms,
            relation,
            rhs,
        });
        Ok(RowId(row))
    }

    pub fn set_bounds(&mut self, var: VarId, lb: f64, ub: f64) -> Result<(), LpError> {
        let (lb, ub) = (normalize_bound(lb), normalize_bound(ub));
        let v = self
            .vars
            .get_mut(var.0)
            .ok_or(LpError::UnknownVariable(var.0))?;
        if lb.is_nan() || ub.is_nan() || lb > ub {
            return Err(LpError::InvalidBounds {
                name: v.name.clone(),
                lb,
                ub,
            });
        }
        v.lb = lb;
        v.ub = ub;
        Ok(())
    }

    pub fn set_objective(&mut self, var: VarId, obj: f64) -> Result<(), LpError> {
        let v = self
            .vars
            .get_mut(var.0)
            .ok_or(LpError::UnknownVariable(var.0))?;
        if !obj.is_finite() {
            return Err(LpError::NonFiniteObjective(v.name.clone()));
        }
        v.obj = obj;
        Ok(())
    }

    pub fn num_variables(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, var: VarId) -> &Variable {
        &self.vars[var.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    /// Handle for the `i`-th variable, if it exists.
    pub fn var(&self, i: usize) -> Option<VarId> {
        (i < self.vars.len()).then_some(VarId(i))
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.vars.iter().zip(values).map(|(v, x)| v.obj * x).sum()
    }

    /// Largest bound or normalized row violation at `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let bounds = self
            .vars
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lb - x).max(x - v.ub).max(0.0))
            .fold(0.0_f64, f64::max);
        self.rows
            .iter()
            .map(|r| r.normalized_violation(values))
            .fold(bounds, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_are_rejected() {
        let mut p = LpProblem::new();
        p.add_variable("x", 0.0, 1.0, 0.0).unwrap();
        assert_eq!(
            p.add_variable("x", 0.0, 1.0, 0.0),
            Err(LpError::DuplicateName("x".into()))
        );
    }

    #[test]
    fn unknown_handle_in_terms() {
        let mut p = LpProblem::new();
        let err = p
            .add_constraint([(VarId(3), 1.0)], Relation::Le, 1.0)
            .unwrap_err();
        assert_eq!(err, LpError::UnknownVariable(3));
    }

    #[test]
    fn infinite_bounds_map_to_sentinel() {
        let mut p = LpProblem::new();
        let x = p
            .add_variable("x", f64::NEG_INFINITY, f64::INFINITY, 1.0)
            .unwrap();
        assert_eq!(p.variable(x).lb, -INF);
        assert_eq!(p.variable(x).ub, INF);
    }

    #[test]
    fn inverted_bounds_and_nonfinite_objective() {
        let mut p = LpProblem::new();
        assert!(matches!(
            p.add_variable("x", 2.0, 1.0, 0.0),
            Err(LpError::InvalidBounds { .. })
        ));
        assert!(matches!(
            p.add_variable("y", 0.0, 1.0, f64::NAN),
            Err(LpError::NonFiniteObjective(_))
        ));
    }

    #[test]
    fn repeated_terms_are_merged() {
        let mut p = LpProblem::new();
        let x = p.add_variable("x", 0.0, 1.0, 0.0).unwrap();
        let y = p.add_variable("y", 0.0, 1.0, 0.0).unwrap();
        let r = p
            .add_constraint([(y, 1.0), (x, 2.0), (x, 3.0), (y, -1.0)], Relation::Le, 4.0)
            .unwrap();
        assert_eq!(p.constraints()[r.index()].terms, vec![(x, 5.0)]);
    }
}
