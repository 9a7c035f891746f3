//! CPLEX LP text format writer for cross-checking against external solvers.

use std::fmt::Write;

use crate::{LpProblem, Relation, INF};

fn sanitize(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        s.insert(0, 'v');
    }
    s
}

fn term(out: &mut String, coeff: f64, name: &str, first: bool) {
    if coeff < 0.0 {
        let _ = write!(out, " - {} {}", -coeff, name);
    } else if first {
        let _ = write!(out, " {} {}", coeff, name);
    } else {
        let _ = write!(out, " + {} {}", coeff, name);
    }
}

/// Renders `problem` in LP format. Variable names are sanitized and suffixed
/// with their index so they stay unique.
pub fn write_lp(problem: &LpProblem) -> String {
    let names: Vec<String> = problem
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{}_{}", sanitize(&v.name), i))
        .collect();
    let mut out = String::from("\\ generated by dhbid-lpcore\nMinimize\n obj:");
    let mut first = true;
    for (v, name) in problem.variables().iter().zip(&names) {
        if v.obj != 0.0 {
            term(&mut out, v.obj, name, first);
            first = false;
        }
    }
    if first {
        out.push_str(" 0");
    }
    out.push_str("\nSubject To\n");
    for (i, row) in problem.constraints().iter().enumerate() {
        let _ = write!(out, " c{i}:");
        if row.terms.is_empty() {
            out.push_str(" 0 x_empty_");
        }
        for (k, &(v, a)) in row.terms.iter().enumerate() {
            term(&mut out, a, &names[v.index()], k == 0);
        }
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = writeln!(out, " {rel} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for (v, name) in problem.variables().iter().zip(&names) {
        match (v.lb <= -INF, v.ub >= INF) {
            (true, true) => {
                let _ = writeln!(out, " {name} free");
            }
            (true, false) => {
                let _ = writeln!(out, " -inf <= {name} <= {}", v.ub);
            }
            (false, true) => {
                let _ = writeln!(out, " {name} >= {}", v.lb);
            }
            (false, false) => {
                let _ = writeln!(out, " {} <= {name} <= {}", v.lb, v.ub);
            }
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_sections_and_bounds() {
        let mut p = LpProblem::new();
        let x = p.add_variable("p[bid,1]", -INF, INF, -2.5).unwrap();
        let y = p.add_variable("q", 0.0, 4.0, 1.0).unwrap();
        p.add_constraint([(x, 1.0), (y, -1.0)], Relation::Eq, 0.0)
            .unwrap();
        let text = write_lp(&p);
        assert!(text.contains("Minimize\n obj: - 2.5 p_bid_1__0 + 1 q_1"));
        assert!(text.contains(" c0: 1 p_bid_1__0 - 1 q_1 = 0"));
        assert!(text.contains(" p_bid_1__0 free"));
        assert!(text.contains(" 0 <= q_1 <= 4"));
        assert!(text.ends_with("End\n"));
    }
}
