use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;

use super::preset::RunVariant;
use super::replay::YearReport;
use super::settlement::LedgerEntry;
use super::SimError;
use crate::portfolio::Portfolio;
use crate::stochmodels::{curves_csv, Regulation};

/// Monthly sums and averages of the settled hours.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyRow {
    /// `YYYY-MM`.
    pub month: String,
    pub hours: usize,
    pub total_cost: f64,
    pub heat_cost: f64,
    pub tariff_cost: f64,
    pub dayahead_revenue: f64,
    pub up_revenue: f64,
    pub down_payment: f64,
    pub imbalance_cost: f64,
    pub slack_cost: f64,
    pub dayahead_mwh: f64,
    pub up_mwh: f64,
    pub down_mwh: f64,
    pub imbalance_plus: f64,
    pub imbalance_minus: f64,
    /// Per unit, portfolio order.
    pub heat: Vec<f64>,
    pub power: Vec<f64>,
    pub avg_dayahead_price: f64,
    pub avg_up_price: f64,
    pub avg_down_price: f64,
}

pub fn aggregate_monthly<'a>(ledger: impl IntoIterator<Item = &'a LedgerEntry>) -> Vec<MonthlyRow> {
    let mut months: IndexMap<String, MonthlyRow> = IndexMap::new();
    for e in ledger {
        let key = e.hour.format("%Y-%m").to_string();
        let row = months.entry(key.clone()).or_insert_with(|| MonthlyRow {
            month: key,
            hours: 0,
            total_cost: 0.0,
            heat_cost: 0.0,
            tariff_cost: 0.0,
            dayahead_revenue: 0.0,
            up_revenue: 0.0,
            down_payment: 0.0,
            imbalance_cost: 0.0,
            slack_cost: 0.0,
            dayahead_mwh: 0.0,
            up_mwh: 0.0,
            down_mwh: 0.0,
            imbalance_plus: 0.0,
            imbalance_minus: 0.0,
            heat: vec![0.0; e.heat.len()],
            power: vec![0.0; e.power.len()],
            avg_dayahead_price: 0.0,
            avg_up_price: 0.0,
            avg_down_price: 0.0,
        });
        row.hours += 1;
        row.total_cost += e.total_cost;
        row.heat_cost += e.heat_cost;
        row.tariff_cost += e.tariff_cost;
        row.dayahead_revenue += e.dayahead_revenue;
        row.up_revenue += e.up_revenue;
        row.down_payment += e.down_payment;
        row.imbalance_cost += e.imbalance_cost;
        row.slack_cost += e.slack_cost;
        row.dayahead_mwh += e.committed;
        row.up_mwh += e.up;
        row.down_mwh += e.down;
        row.imbalance_plus += e.imbalance_plus;
        row.imbalance_minus += e.imbalance_minus;
        row.heat.iter_mut().zip(&e.heat).for_each(|(a, b)| *a += b);
        row.power.iter_mut().zip(&e.power).for_each(|(a, b)| *a += b);
        // running sums, divided below
        row.avg_dayahead_price += e.dayahead_price;
        row.avg_up_price += e.up_price;
        row.avg_down_price += e.down_price;
    }
    months
        .into_values()
        .map(|mut r| {
            let n = r.hours as f64;
            r.avg_dayahead_price /= n;
            r.avg_up_price /= n;
            r.avg_down_price /= n;
            r
        })
        .collect()
}

fn to_csv(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("write to Vec");
    for r in rows {
        w.write_record(&r).expect("write to Vec");
    }
    String::from_utf8(w.into_inner().expect("flush Vec")).expect("csv is utf-8")
}

fn per_unit<'a>(prefix: &str, pf: &'a Portfolio) -> impl Iterator<Item = String> + 'a {
    let prefix = prefix.to_string();
    pf.units.iter().map(move |u| format!("{prefix}_{}", u.id))
}

fn nums<'a>(xs: impl IntoIterator<Item = &'a f64>) -> impl Iterator<Item = String> {
    xs.into_iter().map(f64::to_string)
}

/// One row per settled hour. Floats are written in shortest round-trip form,
/// so totals can be rebuilt exactly from the file.
pub fn ledger_csv<'a>(ledger: impl IntoIterator<Item = &'a LedgerEntry>, pf: &Portfolio) -> String {
    let mut header: Vec<String> = [
        "hour",
        "committed",
        "up",
        "down",
        "imbalance_plus",
        "imbalance_minus",
        "dayahead_price",
        "up_price",
        "down_price",
        "regulation",
        "penalty_plus",
        "penalty_minus",
    ]
    .map(String::from)
    .to_vec();
    header.extend(per_unit("heat", pf));
    header.extend(per_unit("power", pf));
    header.extend(per_unit("grid", pf));
    for u in &pf.units {
        header.extend(u.tariffs.keys().map(|g| format!("fed_{g}_{}", u.id)));
    }
    header.extend(
        [
            "unmet",
            "surplus",
            "heat_cost",
            "tariff_cost",
            "dayahead_revenue",
            "up_revenue",
            "down_payment",
            "imbalance_cost",
            "slack_cost",
            "total_cost",
        ]
        .map(String::from),
    );
    header.extend(pf.storages.iter().map(|s| format!("storage_{}", s.id)));
    let rows = ledger.into_iter().map(|e| {
        let mut r = vec![e.hour.format("%Y-%m-%d %H:%M").to_string()];
        r.extend(nums([&e.committed, &e.up, &e.down, &e.imbalance_plus, &e.imbalance_minus]));
        r.extend(nums([&e.dayahead_price, &e.up_price, &e.down_price]));
        r.push(
            match e.regulation {
                Regulation::None => "none",
                Regulation::Up(_) => "up",
                Regulation::Down(_) => "down",
            }
            .into(),
        );
        r.extend(nums([&e.penalty_plus, &e.penalty_minus]));
        r.extend(nums(&e.heat));
        r.extend(nums(&e.power));
        r.extend(nums(&e.grid));
        r.extend(nums(&e.fed));
        r.extend(nums([
            &e.unmet,
            &e.surplus,
            &e.heat_cost,
            &e.tariff_cost,
            &e.dayahead_revenue,
            &e.up_revenue,
            &e.down_payment,
            &e.imbalance_cost,
            &e.slack_cost,
            &e.total_cost,
        ]));
        r.extend(nums(&e.storage));
        r
    });
    to_csv(header, rows)
}

pub fn monthly_csv(rows: &[MonthlyRow], pf: &Portfolio) -> String {
    let mut header: Vec<String> = [
        "month",
        "hours",
        "total_cost",
        "heat_cost",
        "tariff_cost",
        "dayahead_revenue",
        "up_revenue",
        "down_payment",
        "imbalance_cost",
        "slack_cost",
        "dayahead_mwh",
        "up_mwh",
        "down_mwh",
        "imbalance_plus",
        "imbalance_minus",
    ]
    .map(String::from)
    .to_vec();
    header.extend(per_unit("heat", pf));
    header.extend(per_unit("power", pf));
    header.extend(["avg_dayahead_price", "avg_up_price", "avg_down_price"].map(String::from));
    let body = rows.iter().map(|m| {
        let mut r = vec![m.month.clone(), m.hours.to_string()];
        r.extend(nums([
            &m.total_cost,
            &m.heat_cost,
            &m.tariff_cost,
            &m.dayahead_revenue,
            &m.up_revenue,
            &m.down_payment,
            &m.imbalance_cost,
            &m.slack_cost,
            &m.dayahead_mwh,
            &m.up_mwh,
            &m.down_mwh,
            &m.imbalance_plus,
            &m.imbalance_minus,
        ]));
        r.extend(nums(&m.heat));
        r.extend(nums(&m.power));
        r.extend(nums([&m.avg_dayahead_price, &m.avg_up_price, &m.avg_down_price]));
        r
    });
    to_csv(header, body)
}

/// Plain-text totals per run, one block each plus a comparison table.
pub fn summary_text(reports: &[&YearReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let all = aggregate_monthly(r.ledger());
        let sum = |f: fn(&MonthlyRow) -> f64| all.iter().map(f).sum::<f64>();
        let hours: usize = all.iter().map(|m| m.hours).sum();
        let _ = writeln!(s, "[{}]", r.name);
        let _ = writeln!(s, "days = {}", r.days.len());
        let _ = writeln!(s, "hours = {hours}");
        for (k, v) in [
            ("total_cost", sum(|m| m.total_cost)),
            ("heat_cost", sum(|m| m.heat_cost)),
            ("tariff_cost", sum(|m| m.tariff_cost)),
            ("dayahead_revenue", sum(|m| m.dayahead_revenue)),
            ("up_revenue", sum(|m| m.up_revenue)),
            ("down_payment", sum(|m| m.down_payment)),
            ("imbalance_cost", sum(|m| m.imbalance_cost)),
            ("slack_cost", sum(|m| m.slack_cost)),
            ("dayahead_mwh", sum(|m| m.dayahead_mwh)),
            ("up_mwh", sum(|m| m.up_mwh)),
            ("down_mwh", sum(|m| m.down_mwh)),
        ] {
            let _ = writeln!(s, "{k} = {v:.2}");
        }
        s.push('\n');
    }
    if reports.len() > 1 {
        let best = reports.iter().map(|r| r.total_cost()).fold(f64::INFINITY, f64::min);
        let _ = writeln!(s, "{:<28} {:>16} {:>10}", "run", "total_cost", "vs best %");
        for r in reports {
            let t = r.total_cost();
            let rel = if best != 0.0 { 100.0 * (t - best) / best.abs() } else { 0.0 };
            let _ = writeln!(s, "{:<28} {:>16.2} {:>10.3}", r.name, t, rel);
        }
    }
    s
}

/// Writes `ledger.csv`, `monthly.csv`, `curves_<date>.csv` per day and
/// `summary.txt` into `out_dir`.
pub fn emit_report(report: &YearReport, pf: &Portfolio, out_dir: &Path) -> Result<(), SimError> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("ledger.csv"), ledger_csv(report.ledger(), pf))?;
    std::fs::write(out_dir.join("monthly.csv"), monthly_csv(&aggregate_monthly(report.ledger()), pf))?;
    for d in &report.days {
        std::fs::write(out_dir.join(format!("curves_{}.csv", d.date)), curves_csv(&d.curves))?;
    }
    std::fs::write(out_dir.join("summary.txt"), summary_text(&[report]))?;
    Ok(())
}

/// Several runs: one sub-directory per run plus a combined `summary.txt`.
pub fn emit_sweep(reports: &[(RunVariant, YearReport)], out_dir: &Path) -> Result<(), SimError> {
    for (v, r) in reports {
        emit_report(r, &v.portfolio, &out_dir.join(&v.name))?;
    }
    let all: Vec<&YearReport> = reports.iter().map(|(_, r)| r).collect();
    std::fs::write(out_dir.join("summary.txt"), summary_text(&all))?;
    Ok(())
}
