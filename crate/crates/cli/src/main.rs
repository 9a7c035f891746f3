use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dhbid::scengen::Quantity;
use dhbid::sim::{
    balancing_scenarios, day_scenarios, derive_seed, emit_report, emit_sweep, forecast_day, history_balancing_stats,
    run_range, solve_dayahead_day, summary_text, synthesize, ExperimentPreset, MarketData, Purpose, RunVariant, Setup,
    SimError, SyntheticSpec,
};
use dhbid::stochmodels::curves_csv;

#[derive(Parser)]
#[command(name = "dhbid", version, about = "District-heating market bidding and replay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Portfolio and simulation config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory with one CSV per series.
    #[arg(long)]
    data: PathBuf,
    /// Overrides `simulation.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `simulation.price_scenarios`.
    #[arg(long = "price-scenarios")]
    price_scenarios: Option<usize>,
    /// Overrides `simulation.res_scenarios`.
    #[arg(long = "res-scenarios")]
    res_scenarios: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioKind {
    Dayahead,
    Balancing,
    Wind,
    Solar,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a date range under a preset.
    Run {
        #[command(flatten)]
        common: Common,
        /// e.g. stochastic-full, res-ablation:wind, step-sweep:2,5,10,20
        #[arg(long, default_value = "stochastic-full")]
        preset: String,
        #[arg(long)]
        from: NaiveDate,
        #[arg(long)]
        to: NaiveDate,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the scenario set used on one day.
    Scengen {
        kind: ScenarioKind,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        date: NaiveDate,
        /// Hour of the day for balancing scenarios.
        #[arg(long, default_value_t = 0)]
        hour: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one day-ahead problem and write its bid curves.
    SolveDayahead {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        date: NaiveDate,
        #[arg(long, default_value = "stochastic-full")]
        preset: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate the synthetic dataset.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "2017-03-01")]
        start: NaiveDate,
        #[arg(long, default_value_t = 45)]
        days: usize,
        #[arg(long, default_value_t = 2017)]
        seed: u64,
    },
}

fn load(common: &Common) -> Result<(Setup, MarketData), SimError> {
    let mut setup = Setup::load(&common.config)?;
    let cfg = &mut setup.config;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(m) = common.price_scenarios {
        cfg.price_scenarios = m;
        cfg.raw_price_scenarios = cfg.raw_price_scenarios.max(m);
    }
    if let Some(n) = common.res_scenarios {
        cfg.res_scenarios = n;
        cfg.raw_res_scenarios = cfg.raw_res_scenarios.max(n);
    }
    cfg.validate()?;
    Ok((setup, MarketData::load_dir(&common.data)?))
}

fn variants(setup: &Setup, preset: &str) -> Result<Vec<RunVariant>, SimError> {
    let preset: ExperimentPreset = preset.parse().map_err(SimError::Data)?;
    preset.variants(&setup.config, &setup.portfolio)
}

fn single(setup: &Setup, preset: &str) -> Result<RunVariant, SimError> {
    let mut v = variants(setup, preset)?;
    if v.len() != 1 {
        return Err(SimError::Data(format!("{preset} expands to {} runs; pick a single-run preset", v.len())));
    }
    Ok(v.remove(0))
}

fn run(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Run { common, preset, from, to, out } => {
            let (setup, data) = load(&common)?;
            let variants = variants(&setup, &preset)?;
            let mut reports = Vec::with_capacity(variants.len());
            for v in variants {
                let r = run_range(&data, from, to, &setup, &v)?;
                reports.push((v, r));
            }
            if let [(v, r)] = reports.as_slice() {
                emit_report(r, &v.portfolio, &out)?;
            } else {
                emit_sweep(&reports, &out)?;
            }
            print!("{}", summary_text(&reports.iter().map(|(_, r)| r).collect::<Vec<_>>()));
        }
        Command::Scengen { kind, common, date, hour, out } => {
            let (setup, data) = load(&common)?;
            let v = single(&setup, "stochastic-full")?;
            let fc = forecast_day(&data, date, &setup, &v)?;
            match kind {
                ScenarioKind::Dayahead => day_scenarios(&fc, &v)?.prices.write(&out, "dayahead_price")?,
                ScenarioKind::Wind | ScenarioKind::Solar => {
                    let label = if matches!(kind, ScenarioKind::Wind) { Quantity::WindPower } else { Quantity::SolarHeat };
                    let sc = day_scenarios(&fc, &v)?;
                    let set = sc
                        .res
                        .iter()
                        .find(|s| s.label == label)
                        .ok_or_else(|| SimError::Data(format!("the portfolio has no {label} unit")))?;
                    set.write(&out, label.as_str())?;
                }
                ScenarioKind::Balancing => {
                    if hour >= 24 {
                        return Err(SimError::Data(format!("hour {hour} is not in 0..24")));
                    }
                    let cfg = &v.config;
                    let hb = cfg.balancing_horizon.min(24 - hour);
                    let stats = history_balancing_stats(&data, date, cfg.history_days)?;
                    let seed = derive_seed(cfg.seed, date, Purpose::Balancing(hour));
                    let lam = &fc.realized_price[hour..hour + hb];
                    let (up, down) = balancing_scenarios(
                        stats.as_ref(),
                        lam,
                        cfg.raw_balancing_scenarios,
                        cfg.balancing_scenarios,
                        seed,
                    )?;
                    up.write(&out, "up_price")?;
                    down.write(&out, "down_price")?;
                }
            }
            println!("wrote scenarios to {}", out.display());
        }
        Command::SolveDayahead { common, date, preset, out } => {
            let (setup, data) = load(&common)?;
            let v = single(&setup, &preset)?;
            let day = solve_dayahead_day(&data, date, &setup.portfolio.initial_levels(), &setup, &v)?;
            std::fs::create_dir_all(&out)?;
            let path = out.join(format!("curves_{date}.csv"));
            std::fs::write(&path, curves_csv(&day.curves))?;
            println!("expected cost {:.2}; curves in {}", day.objective, path.display());
        }
        Command::Synth { out, start, days, seed } => {
            let data = synthesize(&SyntheticSpec {
                start,
                days,
                seed,
                ..SyntheticSpec::default()
            });
            data.write_dir(&out)?;
            println!("wrote {days} days from {start} to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
