//! Command-line front end.
//!
//! Exit status: 0 success, 1 bad input or configuration, 2 operation budget
//! exceeded, 3 internal invariant violated.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use threeway::channels::ChannelConfig;
use threeway::engine::{self, EngineError, SimConfig, SimRun};

#[derive(Parser)]
#[command(name = "threeway", version, about = "Capacity bounds and coding simulations for three-way channels")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rate regions and equal-rate capacities of a channel, as JSON.
    Capacity {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One Monte Carlo run, written as a one-row CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        /// Also write the full result as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// One run per rate. Rates are `lo:hi:count` or a comma-separated list.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        rates: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Superposition rate against the sum-rate bound on a log-spaced grid.
    CheckSuperposition {
        #[arg(long, default_value = "0.01:100")]
        g12: String,
        #[arg(long, default_value = "0.01:100")]
        g23: String,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Failure {
        Failure {
            code: e.exit_code() as u8,
            msg: e.to_string(),
        }
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure { code: 1, msg: msg.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn sim_config(path: &Path) -> Result<SimConfig, Failure> {
    Ok(SimConfig::from_json(&read(path)?)?)
}

fn parse_range(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || input(format!("expected lo:hi, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn parse_rates(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || input(format!("expected lo:hi:count or a comma-separated list, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts[..] {
        [lo, hi, count] => {
            let (lo, hi): (f64, f64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
            let count: usize = count.parse().map_err(|_| bad())?;
            match count {
                0 => Err(bad()),
                1 => Ok(vec![lo]),
                _ => Ok((0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()),
            }
        }
        [list] => list.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect(),
        _ => Err(bad()),
    }
}

fn write_csv<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| input(e.to_string()))?;
    }
    w.flush().map_err(|e| input(e.to_string()))
}

fn csv_rows(runs: &[SimRun]) -> Vec<engine::CsvRow> {
    runs.iter().map(SimRun::csv_row).collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Command::Capacity { config, out } => {
            let ch: ChannelConfig = serde_json::from_str(&read(&config)?).map_err(|e| input(e.to_string()))?;
            let spec = ch.build().map_err(|e| input(e.to_string()))?;
            let report = engine::capacity_report(&spec)?;
            let mut json = serde_json::to_string_pretty(&report).map_err(|e| input(e.to_string()))?;
            json.push('\n');
            match out {
                Some(p) => write(&p, json.as_bytes()),
                None => io::stdout().write_all(json.as_bytes()).map_err(|e| input(e.to_string())),
            }
        }
        Command::Simulate {
            config,
            out,
            seed,
            trials,
            threads,
            json,
        } => {
            let mut cfg = sim_config(&config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.trials = trials.unwrap_or(cfg.trials);
            cfg.threads = threads.or(cfg.threads);
            let run = engine::monte_carlo_timed(&cfg)?;
            write_csv(&out, &csv_rows(std::slice::from_ref(&run)))?;
            if let Some(p) = json {
                let s = serde_json::to_string_pretty(&run.result).map_err(|e| input(e.to_string()))?;
                write(&p, s.as_bytes())?;
            }
            Ok(())
        }
        Command::Sweep {
            config,
            rates,
            out,
            threads,
        } => {
            let mut cfg = sim_config(&config)?;
            cfg.threads = threads.or(cfg.threads);
            let runs = engine::rate_sweep(&cfg, &parse_rates(&rates)?)?;
            write_csv(&out, &csv_rows(&runs))
        }
        Command::CheckSuperposition { g12, g23, grid, out } => {
            let check = engine::check_superposition(parse_range(&g12)?, parse_range(&g23)?, grid)?;
            write_csv(&out, &check.points)?;
            println!(
                "{} points, min margin {:.6e}: {}",
                check.points.len(),
                check.min_margin,
                if check.pass { "pass" } else { "FAIL" }
            );
            if check.pass {
                Ok(())
            } else {
                Err(Failure {
                    code: 3,
                    msg: "superposition rate fell below the sum-rate bound".into(),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's own usage errors would otherwise exit with 2, which means "over budget" here.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
