use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use hjb_mor::experiments::{Benchmark, ConfigError, ExperimentError, ScenarioConfig};

mod commands;

/// Reduced-order HJB feedback control for the heat and Burgers benchmarks.
#[derive(Debug, Parser)]
#[command(name = "hjb-mor", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Open-loop and LQR-controlled full-order simulations.
    Simulate(Common),
    /// Riccati solution and feedback gain of the linear(ized) system.
    Lqr(Common),
    /// Reduced bases for every configured method.
    Reduce(Common),
    /// Value iteration for `method` and `ell`.
    Hjb(Common),
    /// Closed-loop simulation under the reduced HJB feedback and the LQR feedback.
    ClosedLoop(Common),
    /// Value-function accuracy table for the heat benchmark.
    Table1(Common),
    /// Closed-loop cost tables for the Burgers benchmark.
    Table2(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override a scenario key, e.g. `--set ells=1,2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn load(&self, default: Benchmark) -> Result<ScenarioConfig, ConfigError> {
        match &self.config {
            Some(path) => ScenarioConfig::load_with_default(path, &self.overrides, default),
            None => ScenarioConfig::parse_with_default("", &self.overrides, default),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let (common, run): (&Common, commands::Command) = match &cli.verb {
        Verb::Simulate(c) => (c, commands::simulate_cmd),
        Verb::Lqr(c) => (c, commands::lqr),
        Verb::Reduce(c) => (c, commands::reduce),
        Verb::Hjb(c) => (c, commands::hjb),
        Verb::ClosedLoop(c) => (c, commands::closed_loop),
        Verb::Table1(c) => (c, commands::table1),
        Verb::Table2(c) => (c, commands::table2),
    };
    let default = match cli.verb {
        Verb::Table2(_) => Benchmark::Burgers,
        _ => Benchmark::Heat,
    };
    let cfg = match common.load(default) {
        Ok(cfg) => cfg,
        Err(e) => {
            error!("configuration error: {e}");
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&common.out) {
        eprintln!("cannot create {}: {e}", common.out.display());
        return ExitCode::from(1);
    }
    match run(&cfg, &common.out) {
        Ok(commands::Outcome::Complete) => ExitCode::SUCCESS,
        Ok(commands::Outcome::CellFailures(failures)) => {
            for f in failures {
                eprintln!("failed cell: {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let config_error = matches!(e.downcast_ref(), Some(ExperimentError::Config(_)));
            ExitCode::from(if config_error { 2 } else { 1 })
        }
    }
}
