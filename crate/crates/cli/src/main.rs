use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsm_core::harness::config::{self, geometric_grid, InitialState, Scenario, ScenarioKind};
use qsm_core::harness::{output, runner, selftest};
use qsm_core::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qsm",
    version,
    about = "Quantum sawtooth map simulator and entanglement diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a config file.
    #[command(after_help = config_help())]
    Run { config: PathBuf },

    /// Evolve one parameter point and record observables every step.
    Evolve {
        #[arg(long = "nq", default_value_t = 10)]
        n_q: usize,
        #[arg(long = "K", default_value_t = std::f64::consts::SQRT_2)]
        big_k: f64,
        #[arg(long = "M", default_value_t = 1000)]
        m: u64,
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        /// Qubit pair `i,j`; repeatable.
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(usize, usize)>,
        /// Qubit block `a..b`; repeatable.
        #[arg(long = "block", value_parser = parse_block)]
        blocks: Vec<Vec<usize>>,
        /// Time-series CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the flat random-phase initial state.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial momentum, or left edge of the flat state.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        n0: i64,
        /// Start from a flat random-phase state of this width instead of an eigenstate.
        #[arg(long)]
        flat_width: Option<f64>,
        /// Record the windowed localization-length fit every step.
        #[arg(long)]
        track_ell: bool,
    },

    /// Saturation concurrence over a geometric grid of localization lengths.
    Sweep {
        #[arg(long, default_value_t = 0.01)]
        ell_min: f64,
        #[arg(long, default_value_t = 512.0)]
        ell_max: f64,
        #[arg(long, default_value_t = 10)]
        points_per_decade: usize,
        #[arg(long = "nq", default_value_t = 10)]
        n_q: usize,
        #[arg(long = "M", default_value_t = config::DEFAULT_SWEEP_M)]
        m: u64,
        #[arg(long, default_value_t = config::DEFAULT_STEPS)]
        steps: usize,
        /// Qubit pair `i,j`; repeatable (default 1,2 1,3 1,4 1,5).
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(usize, usize)>,
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = "sweep-output")]
        out: PathBuf,
    },

    /// Check the fast kernels against the slow reference implementations.
    Selftest,
}

fn config_help() -> String {
    format!("Config keys and defaults:\n{}", config::documented_keys())
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    config::parse_pair("--pair", &toml::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_block(s: &str) -> Result<Vec<usize>, String> {
    config::parse_block("--block", &toml::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => EXIT_IO,
        Error::Numerical(_) | Error::InsufficientSupport(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn finish(out: &runner::ScenarioOutput) -> u8 {
    if out.exceeds_degradation() {
        eprintln!(
            "error: {} of {} data points degraded ({:.3} > {:.3})",
            out.degraded.len(),
            out.attempted,
            out.degraded_fraction(),
            out.scenario.max_degraded_fraction
        );
        EXIT_NUMERICAL
    } else {
        0
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run { config } => {
            let sc = config::parse_config(&config)?;
            let out = runner::compute_scenario(&sc)?;
            let report = runner::write_outputs(&out, &sc.output_dir)?;
            for f in &report.files {
                println!("{}", f.display());
            }
            Ok(finish(&out))
        }
        Command::Evolve {
            n_q,
            big_k,
            m,
            steps,
            pairs,
            blocks,
            out,
            seed,
            n0,
            flat_width,
            track_ell,
        } => {
            let mut sc = Scenario::preset(ScenarioKind::Custom, n_q, ".");
            sc.big_k = big_k;
            sc.ms = vec![m];
            sc.steps = steps;
            if !pairs.is_empty() || !blocks.is_empty() {
                sc.pairs = pairs;
            }
            sc.blocks = blocks;
            sc.track_ell = track_ell;
            sc.initial = match flat_width {
                Some(width) => InitialState::Flat { left: n0, width, seed },
                None => InitialState::Eigenstate { n0 },
            };
            sc.map_params()?;
            let result = runner::compute_scenario(&sc)?;
            if let (Some(path), Some(series)) = (out, &result.time_series) {
                output::emit_time_series(series, &path)?;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&result.summary).map_err(|e| Error::Argument(e.to_string()))?
            );
            Ok(finish(&result))
        }
        Command::Sweep {
            ell_min,
            ell_max,
            points_per_decade,
            n_q,
            m,
            steps,
            pairs,
            workers,
            out,
        } => {
            let mut sc = Scenario::preset(ScenarioKind::Fig3SaturationVsEll, n_q, out);
            sc.ms = vec![m];
            sc.steps = steps;
            sc.grid = geometric_grid(ell_min, ell_max, points_per_decade)?;
            if !pairs.is_empty() {
                sc.pairs = pairs;
            }
            if let Some(&(i, j)) = sc.pairs.iter().find(|p| p.1 > n_q) {
                return Err(Error::Config(format!("pair ({i}, {j}) exceeds n_q = {n_q}")));
            }
            if workers == Some(0) {
                return Err(Error::Config("--workers must be at least 1".into()));
            }
            sc.workers = workers;
            sc.map_params()?;
            let result = runner::compute_scenario(&sc)?;
            let report = runner::write_outputs(&result, &sc.output_dir)?;
            for f in &report.files {
                println!("{}", f.display());
            }
            Ok(finish(&result))
        }
        Command::Selftest => {
            let checks = selftest::run()?;
            for c in &checks {
                println!("{c}");
            }
            Ok(if checks.iter().all(|c| c.passed) {
                0
            } else {
                EXIT_NUMERICAL
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
