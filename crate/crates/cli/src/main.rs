use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cogmimo::commands::{self, Table};
use cogmimo::scenario::{McSettings, Scenario};
use cogmimo::Error;

/// Trials per grid case when `validate` runs without a scenario.
const GRID_TRIALS: u64 = 200_000;

#[derive(Parser)]
#[command(name = "cogmimo", version, about = "Underlay MIMO cognitive link analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outage probability sweep (closed form, fixed power, Monte Carlo).
    Outage(Common),
    /// Active-antenna distribution under leakage control.
    Antennas(Common),
    /// Per-stream rate: Monte Carlo, outage integral, hardened SINR.
    Rate(Common),
    /// Regression checks; built-in grid when no config is given.
    Validate(Common),
    /// Lagrange multiplier and power threshold per point.
    Power(Common),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML, or JSON by extension).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides the scenario's Monte-Carlo trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

enum Failure {
    Config(String),
    Validation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } => Failure::Config(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

fn load(common: &Common) -> Result<Option<Scenario>, Failure> {
    let Some(path) = &common.config else { return Ok(None) };
    let mut s = Scenario::from_path(path)?;
    if let Some(t) = common.trials {
        if t == 0 {
            return Err(Failure::Config("config error at `--trials`: must be >= 1".into()));
        }
        s.mc.trials = t;
    }
    if let Some(seed) = common.seed {
        s.mc.seed = seed;
    }
    Ok(Some(s))
}

fn require(s: Option<Scenario>) -> Result<Scenario, Failure> {
    s.ok_or_else(|| Failure::Config("config error at `--config`: this command needs a scenario file".into()))
}

fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

/// Returns the rendered output and whether every check passed.
fn run(command: &Command) -> Result<(String, bool), Failure> {
    let (common, default_format) = match command {
        Command::Outage(c) | Command::Antennas(c) | Command::Rate(c) => (c, Format::Csv),
        Command::Validate(c) | Command::Power(c) => (c, Format::Json),
    };
    let format = common.format.unwrap_or(default_format);
    let scenario = load(common)?;
    Ok(match command {
        Command::Outage(_) => (render(&commands::cmd_outage(&require(scenario)?)?, format), true),
        Command::Antennas(_) => (render(&commands::cmd_antennas(&require(scenario)?)?, format), true),
        Command::Rate(_) => (render(&commands::cmd_rate(&require(scenario)?)?, format), true),
        Command::Power(_) => (render(&commands::cmd_power(&require(scenario)?)?, format), true),
        Command::Validate(_) => {
            let mc = match &scenario {
                Some(s) => s.mc,
                None => McSettings {
                    trials: common.trials.unwrap_or(GRID_TRIALS),
                    seed: common.seed.unwrap_or(1),
                },
            };
            let report = commands::cmd_validate(scenario.as_ref(), mc)?;
            let text = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            (text, report.passed)
        }
    })
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("config error at `--out`: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Validation(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Outage(c) | Command::Antennas(c) | Command::Rate(c) | Command::Validate(c) | Command::Power(c) => c,
    };
    let outcome = match common.threads {
        Some(0) => Err(Failure::Config("config error at `--threads`: must be >= 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli.command)),
            Err(e) => Err(Failure::Config(format!("config error at `--threads`: {e}"))),
        },
        None => run(&cli.command),
    };
    let result = outcome.and_then(|(text, passed)| {
        emit(&text, common.out.as_ref())?;
        Ok(passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed: see report");
            ExitCode::from(1)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
