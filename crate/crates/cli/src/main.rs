//! `hs`: validate, evolve and compare α-dissipative Hunter–Saxton scenarios.
//!
//! Exit codes: 0 success, 1 domain/validation failure or a failed
//! inequality, 2 usage or parse error.

use clap::{Parser, Subcommand, ValueEnum};
use hs_cli::commands::{self, CliError, DistanceLevel, Exponent, LipschitzLevel, Outcome, Settings};
use hs_core::metric::W1InfNorm;
use hs_core::Tolerances;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hs", version, about = "Exact α-dissipative Hunter–Saxton solver and metric lab")]
struct Cli {
    /// Scale every tolerance by this factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol: f64,
    /// Include ‖α_A − α_B‖∞ in D.
    #[arg(long, global = true, value_enum, default_value_t = Toggle::On)]
    alpha_term: Toggle,
    /// Norm on W^{1,∞} used by the bounded-Lipschitz distance.
    #[arg(long, global = true, value_enum, default_value_t = W1Inf::Max)]
    w1inf: W1Inf,
    /// Print machine-readable JSON reports.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum W1Inf {
    Max,
    Sum,
}

#[derive(Clone, Copy, ValueEnum)]
enum DLevel {
    #[value(name = "D")]
    D,
    #[value(name = "J")]
    J,
    Dhat,
    Euler,
}

#[derive(Clone, Copy, ValueEnum)]
enum LLevel {
    #[value(name = "D")]
    D,
    Dhat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rate {
    General,
    Constant,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a scenario against the admissibility conditions.
    Validate { file: PathBuf },
    /// Evolve a scenario and write u / cumulative-measure CSVs, atoms and snapshots.
    Solve {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        times: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distance table between two scenarios.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = DLevel::D)]
        level: DLevel,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        times: Vec<f64>,
    },
    /// Check the Lipschitz estimate lhs(t) ≤ e^{rate·t}·rhs(0).
    Lipschitz {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = LLevel::D)]
        level: LLevel,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        times: Vec<f64>,
        /// `constant` uses the 3/2 rate (both α constant).
        #[arg(long, value_enum, default_value_t = Rate::General)]
        rate: Rate,
    },
    /// Reproduce a worked example: exmp1, adiss, alphfn1, nu-invariance.
    Example { name: String },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if !(cli.tol > 0.0) || !cli.tol.is_finite() {
        return Err(CliError::Usage(format!("--tol must be a positive factor, got {}", cli.tol)));
    }
    let s = Settings {
        tol: Tolerances::default().scaled(cli.tol),
        alpha_term: matches!(cli.alpha_term, Toggle::On),
        w1inf: match cli.w1inf {
            W1Inf::Max => W1InfNorm::Max,
            W1Inf::Sum => W1InfNorm::Sum,
        },
    };
    match &cli.cmd {
        Cmd::Validate { file } => commands::validate(file, &s),
        Cmd::Solve { file, times, out } => commands::solve(file, times, out, &s),
        Cmd::Distance { a, b, level, times } => {
            let level = match level {
                DLevel::D => DistanceLevel::D,
                DLevel::J => DistanceLevel::J,
                DLevel::Dhat => DistanceLevel::DHat,
                DLevel::Euler => DistanceLevel::Euler,
            };
            commands::distance(a, b, level, times, &s)
        }
        Cmd::Lipschitz { a, b, level, times, rate } => {
            let level = match level {
                LLevel::D => LipschitzLevel::D,
                LLevel::Dhat => LipschitzLevel::DHat,
            };
            let rate = match rate {
                Rate::General => Exponent::General,
                Rate::Constant => Exponent::Constant,
            };
            commands::lipschitz(a, b, level, rate, times, &s)
        }
        Cmd::Example { name } => commands::example(name, &s),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("report serializes"));
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("hs: {e}");
            ExitCode::from(e.code())
        }
    }
}
