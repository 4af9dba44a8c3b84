//! `kolyvagin`: batch JSON front end and property-suite runner.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or parse error, 3 hypothesis violation.

mod commands;
mod oracle;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use kolyvagin_core::error::Error;
use kolyvagin_core::stark::DatumJson;
use kolyvagin_core::suite::{SuiteConfig, SUITES};

#[derive(Parser)]
#[command(
    name = "kolyvagin",
    version,
    about = "Group-ring ideals, Stickelberger elements, Kolyvagin and Stark systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON input: a file path or an inline JSON document.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Write the report here instead of stdout; with --oracle, the fixture directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true)]
    p: Option<u64>,
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long = "pool-max", global = true)]
    pool_max: Option<usize>,
    /// Regenerate the fixtures for this command from brute-force oracles.
    #[arg(long, global = true)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Fitting ideals, annihilator and characteristic ideal of a presented module.
    Ideal,
    /// θ_m, its odd character values with the Bernoulli cross-check, and the L-element.
    Stickelberger,
    /// Kolyvagin classes and Θ ideals of the Stickelberger Euler system.
    Kolyvagin,
    /// All Stark-system checks on one Selmer datum (the toy datum by default).
    Stark,
    /// Run named property suites.
    Suite {
        #[arg(required = true, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        names: Vec<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ideal => "ideal",
            Command::Stickelberger => "stickelberger",
            Command::Kolyvagin => "kolyvagin",
            Command::Stark => "stark",
            Command::Suite { .. } => "suite",
        }
    }
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn read_input(raw: &str) -> Result<Value, Error> {
    let text = if raw.trim_start().starts_with(['{', '[']) {
        raw.to_string()
    } else {
        std::fs::read_to_string(raw).map_err(|e| Error::Parse(format!("{raw}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Hypothesis(_) | Error::NotIntegral(_) | Error::NotFixed(_) => 3,
        Error::Invalid(_) | Error::Parse(_) | Error::RingMismatch(_) => 2,
    }
}

fn run(cli: &Cli) -> Result<commands::Outcome, Error> {
    let input = cli.input.as_deref().map(read_input).transpose()?;
    let empty = json!({});
    match &cli.command {
        Command::Ideal => {
            let v = input
                .as_ref()
                .ok_or_else(|| Error::Parse("ideal needs --input".into()))?;
            commands::ideal(v)
        }
        Command::Stickelberger => {
            let v = input
                .as_ref()
                .ok_or_else(|| Error::Parse("stickelberger needs --input".into()))?;
            commands::stickelberger(v, cli.p, cli.n)
        }
        Command::Kolyvagin => {
            commands::kolyvagin(input.as_ref().unwrap_or(&empty), cli.p, cli.n, cli.pool_max)
        }
        Command::Stark => commands::stark(
            input.as_ref(),
            cli.p.unwrap_or(3),
            cli.n.unwrap_or(2),
            cli.pool_max.unwrap_or(2),
        ),
        Command::Suite { names } => {
            let datum = match &input {
                Some(v) => Some(
                    serde_json::from_value::<DatumJson>(v.clone())
                        .map_err(|e| Error::Parse(e.to_string()))?,
                ),
                None => None,
            };
            let defaults = SuiteConfig::default();
            let cfg = SuiteConfig {
                seed: cli.seed,
                p: cli.p.unwrap_or(defaults.p),
                n: cli.n.unwrap_or(defaults.n),
                pool_max: cli.pool_max.unwrap_or(defaults.pool_max),
                datum,
            };
            commands::suite(names, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.oracle {
        let dir = cli.output.clone().unwrap_or_else(fixture_dir);
        return match oracle::write(&dir, cli.command.name()) {
            Ok(files) => {
                println!("{}", json!({"written": files}));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}", json!({"error": "io", "message": e.to_string()}));
                ExitCode::from(2)
            }
        };
    }
    match run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.report).expect("report serializes") + "\n";
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("{}", json!({"error": "io", "message": e.to_string()}));
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let kind = if exit_code(&e) == 3 {
                "hypothesis"
            } else {
                "usage"
            };
            eprintln!("{}", json!({"error": kind, "message": e.to_string()}));
            ExitCode::from(exit_code(&e))
        }
    }
}
