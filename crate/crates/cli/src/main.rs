use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use curvature_kit::checks::{is_check, list_checks, run_check, CheckError};
use curvature_kit::smoothing::{profile_by_name, profile_table_csv};
use serde::Serialize;
use serde_json::{Map, Value};

/// Verification suites for positively curved metrics on vector bundles.
#[derive(Parser)]
#[command(name = "curvkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named check and write a JSON report.
    Verify {
        check: String,
        #[arg(long)]
        config: PathBuf,
        /// Report path; stdout when absent from both the flag and the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the registered checks.
    List,
    /// Print a CSV table of a radial profile and its first three derivatives.
    ExportProfile {
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 100)]
        grid: usize,
    },
}

#[derive(Serialize)]
struct Report<'a> {
    check: &'a str,
    passed: bool,
    details: Value,
    seed: u64,
    tolerances: Value,
    duration: f64,
}

struct ConfigError(String);

impl From<CheckError> for ConfigError {
    fn from(e: CheckError) -> Self {
        ConfigError(e.to_string())
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for c in list_checks() {
                println!("{:<28} {}", c.name, c.description);
            }
            ExitCode::SUCCESS
        }
        Command::ExportProfile { profile, grid } => {
            match profile_by_name(&profile).and_then(|g| profile_table_csv(&g, grid)) {
                Ok(csv) => {
                    print!("{csv}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: profile: {e}");
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        }
        Command::Verify { check, config, out, seed } => match verify(&check, &config, out, seed) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(EXIT_FAIL),
            Err(ConfigError(msg)) => {
                eprintln!("error: {msg}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}

fn take_field(map: &mut Map<String, Value>, key: &str) -> Option<Value> {
    map.remove(key).filter(|v| !v.is_null())
}

fn verify(check: &str, config: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<bool, ConfigError> {
    if !is_check(check) {
        return Err(ConfigError(format!("unknown check `{check}` (see `curvkit list`)")));
    }
    let text = std::fs::read_to_string(config)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", config.display())))?;
    let mut map = match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => m,
        Ok(_) => return Err(ConfigError("config: expected a JSON object".into())),
        Err(e) => return Err(ConfigError(format!("config: {e}"))),
    };
    match take_field(&mut map, "check") {
        Some(Value::String(name)) if name == check => {}
        Some(Value::String(name)) => {
            return Err(ConfigError(format!("field `check`: config names `{name}` but `{check}` was requested")))
        }
        Some(_) => return Err(ConfigError("field `check`: expected a string".into())),
        None => return Err(ConfigError("field `check`: missing".into())),
    }
    let cfg_seed = match take_field(&mut map, "seed") {
        Some(v) => Some(v.as_u64().ok_or_else(|| ConfigError("field `seed`: expected a non-negative integer".into()))?),
        None => None,
    };
    let cfg_out = match take_field(&mut map, "out") {
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(ConfigError("field `out`: expected a path string".into())),
        None => None,
    };
    let seed = seed.or(cfg_seed).unwrap_or(0);
    let out = out.or(cfg_out);

    let start = Instant::now();
    let outcome = run_check(check, Value::Object(map), seed)?;
    let report = Report {
        check,
        passed: outcome.passed,
        details: outcome.details,
        seed,
        tolerances: outcome.tolerances,
        duration: start.elapsed().as_secs_f64(),
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    match out {
        Some(path) => std::fs::write(&path, json)
            .map_err(|e| ConfigError(format!("field `out`: cannot write {}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    Ok(report.passed)
}
