//! Command-line front end: factorization, certification, bound tables,
//! length-two proxy scans, and rank experiments, with stable file formats.
//!
//! Exit codes: 0 success, 1 verification/check failure, 2 input parse
//! error, 3 parity or unsupported-parameter error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hyperiso_core::bounds::{bounds_table, phi_table};
use hyperiso_core::experiments::measure_zero_consistency;
use hyperiso_core::factorization::{
    factor_into_k_involutions, verify_raw_factorization, FactorError,
};
use hyperiso_core::json::{
    bounds_csv, phi_csv, to_json_string, FactorizationJson, JsonError, MatrixJson,
};
use hyperiso_core::minkowski::{random_isometry, Orientation, Tolerances};

/// Environment variable overriding the default tolerance when --tol is absent.
const TOL_ENV: &str = "HYPERISO_TOL";

#[derive(Parser)]
#[command(
    name = "hyperiso",
    version,
    about = "Factor isometries of hyperbolic n-space into k-involutions; \
             emit word-length bound tables and tangent-rank experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Factor the isometry in a matrix JSON file into k-involutions
    Factor {
        /// Codimension of the involution factors (1 <= k <= n-1)
        #[arg(long)]
        k: usize,
        /// Input matrix JSON file ({"n": ..., "matrix": [[...], ...]})
        #[arg(long)]
        input: PathBuf,
        /// Reconstruction / membership tolerance (default 1e-8, or $HYPERISO_TOL)
        #[arg(long)]
        tol: Option<f64>,
        /// Write the factorization JSON here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Re-certify a factorization JSON file; exit 0 iff every check passes
    Verify {
        /// Input factorization JSON file
        #[arg(long)]
        input: PathBuf,
        /// Reconstruction / membership tolerance (default 1e-8, or $HYPERISO_TOL)
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Emit the word-length bound table for 2 <= n <= n-max
    Bounds {
        #[arg(long = "n-max")]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Emit the length-two proxy table with normalized ratios
    Phi {
        #[arg(long = "n-max")]
        n_max: usize,
    },
    /// Run product-map rank experiments and emit a rank report
    Rank {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Number of factors; defaults to lower_bound(n,k) - 1
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a seeded random isometry as matrix JSON
    Random {
        #[arg(long)]
        n: usize,
        /// +1 (orientation preserving) or -1 (reversing)
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        orientation: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum CliError {
    /// Exit 1: a verification or consistency check failed.
    Check(String),
    /// Exit 2: unreadable or malformed input.
    Parse(String),
    /// Exit 3: parity obstruction or unsupported parameter.
    Param(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Param(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Check(m) | CliError::Parse(m) | CliError::Param(m) => m,
        }
    }
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<FactorError> for CliError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::ParityObstruction
            | FactorError::UnsupportedK { .. }
            | FactorError::DimensionTooSmall { .. }
            | FactorError::NotAHalfTurn { .. } => CliError::Param(e.to_string()),
            other => CliError::Check(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn resolve_tolerances(flag: Option<f64>) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    let chosen = match flag {
        Some(t) => Some(t),
        None => match std::env::var(TOL_ENV) {
            Ok(raw) => Some(raw.parse::<f64>().map_err(|_| {
                CliError::Parse(format!("{TOL_ENV} must be a float, got {raw:?}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(t) = chosen {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Param(format!(
                "tolerance must be a positive finite float, got {t}"
            )));
        }
        tol.form = t;
        tol.recon = t;
    }
    Ok(tol)
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Factor {
            k,
            input,
            tol,
            output,
        } => {
            let tol = resolve_tolerances(tol)?;
            let text = read_file(&input)?;
            let matrix: MatrixJson =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            let target = matrix.to_isometry(&tol)?;
            let result = factor_into_k_involutions(&target, k, &tol)?;
            let json = to_json_string(&FactorizationJson::from(&result));
            let summary = format!(
                "factored n={} k={}: length {} <= bound {}, residual {:.3e}",
                target.n(),
                k,
                result.length,
                result.bound,
                result.residual
            );
            match output {
                Some(path) => {
                    fs::write(&path, json).map_err(|e| {
                        CliError::Parse(format!("cannot write {}: {e}", path.display()))
                    })?;
                    println!("{summary}");
                }
                None => {
                    println!("{json}");
                    eprintln!("{summary}");
                }
            }
            Ok(())
        }
        Command::Verify { input, tol } => {
            let tol = resolve_tolerances(tol)?;
            let text = read_file(&input)?;
            let parsed: FactorizationJson =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            let raw = parsed.to_raw()?;
            let report = verify_raw_factorization(&raw, &tol);
            print!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Check("verification failed".to_string()))
            }
        }
        Command::Bounds { n_max, format } => {
            let rows = bounds_table(n_max).map_err(|e| CliError::Param(e.to_string()))?;
            match format {
                TableFormat::Csv => print!("{}", bounds_csv(&rows)),
                TableFormat::Json => println!("{}", to_json_string(&rows)),
            }
            Ok(())
        }
        Command::Phi { n_max } => {
            let rows = phi_table(n_max).map_err(|e| CliError::Param(e.to_string()))?;
            print!("{}", phi_csv(&rows));
            Ok(())
        }
        Command::Rank {
            n,
            k,
            m,
            trials,
            seed,
        } => {
            if n < 2 || k == 0 || k > n - 1 {
                return Err(CliError::Param(format!(
                    "need n >= 2 and 1 <= k <= n-1, got n={n}, k={k}"
                )));
            }
            let report = measure_zero_consistency(n, k, trials, seed, m, 1e-8)
                .map_err(|e| CliError::Param(e.to_string()))?;
            if report.vacuous {
                eprintln!("m = 0: the dimension-count statement is vacuous, nothing sampled");
            }
            println!("{}", to_json_string(&report));
            if report.violations.is_empty() {
                Ok(())
            } else {
                Err(CliError::Check(format!(
                    "rank cap violated in trials {:?}",
                    report.violations
                )))
            }
        }
        Command::Random {
            n,
            orientation,
            seed,
        } => {
            if n < 2 {
                return Err(CliError::Param(format!("need n >= 2, got {n}")));
            }
            let orientation = match orientation.as_str() {
                "+1" | "1" => Orientation::Preserving,
                "-1" => Orientation::Reversing,
                other => {
                    return Err(CliError::Parse(format!(
                        "orientation must be +1 or -1, got {other:?}"
                    )))
                }
            };
            let iso = random_isometry(n, orientation, seed);
            println!("{}", to_json_string(&MatrixJson::from_isometry(&iso)));
            Ok(())
        }
    }
}
