//! `mim` — sweeps and verification for the importance-measure toolkit.

use clap::{Args, Parser, Subcommand};
use mim_cli::commands::{self, Family, MaxrateParams, MidfParams, MilcParams, MimParams};
use mim_cli::output::Table;
use mim_cli::verify;

#[derive(Parser)]
#[command(
    name = "mim",
    version,
    about = "Importance-measure toolkit: loss capacity, distortion, constrained bitrate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format for the sweep table
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Significant digits in numeric output
    #[arg(long, default_value_t = 6)]
    precision: usize,
}

#[derive(Args)]
struct SolverArgs {
    /// Iteration cap per optimizer start
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Number of optimizer starts (uniform, vertices, subsets, random)
    #[arg(long, default_value_t = 8)]
    starts: usize,
    /// Seed for the optimizer's random starts
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stationarity tolerance for the projected-gradient stage
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

impl SolverArgs {
    fn options(&self) -> mim_core::OptimizerOptions {
        mim_core::OptimizerOptions {
            max_iters: self.max_iters,
            starts: self.starts,
            seed: self.seed,
            tolerance: self.tolerance,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Loss capacity of the bsc/bec/ksym families, closed form and optionally numeric
    Milc {
        /// Channel family
        #[arg(long, value_enum)]
        family: Family,
        /// Importance coefficient
        #[arg(long)]
        varpi: Option<f64>,
        /// Sweep the coefficient over start:stop:step
        #[arg(long, conflicts_with = "varpi")]
        varpi_grid: Option<String>,
        /// Channel parameter
        #[arg(long)]
        beta: Option<f64>,
        /// Sweep the channel parameter over start:stop:step
        #[arg(long, conflicts_with = "beta")]
        beta_grid: Option<String>,
        /// Alphabet size for the ksym family
        #[arg(long)]
        k: Option<usize>,
        /// Add a numeric-optimizer column
        #[arg(long)]
        numeric: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Distortion function of a Bernoulli source under Hamming distortion
    Midf {
        /// Source parameter p of the Bernoulli(p) source
        #[arg(long)]
        p: f64,
        /// Importance coefficient
        #[arg(long)]
        varpi: Option<f64>,
        /// Sweep the coefficient over start:stop:step
        #[arg(long, conflicts_with = "varpi")]
        varpi_grid: Option<String>,
        /// Distortion budget
        #[arg(long)]
        d: Option<f64>,
        /// Sweep the budget over start:stop:step
        #[arg(long, conflicts_with = "d")]
        d_grid: Option<String>,
        /// Add a numeric-solver column
        #[arg(long)]
        numeric: bool,
        /// Add the Shannon rate-distortion comparison column
        #[arg(long)]
        shannon: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Maximum bitrate under an importance-loss budget
    Maxrate {
        /// Channel family (bsc or bec)
        #[arg(long, value_enum)]
        family: Family,
        /// Importance coefficient
        #[arg(long)]
        varpi: f64,
        /// Channel parameter
        #[arg(long)]
        beta: f64,
        /// Loss budget
        #[arg(long)]
        eps: Option<f64>,
        /// Sweep the budget over start:stop:step
        #[arg(long, conflicts_with = "eps")]
        eps_grid: Option<String>,
        /// Add a numeric-solver column
        #[arg(long)]
        numeric: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Importance measure of a distribution
    Mim {
        /// Comma-separated probability vector, e.g. 0.1,0.9
        #[arg(long)]
        dist: String,
        /// Importance coefficient
        #[arg(long)]
        varpi: Option<f64>,
        /// Sweep the coefficient over start:stop:step
        #[arg(long, conflicts_with = "varpi")]
        varpi_grid: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run oracle and golden-value verification suites
    Verify {
        /// Which suite to run
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        /// Seed for randomized instances
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn emit(table: &Table, out: &OutputArgs) {
    match out.format {
        Format::Csv => print!("{}", table.to_csv(out.precision)),
        Format::Json => println!("{}", table.to_json(out.precision)),
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Milc {
            family,
            varpi,
            varpi_grid,
            beta,
            beta_grid,
            k,
            numeric,
            solver,
            out,
        } => {
            if numeric && varpi == Some(2.0) {
                eprintln!(
                    "warning: varpi = 2 sits on the concavity boundary; the numeric \
                     search may be ill-conditioned there"
                );
            }
            let table = commands::cmd_milc(&MilcParams {
                family,
                varpi,
                varpi_grid,
                beta,
                beta_grid,
                k,
                numeric,
                opts: solver.options(),
            })?;
            emit(&table, &out);
            Ok(0)
        }
        Command::Midf {
            p,
            varpi,
            varpi_grid,
            d,
            d_grid,
            numeric,
            shannon,
            solver,
            out,
        } => {
            let table = commands::cmd_midf(&MidfParams {
                p,
                varpi,
                varpi_grid,
                d,
                d_grid,
                numeric,
                shannon,
                opts: solver.options(),
            })?;
            emit(&table, &out);
            Ok(0)
        }
        Command::Maxrate {
            family,
            varpi,
            beta,
            eps,
            eps_grid,
            numeric,
            solver,
            out,
        } => {
            let table = commands::cmd_maxrate(&MaxrateParams {
                family,
                varpi,
                beta,
                eps,
                eps_grid,
                numeric,
                opts: solver.options(),
            })?;
            emit(&table, &out);
            Ok(0)
        }
        Command::Mim { dist, varpi, varpi_grid, out } => {
            let table = commands::cmd_mim(&MimParams { dist, varpi, varpi_grid })?;
            emit(&table, &out);
            Ok(0)
        }
        Command::Verify { suite, seed, out } => {
            let checks = verify::run(suite, seed);
            let all_passed = checks.iter().all(|c| c.passed);
            match out.format {
                Format::Csv => {
                    for c in &checks {
                        println!(
                            "{} {}.{}: {}",
                            if c.passed { "PASS" } else { "FAIL" },
                            c.suite,
                            c.name,
                            c.detail
                        );
                    }
                    println!(
                        "{}: {}/{} checks passed",
                        if all_passed { "OK" } else { "FAILED" },
                        checks.iter().filter(|c| c.passed).count(),
                        checks.len()
                    );
                }
                Format::Json => {
                    let report: Vec<serde_json::Value> = checks
                        .iter()
                        .map(|c| {
                            serde_json::json!({
                                "suite": c.suite,
                                "check": c.name,
                                "passed": c.passed,
                                "detail": c.detail,
                            })
                        })
                        .collect();
                    let doc = serde_json::json!({ "passed": all_passed, "checks": report });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
                }
            }
            Ok(if all_passed { 0 } else { 1 })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}
