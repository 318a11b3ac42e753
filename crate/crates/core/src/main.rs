use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mcg_orbits::cli::{self, BoundsQuery, CliError, Command, ProblemConfig, Report};
use mcg_orbits::orbit::Group;

#[derive(Parser)]
#[command(name = "mcg-orbits", version, about = "Mapping class group orbits of surface group representations")]
struct Cli {
    /// Process a JSONL file of configs, appending results to --out.
    #[arg(long, value_name = "IN", requires = "out")]
    seed_sweep: Option<PathBuf>,
    #[arg(long, value_name = "OUT")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Args)]
struct ConfigArg {
    /// Path to a JSON problem config, or `-` for stdin.
    config: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the relator and report basic properties.
    Validate(ConfigArg),
    /// Apply a mapping class word such as "t1 t3^-1 s2".
    Act {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        word: Option<String>,
    },
    /// Enumerate the orbit of the conjugacy class.
    Orbit {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        group: Option<Group>,
        #[arg(long)]
        cap: Option<usize>,
        /// Expand frontier batches on all cores.
        #[arg(long)]
        parallel: bool,
    },
    /// Decide whether the orbit is finite and report bounds.
    Classify {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        search_cap: Option<usize>,
    },
    /// Evaluate an orbit-size bound formula.
    Bounds {
        #[arg(long, value_parser = ["scalar", "b1", "b2", "expected"])]
        kind: String,
        #[arg(long = "N")]
        order: Option<u64>,
        #[arg(long)]
        g: Option<u64>,
        #[arg(long)]
        n1: Option<u64>,
        #[arg(long)]
        n2: Option<u64>,
        #[arg(long)]
        n_rho: Option<u64>,
        #[arg(long)]
        n_prime: Option<u64>,
    },
    /// Run structural consistency checks.
    Selftest,
}

fn load(path: &PathBuf) -> Result<ProblemConfig, CliError> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(path)?
    };
    ProblemConfig::from_str(&text)
}

fn need(v: Option<u64>, name: &str) -> Result<u64, CliError> {
    v.ok_or_else(|| CliError::Config(format!("--{name} is required")))
}

fn dispatch(cmd: Cmd) -> Result<Report, CliError> {
    match cmd {
        Cmd::Validate(c) => cli::run(&Command::Validate, &load(&c.config)?),
        Cmd::Act { config, word } => cli::run(&Command::Act { word }, &load(&config.config)?),
        Cmd::Orbit {
            config,
            group,
            cap,
            parallel,
        } => cli::run(
            &Command::Orbit {
                group,
                cap,
                parallel,
            },
            &load(&config.config)?,
        ),
        Cmd::Classify { config, search_cap } => {
            cli::run(&Command::Classify { search_cap }, &load(&config.config)?)
        }
        Cmd::Bounds {
            kind,
            order,
            g,
            n1,
            n2,
            n_rho,
            n_prime,
        } => {
            let q = match kind.as_str() {
                "scalar" => BoundsQuery::Scalar {
                    order: need(order, "N")?,
                    g: need(g, "g")?,
                },
                "b1" => BoundsQuery::B1 {
                    n1: need(n1, "n1")?,
                    n2: need(n2, "n2")?,
                    n_rho: need(n_rho, "n-rho")?,
                    g: need(g, "g")?,
                },
                "b2" => BoundsQuery::B2 {
                    order: need(order, "N")?,
                    n_prime: need(n_prime, "n-prime")?,
                    n2: need(n2, "n2")?,
                },
                _ => BoundsQuery::Expected {
                    order: need(order, "N")?,
                    n_prime: need(n_prime, "n-prime")?,
                },
            };
            cli::run_bounds(&q)
        }
        Cmd::Selftest => {
            let r = cli::selftest()?;
            Ok(Report {
                exit_code: if r.passed { cli::EXIT_OK } else { cli::EXIT_ERROR },
                body: serde_json::to_value(r)?,
            })
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let report = match (args.seed_sweep, args.out, args.command) {
        (Some(input), Some(out), None) => cli::report_or_error(
            cli::sweep(&input, &out).map(|k| Report {
                body: json!({ "processed": k }),
                exit_code: cli::EXIT_OK,
            }),
        ),
        (None, _, Some(cmd)) => cli::report_or_error(dispatch(cmd)),
        _ => Report {
            body: json!({ "error": "give a subcommand or --seed-sweep IN --out OUT" }),
            exit_code: cli::EXIT_INVALID,
        },
    };
    println!("{}", serde_json::to_string_pretty(&report.body).expect("json"));
    ExitCode::from(report.exit_code as u8)
}
