use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evoform::report::{emit, emit_record, Format};
use evoform::run;
use evoform::scenario::Overrides;
use evoform::CliError;

#[derive(Parser)]
#[command(
    name = "evoform",
    version,
    about = "Closure, degeneracy and classification analysis of evolutionary forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json or text.
    #[arg(long, default_value = "json")]
    format: String,
    /// Extra directory searched for scenarios by name.
    #[arg(long)]
    scenario_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Verdict, degeneracy cascade and classification of a scenario.
    Analyze {
        /// Scenario file, or the name of a bundled / user scenario.
        scenario: String,
        #[command(flatten)]
        common: Common,
        /// Closure tolerance override.
        #[arg(long)]
        tol: Option<f64>,
        /// Seed override for random sample plans.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write every traced node as CSV.
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Sample-based check that a form is closed.
    CheckClosure {
        scenario: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Look up one cell of the classification table.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        p: i64,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[command(flatten)]
        common: Common,
    },
    /// List bundled and user scenarios.
    Scenarios {
        #[command(flatten)]
        common: Common,
    },
}

fn deliver(doc: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, doc).map_err(|e| CliError::Write {
            path: path.to_path_buf(),
            reason: e.to_string(),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(doc.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Write {
                    path: "<stdout>".into(),
                    reason: e.to_string(),
                })
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            scenario,
            common,
            tol,
            seed,
            traces,
        } => {
            let format: Format = common.format.parse()?;
            let r = run::load(
                &scenario,
                common.scenario_dir.as_deref(),
                Overrides { tol, seed },
            )?;
            let a = run::analyze(&r)?;
            if let Some(path) = traces {
                let file = std::fs::File::create(&path).map_err(|e| CliError::Write {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
                run::write_traces(file, &a.pseudostructures, r.chart.dimension()).map_err(|e| {
                    CliError::Write {
                        path,
                        reason: e.to_string(),
                    }
                })?;
            }
            deliver(&emit(&a.report, format), common.out.as_deref())
        }
        Command::CheckClosure {
            scenario,
            common,
            tol,
            seed,
        } => {
            let format: Format = common.format.parse()?;
            let r = run::load(
                &scenario,
                common.scenario_dir.as_deref(),
                Overrides { tol, seed },
            )?;
            let report = run::check_closure(&r)?;
            deliver(&emit(&report, format), common.out.as_deref())
        }
        Command::Classify { p, k, n, common } => {
            let format: Format = common.format.parse()?;
            let rec = run::classify(p, k, n)?;
            deliver(&emit_record(&rec, format), common.out.as_deref())
        }
        Command::Scenarios { common } => {
            let format: Format = common.format.parse()?;
            let list = run::scenarios(common.scenario_dir.as_deref())?;
            deliver(&run::render_scenarios(&list, format), common.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    // clap would exit 2 on usage errors, which is taken by missing inputs.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("evoform: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
