use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use equiblow::commands::{self, bundled_models, corpus_report, models_in, Options};
use equiblow::criteria;
use equiblow::model::{parse_point, parse_rational, Model};
use equiblow::report::Report;
use equiblow::{exit_code, EXIT_PARSE};
use equiblow_core::{Budget, Error, Result};

#[derive(Parser)]
#[command(
    name = "equiblow",
    version,
    about = "Kirwan blowups of torus-equivariant affine schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Maximum Groebner basis size; overrides EQUIBLOW_BUDGET.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Chart path such as `chart_x` or `chart_x/chart_y`.
    #[arg(long, global = true)]
    chart: Option<String>,
    /// Comma-separated rational coordinates.
    #[arg(long, global = true, allow_hyphen_values = true)]
    point: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Blow up along the largest stabilizer, or everything with --full.
    Blowup {
        file: PathBuf,
        #[arg(long)]
        full: bool,
    },
    /// Cohomology of the four-term complex at a point.
    Crit { file: PathBuf },
    /// Stability of a point.
    Semistable { file: PathBuf },
    /// Obstruction to extending a point order by order.
    Obstruction {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        ext_order: usize,
    },
    /// Omega-equivalence of `section` with the differential of `potential`.
    OmegaVerify { file: PathBuf },
    /// Compare the blowup of a family with that of one fiber.
    FiberCheck {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Re-embed with weight-zero coordinates and compare intrinsic ideals.
    Independence {
        file: PathBuf,
        /// `u` or `u=poly`; may be repeated.
        #[arg(long)]
        aux: Vec<String>,
    },
    /// Blow up every model of a directory (default: the bundled corpus) and,
    /// for the bundled corpus, run the acceptance suite.
    Corpus { dir: Option<PathBuf> },
}

fn budget(flag: Option<usize>) -> Result<Budget> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("EQUIBLOW_BUDGET") {
            Ok(v) => Some(v.trim().parse().map_err(|_| Error::Parse {
                pos: 0,
                msg: format!("EQUIBLOW_BUDGET is not a number: `{v}`"),
            })?),
            Err(_) => None,
        },
    };
    Ok(n.map(Budget::with_max_basis).unwrap_or_default())
}

fn run(cli: Cli) -> Result<(Report, bool)> {
    let mut opts = Options {
        budget: budget(cli.budget)?,
        chart: cli.chart.clone(),
        point: cli.point.as_deref().map(parse_point).transpose()?,
        ..Options::default()
    };
    let report = match cli.command {
        Command::Blowup { file, full } => {
            opts.full = full;
            commands::cmd_blowup(&Model::load(&file)?, &opts)?
        }
        Command::Crit { file } => commands::cmd_crit(&Model::load(&file)?, &opts)?,
        Command::Semistable { file } => commands::cmd_semistable(&Model::load(&file)?, &opts)?,
        Command::Obstruction { file, ext_order } => {
            opts.ext_order = Some(ext_order);
            commands::cmd_obstruction(&Model::load(&file)?, &opts)?
        }
        Command::OmegaVerify { file } => commands::cmd_omega_verify(&Model::load(&file)?, &opts)?,
        Command::FiberCheck { file, at } => {
            opts.at = at.as_deref().map(parse_rational).transpose()?;
            commands::cmd_fiber_check(&Model::load(&file)?, &opts)?
        }
        Command::Independence { file, aux } => {
            opts.aux = aux;
            commands::cmd_independence(&Model::load(&file)?, &opts)?
        }
        Command::Corpus { dir } => {
            let models = match &dir {
                Some(d) => models_in(d)?,
                None => bundled_models()?,
            };
            let mut report = corpus_report(&models, opts.budget)?;
            let mut all_pass = true;
            if dir.is_none() {
                for c in criteria::run_all(opts.budget) {
                    all_pass &= c.passed;
                    report.ledger.notes.push(c.line());
                }
            }
            return Ok((report, all_pass));
        }
    };
    Ok((report, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json.clone();
    match run(cli) {
        Ok((report, passed)) => {
            print!("{}", report.to_text());
            if let Some(path) = json {
                if let Err(e) = std::fs::write(&path, report.to_json()) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(EXIT_PARSE as u8);
                }
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: some acceptance criteria failed");
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
