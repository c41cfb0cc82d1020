use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use projlab::families::ValidationOptions;
use projlab::lp::Mode;
use projlab::shell::{self, Analysis, Codim, Outcome, ProblemFile, Store};
use projlab::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum OutArg {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "projlab", version, about = "Exact projection constants in l1^N and C[0,1]")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, global = true, value_enum, default_value = "json")]
    out: OutArg,
    /// Result cache directory.
    #[arg(long, global = true, env = "PROJLAB_STORE")]
    store: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analyses listed in the problem file.
    Run { problem: PathBuf },
    Solve { problem: PathBuf },
    Probe { problem: PathBuf },
    DupScan { problem: PathBuf },
    Coding { problem: PathBuf },
    Obstruct { problem: PathBuf },
    Ladder { problem: PathBuf },
    Synth { problem: PathBuf },
    BetaTable {
        #[arg(long, default_value_t = 20)]
        max_n: u64,
    },
    FindTarget {
        lambda: String,
        #[arg(long, default_value = "auto")]
        codim: String,
    },
    FamilyValidate {
        name: String,
        /// Registry JSON file; the built-in registry by default.
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long)]
        no_probe: bool,
    },
}

fn pretty<T: serde::Serialize>(t: &T) -> String {
    serde_json::to_string_pretty(t).expect("serializable")
}

fn run_problem(cli: &Cli, path: &Path, only: Option<Analysis>) -> Result<i32> {
    let mut p: ProblemFile = shell::load_problem(path)?;
    if let Some(a) = only {
        p.analyses = vec![a];
    }
    let mode = match cli.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    };
    let store = cli.store.as_ref().map(Store::open).transpose()?;
    let out = shell::run(&p, mode, store.as_ref())?;
    if cli.out == OutArg::Csv {
        let Some(Outcome::Ok(v)) = out.record.get(Analysis::DupScan) else {
            return Err(Error::Domain("csv output is available for exact dup-scan only".into()));
        };
        let scan = serde_json::from_value(v.clone())
            .map_err(|_| Error::Domain("csv output is available for exact dup-scan only".into()))?;
        print!("{}", shell::scan_csv(&scan)?);
    } else {
        println!("{}", out.json);
    }
    Ok(out.record.exit_code())
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Run { problem } => run_problem(cli, problem, None),
        Command::Solve { problem } => run_problem(cli, problem, Some(Analysis::Solve)),
        Command::Probe { problem } => run_problem(cli, problem, Some(Analysis::Probe)),
        Command::DupScan { problem } => run_problem(cli, problem, Some(Analysis::DupScan)),
        Command::Coding { problem } => run_problem(cli, problem, Some(Analysis::Coding)),
        Command::Obstruct { problem } => run_problem(cli, problem, Some(Analysis::Obstruct)),
        Command::Ladder { problem } => run_problem(cli, problem, Some(Analysis::Ladder)),
        Command::Synth { problem } => run_problem(cli, problem, Some(Analysis::Synth)),
        Command::BetaTable { max_n } => {
            match cli.out {
                OutArg::Csv => print!("{}", shell::emit_beta_table(*max_n)?),
                OutArg::Json => println!("{}", pretty(&shell::beta_table(*max_n)?)),
            }
            Ok(0)
        }
        Command::FindTarget { lambda, codim } => {
            let lambda: Rational = lambda.parse()?;
            let report = shell::find_target(&lambda, codim.parse::<Codim>()?)?;
            println!("{}", pretty(&report));
            Ok(0)
        }
        Command::FamilyValidate {
            name,
            registry,
            no_probe,
        } => {
            let entries = registry.as_deref().map(shell::load_registry).transpose()?;
            let opts = ValidationOptions {
                probe_uniqueness: !no_probe,
                ..Default::default()
            };
            let report = shell::family_validate(name, entries.as_deref(), &opts)?;
            println!("{}", pretty(&report));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("projlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
