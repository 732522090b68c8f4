use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use charpoly_census::error::CensusError;
use charpoly_census::local::check_feasibility;
use charpoly_census::problem::{
    census_csv, load_problem, render_constant, render_invariants, render_local, render_verify,
    run_census, Problem,
};

/// Counts elements of a maximal order with a prescribed characteristic
/// polynomial and bounded Frobenius norm, and compares the counts against
/// the predicted asymptotic constant.
#[derive(Parser)]
#[command(name = "charpoly-census", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Problem-spec JSON file.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Override the largest grid threshold.
    #[arg(long, global = true)]
    t_max: Option<u64>,
    /// Override the number of grid points.
    #[arg(long, global = true)]
    grid: Option<u32>,
    /// Override the census worker count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// CSV output path for the census command.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the number-field invariants.
    Invariants,
    /// Print one line per relevant prime.
    Local,
    /// Print the asymptotic constant with its component breakdown.
    Constant,
    /// Run the census and write the CSV.
    Census,
    /// Run the census and print the convergence table.
    Verify,
}

fn load(cli: &Cli) -> Result<Problem, CensusError> {
    let path = cli.spec.as_ref().ok_or_else(|| {
        CensusError::reason(
            charpoly_census::error::Reason::SpecParse,
            "--spec <path> is required",
        )
    })?;
    let text = std::fs::read_to_string(path)?;
    let mut problem = load_problem(&text)?;
    if let Some(t) = cli.t_max {
        problem.census_cfg.t_max = BigRational::from(BigInt::from(t));
    }
    if let Some(g) = cli.grid {
        problem.census_cfg.grid_points = g.max(1);
    }
    if let Some(j) = cli.threads {
        problem.census_cfg.threads = j.max(1);
    }
    Ok(problem)
}

fn run(cli: &Cli) -> Result<ExitCode, CensusError> {
    let problem = load(cli)?;
    match cli.command {
        Command::Invariants => {
            print!("{}", render_invariants(&problem));
            Ok(ExitCode::SUCCESS)
        }
        Command::Local => {
            print!("{}", render_local(&problem));
            Ok(ExitCode::SUCCESS)
        }
        Command::Constant => {
            print!("{}", render_constant(&problem)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Census => {
            let (series, constant) = run_census(&problem)?;
            let csv = census_csv(&series, constant.as_ref());
            let path = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("census.csv"));
            std::fs::write(&path, csv)?;
            eprintln!("wrote {}", path.display());
            exit_for_feasibility(&problem)
        }
        Command::Verify => {
            let (series, constant) = run_census(&problem)?;
            if constant.is_some() {
                print!("{}", render_constant(&problem)?);
            }
            print!("{}", render_verify(&series, constant.as_ref()));
            exit_for_feasibility(&problem)
        }
    }
}

fn exit_for_feasibility(problem: &Problem) -> Result<ExitCode, CensusError> {
    match check_feasibility(&problem.profiles) {
        Ok(()) => Ok(ExitCode::SUCCESS),
        Err(err) => {
            // the census itself is still valid (exact zeros): report the
            // reason but keep the artifacts
            eprintln!("error[{}]: {err}", err.reason_code().code());
            Ok(ExitCode::from(err.reason_code().exit_code() as u8))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error[{}]: {err}", err.reason_code().code());
            ExitCode::from(err.reason_code().exit_code() as u8)
        }
    }
}
