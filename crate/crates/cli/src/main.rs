mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use landau_core::landau::Chart;
use landau_core::solver::SolveConfig;
use landau_core::Error;

const DEFAULT_SEED: u64 = 20240501;

#[derive(Parser, Debug)]
#[command(name = "landau", version, about = "Landau singularities, Q-regularization and Hopf-algebraic renormalization")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Loop and external momentum on every edge.
    Route { graph: PathBuf },
    /// First Symanzik polynomial, checked against the loop determinant.
    Symanzik { graph: PathBuf },
    /// Superficial degree of divergence of the graph and its 1PI loop subgraphs.
    PowerCount { graph: PathBuf },
    /// Generate, verify and solve Landau systems.
    #[command(subcommand)]
    Landau(LandauCommand),
    /// Diagonalizing bases, regulators A(t) and the regularized forms.
    Regularize {
        input: PathBuf,
        /// Parameter point the regulator is adapted to.
        #[arg(long)]
        at: Option<String>,
    },
    /// Coproduct or antipode in the Hopf algebra of 1PI graphs.
    Hopf {
        #[arg(value_parser = ["coproduct", "antipode"])]
        operation: String,
        graph: PathBuf,
    },
    /// Birkhoff decomposition of a character.
    Renorm {
        graph: PathBuf,
        #[arg(long)]
        character: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
    },
    /// Print a built-in example; without a name, list them.
    Examples {
        name: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Re-run the command recorded in a report and compare byte for byte.
    Replay { report: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum LandauCommand {
    /// Emit the Landau system of a graph or quadric file.
    Gen {
        input: PathBuf,
        #[arg(long, default_value = "projective", value_parser = parse_chart)]
        chart: Chart,
    },
    /// Residuals of a witness file against a system.
    Verify {
        system: PathBuf,
        witness: PathBuf,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Search for a witness at one parameter point.
    Member {
        input: PathBuf,
        #[arg(long)]
        at: String,
        /// Chart used when the input is a graph or quadric file.
        #[arg(long, default_value = "projective", value_parser = parse_chart)]
        chart: Chart,
        /// Exit with status 4 unless the point is a member.
        #[arg(long, value_parser = ["member"])]
        expect: Option<String>,
        /// Write the first witness here.
        #[arg(long)]
        witness_out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Membership over a grid of parameter points.
    Scan {
        input: PathBuf,
        #[arg(long)]
        grid: String,
        #[arg(long, default_value = "projective", value_parser = parse_chart)]
        chart: Chart,
        #[command(flatten)]
        solver: SolverFlags,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SolverFlags {
    /// Solver configuration as JSON; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub redraws: Option<u32>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Search every branch instead of stopping at the first witness.
    #[arg(long)]
    pub exhaustive: bool,
}

impl SolverFlags {
    pub fn apply(&self, mut cfg: SolveConfig) -> SolveConfig {
        if let Some(s) = self.starts {
            cfg.starts = s;
        }
        if let Some(r) = self.redraws {
            cfg.redraws = r;
        }
        if let Some(m) = self.max_iters {
            cfg.max_iters = m;
        }
        if let Some(t) = self.tau {
            cfg.tau = t;
        }
        cfg.exhaustive |= self.exhaustive;
        cfg
    }
}

fn parse_chart(s: &str) -> Result<Chart, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parse and validation problems exit with 2, violated preconditions with 3.
pub fn exit_status(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::Symbolic(_)
        | Error::Invalid(_)
        | Error::UnknownEdge(_)
        | Error::UnknownVertex(_)
        | Error::NotSymmetric(..) => 2,
        Error::Disconnected | Error::NotOnePi | Error::Precondition(_) | Error::Scheme(_) | Error::NoPhysicalLimit(_) => 3,
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match commands::run(&cli, &args, true) {
        Ok(out) => {
            for (path, text) in &out.files {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            print!("{}", out.text);
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_status(&e))
        }
    }
}
