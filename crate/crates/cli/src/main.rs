//! `raagham` command-line front end.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use raagham::dynver::DynError;
use raagham::raagwords::RaagError;
use thiserror::Error;

use config::RunConfig;

#[derive(Debug, Error)]
pub enum Exit {
    #[error("verification failed: {0}")]
    Failed(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource cap exceeded: {0}")]
    Cap(String),
}

impl Exit {
    fn code(&self) -> u8 {
        match self {
            Exit::Failed(_) => 1,
            Exit::Invalid(_) => 2,
            Exit::Cap(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "raagham", version, about = "Right-angled Artin groups acting by hamiltonian twists")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Graph file (`vertices <n>`, a names line, `edge <u> <v>` lines).
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Word file; repeat for commands taking two words.
    #[arg(long, global = true)]
    word: Vec<PathBuf>,
    /// Cover graph file.
    #[arg(long, global = true)]
    cover: Option<PathBuf>,
    /// Morphism file (`map <x> <y>` lines) from the cover to the graph.
    #[arg(long, global = true)]
    map: Option<PathBuf>,
    /// Twist power; every N ≥ 2 is allowed.
    #[arg(long = "N", global = true)]
    n: Option<u32>,
    /// Enumeration depth (word length).
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Mollifier parameters, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; without it the primary artifact goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flood-fill grid resolution.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// JSON run configuration supplying defaults for the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    max_sheets: Option<usize>,
    /// Sample count for verification.
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Closed-form twists.
    Closed,
    /// Integrated flows of the twist hamiltonians.
    Integrated,
    /// Integrated flows of the mollified lifted hamiltonians.
    Smoothed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the normal form of a word.
    NormalForm,
    /// Decide whether two words are equal in the group.
    WordEq,
    /// The double of a graph, its projection and the diagonal map.
    Double,
    /// Check that a morphism is an orbi-cover.
    CheckCover,
    /// Search for a planar emulator.
    Emulator,
    /// Euler-count certificate that no planar emulator exists.
    Certificate,
    /// Build the annulus configuration.
    BuildConfig,
    /// Build the twist representation.
    BuildRep,
    /// Orbits of marked points under a word.
    Simulate {
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Route::Closed)]
        route: Route,
    },
    /// Check relators, non-commutation, punctures and Jacobians.
    Verify {
        #[arg(long, value_enum, default_value_t = Route::Closed)]
        route: Route,
    },
    /// Displacement of marked points by short normal forms.
    ProbeFaithful,
    /// Decay of the normalisation scale over the Schottky enumeration.
    LambdaDecay,
    /// Compare mollified and unmollified hamiltonians.
    SmoothStudy,
    /// Product extension to the polydisk and its slice checks.
    Polydisk {
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
}

impl Cli {
    fn run_config(&self) -> Result<RunConfig> {
        let mut rc = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(x) = self.seed {
            rc.seed = x;
        }
        if let Some(x) = self.tol {
            rc.tol = x;
        }
        if self.depth.is_some() {
            rc.depth = self.depth;
        }
        if !self.eps.is_empty() {
            rc.eps = self.eps.clone();
        }
        if let Some(x) = self.n {
            rc.n = x;
        }
        if self.out.is_some() {
            rc.out = self.out.clone();
        }
        if let Some(x) = self.grid {
            rc.grid = x;
        }
        if let Some(x) = self.max_sheets {
            rc.max_sheets = x;
        }
        if let Some(x) = self.samples {
            rc.samples = x;
        }
        rc.validate()?;
        Ok(rc)
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Exit>() {
            return e.code();
        }
        if matches!(cause.downcast_ref::<RaagError>(), Some(RaagError::ResourceCap { .. }))
            || matches!(cause.downcast_ref::<DynError>(), Some(DynError::Raag(RaagError::ResourceCap { .. })))
        {
            return 3;
        }
    }
    2
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("RAAGHAM_THREADS") {
        let n: usize = v.parse().map_err(|_| Exit::Invalid(format!("RAAGHAM_THREADS must be a number, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| cli.run_config()).and_then(|rc| commands::run(&cli, &rc));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
