//! `lcl`: round elimination, simulation and verification from the shell.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error or missing file,
//! 3 size guard exceeded.

mod cmd;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lcl_core::{Mode, Error};
use lcl_sim::Topology;

#[derive(Parser)]
#[command(name = "lcl", version, about = "Round elimination and distributed simulation for LCL problems")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Size guard for materialized sets (default: LCL_GUARD, else 2^20).
    #[arg(long, global = true)]
    pub guard: Option<u128>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// The operation's own output.
    Text,
    /// `key: value` summary lines.
    Report,
}

#[derive(Subcommand)]
pub enum Command {
    /// Parse a problem and print it canonically.
    Parse { problem: PathBuf },
    /// Report diagnostics; fails on errors.
    Validate { problem: PathBuf },
    /// Print a built-in problem (trivial, two-coloring, copy).
    Catalog {
        name: String,
        #[arg(long, default_value_t = 3)]
        delta: usize,
    },
    /// Compile a general LCL into a node-edge-checkable problem.
    Compile { general: PathBuf },
    /// Lift a solution of a general LCL to its compiled problem.
    Lift { general: PathBuf, graph: PathBuf, labeling: PathBuf },
    /// Project a solution of the compiled problem back to the general LCL.
    Project { general: PathBuf, graph: PathBuf, labeling: PathBuf },
    Re { problem: PathBuf },
    Rere { problem: PathBuf },
    /// rere(re(problem)).
    SpeedupProblem { problem: PathBuf },
    /// Apply the speedup operator repeatedly.
    Iterate {
        problem: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Failure-probability budget of one randomized speedup step.
    Budget {
        #[arg(long)]
        delta: u32,
        #[arg(long = "T")]
        horizon: u32,
        #[arg(long)]
        sin: u64,
        #[arg(long)]
        sout: u64,
        /// Output labels of re(problem) (default 2^sout).
        #[arg(long)]
        sre: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        log2p: f64,
        /// Check the side conditions at this n.
        #[arg(long)]
        n: Option<f64>,
    },
    /// Derive the one-round-faster algorithm for speedup-problem(PROBLEM).
    DeriveSpeedup {
        algorithm: PathBuf,
        problem: PathBuf,
        /// Tabulate on the views of these graphs instead of all views.
        #[arg(long)]
        on: Vec<PathBuf>,
    },
    /// Derive the one-round-slower algorithm for PROBLEM.
    DeriveSlowdown {
        /// Table or zero-round (`zr`) algorithm for speedup-problem(PROBLEM).
        algorithm: PathBuf,
        problem: PathBuf,
        /// Mode for zero-round files.
        #[arg(long, default_value_t = Mode::PortNumbering)]
        mode: Mode,
        #[arg(long)]
        on: Vec<PathBuf>,
    },
    /// Search for a zero-round algorithm.
    ZeroRound { problem: PathBuf },
    /// Fix an order-invariant algorithm's view of n to n0.
    Lock {
        algorithm: PathBuf,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        n0: Option<usize>,
        /// Checking radius of the target problem.
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Generate a random tree or forest.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, default_value = "tree")]
        topology: Topology,
        /// One label for fixed inputs, several for uniform ones.
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
        /// Permute each node's ports.
        #[arg(long)]
        shuffle: bool,
    },
    /// Assign identifiers.
    Ids {
        graph: PathBuf,
        #[arg(long, default_value_t = Mode::DeterministicId)]
        mode: Mode,
        /// Identifiers are drawn below n^k.
        #[arg(long, default_value_t = 3)]
        k: u32,
    },
    /// Run a LOCAL algorithm.
    Run {
        algorithm: PathBuf,
        graph: PathBuf,
        /// The node count the algorithm is told (default: the real one).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Check a labeling against a problem.
    Verify {
        problem: PathBuf,
        graph: PathBuf,
        labeling: PathBuf,
        /// PROBLEM is a general LCL.
        #[arg(long)]
        general: bool,
        /// Exit 1 when violations are found.
        #[arg(long)]
        strict: bool,
    },
    /// Remap identifiers keeping their order.
    Remap { graph: PathBuf },
    #[command(subcommand)]
    Volume(VolumeCommand),
    #[command(subcommand)]
    Grid(GridCommand),
    /// Speedup, zero-round search, slowdown, lock, simulate and verify.
    Pipeline {
        problem: PathBuf,
        /// One-round algorithm to start from (default: first allowed output).
        #[arg(long)]
        algorithm: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        remaps: usize,
        #[arg(long)]
        n0: Option<usize>,
        /// Exit 1 when violations or remap mismatches occur.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Subcommand)]
pub enum VolumeCommand {
    /// Answer queries by scanning balls.
    Run {
        algorithm: PathBuf,
        graph: PathBuf,
        /// Answer a single half-edge `node:port` and print the transcript.
        #[arg(long)]
        query: Option<String>,
        #[arg(long)]
        delta: Option<usize>,
        /// Run order-invariantly as if the graph had n0 nodes.
        #[arg(long)]
        lock: Option<usize>,
    },
    /// Ramsey parameters for the VOLUME speedup.
    Params {
        #[arg(long)]
        tau: u64,
        #[arg(long)]
        delta: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        sin: u64,
        #[arg(long)]
        sout: u64,
    },
}

#[derive(Subcommand)]
pub enum GridCommand {
    /// Generate an oriented grid.
    Gen {
        #[arg(long, value_delimiter = ',', required = true)]
        sides: Vec<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// No wraparound.
        #[arg(long)]
        open: bool,
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
    },
    /// Assign per-dimension identifiers.
    Ids {
        grid: PathBuf,
        #[arg(long, default_value_t = 3)]
        c: u32,
    },
    /// Combine identifier tuples into single identifiers.
    Combine {
        grid: PathBuf,
        ids: PathBuf,
        #[arg(long, default_value_t = 3)]
        c: u32,
    },
    /// Run a LOCAL algorithm in PROD-LOCAL.
    Run {
        algorithm: PathBuf,
        grid: PathBuf,
        #[arg(long)]
        ids: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        c: u32,
        /// Replace identifiers by the orientation order.
        #[arg(long, conflicts_with = "ids")]
        orientation_lock: bool,
    },
    /// Ramsey parameters for the grid speedup.
    Params {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        sin: u64,
        #[arg(long)]
        sout: u64,
    },
}

pub enum Failure {
    Usage(String),
    Domain(Error),
    /// Output was produced but the command still fails with this code.
    Partial(cmd::Output, u8),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut ctx = cmd::Ctx::new(cli.seed, cli.guard.unwrap_or_else(lcl_roundelim::operators::default_guard));
    let name = cmd::name(&cli.command);
    let (out, code) = match cmd::dispatch(&cli.command, &mut ctx) {
        Ok(out) => (Some(out), 0),
        Err(Failure::Partial(out, code)) => (Some(out), code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            (None, 2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            (None, if e.is_guard() { 3 } else { 1 })
        }
    };
    match cli.format {
        Format::Text => {
            if let Some(out) = &out {
                print!("{}", out.body);
            }
        }
        Format::Report => {
            let outcome = match (&out, code) {
                (Some(o), _) => o.outcome.clone(),
                (None, 3) => "guard-exceeded".into(),
                (None, 2) => "usage-error".into(),
                (None, _) => "error".into(),
            };
            println!("command: {name}");
            println!("inputs: {}", ctx.digest());
            println!("seed: {}", cli.seed);
            println!("outcome: {outcome}");
            println!("exit: {code}");
            if let Some(out) = &out {
                for (k, v) in &out.counters {
                    println!("{k}: {v}");
                }
            }
            println!("wall_ms: {}", start.elapsed().as_millis());
        }
    }
    ExitCode::from(code)
}
