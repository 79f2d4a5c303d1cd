//! `tcsim`: one subcommand per experiment, parameters from TOML run files, CSV and JSON out.
//!
//! Flags given on the command line override the run file, which overrides built-in defaults.
//! Every output file starts with a metadata block (tool version, hash of the resolved
//! parameters and device, seed) and carries no timestamp, so identical runs give identical
//! files regardless of `--jobs`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use tcsim_core::device::{load_device, DeviceGraph};
use tcsim_core::Error;

pub mod commands;
pub mod config;
pub mod output;

use config::{CzMode, ManifoldArg, ParityMode, RunFile};

pub const EXIT_OK: i32 = 0;
/// Anything that is not a typed simulator error.
pub const EXIT_OTHER: i32 = 1;
/// Bad input: config, device or LUT files, parameters outside their domain.
pub const EXIT_VALIDATION: i32 = 2;
/// Numerical failure: no bracket, no convergence, fit failure.
pub const EXIT_NUMERICAL: i32 = 3;
/// A design target outside what the geometry can reach.
pub const EXIT_UNREACHABLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "tcsim",
    version,
    about = "Pulse-level simulation of a tunable-coupler transmon processor"
)]
pub struct Cli {
    /// Device file; the built-in five-qubit reference device when absent.
    #[arg(long, global = true)]
    pub device: Option<PathBuf>,
    /// Run file with shared settings and per-subcommand tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 or absent uses every core.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residual ZZ and exchange couplings versus coupler frequency, with their nulls.
    SweepInteractions {
        /// Restrict to these edges (repeatable).
        #[arg(long)]
        edge: Vec<String>,
    },
    /// Fast-adiabatic CZ: calibrate to 180 degrees or map the landscape.
    Cz {
        #[arg(long, value_enum)]
        mode: Option<CzMode>,
        #[arg(long)]
        edge: Option<String>,
        /// Pulse length, ns.
        #[arg(long, allow_negative_numbers = true)]
        t_p: Option<f64>,
    },
    /// Measurement-induced exchange chevron versus coupler frequency and readout amplitude.
    ReadoutExchange {
        #[arg(long, value_enum)]
        manifold: Option<ManifoldArg>,
        #[arg(long)]
        edge: Option<String>,
        #[arg(long)]
        measured: Option<String>,
    },
    /// Monte Carlo of repeated parity checks next to a spectator.
    Parity {
        #[arg(long, value_enum)]
        mode: Option<ParityMode>,
        #[arg(long)]
        shots: Option<usize>,
        #[arg(long)]
        rounds: Option<usize>,
    },
    /// Geometry search for coupling targets over capacitance lookup tables.
    LutDesign {
        /// Check corner and multilinear exactness of the tables instead of designing.
        #[arg(long)]
        self_test: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SweepInteractions { .. } => "sweep-interactions",
            Command::Cz { .. } => "cz",
            Command::ReadoutExchange { .. } => "readout-exchange",
            Command::Parity { .. } => "parity",
            Command::LutDesign { .. } => "lut-design",
        }
    }
}

/// Settings shared by every subcommand after flags and run file are merged.
#[derive(Debug)]
pub struct Context {
    pub device: DeviceGraph,
    pub out: PathBuf,
    pub seed: u64,
    pub run: RunFile,
}

fn resolve(cli: &Cli) -> anyhow::Result<(Context, usize)> {
    let mut run = match &cli.config {
        Some(p) => RunFile::load(p)?,
        None => RunFile::default(),
    };
    let device = match cli.device.as_ref().or(run.device.as_ref()) {
        Some(p) => {
            let loaded = load_device(p)?;
            for w in &loaded.warnings {
                eprintln!("warning: {}: {w}", p.display());
            }
            loaded.graph
        }
        None => DeviceGraph::reference(),
    };
    let out = cli
        .out
        .clone()
        .or(run.out.take())
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = cli.seed.or(run.seed).unwrap_or(0);
    let jobs = cli.jobs.or(run.jobs).unwrap_or(0);
    apply_flags(&cli.command, &mut run);
    Ok((
        Context {
            device,
            out,
            seed,
            run,
        },
        jobs,
    ))
}

fn apply_flags(command: &Command, run: &mut RunFile) {
    match command {
        Command::SweepInteractions { edge } => {
            if !edge.is_empty() {
                run.sweep_interactions.edges = edge.clone();
            }
        }
        Command::Cz { mode, edge, t_p } => {
            let c = &mut run.cz;
            c.mode = mode.unwrap_or(c.mode);
            c.edge = edge.clone().unwrap_or_else(|| c.edge.clone());
            c.t_p = t_p.unwrap_or(c.t_p);
        }
        Command::ReadoutExchange {
            manifold,
            edge,
            measured,
        } => {
            let c = &mut run.readout_exchange;
            c.manifold = manifold.unwrap_or(c.manifold);
            c.edge = edge.clone().unwrap_or_else(|| c.edge.clone());
            c.measured = measured.clone().unwrap_or_else(|| c.measured.clone());
        }
        Command::Parity {
            mode,
            shots,
            rounds,
        } => {
            let c = &mut run.parity;
            c.mode = mode.unwrap_or(c.mode);
            c.n_shots = shots.unwrap_or(c.n_shots);
            c.n_rounds = rounds.unwrap_or(c.n_rounds);
        }
        Command::LutDesign { self_test } => run.lut_design.self_test |= *self_test,
    }
}

/// Runs one invocation and returns the files it wrote, in order.
pub fn run(cli: &Cli) -> anyhow::Result<Vec<PathBuf>> {
    let (ctx, jobs) = resolve(cli)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(|| match &cli.command {
        Command::SweepInteractions { .. } => commands::sweep::run(&ctx),
        Command::Cz { .. } => commands::cz::run(&ctx),
        Command::ReadoutExchange { .. } => commands::readout::run(&ctx),
        Command::Parity { .. } => commands::parity::run(&ctx),
        Command::LutDesign { .. } => commands::lut::run(&ctx),
    })
}

/// Process exit code for a failed run: the first simulator error in the chain decides.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Unreachable { .. }) => EXIT_UNREACHABLE,
        Some(e) if e.is_validation() => EXIT_VALIDATION,
        Some(_) => EXIT_NUMERICAL,
        None => EXIT_OTHER,
    }
}

/// Entry point shared by the binary and the tests: parses `args`, runs, reports, and returns
/// the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
