//! `graphon-ldp <subcommand> --config <path> [--out <dir>] [--threads <k>]`
//!
//! Exit codes: 0 success, 2 usage error or unknown subcommand, 3 malformed
//! config, 4 missing file, 5 failure during the run, 6 cannot write output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use error::CliError;
use output::Output;

#[derive(Parser)]
#[command(name = "graphon-ldp", version = output::VERSION, about = "Reproducible graphon LDP experiments")]
struct Cli {
    #[command(subcommand)]
    command: RunCommand,
}

#[derive(Subcommand)]
enum RunCommand {
    /// Sample W-random graphs to CSV.
    Sample(Args),
    /// Exact and heuristic cut / inf-one distances between two kernels.
    Norms(Args),
    /// Cut-distance ladder of W-random graphs.
    Lln(Args),
    /// Cut-distance ladder of sparse graphs with alpha_n = n^(-a).
    SparseLln(Args),
    /// Integrate the networked dynamics.
    Simulate(Args),
    /// Distance of finite-n dynamics to a continuum reference.
    Continuum(Args),
    /// Ratio of trajectory distance to input distance, in batches.
    Continuity(Args),
    /// Importance-sampled rare-event ladder with exact checks at n <= 3.
    LdpMc(Args),
    /// Rate-function tables.
    Rate(Args),
    /// Staircase bijections and their convergence diagnostics.
    Staircase(Args),
    /// Penalized search for the dynamical rate function.
    Dynrate(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `out`).
    #[arg(long, env = "GRAPHON_LDP_OUT")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<NonZeroUsize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sample,
    Norms,
    Lln,
    SparseLln,
    Simulate,
    Continuum,
    Continuity,
    LdpMc,
    Rate,
    Staircase,
    Dynrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Norms => "norms",
            Command::Lln => "lln",
            Command::SparseLln => "sparse-lln",
            Command::Simulate => "simulate",
            Command::Continuum => "continuum",
            Command::Continuity => "continuity",
            Command::LdpMc => "ldp-mc",
            Command::Rate => "rate",
            Command::Staircase => "staircase",
            Command::Dynrate => "dynrate",
        }
    }
}

impl RunCommand {
    fn split(self) -> (Command, Args) {
        match self {
            RunCommand::Sample(a) => (Command::Sample, a),
            RunCommand::Norms(a) => (Command::Norms, a),
            RunCommand::Lln(a) => (Command::Lln, a),
            RunCommand::SparseLln(a) => (Command::SparseLln, a),
            RunCommand::Simulate(a) => (Command::Simulate, a),
            RunCommand::Continuum(a) => (Command::Continuum, a),
            RunCommand::Continuity(a) => (Command::Continuity, a),
            RunCommand::LdpMc(a) => (Command::LdpMc, a),
            RunCommand::Rate(a) => (Command::Rate, a),
            RunCommand::Staircase(a) => (Command::Staircase, a),
            RunCommand::Dynrate(a) => (Command::Dynrate, a),
        }
    }
}

fn run(cmd: Command, args: Args) -> Result<PathBuf, CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    cfg.validate(cmd)?;
    let dir = args.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
    let mut out = Output::create(&dir)?;
    let work = |out: &mut Output| match cmd {
        Command::Sample => commands::sample(&cfg, out),
        Command::Norms => commands::norms(&cfg, out),
        Command::Lln => commands::lln(&cfg, out),
        Command::SparseLln => commands::sparse_lln(&cfg, out),
        Command::Simulate => commands::simulate(&cfg, out),
        Command::Continuum => commands::continuum(&cfg, out),
        Command::Continuity => commands::continuity(&cfg, out),
        Command::LdpMc => commands::ldp_mc(&cfg, out),
        Command::Rate => commands::rate(&cfg, out),
        Command::Staircase => commands::staircase(&cfg, out),
        Command::Dynrate => commands::dynrate(&cfg, out),
    };
    match args.threads {
        Some(k) => graphon_ldp::exec::with_threads(k.get(), || work(&mut out))??,
        None => work(&mut out)?,
    }
    out.finish(cmd.name(), &cfg)
}

fn main() -> ExitCode {
    let (cmd, args) = Cli::parse().command.split();
    match run(cmd, args) {
        Ok(manifest) => {
            println!("wrote {}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("graphon-ldp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
