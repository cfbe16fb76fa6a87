//! `cliffsym`: model → find → minimize → exploit → verify, plus benchmarks.
//!
//! Every stage reads JSON from `--input` (or stdin) and writes JSON to
//! `--out` (or stdout), so stages can be piped together.

mod bench;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cliffsym::bench::PeakAlloc;

#[global_allocator]
static ALLOC: PeakAlloc = PeakAlloc::new();

#[derive(Parser, Debug)]
#[command(name = "cliffsym", version, about = "Find, minimize and exploit Clifford symmetries of Pauli sums")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Read from this file instead of stdin.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Dependency-circuit policy: fundamental | bounded:L | short:L | none.
    #[arg(long, global = true, default_value = "short:3")]
    pub circuits: String,
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub budget_nodes: u64,
    #[arg(long, global = true, default_value_t = 300.0)]
    pub budget_seconds: f64,
    /// Coefficient comparison tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest Hilbert-space dimension for dense checks.
    #[arg(long, global = true, default_value_t = 1 << 12)]
    pub dense_cap: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Emit a model Hamiltonian.
    Model(commands::ModelArgs),
    /// Search for verified Clifford symmetries.
    Find(commands::FindArgs),
    /// Minimize the qubit cost of every found symmetry.
    Minimize,
    /// Split the Hamiltonian into effective sector Hamiltonians.
    Exploit(commands::ExploitArgs),
    /// Check every artifact in a pipeline document.
    Verify(commands::VerifyArgs),
    /// Time plain and symmetry-exploiting solvers; prints CSV.
    Bench(bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Model(a) => commands::model(&cli.common, a),
        Cmd::Find(a) => commands::find(&cli.common, a),
        Cmd::Minimize => commands::minimize(&cli.common),
        Cmd::Exploit(a) => commands::exploit(&cli.common, a),
        Cmd::Verify(a) => commands::verify(&cli.common, a),
        Cmd::Bench(a) => bench::run(&cli.common, a, &ALLOC),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
