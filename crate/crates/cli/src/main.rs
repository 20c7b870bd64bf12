use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rdmpanel_cli::commands::{self, StateKind};
use rdmpanel_cli::CmdOutput;

/// Decide whether pure qubit states are fixed by their (n−1)-qubit marginals.
///
/// Exit codes: analyze 0 determined / 10 GHZ-class; reconstruct 0 unique /
/// 10 GHZ family / 20 incompatible; sibling-search 10 found / 0 not found;
/// demo-chi 0 all pass / 1 failure; 2 for any input error.
#[derive(Parser)]
#[command(name = "rdmpanel", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a state and print its certificate and stabilizer dimension.
    Analyze {
        state: PathBuf,
        #[arg(long, default_value_t = rdmpanel::DEFAULT_TOL)]
        tol: f64,
    },
    /// Recover a pure state from a panel file.
    Reconstruct {
        panel: PathBuf,
        #[arg(long, default_value_t = rdmpanel::DEFAULT_TOL)]
        tol: f64,
        /// Write the reconstructed state (or the φ = 0 family member) here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the fidelity of the result with this state.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Search for a panel-sharing sibling over unitaries on qubit 1.
    SiblingSearch {
        state: PathBuf,
        #[arg(long, default_value_t = rdmpanel::oracle::DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = rdmpanel::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the three partial-panel facts about the χ state.
    DemoChi {
        /// Add this amplitude to |0110⟩ first (harness self-check).
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
    },
    /// Write a named state to a file.
    GenState {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the panel of a state file.
    Panel {
        state: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ghz,
    W,
    Zero,
    Haar,
    Chi,
    GhzOrbit,
}

impl From<Kind> for StateKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Ghz => StateKind::Ghz,
            Kind::W => StateKind::W,
            Kind::Zero => StateKind::Zero,
            Kind::Haar => StateKind::Haar,
            Kind::Chi => StateKind::Chi,
            Kind::GhzOrbit => StateKind::GhzOrbit,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out: CmdOutput = match cli.cmd {
        Cmd::Analyze { state, tol } => commands::analyze(&state, tol),
        Cmd::Reconstruct {
            panel,
            tol,
            out,
            reference,
        } => commands::reconstruct_cmd(&panel, tol, out.as_deref(), reference.as_deref()),
        Cmd::SiblingSearch {
            state,
            budget,
            tol,
            seed,
        } => commands::sibling_search(&state, budget, tol, seed),
        Cmd::DemoChi { perturb } => commands::demo_chi(perturb),
        Cmd::GenState { kind, n, seed, out } => commands::gen_state(kind.into(), n, seed, &out),
        Cmd::Panel { state, out } => commands::panel_cmd(&state, &out),
    };
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
