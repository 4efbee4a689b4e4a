//! The `chanwit` command line: compute channel utilities from JSON specs,
//! run closed-form-vs-oracle verification sweeps, and emit figure datasets.
//!
//! Exit codes: 0 on success, 1 on a verification failure, 2 on input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chanwit::oracle::OracleConfig;
use chanwit_cli::{figure_csv, run_utility, run_verify, Family, FigureId, Mode};

#[derive(Parser)]
#[command(
    name = "chanwit",
    version,
    about = "Communication utility of quantum channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute U(C, g) for a channel and a game given as JSON files.
    Utility {
        /// Channel spec, e.g. {"kind":"ampdamp","params":{"eta":0.5}}
        #[arg(long)]
        channel: PathBuf,
        /// Game spec, e.g. {"g":[[0.5,0],[0,0.5]]}
        #[arg(long)]
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// See-saw restarts (oracle modes).
        #[arg(long)]
        restarts: Option<usize>,
        /// RNG seed; falls back to CHANWIT_SEED, then a fixed default.
        #[arg(long)]
        seed: Option<u64>,
        /// Base resolution of the qubit grid oracle.
        #[arg(long)]
        grid: Option<usize>,
        /// Write the JSON result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare closed forms against the numerical oracles over a family
    /// sweep; prints a CSV report and fails on any mismatch.
    Verify {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a figure dataset as CSV.
    Figure {
        #[arg(long = "figure", value_enum)]
        figure: FigureArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Closedform,
    Oracle,
    Verify,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Auto => Mode::Auto,
            ModeArg::Closedform => Mode::Closedform,
            ModeArg::Oracle => Mode::Oracle,
            ModeArg::Verify => Mode::Verify,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Pauli,
    Ampdamp,
    Shifted,
    Cloning,
    Depolarizing,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Pauli => Family::Pauli,
            FamilyArg::Ampdamp => Family::Ampdamp,
            FamilyArg::Shifted => Family::Shifted,
            FamilyArg::Cloning => Family::Cloning,
            FamilyArg::Depolarizing => Family::Depolarizing,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Ampdamp,
    Cloning,
}

impl From<FigureArg> for FigureId {
    fn from(f: FigureArg) -> FigureId {
        match f {
            FigureArg::Ampdamp => FigureId::Ampdamp,
            FigureArg::Cloning => FigureId::Cloning,
        }
    }
}

fn oracle_config(restarts: Option<usize>, seed: Option<u64>, grid: Option<usize>) -> OracleConfig {
    let mut cfg = OracleConfig::default();
    if let Some(r) = restarts {
        cfg.restarts = r.max(1);
    }
    if let Some(s) = seed {
        cfg.seed = s;
    } else if let Ok(env_seed) = std::env::var("CHANWIT_SEED") {
        if let Ok(s) = env_seed.parse() {
            cfg.seed = s;
        }
    }
    if let Some(g) = grid {
        cfg.grid_points = g.max(8);
    }
    cfg
}

fn emit(text: &str, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Utility {
            channel,
            game,
            mode,
            restarts,
            seed,
            grid,
            out,
        } => {
            let cfg = oracle_config(restarts, seed, grid);
            let channel_text = fs::read_to_string(&channel)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", channel.display()))?;
            let game_text = fs::read_to_string(&game)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", game.display()))?;
            let ch = chanwit::jsonio::parse_channel(&channel_text)?;
            let g = chanwit::jsonio::parse_game(&game_text)?;
            let outcome = run_utility(&ch, &g, mode.into(), &cfg)?;
            let mut text = serde_json::to_string_pretty(&outcome.document)?;
            text.push('\n');
            emit(&text, out.as_ref())?;
            Ok(if outcome.verify_failed { 1 } else { 0 })
        }
        Command::Verify {
            family,
            restarts,
            seed,
            grid,
            out,
        } => {
            let cfg = oracle_config(restarts, seed, grid);
            let outcome = run_verify(family.into(), &cfg)?;
            emit(&outcome.csv, out.as_ref())?;
            if outcome.failures > 0 {
                eprintln!("{} verification failure(s)", outcome.failures);
                Ok(1)
            } else {
                Ok(0)
            }
        }
        Command::Figure { figure, out } => {
            let csv = figure_csv(figure.into())?;
            emit(&csv, out.as_ref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
