//! `kaleph`: play, replay and certify Maker-Breaker clique games.

mod commands;
mod interactive;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kaleph_core::maker::ColourSequence;
use kaleph_core::{BiasSchedule, Colouring, GameConfig, Player, StrategySpec};

/// Error carrying the process exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }

    pub fn fault(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }

    pub fn malformed(message: impl Into<String>) -> Failure {
        Failure { code: 3, message: message.into() }
    }

    pub fn uncertified(message: impl Into<String>) -> Failure {
        Failure { code: 4, message: message.into() }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Failure {
        Failure::usage(format!("{}: {err}", path.display()))
    }
}

#[derive(Parser)]
#[command(name = "kaleph", version, about = "Maker-Breaker clique games on the infinite complete graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game, or a batch with --games.
    Play(PlayArgs),
    /// Check a trace file move by move.
    Replay { trace: PathBuf },
    /// Extract and verify the clique-chain certificate of a trace.
    Certify(CertifyArgs),
    /// Write the chain-length growth curve of a trace as CSV.
    Metrics {
        trace: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play Breaker by hand against a Maker strategy.
    Interactive(InteractiveArgs),
}

#[derive(Args, Clone)]
pub struct GameArgs {
    #[arg(long, default_value_t = 100)]
    pub horizon: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "maker", value_parser = parse_player)]
    pub first: Player,
    /// unit, k:<n>, ceillog2 or linear:<n>
    #[arg(long, default_value = "unit", value_parser = parse_bias)]
    pub bias: BiasSchedule,
    /// modk:<k> or diagonal; defaults to modk:<k> for finite-colours and diagonal otherwise
    #[arg(long, value_parser = parse_colouring)]
    pub colouring: Option<Colouring>,
    /// Number of colours for finite-colours
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value = "vanilla")]
    pub maker: String,
}

impl GameArgs {
    pub fn maker_spec(&self) -> Result<StrategySpec, Failure> {
        let spec = StrategySpec::parse(&self.maker, self.k, ColourSequence::AntiDiagonal).map_err(Failure::usage)?;
        if !spec.is_maker() {
            return Err(Failure::usage(format!("{} is not a Maker strategy", self.maker)));
        }
        Ok(spec)
    }

    pub fn config(&self, seed: u64) -> Result<GameConfig, Failure> {
        let colouring = match (&self.colouring, self.maker_spec()?) {
            (Some(c), _) => c.clone(),
            (None, StrategySpec::FiniteColours { k }) => Colouring::ModK { k },
            (None, _) => Colouring::Diagonal,
        };
        GameConfig::new(self.first, self.horizon, colouring, self.bias, seed).map_err(|e| Failure::usage(e.to_string()))
    }
}

#[derive(Args)]
pub struct PlayArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value = "passive")]
    pub breaker: String,
    /// Trace file, or output directory when playing several games
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of games, with seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    pub games: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, env = "KALEPH_TRACE_DIR", hide_env_values = true)]
    pub trace_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct CertifyArgs {
    pub trace: PathBuf,
    /// vanilla, finite-colours or infinite-colours; defaults to the trace's Maker
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub k: Option<u64>,
    /// Report file; printed to stdout otherwise
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct InteractiveArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "KALEPH_TRACE_DIR", hide_env_values = true)]
    pub trace_dir: Option<PathBuf>,
}

fn parse_player(s: &str) -> Result<Player, String> {
    match s {
        "maker" | "M" => Ok(Player::Maker),
        "breaker" | "B" => Ok(Player::Breaker),
        _ => Err(format!("expected maker or breaker, got {s:?}")),
    }
}

fn parse_bias(s: &str) -> Result<BiasSchedule, String> {
    s.parse()
}

fn parse_colouring(s: &str) -> Result<Colouring, String> {
    if s == "diagonal" {
        return Ok(Colouring::Diagonal);
    }
    let k = s
        .strip_prefix("modk:")
        .and_then(|k| k.parse::<u64>().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| format!("expected modk:<k> with k >= 1 or diagonal, got {s:?}"))?;
    Ok(Colouring::ModK { k })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Play(args) => commands::play(&args),
        Command::Replay { trace } => commands::replay(&trace),
        Command::Certify(args) => commands::certify(&args),
        Command::Metrics { trace, out } => commands::metrics(&trace, out.as_deref()),
        Command::Interactive(args) => interactive::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("kaleph: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
