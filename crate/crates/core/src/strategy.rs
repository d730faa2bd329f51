//! Serializable strategy descriptions, so a trace header records exactly
//! which players produced it and they can be rebuilt for audits.

use serde::{Deserialize, Serialize};

use crate::board::Colouring;
use crate::breaker::{GreedyBlocker, PairingBreaker, PassiveBreaker, RandomBreaker, UnboundedBiasBreaker};
use crate::engine::{run_game, EngineError, GameConfig, GameTrace, Strategy, StrategyError};
use crate::maker::{ColourSequence, FiniteColoursMaker, InfiniteColoursMaker, VanillaMaker};

pub const DEFAULT_PASSIVE_OFFSET: u64 = 1000;
pub const DEFAULT_RANDOM_WINDOW: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum StrategySpec {
    Vanilla,
    FiniteColours {
        k: u64,
    },
    InfiniteColours {
        sequence: ColourSequence,
    },
    Pairing,
    UnboundedBias,
    Passive {
        offset: u64,
    },
    Random {
        window: u64,
    },
    GreedyBlocker,
    /// Moves typed in at the terminal.
    Human,
}

impl StrategySpec {
    pub fn name(&self) -> &'static str {
        match self {
            StrategySpec::Vanilla => "vanilla",
            StrategySpec::FiniteColours { .. } => "finite-colours",
            StrategySpec::InfiniteColours { .. } => "infinite-colours",
            StrategySpec::Pairing => "pairing",
            StrategySpec::UnboundedBias => "unbounded-bias",
            StrategySpec::Passive { .. } => "passive",
            StrategySpec::Random { .. } => "random",
            StrategySpec::GreedyBlocker => "greedy-blocker",
            StrategySpec::Human => "human",
        }
    }

    pub fn is_maker(&self) -> bool {
        matches!(
            self,
            StrategySpec::Vanilla | StrategySpec::FiniteColours { .. } | StrategySpec::InfiniteColours { .. }
        )
    }

    /// Parses a CLI name; `k` and `sequence` fill in Maker parameters.
    pub fn parse(name: &str, k: Option<u64>, sequence: ColourSequence) -> Result<StrategySpec, String> {
        Ok(match name {
            "vanilla" => StrategySpec::Vanilla,
            "finite-colours" => StrategySpec::FiniteColours { k: k.ok_or("finite-colours needs --k")? },
            "infinite-colours" => StrategySpec::InfiniteColours { sequence },
            "pairing" => StrategySpec::Pairing,
            "unbounded-bias" => StrategySpec::UnboundedBias,
            "passive" => StrategySpec::Passive { offset: DEFAULT_PASSIVE_OFFSET },
            "random" => StrategySpec::Random { window: DEFAULT_RANDOM_WINDOW },
            "greedy-blocker" => StrategySpec::GreedyBlocker,
            other => return Err(format!("unknown strategy {other:?}")),
        })
    }

    /// Instantiates the strategy for a game on `colouring` with `seed`.
    pub fn build(&self, colouring: &Colouring, seed: u64) -> Result<Box<dyn Strategy>, StrategyError> {
        Ok(match *self {
            StrategySpec::Vanilla => Box::new(VanillaMaker::new()),
            StrategySpec::FiniteColours { k } => Box::new(FiniteColoursMaker::new(k, colouring)?),
            StrategySpec::InfiniteColours { sequence } => Box::new(InfiniteColoursMaker::new(sequence, colouring)?),
            StrategySpec::Pairing => Box::new(PairingBreaker::new(colouring)?),
            StrategySpec::UnboundedBias => Box::new(UnboundedBiasBreaker::new()),
            StrategySpec::Passive { offset } => Box::new(PassiveBreaker::new(offset)),
            StrategySpec::Random { window } => Box::new(RandomBreaker::new(seed, window)),
            StrategySpec::GreedyBlocker => Box::new(GreedyBlocker::new()),
            StrategySpec::Human => return Err(StrategyError::Unsupported("human moves cannot be rebuilt".into())),
        })
    }
}

/// Builds both strategies for `config` and plays the game.
pub fn play(config: &GameConfig, maker: StrategySpec, breaker: StrategySpec) -> Result<GameTrace, EngineError> {
    let build = |spec: StrategySpec| {
        spec.build(&config.colouring, config.seed).map_err(|e| EngineError::Config(format!("{}: {e}", spec.name())))
    };
    let mut m = build(maker)?;
    let mut b = build(breaker)?;
    run_game(config, m.as_mut(), b.as_mut())
}
