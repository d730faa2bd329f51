//! Alternating-turn game loop, bias schedules, trace recording and replay.
//!
//! A game is truncated after `horizon` Maker moves. Every Maker move is
//! followed by one Breaker block whose size comes from the bias schedule;
//! when Breaker opens, one extra block precedes Maker's first move.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{BoardError, Claim, ClaimLedger, Colouring, Edge, Player, VertexId};
use crate::strategy::StrategySpec;

/// How many edges Breaker claims on his `t`-th block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BiasSchedule {
    Unit,
    Constant {
        k: u64,
    },
    /// `⌈log₂(t + 2)⌉`
    CeilLog2,
    /// `slope · t`
    Linear {
        slope: u64,
    },
}

impl BiasSchedule {
    /// Allowance for the `breaker_turn`-th block (1-based).
    pub fn allowance(self, breaker_turn: u64) -> u64 {
        let t = breaker_turn.max(1);
        match self {
            BiasSchedule::Unit => 1,
            BiasSchedule::Constant { k } => k.max(1),
            BiasSchedule::CeilLog2 => {
                let x = t + 2;
                // ⌈log₂ x⌉ for x >= 2
                (u64::BITS - (x - 1).leading_zeros()) as u64
            }
            BiasSchedule::Linear { slope } => slope.max(1).saturating_mul(t),
        }
    }

    /// The `k` by which a fixed-bias certificate widens its candidate sets.
    pub fn fixed_k(self) -> Option<u64> {
        match self {
            BiasSchedule::Unit => Some(1),
            BiasSchedule::Constant { k } => Some(k.max(1)),
            _ => None,
        }
    }
}

impl FromStr for BiasSchedule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_pos = |v: &str| match v.parse::<u64>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("expected a positive integer, got {v:?}")),
        };
        match s {
            "unit" => Ok(BiasSchedule::Unit),
            "ceillog2" => Ok(BiasSchedule::CeilLog2),
            _ => match s.split_once(':') {
                Some(("k", v)) => Ok(BiasSchedule::Constant { k: parse_pos(v)? }),
                Some(("linear", v)) => Ok(BiasSchedule::Linear { slope: parse_pos(v)? }),
                _ => Err(format!("unknown bias {s:?} (unit | k:<n> | ceillog2 | linear:<n>)")),
            },
        }
    }
}

impl fmt::Display for BiasSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BiasSchedule::Unit => f.write_str("unit"),
            BiasSchedule::Constant { k } => write!(f, "k:{k}"),
            BiasSchedule::CeilLog2 => f.write_str("ceillog2"),
            BiasSchedule::Linear { slope } => write!(f, "linear:{slope}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub first_player: Player,
    pub horizon: u64,
    pub colouring: Colouring,
    pub bias: BiasSchedule,
    pub seed: u64,
}

impl GameConfig {
    pub fn new(
        first_player: Player,
        horizon: u64,
        colouring: Colouring,
        bias: BiasSchedule,
        seed: u64,
    ) -> Result<GameConfig, EngineError> {
        let cfg = GameConfig { first_player, horizon, colouring, bias, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Maker first, unit bias, diagonal colouring, seed 0.
    pub fn standard(horizon: u64) -> Result<GameConfig, EngineError> {
        GameConfig::new(Player::Maker, horizon, Colouring::Diagonal, BiasSchedule::Unit, 0)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.horizon == 0 {
            return Err(EngineError::Config("horizon must be at least 1".into()));
        }
        self.colouring.validate().map_err(|e| EngineError::Config(e.to_string()))
    }
}

/// Which branch of a strategy produced a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// First Maker move on two fresh vertices.
    Opening,
    /// Joined the newest vertex to an earlier one.
    Connect,
    /// Introduced a fresh vertex joined to `v_1`.
    Fresh,
    /// Every candidate was Breaker-blocked; introduced a fresh vertex instead.
    Fallback,
    Human,
}

/// Per-Maker-move bookkeeping written alongside the trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub turn: u64,
    pub rule: Rule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_size: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_size: Option<u64>,
    /// Position of the chosen candidate in the strategy's preference order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u64>,
    /// Vertices introduced by this move, in introduction order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub introduced: Vec<VertexId>,
}

impl Annotation {
    pub fn new(rule: Rule) -> Annotation {
        Annotation { turn: 0, rule, f_size: None, k_size: None, rank: None, introduced: Vec::new() }
    }
}

/// A strategy's answer for one block.
#[derive(Debug, Clone, Default)]
pub struct Decision {
    pub edges: Vec<Edge>,
    pub note: Option<Annotation>,
    /// End the game after these edges (interactive quit). Allows a short block.
    pub stop: bool,
}

impl Decision {
    pub fn single(edge: Edge, note: Annotation) -> Decision {
        Decision { edges: vec![edge], note: Some(note), stop: false }
    }

    pub fn block(edges: Vec<Edge>) -> Decision {
        Decision { edges, note: None, stop: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("internal consistency fault: {0}")]
    Internal(String),
}

/// What a strategy is allowed to see when asked for a block.
pub struct View<'a> {
    pub ledger: &'a ClaimLedger,
    pub colouring: &'a Colouring,
    /// 1-based index of the current block for the player being asked.
    pub block: u64,
}

/// A player. Implementations must be deterministic in (view, own state, seed).
pub trait Strategy {
    fn spec(&self) -> StrategySpec;

    /// Up to `allowance` distinct unclaimed edges; exactly `allowance` unless stopping.
    fn next_moves(&mut self, view: &View<'_>, allowance: u64) -> Result<Decision, StrategyError>;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid game configuration: {0}")]
    Config(String),
    #[error("strategy {strategy} faulted at turn {turn}: {reason}")]
    StrategyFault { strategy: String, turn: u64, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub colouring: Colouring,
    pub bias: BiasSchedule,
    pub seed: u64,
    pub first_player: Player,
    pub horizon: u64,
    pub maker: StrategySpec,
    pub breaker: StrategySpec,
}

impl TraceHeader {
    pub fn config(&self) -> GameConfig {
        GameConfig {
            first_player: self.first_player,
            horizon: self.horizon,
            colouring: self.colouring.clone(),
            bias: self.bias,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameTrace {
    pub header: TraceHeader,
    pub moves: Vec<Claim>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("malformed trace: {0}")]
    Malformed(String),
    #[error("illegal move at turn {turn}: {source}")]
    Illegal { turn: u64, source: BoardError },
    #[error("alternation violated at turn {turn}: expected {expected}, found {found}")]
    Alternation { turn: u64, expected: String, found: Player },
}

impl GameTrace {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serialization is infallible");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<GameTrace, ReplayError> {
        serde_json::from_str(text).map_err(|e| ReplayError::Malformed(e.to_string()))
    }

    pub fn maker_moves(&self) -> impl Iterator<Item = &Claim> {
        self.moves.iter().filter(|c| c.player == Player::Maker)
    }

    pub fn count_rule(&self, rule: Rule) -> usize {
        self.annotations.iter().filter(|a| a.rule == rule).count()
    }

    /// The trace cut after its `maker_moves`-th Maker move and the Breaker
    /// block answering it.
    pub fn prefix(&self, maker_moves: u64) -> GameTrace {
        let mut seen = 0;
        let mut end = self.moves.len();
        for (i, c) in self.moves.iter().enumerate() {
            if c.player == Player::Maker {
                if seen == maker_moves {
                    end = i;
                    break;
                }
                seen += 1;
            }
        }
        let moves = self.moves[..end].to_vec();
        let last_turn = moves.last().map_or(0, |c| c.turn);
        let annotations = self.annotations.iter().filter(|a| a.turn <= last_turn).cloned().collect();
        let mut header = self.header.clone();
        header.horizon = header.horizon.min(maker_moves.max(1));
        GameTrace { header, moves, annotations }
    }
}

/// Which player owns each turn, as dictated by first player and bias.
struct Schedule {
    bias: BiasSchedule,
    horizon: u64,
    maker_moves: u64,
    breaker_blocks: u64,
    remaining_in_block: u64,
    next: Option<Player>,
}

impl Schedule {
    fn new(config: &GameConfig) -> Schedule {
        let mut s = Schedule {
            bias: config.bias,
            horizon: config.horizon,
            maker_moves: 0,
            breaker_blocks: 0,
            remaining_in_block: 0,
            next: Some(Player::Maker),
        };
        if config.first_player == Player::Breaker {
            s.open_breaker_block();
        }
        s
    }

    fn open_breaker_block(&mut self) {
        self.breaker_blocks += 1;
        self.remaining_in_block = self.bias.allowance(self.breaker_blocks);
        self.next = Some(Player::Breaker);
    }

    fn advance(&mut self) -> Option<Player> {
        let current = self.next?;
        match current {
            Player::Maker => {
                self.maker_moves += 1;
                self.open_breaker_block();
            }
            Player::Breaker => {
                self.remaining_in_block -= 1;
                if self.remaining_in_block == 0 {
                    self.next = if self.maker_moves < self.horizon { Some(Player::Maker) } else { None };
                }
            }
        }
        Some(current)
    }
}

/// Plays `config.horizon` Maker moves, each answered by a Breaker block.
pub fn run_game(
    config: &GameConfig,
    maker: &mut dyn Strategy,
    breaker: &mut dyn Strategy,
) -> Result<GameTrace, EngineError> {
    config.validate()?;
    let mut ledger = ClaimLedger::new();
    let mut annotations = Vec::new();
    let mut breaker_blocks = 0u64;
    let mut maker_moves = 0u64;

    let mut stopped = false;
    if config.first_player == Player::Breaker {
        breaker_blocks += 1;
        let a = config.bias.allowance(breaker_blocks);
        stopped = play_block(config, Player::Breaker, breaker, breaker_blocks, a, &mut ledger, &mut annotations)?;
    }
    while !stopped && maker_moves < config.horizon {
        maker_moves += 1;
        stopped = play_block(config, Player::Maker, maker, maker_moves, 1, &mut ledger, &mut annotations)?;
        if stopped {
            break;
        }
        breaker_blocks += 1;
        let a = config.bias.allowance(breaker_blocks);
        stopped = play_block(config, Player::Breaker, breaker, breaker_blocks, a, &mut ledger, &mut annotations)?;
    }

    Ok(GameTrace {
        header: TraceHeader {
            colouring: config.colouring.clone(),
            bias: config.bias,
            seed: config.seed,
            first_player: config.first_player,
            horizon: config.horizon,
            maker: maker.spec(),
            breaker: breaker.spec(),
        },
        moves: ledger.claims().to_vec(),
        annotations,
    })
}

/// Asks `strategy` for one block and applies it. Returns whether it asked to stop.
fn play_block(
    config: &GameConfig,
    who: Player,
    strategy: &mut dyn Strategy,
    block: u64,
    allowance: u64,
    ledger: &mut ClaimLedger,
    annotations: &mut Vec<Annotation>,
) -> Result<bool, EngineError> {
    let turn = ledger.last_turn() + 1;
    let view = View { ledger, colouring: &config.colouring, block };
    let decision = match strategy.next_moves(&view, allowance) {
        Ok(d) => d,
        Err(e) => return Err(fault(who, strategy, turn, e.to_string())),
    };
    let n = decision.edges.len() as u64;
    if n > allowance || (!decision.stop && n < allowance) {
        return Err(fault(who, strategy, turn, format!("returned {n} edges with allowance {allowance}")));
    }
    for &e in &decision.edges {
        if let Err(err) = ledger.push(e, who) {
            let turn = ledger.last_turn() + 1;
            return Err(fault(who, strategy, turn, err.to_string()));
        }
    }
    if let Some(mut note) = decision.note {
        note.turn = turn;
        annotations.push(note);
    }
    Ok(decision.stop)
}

fn fault(who: Player, strategy: &dyn Strategy, turn: u64, reason: String) -> EngineError {
    EngineError::StrategyFault { strategy: strategy_label(who, strategy), turn, reason }
}

fn strategy_label(who: Player, strategy: &dyn Strategy) -> String {
    format!("{} ({})", strategy.spec().name(), who)
}

/// Rebuilds the final ledger, enforcing turn numbering, legality and the
/// alternation schedule. A trace may stop anywhere inside the schedule.
pub fn replay(trace: &GameTrace) -> Result<ClaimLedger, ReplayError> {
    let config = trace.header.config();
    config.validate().map_err(|e| ReplayError::Malformed(e.to_string()))?;
    let mut schedule = Schedule::new(&config);
    let mut ledger = ClaimLedger::new();
    for claim in &trace.moves {
        let expected = schedule.advance();
        if expected != Some(claim.player) {
            return Err(ReplayError::Alternation {
                turn: claim.turn,
                expected: expected.map_or("end of game".to_string(), |p| p.to_string()),
                found: claim.player,
            });
        }
        ledger
            .claim(claim.edge, claim.player, claim.turn)
            .map_err(|source| ReplayError::Illegal { turn: claim.turn, source })?;
    }
    Ok(ledger)
}

/// Builds a ledger from the moves in file order, renumbering turns and
/// ignoring the schedule. Only double claims are rejected.
pub fn ledger_from_moves(moves: &[Claim]) -> Result<ClaimLedger, ReplayError> {
    let mut ledger = ClaimLedger::new();
    for claim in moves {
        ledger.push(claim.edge, claim.player).map_err(|source| ReplayError::Illegal { turn: claim.turn, source })?;
    }
    Ok(ledger)
}

/// Whether turn numbers are `1, 2, 3, …` and players follow the schedule.
pub fn schedule_conforms(trace: &GameTrace) -> bool {
    let config = trace.header.config();
    if config.validate().is_err() {
        return false;
    }
    let mut schedule = Schedule::new(&config);
    trace.moves.iter().enumerate().all(|(i, c)| c.turn == i as u64 + 1 && schedule.advance() == Some(c.player))
}
