use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use kaleph_core::board::BoardError;
use kaleph_core::certificate::{certify, extract_chain, Variant};
use kaleph_core::engine::{run_game, Decision, StrategyError, TraceHeader, View};
use kaleph_core::{Edge, GameConfig, GameTrace, Player, Strategy, StrategySpec, VertexId};

use crate::commands::{pairing_report, write_file};
use crate::{Failure, InteractiveArgs};

/// Show the live chain every this many Breaker blocks.
const CHAIN_EVERY: u64 = 5;

/// Breaker moves read from a terminal, one edge per line.
pub struct HumanBreaker<R, W> {
    input: R,
    output: W,
    config: GameConfig,
    maker: StrategySpec,
}

impl<R: BufRead, W: Write> HumanBreaker<R, W> {
    pub fn new(input: R, output: W, config: GameConfig, maker: StrategySpec) -> Self {
        HumanBreaker { input, output, config, maker }
    }

    fn live_chain(&self, view: &View<'_>) -> Vec<u64> {
        let trace = GameTrace {
            header: TraceHeader {
                colouring: self.config.colouring.clone(),
                bias: self.config.bias,
                seed: self.config.seed,
                first_player: self.config.first_player,
                horizon: self.config.horizon,
                maker: self.maker,
                breaker: StrategySpec::Human,
            },
            moves: view.ledger.claims().to_vec(),
            annotations: Vec::new(),
        };
        Variant::for_trace(&trace)
            .and_then(|v| extract_chain(&trace, v).ok())
            .map(|c| c.top_clique().iter().map(|v| v.0).collect())
            .unwrap_or_default()
    }

    fn summary(&mut self, view: &View<'_>) -> io::Result<()> {
        let ledger = view.ledger;
        if let Some(c) = ledger.last_claim_by(Player::Maker) {
            writeln!(self.output, "Maker claimed {} at turn {}", c.edge, c.turn)?;
        }
        let maker_edges = ledger.claims().iter().filter(|c| c.player == Player::Maker).count();
        writeln!(
            self.output,
            "Maker edges: {maker_edges}, Maker vertices: {}, Breaker edges: {}",
            ledger.vertices(Player::Maker).len(),
            ledger.len() - maker_edges
        )?;
        if view.block == 1 || view.block.is_multiple_of(CHAIN_EVERY) {
            writeln!(self.output, "Maker's chain: {:?}", self.live_chain(view))?;
        }
        Ok(())
    }
}

/// Reads "u v", "u,v" or "(u,v)".
fn parse_edge(text: &str) -> Result<Edge, String> {
    let numbers: Vec<&str> = text.split(|c: char| !c.is_ascii_digit()).filter(|s| !s.is_empty()).collect();
    let [u, v] = numbers[..] else {
        return Err(format!("expected two vertices like \"3 7\", got {text:?}"));
    };
    let parse = |s: &str| s.parse::<u64>().map(VertexId).map_err(|e| format!("{s}: {e}"));
    Edge::new(parse(u)?, parse(v)?).map_err(|e| e.to_string())
}

impl<R: BufRead, W: Write> Strategy for HumanBreaker<R, W> {
    fn spec(&self) -> StrategySpec {
        StrategySpec::Human
    }

    fn next_moves(&mut self, view: &View<'_>, allowance: u64) -> Result<Decision, StrategyError> {
        let io_err = |e: io::Error| StrategyError::Internal(e.to_string());
        self.summary(view).map_err(io_err)?;
        let mut edges: Vec<Edge> = Vec::new();
        while (edges.len() as u64) < allowance {
            write!(self.output, "block {} edge {}/{allowance}> ", view.block, edges.len() + 1).map_err(io_err)?;
            self.output.flush().map_err(io_err)?;
            let mut line = String::new();
            if self.input.read_line(&mut line).map_err(io_err)? == 0 {
                writeln!(self.output).map_err(io_err)?;
                return Ok(Decision { edges, note: None, stop: true });
            }
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line == "q" || line == "quit" {
                return Ok(Decision { edges, note: None, stop: true });
            }
            let rejection = match parse_edge(line) {
                Err(msg) => Some(msg),
                Ok(e) => match view.ledger.claim_of(e) {
                    Some(c) => Some(BoardError::AlreadyClaimed { edge: e, by: c.player, turn: c.turn }.to_string()),
                    None if edges.contains(&e) => Some(format!("edge {e} already chosen in this block")),
                    None => {
                        edges.push(e);
                        None
                    }
                },
            };
            if let Some(msg) = rejection {
                writeln!(self.output, "{msg}").map_err(io_err)?;
            }
        }
        Ok(Decision::block(edges))
    }
}

/// Plays a session on the given streams and returns the trace.
pub fn session<R: BufRead, W: Write>(
    config: &GameConfig,
    maker: StrategySpec,
    input: R,
    output: W,
) -> Result<GameTrace, Failure> {
    let mut maker_strategy =
        maker.build(&config.colouring, config.seed).map_err(|e| Failure::usage(format!("{}: {e}", maker.name())))?;
    let mut human = HumanBreaker::new(input, output, config.clone(), maker);
    run_game(config, maker_strategy.as_mut(), &mut human).map_err(|e| Failure::fault(e.to_string()))
}

pub fn run(args: &InteractiveArgs) -> Result<(), Failure> {
    let maker = args.game.maker_spec()?;
    let config = args.game.config(args.game.seed)?;
    println!("You are Breaker against {} Maker. Enter edges as \"u v\"; q quits.", maker.name());
    let stdin = io::stdin();
    let trace = session(&config, maker, stdin.lock(), io::stdout())?;

    let path = args.out.clone().unwrap_or_else(|| {
        let name = format!("interactive-{}-seed{}.json", maker.name(), config.seed);
        args.trace_dir.clone().unwrap_or_else(|| PathBuf::from(".")).join(name)
    });
    write_file(&path, &trace.to_json())?;
    println!("trace written to {} ({} moves)", path.display(), trace.moves.len());

    let variant = Variant::for_trace(&trace).expect("Maker strategy");
    let (chain, report) = certify(&trace, variant).map_err(|e| Failure::malformed(e.to_string()))?;
    println!("{} certificate: {}", variant.name(), if report.passed() { "PASS" } else { "FAIL" });
    for level in &chain.levels {
        let clique: Vec<u64> = level.clique.iter().map(|v| v.0).collect();
        println!("  K{}: {:?} ({} witnesses)", level.clique.len(), clique, level.witnesses.len());
    }
    for failure in report.failures() {
        println!("  failed: {failure}");
    }
    if let Some((ok, _)) = pairing_report(&trace)? {
        println!("pairing guarantee: {}", if ok { "holds" } else { "violated" });
    }
    Ok(())
}
