use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kaleph_core::breaker::PairingTable;
use kaleph_core::certificate::{certify as certify_trace, extract_chain, pairing_guarantee_check, Variant};
use kaleph_core::engine::{self, ledger_from_moves, EngineError};
use kaleph_core::maker::ColourSequence;
use kaleph_core::{GameConfig, GameTrace, Player, StrategySpec};
use rayon::prelude::*;

use crate::{CertifyArgs, Failure, PlayArgs};

pub fn load_trace(path: &Path) -> Result<GameTrace, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    GameTrace::from_json(&text).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

pub fn chain_length(trace: &GameTrace) -> usize {
    Variant::for_trace(trace).and_then(|v| extract_chain(trace, v).ok()).map_or(0, |c| c.len())
}

fn engine_failure(err: EngineError) -> Failure {
    match err {
        EngineError::Config(msg) => Failure::usage(msg),
        fault @ EngineError::StrategyFault { .. } => Failure::fault(fault.to_string()),
    }
}

fn trace_name(maker: StrategySpec, breaker: StrategySpec, seed: u64) -> String {
    format!("{}-vs-{}-seed{seed}.json", maker.name(), breaker.name())
}

fn summary(trace: &GameTrace) -> String {
    format!(
        "horizon {}, maker edges {}, chain length {}",
        trace.header.horizon,
        trace.maker_moves().count(),
        chain_length(trace)
    )
}

pub fn play(args: &PlayArgs) -> Result<(), Failure> {
    let maker = args.game.maker_spec()?;
    let breaker = StrategySpec::parse(&args.breaker, None, ColourSequence::AntiDiagonal).map_err(Failure::usage)?;
    if breaker.is_maker() {
        return Err(Failure::usage(format!("{} is not a Breaker strategy", args.breaker)));
    }
    if args.games == 0 || args.jobs == 0 {
        return Err(Failure::usage("--games and --jobs must be at least 1"));
    }
    let configs: Vec<GameConfig> =
        (0..args.games).map(|i| args.game.config(args.game.seed + i)).collect::<Result<_, _>>()?;
    for spec in [maker, breaker] {
        spec.build(&configs[0].colouring, 0).map_err(|e| Failure::usage(format!("{}: {e}", spec.name())))?;
    }

    if args.games == 1 {
        let trace = kaleph_core::play(&configs[0], maker, breaker).map_err(engine_failure)?;
        let target = args
            .out
            .clone()
            .or_else(|| args.trace_dir.as_ref().map(|d| d.join(trace_name(maker, breaker, configs[0].seed))));
        match target {
            Some(path) => {
                write_file(&path, &trace.to_json())?;
                println!("{} -> {}", summary(&trace), path.display());
            }
            None => {
                print!("{}", trace.to_json());
                eprintln!("{}", summary(&trace));
            }
        }
        return Ok(());
    }

    let dir: PathBuf = args
        .out
        .clone()
        .or_else(|| args.trace_dir.clone())
        .ok_or_else(|| Failure::usage("several games need --out <dir> or KALEPH_TRACE_DIR"))?;
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build().map_err(|e| Failure::usage(e.to_string()))?;
    let traces: Vec<GameTrace> = pool
        .install(|| configs.par_iter().map(|c| kaleph_core::play(c, maker, breaker)).collect::<Result<_, _>>())
        .map_err(engine_failure)?;
    for trace in &traces {
        let path = dir.join(trace_name(maker, breaker, trace.header.seed));
        write_file(&path, &trace.to_json())?;
        println!("seed {}: {} -> {}", trace.header.seed, summary(trace), path.display());
    }
    Ok(())
}

pub fn replay(path: &Path) -> Result<(), Failure> {
    let trace = load_trace(path)?;
    let ledger = engine::replay(&trace).map_err(|e| Failure::malformed(e.to_string()))?;
    let maker = trace.maker_moves().count();
    println!("ok: {} moves, {maker} Maker, {} Breaker", ledger.len(), ledger.len() - maker);
    Ok(())
}

fn variant_for(args: &CertifyArgs, trace: &GameTrace) -> Result<Variant, Failure> {
    let Some(name) = args.variant.as_deref() else {
        return Variant::for_trace(trace).ok_or_else(|| Failure::usage("trace has no certifiable Maker strategy"));
    };
    Ok(match name {
        "vanilla" => Variant::Vanilla { bias_k: trace.header.bias.fixed_k().unwrap_or(1) },
        "finite-colours" => {
            let k = match (args.k, trace.header.maker) {
                (Some(k), _) | (None, StrategySpec::FiniteColours { k }) => k,
                _ => return Err(Failure::usage("finite-colours needs --k")),
            };
            if k == 0 {
                return Err(Failure::usage("--k must be at least 1"));
            }
            Variant::FiniteColours { k }
        }
        "infinite-colours" => {
            Variant::InfiniteColours { sequence: ColourSequence::AntiDiagonal, c_hat: ColourSequence::AntiDiagonal }
        }
        other => return Err(Failure::usage(format!("unknown variant {other:?}"))),
    })
}

/// Pairing guarantee on traces over infinitely many colours, as a JSON report.
/// Only traces whose Breaker is the pairing strategy or a human are checked.
pub fn pairing_report(trace: &GameTrace) -> Result<Option<(bool, serde_json::Value)>, Failure> {
    if !matches!(trace.header.breaker, StrategySpec::Pairing | StrategySpec::Human) {
        return Ok(None);
    }
    let Ok(mut table) = PairingTable::new(&trace.header.colouring) else {
        return Ok(None);
    };
    let report = pairing_guarantee_check(trace, &mut table).map_err(|e| Failure::malformed(e.to_string()))?;
    let value = serde_json::to_value(&report).expect("report serializes");
    Ok(Some((report.passed(), value)))
}

pub fn certify(args: &CertifyArgs) -> Result<(), Failure> {
    let trace = load_trace(&args.trace)?;
    let variant = variant_for(args, &trace)?;
    let (chain, report) = certify_trace(&trace, variant).map_err(|e| Failure::malformed(e.to_string()))?;
    let pairing = pairing_report(&trace)?;

    let mut json = serde_json::to_value(&report).expect("report serializes");
    if let Some((_, p)) = &pairing {
        json["pairing"] = p.clone();
    }
    let text = serde_json::to_string_pretty(&json).expect("report serializes") + "\n";
    let mut lines = vec![format!(
        "{} certificate: chain length {}, top clique {:?}",
        variant.name(),
        chain.len(),
        chain.top_clique().iter().map(|v| v.0).collect::<Vec<_>>()
    )];
    lines.extend(report.failures().into_iter().map(|f| format!("  failed: {f}")));
    lines.extend(report.notes.iter().map(|n| format!("  note: {n}")));
    if let Some((ok, _)) = &pairing {
        lines.push(format!("pairing guarantee: {}", if *ok { "holds" } else { "violated" }));
    }
    match &args.out {
        Some(path) => {
            write_file(path, &text)?;
            lines.iter().for_each(|l| println!("{l}"));
        }
        None => {
            print!("{text}");
            lines.iter().for_each(|l| eprintln!("{l}"));
        }
    }

    let pairing_broken = trace.header.breaker == StrategySpec::Pairing && pairing.is_some_and(|(ok, _)| !ok);
    if !report.passed() || pairing_broken {
        let mut failures = report.failures();
        if pairing_broken {
            failures.push("pairing guarantee".into());
        }
        return Err(Failure::uncertified(format!("certificate failed: {}", failures.join(", "))));
    }
    Ok(())
}

/// Maker-move counts at which the growth curve is sampled.
fn checkpoints(horizon: u64) -> Vec<u64> {
    let step = horizon.div_ceil(50).max(1);
    let mut out: Vec<u64> = (1..=horizon).filter(|h| *h <= 10 || h % step == 0).collect();
    if out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

pub fn metrics(path: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let trace = load_trace(path)?;
    let variant =
        Variant::for_trace(&trace).ok_or_else(|| Failure::usage("trace has no certifiable Maker strategy"))?;
    let played = trace.maker_moves().count() as u64;
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| Failure::io(p, e))?),
        None => Box::new(std::io::stdout()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| Failure::usage(e.to_string());
    csv.write_record(["horizon", "chain_length", "maker_edges", "breaker_edges", "maker_vertices", "horizon_limited"])
        .map_err(csv_err)?;
    for h in checkpoints(played) {
        let prefix = trace.prefix(h);
        let ledger = ledger_from_moves(&prefix.moves).map_err(|e| Failure::malformed(e.to_string()))?;
        let chain = extract_chain(&prefix, variant).map_err(|e| Failure::malformed(e.to_string()))?;
        let maker = prefix.maker_moves().count();
        csv.serialize((
            h,
            chain.len(),
            maker,
            ledger.len() - maker,
            ledger.vertices(Player::Maker).len(),
            chain.horizon_limited,
        ))
        .map_err(csv_err)?;
    }
    csv.flush().map_err(|e| Failure::usage(e.to_string()))
}
