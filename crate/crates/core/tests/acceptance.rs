//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kaleph_core::board::edge_enumeration;
use kaleph_core::breaker::PairingTable;
use kaleph_core::certificate::{
    brute_force_max_clique, certify, extract_chain, maker_order, max_clique_among, pairing_guarantee_check,
    verify_chain, CliqueChain, Variant,
};
use kaleph_core::engine::{ledger_from_moves, replay, Rule};
use kaleph_core::maker::ColourSequence;
use kaleph_core::{play, BiasSchedule, Colouring, Edge, GameConfig, GameTrace, Player, StrategySpec, VertexId};

const HORIZONS: [u64; 4] = [50, 200, 1000, 2000];
const PASSIVE: StrategySpec = StrategySpec::Passive { offset: 1000 };
const RANDOM: StrategySpec = StrategySpec::Random { window: 256 };
const INFINITE: StrategySpec = StrategySpec::InfiniteColours { sequence: ColourSequence::AntiDiagonal };

/// Frozen chain lengths at horizons 50, 200, 1000, 2000.
const BASELINE: &[(&str, &str, u64, [usize; 4])] = &[
    ("vanilla", "passive", 0, [10, 20, 45, 63]),
    ("vanilla", "random", 1, [10, 20, 43, 60]),
    ("vanilla", "random", 2, [10, 20, 45, 58]),
    ("vanilla", "random", 3, [10, 20, 42, 56]),
    ("vanilla", "greedy-blocker", 0, [9, 16, 40, 54]),
    ("vanilla", "pairing", 0, [9, 18, 41, 58]),
    ("finite-colours", "passive", 0, [3, 4, 4, 4]),
    ("finite-colours", "random", 1, [3, 4, 4, 4]),
    ("finite-colours", "random", 2, [3, 4, 4, 4]),
    ("finite-colours", "random", 3, [3, 4, 4, 4]),
    ("finite-colours", "greedy-blocker", 0, [3, 4, 4, 5]),
    ("infinite-colours", "passive", 0, [2, 2, 2, 2]),
    ("infinite-colours", "random", 1, [2, 2, 2, 2]),
    ("infinite-colours", "random", 2, [2, 2, 2, 2]),
    ("infinite-colours", "random", 3, [2, 2, 2, 2]),
    ("infinite-colours", "greedy-blocker", 0, [2, 2, 2, 2]),
    ("infinite-colours", "pairing", 0, [2, 2, 2, 2]),
];

/// Largest Maker clique through `e_1..e_5` once the unbounded-bias game has
/// settled; 0 where Maker never owns the edge.
const PLATEAU: [usize; 5] = [2, 0, 0, 3, 0];

struct Cell {
    maker: StrategySpec,
    breaker: StrategySpec,
    seed: u64,
    colouring: Colouring,
    trace: GameTrace,
}

impl Cell {
    fn label(&self) -> String {
        format!("{} vs {} (seed {})", self.maker.name(), self.breaker.name(), self.seed)
    }

    fn config(&self) -> GameConfig {
        GameConfig::new(Player::Maker, 2000, self.colouring.clone(), BiasSchedule::Unit, self.seed).unwrap()
    }
}

fn matrix() -> Vec<Cell> {
    let makers = [
        (StrategySpec::Vanilla, Colouring::Diagonal),
        (StrategySpec::FiniteColours { k: 3 }, Colouring::ModK { k: 3 }),
        (INFINITE, Colouring::Diagonal),
    ];
    let breakers = [
        (PASSIVE, 0),
        (RANDOM, 1),
        (RANDOM, 2),
        (RANDOM, 3),
        (StrategySpec::GreedyBlocker, 0),
        (StrategySpec::Pairing, 0),
    ];
    let mut cells = Vec::new();
    for (maker, colouring) in &makers {
        for &(breaker, seed) in &breakers {
            if breaker == StrategySpec::Pairing && colouring.num_colours().is_some() {
                continue;
            }
            let config = GameConfig::new(Player::Maker, 2000, colouring.clone(), BiasSchedule::Unit, seed).unwrap();
            let trace = play(&config, *maker, breaker).expect("matrix game");
            cells.push(Cell { maker: *maker, breaker, seed, colouring: colouring.clone(), trace });
        }
    }
    cells
}

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed <= limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let trace = play(&GameConfig::standard(7).unwrap(), StrategySpec::Vanilla, PASSIVE).map_err(|e| e.to_string())?;
    let maker: Vec<Edge> = trace.maker_moves().map(|c| c.edge).collect();
    let expected: Vec<Edge> =
        [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (0, 4)].iter().map(|&(a, b)| Edge::of(a, b)).collect();
    check(maker == expected, || format!("Maker claimed {maker:?}"))?;
    let ledger = replay(&trace).map_err(|e| e.to_string())?;
    let (size, witness) = brute_force_max_clique(&ledger, Player::Maker, 32).map_err(|e| e.to_string())?;
    check(size == 4, || format!("oracle clique size {size}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("Maker edges match, oracle clique {witness:?}, {:.2?}", start.elapsed()))
}

fn chains(cell: &Cell) -> Result<Vec<CliqueChain>, String> {
    let variant = Variant::for_trace(&cell.trace).unwrap();
    HORIZONS.iter().map(|&h| extract_chain(&cell.trace.prefix(h), variant).map_err(|e| e.to_string())).collect()
}

fn criterion_2(cells: &[Cell], elapsed: Duration) -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    for cell in cells {
        let lengths: Vec<usize> = chains(cell)?.iter().map(CliqueChain::len).collect();
        check(lengths.windows(2).all(|w| w[0] <= w[1]), || format!("{}: not monotone {lengths:?}", cell.label()))?;
        check(lengths[0] >= 2, || format!("{}: length {} at horizon 50", cell.label(), lengths[0]))?;
        let frozen = BASELINE
            .iter()
            .find(|(m, b, s, _)| *m == cell.maker.name() && *b == cell.breaker.name() && *s == cell.seed)
            .map(|row| row.3.to_vec());
        check(frozen.as_deref() == Some(&lengths[..]), || {
            format!("{}: lengths {lengths:?} differ from baseline {frozen:?}", cell.label())
        })?;
        rows.push(format!("{} {:?}", cell.label(), lengths));
    }
    // hand-checked level-3 prefix of the passive vanilla game
    let vanilla = cells.iter().find(|c| c.maker == StrategySpec::Vanilla && c.breaker == PASSIVE).unwrap();
    let level3 = &chains(vanilla)?[0].levels[2].clique;
    check(level3 == &[VertexId(0), VertexId(1), VertexId(2)], || format!("level-3 clique {level3:?}"))?;
    within(elapsed + start.elapsed(), Duration::from_secs(120))?;
    for row in &rows {
        println!("    {row}");
    }
    Ok(format!("{} cells monotone and at baseline, {:.2?}", cells.len(), elapsed + start.elapsed()))
}

fn criterion_3(cells: &[Cell]) -> Outcome {
    let mut verified = 0;
    for cell in cells {
        let variant = Variant::for_trace(&cell.trace).unwrap();
        for &h in &HORIZONS {
            let trace = cell.trace.prefix(h);
            let (chain, report) = certify(&trace, variant).map_err(|e| e.to_string())?;
            check(report.passed(), || format!("{} at {h}: {:?}", cell.label(), report.failures()))?;
            verified += 1;

            if chain.len() >= 3 {
                let (u, v) = (chain.levels[2].clique[1], chain.levels[2].clique[2]);
                let mut cut = trace.clone();
                cut.moves.retain(|c| c.edge != Edge::new(u, v).unwrap());
                let r = verify_chain(&chain, &cut, variant).map_err(|e| e.to_string())?;
                check(!r.passed(), || format!("{} at {h}: deleted clique edge not caught", cell.label()))?;
            }
            if chain.len() >= 2 {
                let mut permuted = chain.clone();
                permuted.levels.swap(0, 1);
                let r = verify_chain(&permuted, &trace, variant).map_err(|e| e.to_string())?;
                check(!r.passed(), || format!("{} at {h}: permuted levels not caught", cell.label()))?;
            }
            if let (Variant::FiniteColours { k }, true) = (variant, chain.len() >= 2) {
                let v = chain.levels[1].clique[1];
                let mut recoloured = trace.clone();
                recoloured.header.colouring = Colouring::Table {
                    overrides: [(v.0, (cell.colouring.colour_of(v).0 + 1) % k)].into(),
                    fallback: Box::new(cell.colouring.clone()),
                };
                let r = verify_chain(&chain, &recoloured, variant).map_err(|e| e.to_string())?;
                check(!r.passed(), || format!("{} at {h}: recoloured vertex not caught", cell.label()))?;
            }
        }
    }
    Ok(format!("{verified} certificates verified, all mutations rejected"))
}

fn criterion_4(cells: &[Cell]) -> Outcome {
    let start = Instant::now();
    let mut table = PairingTable::new(&Colouring::Diagonal).map_err(|e| e.to_string())?;

    // (a) 100 pairs for each of the first 100 enumeration edges
    let mut seen = HashSet::new();
    let mut pairs = 0;
    for m in 1..=100usize {
        let e_m = edge_enumeration(m as u64).unwrap();
        let class = Colouring::Diagonal.class_members(table.colour(m));
        for v in class.filter(|v| !e_m.contains(*v)).take(100) {
            let (a, b) = table.pair_at(m, v);
            for e in [a, b] {
                check(seen.insert(e), || format!("{e} lies in two of the first pairs"))?;
            }
            check(table.pair_of(a) == Some(b) && table.pair_of(b) == Some(a), || {
                format!("pair ({a}, {b}) not mutual")
            })?;
            pairs += 1;
        }
    }
    check(pairs == 10_000, || format!("generated {pairs} pairs"))?;

    // (b) greedy colours, re-derived here independently
    let colours: Vec<u64> = (1..=50).map(|m| table.colour(m).0).collect();
    check(colours[..3] == [1, 2, 3], || format!("c_1..c_3 = {:?}", &colours[..3]))?;
    let mut endpoint_colours = HashSet::new();
    for (i, &c) in colours.iter().enumerate() {
        let e = edge_enumeration(i as u64 + 1).unwrap();
        for v in e.endpoints() {
            endpoint_colours.insert(Colouring::Diagonal.colour_of(v).0);
        }
        check(!colours[..i].contains(&c), || format!("c_{} = {c} repeats", i + 1))?;
        check(!endpoint_colours.contains(&c), || format!("c_{} = {c} is an endpoint colour", i + 1))?;
    }

    // (c) and (d): the matrix games finished, so the partner fault never fired
    let mut checked = 0;
    for cell in cells.iter().filter(|c| c.breaker == StrategySpec::Pairing) {
        let report = pairing_guarantee_check(&cell.trace, &mut table).map_err(|e| e.to_string())?;
        check(report.passed(), || format!("{}: {:?}", cell.label(), report.notes))?;
        checked += 1;
    }
    check(checked == 2, || format!("only {checked} pairing cells"))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{pairs} pairs disjoint, c_1..c_3 = 1,2,3, guarantee holds in {checked} cells at horizon 2000 \
         (finite-colours N/A: pairing needs infinitely many colours), {:.2?}",
        start.elapsed()
    ))
}

fn criterion_5() -> Outcome {
    let mut traces = 0;
    for k in [1u64, 2, 3, 5] {
        let colouring = Colouring::ModK { k };
        for (breaker, seed) in [(PASSIVE, 0), (RANDOM, 1), (RANDOM, 2), (StrategySpec::GreedyBlocker, 0)] {
            let config = GameConfig::new(Player::Maker, 500, colouring.clone(), BiasSchedule::Unit, seed).unwrap();
            let trace = play(&config, StrategySpec::FiniteColours { k }, breaker).map_err(|e| e.to_string())?;
            let ledger = ledger_from_moves(&trace.moves).map_err(|e| e.to_string())?;
            let order = maker_order(&trace, &ledger);
            for (j, &v) in order.order().iter().enumerate() {
                let c = colouring.colour_of(v).0;
                check(c == (j as u64 + 1) % k, || {
                    format!("k={k} {}: v_{} = {v} has colour {c}", breaker.name(), j + 1)
                })?;
            }
            for h in [50, 200, 500] {
                let chain = extract_chain(&trace.prefix(h), Variant::FiniteColours { k }).map_err(|e| e.to_string())?;
                for level in &chain.levels {
                    for (j, &v) in level.clique.iter().enumerate() {
                        check(colouring.colour_of(v).0 == (j as u64 + 1) % k, || {
                            format!("k={k} {} h={h}: clique position {} is {v}", breaker.name(), j + 1)
                        })?;
                    }
                }
            }
            traces += 1;
        }
    }
    Ok(format!("{traces} traces, every Maker vertex and chain level follows the colour law"))
}

/// Largest Maker clique through `e`, or 0 if Maker does not own `e`.
fn clique_through(trace: &GameTrace, horizon: u64, e: Edge) -> Result<usize, String> {
    let ledger = ledger_from_moves(&trace.prefix(horizon).moves).map_err(|e| e.to_string())?;
    if !ledger.owns(Player::Maker, e) {
        return Ok(0);
    }
    let common: Vec<VertexId> = ledger
        .neighbours(Player::Maker, e.lo())
        .iter()
        .copied()
        .filter(|&v| ledger.joined(Player::Maker, v, e.hi()))
        .collect();
    let (size, _) = max_clique_among(&ledger, Player::Maker, &common, 32).map_err(|e| e.to_string())?;
    Ok(size + 2)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let config = GameConfig::new(Player::Maker, 500, Colouring::Diagonal, BiasSchedule::CeilLog2, 0).unwrap();
    let trace = play(&config, StrategySpec::Vanilla, StrategySpec::UnboundedBias).map_err(|e| e.to_string())?;
    let mut plateau = Vec::new();
    for n in 1..=5u64 {
        let e = edge_enumeration(n).unwrap();
        let sizes = [300, 400, 500].map(|h| clique_through(&trace, h, e));
        let sizes: Vec<usize> = sizes.into_iter().collect::<Result<_, _>>()?;
        check(sizes.iter().all(|&s| s == sizes[0]), || format!("e_{n} = {e}: sizes {sizes:?} at 300/400/500"))?;
        plateau.push(sizes[0]);
    }
    check(plateau == PLATEAU, || format!("plateau {plateau:?}, frozen {PLATEAU:?}"))?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("plateau sizes for e_1..e_5: {plateau:?} (0 = not Maker's), {:.2?}", start.elapsed()))
}

fn criterion_7(cells: &[Cell]) -> Outcome {
    let mut runs = 0;
    for cell in cells {
        let again = play(&cell.config(), cell.maker, cell.breaker).map_err(|e| e.to_string())?;
        check(again.to_json() == cell.trace.to_json(), || format!("{}: rerun differs", cell.label()))?;
        runs += 1;
    }
    for bias in [BiasSchedule::Constant { k: 2 }, BiasSchedule::CeilLog2] {
        for first in [Player::Maker, Player::Breaker] {
            let config = GameConfig::new(first, 300, Colouring::Diagonal, bias, 9).unwrap();
            let a = play(&config, StrategySpec::Vanilla, RANDOM).map_err(|e| e.to_string())?.to_json();
            let b = play(&config, StrategySpec::Vanilla, RANDOM).map_err(|e| e.to_string())?.to_json();
            check(a == b, || format!("{bias} {first}: rerun differs"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} configurations byte-identical on rerun"))
}

fn criterion_8(cells: &[Cell]) -> Outcome {
    let total: usize = cells.iter().map(|c| c.trace.count_rule(Rule::Fallback)).sum();
    check(total == 0, || format!("{total} fallback moves"))?;
    Ok(format!("0 fallback moves across {} cells", cells.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cells = matrix();
    let matrix_time = start.elapsed();

    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "hand-trace reproduction", criterion_1()),
        (2, "chain-growth monotonicity", criterion_2(&cells, matrix_time)),
        (3, "certificate soundness", criterion_3(&cells)),
        (4, "pairing strategy", criterion_4(&cells)),
        (5, "finite-colours colour law", criterion_5()),
        (6, "unbounded-bias suffocation", criterion_6()),
        (7, "determinism", criterion_7(&cells)),
        (8, "F-availability", criterion_8(&cells)),
    ];
    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {reason}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed, {:.2?}", results.len() - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
