//! Breaker strategies: the colour pairing strategy, the strategy against
//! unbounded bias, and a small adversary suite for stress-testing Maker.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::board::{canonical_edge, edge_enumeration, ClaimLedger, ColourId, Colouring, Edge, Player, VertexId};
use crate::engine::{Decision, Strategy, StrategyError, View};
use crate::strategy::StrategySpec;

/// Greedy colour choice for the pairing strategy, grown on demand.
///
/// Step `i` picks the smallest colour that was neither picked before nor
/// appears on an endpoint of `e_1, …, e_i`. Picked colours are strictly
/// increasing, which lets [`PairingTable::index_of_colour`] decide in finite
/// time whether a colour is ever picked.
#[derive(Debug, Clone)]
pub struct PairingTable {
    colouring: Colouring,
    colours: Vec<ColourId>,
    excluded: HashSet<ColourId>,
    by_colour: HashMap<ColourId, usize>,
}

impl PairingTable {
    pub fn new(colouring: &Colouring) -> Result<PairingTable, StrategyError> {
        if colouring.num_colours().is_some() {
            return Err(StrategyError::Unsupported("the pairing strategy needs infinitely many colours".into()));
        }
        Ok(PairingTable {
            colouring: colouring.clone(),
            colours: Vec::new(),
            excluded: HashSet::new(),
            by_colour: HashMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    fn grow(&mut self) {
        let i = self.colours.len() as u64 + 1;
        let e = edge_enumeration(i).expect("i >= 1");
        for v in e.endpoints() {
            self.excluded.insert(self.colouring.colour_of(v));
        }
        let mut c = self.colours.last().map_or(0, |c| c.0);
        while self.excluded.contains(&ColourId(c)) || self.by_colour.contains_key(&ColourId(c)) {
            c += 1;
        }
        self.colours.push(ColourId(c));
        self.by_colour.insert(ColourId(c), i as usize);
    }

    pub fn extend_to(&mut self, m: usize) {
        while self.colours.len() < m {
            self.grow();
        }
    }

    /// `c_m`, 1-based.
    pub fn colour(&mut self, m: usize) -> ColourId {
        self.extend_to(m);
        self.colours[m - 1]
    }

    pub fn colours(&self) -> &[ColourId] {
        &self.colours
    }

    /// The `m` with `c_m = colour`, if any step ever picks it.
    pub fn index_of_colour(&mut self, colour: ColourId) -> Option<usize> {
        while self.colours.last().is_none_or(|&c| c < colour) {
            if self.excluded.contains(&colour) {
                return None;
            }
            self.grow();
        }
        self.by_colour.get(&colour).copied()
    }

    /// Every pair containing `e`, as `(m, partner)`. Disjointness means at most one.
    pub fn pairs_containing(&mut self, e: Edge) -> Vec<(usize, Edge)> {
        let mut out = Vec::new();
        for (on_e_m, in_class) in [(e.lo(), e.hi()), (e.hi(), e.lo())] {
            let colour = self.colouring.colour_of(in_class);
            if let Some(m) = self.index_of_colour(colour) {
                let e_m = edge_enumeration(m as u64).expect("m >= 1");
                if let Some(other) = e_m.other(on_e_m) {
                    if other != in_class {
                        let partner = canonical_edge(in_class, other).expect("distinct");
                        out.push((m, partner));
                    }
                }
            }
        }
        out
    }

    pub fn pair_of(&mut self, e: Edge) -> Option<Edge> {
        self.pairs_containing(e).first().map(|&(_, p)| p)
    }

    /// The pair of `e_m` through the vertex `v` of colour `c_m`.
    pub fn pair_at(&mut self, m: usize, v: VertexId) -> (Edge, Edge) {
        let e_m = edge_enumeration(m as u64).expect("m >= 1");
        (canonical_edge(v, e_m.lo()).expect("v is not on e_m"), canonical_edge(v, e_m.hi()).expect("v is not on e_m"))
    }
}

/// `c_1, …, c_m` for the pairing strategy on `colouring`.
pub fn build_pairing_colours(colouring: &Colouring, m: usize) -> Result<Vec<ColourId>, StrategyError> {
    let mut table = PairingTable::new(colouring)?;
    table.extend_to(m);
    Ok(table.colours().to_vec())
}

/// Smallest unclaimed edges, skipping those already chosen this block.
struct Filler {
    cursor: u64,
}

impl Filler {
    fn new() -> Self {
        Filler { cursor: 1 }
    }

    fn next(&mut self, ledger: &ClaimLedger, chosen: &[Edge]) -> Edge {
        ledger.smallest_unclaimed(&mut self.cursor);
        (self.cursor..)
            .map(|i| edge_enumeration(i).expect("i >= 1"))
            .find(|e| !ledger.is_claimed(*e) && !chosen.contains(e))
            .expect("the board is infinite")
    }

    fn pad(&mut self, ledger: &ClaimLedger, edges: &mut Vec<Edge>, allowance: u64) {
        while (edges.len() as u64) < allowance {
            let e = self.next(ledger, edges);
            edges.push(e);
        }
    }
}

/// Answers a Maker claim of one pair member with its partner.
///
/// A Maker edge in no pair, or whose partner Breaker already owns, is
/// answered with the smallest unclaimed edge.
pub fn pairing_response(
    table: &mut PairingTable,
    maker_edge: Edge,
    ledger: &ClaimLedger,
) -> Result<Option<Edge>, StrategyError> {
    let Some(partner) = table.pair_of(maker_edge) else {
        return Ok(None);
    };
    match ledger.claim_of(partner) {
        None => Ok(Some(partner)),
        Some(c) if c.player == Player::Breaker => Ok(None),
        Some(c) => Err(StrategyError::Internal(format!(
            "partner {partner} of {maker_edge} already claimed by Maker at turn {}",
            c.turn
        ))),
    }
}

pub struct PairingBreaker {
    table: PairingTable,
    filler: Filler,
}

impl PairingBreaker {
    pub fn new(colouring: &Colouring) -> Result<Self, StrategyError> {
        Ok(PairingBreaker { table: PairingTable::new(colouring)?, filler: Filler::new() })
    }

    pub fn table(&self) -> &PairingTable {
        &self.table
    }
}

impl Strategy for PairingBreaker {
    fn spec(&self) -> StrategySpec {
        StrategySpec::Pairing
    }

    fn next_moves(&mut self, view: &View<'_>, allowance: u64) -> Result<Decision, StrategyError> {
        let mut edges = Vec::new();
        if let Some(last) = view.ledger.last_claim_by(Player::Maker) {
            // only answer a Maker move made since our previous block
            if view.ledger.claims().last().map(|c| c.player) == Some(Player::Maker) {
                if let Some(p) = pairing_response(&mut self.table, last.edge, view.ledger)? {
                    edges.push(p);
                }
            }
        }
        self.filler.pad(view.ledger, &mut edges, allowance);
        Ok(Decision::block(edges))
    }
}

/// For Maker's latest edge `{x, y}` and `i = 1, …, allowance`, claims the
/// smallest available edge of `G[{x, y, x_i, y_i}]`, then pads with filler.
pub fn unbounded_bias_moves(ledger: &ClaimLedger, allowance: u64) -> Vec<Edge> {
    let mut filler = Filler::new();
    unbounded_bias_block(ledger, allowance, &mut filler)
}

fn unbounded_bias_block(ledger: &ClaimLedger, allowance: u64, filler: &mut Filler) -> Vec<Edge> {
    let mut edges: Vec<Edge> = Vec::new();
    if let Some(last) = ledger.last_claim_by(Player::Maker) {
        let (x, y) = (last.edge.lo(), last.edge.hi());
        for i in 1..=allowance {
            let e_i = edge_enumeration(i).expect("i >= 1");
            let mut vs = vec![x, y, e_i.lo(), e_i.hi()];
            vs.sort_unstable();
            vs.dedup();
            let mut available: Vec<Edge> = Vec::new();
            for (a, &u) in vs.iter().enumerate() {
                for &w in &vs[a + 1..] {
                    let e = canonical_edge(u, w).expect("deduplicated");
                    if !ledger.is_claimed(e) && !edges.contains(&e) {
                        available.push(e);
                    }
                }
            }
            if let Some(e) = available.into_iter().min_by_key(|&e| crate::board::edge_index(e)) {
                edges.push(e);
            }
        }
    }
    filler.pad(ledger, &mut edges, allowance);
    edges
}

pub struct UnboundedBiasBreaker {
    filler: Filler,
}

impl UnboundedBiasBreaker {
    pub fn new() -> Self {
        UnboundedBiasBreaker { filler: Filler::new() }
    }
}

impl Default for UnboundedBiasBreaker {
    fn default() -> Self {
        Self::new()
    }
}

impl Strategy for UnboundedBiasBreaker {
    fn spec(&self) -> StrategySpec {
        StrategySpec::UnboundedBias
    }

    fn next_moves(&mut self, view: &View<'_>, allowance: u64) -> Result<Decision, StrategyError> {
        Ok(Decision::block(unbounded_bias_block(view.ledger, allowance, &mut self.filler)))
    }
}

/// Claims the smallest unclaimed edges among vertices `>= offset`.
pub struct PassiveBreaker {
    offset: u64,
    cursor: u64,
}

impl PassiveBreaker {
    pub fn new(offset: u64) -> Self {
        PassiveBreaker { offset, cursor: 1 }
    }
}

impl Strategy for PassiveBreaker {
    fn spec(&self) -> StrategySpec {
        StrategySpec::Passive { offset: self.offset }
    }

    fn next_moves(&mut self, view: &View<'_>, allowance: u64) -> Result<Decision, StrategyError> {
        let shift = |e: Edge| Edge::of(e.lo().0 + self.offset, e.hi().0 + self.offset);
        let mut edges = Vec::new();
        let mut i = self.cursor;
        while (edges.len() as u64) < allowance {
            let e = shift(edge_enumeration(i).expect("i >= 1"));
            if !view.ledger.is_claimed(e) {
                edges.push(e);
            } else if edges.is_empty() {
                self.cursor = i + 1;
            }
            i += 1;
        }
        Ok(Decision::block(edges))
    }
}

/// Uniform choice among the `window` enumeration indices starting at the
/// smallest unclaimed edge, rejecting claimed ones.
pub struct RandomBreaker {
    window: u64,
    rng: ChaCha8Rng,
    cursor: u64,
}

impl RandomBreaker {
    const MAX_TRIES: usize = 64;

    pub fn new(seed: u64, window: u64) -> Self {
        RandomBreaker { window: window.max(1), rng: ChaCha8Rng::seed_from_u64(seed), cursor: 1 }
    }
}

impl Strategy for RandomBreaker {
    fn spec(&self) -> StrategySpec {
        StrategySpec::Random { window: self.window }
    }

    fn next_moves(&mut self, view: &View<'_>, allowance: u64) -> Result<Decision, StrategyError> {
        let ledger = view.ledger;
        let mut edges: Vec<Edge> = Vec::new();
        while (edges.len() as u64) < allowance {
            ledger.smallest_unclaimed(&mut self.cursor);
            let lo = self.cursor;
            let pick = (0..Self::MAX_TRIES)
                .map(|_| edge_enumeration(self.rng.gen_range(lo..lo + self.window)).expect("lo >= 1"))
                .find(|e| !ledger.is_claimed(*e) && !edges.contains(e));
            let e = pick.unwrap_or_else(|| {
                (lo..)
                    .map(|i| edge_enumeration(i).expect("i >= 1"))
                    .find(|e| !ledger.is_claimed(*e) && !edges.contains(e))
                    .expect("the board is infinite")
            });
            edges.push(e);
        }
        Ok(Decision::block(edges))
    }
}

/// Cuts Maker's newest vertex off from the largest clique it can see.
///
/// The clique is grown greedily from Maker's first vertex in introduction
/// order, which is what Maker's strategies extend.
pub struct GreedyBlocker {
    order: Vec<VertexId>,
    seen: HashSet<VertexId>,
    cursor: usize,
    filler: Filler,
}

impl GreedyBlocker {
    pub fn new() -> Self {
        GreedyBlocker { order: Vec::new(), seen: HashSet::new(), cursor: 0, filler: Filler::new() }
    }

    fn sync(&mut self, ledger: &ClaimLedger) {
        for c in &ledger.claims()[self.cursor..] {
            if c.player == Player::Maker {
                for v in c.edge.endpoints() {
                    if self.seen.insert(v) {
                        self.order.push(v);
                    }
                }
            }
        }
        self.cursor = ledger.len();
    }

    fn greedy_clique(&self, ledger: &ClaimLedger, exclude: VertexId) -> Vec<VertexId> {
        let mut clique: Vec<VertexId> = Vec::new();
        for &v in &self.order {
            if v != exclude && clique.iter().all(|&u| ledger.joined(Player::Maker, u, v)) {
                clique.push(v);
            }
        }
        clique
    }
}

impl Default for GreedyBlocker {
    fn default() -> Self {
        Self::new()
    }
}

impl Strategy for GreedyBlocker {
    fn spec(&self) -> StrategySpec {
        StrategySpec::GreedyBlocker
    }

    fn next_moves(&mut self, view: &View<'_>, allowance: u64) -> Result<Decision, StrategyError> {
        self.sync(view.ledger);
        let mut edges = Vec::new();
        if let Some(&newest) = self.order.last() {
            let clique = self.greedy_clique(view.ledger, newest);
            for q in clique {
                if edges.len() as u64 >= allowance {
                    break;
                }
                let e = canonical_edge(q, newest).expect("newest excluded from clique");
                if !view.ledger.is_claimed(e) {
                    edges.push(e);
                }
            }
        }
        self.filler.pad(view.ledger, &mut edges, allowance);
        Ok(Decision::block(edges))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_colours_under_diagonal() {
        let cs = build_pairing_colours(&Colouring::Diagonal, 3).unwrap();
        assert_eq!(cs, vec![ColourId(1), ColourId(2), ColourId(3)]);
        assert!(build_pairing_colours(&Colouring::ModK { k: 3 }, 3).is_err());
    }

    #[test]
    fn pairing_examples() {
        let mut table = PairingTable::new(&Colouring::Diagonal).unwrap();
        let ledger = ClaimLedger::new();
        // e_1 = {0,1}, c_1 = 1, c(4) = 1
        assert_eq!(pairing_response(&mut table, Edge::of(0, 4), &ledger).unwrap(), Some(Edge::of(1, 4)));
        // both endpoints colour 0; no c_m is 0
        assert_eq!(Colouring::Diagonal.colour_of(VertexId(3)), ColourId(0));
        assert_eq!(Colouring::Diagonal.colour_of(VertexId(6)), ColourId(0));
        assert_eq!(pairing_response(&mut table, Edge::of(3, 6), &ledger).unwrap(), None);
    }

    #[test]
    fn partner_owned_by_maker_is_a_fault() {
        let mut table = PairingTable::new(&Colouring::Diagonal).unwrap();
        let mut ledger = ClaimLedger::new();
        ledger.push(Edge::of(1, 4), Player::Maker).unwrap();
        ledger.push(Edge::of(0, 4), Player::Maker).unwrap();
        assert!(matches!(pairing_response(&mut table, Edge::of(0, 4), &ledger), Err(StrategyError::Internal(_))));
    }

    #[test]
    fn index_of_colour_terminates_for_excluded_colours() {
        let mut table = PairingTable::new(&Colouring::Diagonal).unwrap();
        assert_eq!(table.index_of_colour(ColourId(0)), None);
        assert_eq!(table.index_of_colour(ColourId(1)), Some(1));
        let m = table.index_of_colour(ColourId(40));
        if let Some(m) = m {
            assert_eq!(table.colour(m), ColourId(40));
        }
    }

    #[test]
    fn unbounded_bias_examples() {
        let mut ledger = ClaimLedger::new();
        ledger.push(Edge::of(5, 6), Player::Maker).unwrap();
        assert_eq!(unbounded_bias_moves(&ledger, 1), vec![Edge::of(0, 1)]);
        assert_eq!(unbounded_bias_moves(&ledger, 2), vec![Edge::of(0, 1), Edge::of(0, 2)]);
    }

    #[test]
    fn unbounded_bias_pads_when_subgraphs_are_full() {
        let mut ledger = ClaimLedger::new();
        ledger.push(Edge::of(0, 1), Player::Maker).unwrap();
        // G[{0,1}] is just the claimed edge
        assert_eq!(unbounded_bias_moves(&ledger, 1), vec![Edge::of(0, 2)]);
    }

    #[test]
    fn passive_stays_above_offset() {
        let mut b = PassiveBreaker::new(1000);
        let ledger = ClaimLedger::new();
        let view = View { ledger: &ledger, colouring: &Colouring::Diagonal, block: 1 };
        let d = b.next_moves(&view, 3).unwrap();
        assert_eq!(d.edges, vec![Edge::of(1000, 1001), Edge::of(1000, 1002), Edge::of(1001, 1002)]);
    }
}
