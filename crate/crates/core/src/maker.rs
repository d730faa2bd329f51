//! Maker's three strategies: the uncoloured one, the one for finitely many
//! colour classes, and the diagonal one for infinitely many colours.
//!
//! All three share [`MakerState`], which remembers the order in which Maker
//! introduced vertices (`v_1, v_2, …`). The order in which Maker connected a
//! given vertex is read straight off the ledger, whose neighbour lists are
//! kept in claim order.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::board::{canonical_edge, ClaimLedger, ColourId, Colouring, Edge, Player, VertexId};
use crate::engine::{Annotation, Decision, Rule, Strategy, StrategyError, View};
use crate::strategy::StrategySpec;

/// Maker's vertices in introduction order. Indices are 1-based.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MakerState {
    order: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
}

impl MakerState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_order(order: impl IntoIterator<Item = VertexId>) -> Self {
        let mut s = Self::new();
        for v in order {
            s.introduce(v);
        }
        s
    }

    pub fn introduce(&mut self, v: VertexId) {
        debug_assert!(!self.index.contains_key(&v), "vertex {v} introduced twice");
        self.order.push(v);
        self.index.insert(v, self.order.len());
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `v_i`, 1-based.
    pub fn vertex(&self, i: usize) -> VertexId {
        self.order[i - 1]
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn last(&self) -> Option<VertexId> {
        self.order.last().copied()
    }

    /// Largest introduction index among `N_M(v)`, 0 when empty.
    pub fn max_neighbour_index(&self, ledger: &ClaimLedger, v: VertexId) -> usize {
        ledger.neighbours(Player::Maker, v).iter().filter_map(|&u| self.index_of(u)).max().unwrap_or(0)
    }
}

/// `N_M(small) ⊆ N_M(big)`.
pub fn maker_neighbourhood_within(ledger: &ClaimLedger, small: VertexId, big: VertexId) -> bool {
    ledger.neighbours(Player::Maker, small).iter().all(|&x| ledger.joined(Player::Maker, x, big))
}

/// The order-preserving bijection from positions `1..=|W|` onto the
/// introduction indices of `W`; entry `p - 1` is the image of `p`.
pub fn rank_map(state: &MakerState, w: impl IntoIterator<Item = VertexId>) -> Vec<usize> {
    let mut indices: Vec<usize> = w.into_iter().filter_map(|v| state.index_of(v)).collect();
    indices.sort_unstable();
    indices.dedup();
    indices
}

/// Rule generating Maker's colour sequence `s_1, s_2, …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColourSequence {
    /// `0; 0, 1; 0, 1, 2; …`: every colour infinitely often.
    #[default]
    AntiDiagonal,
}

impl ColourSequence {
    /// The `n`-th term, 1-based.
    pub fn at(self, n: u64) -> ColourId {
        match self {
            ColourSequence::AntiDiagonal => Colouring::Diagonal.colour_of(VertexId(n - 1)),
        }
    }
}

impl std::str::FromStr for ColourSequence {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "anti-diagonal" | "antidiagonal" => Ok(ColourSequence::AntiDiagonal),
            _ => Err(format!("unknown colour sequence {s:?}")),
        }
    }
}

fn edge(u: VertexId, v: VertexId) -> Edge {
    canonical_edge(u, v).expect("maker never pairs a vertex with itself")
}

/// First Maker move: two fresh vertices, the first drawn from `first` and the
/// second from `second`.
fn opening(
    state: &mut MakerState,
    ledger: &ClaimLedger,
    first: Box<dyn Iterator<Item = VertexId> + '_>,
    second: Box<dyn Iterator<Item = VertexId> + '_>,
) -> (Edge, Annotation) {
    let a = ledger.smallest_fresh(first);
    let b = ledger.smallest_fresh(second.filter(|&v| v != a));
    state.introduce(a);
    state.introduce(b);
    let mut note = Annotation::new(Rule::Opening);
    note.introduced = vec![a, b];
    (edge(a, b), note)
}

fn fresh_to_first(state: &mut MakerState, fresh: VertexId, rule: Rule) -> (Edge, Annotation) {
    let v1 = state.vertex(1);
    state.introduce(fresh);
    let mut note = Annotation::new(rule);
    note.introduced = vec![fresh];
    (edge(v1, fresh), note)
}

/// Joins the newest vertex `v_n` to the earliest `v_i` whose edge is still
/// unclaimed and whose Maker neighbourhood contains `N_M(v_n)`; otherwise
/// introduces the smallest fresh vertex and joins it to `v_1`.
pub fn vanilla_next(state: &mut MakerState, ledger: &ClaimLedger) -> (Edge, Annotation) {
    if state.len() < 2 {
        return opening(state, ledger, Box::new((0..).map(VertexId)), Box::new((0..).map(VertexId)));
    }
    let n = state.len();
    let vn = state.vertex(n);
    for i in 1..n {
        let vi = state.vertex(i);
        let e = edge(vi, vn);
        if !ledger.is_claimed(e) && maker_neighbourhood_within(ledger, vn, vi) {
            let mut note = Annotation::new(Rule::Connect);
            note.rank = Some(i as u64);
            return (e, note);
        }
    }
    let fresh = ledger.smallest_fresh((0..).map(VertexId));
    fresh_to_first(state, fresh, Rule::Fresh)
}

/// Colour Maker wants `v_j` to carry when there are `k` colours.
pub fn finite_colour_of_index(j: usize, k: u64) -> ColourId {
    ColourId(j as u64 % k)
}

/// Candidates of `set` sorted by `(|N_M(v) ∩ K|, index)`; returns the first
/// one not blocked by Breaker together with its rank.
fn pick_balanced(
    state: &MakerState,
    ledger: &ClaimLedger,
    vn: VertexId,
    candidates: &[usize],
    k_set: &HashSet<VertexId>,
) -> Option<(Edge, usize)> {
    let mut keyed: Vec<(usize, usize)> = candidates
        .iter()
        .map(|&i| {
            let vi = state.vertex(i);
            let overlap = ledger.neighbours(Player::Maker, vi).iter().filter(|u| k_set.contains(u)).count();
            (overlap, i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.iter().enumerate().find_map(|(rank, &(_, i))| {
        let e = edge(state.vertex(i), vn);
        (!ledger.is_claimed(e)).then_some((e, rank + 1))
    })
}

/// The strategy for `k` colour classes.
///
/// With `d = deg_M(v_n)`, Maker looks for `k·d + 1` earlier vertices of the
/// colour wanted at clique position `d + 1` that already see all of
/// `N_M(v_n)`, and joins `v_n` to the least-used one that Breaker has not cut
/// off. Fresh vertices cycle through the colours so that `c(v_j) = j mod k`.
pub fn finite_colours_next(
    state: &mut MakerState,
    ledger: &ClaimLedger,
    colouring: &Colouring,
    k: u64,
) -> (Edge, Annotation) {
    let fresh_of = |j: usize| colouring.class_members(finite_colour_of_index(j, k));
    if state.len() < 2 {
        return opening(state, ledger, fresh_of(1), fresh_of(2));
    }
    let n = state.len();
    let vn = state.vertex(n);
    let d = ledger.degree(Player::Maker, vn);
    // clique position d + 1 carries colour (d + 1) mod k
    let target = finite_colour_of_index(d + 1, k);
    let h = colouring.colour_of(vn);
    let floor = state.max_neighbour_index(ledger, vn);
    let want = k as usize * d + 1;

    let f: Vec<usize> = ((floor + 1)..n)
        .filter(|&m| {
            let vm = state.vertex(m);
            colouring.colour_of(vm) == target && maker_neighbourhood_within(ledger, vn, vm)
        })
        .take(want)
        .collect();

    if f.len() < want {
        let fresh = ledger.smallest_fresh(fresh_of(n + 1));
        let (e, mut note) = fresh_to_first(state, fresh, Rule::Fresh);
        note.f_size = Some(f.len() as u64);
        return (e, note);
    }

    let k_floor = floor.max(*f.last().expect("F is non-empty"));
    let k_set: HashSet<VertexId> = ((k_floor + 1)..=n)
        .map(|i| state.vertex(i))
        .filter(|&vi| colouring.colour_of(vi) == h && maker_neighbourhood_within(ledger, vn, vi))
        .collect();

    match pick_balanced(state, ledger, vn, &f, &k_set) {
        Some((e, rank)) => {
            let mut note = Annotation::new(Rule::Connect);
            note.f_size = Some(f.len() as u64);
            note.k_size = Some(k_set.len() as u64);
            note.rank = Some(rank as u64);
            (e, note)
        }
        None => {
            let fresh = ledger.smallest_fresh(fresh_of(n + 1));
            let (e, mut note) = fresh_to_first(state, fresh, Rule::Fallback);
            note.f_size = Some(f.len() as u64);
            (e, note)
        }
    }
}

/// The diagonal strategy for infinitely many colours.
///
/// Fresh vertices follow the colour sequence `S`. The newest vertex `v_n` is
/// grouped with every later-or-equal vertex whose first `deg_M(v_n)`
/// connections match its own in the same order (`U`); counting the members of
/// `U` that share `v_n`'s colour selects, via the rank map of `U`, the colour
/// `v_n` should be joined to next.
pub fn infinite_colours_next(
    state: &mut MakerState,
    ledger: &ClaimLedger,
    colouring: &Colouring,
    sequence: ColourSequence,
) -> (Edge, Annotation) {
    let fresh_of = |j: usize| colouring.class_members(sequence.at(j as u64));
    if state.len() < 2 {
        return opening(state, ledger, fresh_of(1), fresh_of(2));
    }
    let n = state.len();
    let vn = state.vertex(n);
    let prefix = ledger.neighbours(Player::Maker, vn);
    let d = prefix.len();
    let floor = state.max_neighbour_index(ledger, vn);
    let own = colouring.colour_of(vn);

    let u: Vec<usize> = ((floor + 1)..=n)
        .filter(|&i| {
            let conn = ledger.neighbours(Player::Maker, state.vertex(i));
            conn.len() >= d && conn[..d] == *prefix
        })
        .collect();
    let same_colour = u.iter().filter(|&&i| colouring.colour_of(state.vertex(i)) == own).count();
    // v_n ∈ U ∩ U′, so 1 <= |U′| <= |U|
    let target = colouring.colour_of(state.vertex(u[same_colour - 1]));

    let nbr_colours: HashSet<ColourId> = prefix.iter().map(|&x| colouring.colour_of(x)).collect();
    let want = (nbr_colours.len() + 2) * d + 1;
    let f: Vec<usize> = ((floor + 1)..n)
        .filter(|&m| {
            let vm = state.vertex(m);
            colouring.colour_of(vm) == target && maker_neighbourhood_within(ledger, vn, vm)
        })
        .take(want)
        .collect();

    if f.len() < want {
        let fresh = ledger.smallest_fresh(fresh_of(n + 1));
        let (e, mut note) = fresh_to_first(state, fresh, Rule::Fresh);
        note.f_size = Some(f.len() as u64);
        return (e, note);
    }

    let k_floor = floor.max(*f.last().expect("F is non-empty"));
    let k_set: HashSet<VertexId> = ((k_floor + 1)..=n)
        .map(|i| state.vertex(i))
        .filter(|&vi| colouring.colour_of(vi) == own && maker_neighbourhood_within(ledger, vn, vi))
        .collect();

    match pick_balanced(state, ledger, vn, &f, &k_set) {
        Some((e, rank)) => {
            let mut note = Annotation::new(Rule::Connect);
            note.f_size = Some(f.len() as u64);
            note.k_size = Some(k_set.len() as u64);
            note.rank = Some(rank as u64);
            (e, note)
        }
        None => {
            let fresh = ledger.smallest_fresh(fresh_of(n + 1));
            let (e, mut note) = fresh_to_first(state, fresh, Rule::Fallback);
            note.f_size = Some(f.len() as u64);
            (e, note)
        }
    }
}

pub struct VanillaMaker {
    state: MakerState,
}

impl VanillaMaker {
    pub fn new() -> Self {
        VanillaMaker { state: MakerState::new() }
    }

    pub fn state(&self) -> &MakerState {
        &self.state
    }
}

impl Default for VanillaMaker {
    fn default() -> Self {
        Self::new()
    }
}

impl Strategy for VanillaMaker {
    fn spec(&self) -> StrategySpec {
        StrategySpec::Vanilla
    }

    fn next_moves(&mut self, view: &View<'_>, _allowance: u64) -> Result<Decision, StrategyError> {
        let (e, note) = vanilla_next(&mut self.state, view.ledger);
        Ok(Decision::single(e, note))
    }
}

pub struct FiniteColoursMaker {
    k: u64,
    state: MakerState,
}

impl FiniteColoursMaker {
    /// Requires a colouring onto exactly `k` colours.
    pub fn new(k: u64, colouring: &Colouring) -> Result<Self, StrategyError> {
        if k == 0 {
            return Err(StrategyError::Unsupported("finite-colours needs k >= 1".into()));
        }
        if colouring.num_colours() != Some(k) {
            return Err(StrategyError::Unsupported(format!(
                "finite-colours with k={k} needs a colouring onto {k} colours"
            )));
        }
        Ok(FiniteColoursMaker { k, state: MakerState::new() })
    }

    pub fn state(&self) -> &MakerState {
        &self.state
    }
}

impl Strategy for FiniteColoursMaker {
    fn spec(&self) -> StrategySpec {
        StrategySpec::FiniteColours { k: self.k }
    }

    fn next_moves(&mut self, view: &View<'_>, _allowance: u64) -> Result<Decision, StrategyError> {
        let (e, note) = finite_colours_next(&mut self.state, view.ledger, view.colouring, self.k);
        Ok(Decision::single(e, note))
    }
}

pub struct InfiniteColoursMaker {
    sequence: ColourSequence,
    state: MakerState,
}

impl InfiniteColoursMaker {
    pub fn new(sequence: ColourSequence, colouring: &Colouring) -> Result<Self, StrategyError> {
        if colouring.num_colours().is_some() {
            return Err(StrategyError::Unsupported(
                "infinite-colours needs a colouring with infinitely many colours".into(),
            ));
        }
        Ok(InfiniteColoursMaker { sequence, state: MakerState::new() })
    }

    pub fn state(&self) -> &MakerState {
        &self.state
    }
}

impl Strategy for InfiniteColoursMaker {
    fn spec(&self) -> StrategySpec {
        StrategySpec::InfiniteColours { sequence: self.sequence }
    }

    fn next_moves(&mut self, view: &View<'_>, _allowance: u64) -> Result<Decision, StrategyError> {
        let (e, note) = infinite_colours_next(&mut self.state, view.ledger, view.colouring, self.sequence);
        Ok(Decision::single(e, note))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn play(ledger: &mut ClaimLedger, e: Edge, p: Player) {
        ledger.push(e, p).unwrap();
    }

    #[test]
    fn rank_map_is_order_preserving() {
        let state = MakerState::from_order((0..10).map(VertexId));
        // v_3 = 2, v_7 = 6, v_9 = 8
        let w = [VertexId(8), VertexId(2), VertexId(6)];
        assert_eq!(rank_map(&state, w), vec![3, 7, 9]);
        assert_eq!(rank_map(&state, [VertexId(4)]), vec![5]);
        assert!(rank_map(&state, []).is_empty());
    }

    #[test]
    fn vanilla_hand_simulation() {
        let mut state = MakerState::new();
        let mut ledger = ClaimLedger::new();

        let (e, note) = vanilla_next(&mut state, &ledger);
        assert_eq!((e, note.rule), (Edge::of(0, 1), Rule::Opening));
        play(&mut ledger, e, Player::Maker);
        play(&mut ledger, Edge::of(1000, 1001), Player::Breaker);

        // v_1 already joined to v_2: introduce 2
        let (e, note) = vanilla_next(&mut state, &ledger);
        assert_eq!((e, note.rule), (Edge::of(0, 2), Rule::Fresh));
        play(&mut ledger, e, Player::Maker);
        play(&mut ledger, Edge::of(1000, 1002), Player::Breaker);

        let (e, note) = vanilla_next(&mut state, &ledger);
        assert_eq!((e, note.rule), (Edge::of(1, 2), Rule::Connect));
        play(&mut ledger, e, Player::Maker);
        play(&mut ledger, Edge::of(1001, 1002), Player::Breaker);

        // triangle done, v_3 saturated
        let (e, note) = vanilla_next(&mut state, &ledger);
        assert_eq!((e, note.rule), (Edge::of(0, 3), Rule::Fresh));
    }

    #[test]
    fn vanilla_skips_breaker_blocked_candidate() {
        let mut state = MakerState::from_order([VertexId(0), VertexId(1), VertexId(2)]);
        let mut ledger = ClaimLedger::new();
        for (e, p) in [
            (Edge::of(0, 1), Player::Maker),
            (Edge::of(5, 6), Player::Breaker),
            (Edge::of(0, 2), Player::Maker),
            (Edge::of(1, 2), Player::Breaker),
        ] {
            play(&mut ledger, e, p);
        }
        let (e, note) = vanilla_next(&mut state, &ledger);
        assert_eq!((e, note.rule), (Edge::of(0, 3), Rule::Fresh));
    }

    #[test]
    fn finite_colours_opening_and_second_move() {
        let colouring = Colouring::ModK { k: 2 };
        let mut state = MakerState::new();
        let mut ledger = ClaimLedger::new();
        let (e, note) = finite_colours_next(&mut state, &ledger, &colouring, 2);
        assert_eq!(e, Edge::of(0, 1));
        assert_eq!(note.introduced, vec![VertexId(1), VertexId(0)]);
        play(&mut ledger, e, Player::Maker);
        play(&mut ledger, Edge::of(1000, 1001), Player::Breaker);

        let (e, note) = finite_colours_next(&mut state, &ledger, &colouring, 2);
        assert_eq!(e, Edge::of(1, 3));
        assert_eq!(note.rule, Rule::Fresh);
        assert_eq!(state.vertex(3), VertexId(3));
    }

    #[test]
    fn balanced_order_is_lexicographic() {
        // F-members v_2, v_4, v_9 with overlaps 1, 0, 0 are tried as v_4, v_9, v_2
        let state = MakerState::from_order((0..12).map(VertexId));
        let mut ledger = ClaimLedger::new();
        let k_set: HashSet<VertexId> = [VertexId(10)].into();
        play(&mut ledger, Edge::of(1, 10), Player::Maker); // v_2 = 1 touches K
        let vn = VertexId(11);
        let (e, rank) = pick_balanced(&state, &ledger, vn, &[2, 4, 9], &k_set).unwrap();
        assert_eq!((e, rank), (Edge::of(3, 11), 1));
        play(&mut ledger, Edge::of(3, 11), Player::Breaker);
        let (e, rank) = pick_balanced(&state, &ledger, vn, &[2, 4, 9], &k_set).unwrap();
        assert_eq!((e, rank), (Edge::of(8, 11), 2));
        play(&mut ledger, Edge::of(8, 11), Player::Breaker);
        let (e, rank) = pick_balanced(&state, &ledger, vn, &[2, 4, 9], &k_set).unwrap();
        assert_eq!((e, rank), (Edge::of(1, 11), 3));
    }

    #[test]
    fn infinite_colours_opening() {
        let mut state = MakerState::new();
        let ledger = ClaimLedger::new();
        let (e, _) = infinite_colours_next(&mut state, &ledger, &Colouring::Diagonal, ColourSequence::AntiDiagonal);
        assert_eq!(e, Edge::of(0, 1));
        assert_eq!(state.order(), &[VertexId(0), VertexId(1)]);
    }

    #[test]
    fn anti_diagonal_sequence() {
        let s: Vec<u64> = (1..=10).map(|n| ColourSequence::AntiDiagonal.at(n).0).collect();
        assert_eq!(s, vec![0, 0, 1, 0, 1, 2, 0, 1, 2, 3]);
    }

    #[test]
    fn target_colour_via_rank_map() {
        // U = {v_3, v_5}, c(v_3) != c(v_5) = c(v_n): |U′| = 1, φ_U(1) = 3
        let state = MakerState::from_order((0..6).map(VertexId));
        let u = rank_map(&state, [VertexId(2), VertexId(4)]);
        let u_prime = 1;
        assert_eq!(u[u_prime - 1], 3);
    }

    #[test]
    fn constructors_check_colouring() {
        assert!(FiniteColoursMaker::new(2, &Colouring::Diagonal).is_err());
        assert!(FiniteColoursMaker::new(3, &Colouring::ModK { k: 2 }).is_err());
        assert!(FiniteColoursMaker::new(2, &Colouring::ModK { k: 2 }).is_ok());
        assert!(InfiniteColoursMaker::new(ColourSequence::AntiDiagonal, &Colouring::ModK { k: 2 }).is_err());
    }
}
