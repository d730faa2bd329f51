//! The infinite complete board on vertex set ℕ, vertex precolourings, and
//! the claim ledger that records who took which edge on which turn.
//!
//! Nothing here is ever allocated per vertex up front: any `u64` is a valid
//! vertex, and colour classes are produced lazily as increasing iterators.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColourId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ColourId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    #[serde(rename = "M")]
    Maker,
    #[serde(rename = "B")]
    Breaker,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Maker => Player::Breaker,
            Player::Breaker => Player::Maker,
        }
    }

    fn slot(self) -> usize {
        match self {
            Player::Maker => 0,
            Player::Breaker => 1,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Maker => f.write_str("Maker"),
            Player::Breaker => f.write_str("Breaker"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoardError {
    #[error("self-loop at vertex {0} is not an edge")]
    SelfLoop(VertexId),
    #[error("edge enumeration is 1-based; index 0 does not exist")]
    ZeroIndex,
    #[error("edge {edge} claimed by {by} at turn {turn}")]
    AlreadyClaimed { edge: Edge, by: Player, turn: u64 },
    #[error("turn {got} does not follow turn {expected_after}")]
    NonContiguousTurn { expected_after: u64, got: u64 },
    #[error("invalid colouring: {0}")]
    InvalidColouring(String),
}

/// An unordered pair of distinct vertices, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u64; 2]", into = "[u64; 2]")]
pub struct Edge {
    lo: VertexId,
    hi: VertexId,
}

impl Edge {
    pub fn new(u: VertexId, v: VertexId) -> Result<Edge, BoardError> {
        canonical_edge(u, v)
    }

    /// Shorthand for tests and literals. Panics on a self-loop.
    pub fn of(u: u64, v: u64) -> Edge {
        canonical_edge(VertexId(u), VertexId(v)).expect("self-loop")
    }

    pub fn lo(self) -> VertexId {
        self.lo
    }

    pub fn hi(self) -> VertexId {
        self.hi
    }

    pub fn endpoints(self) -> [VertexId; 2] {
        [self.lo, self.hi]
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.lo == v || self.hi == v
    }

    /// The endpoint that is not `v`, if `v` is an endpoint.
    pub fn other(self, v: VertexId) -> Option<VertexId> {
        if v == self.lo {
            Some(self.hi)
        } else if v == self.hi {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.lo, self.hi)
    }
}

impl TryFrom<[u64; 2]> for Edge {
    type Error = String;

    fn try_from([lo, hi]: [u64; 2]) -> Result<Self, Self::Error> {
        if lo >= hi {
            return Err(format!("edge [{lo}, {hi}] is not in canonical form lo < hi"));
        }
        Ok(Edge { lo: VertexId(lo), hi: VertexId(hi) })
    }
}

impl From<Edge> for [u64; 2] {
    fn from(e: Edge) -> Self {
        [e.lo.0, e.hi.0]
    }
}

pub fn canonical_edge(u: VertexId, v: VertexId) -> Result<Edge, BoardError> {
    match u.cmp(&v) {
        std::cmp::Ordering::Less => Ok(Edge { lo: u, hi: v }),
        std::cmp::Ordering::Greater => Ok(Edge { lo: v, hi: u }),
        std::cmp::Ordering::Equal => Err(BoardError::SelfLoop(u)),
    }
}

fn triangular(s: u64) -> u64 {
    s * (s + 1) / 2
}

/// Largest `s` with `s(s+1)/2 <= n`.
fn triangular_root(n: u64) -> u64 {
    let mut s = ((8 * n as u128 + 1).isqrt() as u64 - 1) / 2;
    while triangular(s + 1) <= n {
        s += 1;
    }
    while triangular(s) > n {
        s -= 1;
    }
    s
}

/// The `n`-th edge (1-based) of the fixed board enumeration: edges sorted by
/// `(hi, lo)`, i.e. `{0,1}, {0,2}, {1,2}, {0,3}, {1,3}, {2,3}, …`.
pub fn edge_enumeration(n: u64) -> Result<Edge, BoardError> {
    if n == 0 {
        return Err(BoardError::ZeroIndex);
    }
    let m = n - 1;
    // hi(hi-1)/2 <= m, i.e. triangular(hi-1) <= m
    let hi = triangular_root(m) + 1;
    let lo = m - triangular(hi - 1);
    Ok(Edge { lo: VertexId(lo), hi: VertexId(hi) })
}

/// Inverse of [`edge_enumeration`].
pub fn edge_index(e: Edge) -> u64 {
    triangular(e.hi.0 - 1) + e.lo.0 + 1
}

/// A precolouring of the board's vertices.
///
/// Every colour class is infinite for every variant; [`Colouring::validate`]
/// rejects tables whose overrides would introduce a finite class.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Colouring {
    /// `n ↦ n mod k`.
    ModK { k: u64 },
    /// `s(s+1)/2 + i ↦ i` for `0 <= i <= s`.
    #[default]
    Diagonal,
    /// Finitely many explicit overrides on top of a fallback colouring.
    Table {
        #[serde(with = "override_pairs")]
        overrides: BTreeMap<u64, u64>,
        fallback: Box<Colouring>,
    },
}

/// Overrides travel as `[[vertex, colour], ...]`: integer map keys do not
/// survive the buffering serde does for tagged enums.
mod override_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<u64, u64>, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[u64; 2]> = map.iter().map(|(&v, &c)| [v, c]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, u64>, D::Error> {
        let pairs = Vec::<[u64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[v, c]| (v, c)).collect())
    }
}

impl Colouring {
    pub fn validate(&self) -> Result<(), BoardError> {
        match self {
            Colouring::ModK { k: 0 } => Err(BoardError::InvalidColouring("modk needs k >= 1".into())),
            Colouring::ModK { .. } | Colouring::Diagonal => Ok(()),
            Colouring::Table { overrides, fallback } => {
                fallback.validate()?;
                if let Some(k) = fallback.num_colours() {
                    if let Some((v, c)) = overrides.iter().find(|(_, &c)| c >= k) {
                        return Err(BoardError::InvalidColouring(format!(
                            "override {v} -> {c} lies outside the fallback's {k} colours"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// `Some(k)` for a colouring onto `{0,…,k-1}`, `None` for infinitely many colours.
    pub fn num_colours(&self) -> Option<u64> {
        match self {
            Colouring::ModK { k } => Some(*k),
            Colouring::Diagonal => None,
            Colouring::Table { fallback, .. } => fallback.num_colours(),
        }
    }

    pub fn colour_of(&self, v: VertexId) -> ColourId {
        match self {
            Colouring::ModK { k } => ColourId(v.0 % k),
            Colouring::Diagonal => ColourId(v.0 - triangular(triangular_root(v.0))),
            Colouring::Table { overrides, fallback } => match overrides.get(&v.0) {
                Some(&c) => ColourId(c),
                None => fallback.colour_of(v),
            },
        }
    }

    /// Members of the colour class `c⁻¹(colour)` in increasing order.
    pub fn class_members(&self, colour: ColourId) -> Box<dyn Iterator<Item = VertexId> + '_> {
        match self {
            Colouring::ModK { k } => {
                let k = *k;
                if colour.0 >= k {
                    return Box::new(std::iter::empty());
                }
                Box::new((0..).map(move |j| VertexId(colour.0 + j * k)))
            }
            Colouring::Diagonal => Box::new((colour.0..).map(move |s| VertexId(triangular(s) + colour.0))),
            Colouring::Table { overrides, fallback } => {
                let base = fallback.class_members(colour).filter(|v| !overrides.contains_key(&v.0));
                let extra = overrides.iter().filter(move |(_, &c)| c == colour.0).map(|(&v, _)| VertexId(v));
                Box::new(MergeAscending::new(base, extra))
            }
        }
    }
}

/// Merges two strictly increasing vertex streams.
struct MergeAscending<A: Iterator, B: Iterator> {
    a: std::iter::Peekable<A>,
    b: std::iter::Peekable<B>,
}

impl<A, B> MergeAscending<A, B>
where
    A: Iterator<Item = VertexId>,
    B: Iterator<Item = VertexId>,
{
    fn new(a: A, b: B) -> Self {
        MergeAscending { a: a.peekable(), b: b.peekable() }
    }
}

impl<A, B> Iterator for MergeAscending<A, B>
where
    A: Iterator<Item = VertexId>,
    B: Iterator<Item = VertexId>,
{
    type Item = VertexId;

    fn next(&mut self) -> Option<VertexId> {
        match (self.a.peek(), self.b.peek()) {
            (Some(x), Some(y)) if y < x => self.b.next(),
            (Some(_), _) => self.a.next(),
            (None, _) => self.b.next(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub turn: u64,
    pub player: Player,
    pub edge: Edge,
}

/// Ordered record of every claim in a game.
///
/// Neighbour lists are kept per player in claim order, so
/// `neighbours(Maker, w)` is exactly the order in which Maker connected `w`.
#[derive(Debug, Clone, Default)]
pub struct ClaimLedger {
    claims: Vec<Claim>,
    index: HashMap<Edge, usize>,
    adjacency: [HashMap<VertexId, Vec<VertexId>>; 2],
}

impl PartialEq for ClaimLedger {
    fn eq(&self, other: &Self) -> bool {
        self.claims == other.claims
    }
}

impl Eq for ClaimLedger {}

impl ClaimLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `player` taking `edge` on `turn`, which must be the next turn.
    pub fn claim(&mut self, edge: Edge, player: Player, turn: u64) -> Result<(), BoardError> {
        if let Some(prior) = self.claim_of(edge) {
            return Err(BoardError::AlreadyClaimed { edge, by: prior.player, turn: prior.turn });
        }
        let last = self.last_turn();
        if turn != last + 1 {
            return Err(BoardError::NonContiguousTurn { expected_after: last, got: turn });
        }
        self.index.insert(edge, self.claims.len());
        self.claims.push(Claim { turn, player, edge });
        let adj = &mut self.adjacency[player.slot()];
        adj.entry(edge.lo).or_default().push(edge.hi);
        adj.entry(edge.hi).or_default().push(edge.lo);
        Ok(())
    }

    /// Claims on the next turn number.
    pub fn push(&mut self, edge: Edge, player: Player) -> Result<(), BoardError> {
        self.claim(edge, player, self.last_turn() + 1)
    }

    pub fn claims(&self) -> &[Claim] {
        &self.claims
    }

    pub fn len(&self) -> usize {
        self.claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.claims.is_empty()
    }

    pub fn last_turn(&self) -> u64 {
        self.claims.last().map_or(0, |c| c.turn)
    }

    pub fn claim_of(&self, edge: Edge) -> Option<&Claim> {
        self.index.get(&edge).map(|&i| &self.claims[i])
    }

    pub fn owner(&self, edge: Edge) -> Option<Player> {
        self.claim_of(edge).map(|c| c.player)
    }

    pub fn is_claimed(&self, edge: Edge) -> bool {
        self.index.contains_key(&edge)
    }

    pub fn owns(&self, player: Player, edge: Edge) -> bool {
        self.owner(edge) == Some(player)
    }

    /// Like [`ClaimLedger::owns`] but tolerates `u == v` (never owned).
    pub fn joined(&self, player: Player, u: VertexId, v: VertexId) -> bool {
        canonical_edge(u, v).is_ok_and(|e| self.owns(player, e))
    }

    /// `N_c(v)` in the order the edges were claimed.
    pub fn neighbours(&self, player: Player, v: VertexId) -> &[VertexId] {
        self.adjacency[player.slot()].get(&v).map_or(&[], |n| n.as_slice())
    }

    pub fn degree(&self, player: Player, v: VertexId) -> usize {
        self.neighbours(player, v).len()
    }

    /// Whether `v` lies in `V(G_player)`.
    pub fn has_vertex(&self, player: Player, v: VertexId) -> bool {
        self.adjacency[player.slot()].contains_key(&v)
    }

    /// A fresh vertex is incident with no claimed edge of either player.
    pub fn is_fresh(&self, v: VertexId) -> bool {
        !self.has_vertex(Player::Maker, v) && !self.has_vertex(Player::Breaker, v)
    }

    /// Vertices of `G_player`, sorted.
    pub fn vertices(&self, player: Player) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = self.adjacency[player.slot()].keys().copied().collect();
        vs.sort_unstable();
        vs
    }

    pub fn last_claim_by(&self, player: Player) -> Option<&Claim> {
        self.claims.iter().rev().find(|c| c.player == player)
    }

    /// Smallest fresh vertex, optionally drawn from an increasing candidate stream.
    pub fn smallest_fresh(&self, mut candidates: impl Iterator<Item = VertexId>) -> VertexId {
        candidates
            .find(|&v| self.is_fresh(v))
            .expect("candidate stream is infinite and only finitely many vertices are touched")
    }

    /// Smallest unclaimed edge in the board enumeration at index `>= *cursor`,
    /// advancing the cursor past claimed prefix edges.
    pub fn smallest_unclaimed(&self, cursor: &mut u64) -> Edge {
        *cursor = (*cursor).max(1);
        loop {
            let e = edge_enumeration(*cursor).expect("cursor >= 1");
            if !self.is_claimed(e) {
                return e;
            }
            *cursor += 1;
        }
    }
}
