//! Allowable colouring words and the ordered state spaces built from them.
//!
//! Every family of words used here (open and periodic rows, 3-D slab colourings,
//! helical slab words, slanted chains) is a [`WordShape`]: a word length plus a
//! list of ordered cell pairs `(a, b)` that must be edges of a given graph.
//! Words are packed into a `u64`, first cell most significant, so numeric order
//! on packed words is lexicographic order on colours.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::graph::ConstraintGraph;
use super::system::ConstraintSystem;
use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "open" | "aperiodic" => Ok(Boundary::Open),
            "periodic" | "per" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidArgument(format!("unknown boundary `{other}`"))),
        }
    }
}

/// A finite colour sequence, 0-based colours; displayed 1-based.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColoringWord(Vec<u8>);

impl ColoringWord {
    pub fn new(colours: Vec<u8>) -> Self {
        Self(colours)
    }

    /// From 1-based colours, as written in files and reports.
    pub fn from_one_based(colours: &[u8]) -> Self {
        Self(colours.iter().map(|c| c - 1).collect())
    }

    pub fn colours(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ColoringWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.0.iter().any(|&c| c >= 9);
        for (i, c) in self.0.iter().enumerate() {
            if wide && i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", c + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for ColoringWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColoringWord({self})")
    }
}

/// `(word[first], word[second])` must be an edge of `graphs[graph]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Pair {
    pub first: usize,
    pub second: usize,
    pub graph: usize,
}

impl Pair {
    #[inline]
    fn partner(&self, p: usize) -> usize {
        if self.first == p {
            self.second
        } else {
            self.first
        }
    }
}

/// Bits per colour in a packed word.
pub(crate) fn colour_bits(k: usize) -> u32 {
    (usize::BITS - (k.max(2) - 1).leading_zeros()).max(1)
}

#[derive(Clone, Debug)]
pub(crate) struct WordShape {
    len: usize,
    k: usize,
    bits: u32,
    graphs: Vec<ConstraintGraph>,
    pairs: Vec<Pair>,
    /// Pairs whose later cell is `p`.
    back: Vec<Vec<Pair>>,
    /// Pairs whose earlier cell is `p`.
    fwd: Vec<Vec<Pair>>,
}

impl WordShape {
    pub fn new(len: usize, graphs: Vec<ConstraintGraph>, pairs: Vec<Pair>) -> Self {
        let k = graphs.first().map_or(1, ConstraintGraph::k);
        let mut back = vec![Vec::new(); len];
        let mut fwd = vec![Vec::new(); len];
        for pair in &pairs {
            let (lo, hi) = (pair.first.min(pair.second), pair.first.max(pair.second));
            back[hi].push(*pair);
            fwd[lo].push(*pair);
        }
        Self { len, k, bits: colour_bits(k), graphs, pairs, back, fwd }
    }

    /// Axis-aligned box `dims[0] x dims[1] x ...`, cell index `x0 + dims[0] * (x1 + dims[1] * ...)`;
    /// `graphs[i]` constrains neighbours along axis `i`.
    pub fn grid(graphs: &[ConstraintGraph], dims: &[usize], bc: &[Boundary]) -> Self {
        assert_eq!(graphs.len(), dims.len());
        assert_eq!(bc.len(), dims.len());
        let len: usize = dims.iter().product();
        let mut pairs = Vec::new();
        let mut stride = 1;
        for (axis, &n) in dims.iter().enumerate() {
            for cell in 0..len {
                let x = (cell / stride) % n;
                if x + 1 < n {
                    pairs.push(Pair { first: cell, second: cell + stride, graph: axis });
                } else if bc[axis] == Boundary::Periodic {
                    pairs.push(Pair { first: cell, second: cell + stride - n * stride, graph: axis });
                }
            }
            stride *= n;
        }
        Self::new(len, graphs.to_vec(), pairs)
    }

    /// Chain of length `len` with pairs `(i, i + skip)` for each `(skip, graph)` step.
    pub fn chain_with_skips(len: usize, steps: &[(usize, &ConstraintGraph)]) -> Self {
        let mut pairs = Vec::new();
        for (gi, &(skip, _)) in steps.iter().enumerate() {
            for i in 0..len.saturating_sub(skip) {
                pairs.push(Pair { first: i, second: i + skip, graph: gi });
            }
        }
        Self::new(len, steps.iter().map(|(_, g)| (*g).clone()).collect(), pairs)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn graphs(&self) -> &[ConstraintGraph] {
        &self.graphs
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn fits_packed(&self) -> bool {
        self.len as u64 * self.bits as u64 <= 64
    }

    fn mask(&self) -> u64 {
        (1u64 << self.bits) - 1
    }

    #[inline]
    fn pair_ok(&self, pair: &Pair, p: usize, colour: usize, other: usize) -> bool {
        let g = &self.graphs[pair.graph];
        if pair.first == p && pair.second == p {
            g.has_edge(colour, colour)
        } else if pair.first == p {
            g.has_edge(colour, other)
        } else {
            g.has_edge(other, colour)
        }
    }

    /// Can cell `p` (the last cell of a prefix with `p` earlier cells packed in `prefix`) take `colour`?
    #[inline]
    pub fn prefix_accepts(&self, prefix: u64, p: usize, colour: usize) -> bool {
        let mask = self.mask();
        self.back[p].iter().all(|pair| {
            let q = pair.partner(p);
            let other = if q == p { colour } else { ((prefix >> (self.bits as usize * (p - 1 - q))) & mask) as usize };
            self.pair_ok(pair, p, colour, other)
        })
    }

    /// Can cell `p` take `colour` in front of the suffix `rest` holding cells `p+1..len`?
    #[inline]
    pub fn suffix_accepts(&self, rest: u64, p: usize, colour: usize) -> bool {
        let mask = self.mask();
        self.fwd[p].iter().all(|pair| {
            let q = pair.partner(p);
            let other = if q == p { colour } else { ((rest >> (self.bits as usize * (self.len - 1 - q))) & mask) as usize };
            self.pair_ok(pair, p, colour, other)
        })
    }

    /// Can cell `p` take `colour` given the colours of cells `0..p` in `colours`?
    #[inline]
    pub fn accepts_colours(&self, colours: &[u8], p: usize, colour: usize) -> bool {
        self.back[p].iter().all(|pair| {
            let q = pair.partner(p);
            let other = if q == p { colour } else { colours[q] as usize };
            self.pair_ok(pair, p, colour, other)
        })
    }

    /// Extends every prefix of length `p` by one colour, in lexicographic order.
    pub fn extend_prefixes(&self, level: &[u64], p: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(level.len() * 2);
        for &w in level {
            for c in 0..self.k {
                if self.prefix_accepts(w, p, c) {
                    out.push((w << self.bits) | c as u64);
                }
            }
        }
        out
    }

    /// Prepends one colour at cell `p` to every suffix covering `p+1..len`, in lexicographic order.
    pub fn extend_suffixes(&self, level: &[u64], p: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(level.len() * 2);
        let shift = self.bits as usize * (self.len - 1 - p);
        for c in 0..self.k {
            for &rest in level {
                if self.suffix_accepts(rest, p, c) {
                    out.push(((c as u64) << shift) | rest);
                }
            }
        }
        out
    }

    /// All allowable words, sorted.
    pub fn enumerate(&self) -> Vec<u64> {
        let mut level = vec![0u64];
        for p in 0..self.len {
            level = self.extend_prefixes(&level, p);
        }
        level
    }

    /// Same constraints with cell order reversed; prefix counts of the mirror are suffix counts.
    fn mirrored(&self) -> Self {
        let last = self.len.saturating_sub(1);
        let pairs = self
            .pairs
            .iter()
            .map(|p| Pair { first: last - p.first, second: last - p.second, graph: p.graph })
            .collect();
        Self::new(self.len, self.graphs.clone(), pairs)
    }

    /// Exact number of valid prefixes of each length `0..=len`, by a frontier DP whose
    /// state is the colouring of the cells that still have constraints ahead.
    /// `None` when the frontier grows too large to track.
    pub fn prefix_counts(&self) -> Option<Vec<u128>> {
        const MAX_FRONTIER_STATES: usize = 1 << 22;
        let bits = self.bits as usize;
        let mask = self.mask();
        // last cell each cell is paired with
        let mut horizon: Vec<usize> = (0..self.len).collect();
        for pair in &self.pairs {
            let hi = pair.first.max(pair.second);
            for c in [pair.first, pair.second] {
                horizon[c] = horizon[c].max(hi);
            }
        }
        let mut active: Vec<usize> = Vec::new();
        let mut states: HashMap<u64, u128> = HashMap::from([(0u64, 1u128)]);
        let mut counts = vec![1u128];
        for p in 0..self.len {
            let next_active: Vec<usize> =
                active.iter().copied().chain(std::iter::once(p)).filter(|&c| horizon[c] > p).collect();
            if next_active.len() * bits > 64 {
                return None;
            }
            let mut next: HashMap<u64, u128> = HashMap::with_capacity(states.len() * 2);
            let mut total = 0u128;
            for (&state, &count) in &states {
                let colour_of = |c: usize| -> usize {
                    let pos = active.iter().position(|&a| a == c).expect("partner is active");
                    ((state >> (bits * pos)) & mask) as usize
                };
                for colour in 0..self.k {
                    let ok = self.back[p].iter().all(|pair| {
                        let q = pair.partner(p);
                        let other = if q == p { colour } else { colour_of(q) };
                        self.pair_ok(pair, p, colour, other)
                    });
                    if !ok {
                        continue;
                    }
                    let mut key = 0u64;
                    for (pos, &c) in next_active.iter().enumerate() {
                        let v = if c == p { colour } else { colour_of(c) };
                        key |= (v as u64) << (bits * pos);
                    }
                    let slot = next.entry(key).or_insert(0);
                    *slot = slot.saturating_add(count);
                    total = total.saturating_add(count);
                }
            }
            if next.len() > MAX_FRONTIER_STATES {
                return None;
            }
            counts.push(total);
            states = next;
            active = next_active;
        }
        Some(counts)
    }

    /// Number of valid suffixes starting at each cell `0..=len` (index `len` is the empty suffix).
    pub fn suffix_counts(&self) -> Option<Vec<u128>> {
        let mut c = self.mirrored().prefix_counts()?;
        c.reverse();
        Some(c)
    }

    /// Exact word count when tractable, otherwise the crude bound `k^len`.
    pub fn projected_count(&self) -> u128 {
        match self.prefix_counts() {
            Some(c) => *c.last().expect("non-empty"),
            None => (self.k as u128).saturating_pow(self.len as u32),
        }
    }

    pub fn guard(&self, limits: &Limits) -> Result<u128> {
        if !self.fits_packed() {
            return Err(Error::CapacityExceeded {
                guard: "packed word width (bits)",
                estimate: self.len as u128 * self.bits as u128,
                limit: 64,
            });
        }
        let estimate = self.projected_count();
        if estimate > limits.max_states as u128 {
            return Err(Error::CapacityExceeded { guard: "state count", estimate, limit: limits.max_states });
        }
        Ok(estimate)
    }
}

/// What kind of words a [`StateSpace`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WordKind {
    /// Rows of length `n`; periodic adds the wrap pair `(w(n), w(1))`.
    Row { n: usize, boundary: Boundary },
    /// Colourings of an `n1 x n2` slab, linearised row by row along axis 1.
    Slab { n1: usize, n2: usize, bc: [Boundary; 2] },
    /// Axis-1 chains of length `n1*n2` with the skip-`n1` axis-2 condition.
    HelicalSlab { n1: usize, n2: usize },
}

impl fmt::Display for WordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordKind::Row { n, boundary } => write!(f, "row n={n} {boundary}"),
            WordKind::Slab { n1, n2, bc } => write!(f, "slab {n1}x{n2} {}/{}", bc[0], bc[1]),
            WordKind::HelicalSlab { n1, n2 } => write!(f, "helical {n1}x{n2}"),
        }
    }
}

/// Lexicographically sorted, duplicate-free list of allowable words with an index.
#[derive(Clone)]
pub struct StateSpace {
    words: Vec<u64>,
    word_len: usize,
    k: usize,
    bits: u32,
    kind: WordKind,
    system: String,
}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSpace({}, {} states, system {})", self.kind, self.words.len(), self.system)
    }
}

impl StateSpace {
    pub(crate) fn from_shape(shape: &WordShape, kind: WordKind, system: String, limits: &Limits) -> Result<Self> {
        shape.guard(limits)?;
        Ok(Self::from_sorted(shape.enumerate(), shape, kind, system))
    }

    pub(crate) fn from_sorted(words: Vec<u64>, shape: &WordShape, kind: WordKind, system: String) -> Self {
        debug_assert!(words.windows(2).all(|w| w[0] < w[1]));
        Self { words, word_len: shape.len(), k: shape.k(), bits: shape.bits(), kind, system }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> WordKind {
        self.kind
    }

    /// Fingerprint of the generating constraint system.
    pub fn system(&self) -> &str {
        &self.system
    }

    pub(crate) fn packed_words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn pack(&self, w: &ColoringWord) -> Option<u64> {
        if w.len() != self.word_len || w.colours().iter().any(|&c| c as usize >= self.k) {
            return None;
        }
        Some(w.colours().iter().fold(0u64, |acc, &c| (acc << self.bits) | c as u64))
    }

    #[inline]
    pub(crate) fn index_of_packed(&self, packed: u64) -> Option<usize> {
        self.words.binary_search(&packed).ok()
    }

    /// Colour at position `i` of a packed word.
    #[inline]
    pub(crate) fn colour_at(&self, packed: u64, i: usize) -> usize {
        ((packed >> (self.bits as usize * (self.word_len - 1 - i))) & ((1u64 << self.bits) - 1)) as usize
    }

    pub fn word(&self, i: usize) -> ColoringWord {
        let packed = self.words[i];
        ColoringWord((0..self.word_len).map(|p| self.colour_at(packed, p) as u8).collect())
    }

    pub fn index_of(&self, w: &ColoringWord) -> Option<usize> {
        self.pack(w).and_then(|p| self.index_of_packed(p))
    }

    pub fn iter(&self) -> impl Iterator<Item = ColoringWord> + '_ {
        (0..self.len()).map(|i| self.word(i))
    }
}

pub(crate) fn row_shape(g: &ConstraintGraph, n: usize, boundary: Boundary) -> WordShape {
    WordShape::grid(std::slice::from_ref(g), &[n], &[boundary])
}

pub(crate) fn slab_shape(sys: &ConstraintSystem, n1: usize, n2: usize, bc: [Boundary; 2]) -> WordShape {
    WordShape::grid(&sys.axes()[..2], &[n1, n2], &bc)
}

pub(crate) fn helical_shape(sys: &ConstraintSystem, n1: usize, n2: usize) -> WordShape {
    WordShape::chain_with_skips(n1 * n2, &[(1, sys.axis(0)), (n1, sys.axis(1))])
}

fn graph_fingerprint(g: &ConstraintGraph) -> String {
    ConstraintSystem::new(vec![g.clone()]).map(|s| s.fingerprint()).unwrap_or_default()
}

/// All length-`n` words whose consecutive pairs are edges of `g` (plus the wrap pair when periodic).
pub fn enumerate_words(g: &ConstraintGraph, n: usize, boundary: Boundary) -> Result<StateSpace> {
    enumerate_words_with_limits(g, n, boundary, &Limits::from_env())
}

pub fn enumerate_words_with_limits(
    g: &ConstraintGraph,
    n: usize,
    boundary: Boundary,
    limits: &Limits,
) -> Result<StateSpace> {
    if n == 0 {
        return Err(Error::InvalidArgument("word length must be at least 1".into()));
    }
    StateSpace::from_shape(&row_shape(g, n, boundary), WordKind::Row { n, boundary }, graph_fingerprint(g), limits)
}

/// Axis-1 chains of length `n1*n2` that also satisfy `(w(i), w(i+n1))` on axis 2.
pub fn enumerate_helical_slab_words(sys: &ConstraintSystem, n1: usize, n2: usize) -> Result<StateSpace> {
    enumerate_helical_slab_words_with_limits(sys, n1, n2, &Limits::from_env())
}

pub fn enumerate_helical_slab_words_with_limits(
    sys: &ConstraintSystem,
    n1: usize,
    n2: usize,
    limits: &Limits,
) -> Result<StateSpace> {
    if sys.d() < 2 {
        return Err(Error::InvalidArgument("helical slab words need at least two axes".into()));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("slab sides must be at least 1".into()));
    }
    StateSpace::from_shape(&helical_shape(sys, n1, n2), WordKind::HelicalSlab { n1, n2 }, sys.fingerprint(), limits)
}

/// Colourings of the `n1 x n2` slab allowed by axes 1 and 2, open or cyclic per axis.
pub fn enumerate_slab_words(sys: &ConstraintSystem, n1: usize, n2: usize, bc: [Boundary; 2]) -> Result<StateSpace> {
    if sys.d() < 2 {
        return Err(Error::InvalidArgument("slab words need at least two axes".into()));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("slab sides must be at least 1".into()));
    }
    StateSpace::from_shape(&slab_shape(sys, n1, n2, bc), WordKind::Slab { n1, n2, bc }, sys.fingerprint(), &Limits::from_env())
}
