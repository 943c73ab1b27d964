use std::fmt;

use crate::error::{Error, Result};

/// Largest colour count a graph may carry; adjacency rows are stored as `u64` masks.
pub const MAX_COLOURS: usize = 64;

/// A digraph on `k` colours. Edge `(i, j)` means colour `j` may follow colour `i`
/// along the axis the graph is attached to.
///
/// Colours are 0-based in this API; text formats and reports print them 1-based.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConstraintGraph {
    k: usize,
    rows: Vec<u64>,
}

impl ConstraintGraph {
    /// Graph on `k` colours with no edges.
    pub fn empty(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_COLOURS {
            return Err(Error::InvalidArgument(format!(
                "colour count must be in 1..={MAX_COLOURS}, got {k}"
            )));
        }
        Ok(Self { k, rows: vec![0; k] })
    }

    /// Complete digraph with loops.
    pub fn complete(k: usize) -> Result<Self> {
        let mut g = Self::empty(k)?;
        for i in 0..k {
            for j in 0..k {
                g.add_edge(i, j);
            }
        }
        Ok(g)
    }

    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(k)?;
        for &(i, j) in edges {
            if i >= k || j >= k {
                return Err(Error::InvalidArgument(format!(
                    "edge ({}, {}) out of range for k = {k}",
                    i + 1,
                    j + 1
                )));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// # Panics
    /// If either colour is `>= k`.
    pub fn add_edge(&mut self, from: usize, to: usize) {
        assert!(from < self.k && to < self.k, "colour out of range");
        self.rows[from] |= 1 << to;
    }

    pub fn remove_edge(&mut self, from: usize, to: usize) {
        if from < self.k && to < self.k {
            self.rows[from] &= !(1 << to);
        }
    }

    #[inline]
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        (self.rows[from] >> to) & 1 == 1
    }

    /// Bit mask of the colours that may follow `from`.
    #[inline]
    pub fn row_mask(&self, from: usize) -> u64 {
        self.rows[from]
    }

    /// Edges in ascending `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.k).flat_map(move |i| (0..self.k).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self { k: self.k, rows: vec![0; self.k] };
        for (i, j) in self.edges() {
            t.add_edge(j, i);
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    /// A colour with neither in- nor out-edges can never appear in an allowable colouring.
    pub fn is_isolated(&self, v: usize) -> bool {
        self.rows[v] == 0 && self.rows.iter().all(|r| (r >> v) & 1 == 0)
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.k).filter(|&v| self.is_isolated(v)).collect()
    }

    /// Intersection of edge sets; both graphs must have the same `k`.
    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k);
        Self {
            k: self.k,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a & b).collect(),
        }
    }
}

impl fmt::Debug for ConstraintGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges().map(|(i, j)| format!("{}-{}", i + 1, j + 1)).collect();
        write!(f, "ConstraintGraph(k={}, [{}])", self.k, edges.join(" "))
    }
}

/// The run-length-limited (0,1) / hard-core graph: colour 1 ("occupied") may not
/// neighbour itself, colour 2 is unrestricted. Edges {(1,2),(2,1),(2,2)}.
pub fn hard_square_graph() -> ConstraintGraph {
    ConstraintGraph::from_edges(2, &[(0, 1), (1, 0), (1, 1)]).expect("static graph")
}
