use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::format::format_system;
use super::graph::{hard_square_graph, ConstraintGraph};
use crate::error::{Error, Result};

/// A dimension `d` together with one constraint graph per lattice axis.
///
/// The `symmetric` and `isotropic` flags are always derived from the graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    axes: Vec<ConstraintGraph>,
    symmetric: bool,
    isotropic: bool,
}

impl ConstraintSystem {
    pub fn new(axes: Vec<ConstraintGraph>) -> Result<Self> {
        let first = axes
            .first()
            .ok_or_else(|| Error::InvalidArgument("a system needs at least one axis".into()))?;
        let k = first.k();
        for (i, g) in axes.iter().enumerate() {
            if g.k() != k {
                return Err(Error::InconsistentColours {
                    axis: i + 1,
                    expected: k,
                    found: g.k(),
                });
            }
        }
        let symmetric = axes.iter().all(ConstraintGraph::is_symmetric);
        let isotropic = axes.iter().all(|g| g == first);
        Ok(Self { axes, symmetric, isotropic })
    }

    /// The same graph on each of `d` axes.
    pub fn isotropic(graph: ConstraintGraph, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        Self::new(vec![graph; d])
    }

    pub fn d(&self) -> usize {
        self.axes.len()
    }

    pub fn k(&self) -> usize {
        self.axes[0].k()
    }

    /// Graph for 0-based axis `i`.
    pub fn axis(&self, i: usize) -> &ConstraintGraph {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[ConstraintGraph] {
        &self.axes
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_isotropic(&self) -> bool {
        self.isotropic
    }

    /// System with axes `a` and `b` exchanged (e.g. `R_{n,1}` from the `R_{n,2}` builder).
    pub fn swap_axes(&self, a: usize, b: usize) -> Result<Self> {
        if a >= self.d() || b >= self.d() {
            return Err(Error::InvalidArgument(format!("axis out of range for d = {}", self.d())));
        }
        let mut axes = self.axes.clone();
        axes.swap(a, b);
        Self::new(axes)
    }

    /// Short stable digest of the canonical text form; used in operator descriptors.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(format_system(self).as_bytes());
        digest[..6].iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn hard_square_system(d: usize) -> Result<ConstraintSystem> {
    ConstraintSystem::isotropic(hard_square_graph(), d)
}

/// Monomer–dimer tilings of `Z^d` coded in `2d+1` colours.
///
/// 1-based colour `2d+1` is a monomer; `2i-1` and `2i` are the first and second half
/// of a dimer along axis `i`. With `same_axis_chain` the edge `(2i, 2i-1)` is added on
/// axis `i` so that two dimers may follow each other along their own axis; without
/// it the system no longer encodes all tilings (its 1-D growth rate drops to the
/// real root of `x^3 = x^2 + 1`).
pub fn monomer_dimer_system(d: usize, same_axis_chain: bool) -> Result<ConstraintSystem> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let k = 2 * d + 1;
    let mut axes = Vec::with_capacity(d);
    for i in 0..d {
        // 0-based halves of the axis-i dimer
        let (first, second) = (2 * i, 2 * i + 1);
        let others: Vec<usize> = (0..k).filter(|&c| c != first && c != second).collect();
        let mut g = ConstraintGraph::empty(k)?;
        for &a in &others {
            for &b in &others {
                g.add_edge(a, b);
            }
            g.add_edge(a, first);
            g.add_edge(second, a);
        }
        g.add_edge(first, second);
        if same_axis_chain {
            g.add_edge(second, first);
        }
        axes.push(g);
    }
    ConstraintSystem::new(axes)
}

#[derive(Clone, Debug, Serialize)]
pub struct AxisReport {
    /// 1-based axis number.
    pub axis: usize,
    /// 1-based colours.
    pub isolated: Vec<usize>,
    /// Strongly connected components as sorted lists of 1-based colours.
    pub components: Vec<Vec<usize>>,
    /// Every edge stays inside one strongly connected component.
    pub union_of_components: bool,
    pub strongly_connected: bool,
    pub symmetric: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub axes: Vec<AxisReport>,
    pub isotropic: bool,
}

impl ValidationReport {
    /// No isolated colours and every axis graph a disjoint union of strongly connected graphs.
    pub fn is_valid(&self) -> bool {
        self.axes.iter().all(|a| a.isolated.is_empty() && a.union_of_components)
    }

    pub fn all_strongly_connected(&self) -> bool {
        self.axes.iter().all(|a| a.strongly_connected)
    }
}

fn axis_report(axis: usize, g: &ConstraintGraph) -> AxisReport {
    let mut dg = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..g.k()).map(|_| dg.add_node(())).collect();
    for (i, j) in g.edges() {
        dg.add_edge(nodes[i], nodes[j], ());
    }
    let mut component_of = vec![0usize; g.k()];
    let mut components: Vec<Vec<usize>> = tarjan_scc(&dg)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    components.sort();
    for (ci, c) in components.iter().enumerate() {
        for &v in c {
            component_of[v] = ci;
        }
    }
    let union_of_components = g.edges().all(|(i, j)| component_of[i] == component_of[j]);
    AxisReport {
        axis: axis + 1,
        isolated: g.isolated_vertices().into_iter().map(|v| v + 1).collect(),
        strongly_connected: components.len() == 1 && (g.k() > 1 || g.has_edge(0, 0)),
        components: components
            .into_iter()
            .map(|c| c.into_iter().map(|v| v + 1).collect())
            .collect(),
        union_of_components,
        symmetric: g.is_symmetric(),
    }
}

/// Diagnoses isolated colours and strongly-connected structure on every axis.
pub fn validate_system(sys: &ConstraintSystem) -> ValidationReport {
    ValidationReport {
        axes: sys.axes().iter().enumerate().map(|(i, g)| axis_report(i, g)).collect(),
        isotropic: sys.is_isotropic(),
    }
}

/// Colours `j` with `(j, i)` and `(i, j)` on every axis for every colour `i`, `j` included.
pub fn find_friendly_colours(sys: &ConstraintSystem) -> Vec<usize> {
    let k = sys.k();
    let full: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    (0..k)
        .filter(|&j| {
            sys.axes().iter().all(|g| {
                g.row_mask(j) == full && (0..k).all(|i| g.has_edge(i, j))
            })
        })
        .collect()
}
