//! 1-vertex transfer operators: the state is a word of length `L`, and a step drops the
//! first colour and appends one new colour, so each state has at most `k` successors.

use std::fmt;

use rayon::prelude::*;

use crate::constraint::words::{helical_shape, row_shape, WordShape};
use crate::constraint::{ConstraintGraph, ConstraintSystem, StateSpace, WordKind};
use crate::constraint::Boundary;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numeric::Accumulate;
use crate::operator::{check_index, Operator, Scratch, PAR_MIN_ROWS};

/// `S_{n,2}` / `P_{n,2}` in 2-D and `P_{(n1,n2),3}` in 3-D.
pub struct OneVertexOperator {
    states: StateSpace,
    k: usize,
    bits: u32,
    word_mask: u64,
    /// `(position in phi, graph)`: the appended colour `c` needs `(phi(position), c)` in `graph`.
    append_rules: Vec<(usize, ConstraintGraph)>,
    /// Cached successor table in CSR form, when small enough.
    table: Option<(Vec<usize>, Vec<u32>)>,
    descriptor: String,
}

impl fmt::Debug for OneVertexOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneVertexOperator({})", self.descriptor)
    }
}

/// States are the axis-1 words of length `n`; `phi -> phi(2..n) c` when
/// `(phi(n), c)` is an axis-1 edge and `(phi(1), c)` an axis-2 edge.
pub fn build_one_vertex_2d(sys: &ConstraintSystem, n: usize) -> Result<OneVertexOperator> {
    build_one_vertex_2d_with_limits(sys, n, &Limits::from_env())
}

pub fn build_one_vertex_2d_with_limits(sys: &ConstraintSystem, n: usize, limits: &Limits) -> Result<OneVertexOperator> {
    if sys.d() != 2 {
        return Err(Error::InvalidArgument(format!("2-D 1-vertex operators need d = 2, got d = {}", sys.d())));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("1-vertex operators need n >= 2".into()));
    }
    let shape = row_shape(sys.axis(0), n, Boundary::Open);
    let rules = vec![(n - 1, sys.axis(0).clone()), (0, sys.axis(1).clone())];
    let descriptor = format!("one-vertex-2d n={n} system={}", sys.fingerprint());
    build(sys, &shape, WordKind::Row { n, boundary: Boundary::Open }, rules, descriptor, limits)
}

/// States are the helical slab words of length `L = n1 n2`; `phi -> phi(2..L) c` when
/// `(phi(L), c)` is an axis-1 edge, `(phi(L - n1 + 1), c)` an axis-2 edge and
/// `(phi(1), c)` an axis-3 edge.
pub fn build_one_vertex_3d(sys: &ConstraintSystem, n1: usize, n2: usize) -> Result<OneVertexOperator> {
    build_one_vertex_3d_with_limits(sys, n1, n2, &Limits::from_env())
}

pub fn build_one_vertex_3d_with_limits(
    sys: &ConstraintSystem,
    n1: usize,
    n2: usize,
    limits: &Limits,
) -> Result<OneVertexOperator> {
    if sys.d() != 3 {
        return Err(Error::InvalidArgument(format!("3-D 1-vertex operators need d = 3, got d = {}", sys.d())));
    }
    if n1 == 0 || n2 == 0 || n1 * n2 < 2 {
        return Err(Error::InvalidArgument("1-vertex slab words need n1 * n2 >= 2".into()));
    }
    let len = n1 * n2;
    let shape = helical_shape(sys, n1, n2);
    let rules = vec![
        (len - 1, sys.axis(0).clone()),
        (len - n1, sys.axis(1).clone()),
        (0, sys.axis(2).clone()),
    ];
    let descriptor = format!("one-vertex-3d n1={n1} n2={n2} system={}", sys.fingerprint());
    build(sys, &shape, WordKind::HelicalSlab { n1, n2 }, rules, descriptor, limits)
}

fn build(
    sys: &ConstraintSystem,
    shape: &WordShape,
    kind: WordKind,
    append_rules: Vec<(usize, ConstraintGraph)>,
    descriptor: String,
    limits: &Limits,
) -> Result<OneVertexOperator> {
    let m = shape.guard(limits)?;
    let states = StateSpace::from_sorted(shape.enumerate(), shape, kind, sys.fingerprint());
    let bits = shape.bits();
    let width = bits as usize * shape.len();
    let word_mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
    let mut op = OneVertexOperator {
        states,
        k: shape.k(),
        bits,
        word_mask,
        append_rules,
        table: None,
        descriptor,
    };
    let entries = m.saturating_mul(op.k as u128);
    if entries <= limits.successor_cache_entries as u128 {
        op.table = Some(op.tabulate());
    } else {
        log::info!("{kind}: {m} states, successors computed on the fly ({entries} table entries over the cache limit)");
    }
    Ok(op)
}

impl OneVertexOperator {
    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn is_cached(&self) -> bool {
        self.table.is_some()
    }

    fn compute_successors(&self, i: usize, out: &mut Vec<usize>) {
        let phi = self.states.packed_words()[i];
        let shifted = (phi << self.bits) & self.word_mask;
        for c in 0..self.k {
            if self.append_rules.iter().all(|(pos, g)| g.has_edge(self.states.colour_at(phi, *pos), c)) {
                let j = self
                    .states
                    .index_of_packed(shifted | c as u64)
                    .expect("successor words are allowable by construction");
                out.push(j);
            }
        }
    }

    fn tabulate(&self) -> (Vec<usize>, Vec<u32>) {
        let m = self.states.len();
        let rows: Vec<Vec<u32>> = (0..m)
            .into_par_iter()
            .with_min_len(PAR_MIN_ROWS)
            .map_init(Vec::new, |buf, i| {
                buf.clear();
                self.compute_successors(i, buf);
                buf.iter().map(|&j| j as u32).collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(m + 1);
        let mut cols = Vec::with_capacity(m * 2);
        offsets.push(0);
        for r in rows {
            cols.extend(r);
            offsets.push(cols.len());
        }
        (offsets, cols)
    }
}

/// Sorted successor indices of `state_index`.
pub fn successors(op: &OneVertexOperator, state_index: usize) -> Result<Vec<usize>> {
    check_index(state_index, op.dim())?;
    Ok(op.row(state_index))
}

impl Operator for OneVertexOperator {
    fn dim(&self) -> usize {
        self.states.len()
    }

    fn accumulation_depth(&self) -> usize {
        self.k
    }

    fn descriptor(&self) -> String {
        self.descriptor.clone()
    }

    fn apply_with<T: Accumulate>(&self, x: &[T], y: &mut [T], _scratch: &mut Scratch<T>) {
        match &self.table {
            Some((offsets, cols)) => {
                y.par_iter_mut().enumerate().with_min_len(PAR_MIN_ROWS).for_each(|(i, yi)| {
                    yi.set_zero();
                    for &j in &cols[offsets[i]..offsets[i + 1]] {
                        yi.add_assign_ref(&x[j as usize]);
                    }
                });
            }
            None => {
                y.par_iter_mut().enumerate().with_min_len(PAR_MIN_ROWS).for_each_init(Vec::new, |buf, (i, yi)| {
                    buf.clear();
                    self.compute_successors(i, buf);
                    yi.set_zero();
                    for &j in buf.iter() {
                        yi.add_assign_ref(&x[j]);
                    }
                });
            }
        }
    }

    fn row_into(&self, i: usize, out: &mut Vec<usize>) {
        match &self.table {
            Some((offsets, cols)) => out.extend(cols[offsets[i]..offsets[i + 1]].iter().map(|&j| j as usize)),
            None => self.compute_successors(i, out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{hard_square_system, ColoringWord};
    use crate::operator::SparseMatrix;

    fn w(s: &[u8]) -> ColoringWord {
        ColoringWord::from_one_based(s)
    }

    #[test]
    fn s22_table() {
        let op = build_one_vertex_2d(&hard_square_system(2).unwrap(), 2).unwrap();
        let st = op.states();
        let idx = |s: &[u8]| st.index_of(&w(s)).unwrap();
        assert_eq!(successors(&op, idx(&[1, 2])).unwrap(), vec![idx(&[2, 2])]);
        assert_eq!(successors(&op, idx(&[2, 1])).unwrap(), vec![idx(&[1, 2])]);
        assert_eq!(successors(&op, idx(&[2, 2])).unwrap(), vec![idx(&[2, 1]), idx(&[2, 2])]);
        assert!(matches!(successors(&op, 3), Err(Error::IndexOutOfRange { index: 3, len: 3 })));
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(build_one_vertex_2d(&hard_square_system(2).unwrap(), 1).is_err());
        assert!(build_one_vertex_3d(&hard_square_system(3).unwrap(), 1, 1).is_err());
        assert!(build_one_vertex_3d(&hard_square_system(2).unwrap(), 2, 2).is_err());
    }

    #[test]
    fn cached_and_on_the_fly_agree() {
        let sys = hard_square_system(3).unwrap();
        let cached = build_one_vertex_3d(&sys, 3, 3).unwrap();
        let lazy = build_one_vertex_3d_with_limits(&sys, 3, 3, &Limits { successor_cache_entries: 0, ..Limits::default() })
            .unwrap();
        assert!(cached.is_cached() && !lazy.is_cached());
        assert_eq!(SparseMatrix::from_operator(&cached).to_text(), SparseMatrix::from_operator(&lazy).to_text());
    }

    #[test]
    fn sparsity_both_ways() {
        let sys = hard_square_system(3).unwrap();
        for (n1, n2) in [(2, 2), (3, 2), (2, 3), (4, 3)] {
            let op = SparseMatrix::from_operator(&build_one_vertex_3d(&sys, n1, n2).unwrap());
            assert!(op.max_row_len() <= 2);
            assert!(op.transpose().max_row_len() <= 2);
        }
    }
}
