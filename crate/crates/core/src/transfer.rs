//! Row-to-row (2-D) and slab-to-slab (3-D) transfer operators.
//!
//! States are the allowable words of one layer; entry `(phi, psi)` is 1 when `psi`
//! may be stacked on `phi`, i.e. every cell pair `(phi(p), psi(p))` is an edge of the
//! stacking-axis graph. Three interchangeable representations are available:
//!
//! * successor lists (CSR),
//! * bitset rows (`M` bits per row),
//! * matrix-free: a cell-by-cell dynamic programme over (prefix of `phi`, suffix of
//!   `psi`) pairs, which never touches the `M^2` compatibility relation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::Integer;
use serde::Serialize;

use crate::constraint::words::{row_shape, slab_shape, WordShape};
use crate::constraint::{Boundary, ConstraintGraph, ConstraintSystem, StateSpace, WordKind};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::numeric::Accumulate;
use crate::operator::{check_index, Operator, Scratch, SparseMatrix, PAR_MIN_ROWS};

/// Explicit lists are built only up to this many nonzeros.
const MAX_EXPLICIT_NNZ: u128 = 1 << 28;
/// Largest bitset-row matrix, in bytes.
const MAX_BITSET_BYTES: u128 = 256 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    SuccessorLists,
    BitsetRows,
    MatrixFree,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::SuccessorLists => "successor-lists",
            Representation::BitsetRows => "bitset-rows",
            Representation::MatrixFree => "matrix-free",
        })
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "successor-lists" | "lists" => Ok(Self::SuccessorLists),
            "bitset-rows" | "bitset" => Ok(Self::BitsetRows),
            "matrix-free" | "dp" => Ok(Self::MatrixFree),
            other => Err(Error::InvalidArgument(format!("unknown representation `{other}`"))),
        }
    }
}

/// Open or periodic boundary for each in-layer axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BoundaryDescriptor(Vec<Boundary>);

impl BoundaryDescriptor {
    pub fn new(axes: Vec<Boundary>) -> Self {
        Self(axes)
    }

    pub fn row(b: Boundary) -> Self {
        Self(vec![b])
    }

    pub fn slab(first: Boundary, second: Boundary) -> Self {
        Self(vec![first, second])
    }

    pub fn axes(&self) -> &[Boundary] {
        &self.0
    }
}

impl fmt::Display for BoundaryDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Boundary::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for BoundaryDescriptor {
    type Err = Error;

    /// `open`, `periodic`, or a comma list such as `open,periodic`.
    fn from_str(s: &str) -> Result<Self> {
        s.split(',').map(Boundary::from_str).collect::<Result<Vec<_>>>().map(Self)
    }
}

/// Build options; `representation: None` picks the cheapest form.
#[derive(Clone, Debug, Default)]
pub struct TransferOptions {
    pub representation: Option<Representation>,
    pub limits: Option<Limits>,
}

impl TransferOptions {
    pub fn with_representation(r: Representation) -> Self {
        Self { representation: Some(r), limits: None }
    }

    fn limits(&self) -> Limits {
        self.limits.unwrap_or_else(Limits::from_env)
    }
}

enum Repr {
    Lists(SparseMatrix),
    Bits(BitRows),
    Free(SlabDp),
}

/// A 0/1 layer-stacking operator over a [`StateSpace`].
pub struct TransferOperator {
    states: StateSpace,
    shape: WordShape,
    vertical: ConstraintGraph,
    boundary: BoundaryDescriptor,
    repr: Repr,
    descriptor: String,
}

impl fmt::Debug for TransferOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TransferOperator({})", self.descriptor)
    }
}

/// `T_{n,2}` / `T_{n,2,per}` (or `R_{n,2}` for anisotropic systems): rows of length `n`
/// allowed by axis 1, stacked along axis 2. `R_{n,1}` comes from `sys.swap_axes(0, 1)`.
pub fn build_row_transfer_2d(sys: &ConstraintSystem, n: usize, boundary: Boundary) -> Result<TransferOperator> {
    build_row_transfer_2d_with(sys, n, boundary, &TransferOptions::default())
}

pub fn build_row_transfer_2d_with(
    sys: &ConstraintSystem,
    n: usize,
    boundary: Boundary,
    opts: &TransferOptions,
) -> Result<TransferOperator> {
    if sys.d() != 2 {
        return Err(Error::InvalidArgument(format!("row transfer operators need d = 2, got d = {}", sys.d())));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("row length must be at least 1".into()));
    }
    let shape = row_shape(sys.axis(0), n, boundary);
    let kind = WordKind::Row { n, boundary };
    let mut opts = opts.clone();
    let isolated = sys.axis(0).isolated_vertices();
    let keep: Option<Vec<usize>> = (n == 1 && !isolated.is_empty())
        .then(|| (0..sys.k()).filter(|c| !isolated.contains(c)).collect());
    if keep.is_some() {
        // single-cell rows drop colours that are isolated along the row axis; only lists support a filtered state set
        opts.representation = Some(Representation::SuccessorLists);
    }
    build(sys, shape, kind, sys.axis(1).clone(), BoundaryDescriptor::row(boundary), &opts, keep)
}

/// Slab operator `R_{(n1,n2),3}` (or the periodic / mixed variants): states are
/// colourings of the `n1 x n2` slab allowed by axes 1 and 2 under `bc`, stacked along axis 3.
pub fn build_slab_transfer_3d(
    sys: &ConstraintSystem,
    n1: usize,
    n2: usize,
    bc: &BoundaryDescriptor,
) -> Result<TransferOperator> {
    build_slab_transfer_3d_with(sys, n1, n2, bc, &TransferOptions::default())
}

pub fn build_slab_transfer_3d_with(
    sys: &ConstraintSystem,
    n1: usize,
    n2: usize,
    bc: &BoundaryDescriptor,
    opts: &TransferOptions,
) -> Result<TransferOperator> {
    if sys.d() != 3 {
        return Err(Error::InvalidArgument(format!("slab transfer operators need d = 3, got d = {}", sys.d())));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidArgument("slab sides must be at least 1".into()));
    }
    let [b1, b2] = match bc.axes() {
        [b1, b2] => [*b1, *b2],
        other => {
            return Err(Error::DimensionMismatch { expected: 2, found: other.len() });
        }
    };
    let shape = slab_shape(sys, n1, n2, [b1, b2]);
    let kind = WordKind::Slab { n1, n2, bc: [b1, b2] };
    build(sys, shape, kind, sys.axis(2).clone(), bc.clone(), opts, None)
}

fn build(
    sys: &ConstraintSystem,
    shape: WordShape,
    kind: WordKind,
    vertical: ConstraintGraph,
    boundary: BoundaryDescriptor,
    opts: &TransferOptions,
    keep_colours: Option<Vec<usize>>,
) -> Result<TransferOperator> {
    let limits = opts.limits();
    let m = shape.guard(&limits)?;
    let mut words = shape.enumerate();
    if let Some(keep) = &keep_colours {
        words.retain(|&w| keep.contains(&(w as usize)));
    }
    let states = StateSpace::from_sorted(words, &shape, kind, sys.fingerprint());
    let nnz = stacked_shape(&shape, &vertical).projected_count();
    let dp_cost = SlabDp::cost(&shape);
    let chosen = match opts.representation {
        Some(r) => r,
        None => match dp_cost {
            Some((work, _)) if nnz > MAX_EXPLICIT_NNZ || nnz > 2 * work => Representation::MatrixFree,
            _ => Representation::SuccessorLists,
        },
    };
    log::debug!("{kind}: {m} states, {nnz} nonzeros, dp cost {dp_cost:?}, using {chosen}");
    let proto = Proto { states: &states, shape: &shape, vertical: &vertical };
    let repr = match chosen {
        Representation::SuccessorLists => {
            if nnz > MAX_EXPLICIT_NNZ {
                return Err(Error::CapacityExceeded { guard: "explicit nonzeros", estimate: nnz, limit: MAX_EXPLICIT_NNZ as u64 });
            }
            Repr::Lists(SparseMatrix::from_operator(&proto))
        }
        Representation::BitsetRows => {
            let bytes = (states.len() as u128).pow(2) / 8;
            if bytes > MAX_BITSET_BYTES {
                return Err(Error::CapacityExceeded { guard: "bitset bytes", estimate: bytes, limit: MAX_BITSET_BYTES as u64 });
            }
            Repr::Bits(BitRows::from_operator(&proto))
        }
        Representation::MatrixFree => {
            let (_, peak) = dp_cost.ok_or(Error::CapacityExceeded {
                guard: "matrix-free frontier",
                estimate: u128::MAX,
                limit: limits.max_states,
            })?;
            if peak > limits.max_states as u128 {
                return Err(Error::CapacityExceeded { guard: "matrix-free intermediate", estimate: peak, limit: limits.max_states });
            }
            Repr::Free(SlabDp::new(&shape, &vertical))
        }
    };
    let descriptor = format!(
        "transfer {kind} stack={:?} system={} states={} repr={chosen}",
        vertical,
        sys.fingerprint(),
        states.len()
    );
    Ok(TransferOperator { states, shape, vertical, boundary, repr, descriptor })
}

/// The two-layer word whose colourings are the nonzeros: layer cells interleaved as
/// `phi(0), psi(0), phi(1), psi(1), ...`.
fn stacked_shape(shape: &WordShape, vertical: &ConstraintGraph) -> WordShape {
    let mut graphs = shape.graphs().to_vec();
    let vg = graphs.len();
    graphs.push(vertical.clone());
    let mut pairs = Vec::new();
    for p in shape.pairs() {
        for layer in 0..2 {
            pairs.push(crate::constraint::words::Pair {
                first: 2 * p.first + layer,
                second: 2 * p.second + layer,
                graph: p.graph,
            });
        }
    }
    for c in 0..shape.len() {
        pairs.push(crate::constraint::words::Pair { first: 2 * c, second: 2 * c + 1, graph: vg });
    }
    WordShape::new(2 * shape.len(), graphs, pairs)
}

impl TransferOperator {
    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn boundary(&self) -> &BoundaryDescriptor {
        &self.boundary
    }

    pub fn representation(&self) -> Representation {
        match self.repr {
            Repr::Lists(_) => Representation::SuccessorLists,
            Repr::Bits(_) => Representation::BitsetRows,
            Repr::Free(_) => Representation::MatrixFree,
        }
    }

    /// Entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> Result<bool> {
        check_index(i, self.dim())?;
        check_index(j, self.dim())?;
        let (a, b) = (self.states.packed_words()[i], self.states.packed_words()[j]);
        Ok((0..self.shape.len())
            .all(|p| self.vertical.has_edge(self.states.colour_at(a, p), self.states.colour_at(b, p))))
    }

    /// Explicit CSR copy, whatever the internal form.
    pub fn to_sparse(&self) -> SparseMatrix {
        match &self.repr {
            Repr::Lists(s) => s.clone(),
            _ => SparseMatrix::from_operator(self),
        }
    }
}

impl Operator for TransferOperator {
    fn dim(&self) -> usize {
        self.states.len()
    }

    fn accumulation_depth(&self) -> usize {
        match &self.repr {
            Repr::Lists(s) => s.max_row_len(),
            Repr::Bits(b) => b.max_row_len,
            Repr::Free(dp) => dp.depth(),
        }
    }

    fn descriptor(&self) -> String {
        self.descriptor.clone()
    }

    fn apply_with<T: Accumulate>(&self, x: &[T], y: &mut [T], scratch: &mut Scratch<T>) {
        match &self.repr {
            Repr::Lists(s) => s.apply_with(x, y, scratch),
            Repr::Bits(b) => b.apply(x, y),
            Repr::Free(dp) => dp.apply(x, y, scratch),
        }
    }

    fn row_into(&self, i: usize, out: &mut Vec<usize>) {
        match &self.repr {
            Repr::Lists(s) => s.row_into(i, out),
            Repr::Bits(b) => b.row_into(i, out),
            Repr::Free(_) => Proto { states: &self.states, shape: &self.shape, vertical: &self.vertical }.row_into(i, out),
        }
    }
}

/// Row generation by depth-first search, used to build the explicit forms.
struct Proto<'a> {
    states: &'a StateSpace,
    shape: &'a WordShape,
    vertical: &'a ConstraintGraph,
}

impl Operator for Proto<'_> {
    fn dim(&self) -> usize {
        self.states.len()
    }

    fn accumulation_depth(&self) -> usize {
        usize::MAX
    }

    fn descriptor(&self) -> String {
        String::new()
    }

    fn apply_with<T: Accumulate>(&self, _x: &[T], _y: &mut [T], _scratch: &mut Scratch<T>) {
        unreachable!("row generator only")
    }

    fn row_into(&self, i: usize, out: &mut Vec<usize>) {
        let phi = self.states.packed_words()[i];
        let len = self.shape.len();
        let k = self.shape.k();
        let bits = self.shape.bits();
        // stack[p] = next colour to try at cell p
        let mut next = vec![0usize; len + 1];
        let mut prefix = vec![0u64; len + 1];
        let mut p = 0usize;
        loop {
            if p == len {
                if let Some(j) = self.states.index_of_packed(prefix[len]) {
                    out.push(j);
                }
                p -= 1;
                continue;
            }
            let a = self.states.colour_at(phi, p);
            let mut advanced = false;
            while next[p] < k {
                let c = next[p];
                next[p] += 1;
                if self.vertical.has_edge(a, c) && self.shape.prefix_accepts(prefix[p], p, c) {
                    prefix[p + 1] = (prefix[p] << bits) | c as u64;
                    next[p + 1] = 0;
                    p += 1;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                if p == 0 {
                    break;
                }
                p -= 1;
            }
        }
    }
}

struct BitRows {
    words_per_row: usize,
    bits: Vec<u64>,
    max_row_len: usize,
}

impl BitRows {
    fn from_operator<O: Operator>(op: &O) -> Self {
        let m = op.dim();
        let words_per_row = m.div_ceil(64);
        let mut bits = vec![0u64; m * words_per_row];
        let max_row_len = bits
            .par_chunks_mut(words_per_row.max(1))
            .enumerate()
            .map_init(Vec::new, |buf, (i, row)| {
                buf.clear();
                op.row_into(i, buf);
                for &j in buf.iter() {
                    row[j / 64] |= 1 << (j % 64);
                }
                buf.len()
            })
            .max()
            .unwrap_or(0);
        Self { words_per_row, bits, max_row_len }
    }

    fn row_bits(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    fn apply<T: Accumulate>(&self, x: &[T], y: &mut [T]) {
        y.par_iter_mut().enumerate().with_min_len(PAR_MIN_ROWS / 8).for_each(|(i, yi)| {
            yi.set_zero();
            for (w, &word) in self.row_bits(i).iter().enumerate() {
                let mut rest = word;
                while rest != 0 {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    yi.add_assign_ref(&x[w * 64 + b]);
                }
            }
        });
    }

    fn row_into(&self, i: usize, out: &mut Vec<usize>) {
        for (w, &word) in self.row_bits(i).iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                out.push(w * 64 + rest.trailing_zeros() as usize);
                rest &= rest - 1;
            }
        }
    }
}

const NONE: u32 = u32::MAX;

/// One cell of the dynamic programme. Before the step the table holds, for each valid
/// prefix `i` of `phi` on cells `< p` and valid suffix `j` of `psi` on cells `>= p`,
/// the sum over completions; the step fixes cell `p` of both layers.
struct DpStep {
    s_in: usize,
    s_out: usize,
    /// Source prefix of each destination prefix.
    src: Vec<u32>,
    /// Last colour of each destination prefix.
    colour: Vec<u8>,
    /// `prepend[c * s_out + j]`: index in the input suffix level of `c` followed by suffix `j`.
    prepend: Vec<u32>,
}

struct SlabDp {
    k: usize,
    vertical: ConstraintGraph,
    steps: Vec<DpStep>,
    peak: usize,
}

impl SlabDp {
    /// `(work, peak table size)` from exact level counts, if the frontier DP is tractable.
    fn cost(shape: &WordShape) -> Option<(u128, u128)> {
        let pre = shape.prefix_counts()?;
        let suf = shape.suffix_counts()?;
        let mut work = 0u128;
        let mut peak = 0u128;
        for p in 0..=shape.len() {
            let size = pre[p].saturating_mul(suf[p]);
            peak = peak.max(size);
            if p > 0 {
                work = work.saturating_add(size.saturating_mul(shape.k() as u128));
            }
        }
        Some((work, peak))
    }

    fn new(shape: &WordShape, vertical: &ConstraintGraph) -> Self {
        let len = shape.len();
        let k = shape.k();
        let mut prefixes = vec![vec![0u64]];
        for p in 0..len {
            let next = shape.extend_prefixes(&prefixes[p], p);
            prefixes.push(next);
        }
        let mut suffixes = vec![Vec::new(); len + 1];
        suffixes[len] = vec![0u64];
        for p in (0..len).rev() {
            suffixes[p] = shape.extend_suffixes(&suffixes[p + 1], p);
        }
        let bits = shape.bits() as usize;
        let mut steps = Vec::with_capacity(len);
        let mut peak = 1;
        for p in 0..len {
            let (s_in, s_out) = (suffixes[p].len(), suffixes[p + 1].len());
            peak = peak.max(prefixes[p].len() * s_in);
            let mut src = Vec::with_capacity(prefixes[p + 1].len());
            let mut colour = Vec::with_capacity(prefixes[p + 1].len());
            for &w in &prefixes[p + 1] {
                let parent = w >> bits;
                src.push(prefixes[p].binary_search(&parent).expect("prefix parent exists") as u32);
                colour.push((w & ((1 << bits) - 1)) as u8);
            }
            let shift = bits * (len - 1 - p);
            let mut prepend = vec![NONE; k * s_out];
            for c in 0..k {
                for (j, &rest) in suffixes[p + 1].iter().enumerate() {
                    if let Ok(idx) = suffixes[p].binary_search(&(((c as u64) << shift) | rest)) {
                        prepend[c * s_out + j] = idx as u32;
                    }
                }
            }
            steps.push(DpStep { s_in, s_out, src, colour, prepend });
        }
        peak = peak.max(prefixes[len].len());
        Self { k, vertical: vertical.clone(), steps, peak }
    }

    fn depth(&self) -> usize {
        self.steps.len() * self.k
    }

    fn apply<T: Accumulate>(&self, x: &[T], y: &mut [T], scratch: &mut Scratch<T>) {
        let Some(proto) = x.first() else {
            return;
        };
        let (mut cur, mut nxt) = scratch.pair(proto, self.peak);
        cur[..x.len()].clone_from_slice(x);
        for step in &self.steps {
            let s_out = step.s_out;
            let rows = step.src.len();
            let out = &mut nxt[..rows * s_out];
            let input = &cur[..];
            out.par_chunks_mut(s_out.max(1))
                .enumerate()
                .with_min_len((PAR_MIN_ROWS / s_out.max(1)).max(1))
                .for_each(|(d, row)| {
                    let base = step.src[d] as usize * step.s_in;
                    let a = step.colour[d] as usize;
                    for (j, acc) in row.iter_mut().enumerate() {
                        acc.set_zero();
                        for c in 0..self.k {
                            if !self.vertical.has_edge(a, c) {
                                continue;
                            }
                            let src = step.prepend[c * s_out + j];
                            if src != NONE {
                                acc.add_assign_ref(&input[base + src as usize]);
                            }
                        }
                    }
                });
            std::mem::swap(&mut cur, &mut nxt);
        }
        y.clone_from_slice(&cur[..y.len()]);
    }
}

/// `1^T A^m 1` in exact integer arithmetic.
pub fn quadratic_form_count<O: Operator + ?Sized>(op: &O, m: u32) -> Integer {
    let dim = op.dim();
    if dim == 0 {
        return Integer::new();
    }
    let mut v = vec![Integer::from(1); dim];
    let mut w = vec![Integer::new(); dim];
    let mut scratch = Scratch::new();
    for _ in 0..m {
        op.apply_with(&v, &mut w, &mut scratch);
        std::mem::swap(&mut v, &mut w);
    }
    v.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::{hard_square_system, monomer_dimer_system};
    use crate::operator::apply;

    const ALL: [Representation; 3] =
        [Representation::SuccessorLists, Representation::BitsetRows, Representation::MatrixFree];

    fn row_op(n: usize, b: Boundary, r: Representation) -> TransferOperator {
        build_row_transfer_2d_with(&hard_square_system(2).unwrap(), n, b, &TransferOptions::with_representation(r))
            .unwrap()
    }

    #[test]
    fn t22_matrix() {
        for r in ALL {
            let op = row_op(2, Boundary::Open, r);
            let rows: Vec<Vec<usize>> = (0..3).map(|i| op.row(i)).collect();
            assert_eq!(rows, vec![vec![1, 2], vec![0, 2], vec![0, 1, 2]], "{r}");
            assert_eq!(apply(&op, &[1.0, 1.0, 1.0]).unwrap(), vec![2.0, 2.0, 3.0]);
        }
    }

    #[test]
    fn single_cell_rows_are_the_stacking_graph() {
        let sys = monomer_dimer_system(2, true).unwrap();
        let op = build_row_transfer_2d(&sys, 1, Boundary::Open).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(op.entry(i, j).unwrap(), sys.axis(1).has_edge(i, j));
            }
        }
        let g = ConstraintGraph::from_edges(3, &[(0, 0), (0, 1), (1, 0), (2, 2)]).unwrap();
        let h = ConstraintGraph::from_edges(3, &[(0, 1), (1, 0)]).unwrap();
        let sys = ConstraintSystem::new(vec![h, g]).unwrap();
        let op = build_row_transfer_2d(&sys, 1, Boundary::Open).unwrap();
        assert_eq!(op.dim(), 2);
    }

    #[test]
    fn representations_agree() {
        let sys3 = hard_square_system(3).unwrap();
        let md = monomer_dimer_system(2, true).unwrap();
        let v: Vec<f64> = (0..5000).map(|i| ((i * 7919) % 13) as f64 + 0.5).collect();
        let mut ops: Vec<Vec<TransferOperator>> = Vec::new();
        ops.push(ALL.iter().map(|&r| row_op(9, Boundary::Periodic, r)).collect());
        ops.push(
            ALL.iter()
                .map(|&r| build_row_transfer_2d_with(&md, 4, Boundary::Open, &TransferOptions::with_representation(r)).unwrap())
                .collect(),
        );
        for bc in ["open,open", "periodic,periodic", "open,periodic"] {
            let bc: BoundaryDescriptor = bc.parse().unwrap();
            ops.push(
                ALL.iter()
                    .map(|&r| {
                        build_slab_transfer_3d_with(&sys3, 3, 4, &bc, &TransferOptions::with_representation(r)).unwrap()
                    })
                    .collect(),
            );
        }
        for group in &ops {
            let m = group[0].dim();
            let results: Vec<Vec<f64>> = group.iter().map(|op| apply(op, &v[..m]).unwrap()).collect();
            assert_eq!(results[0], results[1]);
            assert_eq!(results[0], results[2]);
            assert_eq!(group[0].to_sparse().to_text(), group[2].to_sparse().to_text());
        }
    }

    #[test]
    fn periodic_is_principal_submatrix_of_open() {
        for n in 3..9 {
            let open = row_op(n, Boundary::Open, Representation::SuccessorLists);
            let per = row_op(n, Boundary::Periodic, Representation::SuccessorLists);
            for i in 0..per.dim() {
                let wi = per.states().word(i);
                let oi = open.states().index_of(&wi).unwrap();
                for j in 0..per.dim() {
                    let oj = open.states().index_of(&per.states().word(j)).unwrap();
                    assert_eq!(per.entry(i, j).unwrap(), open.entry(oi, oj).unwrap());
                }
            }
            assert!(open.to_sparse().is_symmetric());
            assert!(per.to_sparse().is_symmetric());
        }
    }

    #[test]
    fn quadratic_forms() {
        let t = row_op(2, Boundary::Open, Representation::MatrixFree);
        assert_eq!(quadratic_form_count(&t, 1), 7);
        assert_eq!(quadratic_form_count(&t, 0), 3);
    }

    #[test]
    fn export_import_round_trip() {
        let op = row_op(6, Boundary::Open, Representation::MatrixFree);
        let text = op.to_sparse().to_text();
        let back = SparseMatrix::parse_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn rejects_wrong_dimension() {
        assert!(build_row_transfer_2d(&hard_square_system(3).unwrap(), 3, Boundary::Open).is_err());
        let bc = BoundaryDescriptor::row(Boundary::Open);
        assert!(matches!(
            build_slab_transfer_3d(&hard_square_system(3).unwrap(), 2, 2, &bc),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn guard_names_itself() {
        let opts = TransferOptions {
            representation: None,
            limits: Some(Limits { max_states: 1000, ..Limits::default() }),
        };
        let err = build_row_transfer_2d_with(&hard_square_system(2).unwrap(), 20, Boundary::Open, &opts).unwrap_err();
        assert!(err.to_string().contains("state count"), "{err}");
        assert!(err.to_string().contains("17711"), "{err}");
    }
}
