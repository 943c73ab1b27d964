//! The applyable-operator interface shared by every transfer operator, and a plain
//! CSR 0/1 matrix used for explicit forms, debugging export and tests.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::Accumulate;

/// Rows handed to one rayon task at a time.
pub(crate) const PAR_MIN_ROWS: usize = 2048;

/// Reusable work buffers for operators whose apply needs intermediate vectors.
pub struct Scratch<T> {
    pub(crate) bufs: Vec<Vec<T>>,
}

impl<T> Default for Scratch<T> {
    fn default() -> Self {
        Self { bufs: Vec::new() }
    }
}

impl<T: Accumulate> Scratch<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Two buffers of at least the given lengths, filled lazily with zeros like `proto`.
    pub(crate) fn pair(&mut self, proto: &T, len: usize) -> (&mut Vec<T>, &mut Vec<T>) {
        while self.bufs.len() < 2 {
            self.bufs.push(Vec::new());
        }
        for b in &mut self.bufs[..2] {
            if b.first().is_some_and(|f| !f.same_kind(proto)) {
                b.clear();
            }
            if b.len() < len {
                b.resize(len, proto.zeroed_like());
            }
        }
        let (a, b) = self.bufs.split_at_mut(1);
        (&mut a[0], &mut b[0])
    }
}

/// A non-negative 0/1 matrix that can be applied to vectors of any [`Accumulate`] type.
///
/// `(A x)_i` is the sum of `x_j` over the row's successors `j`, formed in an order
/// fixed by the operator alone, so results are identical for any worker count.
pub trait Operator: Sync {
    fn dim(&self) -> usize;

    /// Upper bound on the number of additions feeding one output entry.
    fn accumulation_depth(&self) -> usize;

    /// Stable text identifying the operator; hashed into checkpoints.
    fn descriptor(&self) -> String;

    /// Writes `A x` into `y`. Both slices have length [`Operator::dim`].
    fn apply_with<T: Accumulate>(&self, x: &[T], y: &mut [T], scratch: &mut Scratch<T>);

    /// Sorted successor indices of row `i`.
    fn row_into(&self, i: usize, out: &mut Vec<usize>);

    fn row(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.row_into(i, &mut out);
        out
    }
}

/// `A v` with a dimension check.
pub fn apply<O: Operator + ?Sized, T: Accumulate>(op: &O, v: &[T]) -> Result<Vec<T>> {
    if v.len() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: v.len() });
    }
    let Some(first) = v.first() else {
        return Ok(Vec::new());
    };
    let mut y = vec![first.zeroed_like(); v.len()];
    op.apply_with(v, &mut y, &mut Scratch::new());
    Ok(y)
}

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index >= len {
        return Err(Error::IndexOutOfRange { index, len });
    }
    Ok(())
}

/// Compressed sparse rows with sorted column indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    offsets: Vec<usize>,
    cols: Vec<u32>,
    label: String,
}

impl SparseMatrix {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        let m = rows.len();
        let mut offsets = Vec::with_capacity(m + 1);
        let mut cols = Vec::new();
        offsets.push(0);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable();
            row.dedup();
            if let Some(&last) = row.last() {
                check_index(last, m).map_err(|_| {
                    Error::InvalidArgument(format!("row {i} has successor {last} outside 0..{m}"))
                })?;
            }
            cols.extend(row.into_iter().map(|j| j as u32));
            offsets.push(cols.len());
        }
        Ok(Self { offsets, cols, label: format!("sparse m={m}") })
    }

    pub(crate) fn from_csr(offsets: Vec<usize>, cols: Vec<u32>, label: String) -> Self {
        Self { offsets, cols, label }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_csr((0..=m).collect(), (0..m as u32).collect(), format!("identity m={m}"))
    }

    /// Materialises any operator row by row.
    pub fn from_operator<O: Operator + ?Sized>(op: &O) -> Self {
        let m = op.dim();
        let rows: Vec<Vec<u32>> = (0..m)
            .into_par_iter()
            .with_min_len(PAR_MIN_ROWS)
            .map_init(Vec::new, |buf, i| {
                buf.clear();
                op.row_into(i, buf);
                buf.iter().map(|&j| j as u32).collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(m + 1);
        offsets.push(0);
        let mut cols = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for r in rows {
            cols.extend(r);
            offsets.push(cols.len());
        }
        Self { offsets, cols, label: op.descriptor() }
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row_slice(&self, i: usize) -> &[u32] {
        &self.cols[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn max_row_len(&self) -> usize {
        (0..self.dim()).map(|i| self.offsets[i + 1] - self.offsets[i]).max().unwrap_or(0)
    }

    pub fn has_entry(&self, i: usize, j: usize) -> bool {
        self.row_slice(i).binary_search(&(j as u32)).is_ok()
    }

    pub fn transpose(&self) -> Self {
        let m = self.dim();
        let mut counts = vec![0usize; m + 1];
        for &j in &self.cols {
            counts[j as usize + 1] += 1;
        }
        for i in 0..m {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut cols = vec![0u32; self.cols.len()];
        for i in 0..m {
            for &j in self.row_slice(i) {
                cols[fill[j as usize]] = i as u32;
                fill[j as usize] += 1;
            }
        }
        Self { offsets: counts, cols, label: format!("transpose of {}", self.label) }
    }

    pub fn is_symmetric(&self) -> bool {
        let t = self.transpose();
        t.offsets == self.offsets && t.cols == self.cols
    }

    /// Removes entry `(i, j)`; returns whether it was present.
    pub fn remove_entry(&mut self, i: usize, j: usize) -> bool {
        let start = self.offsets[i];
        let Ok(pos) = self.row_slice(i).binary_search(&(j as u32)) else {
            return false;
        };
        self.cols.remove(start + pos);
        for o in &mut self.offsets[i + 1..] {
            *o -= 1;
        }
        self.label.push_str(&format!(" minus ({i},{j})"));
        true
    }

    /// `M` on the first line, then one line of sorted 0-based successor indices per row.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.cols.len() * 6 + 16);
        writeln!(out, "{}", self.dim()).unwrap();
        for i in 0..self.dim() {
            let row: Vec<String> = self.row_slice(i).iter().map(u32::to_string).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or(Error::Parse { line: 1, message: "empty operator file".into() })?;
        let m: usize = first
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: 1, message: format!("expected the state count, found `{first}`") })?;
        let mut rows = Vec::with_capacity(m);
        for (idx, line) in lines {
            if rows.len() == m {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(Error::Parse { line: idx + 1, message: "more rows than declared".into() });
            }
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse { line: idx + 1, message: format!("bad index `{t}`") })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::Parse { line: text.lines().count(), message: format!("expected {m} rows, found {}", rows.len()) });
        }
        Self::from_rows(rows)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_text(&fs::read_to_string(path)?)
    }
}

impl Operator for SparseMatrix {
    fn dim(&self) -> usize {
        self.offsets.len() - 1
    }

    fn accumulation_depth(&self) -> usize {
        self.max_row_len()
    }

    fn descriptor(&self) -> String {
        self.label.clone()
    }

    fn apply_with<T: Accumulate>(&self, x: &[T], y: &mut [T], _scratch: &mut Scratch<T>) {
        y.par_iter_mut().enumerate().with_min_len(PAR_MIN_ROWS).for_each(|(i, yi)| {
            yi.set_zero();
            for &j in self.row_slice(i) {
                yi.add_assign_ref(&x[j as usize]);
            }
        });
    }

    fn row_into(&self, i: usize, out: &mut Vec<usize>) {
        out.extend(self.row_slice(i).iter().map(|&j| j as usize));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t22() -> SparseMatrix {
        SparseMatrix::from_rows(vec![vec![1, 2], vec![0, 2], vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn apply_ones_gives_row_sums() {
        assert_eq!(apply(&t22(), &[1.0, 1.0, 1.0]).unwrap(), vec![2.0, 2.0, 3.0]);
        assert_eq!(apply(&t22(), &[0.0, 0.0, 0.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn identity_leaves_vector_unchanged() {
        let v = [3.5, -1.0, 2.0, 0.25];
        assert_eq!(apply(&SparseMatrix::identity(4), &v).unwrap(), v.to_vec());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            apply(&t22(), &[1.0, 1.0]),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn text_round_trip() {
        let m = t22();
        let back = SparseMatrix::parse_text(&m.to_text()).unwrap();
        assert_eq!(back.to_text(), m.to_text());
        assert!(back.is_symmetric());
        assert!(SparseMatrix::parse_text("2\n0 5\n1\n").is_err());
    }

    #[test]
    fn transpose_and_removal() {
        let mut m = t22();
        assert!(m.remove_entry(0, 1));
        assert!(!m.remove_entry(0, 1));
        assert!(!m.is_symmetric());
        assert_eq!(m.transpose().transpose().to_text(), m.to_text());
        assert_eq!(m.nnz(), 6);
    }
}
