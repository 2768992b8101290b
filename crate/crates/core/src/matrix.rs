//! Nonnegative integer matrices with checked arithmetic.
//!
//! Storage is compressed sparse rows, which keeps the large higher block
//! matrices produced by window reductions cheap. Entries are `u64` and every
//! product or sum is checked; overflow surfaces as [`Error::Overflow`].
//!
//! Indices are 0-based in memory. The JSON form of an [`IndexSet`] is 1-based.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NonnegMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<u64>,
}

impl NonnegMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        NonnegMatrix { rows, cols, indptr: vec![0; rows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        NonnegMatrix { rows: n, cols: n, indptr: (0..=n).collect(), indices: (0..n).collect(), values: vec![1; n] }
    }

    /// Builds a matrix from nested rows. All rows must have the same length.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = NonnegMatrix::zeros(0, cols);
        m.indptr.clear();
        m.indptr.push(0);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidMatrix(format!("row {} has length {}, expected {}", i + 1, row.len(), cols)));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.indices.push(j);
                    m.values.push(v);
                }
            }
            m.indptr.push(m.indices.len());
        }
        m.rows = rows.len();
        Ok(m)
    }

    /// Builds a matrix from a dense row-major slice.
    pub fn from_flat(rows: usize, cols: usize, entries: &[u64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!("expected {} entries, got {}", rows * cols, entries.len())));
        }
        let nested: Vec<Vec<u64>> =
            if cols == 0 { vec![Vec::new(); rows] } else { entries.chunks(cols).map(<[u64]>::to_vec).collect() };
        let mut m = NonnegMatrix::from_rows(&nested)?;
        m.cols = cols;
        Ok(m)
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Result<Self> {
        let mut per_row: Vec<Vec<(usize, u64)>> = vec![Vec::new(); rows];
        for (i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::Dimension(format!("triplet ({i}, {j}) outside {rows}x{cols}")));
            }
            if v != 0 {
                per_row[i].push((j, v));
            }
        }
        let mut m = NonnegMatrix::zeros(rows, cols);
        m.indptr.clear();
        m.indptr.push(0);
        for mut row in per_row {
            row.sort_unstable_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut v: u64 = 0;
                while k < row.len() && row[k].0 == j {
                    v = v.checked_add(row[k].1).ok_or(Error::Overflow("matrix assembly"))?;
                    k += 1;
                }
                m.indices.push(j);
                m.values.push(v);
            }
            m.indptr.push(m.indices.len());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0,
        }
    }

    /// Nonzero entries of row `i` as `(col, value)`, in increasing column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[lo..hi].iter().copied().zip(self.values[lo..hi].iter().copied())
    }

    /// All nonzero entries as `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for (i, j, v) in self.entries() {
            out[i][j] = v;
        }
        out
    }

    pub fn max_entry(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|&v| v == 1)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Checked product `self * other`.
    pub fn mul(&self, other: &NonnegMatrix) -> Result<NonnegMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = NonnegMatrix::zeros(self.rows, other.cols);
        out.indptr.clear();
        out.indptr.push(0);
        let mut acc = vec![0u64; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..self.rows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    let p = a.checked_mul(b).ok_or(Error::Overflow("matrix product"))?;
                    if acc[j] == 0 {
                        touched.push(j);
                    }
                    acc[j] = acc[j].checked_add(p).ok_or(Error::Overflow("matrix product"))?;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                out.indices.push(j);
                out.values.push(acc[j]);
                acc[j] = 0;
            }
            touched.clear();
            out.indptr.push(out.indices.len());
        }
        Ok(out)
    }

    /// Checked entrywise sum.
    pub fn add(&self, other: &NonnegMatrix) -> Result<NonnegMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        NonnegMatrix::from_triplets(self.rows, self.cols, self.entries().chain(other.entries()))
    }

    pub fn transpose(&self) -> NonnegMatrix {
        let t = self.entries().map(|(i, j, v)| (j, i, v));
        NonnegMatrix::from_triplets(self.cols, self.rows, t).expect("transpose stays in bounds")
    }

    /// Rows that contain a nonzero entry.
    pub fn nonzero_rows(&self) -> IndexSet {
        let members = (0..self.rows).filter(|&i| self.indptr[i + 1] > self.indptr[i]).collect();
        IndexSet { parent: self.rows, members }
    }

    /// Columns that contain a nonzero entry.
    pub fn nonzero_cols(&self) -> IndexSet {
        let mut seen = vec![false; self.cols];
        for &j in &self.indices {
            seen[j] = true;
        }
        let members = (0..self.cols).filter(|&j| seen[j]).collect();
        IndexSet { parent: self.cols, members }
    }

    /// No zero rows and no zero columns.
    pub fn is_nondegenerate(&self) -> bool {
        self.nonzero_rows().len() == self.rows && self.nonzero_cols().len() == self.cols
    }

    /// The submatrix on rows `k` and columns `l`, in the order of the sets.
    pub fn submatrix(&self, k: &IndexSet, l: &IndexSet) -> Result<NonnegMatrix> {
        if k.parent != self.rows || l.parent != self.cols {
            return Err(Error::Dimension(format!(
                "index sets over {}x{} applied to {}x{} matrix",
                k.parent, l.parent, self.rows, self.cols
            )));
        }
        let mut col_pos = vec![usize::MAX; self.cols];
        for (p, &j) in l.members.iter().enumerate() {
            col_pos[j] = p;
        }
        let triplets = k.members.iter().enumerate().flat_map(|(p, &i)| {
            let col_pos = &col_pos;
            self.row(i).filter(move |&(j, _)| col_pos[j] != usize::MAX).map(move |(j, v)| (p, col_pos[j], v))
        });
        NonnegMatrix::from_triplets(k.len(), l.len(), triplets)
    }

    /// `P A P^-1` for the relabelling `i -> perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<NonnegMatrix> {
        if !self.is_square() || perm.len() != self.rows {
            return Err(Error::Dimension("permutation size".into()));
        }
        let t = self.entries().map(|(i, j, v)| (perm[i], perm[j], v));
        NonnegMatrix::from_triplets(self.rows, self.cols, t)
    }

    /// Indices lying on a bi-infinite path of the graph of a square matrix.
    ///
    /// Repeatedly drops indices whose row or column vanishes on the surviving
    /// indices. The result is empty exactly when the graph has no cycle.
    pub fn core_indices(&self) -> Result<IndexSet> {
        if !self.is_square() {
            return Err(Error::Dimension("core_indices needs a square matrix".into()));
        }
        let n = self.rows;
        let t = self.transpose();
        let mut alive = vec![true; n];
        let mut out_deg = vec![0usize; n];
        let mut in_deg = vec![0usize; n];
        for (i, j, _) in self.entries() {
            out_deg[i] += 1;
            in_deg[j] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&i| out_deg[i] == 0 || in_deg[i] == 0).collect();
        while let Some(i) = stack.pop() {
            if !alive[i] {
                continue;
            }
            alive[i] = false;
            for (j, _) in self.row(i) {
                if alive[j] {
                    in_deg[j] -= 1;
                    if in_deg[j] == 0 {
                        stack.push(j);
                    }
                }
            }
            for (j, _) in t.row(i) {
                if alive[j] {
                    out_deg[j] -= 1;
                    if out_deg[j] == 0 {
                        stack.push(j);
                    }
                }
            }
        }
        Ok(IndexSet { parent: n, members: (0..n).filter(|&i| alive[i]).collect() })
    }

    /// The core submatrix `A_{J x J}`.
    pub fn core(&self) -> Result<NonnegMatrix> {
        let j = self.core_indices()?;
        self.submatrix(&j, &j)
    }
}

/// Diagonal 0/1 matrix with `(E_S)_{ii} = 1` iff row `i` of `s` is nonzero.
pub fn e_s_matrix(s: &NonnegMatrix) -> NonnegMatrix {
    let k = s.nonzero_rows();
    NonnegMatrix::from_triplets(s.rows(), s.rows(), k.members.iter().map(|&i| (i, i, 1)))
        .expect("diagonal stays in bounds")
}

impl Ord for NonnegMatrix {
    /// Dimensions first, then dense row-major entries.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rows, self.cols).cmp(&(other.rows, other.cols)).then_with(|| {
            for i in 0..self.rows {
                let mut a = self.row(i).peekable();
                let mut b = other.row(i).peekable();
                loop {
                    match (a.peek().copied(), b.peek().copied()) {
                        (None, None) => break,
                        (Some((ja, va)), Some((jb, vb))) => {
                            if ja == jb {
                                if va != vb {
                                    return va.cmp(&vb);
                                }
                                a.next();
                                b.next();
                            } else if ja < jb {
                                return Ordering::Greater;
                            } else {
                                return Ordering::Less;
                            }
                        }
                        (Some(_), None) => return Ordering::Greater,
                        (None, Some(_)) => return Ordering::Less,
                    }
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for NonnegMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for NonnegMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl fmt::Display for NonnegMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.to_rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<u64>>,
}

impl Serialize for NonnegMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson { rows: self.rows, cols: self.cols, entries: self.to_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NonnegMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.entries.len() != raw.rows {
            return Err(serde::de::Error::custom(format!("declared {} rows, found {}", raw.rows, raw.entries.len())));
        }
        if let Some(bad) = raw.entries.iter().find(|r| r.len() != raw.cols) {
            return Err(serde::de::Error::custom(format!(
                "declared {} columns, found a row of length {}",
                raw.cols,
                bad.len()
            )));
        }
        let mut m = NonnegMatrix::from_rows(&raw.entries).map_err(serde::de::Error::custom)?;
        m.cols = raw.cols;
        Ok(m)
    }
}

/// A subset of `{0, .., parent - 1}` kept in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    parent: usize,
    members: Vec<usize>,
}

impl IndexSet {
    pub fn new(parent: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&m) = members.last()
            && m >= parent
        {
            return Err(Error::Dimension(format!("index {m} outside 0..{parent}")));
        }
        Ok(IndexSet { parent, members })
    }

    pub fn full(parent: usize) -> Self {
        IndexSet { parent, members: (0..parent).collect() }
    }

    pub fn parent(&self) -> usize {
        self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.parent
    }

    /// Index sets nested as `self ⊆ other`, re-expressed inside `other`.
    pub fn relative_to(&self, other: &IndexSet) -> Result<IndexSet> {
        let members = self
            .members
            .iter()
            .map(|i| {
                other.members.binary_search(i).map_err(|_| Error::Dimension(format!("index {i} not in enclosing set")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IndexSet { parent: other.len(), members })
    }
}

#[derive(Serialize, Deserialize)]
struct IndexSetJson {
    parent_size: usize,
    indices: Vec<usize>,
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IndexSetJson { parent_size: self.parent, indices: self.members.iter().map(|i| i + 1).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = IndexSetJson::deserialize(d)?;
        if raw.indices.contains(&0) {
            return Err(serde::de::Error::custom("indices are 1-based"));
        }
        IndexSet::new(raw.parent_size, raw.indices.iter().map(|i| i - 1).collect()).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u64]]) -> NonnegMatrix {
        NonnegMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn product_of_small_matrices() {
        let a = m(&[&[1, 1], &[1, 0]]);
        assert_eq!(a.mul(&a).unwrap(), m(&[&[2, 1], &[1, 1]]));
        let r = m(&[&[1, 0, 1]]);
        let s = m(&[&[1], &[0], &[1]]);
        assert_eq!(r.mul(&s).unwrap(), m(&[&[2]]));
        assert!(s.mul(&s).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let a = m(&[&[u64::MAX, 1]]);
        let b = m(&[&[2], &[0]]);
        assert!(matches!(a.mul(&b), Err(Error::Overflow(_))));
        let c = m(&[&[1], &[1]]);
        let d = m(&[&[u64::MAX, u64::MAX]]);
        assert!(matches!(d.mul(&c), Err(Error::Overflow(_))));
    }

    #[test]
    fn nondegeneracy() {
        assert!(m(&[&[1, 1], &[1, 0]]).is_nondegenerate());
        assert!(!m(&[&[1, 0], &[1, 0]]).is_nondegenerate());
        assert!(!m(&[&[1, 1], &[0, 0]]).is_nondegenerate());
    }

    #[test]
    fn core_of_a_tail() {
        // 0 -> 1 -> 1 (loop) : index 0 has no predecessor.
        let a = m(&[&[0, 1], &[0, 1]]);
        let j = a.core_indices().unwrap();
        assert_eq!(j.members(), &[1]);
        assert_eq!(a.core().unwrap(), m(&[&[1]]));
        let nilpotent = m(&[&[0, 1], &[0, 0]]);
        assert!(nilpotent.core_indices().unwrap().is_empty());
        let full = m(&[&[1, 1], &[1, 0]]);
        assert!(full.core_indices().unwrap().is_full());
    }

    #[test]
    fn e_s_marks_nonzero_rows() {
        let s = m(&[&[1, 0], &[0, 0], &[2, 1]]);
        assert_eq!(e_s_matrix(&s), m(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 1]]));
    }

    #[test]
    fn submatrix_and_relative_sets() {
        let a = m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let k = IndexSet::new(3, vec![2, 0]).unwrap();
        let l = IndexSet::new(3, vec![1]).unwrap();
        assert_eq!(a.submatrix(&k, &l).unwrap(), m(&[&[2], &[8]]));
        let inner = IndexSet::new(3, vec![2]).unwrap();
        assert_eq!(inner.relative_to(&k).unwrap().members(), &[1]);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let a = m(&[&[0, 1, 0], &[1, 0, 3]]);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, r#"{"rows":2,"cols":3,"entries":[[0,1,0],[1,0,3]]}"#);
        let back: NonnegMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<NonnegMatrix>(r#"{"rows":2,"cols":2,"entries":[[1,1]]}"#).is_err());
        assert!(serde_json::from_str::<NonnegMatrix>(r#"{"rows":1,"cols":2,"entries":[[1,-1]]}"#).is_err());
        let set: IndexSet = serde_json::from_str(r#"{"parent_size":4,"indices":[4,1]}"#).unwrap();
        assert_eq!(set.members(), &[0, 3]);
        assert!(serde_json::from_str::<IndexSet>(r#"{"parent_size":4,"indices":[0]}"#).is_err());
    }

    #[test]
    fn ordering_is_dense_lexicographic() {
        let a = m(&[&[0, 1], &[1, 1]]);
        let b = m(&[&[1, 0], &[0, 0]]);
        assert!(a < b);
        assert!(m(&[&[5]]) < a);
        assert_eq!(a.cmp(&a.clone()), Ordering::Equal);
    }

    #[test]
    fn transpose_and_permute() {
        let a = m(&[&[0, 1], &[2, 3]]);
        assert_eq!(a.transpose(), m(&[&[0, 2], &[1, 3]]));
        assert_eq!(a.permuted(&[1, 0]).unwrap(), m(&[&[3, 2], &[1, 0]]));
    }
}
