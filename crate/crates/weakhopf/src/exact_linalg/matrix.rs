//! Sparse exact vectors and matrices.
//!
//! Storage is column-major sparse: a matrix is a list of sparse columns. This
//! is an internal representation choice only; all observable behavior (entry
//! access, equality, serialization) is that of a dense exact matrix. Sparsity
//! matters because tensor-square and tensor-cube operators of the bundled
//! algebras are overwhelmingly zero, and exact rational arithmetic makes
//! every stored zero expensive.

use std::collections::BTreeMap;

use super::scalar::Scalar;

/// A sparse vector: sorted nonzero entries plus an explicit dimension.
/// Entries are strictly increasing in index and never zero, so structural
/// equality is vector equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseVec {
    dim: usize,
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn zero(dim: usize) -> Self {
        SparseVec {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn unit(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        SparseVec {
            dim,
            entries: vec![(index, Scalar::one())],
        }
    }

    /// Builds from (index, value) pairs; duplicates are summed, zeros dropped.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, Scalar)>) -> Self {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, v) in entries {
            assert!(i < dim, "index {i} out of dimension {dim}");
            match acc.get_mut(&i) {
                Some(slot) => *slot += &v,
                None => {
                    acc.insert(i, v);
                }
            }
        }
        SparseVec {
            dim,
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        SparseVec {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, index: usize) -> Scalar {
        assert!(index < self.dim);
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    /// Index and value of the first nonzero entry.
    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn add(&self, rhs: &SparseVec) -> SparseVec {
        self.add_scaled(&Scalar::one(), rhs)
    }

    pub fn sub(&self, rhs: &SparseVec) -> SparseVec {
        self.add_scaled(&Scalar::from_int(-1), rhs)
    }

    /// self + c·rhs by sorted merge.
    pub fn add_scaled(&self, c: &Scalar, rhs: &SparseVec) -> SparseVec {
        assert_eq!(self.dim, rhs.dim, "vector dimension mismatch");
        if c.is_zero() || rhs.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + rhs.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < rhs.entries.len() {
            let take_a = match (self.entries.get(a), rhs.entries.get(b)) {
                (Some((ia, _)), Some((ib, _))) if ia == ib => {
                    let v = &self.entries[a].1 + &(c * &rhs.entries[b].1);
                    if !v.is_zero() {
                        out.push((*ia, v));
                    }
                    a += 1;
                    b += 1;
                    continue;
                }
                (Some((ia, _)), Some((ib, _))) => ia < ib,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            if take_a {
                out.push(self.entries[a].clone());
                a += 1;
            } else {
                let v = c * &rhs.entries[b].1;
                if !v.is_zero() {
                    out.push((rhs.entries[b].0, v));
                }
                b += 1;
            }
        }
        SparseVec {
            dim: self.dim,
            entries: out,
        }
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::zero(self.dim);
        }
        SparseVec {
            dim: self.dim,
            entries: self.entries.iter().map(|(i, v)| (*i, c * v)).collect(),
        }
    }

    pub fn neg(&self) -> SparseVec {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn conj(&self) -> SparseVec {
        SparseVec {
            dim: self.dim,
            entries: self.entries.iter().map(|(i, v)| (*i, v.conj())).collect(),
        }
    }

    pub fn dot(&self, rhs: &SparseVec) -> Scalar {
        assert_eq!(self.dim, rhs.dim, "vector dimension mismatch");
        let mut acc = Scalar::zero();
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < rhs.entries.len() {
            let (ia, ib) = (self.entries[a].0, rhs.entries[b].0);
            if ia == ib {
                acc += &(&self.entries[a].1 * &rhs.entries[b].1);
                a += 1;
                b += 1;
            } else if ia < ib {
                a += 1;
            } else {
                b += 1;
            }
        }
        acc
    }

    /// Concatenates vectors end to end.
    pub fn concat(parts: &[&SparseVec]) -> SparseVec {
        let dim: usize = parts.iter().map(|p| p.dim).sum();
        let mut entries = Vec::new();
        let mut offset = 0;
        for p in parts {
            for (i, v) in p.iter() {
                entries.push((offset + i, v.clone()));
            }
            offset += p.dim;
        }
        SparseVec { dim, entries }
    }

    /// Kronecker product: index (i, j) of self⊗rhs maps to i·rhs.dim + j.
    pub fn kron(&self, rhs: &SparseVec) -> SparseVec {
        let dim = self.dim * rhs.dim;
        let mut entries = Vec::with_capacity(self.entries.len() * rhs.entries.len());
        for (i, u) in &self.entries {
            for (j, v) in &rhs.entries {
                entries.push((i * rhs.dim + j, u * v));
            }
        }
        // blocks are emitted in increasing i then j, hence already sorted
        SparseVec { dim, entries }
    }
}

/// A sparse exact matrix, stored as columns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            columns: vec![SparseVec::zero(rows); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix {
            rows: n,
            cols: n,
            columns: (0..n).map(|j| SparseVec::unit(n, j)).collect(),
        }
    }

    pub fn from_cols(rows: usize, columns: Vec<SparseVec>) -> Self {
        for c in &columns {
            assert_eq!(c.dim(), rows, "column dimension mismatch");
        }
        Matrix {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) out of bounds");
            per_col[c].push((r, v));
        }
        Matrix {
            rows,
            cols,
            columns: per_col
                .into_iter()
                .map(|entries| SparseVec::from_entries(rows, entries))
                .collect(),
        }
    }

    pub fn from_dense(entries: &[Vec<Scalar>]) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let mut columns = vec![Vec::new(); cols];
        for (i, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    columns[j].push((i, v.clone()));
                }
            }
        }
        Matrix {
            rows,
            cols,
            columns: columns
                .into_iter()
                .map(|entries| SparseVec::from_entries(rows, entries))
                .collect(),
        }
    }

    /// Permutation matrix sending basis vector e_j to e_{perm[j]}.
    pub fn from_permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        Matrix {
            rows: n,
            cols: n,
            columns: perm.iter().map(|&i| SparseVec::unit(n, i)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.columns[j].get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.nnz()).sum()
    }

    /// Matrix-vector product A·v.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        assert_eq!(v.dim(), self.cols, "apply dimension mismatch");
        let mut acc = SparseVec::zero(self.rows);
        for (j, c) in v.iter() {
            acc = acc.add_scaled(c, &self.columns[j]);
        }
        acc
    }

    /// Row-vector product rᵀ·A, returned as a vector of length cols.
    pub fn apply_transposed(&self, r: &SparseVec) -> SparseVec {
        assert_eq!(r.dim(), self.rows, "apply_transposed dimension mismatch");
        SparseVec::from_entries(
            self.cols,
            (0..self.cols).filter_map(|j| {
                let v = r.dot(&self.columns[j]);
                (!v.is_zero()).then_some((j, v))
            }),
        )
    }

    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        Matrix {
            rows: self.rows,
            cols: rhs.cols,
            columns: rhs.columns.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            columns: self
                .columns
                .iter()
                .zip(&rhs.columns)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            columns: self
                .columns
                .iter()
                .zip(&rhs.columns)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().map(|col| col.scale(c)).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn transpose(&self) -> Matrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col.iter() {
                triplets.push((j, i, v.clone()));
            }
        }
        Matrix::from_triplets(self.cols, self.rows, triplets)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Stacks blocks vertically; all blocks must share a column count.
    pub fn vstack(blocks: &[&Matrix]) -> Matrix {
        assert!(!blocks.is_empty());
        let cols = blocks[0].cols;
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut triplets = Vec::new();
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            for (j, col) in b.columns.iter().enumerate() {
                for (i, v) in col.iter() {
                    triplets.push((offset + i, j, v.clone()));
                }
            }
            offset += b.rows;
        }
        Matrix::from_triplets(rows, cols, triplets)
    }

    /// Flattens column-major: entry (i, j) lands at index j·rows + i.
    pub fn flatten(&self) -> SparseVec {
        SparseVec::from_entries(
            self.rows * self.cols,
            self.columns.iter().enumerate().flat_map(|(j, col)| {
                let base = j * self.rows;
                col.iter()
                    .map(move |(i, v)| (base + i, v.clone()))
                    .collect::<Vec<_>>()
            }),
        )
    }

    /// Inverse of `flatten`.
    pub fn unflatten(rows: usize, cols: usize, v: &SparseVec) -> Matrix {
        assert_eq!(v.dim(), rows * cols);
        Matrix::from_triplets(
            rows,
            cols,
            v.iter().map(|(idx, s)| (idx % rows, idx / rows, s.clone())),
        )
    }

    /// Kronecker product with row-major index convention
    /// (i,k)⊗(j,l) ↦ (i·rhs.rows + j, k·rhs.cols + l), so that
    /// (A⊗B)(u⊗v) = (Au)⊗(Bv) for the `SparseVec::kron` pairing.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut columns = Vec::with_capacity(cols);
        for k in 0..self.cols {
            for l in 0..rhs.cols {
                columns.push(self.columns[k].kron(&rhs.columns[l]));
            }
        }
        Matrix {
            rows,
            cols,
            columns,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn apply_matches_dense() {
        let a = Matrix::from_dense(&[vec![s(1), s(2)], vec![s(3), s(4)]]);
        let v = SparseVec::from_dense(&[s(5), s(6)]);
        assert_eq!(a.apply(&v).to_dense(), vec![s(17), s(39)]);
    }

    #[test]
    fn matmul_identity() {
        let a = Matrix::from_dense(&[vec![s(1), s(2)], vec![s(3), s(4)]]);
        let i = Matrix::identity(2);
        assert_eq!(a.matmul(&i), a);
        assert_eq!(i.matmul(&a), a);
    }

    #[test]
    fn kron_mixed_product() {
        let a = Matrix::from_dense(&[vec![s(1), s(2)], vec![s(0), s(1)]]);
        let b = Matrix::from_dense(&[vec![s(2), s(0)], vec![s(1), s(1)]]);
        let u = SparseVec::from_dense(&[s(1), s(3)]);
        let v = SparseVec::from_dense(&[s(-1), s(2)]);
        let lhs = a.kron(&b).apply(&u.kron(&v));
        let rhs = a.apply(&u).kron(&b.apply(&v));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn transpose_involution() {
        let a = Matrix::from_dense(&[vec![s(1), s(2), s(0)], vec![s(0), s(3), s(4)]]);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().rows(), 3);
    }

    #[test]
    fn add_scaled_cancels() {
        let u = SparseVec::from_dense(&[s(1), s(2), s(0)]);
        let w = u.add_scaled(&s(-1), &u);
        assert!(w.is_zero());
    }

    #[test]
    fn permutation_flip() {
        // flip on C^2 ⊗ C^2
        let n = 2;
        let perm: Vec<usize> = (0..n * n).map(|idx| (idx % n) * n + idx / n).collect();
        let p = Matrix::from_permutation(&perm);
        let u = SparseVec::from_dense(&[s(1), s(2)]);
        let v = SparseVec::from_dense(&[s(3), s(5)]);
        assert_eq!(p.apply(&u.kron(&v)), v.kron(&u));
    }
}
