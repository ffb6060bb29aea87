//! Canonical subspaces and the incremental reduced-echelon solver.
//!
//! [`Echelon`] maintains a reduced row-echelon basis incrementally; every
//! inserted vector may carry a payload vector to which the same row
//! operations are applied. This one primitive drives all solvers here:
//! kernels (payload = coordinates of the inserted combination), particular
//! solutions (reduce the right-hand side), and consistency of over-determined
//! functional systems (payload = prescribed values).

use super::matrix::{Matrix, SparseVec};
use crate::error::{Error, Result};

/// A linear subspace in canonical form: basis vectors in reduced echelon
/// form (unit leading coefficients, pivots strictly increasing, pivot
/// columns cleared), so equal subspaces are structurally equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<SparseVec>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| SparseVec::unit(ambient, i)).collect(),
        }
    }

    pub fn span(ambient: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut ech = Echelon::new(ambient, 0);
        for v in vectors {
            ech.insert(v, SparseVec::zero(0));
        }
        ech.into_subspace()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        assert_eq!(v.dim(), self.ambient);
        let mut rem = v.clone();
        for row in &self.basis {
            if rem.is_zero() {
                break;
            }
            if let Some((pivot, _)) = row.leading() {
                let c = rem.get(pivot);
                if !c.is_zero() {
                    rem = rem.add_scaled(&-c, row);
                }
            }
        }
        rem.is_zero()
    }

    /// Sum of two subspaces of the same ambient space.
    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        Subspace::span(
            self.ambient,
            self.basis.iter().chain(other.basis.iter()).cloned(),
        )
    }
}

/// Outcome of inserting a vector into an [`Echelon`].
pub enum Insert {
    /// The vector was independent and joined the basis.
    Added,
    /// The vector was a combination of earlier ones; the payload carries the
    /// residual after the same row operations (zero iff the attached data is
    /// consistent with the dependency).
    Dependent(SparseVec),
}

/// Incremental reduced row-echelon basis with per-row payload vectors.
pub struct Echelon {
    dim: usize,
    payload_dim: usize,
    /// Rows sorted by strictly increasing pivot; each pivot entry is 1 and
    /// cleared from all other rows.
    rows: Vec<(usize, SparseVec, SparseVec)>,
}

impl Echelon {
    pub fn new(dim: usize, payload_dim: usize) -> Self {
        Echelon {
            dim,
            payload_dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&SparseVec, &SparseVec)> {
        self.rows.iter().map(|(_, r, p)| (r, p))
    }

    /// Reduces (v, payload) against the current basis without mutating it.
    pub fn reduce(&self, v: &SparseVec, payload: &SparseVec) -> (SparseVec, SparseVec) {
        assert_eq!(v.dim(), self.dim);
        assert_eq!(payload.dim(), self.payload_dim);
        let mut rem = v.clone();
        let mut pay = payload.clone();
        for (pivot, row, row_pay) in &self.rows {
            let c = rem.get(*pivot);
            if !c.is_zero() {
                let neg = -c;
                rem = rem.add_scaled(&neg, row);
                pay = pay.add_scaled(&neg, row_pay);
            }
        }
        (rem, pay)
    }

    pub fn insert(&mut self, v: SparseVec, payload: SparseVec) -> Insert {
        let (rem, pay) = self.reduce(&v, &payload);
        let Some((pivot, lead)) = rem.leading().map(|(i, c)| (i, c.clone())) else {
            return Insert::Dependent(pay);
        };
        let inv = lead.inv();
        let new_row = rem.scale(&inv);
        let new_pay = pay.scale(&inv);
        // clear the new pivot from existing rows to keep the form reduced
        for (_, row, row_pay) in &mut self.rows {
            let c = row.get(pivot);
            if !c.is_zero() {
                let neg = -c;
                *row = row.add_scaled(&neg, &new_row);
                *row_pay = row_pay.add_scaled(&neg, &new_pay);
            }
        }
        let pos = self.rows.partition_point(|(p, _, _)| *p < pivot);
        self.rows.insert(pos, (pivot, new_row, new_pay));
        Insert::Added
    }

    pub fn into_subspace(self) -> Subspace {
        Subspace {
            ambient: self.dim,
            basis: self.rows.into_iter().map(|(_, r, _)| r).collect(),
        }
    }
}

/// Rank of a matrix, by reducing its columns.
pub fn rank(a: &Matrix) -> usize {
    let mut ech = Echelon::new(a.rows(), 0);
    for j in 0..a.cols() {
        ech.insert(a.col(j).clone(), SparseVec::zero(0));
    }
    ech.rank()
}

/// Canonical basis of the column space.
pub fn image_basis(a: &Matrix) -> Subspace {
    Subspace::span(a.rows(), (0..a.cols()).map(|j| a.col(j).clone()))
}

/// Canonical basis of {x : Ax = 0}.
pub fn kernel_basis(a: &Matrix) -> Subspace {
    let mut ech = Echelon::new(a.rows(), a.cols());
    let mut kernel = Vec::new();
    for j in 0..a.cols() {
        if let Insert::Dependent(combo) = ech.insert(a.col(j).clone(), SparseVec::unit(a.cols(), j))
        {
            // combo expresses column j minus a combination of earlier
            // columns summing to zero, hence lies in the kernel
            kernel.push(combo);
        }
    }
    Subspace::span(a.cols(), kernel)
}

/// One particular solution of Ax = b (if any) together with the kernel of A.
pub fn solve_linear(a: &Matrix, b: &SparseVec) -> (Option<SparseVec>, Subspace) {
    assert_eq!(b.dim(), a.rows(), "right-hand side dimension mismatch");
    let mut ech = Echelon::new(a.rows(), a.cols());
    let mut kernel = Vec::new();
    for j in 0..a.cols() {
        if let Insert::Dependent(combo) = ech.insert(a.col(j).clone(), SparseVec::unit(a.cols(), j))
        {
            kernel.push(combo);
        }
    }
    // reduce b with zero payload: the residual payload q satisfies
    // rem = b - A·(-q)... concretely b = A·(-q) + rem, so -q solves when rem = 0
    let (rem, q) = ech.reduce(b, &SparseVec::zero(a.cols()));
    let solution = rem.is_zero().then(|| q.neg());
    (solution, Subspace::span(a.cols(), kernel))
}

pub fn subspace_equal(u: &Subspace, v: &Subspace) -> bool {
    assert_eq!(u.ambient(), v.ambient(), "ambient dimension mismatch");
    u == v
}

/// Generalized inverse of T with prescribed kernel projection.
///
/// Given the kernel K of T and an idempotent P whose image is a complement
/// of K, with T∘P = T and K ⊆ Ker(P), returns R with R∘T = P,
/// T∘R = (projection onto the image of T), T∘R∘T = T and R∘T∘R = R.
pub fn restricted_inverse(t: &Matrix, k: &Subspace, p: &Matrix) -> Result<Matrix> {
    if k != &kernel_basis(t) {
        return Err(Error::RestrictedInverse(
            "supplied subspace is not the kernel of T".into(),
        ));
    }
    if p.matmul(p) != *p {
        return Err(Error::RestrictedInverse("P is not idempotent".into()));
    }
    if t.matmul(p) != *t {
        return Err(Error::RestrictedInverse("T∘P does not equal T".into()));
    }
    let p_image = image_basis(p);
    if p_image.dim() + k.dim() != t.cols() || p_image.sum(k).dim() != t.cols() {
        return Err(Error::RestrictedInverse(
            "image of P is not a complement of the kernel".into(),
        ));
    }
    // reduce the columns of T, remembering which input combination produced
    // each basis vector of the image
    let mut ech = Echelon::new(t.rows(), t.cols());
    for j in 0..t.cols() {
        ech.insert(t.col(j).clone(), SparseVec::unit(t.cols(), j));
    }
    let mut columns = Vec::with_capacity(t.rows());
    for i in 0..t.rows() {
        // e_i = T·(-q) + rem with rem outside the image; send e_i to P·(-q)
        let (_, q) = ech.reduce(&SparseVec::unit(t.rows(), i), &SparseVec::zero(t.cols()));
        columns.push(p.apply(&q.neg()));
    }
    Ok(Matrix::from_cols(t.cols(), columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::Scalar;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn solve_identity_system() {
        let a = Matrix::identity(2);
        let b = SparseVec::from_dense(&[s(2), s(3)]);
        let (sol, ker) = solve_linear(&a, &b);
        assert_eq!(sol.unwrap().to_dense(), vec![s(2), s(3)]);
        assert_eq!(ker.dim(), 0);
    }

    #[test]
    fn solve_underdetermined() {
        // single equation x + y = 0
        let a = Matrix::from_dense(&[vec![s(1), s(1)]]);
        let b = SparseVec::from_dense(&[s(0)]);
        let (sol, ker) = solve_linear(&a, &b);
        assert!(a.apply(&sol.unwrap()).is_zero());
        assert_eq!(ker.dim(), 1);
    }

    #[test]
    fn solve_inconsistent() {
        let a = Matrix::from_dense(&[vec![s(1)], vec![s(1)]]);
        let b = SparseVec::from_dense(&[s(1), s(2)]);
        let (sol, _) = solve_linear(&a, &b);
        assert!(sol.is_none());
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        assert_eq!(kernel_basis(&Matrix::zero(2, 2)).dim(), 2);
        assert_eq!(kernel_basis(&Matrix::identity(3)).dim(), 0);
    }

    #[test]
    fn image_of_rank_one() {
        // outer product (1,2)ᵀ(1,1)
        let a = Matrix::from_dense(&[vec![s(1), s(1)], vec![s(2), s(2)]]);
        assert_eq!(image_basis(&a).dim(), 1);
    }

    #[test]
    fn rank_nullity() {
        let a = Matrix::from_dense(&[
            vec![s(1), s(2), s(3), s(4)],
            vec![s(2), s(4), s(6), s(8)],
            vec![s(0), s(1), s(0), s(1)],
        ]);
        assert_eq!(rank(&a) + kernel_basis(&a).dim(), a.cols());
    }

    #[test]
    fn subspace_equality_is_canonical() {
        let u = Subspace::span(
            2,
            vec![
                SparseVec::from_dense(&[s(1), s(1)]),
                SparseVec::from_dense(&[s(2), s(2)]),
            ],
        );
        let v = Subspace::span(2, vec![SparseVec::from_dense(&[s(-3), s(-3)])]);
        assert!(subspace_equal(&u, &v));
        let w = Subspace::span(2, vec![SparseVec::unit(2, 1)]);
        assert!(!subspace_equal(&u, &w));
    }

    #[test]
    fn restricted_inverse_of_invertible() {
        let t = Matrix::from_dense(&[vec![s(2), s(1)], vec![s(1), s(1)]]);
        let r = restricted_inverse(&t, &kernel_basis(&t), &Matrix::identity(2)).unwrap();
        assert_eq!(t.matmul(&r), Matrix::identity(2));
        assert_eq!(r.matmul(&t), Matrix::identity(2));
    }

    #[test]
    fn restricted_inverse_of_zero() {
        let t = Matrix::zero(2, 2);
        let r = restricted_inverse(&t, &kernel_basis(&t), &Matrix::zero(2, 2)).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn restricted_inverse_projection_case() {
        // T is the projection onto the first coordinate of C^2; kernel is
        // span{e2}; P = T works as the complement projection
        let t = Matrix::from_dense(&[vec![s(1), s(0)], vec![s(0), s(0)]]);
        let k = kernel_basis(&t);
        let r = restricted_inverse(&t, &k, &t).unwrap();
        assert_eq!(r.matmul(&t), t);
        assert_eq!(t.matmul(&r).matmul(&t), t);
        assert_eq!(r.matmul(&t).matmul(&r), r);
    }

    #[test]
    fn restricted_inverse_rejects_bad_projection() {
        let t = Matrix::from_dense(&[vec![s(1), s(0)], vec![s(0), s(0)]]);
        let k = kernel_basis(&t);
        // identity is idempotent but its image is not complementary to K
        // together with T∘P = T failing
        assert!(restricted_inverse(&t, &k, &Matrix::identity(2)).is_err());
    }
}
