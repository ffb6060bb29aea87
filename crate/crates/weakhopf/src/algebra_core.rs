//! Structure-constant algebras, multipliers, and tensor squares.
//!
//! A [`FinAlgebra`] is a finite-dimensional associative algebra presented by
//! structure constants over Q(i), optionally with an involution. Elements of
//! its multiplier algebra M(A) are represented operationally as
//! [`Multiplier`] pairs (λ, ρ) of left/right action matrices — the form in
//! which coproduct values, canonical idempotents and all "covered" products
//! are actually used. Tensor squares (and, via Kronecker products, cubes)
//! are never materialized as structure-constant tables; their products are
//! computed factorwise on demand.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::exact_linalg::{kernel_basis, solve_linear, Echelon, Matrix, Scalar, SparseVec};

#[derive(Clone, Debug)]
enum MultTable {
    /// products[i][j] = coordinates of eᵢ·eⱼ
    Direct(Vec<Vec<SparseVec>>),
    /// componentwise product of two factor algebras, row-major basis order
    Tensor(Box<FinAlgebra>, Box<FinAlgebra>),
}

/// A finite-dimensional associative algebra given by structure constants.
#[derive(Clone, Debug)]
pub struct FinAlgebra {
    dim: usize,
    basis_names: Vec<String>,
    table: MultTable,
    involution: Option<Matrix>,
    unit_cache: OnceLock<Option<SparseVec>>,
}

impl FinAlgebra {
    pub fn from_products(
        basis_names: Vec<String>,
        products: Vec<Vec<SparseVec>>,
        involution: Option<Matrix>,
    ) -> Self {
        let dim = basis_names.len();
        assert_eq!(products.len(), dim);
        for row in &products {
            assert_eq!(row.len(), dim);
            for p in row {
                assert_eq!(p.dim(), dim);
            }
        }
        if let Some(m) = &involution {
            assert_eq!((m.rows(), m.cols()), (dim, dim));
        }
        FinAlgebra {
            dim,
            basis_names,
            table: MultTable::Direct(products),
            involution,
            unit_cache: OnceLock::new(),
        }
    }

    /// Builds from sparse structure constants c[i][j][k] with eᵢeⱼ = Σₖ c·eₖ.
    pub fn from_structure_constants(
        basis_names: Vec<String>,
        constants: impl IntoIterator<Item = (usize, usize, usize, Scalar)>,
        involution: Option<Matrix>,
    ) -> Self {
        let dim = basis_names.len();
        let mut raw: Vec<Vec<Vec<(usize, Scalar)>>> = vec![vec![Vec::new(); dim]; dim];
        for (i, j, k, v) in constants {
            raw[i][j].push((k, v));
        }
        let products = raw
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|entries| SparseVec::from_entries(dim, entries))
                    .collect()
            })
            .collect();
        Self::from_products(basis_names, products, involution)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn involution(&self) -> Option<&Matrix> {
        self.involution.as_ref()
    }

    pub fn with_involution(mut self, involution: Option<Matrix>) -> Self {
        self.involution = involution;
        self
    }

    /// eᵢ·eⱼ in coordinates.
    pub fn product_basis(&self, i: usize, j: usize) -> SparseVec {
        match &self.table {
            MultTable::Direct(products) => products[i][j].clone(),
            MultTable::Tensor(a, b) => {
                let bd = b.dim;
                a.product_basis(i / bd, j / bd)
                    .kron(&b.product_basis(i % bd, j % bd))
            }
        }
    }

    pub fn multiply(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::zero(self.dim);
        for (i, cu) in u.iter() {
            for (j, cv) in v.iter() {
                acc = acc.add_scaled(&(cu * cv), &self.product_basis(i, j));
            }
        }
        acc
    }

    /// Matrix of x ↦ v·x.
    pub fn left_mult_matrix(&self, v: &SparseVec) -> Matrix {
        let cols = (0..self.dim)
            .map(|j| {
                let mut acc = SparseVec::zero(self.dim);
                for (i, c) in v.iter() {
                    acc = acc.add_scaled(c, &self.product_basis(i, j));
                }
                acc
            })
            .collect();
        Matrix::from_cols(self.dim, cols)
    }

    /// Matrix of x ↦ x·v.
    pub fn right_mult_matrix(&self, v: &SparseVec) -> Matrix {
        let cols = (0..self.dim)
            .map(|j| {
                let mut acc = SparseVec::zero(self.dim);
                for (i, c) in v.iter() {
                    acc = acc.add_scaled(c, &self.product_basis(j, i));
                }
                acc
            })
            .collect();
        Matrix::from_cols(self.dim, cols)
    }

    /// The multiplication map A⊗A → A as a matrix (row-major tensor basis).
    pub fn multiplication_matrix(&self) -> Matrix {
        let n = self.dim;
        let mut cols = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                cols.push(self.product_basis(i, j));
            }
        }
        Matrix::from_cols(n, cols)
    }

    /// The two-sided unit, if one exists.
    pub fn unit(&self) -> Option<&SparseVec> {
        self.unit_cache
            .get_or_init(|| match &self.table {
                MultTable::Tensor(a, b) => {
                    let ua = a.unit()?;
                    let ub = b.unit()?;
                    Some(ua.kron(ub))
                }
                MultTable::Direct(_) => {
                    let n = self.dim;
                    // u·eⱼ = eⱼ and eⱼ·u = eⱼ, stacked over j
                    let mut triplets = Vec::new();
                    let mut rhs = Vec::new();
                    for j in 0..n {
                        for i in 0..n {
                            for (k, c) in self.product_basis(i, j).iter() {
                                triplets.push((2 * j * n + k, i, c.clone()));
                            }
                            for (k, c) in self.product_basis(j, i).iter() {
                                triplets.push(((2 * j + 1) * n + k, i, c.clone()));
                            }
                        }
                        rhs.push((2 * j * n + j, Scalar::one()));
                        rhs.push(((2 * j + 1) * n + j, Scalar::one()));
                    }
                    let a = Matrix::from_triplets(2 * n * n, n, triplets);
                    let b = SparseVec::from_entries(2 * n * n, rhs);
                    solve_linear(&a, &b).0
                }
            })
            .as_ref()
    }

    pub fn is_unital(&self) -> bool {
        self.unit().is_some()
    }

    /// Applies the involution to a coordinate vector (conjugate-linear).
    pub fn star(&self, v: &SparseVec) -> Result<SparseVec> {
        let m = self
            .involution
            .as_ref()
            .ok_or_else(|| Error::Unsupported("algebra carries no involution".into()))?;
        Ok(m.apply(&v.conj()))
    }

    /// First basis triple violating associativity, if any.
    pub fn associativity_witness(&self) -> Option<(usize, usize, usize)> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let ij = self.product_basis(i, j);
                for k in 0..self.dim {
                    let lhs = self.multiply(&ij, &SparseVec::unit(self.dim, k));
                    let rhs =
                        self.multiply(&SparseVec::unit(self.dim, i), &self.product_basis(j, k));
                    if lhs != rhs {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// First basis pair violating the involution laws, if any.
    pub fn involution_witness(&self) -> Option<(usize, usize)> {
        let m = self.involution.as_ref()?;
        let double = m.matmul(&m.conj());
        if double != Matrix::identity(self.dim) {
            return Some((0, 0));
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let lhs = m.apply(&self.product_basis(i, j).conj());
                let rhs = self.multiply(m.col(j), m.col(i));
                if lhs != rhs {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// True iff (eᵢeⱼ)eₖ = eᵢ(eⱼeₖ) for every basis triple.
pub fn check_associativity(a: &FinAlgebra) -> bool {
    a.associativity_witness().is_none()
}

/// True iff left and right multiplications jointly separate points:
/// ab = 0 for all b implies a = 0, and ba = 0 for all b implies a = 0.
pub fn check_nondegenerate(a: &FinAlgebra) -> bool {
    let n = a.dim();
    for left in [true, false] {
        let mut triplets = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let p = if left {
                    a.product_basis(i, j)
                } else {
                    a.product_basis(j, i)
                };
                for (k, c) in p.iter() {
                    triplets.push((j * n + k, i, c.clone()));
                }
            }
        }
        let stacked = Matrix::from_triplets(n * n, n, triplets);
        if kernel_basis(&stacked).dim() != 0 {
            return false;
        }
    }
    true
}

/// True iff the span of all products eᵢeⱼ is the whole algebra (A = A²).
pub fn check_idempotent_algebra(a: &FinAlgebra) -> bool {
    let n = a.dim();
    let mut ech = Echelon::new(n, 0);
    for i in 0..n {
        for j in 0..n {
            ech.insert(a.product_basis(i, j), SparseVec::zero(0));
        }
    }
    ech.rank() == n
}

/// An element of the multiplier algebra M(A), given by its left action λ
/// (x ↦ m·x) and right action ρ (x ↦ x·m).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Multiplier {
    dim: usize,
    lambda: Matrix,
    rho: Matrix,
}

impl Multiplier {
    pub fn new(lambda: Matrix, rho: Matrix) -> Self {
        assert_eq!(lambda.rows(), lambda.cols());
        assert_eq!(rho.rows(), rho.cols());
        assert_eq!(lambda.rows(), rho.rows());
        Multiplier {
            dim: lambda.rows(),
            lambda,
            rho,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Multiplier {
            dim,
            lambda: Matrix::zero(dim, dim),
            rho: Matrix::zero(dim, dim),
        }
    }

    /// The identity of M(A).
    pub fn one(dim: usize) -> Self {
        Multiplier {
            dim,
            lambda: Matrix::identity(dim),
            rho: Matrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> &Matrix {
        &self.lambda
    }

    pub fn rho(&self) -> &Matrix {
        &self.rho
    }

    /// m·x for an algebra element x.
    pub fn act_left(&self, x: &SparseVec) -> SparseVec {
        self.lambda.apply(x)
    }

    /// x·m for an algebra element x.
    pub fn act_right(&self, x: &SparseVec) -> SparseVec {
        self.rho.apply(x)
    }

    /// Product in M(A): λ = λ₁λ₂, ρ = ρ₂ρ₁.
    pub fn mul(&self, rhs: &Multiplier) -> Multiplier {
        assert_eq!(self.dim, rhs.dim);
        Multiplier {
            dim: self.dim,
            lambda: self.lambda.matmul(&rhs.lambda),
            rho: rhs.rho.matmul(&self.rho),
        }
    }

    pub fn add(&self, rhs: &Multiplier) -> Multiplier {
        assert_eq!(self.dim, rhs.dim);
        Multiplier {
            dim: self.dim,
            lambda: self.lambda.add(&rhs.lambda),
            rho: self.rho.add(&rhs.rho),
        }
    }

    pub fn sub(&self, rhs: &Multiplier) -> Multiplier {
        assert_eq!(self.dim, rhs.dim);
        Multiplier {
            dim: self.dim,
            lambda: self.lambda.sub(&rhs.lambda),
            rho: self.rho.sub(&rhs.rho),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Multiplier {
        Multiplier {
            dim: self.dim,
            lambda: self.lambda.scale(c),
            rho: self.rho.scale(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() && self.rho.is_zero()
    }

    /// Checks the module-map laws λ(ab) = λ(a)b, ρ(ab) = aρ(b) and the
    /// compatibility ρ(a)b = aλ(b) on all basis pairs.
    pub fn is_valid(&self, alg: &FinAlgebra) -> bool {
        let n = alg.dim();
        assert_eq!(self.dim, n);
        for i in 0..n {
            let li = self.lambda.col(i).clone();
            let ri = self.rho.col(i).clone();
            for j in 0..n {
                let prod = alg.product_basis(i, j);
                if self.lambda.apply(&prod) != alg.multiply(&li, &SparseVec::unit(n, j)) {
                    return false;
                }
                if self.rho.apply(&alg.product_basis(j, i)) // ρ(eⱼeᵢ) = eⱼρ(eᵢ)
                    != alg.multiply(&SparseVec::unit(n, j), &ri)
                {
                    return false;
                }
                if alg.multiply(&ri, &SparseVec::unit(n, j))
                    != alg.multiply(&SparseVec::unit(n, i), self.lambda.col(j))
                {
                    return false;
                }
            }
        }
        true
    }

    /// Flattened (λ | ρ) coordinates, used to span multiplier subspaces.
    pub fn flatten(&self) -> SparseVec {
        SparseVec::concat(&[&self.lambda.flatten(), &self.rho.flatten()])
    }

    pub fn unflatten(dim: usize, v: &SparseVec) -> Multiplier {
        assert_eq!(v.dim(), 2 * dim * dim);
        let mut lam = Vec::new();
        let mut rho = Vec::new();
        for (idx, c) in v.iter() {
            if idx < dim * dim {
                lam.push((idx % dim, idx / dim, c.clone()));
            } else {
                let k = idx - dim * dim;
                rho.push((k % dim, k / dim, c.clone()));
            }
        }
        Multiplier {
            dim,
            lambda: Matrix::from_triplets(dim, dim, lam),
            rho: Matrix::from_triplets(dim, dim, rho),
        }
    }
}

/// The canonical embedding A → M(A): left and right multiplication by `a`.
pub fn embed(alg: &FinAlgebra, a: &SparseVec) -> Multiplier {
    Multiplier {
        dim: alg.dim(),
        lambda: alg.left_mult_matrix(a),
        rho: alg.right_mult_matrix(a),
    }
}

/// Recovers the element a ∈ A with embed(a) = m, if m lies in the embedded
/// copy of A. For unital algebras this is λ(1); otherwise the overdetermined
/// linear system over all basis equations is solved and cross-verified.
pub fn element_of(alg: &FinAlgebra, m: &Multiplier) -> Result<SparseVec> {
    let n = alg.dim();
    assert_eq!(m.dim(), n);
    if let Some(u) = alg.unit() {
        return Ok(m.lambda.apply(u));
    }
    // stack the equations v·eⱼ = λ_m(eⱼ) over j and solve for v
    let blocks: Vec<Matrix> = (0..n)
        .map(|j| alg.right_mult_matrix(&SparseVec::unit(n, j)))
        .collect();
    let block_refs: Vec<&Matrix> = blocks.iter().collect();
    let stacked = Matrix::vstack(&block_refs);
    let rhs_parts: Vec<&SparseVec> = (0..n).map(|j| m.lambda.col(j)).collect();
    let rhs = SparseVec::concat(&rhs_parts);
    let (sol, _) = solve_linear(&stacked, &rhs);
    let v = sol.ok_or_else(|| {
        Error::ExtractionFailed("multiplier does not act as an algebra element".into())
    })?;
    // the λ equations hold by construction; verify the ρ side
    for j in 0..n {
        if alg.multiply(&SparseVec::unit(n, j), &v) != *m.rho.col(j) {
            return Err(Error::ExtractionFailed(
                "right action disagrees with the extracted element".into(),
            ));
        }
    }
    Ok(v)
}

/// A⊗A with componentwise product, basis ordered row-major.
pub fn tensor_square(a: &FinAlgebra) -> FinAlgebra {
    tensor_product(a, a)
}

pub fn tensor_product(a: &FinAlgebra, b: &FinAlgebra) -> FinAlgebra {
    let mut names = Vec::with_capacity(a.dim() * b.dim());
    for x in a.basis_names() {
        for y in b.basis_names() {
            names.push(format!("{x}⊗{y}"));
        }
    }
    let involution = match (a.involution(), b.involution()) {
        (Some(p), Some(q)) => Some(p.kron(q)),
        _ => None,
    };
    FinAlgebra {
        dim: a.dim() * b.dim(),
        basis_names: names,
        table: MultTable::Tensor(Box::new(a.clone()), Box::new(b.clone())),
        involution,
        unit_cache: OnceLock::new(),
    }
}

/// The multiplier 1⊗b ∈ M(A⊗A) for b ∈ A.
pub fn one_tensor(alg: &FinAlgebra, b: &SparseVec) -> Multiplier {
    let n = alg.dim();
    let id = Matrix::identity(n);
    Multiplier::new(
        id.kron(&alg.left_mult_matrix(b)),
        id.kron(&alg.right_mult_matrix(b)),
    )
}

/// The multiplier a⊗1 ∈ M(A⊗A) for a ∈ A.
pub fn tensor_one(alg: &FinAlgebra, a: &SparseVec) -> Multiplier {
    let n = alg.dim();
    let id = Matrix::identity(n);
    Multiplier::new(
        alg.left_mult_matrix(a).kron(&id),
        alg.right_mult_matrix(a).kron(&id),
    )
}

/// Flip permutation matrix on A⊗A (dim n each side): eᵢ⊗eⱼ ↦ eⱼ⊗eᵢ.
pub fn flip_matrix(n: usize) -> Matrix {
    let perm: Vec<usize> = (0..n * n).map(|idx| (idx % n) * n + idx / n).collect();
    Matrix::from_permutation(&perm)
}

/// Flip of the first two legs of A⊗A⊗A: eᵢ⊗eⱼ⊗eₖ ↦ eⱼ⊗eᵢ⊗eₖ.
pub fn flip12_matrix(n: usize) -> Matrix {
    let n2 = n * n;
    let perm: Vec<usize> = (0..n * n2)
        .map(|idx| {
            let (i, j, k) = (idx / n2, (idx / n) % n, idx % n);
            j * n2 + i * n + k
        })
        .collect();
    Matrix::from_permutation(&perm)
}

/// Places a multiplier of A⊗A on legs 1 and 3 of A⊗A⊗A (identity on leg 2),
/// by conjugating its leg-2,3 placement with the flip of the first two legs.
pub fn leg13(alg: &FinAlgebra, m: &Multiplier) -> Multiplier {
    let n = alg.dim();
    assert_eq!(m.dim(), n * n);
    let p = flip12_matrix(n);
    let id = Matrix::identity(n);
    let lam = p.matmul(&id.kron(&m.lambda)).matmul(&p);
    let rho = p.matmul(&id.kron(&m.rho)).matmul(&p);
    Multiplier::new(lam, rho)
}

/// Basis of M(A) as abstract multipliers, together with M(A)'s own algebra
/// structure (product = composition of actions).
pub fn multiplier_algebra(a: &FinAlgebra) -> Result<(Vec<Multiplier>, FinAlgebra)> {
    if !check_nondegenerate(a) {
        return Err(Error::DegenerateAlgebra(
            "multiplier algebra of a degenerate algebra is ill-defined".into(),
        ));
    }
    let n = a.dim();
    let nn = n * n;
    // unknowns: flattened λ (column-major, n²) then flattened ρ (n²)
    let lam_idx = |col: usize, row: usize| col * n + row;
    let rho_idx = |col: usize, row: usize| nn + col * n + row;
    let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
    let mut row_count = 0;
    for i in 0..n {
        for j in 0..n {
            let p = a.product_basis(i, j);
            // λ(eᵢeⱼ) = λ(eᵢ)·eⱼ
            for r in 0..n {
                for (k, c) in p.iter() {
                    triplets.push((row_count + r, lam_idx(k, r), c.clone()));
                }
            }
            for s in 0..n {
                for (r, c) in a.product_basis(s, j).iter() {
                    triplets.push((row_count + r, lam_idx(i, s), -c));
                }
            }
            row_count += n;
            // ρ(eᵢeⱼ) = eᵢ·ρ(eⱼ)
            for r in 0..n {
                for (k, c) in p.iter() {
                    triplets.push((row_count + r, rho_idx(k, r), c.clone()));
                }
            }
            for s in 0..n {
                for (r, c) in a.product_basis(i, s).iter() {
                    triplets.push((row_count + r, rho_idx(j, s), -c));
                }
            }
            row_count += n;
            // ρ(eᵢ)·eⱼ = eᵢ·λ(eⱼ)
            for s in 0..n {
                for (r, c) in a.product_basis(s, j).iter() {
                    triplets.push((row_count + r, rho_idx(i, s), c.clone()));
                }
                for (r, c) in a.product_basis(i, s).iter() {
                    triplets.push((row_count + r, lam_idx(j, s), -c));
                }
            }
            row_count += n;
        }
    }
    let system = Matrix::from_triplets(row_count, 2 * nn, triplets);
    let space = kernel_basis(&system);
    let basis: Vec<Multiplier> = space
        .basis()
        .iter()
        .map(|v| Multiplier::unflatten(n, v))
        .collect();
    // coordinates on the computed basis, for the structure constants
    let m = basis.len();
    let mut coords = Echelon::new(2 * nn, m);
    for (t, mult) in basis.iter().enumerate() {
        coords.insert(mult.flatten(), SparseVec::unit(m, t));
    }
    let mut products = vec![vec![SparseVec::zero(m); m]; m];
    for (i, mi) in basis.iter().enumerate() {
        for (j, mj) in basis.iter().enumerate() {
            let prod = mi.mul(mj).flatten();
            let (rem, pay) = coords.reduce(&prod, &SparseVec::zero(m));
            assert!(rem.is_zero(), "M(A) is not closed under composition");
            products[i][j] = pay.neg();
        }
    }
    let names = (0..m).map(|t| format!("m{t}")).collect();
    Ok((basis, FinAlgebra::from_products(names, products, None)))
}

/// Expresses a multiplier in the coordinates of a flattened multiplier
/// basis, if it lies in the span.
pub fn multiplier_coordinates(basis: &[Multiplier], m: &Multiplier) -> Option<SparseVec> {
    let k = basis.len();
    let flat_dim = 2 * m.dim() * m.dim();
    let mut ech = Echelon::new(flat_dim, k);
    for (t, b) in basis.iter().enumerate() {
        ech.insert(b.flatten(), SparseVec::unit(k, t));
    }
    let (rem, pay) = ech.reduce(&m.flatten(), &SparseVec::zero(k));
    rem.is_zero().then(|| pay.neg())
}

/// (m⊗I)x for x ∈ V⊗W (row-major) without materializing the Kronecker matrix.
pub fn apply_first(m: &Matrix, x: &SparseVec, second_dim: usize) -> SparseVec {
    assert_eq!(x.dim(), m.cols() * second_dim);
    SparseVec::from_entries(
        m.rows() * second_dim,
        x.iter().flat_map(|(idx, v)| {
            let (p, q) = (idx / second_dim, idx % second_dim);
            m.col(p)
                .iter()
                .map(move |(r, c)| (r * second_dim + q, c * v))
                .collect::<Vec<_>>()
        }),
    )
}

/// (I⊗m)x for x ∈ V⊗W (row-major) without materializing the Kronecker matrix.
pub fn apply_second(m: &Matrix, x: &SparseVec, first_dim: usize) -> SparseVec {
    assert_eq!(x.dim(), first_dim * m.cols());
    let w = m.cols();
    SparseVec::from_entries(
        first_dim * m.rows(),
        x.iter().flat_map(|(idx, v)| {
            let (p, q) = (idx / w, idx % w);
            m.col(q)
                .iter()
                .map(move |(r, c)| (p * m.rows() + r, c * v))
                .collect::<Vec<_>>()
        }),
    )
}

/// A linear functional on an algebra, as a coordinate row vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Functional {
    coeffs: SparseVec,
}

impl Functional {
    pub fn new(coeffs: SparseVec) -> Self {
        Functional { coeffs }
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        Functional {
            coeffs: SparseVec::from_dense(values),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn coeffs(&self) -> &SparseVec {
        &self.coeffs
    }

    pub fn eval(&self, v: &SparseVec) -> Scalar {
        self.coeffs.dot(v)
    }
}

/// (ι⊗ω)(x) for x ∈ V⊗W (row-major), ω a functional on W.
pub fn slice_second(x: &SparseVec, omega: &Functional) -> SparseVec {
    let w = omega.dim();
    assert_eq!(x.dim() % w, 0);
    let v = x.dim() / w;
    SparseVec::from_entries(
        v,
        x.iter()
            .map(|(idx, c)| (idx / w, c * &omega.coeffs().get(idx % w))),
    )
}

/// (ω⊗ι)(x) for x ∈ V⊗W (row-major), ω a functional on V.
pub fn slice_first(x: &SparseVec, omega: &Functional, w_dim: usize) -> SparseVec {
    assert_eq!(x.dim() % w_dim, 0);
    SparseVec::from_entries(
        w_dim,
        x.iter()
            .map(|(idx, c)| (idx % w_dim, c * &omega.coeffs().get(idx / w_dim))),
    )
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    /// Group algebra of C₂ with basis {1, g}.
    pub(crate) fn c2_group_algebra() -> FinAlgebra {
        FinAlgebra::from_structure_constants(
            vec!["1".into(), "g".into()],
            vec![
                (0, 0, 0, s(1)),
                (0, 1, 1, s(1)),
                (1, 0, 1, s(1)),
                (1, 1, 0, s(1)),
            ],
            None,
        )
    }

    /// 2×2 matrix units e11, e12, e21, e22 (pair-groupoid algebra on 2 objects).
    pub(crate) fn matrix_units_2() -> FinAlgebra {
        let names = vec!["e11".into(), "e12".into(), "e21".into(), "e22".into()];
        let idx = |i: usize, j: usize| 2 * i + j;
        let mut constants = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        if j == k {
                            constants.push((idx(i, j), idx(k, l), idx(i, l), s(1)));
                        }
                    }
                }
            }
        }
        FinAlgebra::from_structure_constants(names, constants, None)
    }

    #[test]
    fn c2_is_a_unital_associative_algebra() {
        let a = c2_group_algebra();
        assert!(check_associativity(&a));
        assert!(check_nondegenerate(&a));
        assert!(check_idempotent_algebra(&a));
        assert_eq!(a.unit().unwrap(), &SparseVec::unit(2, 0));
    }

    #[test]
    fn perturbed_constant_breaks_associativity() {
        // e₀e₀ = e₁, e₀e₁ = e₀: (e₀e₀)e₀ = e₁e₀ = 0 but e₀(e₀e₀) = e₀e₁ = e₀
        let a = FinAlgebra::from_structure_constants(
            vec!["p".into(), "q".into()],
            vec![(0, 0, 1, s(1)), (0, 1, 0, s(1))],
            None,
        );
        assert!(!check_associativity(&a));
        assert_eq!(a.associativity_witness(), Some((0, 0, 0)));
    }

    #[test]
    fn matrix_units_are_associative_and_nondegenerate() {
        let a = matrix_units_2();
        assert!(check_associativity(&a));
        assert!(check_nondegenerate(&a));
        // unit is e11 + e22
        let u = a.unit().unwrap();
        assert_eq!(u, &SparseVec::from_dense(&[s(1), s(0), s(0), s(1)]));
    }

    #[test]
    fn truncated_matrix_units_are_degenerate() {
        // span{e11, e12}: e12·x = 0 for every x in the span
        let a = FinAlgebra::from_structure_constants(
            vec!["e11".into(), "e12".into()],
            vec![(0, 0, 0, s(1)), (0, 1, 1, s(1))],
            None,
        );
        assert!(check_associativity(&a));
        assert!(!check_nondegenerate(&a));
        assert!(multiplier_algebra(&a).is_err());
    }

    #[test]
    fn nilpotent_line_is_degenerate_and_not_idempotent() {
        let a = FinAlgebra::from_structure_constants(vec!["x".into()], Vec::new(), None);
        assert!(!check_nondegenerate(&a));
        assert!(!check_idempotent_algebra(&a));
    }

    #[test]
    fn solve_for_unit_in_pair_groupoid_algebra() {
        // the spec's solve_linear example: recover the unit coordinates from
        // the (two-sided) multiplication equations
        let a = matrix_units_2();
        let u = a.unit().unwrap().clone();
        for j in 0..4 {
            let ej = SparseVec::unit(4, j);
            assert_eq!(a.multiply(&u, &ej), ej);
            assert_eq!(a.multiply(&ej, &u), ej);
        }
    }

    #[test]
    fn embed_is_a_homomorphism() {
        let a = matrix_units_2();
        for i in 0..4 {
            for j in 0..4 {
                let ei = SparseVec::unit(4, i);
                let ej = SparseVec::unit(4, j);
                let lhs = embed(&a, &ei).mul(&embed(&a, &ej));
                let rhs = embed(&a, &a.multiply(&ei, &ej));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn embed_of_group_element_is_permutation_action() {
        let a = c2_group_algebra();
        let g = SparseVec::unit(2, 1);
        let m = embed(&a, &g);
        // left multiplication by g swaps 1 ↔ g
        assert_eq!(m.lambda().apply(&SparseVec::unit(2, 0)), g);
        assert_eq!(m.lambda().apply(&g), SparseVec::unit(2, 0));
        assert!(m.is_valid(&a));
    }

    #[test]
    fn embed_zero_and_unit() {
        let a = matrix_units_2();
        assert!(embed(&a, &SparseVec::zero(4)).is_zero());
        assert_eq!(embed(&a, a.unit().unwrap()), Multiplier::one(4));
    }

    #[test]
    fn element_extraction_roundtrip() {
        let a = matrix_units_2();
        let v = SparseVec::from_dense(&[s(1), s(-2), s(3), s(0)]);
        assert_eq!(element_of(&a, &embed(&a, &v)).unwrap(), v);
    }

    #[test]
    fn multiplier_algebra_of_unital_algebra_is_the_algebra() {
        let a = matrix_units_2();
        let (basis, malg) = multiplier_algebra(&a).unwrap();
        assert_eq!(basis.len(), 4);
        assert_eq!(malg.dim(), 4);
        // every embedded element lies in the span
        for i in 0..4 {
            let m = embed(&a, &SparseVec::unit(4, i));
            assert!(multiplier_coordinates(&basis, &m).is_some());
        }
    }

    #[test]
    fn multiplier_algebra_of_c1_sum() {
        // ℂ ⊕ ℂ: two orthogonal idempotents
        let a = FinAlgebra::from_structure_constants(
            vec!["p".into(), "q".into()],
            vec![(0, 0, 0, s(1)), (1, 1, 1, s(1))],
            None,
        );
        let (basis, _) = multiplier_algebra(&a).unwrap();
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn multiplier_algebra_of_c2() {
        let a = c2_group_algebra();
        let (basis, _) = multiplier_algebra(&a).unwrap();
        assert_eq!(basis.len(), 2);
        // the identity multiplier is the embedding of the group unit
        assert!(multiplier_coordinates(&basis, &Multiplier::one(2)).is_some());
    }

    #[test]
    fn tensor_square_of_c2_is_c2_times_c2() {
        let a = c2_group_algebra();
        let t = tensor_square(&a);
        assert_eq!(t.dim(), 4);
        // compare structure constants against the direct C₂×C₂ construction:
        // (i,j)·(k,l) = (i+k mod 2, j+l mod 2)
        for i in 0..4 {
            for j in 0..4 {
                let expected =
                    SparseVec::unit(4, (((i >> 1) + (j >> 1)) % 2) * 2 + ((i & 1) + (j & 1)) % 2);
                assert_eq!(t.product_basis(i, j), expected);
            }
        }
        assert!(t.is_unital());
    }

    #[test]
    fn dim_one_idempotent_tensor_square_is_itself() {
        let a = FinAlgebra::from_structure_constants(vec!["p".into()], vec![(0, 0, 0, s(1))], None);
        let t = tensor_square(&a);
        assert_eq!(t.dim(), 1);
        assert_eq!(t.product_basis(0, 0), SparseVec::unit(1, 0));
    }

    #[test]
    fn leg13_of_identity_and_elementary_tensor() {
        let a = c2_group_algebra();
        let t2 = tensor_square(&a);
        let n = a.dim();
        assert_eq!(
            leg13(&a, &Multiplier::one(n * n)),
            Multiplier::one(n * n * n)
        );
        // x⊗y on legs 1,3 acts as x⊗1⊗y
        let x = SparseVec::unit(2, 1);
        let y = SparseVec::from_dense(&[s(1), s(1)]);
        let m = embed(&t2, &x.kron(&y));
        let placed = leg13(&a, &m);
        let u = SparseVec::from_dense(&[s(1), s(0)]);
        let probe = x.kron(&u).kron(&y);
        let expected = a.multiply(&x, &x).kron(&u).kron(&a.multiply(&y, &y));
        assert_eq!(placed.act_left(&x.kron(&u).kron(&y)), expected);
        let _ = probe;
    }

    #[test]
    fn leg13_is_multiplicative() {
        let a = c2_group_algebra();
        let t2 = tensor_square(&a);
        let m1 = embed(&t2, &SparseVec::from_dense(&[s(1), s(2), s(0), s(1)]));
        let m2 = embed(&t2, &SparseVec::from_dense(&[s(0), s(1), s(1), s(-1)]));
        assert_eq!(leg13(&a, &m1).mul(&leg13(&a, &m2)), leg13(&a, &m1.mul(&m2)));
    }

    #[test]
    fn leg13_of_pair_groupoid_idempotent() {
        // E = e11⊗e11 + e22⊗e22 placed on legs 1,3
        let a = matrix_units_2();
        let t2 = tensor_square(&a);
        let e11 = SparseVec::unit(4, 0);
        let e22 = SparseVec::unit(4, 3);
        let e = e11.kron(&e11).add(&e22.kron(&e22));
        let placed = leg13(&a, &embed(&t2, &e));
        // acting on e11⊗e12⊗e11 keeps it; on e11⊗e12⊗e22 kills it
        let keep = e11.kron(&SparseVec::unit(4, 1)).kron(&e11);
        let kill = e11.kron(&SparseVec::unit(4, 1)).kron(&e22);
        assert_eq!(placed.act_left(&keep), keep);
        assert!(placed.act_left(&kill).is_zero());
    }

    #[test]
    fn functional_slices() {
        // x = e0⊗e1 + 2·e1⊗e0 in C²⊗C²
        let x = SparseVec::from_entries(4, vec![(1, s(1)), (2, s(2))]);
        let omega = Functional::from_dense(&[s(3), s(5)]);
        assert_eq!(slice_second(&x, &omega).to_dense(), vec![s(5), s(6)]);
        assert_eq!(slice_first(&x, &omega, 2).to_dense(), vec![s(10), s(3)]);
    }

    #[test]
    fn involution_laws_on_matrix_units() {
        // gᵢⱼ* = gⱼᵢ
        let m = Matrix::from_permutation(&[0, 2, 1, 3]);
        let a = matrix_units_2().with_involution(Some(m));
        assert!(a.involution_witness().is_none());
    }

    #[test]
    fn bad_involution_detected() {
        // the identity map on 2×2 matrix units is not an anti-automorphism:
        // (e12·e21)* = e11 but e21*·e12* = e21·e12 = e22
        let a = matrix_units_2().with_involution(Some(Matrix::identity(4)));
        assert!(a.involution_witness().is_some());
    }
}
