//! Invariant functionals: solving the left/right invariance conditions,
//! the faithful-set criterion, and the exact verification of the invariance
//! and smeared-range identities that connect integrals with the
//! F-multipliers and the canonical maps.

use crate::algebra_core::{
    apply_first, apply_second, slice_first, slice_second, FinAlgebra, Functional,
};
use crate::coproduct::Coproduct;
use crate::error::{Error, Result};
use crate::exact_linalg::{kernel_basis, rank, Matrix, SparseVec, Subspace};
use crate::separability::SeparabilityStructure;

/// Solution spaces of the invariance conditions, with the faithfulness
/// verdicts for both sides. Functionals are stored by their coefficient
/// vectors on the algebra basis.
#[derive(Clone, Debug)]
pub struct IntegralSpace {
    left: Subspace,
    right: Subspace,
    left_faithful: bool,
    right_faithful: bool,
}

/// Outcome of an identity-verification pass: the list of failed identities,
/// each described with the indices that witness the failure.
#[derive(Clone, Debug, Default)]
pub struct IdentityReport {
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn delta_elements(cop: &Coproduct) -> Result<&[SparseVec]> {
    cop.delta_elements().ok_or_else(|| {
        Error::Unsupported("integral solving requires coproduct values in A⊗A".into())
    })
}

/// Functionals whose annihilator-style conditions cut out the subspace:
/// rows wᵀ with w vanishing on the given subspace.
fn annihilator(sub: &Subspace) -> Vec<SparseVec> {
    let m = Matrix::from_cols(sub.ambient(), sub.basis().to_vec());
    let ker = kernel_basis(&m.transpose());
    ker.basis().to_vec()
}

/// All functionals φ with (ι⊗φ)Δ(a) in the target subalgebra for every a.
/// The target is the right leg C of the canonical idempotent, which carries
/// a unit, so its multiplier algebra is C itself.
pub fn solve_left_integrals(cop: &Coproduct, sep: &SeparabilityStructure) -> Result<Subspace> {
    let n = cop.algebra().dim();
    let elems = delta_elements(cop)?;
    let ann = annihilator(sep.c());
    let mut rows = Vec::new();
    for x in elems {
        // (ι⊗φ)(x) = M·φ with M[p][q] = x[p,q]; condition wᵀMφ = 0
        for w in &ann {
            let mut row = SparseVec::zero(n);
            for (idx, cv) in x.iter() {
                let wp = w.get(idx / n);
                if !wp.is_zero() {
                    row = row.add_scaled(&(cv * &wp), &SparseVec::unit(n, idx % n));
                }
            }
            if !row.is_zero() {
                rows.push(row);
            }
        }
    }
    let system = Matrix::from_cols(n, rows).transpose();
    Ok(kernel_basis(&system))
}

/// All functionals ψ with (ψ⊗ι)Δ(a) in the left leg B, symmetrically.
pub fn solve_right_integrals(cop: &Coproduct, sep: &SeparabilityStructure) -> Result<Subspace> {
    let n = cop.algebra().dim();
    let elems = delta_elements(cop)?;
    let ann = annihilator(sep.b());
    let mut rows = Vec::new();
    for x in elems {
        for w in &ann {
            let mut row = SparseVec::zero(n);
            for (idx, cv) in x.iter() {
                let wq = w.get(idx % n);
                if !wq.is_zero() {
                    row = row.add_scaled(&(cv * &wq), &SparseVec::unit(n, idx / n));
                }
            }
            if !row.is_zero() {
                rows.push(row);
            }
        }
    }
    let system = Matrix::from_cols(n, rows).transpose();
    Ok(kernel_basis(&system))
}

/// Faithful-set criterion: no nonzero a with φ(ab) = 0 for all b and all φ
/// in the space, and none with φ(ba) = 0. Two stacked rank checks.
pub fn check_faithful_set(space: &Subspace, alg: &FinAlgebra) -> bool {
    let n = alg.dim();
    if space.dim() == 0 {
        return n == 0;
    }
    let mut left_rows = Vec::new();
    let mut right_rows = Vec::new();
    for phi in space.basis() {
        for b in 0..n {
            let mut lrow = SparseVec::zero(n);
            let mut rrow = SparseVec::zero(n);
            for k in 0..n {
                let lv = phi.dot(&alg.product_basis(k, b));
                if !lv.is_zero() {
                    lrow = lrow.add_scaled(&lv, &SparseVec::unit(n, k));
                }
                let rv = phi.dot(&alg.product_basis(b, k));
                if !rv.is_zero() {
                    rrow = rrow.add_scaled(&rv, &SparseVec::unit(n, k));
                }
            }
            left_rows.push(lrow);
            right_rows.push(rrow);
        }
    }
    rank(&Matrix::from_cols(n, left_rows).transpose()) == n
        && rank(&Matrix::from_cols(n, right_rows).transpose()) == n
}

/// Produces a concrete obstruction to faithfulness: a nonzero element a with
/// φ(ab) = 0 for every b and every φ in the space, or with φ(ba) = 0
/// throughout. Returns `None` when the set is faithful.
pub fn faithful_set_witness(space: &Subspace, alg: &FinAlgebra) -> Option<SparseVec> {
    let n = alg.dim();
    if space.dim() == 0 {
        return if n == 0 {
            None
        } else {
            Some(SparseVec::unit(n, 0))
        };
    }
    for right_side in [false, true] {
        let mut rows = Vec::new();
        for phi in space.basis() {
            for b in 0..n {
                let mut row = SparseVec::zero(n);
                for k in 0..n {
                    let v = if right_side {
                        phi.dot(&alg.product_basis(b, k))
                    } else {
                        phi.dot(&alg.product_basis(k, b))
                    };
                    if !v.is_zero() {
                        row = row.add_scaled(&v, &SparseVec::unit(n, k));
                    }
                }
                rows.push(row);
            }
        }
        let kernel = kernel_basis(&Matrix::from_cols(n, rows).transpose());
        if let Some(a) = kernel.basis().first() {
            return Some(a.clone());
        }
    }
    None
}

impl IntegralSpace {
    /// Solves both invariance conditions and records faithfulness.
    pub fn solve(cop: &Coproduct, sep: &SeparabilityStructure) -> Result<IntegralSpace> {
        let left = solve_left_integrals(cop, sep)?;
        let right = solve_right_integrals(cop, sep)?;
        let left_faithful = check_faithful_set(&left, cop.algebra());
        let right_faithful = check_faithful_set(&right, cop.algebra());
        Ok(IntegralSpace {
            left,
            right,
            left_faithful,
            right_faithful,
        })
    }

    pub fn left(&self) -> &Subspace {
        &self.left
    }

    pub fn right(&self) -> &Subspace {
        &self.right
    }

    pub fn left_basis(&self) -> Vec<Functional> {
        self.left
            .basis()
            .iter()
            .map(|v| Functional::new(v.clone()))
            .collect()
    }

    pub fn right_basis(&self) -> Vec<Functional> {
        self.right
            .basis()
            .iter()
            .map(|v| Functional::new(v.clone()))
            .collect()
    }

    pub fn left_faithful(&self) -> bool {
        self.left_faithful
    }

    pub fn right_faithful(&self) -> bool {
        self.right_faithful
    }

    /// Composing a left integral with left multiplication by an element of
    /// the target leg stays left invariant.
    pub fn check_left_space_stable_under_c(
        &self,
        alg: &FinAlgebra,
        sep: &SeparabilityStructure,
    ) -> bool {
        let n = alg.dim();
        self.left.basis().iter().all(|phi| {
            sep.c().basis().iter().all(|y| {
                let composed = SparseVec::from_dense(
                    &(0..n)
                        .map(|k| phi.dot(&alg.multiply(y, &SparseVec::unit(n, k))))
                        .collect::<Vec<_>>(),
                );
                self.left.contains(&composed)
            })
        })
    }
}

/// The four integral identities through the F-multipliers, plus the
/// restricted modular behavior of integrals on the legs:
/// (ι⊗φ)Δ(a) = (ι⊗φ)(F₂(1⊗a)) = (ι⊗φ)((1⊗a)F₄),
/// (ψ⊗ι)Δ(a) = (ψ⊗ι)((a⊗1)F₁) = (ψ⊗ι)(F₃(a⊗1)),
/// φ(ya) = φ(a·σ_C(y)) for y in C, ψ(xa) = ψ(a·σ_B(x)) for x in B.
pub fn verify_invariance_identities(
    cop: &Coproduct,
    sep: &SeparabilityStructure,
    space: &IntegralSpace,
) -> Result<IdentityReport> {
    let alg = cop.algebra();
    let n = alg.dim();
    let elems = delta_elements(cop)?;
    let mut report = IdentityReport::default();
    for (pi, phi) in space.left_basis().iter().enumerate() {
        for a in 0..n {
            let ea = SparseVec::unit(n, a);
            let lhs = slice_second(&elems[a], phi);
            let via_f2 = slice_second(&apply_second(&alg.right_mult_matrix(&ea), sep.f2(), n), phi);
            if lhs != via_f2 {
                report.failures.push(format!(
                    "left invariance through F2 fails at (phi {pi}, a {a})"
                ));
            }
            let via_f4 = slice_second(&apply_second(&alg.left_mult_matrix(&ea), sep.f4(), n), phi);
            if lhs != via_f4 {
                report.failures.push(format!(
                    "left invariance through F4 fails at (phi {pi}, a {a})"
                ));
            }
        }
        for (yi, y) in sep.c().basis().iter().enumerate() {
            let sy = sep.apply_sigma_c(y)?;
            for a in 0..n {
                let ea = SparseVec::unit(n, a);
                let lhs = phi.eval(&alg.multiply(y, &ea));
                let rhs = phi.eval(&alg.multiply(&ea, &sy));
                if lhs != rhs {
                    report.failures.push(format!(
                        "restricted modular identity fails at (phi {pi}, y {yi}, a {a})"
                    ));
                }
            }
        }
    }
    for (pi, psi) in space.right_basis().iter().enumerate() {
        for a in 0..n {
            let ea = SparseVec::unit(n, a);
            let lhs = slice_first(&elems[a], psi, n);
            let via_f1 = slice_first(
                &apply_first(&alg.left_mult_matrix(&ea), sep.f1(), n),
                psi,
                n,
            );
            if lhs != via_f1 {
                report.failures.push(format!(
                    "right invariance through F1 fails at (psi {pi}, a {a})"
                ));
            }
            let via_f3 = slice_first(
                &apply_first(&alg.right_mult_matrix(&ea), sep.f3(), n),
                psi,
                n,
            );
            if lhs != via_f3 {
                report.failures.push(format!(
                    "right invariance through F3 fails at (psi {pi}, a {a})"
                ));
            }
        }
        for (xi, x) in sep.b().basis().iter().enumerate() {
            let sx = sep.apply_sigma_b(x)?;
            for a in 0..n {
                let ea = SparseVec::unit(n, a);
                let lhs = psi.eval(&alg.multiply(x, &ea));
                let rhs = psi.eval(&alg.multiply(&ea, &sx));
                if lhs != rhs {
                    report.failures.push(format!(
                        "restricted modular identity fails at (psi {pi}, x {xi}, a {a})"
                    ));
                }
            }
        }
    }
    Ok(report)
}

/// Left-multiplies a tensor-cube element by x ∈ A⊗A placed at the given
/// pair of legs (0-indexed).
fn cube_mul_left(
    alg: &FinAlgebra,
    x: &SparseVec,
    legs: (usize, usize),
    v: &SparseVec,
) -> SparseVec {
    cube_mul(alg, x, legs, v, true)
}

fn cube_mul_right(
    alg: &FinAlgebra,
    x: &SparseVec,
    legs: (usize, usize),
    v: &SparseVec,
) -> SparseVec {
    cube_mul(alg, x, legs, v, false)
}

fn cube_mul(
    alg: &FinAlgebra,
    x: &SparseVec,
    legs: (usize, usize),
    v: &SparseVec,
    from_left: bool,
) -> SparseVec {
    let n = alg.dim();
    let mut acc = SparseVec::zero(n * n * n);
    for (xi, xc) in x.iter() {
        let (p, q) = (xi / n, xi % n);
        for (vi, vc) in v.iter() {
            let comp = [vi / (n * n), (vi / n) % n, vi % n];
            let w = xc * vc;
            let (f, s) = legs;
            let factors = [p, q];
            let prod_a = if from_left {
                alg.product_basis(factors[0], comp[f])
            } else {
                alg.product_basis(comp[f], factors[0])
            };
            let prod_b = if from_left {
                alg.product_basis(factors[1], comp[s])
            } else {
                alg.product_basis(comp[s], factors[1])
            };
            for (ra, ca) in prod_a.iter() {
                for (rb, cb) in prod_b.iter() {
                    let mut out = comp;
                    out[f] = ra;
                    out[s] = rb;
                    acc = acc.add_scaled(
                        &(&(&w * ca) * cb),
                        &SparseVec::unit(n * n * n, out[0] * n * n + out[1] * n + out[2]),
                    );
                }
            }
        }
    }
    acc
}

fn contract_third(x: &SparseVec, phi: &Functional, n: usize) -> SparseVec {
    let mut acc = SparseVec::zero(n * n);
    for (idx, cv) in x.iter() {
        let w = phi.coeffs().get(idx % n);
        if !w.is_zero() {
            acc = acc.add_scaled(&(cv * &w), &SparseVec::unit(n * n, idx / n));
        }
    }
    acc
}

fn contract_first_of_three(x: &SparseVec, psi: &Functional, n: usize) -> SparseVec {
    let mut acc = SparseVec::zero(n * n);
    for (idx, cv) in x.iter() {
        let w = psi.coeffs().get(idx / (n * n));
        if !w.is_zero() {
            acc = acc.add_scaled(&(cv * &w), &SparseVec::unit(n * n, idx % (n * n)));
        }
    }
    acc
}

/// The four covered smeared-range identities tying the canonical maps to
/// one-sided products with E, verified on all basis triples (a, b, c) for
/// every integral in the solved bases.
pub fn verify_smeared_ranges(
    cop: &Coproduct,
    sep: &SeparabilityStructure,
    space: &IntegralSpace,
) -> Result<IdentityReport> {
    let alg = cop.algebra();
    let sq = cop.square();
    let n = alg.dim();
    let elems = delta_elements(cop)?;
    let u = alg
        .unit()
        .ok_or_else(|| Error::Unsupported("smeared-range check requires a unital algebra".into()))?
        .clone();
    let t = cop.canonical_maps()?;
    let e = sep.e();
    let mut report = IdentityReport::default();
    for (pi, phi) in space.left_basis().iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                let p1 = slice_second(t.t1.col(a * n + b), phi);
                let p3 = slice_second(t.t3.col(b * n + a), phi);
                for c in 0..n {
                    let ec = SparseVec::unit(n, c);
                    let v0 = u.kron(&ec).kron(&u);
                    // T₁((ι⊗ι⊗φ)(Δ₁₃(a)Δ₂₃(b)(1⊗c⊗1))) = E(p⊗c)
                    let z = cube_mul_left(
                        alg,
                        &elems[a],
                        (0, 2),
                        &cube_mul_left(alg, &elems[b], (1, 2), &v0),
                    );
                    let lhs = t.t1.apply(&contract_third(&z, phi, n));
                    let rhs = sq.multiply(e, &p1.kron(&ec));
                    if lhs != rhs {
                        report.failures.push(format!(
                            "smeared range for the first canonical map fails at (phi {pi}, {a}, {b}, {c})"
                        ));
                    }
                    // T₃((ι⊗ι⊗φ)((1⊗c⊗1)Δ₂₃(a)Δ₁₃(b))) = (p⊗c)E
                    let z = cube_mul_right(
                        alg,
                        &elems[b],
                        (0, 2),
                        &cube_mul_right(alg, &elems[a], (1, 2), &v0),
                    );
                    let lhs = t.t3.apply(&contract_third(&z, phi, n));
                    let rhs = sq.multiply(&p3.kron(&ec), e);
                    if lhs != rhs {
                        report.failures.push(format!(
                            "smeared range for the third canonical map fails at (phi {pi}, {a}, {b}, {c})"
                        ));
                    }
                }
            }
        }
    }
    for (pi, psi) in space.right_basis().iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                let q2 = slice_first(t.t2.col(a * n + b), psi, n);
                let q4 = slice_first(t.t4.col(b * n + a), psi, n);
                for c in 0..n {
                    let ec = SparseVec::unit(n, c);
                    let v0 = u.kron(&ec).kron(&u);
                    // T₂((ψ⊗ι⊗ι)((1⊗c⊗1)Δ₁₂(a)Δ₁₃(b))) = (c⊗q)E
                    let z = cube_mul_right(
                        alg,
                        &elems[b],
                        (0, 2),
                        &cube_mul_right(alg, &elems[a], (0, 1), &v0),
                    );
                    let lhs = t.t2.apply(&contract_first_of_three(&z, psi, n));
                    let rhs = sq.multiply(&ec.kron(&q2), e);
                    if lhs != rhs {
                        report.failures.push(format!(
                            "smeared range for the second canonical map fails at (psi {pi}, {a}, {b}, {c})"
                        ));
                    }
                    // T₄((ψ⊗ι⊗ι)(Δ₁₃(a)Δ₁₂(b)(1⊗c⊗1))) = E(1⊗q)(c⊗1)
                    let z = cube_mul_left(
                        alg,
                        &elems[a],
                        (0, 2),
                        &cube_mul_left(alg, &elems[b], (0, 1), &v0),
                    );
                    let lhs = t.t4.apply(&contract_first_of_three(&z, psi, n));
                    let rhs = apply_first(
                        &alg.right_mult_matrix(&ec),
                        &apply_second(&alg.right_mult_matrix(&q4), e, n),
                        n,
                    );
                    if lhs != rhs {
                        report.failures.push(format!(
                            "smeared range for the fourth canonical map fails at (psi {pi}, {a}, {b}, {c})"
                        ));
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra_core::tests::{c2_group_algebra, matrix_units_2};
    use crate::algebra_core::{embed, tensor_square};
    use crate::exact_linalg::Scalar;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn grouplike(a: &FinAlgebra) -> Coproduct {
        let sq = tensor_square(a);
        let delta = (0..a.dim())
            .map(|i| {
                let e = SparseVec::unit(a.dim(), i);
                embed(&sq, &e.kron(&e))
            })
            .collect();
        Coproduct::new(a.clone(), delta).unwrap()
    }

    fn structure(cop: &Coproduct) -> SeparabilityStructure {
        let e = cop.find_canonical_idempotent().unwrap();
        SeparabilityStructure::from_idempotent(cop, &e).unwrap()
    }

    /// Function algebra of the two-element group: basis δ_e, δ_g with
    /// pointwise product and convolution-dual coproduct.
    pub(crate) fn dual_c2() -> Coproduct {
        let a = FinAlgebra::from_structure_constants(
            vec!["d_e".into(), "d_g".into()],
            vec![(0, 0, 0, s(1)), (1, 1, 1, s(1))],
            None,
        );
        let sq = tensor_square(&a);
        let de = SparseVec::unit(2, 0);
        let dg = SparseVec::unit(2, 1);
        let delta = vec![
            embed(&sq, &de.kron(&de).add(&dg.kron(&dg))),
            embed(&sq, &de.kron(&dg).add(&dg.kron(&de))),
        ];
        Coproduct::new(a, delta).unwrap()
    }

    #[test]
    fn group_algebra_has_haar_integral() {
        let cop = grouplike(&c2_group_algebra());
        let sep = structure(&cop);
        let space = IntegralSpace::solve(&cop, &sep).unwrap();
        assert_eq!(space.left().dim(), 1);
        assert_eq!(space.right().dim(), 1);
        // Haar: φ(1) free, φ(g) = 0
        assert!(space.left().contains(&SparseVec::unit(2, 0)));
        assert!(space.left_faithful() && space.right_faithful());
    }

    #[test]
    fn pair_groupoid_integrals_are_supported_on_units() {
        let cop = grouplike(&matrix_units_2());
        let sep = structure(&cop);
        let space = IntegralSpace::solve(&cop, &sep).unwrap();
        assert_eq!(space.left().dim(), 2);
        assert!(space.left().contains(&SparseVec::unit(4, 0)));
        assert!(space.left().contains(&SparseVec::unit(4, 3)));
        assert!(space.left_faithful() && space.right_faithful());
        assert!(space.check_left_space_stable_under_c(cop.algebra(), &sep));
    }

    #[test]
    fn single_unit_functional_is_not_faithful() {
        let a = matrix_units_2();
        let only_first = Subspace::span(4, [SparseVec::unit(4, 0)]);
        assert!(!check_faithful_set(&only_first, &a));
        let both = Subspace::span(4, [SparseVec::unit(4, 0), SparseVec::unit(4, 3)]);
        assert!(check_faithful_set(&both, &a));
    }

    #[test]
    fn dual_group_has_counting_integral() {
        let cop = dual_c2();
        let sep = structure(&cop);
        let space = IntegralSpace::solve(&cop, &sep).unwrap();
        // counting functional f ↦ f(e) + f(g)
        assert_eq!(space.left().dim(), 1);
        assert!(space.left().contains(&SparseVec::from_dense(&[s(1), s(1)])));
        assert!(space.left_faithful());
    }

    #[test]
    fn invariance_identities_hold_on_fixtures() {
        for cop in [
            grouplike(&c2_group_algebra()),
            grouplike(&matrix_units_2()),
            dual_c2(),
        ] {
            let sep = structure(&cop);
            let space = IntegralSpace::solve(&cop, &sep).unwrap();
            let report = verify_invariance_identities(&cop, &sep, &space).unwrap();
            assert!(report.passed(), "{:?}", report.failures);
        }
    }

    #[test]
    fn mutated_f_multiplier_is_reported() {
        let cop = grouplike(&matrix_units_2());
        let sep = structure(&cop).with_f2_for_tests(SparseVec::unit(16, 1));
        let space = IntegralSpace::solve(&cop, &sep).unwrap();
        let report = verify_invariance_identities(&cop, &sep, &space).unwrap();
        assert!(!report.passed());
        assert!(report.failures.iter().any(|f| f.contains("through F2")));
    }

    #[test]
    fn smeared_ranges_hold_on_fixtures() {
        for cop in [
            grouplike(&c2_group_algebra()),
            grouplike(&matrix_units_2()),
            dual_c2(),
        ] {
            let sep = structure(&cop);
            let space = IntegralSpace::solve(&cop, &sep).unwrap();
            let report = verify_smeared_ranges(&cop, &sep, &space).unwrap();
            assert!(report.passed(), "{:?}", report.failures);
        }
    }

    #[test]
    fn smeared_range_worked_example_on_pair_groupoid() {
        // a = g12, b = g21, φ = δ_{g11}: p = (ι⊗φ)(Δ(g12)(1⊗g21)) = g12.
        let cop = grouplike(&matrix_units_2());
        let sep = structure(&cop);
        let t = cop.canonical_maps().unwrap();
        let phi = Functional::new(SparseVec::unit(4, 0));
        // indices: g11=0, g12=1, g21=2, g22=3
        let p = slice_second(t.t1.col(4 + 2), &phi);
        assert_eq!(p, SparseVec::unit(4, 1));
        // c = g11: E(g12⊗g11) = (g11⊗g11 + g22⊗g22)(g12⊗g11) = g12⊗g11
        let rhs = cop
            .square()
            .multiply(sep.e(), &p.kron(&SparseVec::unit(4, 0)));
        assert_eq!(rhs, SparseVec::unit(4, 1).kron(&SparseVec::unit(4, 0)));
        // c = g22 kills the second leg: E(g12⊗g22) = 0
        let dead = cop
            .square()
            .multiply(sep.e(), &p.kron(&SparseVec::unit(4, 3)));
        assert!(dead.is_zero());
    }

    #[test]
    fn hopf_case_integral_space_is_one_dimensional() {
        let cop = grouplike(&c2_group_algebra());
        let sep = structure(&cop);
        let e = cop.find_canonical_idempotent().unwrap();
        assert!(e.is_identity());
        let space = IntegralSpace::solve(&cop, &sep).unwrap();
        assert!(space.left().dim() <= 1 && space.right().dim() <= 1);
    }
}
