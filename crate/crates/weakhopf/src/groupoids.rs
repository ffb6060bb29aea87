//! Generators for the canonical model class: finite groupoid algebras with
//! the group-like coproduct, their function-algebra duals with the
//! convolution coproduct, and a deterministic random-groupoid source.
//! Every generator ships the closed-form expected counit and antipode so
//! test oracles never recompute answers inside the code under test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra_core::{embed, tensor_square, FinAlgebra, Functional};
use crate::coproduct::Coproduct;
use crate::error::Result;
use crate::exact_linalg::{Matrix, Scalar, SparseVec};

/// One of the small groups used as isotropy: cyclic C₁–C₄ or the Klein
/// four-group V₄.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmallGroup {
    C1,
    C2,
    C3,
    C4,
    V4,
}

impl SmallGroup {
    pub fn order(self) -> usize {
        match self {
            SmallGroup::C1 => 1,
            SmallGroup::C2 => 2,
            SmallGroup::C3 => 3,
            SmallGroup::C4 => 4,
            SmallGroup::V4 => 4,
        }
    }

    pub fn multiply(self, a: usize, b: usize) -> usize {
        match self {
            SmallGroup::V4 => a ^ b,
            _ => (a + b) % self.order(),
        }
    }

    pub fn inverse(self, a: usize) -> usize {
        match self {
            SmallGroup::V4 => a,
            _ => (self.order() - a) % self.order(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SmallGroup::C1 => "C1",
            SmallGroup::C2 => "C2",
            SmallGroup::C3 => "C3",
            SmallGroup::C4 => "C4",
            SmallGroup::V4 => "V4",
        }
    }
}

/// An arrow with its endpoints; arrows compose function-style, g∘h defined
/// when the target of h is the source of g.
#[derive(Clone, Debug)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
    pub label: String,
}

/// A finite groupoid given by its full arrow set, composition table,
/// inversion and the unit arrow at each object.
#[derive(Clone, Debug)]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    /// compose[g][h] = Some(g∘h) when target(h) == source(g)
    compose: Vec<Vec<Option<usize>>>,
    inverse: Vec<usize>,
    /// unit arrow index per object
    units: Vec<usize>,
}

impl FiniteGroupoid {
    /// A transitive groupoid: the pair groupoid on the given objects with
    /// the given isotropy group at each object. Arrows are triples
    /// (target object, source object, group element).
    pub fn transitive(num_objects: usize, group: SmallGroup) -> FiniteGroupoid {
        assert!(num_objects >= 1);
        let k = group.order();
        let objects: Vec<String> = (0..num_objects).map(|i| format!("o{}", i + 1)).collect();
        let mut arrows = Vec::new();
        let idx = |i: usize, j: usize, g: usize| (i * num_objects + j) * k + g;
        for i in 0..num_objects {
            for j in 0..num_objects {
                for g in 0..k {
                    let label = if k == 1 {
                        format!("g{}{}", i + 1, j + 1)
                    } else {
                        format!("g{}{}_{}", i + 1, j + 1, g)
                    };
                    arrows.push(Arrow {
                        source: j,
                        target: i,
                        label,
                    });
                }
            }
        }
        let n = arrows.len();
        let mut compose = vec![vec![None; n]; n];
        for i in 0..num_objects {
            for j in 0..num_objects {
                for g in 0..k {
                    for l in 0..num_objects {
                        for h in 0..k {
                            compose[idx(i, j, g)][idx(j, l, h)] =
                                Some(idx(i, l, group.multiply(g, h)));
                        }
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|a| {
                let (ij, g) = (a / k, a % k);
                let (i, j) = (ij / num_objects, ij % num_objects);
                idx(j, i, group.inverse(g))
            })
            .collect();
        let units = (0..num_objects).map(|i| idx(i, i, 0)).collect();
        FiniteGroupoid {
            objects,
            arrows,
            compose,
            inverse,
            units,
        }
    }

    /// Disjoint union, relabeling objects and arrows to stay unique.
    pub fn disjoint_union(parts: &[FiniteGroupoid]) -> FiniteGroupoid {
        let mut objects = Vec::new();
        let mut arrows = Vec::new();
        let mut offsets = Vec::new();
        let mut obj_offsets = Vec::new();
        for (pi, p) in parts.iter().enumerate() {
            obj_offsets.push(objects.len());
            offsets.push(arrows.len());
            for o in &p.objects {
                objects.push(format!("c{}_{}", pi + 1, o));
            }
            for a in &p.arrows {
                arrows.push(Arrow {
                    source: a.source + obj_offsets[pi],
                    target: a.target + obj_offsets[pi],
                    label: format!("c{}_{}", pi + 1, a.label),
                });
            }
        }
        let n = arrows.len();
        let mut compose = vec![vec![None; n]; n];
        let mut inverse = vec![0; n];
        let mut units = Vec::new();
        for (pi, p) in parts.iter().enumerate() {
            let off = offsets[pi];
            for g in 0..p.arrows.len() {
                inverse[off + g] = off + p.inverse[g];
                for h in 0..p.arrows.len() {
                    compose[off + g][off + h] = p.compose[g][h].map(|r| off + r);
                }
            }
            units.extend(p.units.iter().map(|u| off + u));
        }
        FiniteGroupoid {
            objects,
            arrows,
            compose,
            inverse,
            units,
        }
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn inverse_of(&self, arrow: usize) -> usize {
        self.inverse[arrow]
    }

    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        self.compose[g][h]
    }

    /// Structural sanity: unit laws, associativity of the partial
    /// composition, and inversion to the units.
    pub fn check(&self) -> bool {
        let n = self.arrows.len();
        for g in 0..n {
            let a = &self.arrows[g];
            if self.compose[g][self.units[a.source]] != Some(g)
                || self.compose[self.units[a.target]][g] != Some(g)
            {
                return false;
            }
            let inv = self.inverse[g];
            if self.compose[g][inv] != Some(self.units[a.target])
                || self.compose[inv][g] != Some(self.units[a.source])
            {
                return false;
            }
            for h in 0..n {
                if self.compose[g][h].is_some() != (self.arrows[h].target == a.source) {
                    return false;
                }
                for l in 0..n {
                    let left = self.compose[g][h].and_then(|gh| self.compose[gh][l]);
                    let right = self.compose[h][l].and_then(|hl| self.compose[g][hl]);
                    if left != right {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A generated presentation bundled with its closed-form expected answers.
pub struct GeneratedModel {
    pub algebra: FinAlgebra,
    pub coproduct: Coproduct,
    pub expected_counit: Functional,
    pub expected_antipode: Matrix,
}

/// The groupoid algebra: basis = arrows, product = composition-or-zero,
/// group-like coproduct Δ(g) = g⊗g, involution g* = g⁻¹. Expected counit is
/// constantly 1 on arrows; the expected antipode is arrow inversion.
pub fn groupoid_algebra(g: &FiniteGroupoid) -> Result<GeneratedModel> {
    let n = g.arrows().len();
    let names = g.arrows().iter().map(|a| a.label.clone()).collect();
    let mut constants = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if let Some(k) = g.compose(i, j) {
                constants.push((i, j, k, Scalar::one()));
            }
        }
    }
    let inv_perm: Vec<usize> = (0..n).map(|a| g.inverse_of(a)).collect();
    let algebra = FinAlgebra::from_structure_constants(
        names,
        constants,
        Some(Matrix::from_permutation(&inv_perm)),
    );
    let sq = tensor_square(&algebra);
    let delta = (0..n)
        .map(|i| {
            let e = SparseVec::unit(n, i);
            embed(&sq, &e.kron(&e))
        })
        .collect();
    let coproduct = Coproduct::new(algebra.clone(), delta)?;
    let expected_counit = Functional::new(SparseVec::from_dense(&vec![Scalar::one(); n]));
    let expected_antipode = Matrix::from_permutation(&inv_perm);
    Ok(GeneratedModel {
        algebra,
        coproduct,
        expected_counit,
        expected_antipode,
    })
}

/// The function algebra on the arrow set: basis = point masses δ_g with
/// pointwise product, convolution coproduct Δ(δ_g) = Σ_{h∘k=g} δ_h⊗δ_k,
/// involution = complex conjugation. Expected counit sums the values at the
/// units; the expected antipode precomposes with inversion.
pub fn function_algebra(g: &FiniteGroupoid) -> Result<GeneratedModel> {
    let n = g.arrows().len();
    let names = g
        .arrows()
        .iter()
        .map(|a| format!("d_{}", a.label))
        .collect();
    let constants = (0..n).map(|i| (i, i, i, Scalar::one()));
    let algebra = FinAlgebra::from_structure_constants(names, constants, Some(Matrix::identity(n)));
    let sq = tensor_square(&algebra);
    let mut delta_elems: Vec<SparseVec> = vec![SparseVec::zero(n * n); n];
    for h in 0..n {
        for k in 0..n {
            if let Some(hk) = g.compose(h, k) {
                delta_elems[hk] = delta_elems[hk].add(&SparseVec::unit(n * n, h * n + k));
            }
        }
    }
    let delta = delta_elems.iter().map(|x| embed(&sq, x)).collect();
    let coproduct = Coproduct::new(algebra.clone(), delta)?;
    let mut counit = SparseVec::zero(n);
    for &u in g.units() {
        counit = counit.add(&SparseVec::unit(n, u));
    }
    // S(δ_g) = δ_{g⁻¹}: the same permutation matrix as inversion
    let inv_perm: Vec<usize> = (0..n).map(|a| g.inverse_of(a)).collect();
    Ok(GeneratedModel {
        algebra,
        coproduct,
        expected_counit: Functional::new(counit),
        expected_antipode: Matrix::from_permutation(&inv_perm),
    })
}

/// Deterministic-from-seed groupoid: a disjoint union of transitive
/// components, each a pair groupoid on a random number of objects with a
/// random isotropy group from the pool.
pub fn random_groupoid(seed: u64, max_objects: usize, pool: &[SmallGroup]) -> FiniteGroupoid {
    assert!((1..=4).contains(&max_objects));
    assert!(!pool.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = rng.gen_range(1..=max_objects);
    let mut parts = Vec::new();
    while remaining > 0 {
        let size = rng.gen_range(1..=remaining);
        let group = pool[rng.gen_range(0..pool.len())];
        parts.push(FiniteGroupoid::transitive(size, group));
        remaining -= size;
    }
    FiniteGroupoid::disjoint_union(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::IntegralSpace;
    use crate::larson_sweedler::full_pipeline;
    use crate::separability::SeparabilityStructure;

    #[test]
    fn transitive_groupoids_are_valid() {
        for objs in 1..=3 {
            for group in [
                SmallGroup::C1,
                SmallGroup::C2,
                SmallGroup::C3,
                SmallGroup::C4,
                SmallGroup::V4,
            ] {
                let g = FiniteGroupoid::transitive(objs, group);
                assert!(g.check(), "{objs} objects, {}", group.name());
                assert_eq!(g.arrows().len(), objs * objs * group.order());
            }
        }
    }

    #[test]
    fn one_object_c2_is_the_group_algebra() {
        let g = FiniteGroupoid::transitive(1, SmallGroup::C2);
        let model = groupoid_algebra(&g).unwrap();
        assert_eq!(model.algebra.dim(), 2);
        let e = model.coproduct.find_canonical_idempotent().unwrap();
        assert!(e.is_identity());
    }

    #[test]
    fn pair_groupoid_matches_matrix_units() {
        let g = FiniteGroupoid::transitive(2, SmallGroup::C1);
        let model = groupoid_algebra(&g).unwrap();
        assert_eq!(model.algebra.dim(), 4);
        // g11·g12 = g12, g12·g21 = g11, g12·g12 = 0
        let p = model.algebra.product_basis(0, 1);
        assert_eq!(p, SparseVec::unit(4, 1));
        assert!(model.algebra.product_basis(1, 1).is_zero());
    }

    #[test]
    fn two_objects_with_isotropy_has_eight_arrows() {
        let g = FiniteGroupoid::transitive(2, SmallGroup::C2);
        assert!(g.check());
        assert_eq!(g.arrows().len(), 8);
        let model = groupoid_algebra(&g).unwrap();
        let result = full_pipeline(&model.algebra, &model.coproduct).unwrap();
        assert_eq!(result.epsilon, model.expected_counit);
        assert_eq!(result.s, model.expected_antipode);
    }

    #[test]
    fn function_algebra_of_c2_is_the_dual() {
        let g = FiniteGroupoid::transitive(1, SmallGroup::C2);
        let model = function_algebra(&g).unwrap();
        let result = full_pipeline(&model.algebra, &model.coproduct).unwrap();
        assert!(result.hopf_special_case);
        assert_eq!(result.epsilon, model.expected_counit);
        assert_eq!(result.s, model.expected_antipode);
    }

    #[test]
    fn function_algebra_of_pair_groupoid_runs_the_pipeline() {
        let g = FiniteGroupoid::transitive(2, SmallGroup::C1);
        let model = function_algebra(&g).unwrap();
        let result = full_pipeline(&model.algebra, &model.coproduct).unwrap();
        assert_eq!(result.epsilon, model.expected_counit);
        assert_eq!(result.s, model.expected_antipode);
    }

    #[test]
    fn left_integral_dimension_equals_object_count() {
        for objs in 1..=3 {
            let g = FiniteGroupoid::transitive(objs, SmallGroup::C2);
            let model = groupoid_algebra(&g).unwrap();
            let e = model.coproduct.find_canonical_idempotent().unwrap();
            let sep = SeparabilityStructure::from_idempotent(&model.coproduct, &e).unwrap();
            let space = IntegralSpace::solve(&model.coproduct, &sep).unwrap();
            assert_eq!(space.left().dim(), objs);
        }
    }

    #[test]
    fn groupoid_and_function_algebra_have_equal_dimension() {
        let g = FiniteGroupoid::transitive(3, SmallGroup::C3);
        let a = groupoid_algebra(&g).unwrap();
        let b = function_algebra(&g).unwrap();
        assert_eq!(a.algebra.dim(), b.algebra.dim());
    }

    #[test]
    fn random_groupoid_is_deterministic() {
        let a = random_groupoid(7, 4, &[SmallGroup::C2, SmallGroup::C3]);
        let b = random_groupoid(7, 4, &[SmallGroup::C2, SmallGroup::C3]);
        assert!(a.check());
        assert_eq!(a.arrows().len(), b.arrows().len());
        for (x, y) in a.arrows().iter().zip(b.arrows()) {
            assert_eq!(x.label, y.label);
        }
        let trivial = random_groupoid(0, 1, &[SmallGroup::C1]);
        assert_eq!(trivial.arrows().len(), 1);
    }

    #[test]
    fn disjoint_union_passes_the_pipeline() {
        let g = FiniteGroupoid::disjoint_union(&[
            FiniteGroupoid::transitive(1, SmallGroup::C2),
            FiniteGroupoid::transitive(2, SmallGroup::C1),
        ]);
        assert!(g.check());
        let model = groupoid_algebra(&g).unwrap();
        let result = full_pipeline(&model.algebra, &model.coproduct).unwrap();
        assert_eq!(result.epsilon, model.expected_counit);
        assert_eq!(result.s, model.expected_antipode);
    }
}
