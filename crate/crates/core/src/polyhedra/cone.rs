use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::rational::{self, Rat};
use crate::exactlin::{
    dot, hermite_normal_form, integer_kernel, primitive_integer_multiple, rat_dot_int, IntMatrix,
    LatticeVector, RationalVector,
};

/// A cone cut out by `<a, x> >= 0` for each inequality and `<e, x> = 0` for each equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HRepCone {
    pub dim: usize,
    pub inequalities: Vec<LatticeVector>,
    pub equalities: Vec<LatticeVector>,
}

impl HRepCone {
    pub fn contains(&self, x: &RationalVector) -> Result<bool> {
        membership(self, x)
    }

    /// Membership for an integral point; cones are homogeneous so this covers
    /// rational points after clearing denominators.
    pub fn contains_lattice(&self, x: &[BigInt]) -> bool {
        self.inequalities.iter().all(|a| !dot(a.coords(), x).is_negative())
            && self.equalities.iter().all(|e| dot(e.coords(), x).is_zero())
    }

    /// The largest linear subspace inside the cone is zero.
    pub fn is_strongly_convex(&self) -> bool {
        let rows: Vec<Vec<BigInt>> = self
            .inequalities
            .iter()
            .chain(&self.equalities)
            .map(|v| v.coords().to_vec())
            .collect();
        let m = IntMatrix::from_rows(rows, self.dim).expect("uniform dimension");
        rational::rank(&m) == self.dim
    }

    /// Dimension of the cone (of its linear span).
    pub fn cone_dim(&self) -> usize {
        self.dim - self.equalities.len()
    }
}

/// Exact membership test.
pub fn membership(c: &HRepCone, x: &RationalVector) -> Result<bool> {
    if x.dim() != c.dim {
        return Err(Error::DimensionMismatch { expected: c.dim, found: x.dim() });
    }
    let ok_ineq = c.inequalities.iter().all(|a| !rat_dot_int(&x.0, a.coords()).is_negative());
    let ok_eq = c.equalities.iter().all(|e| rat_dot_int(&x.0, e.coords()).is_zero());
    Ok(ok_ineq && ok_eq)
}

/// H-representation of the cone spanned by `generators` in `Z^dim`.
///
/// Facet normals are primitive and chosen inside the linear span of the
/// generators; equalities are a Hermite basis of the annihilator of that span.
pub fn dual_description(dim: usize, generators: &[LatticeVector]) -> Result<HRepCone> {
    for g in generators {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
    }
    let g = IntMatrix::from_vectors(generators, dim)?;
    let kernel = integer_kernel(&g);
    let equalities: Vec<LatticeVector> =
        kernel.col_vectors().into_iter().map(LatticeVector::new).collect();
    let r = dim - equalities.len();
    if r == 0 {
        return Ok(HRepCone { dim, inequalities: vec![], equalities });
    }

    // Rational basis of the span: the Hermite basis of the generator lattice.
    let span = hermite_normal_form(&g);
    debug_assert_eq!(span.rows(), r);

    let mut facets: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for subset in (0..generators.len()).combinations(r - 1) {
        // a = sum_i c_i b_i with <a, t> = 0 for t in subset
        let rows: Vec<Vec<Rat>> = subset
            .iter()
            .map(|&t| {
                (0..r)
                    .map(|i| rational::int_to_rat(&dot(span.row(i), generators[t].coords())))
                    .collect()
            })
            .collect();
        let ns = rational::nullspace(&rows, r);
        if ns.len() != 1 {
            continue;
        }
        let c = &ns[0];
        let a: Vec<Rat> = (0..dim)
            .map(|k| (0..r).fold(Rat::zero(), |acc, i| acc + &c[i] * rational::int_to_rat(&span[(i, k)])))
            .collect();
        let mut a = primitive_integer_multiple(&a);
        let values: Vec<BigInt> = generators.iter().map(|gen| dot(&a, gen.coords())).collect();
        let nonneg = values.iter().all(|v| !v.is_negative());
        let nonpos = values.iter().all(|v| !v.is_positive());
        if nonpos && !nonneg {
            a = a.into_iter().map(|x| -x).collect();
        } else if !nonneg {
            continue;
        }
        // A supporting hyperplane that vanishes on every generator is not a facet.
        if values.iter().all(Zero::is_zero) {
            continue;
        }
        facets.insert(a);
    }
    Ok(HRepCone {
        dim,
        inequalities: facets.into_iter().map(LatticeVector::new).collect(),
        equalities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(v)
    }

    #[test]
    fn first_octant_is_self_dual() {
        let c = dual_description(3, &[lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1])]).unwrap();
        assert!(c.equalities.is_empty());
        let got: BTreeSet<_> = c.inequalities.iter().cloned().collect();
        let want: BTreeSet<_> = [lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1])].into();
        assert_eq!(got, want);
        assert!(membership(&c, &RationalVector::from_i64(&[1, 2, 3])).unwrap());
        assert!(!membership(&c, &RationalVector::from_i64(&[-1, 0, 0])).unwrap());
    }

    #[test]
    fn four_ray_cone_has_four_facets_with_two_generators_each() {
        let gens = [lv(&[1, 0, 1]), lv(&[0, 1, 1]), lv(&[1, 0, -1]), lv(&[0, 1, -1])];
        let c = dual_description(3, &gens).unwrap();
        assert_eq!(c.inequalities.len(), 4);
        for a in &c.inequalities {
            let on = gens.iter().filter(|g| a.dot(g).is_zero()).count();
            assert_eq!(on, 2, "facet {a}");
        }
    }

    #[test]
    fn half_plane() {
        let c = dual_description(2, &[lv(&[1, 0]), lv(&[-1, 0]), lv(&[0, 1])]).unwrap();
        assert_eq!(c.inequalities, vec![lv(&[0, 1])]);
        assert!(c.equalities.is_empty());
        assert!(!c.is_strongly_convex());
    }

    #[test]
    fn interior_of_v4_v5_v7() {
        let c = dual_description(3, &[lv(&[1, 0, -1]), lv(&[0, 1, -1]), lv(&[0, 0, -1])]).unwrap();
        assert!(membership(&c, &RationalVector::from_i64(&[1, 1, -3])).unwrap());
        assert!(c.inequalities.iter().all(|a| a.dot(&lv(&[1, 1, -3])).is_positive()));
    }

    #[test]
    fn empty_generators_give_the_zero_cone() {
        let c = dual_description(3, &[]).unwrap();
        assert_eq!(c.equalities.len(), 3);
        assert!(c.inequalities.is_empty());
        assert!(membership(&c, &RationalVector::from_i64(&[0, 0, 0])).unwrap());
        assert!(!membership(&c, &RationalVector::from_i64(&[0, 1, 0])).unwrap());
    }

    #[test]
    fn lower_dimensional_cone() {
        let c = dual_description(3, &[lv(&[1, 0, 0]), lv(&[0, 1, 0])]).unwrap();
        assert_eq!(c.equalities, vec![lv(&[0, 0, 1])]);
        assert_eq!(c.inequalities.len(), 2);
        assert_eq!(c.cone_dim(), 2);
    }

    #[test]
    fn dimension_mismatch() {
        let c = dual_description(2, &[lv(&[1, 0])]).unwrap();
        assert!(membership(&c, &RationalVector::from_i64(&[1, 0, 0])).is_err());
    }
}
