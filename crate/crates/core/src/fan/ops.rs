use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{build, build_fan, Fan, Wall};
use crate::error::{Error, Result};
use crate::exactlin::{integer_kernel, IntMatrix, LatticeVector};

/// The integer relation among the two off-wall rays and the rays of a
/// simplicial wall, scaled to be primitive with positive off-wall coefficients.
pub fn wall_relation(fan: &Fan, wall: &Wall) -> Result<BTreeMap<usize, BigInt>> {
    let n = fan.dim();
    let off_wall = |cone: usize| -> Vec<usize> {
        fan.max_cones()[cone]
            .ray_ids()
            .iter()
            .copied()
            .filter(|r| !wall.ray_ids.contains(r))
            .collect()
    };
    let (l, r) = (off_wall(wall.left), off_wall(wall.right));
    if wall.ray_ids.len() != n - 1 || l.len() != 1 || r.len() != 1 {
        return Err(Error::NonSimplicialWall(format!(
            "relation undefined for non-simplicial wall {}",
            fan.cone_label(&wall.ray_ids)
        )));
    }
    let ids: Vec<usize> = [l[0], r[0]].into_iter().chain(wall.ray_ids.iter().copied()).collect();
    let cols: Vec<LatticeVector> = ids.iter().map(|&i| fan.ray(i).clone()).collect();
    let m = IntMatrix::from_vectors(&cols, n)?.transpose();
    let kernel = integer_kernel(&m);
    if kernel.cols() != 1 {
        return Err(Error::Internal(format!(
            "wall {} has a relation space of dimension {}",
            fan.cone_label(&wall.ray_ids),
            kernel.cols()
        )));
    }
    let mut c = kernel.col(0);
    if c[0].is_negative() {
        c.iter_mut().for_each(|x| *x = -&*x);
    }
    debug_assert!(c[0].is_positive() && c[1].is_positive());
    Ok(ids.into_iter().zip(c).collect())
}

/// Star subdivision of `fan` at the primitive lattice vector `w`.
pub fn stellar_subdivide(fan: &Fan, w: &LatticeVector) -> Result<Fan> {
    if w.dim() != fan.dim() {
        return Err(Error::DimensionMismatch { expected: fan.dim(), found: w.dim() });
    }
    if w.is_zero() {
        return Err(Error::Subdivision("cannot subdivide at the zero vector".into()));
    }
    if !w.is_primitive() {
        return Err(Error::Subdivision(format!("subdivision vector {w} is not primitive")));
    }
    if let Some(r) = fan.rays().iter().find(|r| &r.vector == w) {
        return Err(Error::Subdivision(format!(
            "{w} is already the ray {}",
            fan.ray_label(r.index)
        )));
    }
    let hit = fan.cones_containing(w.coords());
    if hit.is_empty() {
        return Err(Error::Subdivision(format!("{w} is not in the support of the fan")));
    }
    let (dim, mut rays, cones) = fan.data();
    let new_id = rays.len();
    rays.push(w.clone());
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (ci, ids) in cones.into_iter().enumerate() {
        if !hit.contains(&ci) {
            out.push(ids);
            continue;
        }
        let cone = &fan.max_cones()[ci];
        for (a, facet) in cone.hrep().inequalities.iter().zip(cone.facets()) {
            if a.dot(w).is_positive() {
                let mut c = facet.clone();
                c.push(new_id);
                out.push(c);
            }
        }
    }
    build_fan(dim, rays, out)
}

/// Product fan in `N1 x N2`.
pub fn product(f: &Fan, g: &Fan) -> Result<Fan> {
    let (n1, n2) = (f.dim(), g.dim());
    let pad = |v: &LatticeVector, before: usize, after: usize| -> LatticeVector {
        let mut c = vec![BigInt::zero(); before];
        c.extend(v.coords().iter().cloned());
        c.extend(std::iter::repeat_n(BigInt::zero(), after));
        LatticeVector::new(c)
    };
    let mut rays: Vec<LatticeVector> = f.rays().iter().map(|r| pad(&r.vector, 0, n2)).collect();
    rays.extend(g.rays().iter().map(|r| pad(&r.vector, n1, 0)));
    let shift = f.num_rays();
    let mut cones = Vec::with_capacity(f.max_cones().len() * g.max_cones().len());
    for a in f.max_cones() {
        for b in g.max_cones() {
            let mut c = a.ray_ids().to_vec();
            c.extend(b.ray_ids().iter().map(|i| i + shift));
            cones.push(c);
        }
    }
    // Joins of cones of two fans always meet in common faces.
    build(n1 + n2, rays, cones, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(v)
    }

    fn p2() -> Fan {
        build_fan(2, vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap()
    }

    fn p1() -> Fan {
        build_fan(1, vec![lv(&[1]), lv(&[-1])], vec![vec![0], vec![1]]).unwrap()
    }

    fn evaluates_to_zero(fan: &Fan, rel: &BTreeMap<usize, BigInt>) -> bool {
        let mut s = LatticeVector::zero(fan.dim());
        for (&i, c) in rel {
            s = s.add(&fan.ray(i).scale(c));
        }
        s.is_zero()
    }

    #[test]
    fn p2_relations_are_all_ones() {
        let f = p2();
        for w in f.walls().unwrap() {
            let rel = wall_relation(&f, w).unwrap();
            assert_eq!(rel.len(), 3);
            assert!(rel.values().all(One::is_one));
            assert!(evaluates_to_zero(&f, &rel));
        }
    }

    #[test]
    fn p2_blow_up() {
        let f = stellar_subdivide(&p2(), &lv(&[1, 1])).unwrap();
        assert_eq!(f.num_rays(), 4);
        assert_eq!(f.max_cones().len(), 4);
        assert!(f.is_complete() && f.flags().smooth);
    }

    #[test]
    fn subdivision_errors() {
        let f = p2();
        assert!(stellar_subdivide(&f, &lv(&[0, 0])).is_err());
        assert!(stellar_subdivide(&f, &lv(&[1, 0])).unwrap_err().to_string().contains("already"));
        assert!(stellar_subdivide(&f, &lv(&[2, 2])).unwrap_err().to_string().contains("primitive"));
        let octant = build_fan(2, vec![lv(&[1, 0]), lv(&[0, 1])], vec![vec![0, 1]]).unwrap();
        assert!(stellar_subdivide(&octant, &lv(&[-1, 1]))
            .unwrap_err()
            .to_string()
            .contains("support"));
    }

    #[test]
    fn subdividing_a_wall_point() {
        // (1,-1) lies on no ray of P^2 but inside <e1, -e1-e2>; (0,-1) too.
        let f = stellar_subdivide(&p2(), &lv(&[0, -1])).unwrap();
        assert_eq!(f.max_cones().len(), 4);
        assert!(f.is_complete());
    }

    #[test]
    fn p1_times_p1() {
        let f = product(&p1(), &p1()).unwrap();
        assert_eq!(f.num_rays(), 4);
        assert_eq!(f.max_cones().len(), 4);
        assert!(f.is_complete() && f.flags().smooth);
        assert_eq!(f.walls().unwrap().len(), 4);
    }

    #[test]
    fn product_wall_count() {
        let (f, g) = (p2(), p1());
        let h = product(&f, &g).unwrap();
        let expected = f.walls().unwrap().len() * g.max_cones().len()
            + f.max_cones().len() * g.walls().unwrap().len();
        assert_eq!(h.walls().unwrap().len(), expected);
        let rebuilt = {
            let (d, r, c) = h.data();
            build_fan(d, r, c).unwrap()
        };
        assert_eq!(rebuilt, h);
    }
}
