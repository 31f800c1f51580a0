//! Complete rational fans given by their maximal cones.
//!
//! Faces are derived, never listed. Validation checks primitivity of the rays,
//! strong convexity, extremality of every listed ray, purity and the
//! face-intersection axiom, then derives walls and singularity flags.

mod ops;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{
    dot, primitive, rational, smith_normal_form, solve_integral, IntMatrix, LatticeVector,
};
use crate::polyhedra::{dual_description, HRepCone, LinSystem};

pub use ops::{product, stellar_subdivide, wall_relation};

/// Number of random points used to cross-check completeness.
pub const COMPLETENESS_SAMPLES: usize = 1000;
const COMPLETENESS_SEED: u64 = 0x7031_c0e5;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ray {
    pub index: usize,
    pub vector: LatticeVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    ray_ids: Vec<usize>,
    dim: usize,
    hrep: HRepCone,
    multiplicity: Option<BigInt>,
    facets: Vec<Vec<usize>>,
}

impl Cone {
    pub fn ray_ids(&self) -> &[usize] {
        &self.ray_ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hrep(&self) -> &HRepCone {
        &self.hrep
    }

    /// Lattice index of the generators; `None` for non-simplicial cones.
    pub fn multiplicity(&self) -> Option<&BigInt> {
        self.multiplicity.as_ref()
    }

    pub fn is_simplicial(&self) -> bool {
        self.multiplicity.is_some()
    }

    pub fn is_smooth(&self) -> bool {
        self.multiplicity.as_ref().is_some_and(One::is_one)
    }

    /// Ray ids of each facet, in the order of `hrep().inequalities`.
    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn contains_ray(&self, id: usize) -> bool {
        self.ray_ids.binary_search(&id).is_ok()
    }
}

/// A codimension-one cone shared by two maximal cones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Wall {
    pub id: usize,
    pub ray_ids: Vec<usize>,
    /// Maximal cone with the lexicographically smaller ray list.
    pub left: usize,
    pub right: usize,
    /// Primitive functional vanishing on the wall, positive on the right cone.
    pub quotient_map: LatticeVector,
    /// A lattice vector mapped to `1` by the quotient map.
    pub side_generator: LatticeVector,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FanFlags {
    pub complete: bool,
    pub q_factorial: bool,
    pub smooth: bool,
    pub gorenstein: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fan {
    dim: usize,
    rays: Vec<Ray>,
    max_cones: Vec<Cone>,
    walls: Vec<Wall>,
    boundary: Vec<Vec<usize>>,
    flags: FanFlags,
}

impl Fan {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn ray(&self, id: usize) -> &LatticeVector {
        &self.rays[id].vector
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    pub fn flags(&self) -> FanFlags {
        self.flags
    }

    pub fn is_complete(&self) -> bool {
        self.flags.complete
    }

    /// Fails with the first facet that has a single neighbouring cone.
    pub fn require_complete(&self) -> Result<()> {
        if let Some(f) = self.boundary.first() {
            return Err(Error::NotComplete(format!(
                "wall {} has only one neighbouring maximal cone",
                self.cone_label(f)
            )));
        }
        Ok(())
    }

    /// Walls in lexicographic order of their ray ids. Requires a complete fan.
    pub fn walls(&self) -> Result<&[Wall]> {
        self.require_complete()?;
        Ok(&self.walls)
    }

    /// Facets with one neighbour; empty exactly when the fan is complete.
    pub fn boundary_facets(&self) -> &[Vec<usize>] {
        &self.boundary
    }

    pub fn wall_by_rays(&self, ray_ids: &[usize]) -> Option<&Wall> {
        let mut key = ray_ids.to_vec();
        key.sort_unstable();
        self.walls.iter().find(|w| w.ray_ids == key)
    }

    /// `v1`, `v2`, ... for fans with at most 26 rays, `r<i>` otherwise (1-based).
    pub fn ray_label(&self, id: usize) -> String {
        if self.rays.len() <= 26 {
            format!("v{}", id + 1)
        } else {
            format!("r{}", id + 1)
        }
    }

    pub fn cone_label(&self, ray_ids: &[usize]) -> String {
        let inner: Vec<String> = ray_ids.iter().map(|&i| self.ray_label(i)).collect();
        format!("<{}>", inner.join(","))
    }

    /// Ray vectors and maximal cones as index lists: the data the fan was built from.
    pub fn data(&self) -> (usize, Vec<LatticeVector>, Vec<Vec<usize>>) {
        (
            self.dim,
            self.rays.iter().map(|r| r.vector.clone()).collect(),
            self.max_cones.iter().map(|c| c.ray_ids.clone()).collect(),
        )
    }

    /// Same rays and same maximal cones, ignoring ray and cone order.
    pub fn same_as(&self, other: &Fan) -> bool {
        if self.dim != other.dim || self.rays.len() != other.rays.len() {
            return false;
        }
        let cones = |f: &Fan| -> BTreeSet<BTreeSet<LatticeVector>> {
            f.max_cones
                .iter()
                .map(|c| c.ray_ids.iter().map(|&i| f.ray(i).clone()).collect())
                .collect()
        };
        let rays = |f: &Fan| -> BTreeSet<LatticeVector> {
            f.rays.iter().map(|r| r.vector.clone()).collect()
        };
        rays(self) == rays(other) && cones(self) == cones(other)
    }

    /// Rays of a maximal cone as rows of an integer matrix.
    pub fn cone_matrix(&self, cone: usize) -> IntMatrix {
        let vs: Vec<LatticeVector> =
            self.max_cones[cone].ray_ids.iter().map(|&i| self.ray(i).clone()).collect();
        IntMatrix::from_vectors(&vs, self.dim).expect("uniform dimension")
    }

    /// All rays as rows.
    pub fn ray_matrix(&self) -> IntMatrix {
        let vs: Vec<LatticeVector> = self.rays.iter().map(|r| r.vector.clone()).collect();
        IntMatrix::from_vectors(&vs, self.dim).expect("uniform dimension")
    }

    /// Maximal cones containing `x` (boundary included).
    pub fn cones_containing(&self, x: &[BigInt]) -> Vec<usize> {
        (0..self.max_cones.len())
            .filter(|&c| self.max_cones[c].hrep.contains_lattice(x))
            .collect()
    }
}

impl fmt::Display for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fan in dimension {}", self.dim)?;
        for r in &self.rays {
            writeln!(f, "  {} = {}", self.ray_label(r.index), r.vector)?;
        }
        for c in &self.max_cones {
            writeln!(f, "  {}", self.cone_label(&c.ray_ids))?;
        }
        Ok(())
    }
}

/// Validates fan data and derives walls and flags.
///
/// Rays must be primitive and pairwise distinct; cones are lists of ray
/// indices. Incomplete fans are accepted (see [`Fan::require_complete`]).
pub fn build_fan(dim: usize, rays: Vec<LatticeVector>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
    build(dim, rays, max_cones, true)
}

pub(crate) fn build(
    dim: usize,
    rays: Vec<LatticeVector>,
    max_cones: Vec<Vec<usize>>,
    check_intersections: bool,
) -> Result<Fan> {
    if dim == 0 {
        return Err(Error::InvalidFan("fan dimension must be at least 1".into()));
    }
    let mut seen: BTreeMap<&LatticeVector, usize> = BTreeMap::new();
    for (i, v) in rays.iter().enumerate() {
        if v.dim() != dim {
            return Err(Error::InvalidFan(format!(
                "ray v{} = {v} has dimension {}, expected {dim}",
                i + 1,
                v.dim()
            )));
        }
        if v.is_zero() {
            return Err(Error::InvalidFan(format!("ray v{} is the zero vector", i + 1)));
        }
        if !v.is_primitive() {
            let p = primitive(v)?;
            return Err(Error::InvalidFan(format!(
                "ray v{} = {v} is not primitive; use {p}",
                i + 1
            )));
        }
        if let Some(j) = seen.insert(v, i) {
            return Err(Error::InvalidFan(format!(
                "duplicate ray {v}: v{} and v{}",
                j + 1,
                i + 1
            )));
        }
    }
    let rays: Vec<Ray> =
        rays.into_iter().enumerate().map(|(index, vector)| Ray { index, vector }).collect();
    let label = |ids: &[usize]| -> String {
        let inner: Vec<String> = ids.iter().map(|i| format!("v{}", i + 1)).collect();
        format!("<{}>", inner.join(","))
    };

    let mut cones: Vec<Cone> = Vec::with_capacity(max_cones.len());
    let mut cone_keys: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (ci, ids) in max_cones.into_iter().enumerate() {
        if ids.is_empty() {
            return Err(Error::InvalidFan(format!("maximal cone #{ci} has no rays")));
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ids.len() {
            return Err(Error::InvalidFan(format!("maximal cone #{ci} repeats a ray")));
        }
        if let Some(&bad) = sorted.iter().find(|&&i| i >= rays.len()) {
            return Err(Error::InvalidFan(format!(
                "maximal cone #{ci} refers to ray index {bad}, but there are {} rays",
                rays.len()
            )));
        }
        if !cone_keys.insert(sorted.clone()) {
            return Err(Error::InvalidFan(format!(
                "maximal cone {} listed twice",
                label(&sorted)
            )));
        }
        cones.push(make_cone(dim, &rays, sorted, ci, &label)?);
    }
    if cones.is_empty() {
        return Err(Error::InvalidFan("fan has no maximal cones".into()));
    }

    if check_intersections {
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                if !meets_in_common_face(dim, &rays, &cones[i], &cones[j]) {
                    return Err(Error::InvalidFan(format!(
                        "cone intersection not a common face: {} and {}",
                        label(&cones[i].ray_ids),
                        label(&cones[j].ray_ids)
                    )));
                }
            }
        }
    }

    // Facet adjacency.
    let mut adjacency: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
    for (ci, c) in cones.iter().enumerate() {
        for (fi, f) in c.facets.iter().enumerate() {
            adjacency.entry(f.clone()).or_default().push((ci, fi));
        }
    }
    let mut walls = Vec::new();
    let mut boundary = Vec::new();
    for (ray_ids, sides) in adjacency {
        match sides.as_slice() {
            [_] => boundary.push(ray_ids),
            [(a, fa), (b, _)] => {
                let (left, right, left_facet) = if cones[*a].ray_ids <= cones[*b].ray_ids {
                    (*a, *b, *fa)
                } else {
                    let fb = sides[1].1;
                    (*b, *a, fb)
                };
                let quotient_map = cones[left].hrep.inequalities[left_facet].neg();
                let q = IntMatrix::from_vectors(std::slice::from_ref(&quotient_map), dim)?;
                let u = solve_integral(&q, &[BigInt::one()])?
                    .ok_or_else(|| Error::Internal("primitive functional not surjective".into()))?;
                walls.push(Wall {
                    id: walls.len(),
                    ray_ids,
                    left,
                    right,
                    quotient_map,
                    side_generator: LatticeVector::new(u),
                });
            }
            _ => {
                return Err(Error::InvalidFan(format!(
                    "wall {} is shared by {} maximal cones",
                    label(&ray_ids),
                    sides.len()
                )))
            }
        }
    }

    let complete = boundary.is_empty();
    if complete && !sampled_support_is_everything(dim, &cones) {
        // Unreachable for a fan satisfying the axioms; treat as invalid input.
        return Err(Error::InvalidFan(
            "every wall has two neighbours but random points escape the support".into(),
        ));
    }
    let q_factorial = cones.iter().all(Cone::is_simplicial);
    let smooth = cones.iter().all(Cone::is_smooth);
    let gorenstein = cones.iter().all(|c| {
        let vs: Vec<LatticeVector> = c.ray_ids.iter().map(|&i| rays[i].vector.clone()).collect();
        let g = IntMatrix::from_vectors(&vs, dim).expect("uniform dimension");
        let ones = vec![BigInt::one(); vs.len()];
        matches!(solve_integral(&g, &ones), Ok(Some(_)))
    });
    Ok(Fan {
        dim,
        rays,
        max_cones: cones,
        walls,
        boundary,
        flags: FanFlags { complete, q_factorial, smooth, gorenstein },
    })
}

fn make_cone(
    dim: usize,
    rays: &[Ray],
    ray_ids: Vec<usize>,
    ci: usize,
    label: &dyn Fn(&[usize]) -> String,
) -> Result<Cone> {
    let vs: Vec<LatticeVector> = ray_ids.iter().map(|&i| rays[i].vector.clone()).collect();
    let hrep = dual_description(dim, &vs)?;
    let cdim = hrep.cone_dim();
    if !hrep.is_strongly_convex() {
        return Err(Error::InvalidFan(format!(
            "not strongly convex: maximal cone #{ci} {}",
            label(&ray_ids)
        )));
    }
    if cdim != dim {
        return Err(Error::InvalidFan(format!(
            "non-pure fan: maximal cone #{ci} {} has dimension {cdim}, expected {dim}",
            label(&ray_ids)
        )));
    }
    // A generator is extremal iff the facets through it cut out a line.
    for (k, v) in vs.iter().enumerate() {
        let through: Vec<Vec<BigInt>> = hrep
            .inequalities
            .iter()
            .filter(|a| a.dot(v).is_zero())
            .map(|a| a.coords().to_vec())
            .collect();
        let m = IntMatrix::from_rows(through, dim)?;
        if rational::rank(&m) != dim - 1 {
            return Err(Error::InvalidFan(format!(
                "ray not extremal in cone: v{} in maximal cone #{ci} {}",
                ray_ids[k] + 1,
                label(&ray_ids)
            )));
        }
    }
    let facets: Vec<Vec<usize>> = hrep
        .inequalities
        .iter()
        .map(|a| ray_ids.iter().copied().filter(|&i| a.dot(&rays[i].vector).is_zero()).collect())
        .collect();
    let multiplicity = (vs.len() == cdim).then(|| {
        let g = IntMatrix::from_vectors(&vs, dim).expect("uniform dimension");
        smith_normal_form(&g).diagonal.iter().product()
    });
    Ok(Cone { ray_ids, dim: cdim, hrep, multiplicity, facets })
}

/// Separation test: some functional vanishes on the shared rays, is positive on
/// the other rays of `a` and negative on the other rays of `b`.
fn meets_in_common_face(dim: usize, rays: &[Ray], a: &Cone, b: &Cone) -> bool {
    let shared: Vec<usize> =
        a.ray_ids.iter().copied().filter(|i| b.ray_ids.binary_search(i).is_ok()).collect();
    let separates = |f: &[BigInt]| -> bool {
        shared.iter().all(|&i| dot(f, rays[i].vector.coords()).is_zero())
            && a.ray_ids
                .iter()
                .filter(|i| !shared.contains(i))
                .all(|&i| dot(f, rays[i].vector.coords()).is_positive())
            && b.ray_ids
                .iter()
                .filter(|i| !shared.contains(i))
                .all(|&i| dot(f, rays[i].vector.coords()).is_negative())
    };
    let candidate = |c: &Cone, sign: i64| -> Vec<BigInt> {
        let mut s = vec![BigInt::zero(); dim];
        for (normal, facet) in c.hrep.inequalities.iter().zip(&c.facets) {
            if shared.iter().all(|i| facet.contains(i)) {
                for (x, y) in s.iter_mut().zip(normal.coords()) {
                    *x += y * sign;
                }
            }
        }
        s
    };
    if separates(&candidate(a, 1)) || separates(&candidate(b, -1)) {
        return true;
    }
    let mut sys = LinSystem::new(dim);
    for &i in &shared {
        sys.eq.push(rays[i].vector.coords().to_vec());
    }
    for &i in a.ray_ids.iter().filter(|i| !shared.contains(i)) {
        sys.strict.push(rays[i].vector.coords().to_vec());
    }
    for &i in b.ray_ids.iter().filter(|i| !shared.contains(i)) {
        sys.strict.push(rays[i].vector.neg().into_coords());
    }
    matches!(sys.feasible(), Ok(Some(_)))
}

fn sampled_support_is_everything(dim: usize, cones: &[Cone]) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(COMPLETENESS_SEED);
    let mut checked = 0;
    while checked < COMPLETENESS_SAMPLES {
        let x: Vec<BigInt> = (0..dim).map(|_| BigInt::from(rng.gen_range(-1000i64..=1000))).collect();
        if x.iter().all(Zero::is_zero) {
            continue;
        }
        checked += 1;
        if !cones.iter().any(|c| c.hrep.contains_lattice(&x)) {
            return false;
        }
    }
    true
}
