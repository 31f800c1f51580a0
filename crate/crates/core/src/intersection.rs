//! Intersection numbers with torus-invariant curves `V(tau)`, Mori and nef
//! cones, projectivity and the Kleiman criterion.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::divisor::{cartier_data, cartier_lattice, picard, principal_divisor, CartierData, PicardBasis, TWeilDivisor};
use crate::error::{Error, Result};
use crate::exactlin::{
    primitive_integer_multiple, rank, rational, rational::Rat, IntMatrix, LatticeVector,
};
use crate::fan::{Fan, Wall};
use crate::polyhedra::{common_denominator, cone_is_zero, FarkasCertificate, LinSystem, LpOutcome};

/// `D . V(tau) = <m_left - m_right, u>` with `u` the wall's side generator.
pub fn intersection_number(cd: &CartierData, wall: &Wall) -> BigInt {
    intersection_number_with_lift(cd, wall, &wall.side_generator)
}

/// As [`intersection_number`], for any `u` with `quotient_map(u) = 1`.
pub fn intersection_number_with_lift(cd: &CartierData, wall: &Wall, u: &LatticeVector) -> BigInt {
    cd.m(wall.left).sub(cd.m(wall.right)).dot(u)
}

/// `D . V(tau)` for every wall when `D` is only Q-Cartier; `None` when some
/// maximal cone admits no rational `m_sigma`.
pub fn rational_intersections(fan: &Fan, d: &TWeilDivisor) -> Result<Option<Vec<Rat>>> {
    if d.num_rays() != fan.num_rays() {
        return Err(Error::DimensionMismatch { expected: fan.num_rays(), found: d.num_rays() });
    }
    let n = fan.dim();
    let mut local = Vec::with_capacity(fan.max_cones().len());
    for cone in fan.max_cones() {
        let rows: Vec<Vec<Rat>> = cone
            .ray_ids()
            .iter()
            .map(|&i| fan.ray(i).coords().iter().map(rational::int_to_rat).collect())
            .collect();
        let rhs: Vec<Rat> = cone.ray_ids().iter().map(|&i| -rational::int_to_rat(d.coeff(i))).collect();
        match rational::solve(&rows, &rhs, n) {
            Some(m) => local.push(m),
            None => return Ok(None),
        }
    }
    let walls = fan.walls()?;
    Ok(Some(
        walls
            .iter()
            .map(|w| {
                let u = w.side_generator.coords();
                (0..n).fold(Rat::zero(), |acc, k| {
                    acc + (&local[w.left][k] - &local[w.right][k]) * rational::int_to_rat(&u[k])
                })
            })
            .collect(),
    ))
}

/// Pairings of one wall curve with the Picard basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveClass {
    pub wall_id: usize,
    pub pairing: Vec<BigInt>,
}

impl CurveClass {
    pub fn is_zero(&self) -> bool {
        self.pairing.iter().all(Zero::is_zero)
    }
}

/// Cartier data of each Picard basis element.
pub fn basis_data(fan: &Fan, pic: &PicardBasis) -> Result<Vec<CartierData>> {
    pic.basis
        .iter()
        .map(|d| {
            cartier_data(fan, d)?
                .ok_or_else(|| Error::Internal(format!("Picard basis element {d} is not Cartier")))
        })
        .collect()
}

/// One class per wall, in wall order.
pub fn curve_classes(fan: &Fan, pic: &PicardBasis) -> Result<Vec<CurveClass>> {
    let walls = fan.walls()?;
    let data = basis_data(fan, pic)?;
    let mut principal = Vec::with_capacity(fan.dim());
    for j in 0..fan.dim() {
        let d = principal_divisor(fan, &LatticeVector::unit(fan.dim(), j))?;
        principal.push(cartier_data(fan, &d)?.expect("principal divisors are Cartier"));
    }
    walls
        .iter()
        .map(|w| {
            if let Some(p) = principal.iter().find(|p| !intersection_number(p, w).is_zero()) {
                return Err(Error::Internal(format!(
                    "principal divisor {} meets wall {} nontrivially",
                    p.divisor,
                    fan.cone_label(&w.ray_ids)
                )));
            }
            Ok(CurveClass {
                wall_id: w.id,
                pairing: data.iter().map(|cd| intersection_number(cd, w)).collect(),
            })
        })
        .collect()
}

fn pairings(fan: &Fan, d: &TWeilDivisor) -> Result<Vec<BigInt>> {
    let cd = cartier_data(fan, d)?
        .ok_or_else(|| Error::NotCartier(format!("{d} is not Cartier")))?;
    Ok(fan.walls()?.iter().map(|w| intersection_number(&cd, w)).collect())
}

/// Nonnegative on every wall curve.
pub fn is_nef(fan: &Fan, d: &TWeilDivisor) -> Result<bool> {
    Ok(pairings(fan, d)?.iter().all(|x| !x.is_negative()))
}

/// Positive on every wall curve, which suffices on a complete toric variety.
pub fn is_ample(fan: &Fan, d: &TWeilDivisor) -> Result<bool> {
    Ok(pairings(fan, d)?.iter().all(Signed::is_positive))
}

/// Outcome of the projectivity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projectivity {
    pub projective: bool,
    /// An ample Cartier divisor when projective.
    pub witness: Option<TWeilDivisor>,
    /// Refutation of the ampleness system when not projective.
    pub certificate: Option<ProjectivityCertificate>,
}

/// Nonnegative wall weights and cone relations combining to a contradiction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivityCertificate {
    pub system: AmplenessSystem,
    pub farkas: FarkasCertificate,
}

impl ProjectivityCertificate {
    pub fn verifies(&self) -> bool {
        self.farkas.verifies(&self.system.system)
    }

    /// `(cone id, relation among its rays, weight)` for relations with nonzero weight.
    pub fn relation_weights(&self) -> Vec<(usize, Vec<BigInt>, BigInt)> {
        self.system
            .cone_of_eq
            .iter()
            .zip(&self.system.system.eq)
            .zip(&self.farkas.eq)
            .filter(|(_, c)| !c.is_zero())
            .map(|((&cone, row), c)| (cone, row.clone(), c.clone()))
            .collect()
    }

    /// `(wall id, weight)` for walls with nonzero weight.
    pub fn wall_weights(&self) -> Vec<(usize, BigInt)> {
        self.system
            .wall_of_row
            .iter()
            .zip(&self.farkas.strict)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&w, c)| (w, c.clone()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmplenessSystem {
    pub system: LinSystem,
    /// Wall id of each strict row.
    pub wall_of_row: Vec<usize>,
    /// Maximal cone of each equality row.
    pub cone_of_eq: Vec<usize>,
}

/// The ampleness system in the divisor coefficients `a`.
///
/// Equalities: every integer relation among the rays of a maximal cone, so
/// that `a` is `Q`-Cartier. Strict rows: `D . V(tau) > 0` for each wall, as a
/// linear form in `a`.
pub fn ampleness_system(fan: &Fan) -> Result<AmplenessSystem> {
    let walls = fan.walls()?;
    let r = fan.num_rays();
    let n = fan.dim();
    let mut sys = LinSystem::new(r);
    let mut cone_of_eq = Vec::new();
    for (ci, cone) in fan.max_cones().iter().enumerate() {
        let rel = crate::exactlin::integer_kernel(&fan.cone_matrix(ci).transpose());
        for k in 0..rel.cols() {
            let mut row = vec![BigInt::zero(); r];
            for (t, &ray) in cone.ray_ids().iter().enumerate() {
                row[ray] = rel[(t, k)].clone();
            }
            sys.push_eq(row)?;
            cone_of_eq.push(ci);
        }
    }
    // m_sigma = -G_B^{-1} a_B on a basis B of rays of sigma.
    let local_form = |cone: usize, u: &LatticeVector| -> Result<Vec<(usize, Rat)>> {
        let ids = independent_rays(fan, cone)?;
        let g: Vec<Vec<Rat>> = (0..n)
            .map(|row| ids.iter().map(|&i| rational::int_to_rat(&fan.ray(i)[row])).collect())
            .collect();
        let rhs: Vec<Rat> = u.coords().iter().map(rational::int_to_rat).collect();
        let w = rational::solve(&g, &rhs, n)
            .ok_or_else(|| Error::Internal("cone basis is singular".into()))?;
        Ok(ids.into_iter().zip(w.into_iter().map(|x| -x)).collect())
    };
    let mut wall_of_row = Vec::with_capacity(walls.len());
    for w in walls {
        let mut row = vec![Rat::zero(); r];
        for (i, c) in local_form(w.left, &w.side_generator)? {
            row[i] += c;
        }
        for (i, c) in local_form(w.right, &w.side_generator)? {
            row[i] -= c;
        }
        sys.push_strict(primitive_integer_multiple(&row))?;
        wall_of_row.push(w.id);
    }
    Ok(AmplenessSystem { system: sys, wall_of_row, cone_of_eq })
}

fn independent_rays(fan: &Fan, cone: usize) -> Result<Vec<usize>> {
    let n = fan.dim();
    let mut picked: Vec<usize> = Vec::with_capacity(n);
    for &i in fan.max_cones()[cone].ray_ids() {
        let mut trial: Vec<LatticeVector> = picked.iter().map(|&j| fan.ray(j).clone()).collect();
        trial.push(fan.ray(i).clone());
        if rank(&IntMatrix::from_vectors(&trial, n)?) == trial.len() {
            picked.push(i);
        }
        if picked.len() == n {
            break;
        }
    }
    Ok(picked)
}

/// Decides projectivity via the ampleness system.
pub fn is_projective(fan: &Fan) -> Result<Projectivity> {
    let sys = ampleness_system(fan)?;
    match sys.system.solve()? {
        LpOutcome::Feasible(x) => {
            let witness = cartier_multiple(fan, &x)?;
            if !is_ample(fan, &witness)? {
                return Err(Error::Internal(format!("projectivity witness {witness} is not ample")));
            }
            Ok(Projectivity { projective: true, witness: Some(witness), certificate: None })
        }
        LpOutcome::Infeasible(farkas) => {
            let cert = ProjectivityCertificate { system: sys, farkas };
            if !cert.verifies() {
                return Err(Error::Internal("projectivity certificate does not verify".into()));
            }
            Ok(Projectivity { projective: false, witness: None, certificate: Some(cert) })
        }
    }
}

/// Smallest positive multiple of the ray through a `Q`-Cartier divisor that is Cartier.
fn cartier_multiple(fan: &Fan, x: &[Rat]) -> Result<TWeilDivisor> {
    let a = primitive_integer_multiple(x);
    let c = cartier_lattice(fan)?;
    let ct = rational::int_rows_to_rat(&c.transpose());
    let rhs: Vec<Rat> = a.iter().map(rational::int_to_rat).collect();
    let coords = rational::solve(&ct, &rhs, c.rows())
        .ok_or_else(|| Error::Internal("witness is not Q-Cartier".into()))?;
    Ok(TWeilDivisor::new(a).scale(&common_denominator(&coords)))
}

/// Mori cone data of a complete fan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeReport {
    pub ne_generators: Vec<CurveClass>,
    pub numerical_rank: usize,
    pub nef_is_zero: bool,
    pub ne_equals_n1: bool,
    pub trivial_walls: Vec<usize>,
}

pub fn cone_report(fan: &Fan, pic: &PicardBasis) -> Result<ConeReport> {
    let classes = curve_classes(fan, pic)?;
    let p = IntMatrix::from_rows(classes.iter().map(|c| c.pairing.clone()).collect(), pic.rank)?;
    let rho = rank(&p);
    // Columns forming a basis of the column space give coordinates on N^1.
    let mut cols: Vec<usize> = Vec::new();
    for j in 0..pic.rank {
        let mut trial = cols.clone();
        trial.push(j);
        if rank(&p.select_columns(&trial)) == trial.len() {
            cols = trial;
        }
    }
    let nef_is_zero = cone_is_zero(&p.select_columns(&cols))?;
    let trivial_walls = classes.iter().filter(|c| c.is_zero()).map(|c| c.wall_id).collect();
    Ok(ConeReport {
        ne_generators: classes,
        numerical_rank: rho,
        nef_is_zero,
        ne_equals_n1: nef_is_zero,
        trivial_walls,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsProjective,
    FailsWithCertificate,
    NotApplicable,
    NoPositiveDivisor,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::HoldsProjective => "holds_projective",
            Verdict::FailsWithCertificate => "fails_with_certificate",
            Verdict::NotApplicable => "not_applicable",
            Verdict::NoPositiveDivisor => "no_positive_divisor",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleimanVerdict {
    pub projective: bool,
    pub positive_divisor: Option<TWeilDivisor>,
    pub verdict: Verdict,
}

/// Looks for a Cartier divisor positive on every nonzero wall class of a
/// non-projective fan: such a divisor lies in the interior of the nef cone
/// although no divisor is ample.
pub fn kleiman_verdict(
    pic: &PicardBasis,
    cones: &ConeReport,
    projective: bool,
) -> Result<KleimanVerdict> {
    if projective {
        return Ok(KleimanVerdict { projective, positive_divisor: None, verdict: Verdict::HoldsProjective });
    }
    if cones.numerical_rank == 0 {
        return Ok(KleimanVerdict { projective, positive_divisor: None, verdict: Verdict::NotApplicable });
    }
    let mut sys = LinSystem::new(pic.rank);
    for c in cones.ne_generators.iter().filter(|c| !c.is_zero()) {
        sys.push_strict(c.pairing.clone())?;
    }
    match sys.feasible()? {
        Some(x) => {
            let den = common_denominator(&x);
            let class: Vec<BigInt> =
                x.iter().map(|q| (q * rational::int_to_rat(&den)).to_integer()).collect();
            let class = primitive_or_self(class);
            let d = pic.divisor_of_class(&class);
            let ok = cones
                .ne_generators
                .iter()
                .filter(|c| !c.is_zero())
                .all(|c| c.pairing.iter().zip(&class).map(|(a, b)| a * b).sum::<BigInt>() >= BigInt::one());
            if !ok {
                return Err(Error::Internal("positive divisor search returned a bad class".into()));
            }
            Ok(KleimanVerdict {
                projective,
                positive_divisor: Some(d),
                verdict: Verdict::FailsWithCertificate,
            })
        }
        None => Ok(KleimanVerdict { projective, positive_divisor: None, verdict: Verdict::NoPositiveDivisor }),
    }
}

fn primitive_or_self(v: Vec<BigInt>) -> Vec<BigInt> {
    let lv = LatticeVector::new(v.clone());
    if lv.is_zero() {
        v
    } else {
        crate::exactlin::primitive(&lv).map(LatticeVector::into_coords).unwrap_or(v)
    }
}

/// Convenience: Picard basis, cone report, projectivity and Kleiman verdict.
pub fn diagnose(fan: &Fan) -> Result<(PicardBasis, ConeReport, Projectivity, KleimanVerdict)> {
    let pic = picard(fan)?;
    let cones = cone_report(fan, &pic)?;
    let proj = is_projective(fan)?;
    let k = kleiman_verdict(&pic, &cones, proj.projective)?;
    Ok((pic, cones, proj, k))
}

pub fn kleiman_diagnosis(fan: &Fan) -> Result<KleimanVerdict> {
    Ok(diagnose(fan)?.3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::build_fan;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector::from_i64(v)
    }

    fn p2() -> Fan {
        build_fan(2, vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap()
    }

    #[test]
    fn hyperplane_meets_every_line_once() {
        let f = p2();
        for i in 0..3 {
            let cd = cartier_data(&f, &TWeilDivisor::ray(3, i)).unwrap().unwrap();
            for w in f.walls().unwrap() {
                assert_eq!(intersection_number(&cd, w), BigInt::one());
            }
        }
    }

    #[test]
    fn p2_is_projective() {
        let f = p2();
        let p = is_projective(&f).unwrap();
        assert!(p.projective);
        assert!(is_ample(&f, p.witness.as_ref().unwrap()).unwrap());
        let pic = picard(&f).unwrap();
        let c = cone_report(&f, &pic).unwrap();
        assert_eq!(c.numerical_rank, 1);
        assert!(!c.ne_equals_n1);
        let k = kleiman_verdict(&pic, &c, true).unwrap();
        assert_eq!(k.verdict, Verdict::HoldsProjective);
    }

    #[test]
    fn zero_divisor_is_nef_not_ample() {
        let f = p2();
        assert!(is_nef(&f, &TWeilDivisor::zero(3)).unwrap());
        assert!(!is_ample(&f, &TWeilDivisor::zero(3)).unwrap());
    }

    #[test]
    fn non_cartier_is_an_error() {
        let f = build_fan(
            2,
            vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -2])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let e = is_nef(&f, &TWeilDivisor::ray(3, 0)).unwrap_err();
        assert!(matches!(e, Error::NotCartier(_)));
    }

    #[test]
    fn weighted_plane_rational_degrees() {
        // P(1,2,1) in ray order: D_i . D_j = q_i q_j / 2 for i != j, D_1^2 = 1/2.
        let f = build_fan(
            2,
            vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -2])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let xs = rational_intersections(&f, &TWeilDivisor::ray(3, 0)).unwrap().unwrap();
        let half = Rat::new(BigInt::one(), BigInt::from(2));
        for (w, x) in f.walls().unwrap().iter().zip(&xs) {
            let want = if w.ray_ids == [1] { Rat::one() } else { half.clone() };
            assert_eq!(x, &want, "wall {:?}", w.ray_ids);
        }
    }

    #[test]
    fn non_q_cartier_has_no_rational_degrees() {
        let f = crate::catalog::delta_p();
        let d = TWeilDivisor::ray(6, 0);
        assert!(rational_intersections(&f, &d).unwrap().is_none());
    }
}
