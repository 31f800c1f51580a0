//! Torus-invariant Weil divisors, the Cartier test and the Picard lattice.
//!
//! Sign convention: `div(chi^m) = sum <m, v_i> D_i`, and Cartier data of
//! `D = sum a_i D_i` satisfies `<m_sigma, v_i> = -a_i` for every ray of `sigma`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{
    dot, hermite_normal_form, integer_kernel, rational, smith_normal_form, solve_integral, IntMatrix,
    LatticeVector,
};
use crate::fan::Fan;

/// `sum a_i D_i`, one coefficient per ray of the fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TWeilDivisor {
    coeffs: Vec<BigInt>,
}

impl TWeilDivisor {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        TWeilDivisor { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(num_rays: usize) -> Self {
        Self::new(vec![BigInt::zero(); num_rays])
    }

    /// The prime divisor `D_i`.
    pub fn ray(num_rays: usize, i: usize) -> Self {
        let mut d = Self::zero(num_rays);
        d.coeffs[i] = BigInt::one();
        d
    }

    /// `-K = sum D_i`.
    pub fn anticanonical(num_rays: usize) -> Self {
        Self::new(vec![BigInt::one(); num_rays])
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn num_rays(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * k).collect())
    }

    fn check(&self, fan: &Fan) -> Result<()> {
        if self.coeffs.len() != fan.num_rays() {
            return Err(Error::DimensionMismatch {
                expected: fan.num_rays(),
                found: self.coeffs.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for TWeilDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let sign = if a.is_negative() { "-" } else { "+" };
            let abs = a.abs();
            if first {
                if a.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if !abs.is_one() {
                write!(f, "{abs}")?;
            }
            write!(f, "D{}", i + 1)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// One `m_sigma` per maximal cone, in the fan's cone order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CartierData {
    pub divisor: TWeilDivisor,
    pub local: Vec<LatticeVector>,
}

impl CartierData {
    pub fn m(&self, cone: usize) -> &LatticeVector {
        &self.local[cone]
    }

    /// Checks `<m_sigma, v_i> = -a_i` on every cone.
    pub fn verifies(&self, fan: &Fan) -> bool {
        self.local.len() == fan.max_cones().len()
            && fan.max_cones().iter().zip(&self.local).all(|(c, m)| {
                c.ray_ids().iter().all(|&i| m.dot(fan.ray(i)) == -self.divisor.coeff(i))
            })
    }

    pub fn add(&self, other: &Self) -> Self {
        CartierData {
            divisor: self.divisor.add(&other.divisor),
            local: self.local.iter().zip(&other.local).map(|(a, b)| a.add(b)).collect(),
        }
    }
}

/// `div(chi^m)`: coefficient `<m, v_i>` on each ray.
pub fn principal_divisor(fan: &Fan, m: &LatticeVector) -> Result<TWeilDivisor> {
    if m.dim() != fan.dim() {
        return Err(Error::DimensionMismatch { expected: fan.dim(), found: m.dim() });
    }
    Ok(TWeilDivisor::new(fan.rays().iter().map(|r| r.vector.dot(m)).collect()))
}

/// Local data of `D` if it is Cartier, `None` otherwise.
pub fn cartier_data(fan: &Fan, d: &TWeilDivisor) -> Result<Option<CartierData>> {
    d.check(fan)?;
    let mut local = Vec::with_capacity(fan.max_cones().len());
    for (ci, cone) in fan.max_cones().iter().enumerate() {
        let rhs: Vec<BigInt> = cone.ray_ids().iter().map(|&i| -d.coeff(i)).collect();
        match solve_integral(&fan.cone_matrix(ci), &rhs)? {
            Some(m) => local.push(LatticeVector::new(m)),
            None => return Ok(None),
        }
    }
    Ok(Some(CartierData { divisor: d.clone(), local }))
}

pub fn is_cartier(fan: &Fan, d: &TWeilDivisor) -> Result<bool> {
    Ok(cartier_data(fan, d)?.is_some())
}

/// `-K_X = sum D_i` is Cartier.
pub fn is_gorenstein(fan: &Fan) -> bool {
    matches!(cartier_data(fan, &TWeilDivisor::anticanonical(fan.num_rays())), Ok(Some(_)))
}

/// A basis of `Pic X` by Cartier divisors, with the class map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PicardBasis {
    pub rank: usize,
    pub basis: Vec<TWeilDivisor>,
    /// Rows are `div(chi^{e_j})`.
    pub principal_lattice: IntMatrix,
    /// Rows form a basis of the Cartier divisors inside `Z^rays`.
    pub cartier_lattice: IntMatrix,
    /// Sends Cartier-lattice coordinates to coordinates in `basis`.
    class_map: IntMatrix,
}

impl PicardBasis {
    /// Coordinates of the class of `d` in `basis`.
    pub fn class_of(&self, d: &TWeilDivisor) -> Result<Vec<BigInt>> {
        let x = self.cartier_coordinates(d)?.ok_or_else(|| {
            Error::NotCartier(format!("{d} is not Cartier"))
        })?;
        self.class_map.mul_vec(&x)
    }

    /// `sum c_j basis_j`.
    pub fn divisor_of_class(&self, class: &[BigInt]) -> TWeilDivisor {
        let n = self.principal_lattice.cols();
        self.basis
            .iter()
            .zip(class)
            .fold(TWeilDivisor::zero(n), |acc, (b, c)| acc.add(&b.scale(c)))
    }

    /// `d - sum c_j basis_j` where `c` is the class of `d`; always principal.
    pub fn reduce(&self, d: &TWeilDivisor) -> Result<TWeilDivisor> {
        let c = self.class_of(d)?;
        Ok(d.sub(&self.divisor_of_class(&c)))
    }

    fn cartier_coordinates(&self, d: &TWeilDivisor) -> Result<Option<Vec<BigInt>>> {
        if d.num_rays() != self.cartier_lattice.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cartier_lattice.cols(),
                found: d.num_rays(),
            });
        }
        solve_integral(&self.cartier_lattice.transpose(), d.coeffs())
    }
}

/// Cartier lattice: intersect, cone by cone, the conditions that
/// `G_sigma m = -a|_sigma` has an integral solution.
pub(crate) fn cartier_lattice(fan: &Fan) -> Result<IntMatrix> {
    let r = fan.num_rays();
    let mut basis = IntMatrix::identity(r);
    for (ci, cone) in fan.max_cones().iter().enumerate() {
        let snf = smith_normal_form(&fan.cone_matrix(ci));
        let rank = snf.rank();
        for i in 0..snf.left.rows() {
            let modulus = if i < rank { snf.diagonal[i].clone() } else { BigInt::zero() };
            if modulus.is_one() {
                continue;
            }
            // p(a) = sum_k left[i][k] * a_{ray k of cone}
            let mut p = vec![BigInt::zero(); r];
            for (k, &ray) in cone.ray_ids().iter().enumerate() {
                p[ray] += &snf.left[(i, k)];
            }
            if p.iter().all(Zero::is_zero) {
                continue;
            }
            let t = basis.rows();
            let w: Vec<BigInt> = (0..t).map(|j| dot(basis.row(j), &p)).collect();
            if modulus.is_zero() || w.iter().any(|x| !x.is_multiple_of(&modulus)) {
                let mut row = w;
                if !modulus.is_zero() {
                    row.push(modulus.clone());
                }
                let width = row.len();
                let k = integer_kernel(&IntMatrix::from_rows(vec![row], width)?);
                let xs = k.select_rows(&(0..t).collect::<Vec<_>>()).transpose();
                basis = hermite_normal_form(&xs.mul(&basis)?);
            }
        }
    }
    Ok(basis)
}

/// Computes `Pic X` for a complete fan.
///
/// The basis prefers prime divisors `D_i` (in ray order) whose classes extend
/// to a basis of `Pic`, and completes it with reduced lifts.
pub fn picard(fan: &Fan) -> Result<PicardBasis> {
    fan.require_complete()?;
    let n = fan.dim();
    let r = fan.num_rays();
    let c_lat = cartier_lattice(fan)?;
    let c = c_lat.rows();
    let principal = fan.ray_matrix().transpose(); // n x r, rows div(chi^{e_j})
    let cl_t = c_lat.transpose(); // r x c

    // Principal divisors in Cartier coordinates: columns of K (c x n).
    let mut k_cols = Vec::with_capacity(n);
    for j in 0..n {
        let x = solve_integral(&cl_t, principal.row(j))?
            .ok_or_else(|| Error::Internal("principal divisor outside the Cartier lattice".into()))?;
        k_cols.push(x);
    }
    let k = IntMatrix::from_columns(&k_cols, c)?;
    let snf = smith_normal_form(&k);
    if snf.rank() != n || snf.diagonal.iter().any(|d| !d.is_one()) {
        return Err(Error::Internal(format!(
            "Picard group has torsion or the rays do not span: invariant factors {:?}",
            snf.diagonal.iter().map(ToString::to_string).collect::<Vec<_>>()
        )));
    }
    let rho = c - n;
    let phi = snf.left.select_rows(&(n..c).collect::<Vec<_>>()); // rho x c

    // Greedy choice of prime divisors.
    let mut chosen: Vec<(TWeilDivisor, Vec<BigInt>)> = Vec::new();
    for i in 0..r {
        if chosen.len() == rho {
            break;
        }
        let d = TWeilDivisor::ray(r, i);
        let Some(x) = solve_integral(&cl_t, d.coeffs())? else { continue };
        let class = phi.mul_vec(&x)?;
        let mut rows: Vec<Vec<BigInt>> = chosen.iter().map(|(_, cl)| cl.clone()).collect();
        rows.push(class.clone());
        if extends_to_basis(&rows, rho)? {
            chosen.push((d, class));
        }
    }
    // Complete with a unimodular complement, lifted to small Cartier divisors.
    if chosen.len() < rho {
        let rows: Vec<Vec<BigInt>> = chosen.iter().map(|(_, cl)| cl.clone()).collect();
        let complement = if rows.is_empty() {
            IntMatrix::identity(rho)
        } else {
            smith_normal_form(&IntMatrix::from_rows(rows.clone(), rho)?)
                .v
                .select_rows(&(rows.len()..rho).collect::<Vec<_>>())
        };
        for j in 0..complement.rows() {
            let class = complement.row(j).to_vec();
            let x = solve_integral(&phi, &class)?
                .ok_or_else(|| Error::Internal("class map is not surjective".into()))?;
            let a = cl_t.mul_vec(&x)?;
            let d = normalize_lift(fan, TWeilDivisor::new(a))?;
            chosen.push((d, class));
        }
    }
    // Final class map: coordinates with respect to the chosen classes.
    let bc_t = IntMatrix::from_rows(chosen.iter().map(|(_, cl)| cl.clone()).collect(), rho)?
        .transpose();
    let mut map_cols = Vec::with_capacity(c);
    for j in 0..c {
        let col = phi.col(j);
        let z = solve_integral(&bc_t, &col)?
            .ok_or_else(|| Error::Internal("chosen classes do not form a basis".into()))?;
        map_cols.push(z);
    }
    let class_map = IntMatrix::from_columns(&map_cols, rho)?;
    Ok(PicardBasis {
        rank: rho,
        basis: chosen.into_iter().map(|(d, _)| d).collect(),
        principal_lattice: principal,
        cartier_lattice: c_lat,
        class_map,
    })
}

/// Rows are part of a basis of `Z^rho`.
fn extends_to_basis(rows: &[Vec<BigInt>], rho: usize) -> Result<bool> {
    let m = IntMatrix::from_rows(rows.to_vec(), rho)?;
    let s = smith_normal_form(&m);
    Ok(s.rank() == rows.len() && s.diagonal.iter().all(One::is_one))
}

/// Adds a principal divisor so that `d` vanishes on the first `n` linearly
/// independent rays, when that can be done integrally.
fn normalize_lift(fan: &Fan, d: TWeilDivisor) -> Result<TWeilDivisor> {
    let n = fan.dim();
    let mut picked: Vec<usize> = Vec::new();
    for i in 0..fan.num_rays() {
        let mut trial = picked.clone();
        trial.push(i);
        let vs: Vec<LatticeVector> = trial.iter().map(|&j| fan.ray(j).clone()).collect();
        if rational::rank(&IntMatrix::from_vectors(&vs, n)?) == trial.len() {
            picked = trial;
        }
        if picked.len() == n {
            break;
        }
    }
    let vs: Vec<LatticeVector> = picked.iter().map(|&j| fan.ray(j).clone()).collect();
    let rhs: Vec<BigInt> = picked.iter().map(|&j| d.coeff(j).clone()).collect();
    match solve_integral(&IntMatrix::from_vectors(&vs, n)?, &rhs)? {
        Some(m) => Ok(d.sub(&principal_divisor(fan, &LatticeVector::new(m))?)),
        None => Ok(d),
    }
}
