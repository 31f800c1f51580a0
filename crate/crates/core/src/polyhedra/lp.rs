use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::rational::{self, int_to_rat, Rat};
use crate::exactlin::{primitive_integer_multiple, rat_dot_int, IntMatrix};

/// A homogeneous system over `Q^nvars`:
/// `<s, x> >= 1` for strict rows, `<w, x> >= 0` for weak rows, `<e, x> = 0` for equalities.
///
/// Strict rows stand for `<s, x> > 0`; homogeneity makes the two equivalent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinSystem {
    pub nvars: usize,
    pub strict: Vec<Vec<BigInt>>,
    pub weak: Vec<Vec<BigInt>>,
    pub eq: Vec<Vec<BigInt>>,
}

/// Multipliers proving infeasibility: `sum strict_i s_i + sum weak_j w_j + sum eq_k e_k = 0`
/// with strict, weak multipliers nonnegative and at least one strict multiplier positive,
/// which yields `0 >= sum strict_i > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub strict: Vec<BigInt>,
    pub weak: Vec<BigInt>,
    pub eq: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(Vec<Rat>),
    Infeasible(FarkasCertificate),
}

impl LinSystem {
    pub fn new(nvars: usize) -> Self {
        LinSystem { nvars, ..Default::default() }
    }

    fn check_row(&self, row: &[BigInt]) -> Result<()> {
        if row.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: row.len() });
        }
        Ok(())
    }

    pub fn push_strict(&mut self, row: Vec<BigInt>) -> Result<usize> {
        self.check_row(&row)?;
        self.strict.push(row);
        Ok(self.strict.len() - 1)
    }

    pub fn push_weak(&mut self, row: Vec<BigInt>) -> Result<usize> {
        self.check_row(&row)?;
        self.weak.push(row);
        Ok(self.weak.len() - 1)
    }

    pub fn push_eq(&mut self, row: Vec<BigInt>) -> Result<usize> {
        self.check_row(&row)?;
        self.eq.push(row);
        Ok(self.eq.len() - 1)
    }

    /// True when `x` satisfies every row exactly.
    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        x.len() == self.nvars
            && self.strict.iter().all(|s| rat_dot_int(x, s) >= Rat::one())
            && self.weak.iter().all(|w| !rat_dot_int(x, w).is_negative())
            && self.eq.iter().all(|e| rat_dot_int(x, e).is_zero())
    }

    /// Decides feasibility exactly and returns either a witness or a certificate.
    pub fn solve(&self) -> Result<LpOutcome> {
        for row in self.strict.iter().chain(&self.weak).chain(&self.eq) {
            self.check_row(row)?;
        }
        let n = self.nvars;
        // Parametrize the equality space: x = N y.
        let basis: Vec<Vec<Rat>> = if self.eq.is_empty() {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
                .collect()
        } else {
            let e: Vec<Vec<Rat>> =
                self.eq.iter().map(|r| r.iter().map(int_to_rat).collect()).collect();
            rational::nullspace(&e, n)
        };
        let k = basis.len();
        let reduce = |row: &[BigInt]| -> (Vec<BigInt>, Rat) {
            let red: Vec<Rat> = basis.iter().map(|b| rat_dot_int(b, row)).collect();
            if red.iter().all(Zero::is_zero) {
                return (vec![BigInt::zero(); k], Rat::one());
            }
            let ints = primitive_integer_multiple(&red);
            // factor = ints / red, constant and positive
            let idx = red.iter().position(|q| !q.is_zero()).expect("nonzero");
            let factor = int_to_rat(&ints[idx]) / &red[idx];
            (ints, factor)
        };

        let mut strict_rows: Vec<Vec<BigInt>> = Vec::new();
        let mut strict_map: Vec<(usize, Rat)> = Vec::new(); // original -> (distinct row, scale)
        let mut seen: HashMap<Vec<BigInt>, usize> = HashMap::new();
        for s in &self.strict {
            let (row, f) = reduce(s);
            let id = *seen.entry(row.clone()).or_insert_with(|| {
                strict_rows.push(row);
                strict_rows.len() - 1
            });
            strict_map.push((id, f));
        }
        let mut weak_rows: Vec<Vec<BigInt>> = Vec::new();
        let mut weak_map: Vec<(usize, Rat)> = Vec::new();
        let mut seen: HashMap<Vec<BigInt>, usize> = HashMap::new();
        for w in &self.weak {
            let (row, f) = reduce(w);
            let id = *seen.entry(row.clone()).or_insert_with(|| {
                weak_rows.push(row);
                weak_rows.len() - 1
            });
            weak_map.push((id, f));
        }

        // Primal: y = y+ - y-, slacks t >= 0.
        //   strict: s.y - t = 1     weak: w.y - t = 0
        let ms = strict_rows.len();
        let mw = weak_rows.len();
        let nz = 2 * k + ms + mw;
        let mut a: Vec<Vec<Rat>> = Vec::with_capacity(ms + mw);
        let mut b: Vec<Rat> = Vec::with_capacity(ms + mw);
        for (i, row) in strict_rows.iter().chain(&weak_rows).enumerate() {
            let mut r = vec![Rat::zero(); nz];
            for (j, x) in row.iter().enumerate() {
                r[j] = int_to_rat(x);
                r[k + j] = -int_to_rat(x);
            }
            r[2 * k + i] = -Rat::one();
            a.push(r);
            b.push(if i < ms { Rat::one() } else { Rat::zero() });
        }
        if let Some(z) = phase_one(&a, &b, nz) {
            let y: Vec<Rat> = (0..k).map(|j| &z[j] - &z[k + j]).collect();
            let mut x: Vec<Rat> = (0..n)
                .map(|i| (0..k).fold(Rat::zero(), |acc, j| acc + &y[j] * &basis[j][i]))
                .collect();
            // Rescale so every strict row reaches 1.
            if let Some(min) = self.strict.iter().map(|s| rat_dot_int(&x, s)).min() {
                if !min.is_positive() {
                    return Err(Error::Internal("LP witness not strictly positive".into()));
                }
                if min < Rat::one() {
                    let f = min.recip();
                    x.iter_mut().for_each(|v| *v *= &f);
                }
            }
            if !self.satisfied_by(&x) {
                return Err(Error::Internal("LP witness fails verification".into()));
            }
            return Ok(LpOutcome::Feasible(x));
        }

        // Alternative system: lambda, mu >= 0 with sum lambda_i s_i + sum mu_j w_j = 0
        // and sum lambda_i = 1.
        let mut a: Vec<Vec<Rat>> = Vec::with_capacity(k + 1);
        for c in 0..k {
            let mut r = vec![Rat::zero(); ms + mw];
            for (i, row) in strict_rows.iter().chain(&weak_rows).enumerate() {
                r[i] = int_to_rat(&row[c]);
            }
            a.push(r);
        }
        let mut total = vec![Rat::zero(); ms + mw];
        total[..ms].iter_mut().for_each(|v| *v = Rat::one());
        a.push(total);
        let mut b = vec![Rat::zero(); k];
        b.push(Rat::one());
        let lam = phase_one(&a, &b, ms + mw)
            .ok_or_else(|| Error::Internal("neither the system nor its alternative is feasible".into()))?;

        // Spread each distinct-row multiplier onto its first original row.
        let mut strict_mult = vec![Rat::zero(); self.strict.len()];
        let mut used = vec![false; ms];
        for (orig, (id, f)) in strict_map.iter().enumerate() {
            if !used[*id] {
                used[*id] = true;
                strict_mult[orig] = &lam[*id] * f;
            }
        }
        let mut weak_mult = vec![Rat::zero(); self.weak.len()];
        let mut used = vec![false; mw];
        for (orig, (id, f)) in weak_map.iter().enumerate() {
            if !used[*id] {
                used[*id] = true;
                weak_mult[orig] = &lam[ms + *id] * f;
            }
        }
        // Residual lies in the row space of the equalities.
        let mut residual = vec![Rat::zero(); n];
        for (m, row) in strict_mult.iter().zip(&self.strict).chain(weak_mult.iter().zip(&self.weak)) {
            if m.is_zero() {
                continue;
            }
            for (r, x) in residual.iter_mut().zip(row) {
                *r += m * int_to_rat(x);
            }
        }
        let eq_mult = if self.eq.is_empty() {
            vec![]
        } else {
            let et: Vec<Vec<Rat>> = (0..n)
                .map(|i| self.eq.iter().map(|e| int_to_rat(&e[i])).collect())
                .collect();
            let neg: Vec<Rat> = residual.iter().map(|r| -r.clone()).collect();
            rational::solve(&et, &neg, self.eq.len())
                .ok_or_else(|| Error::Internal("Farkas residual outside equality span".into()))?
        };
        let cert = FarkasCertificate::from_rational(&strict_mult, &weak_mult, &eq_mult);
        if !cert.verifies(self) {
            return Err(Error::Internal("Farkas certificate fails verification".into()));
        }
        Ok(LpOutcome::Infeasible(cert))
    }

    /// A witness if the system is feasible.
    pub fn feasible(&self) -> Result<Option<Vec<Rat>>> {
        Ok(match self.solve()? {
            LpOutcome::Feasible(x) => Some(x),
            LpOutcome::Infeasible(_) => None,
        })
    }
}

impl FarkasCertificate {
    fn from_rational(strict: &[Rat], weak: &[Rat], eq: &[Rat]) -> Self {
        let all: Vec<Rat> = strict.iter().chain(weak).chain(eq).cloned().collect();
        let ints = primitive_integer_multiple(&all);
        let (s, rest) = ints.split_at(strict.len());
        let (w, e) = rest.split_at(weak.len());
        FarkasCertificate { strict: s.to_vec(), weak: w.to_vec(), eq: e.to_vec() }
    }

    /// Checks the certificate against the system it claims to refute.
    pub fn verifies(&self, sys: &LinSystem) -> bool {
        if self.strict.len() != sys.strict.len()
            || self.weak.len() != sys.weak.len()
            || self.eq.len() != sys.eq.len()
        {
            return false;
        }
        if self.strict.iter().chain(&self.weak).any(Signed::is_negative) {
            return false;
        }
        if !self.strict.iter().any(Signed::is_positive) {
            return false;
        }
        let mut total = vec![BigInt::zero(); sys.nvars];
        let pairs = self
            .strict
            .iter()
            .zip(&sys.strict)
            .chain(self.weak.iter().zip(&sys.weak))
            .chain(self.eq.iter().zip(&sys.eq));
        for (m, row) in pairs {
            for (t, x) in total.iter_mut().zip(row) {
                *t += m * x;
            }
        }
        total.iter().all(Zero::is_zero)
    }

    /// `sum` of the strict multipliers: the right-hand side of the contradiction `0 >= sum`.
    pub fn strict_total(&self) -> BigInt {
        self.strict.iter().sum()
    }
}

/// `{x : W x >= 0} = {0}`, decided by a trivial kernel plus an infeasible LP.
pub fn cone_is_zero(rows: &IntMatrix) -> Result<bool> {
    let n = rows.cols();
    if n == 0 {
        return Ok(true);
    }
    if rational::rank(rows) < n {
        return Ok(false);
    }
    let mut sys = LinSystem::new(n);
    let mut sum = vec![BigInt::zero(); n];
    for r in rows.row_vectors() {
        for (s, x) in sum.iter_mut().zip(&r) {
            *s += x;
        }
        sys.push_weak(r)?;
    }
    sys.push_strict(sum)?;
    Ok(sys.feasible()?.is_none())
}

/// Phase one of the simplex method with Bland's rule:
/// a nonnegative `z` with `A z = b` (requires `b >= 0`), or `None`.
pub(crate) fn phase_one(a: &[Vec<Rat>], b: &[Rat], nz: usize) -> Option<Vec<Rat>> {
    let m = a.len();
    if m == 0 {
        return Some(vec![Rat::zero(); nz]);
    }
    let ncols = nz + m;
    // tableau rows: [A | I | b]
    let mut t: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(ncols + 1);
            let flip = b[i].is_negative();
            for x in &a[i] {
                row.push(if flip { -x.clone() } else { x.clone() });
            }
            for j in 0..m {
                row.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            row.push(if flip { -b[i].clone() } else { b[i].clone() });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (nz..ncols).collect();
    // reduced costs for minimizing the artificial sum
    let mut cost: Vec<Rat> = vec![Rat::zero(); ncols + 1];
    for row in &t {
        for j in 0..nz {
            cost[j] -= &row[j];
        }
        cost[ncols] -= &row[ncols];
    }
    while let Some(enter) = (0..ncols).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][ncols] / &t[i][enter];
            leave = match leave {
                Some((li, lr)) if lr < ratio || (lr == ratio && basis[li] < basis[i]) => Some((li, lr)),
                _ => Some((i, ratio)),
            };
        }
        let (li, _) = leave.expect("phase one objective is bounded below");
        pivot(&mut t, &mut cost, li, enter);
        basis[li] = enter;
    }
    if !cost[ncols].is_zero() {
        return None;
    }
    let mut z = vec![Rat::zero(); nz];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nz {
            z[bv] = t[i][ncols].clone();
        }
    }
    Some(z)
}

fn pivot(t: &mut [Vec<Rat>], cost: &mut [Rat], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for x in t[r].iter_mut() {
        *x *= &inv;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, p) in row.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (x, p) in cost.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
    }
}

/// Least common multiple of denominators, used to turn a rational witness into an integral one.
pub fn common_denominator(xs: &[Rat]) -> BigInt {
    xs.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()))
}
