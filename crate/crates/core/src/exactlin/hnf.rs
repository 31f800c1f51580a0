use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// Row-style Hermite normal form of the lattice spanned by the rows of `a`.
///
/// Zero rows are dropped, so the result is a basis of the row lattice: echelon
/// form with positive pivots and entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let (rows, cols) = (h.rows(), h.cols());
    let mut p = 0;
    for j in 0..cols {
        if p == rows {
            break;
        }
        // Euclid down column j over rows p.. until a single nonzero remains.
        loop {
            let mut best: Option<usize> = None;
            for i in p..rows {
                if h[(i, j)].is_zero() {
                    continue;
                }
                if best.is_none_or(|b| h[(i, j)].abs() < h[(b, j)].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(p, b);
            let mut done = true;
            for i in p + 1..rows {
                if !h[(i, j)].is_zero() {
                    let q = h[(i, j)].div_floor(&h[(p, j)]);
                    h.add_row_multiple(i, p, &-q);
                    done &= h[(i, j)].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if h[(p, j)].is_zero() {
            continue;
        }
        if h[(p, j)].is_negative() {
            h.negate_row(p);
        }
        let pivot = h[(p, j)].clone();
        for i in 0..p {
            let q = h[(i, j)].div_floor(&pivot);
            if !q.is_zero() {
                h.add_row_multiple(i, p, &-q);
            }
        }
        p += 1;
    }
    let keep: Vec<usize> = (0..p).collect();
    h.select_rows(&keep)
}

/// True when `v` lies in the row lattice described by a Hermite basis.
pub fn in_row_lattice(hnf: &IntMatrix, v: &[BigInt]) -> bool {
    let mut r = v.to_vec();
    for i in 0..hnf.rows() {
        let Some(j) = (0..hnf.cols()).find(|&j| !hnf[(i, j)].is_zero()) else {
            continue;
        };
        let (q, rem) = r[j].div_rem(&hnf[(i, j)]);
        if !rem.is_zero() {
            return false;
        }
        for (k, x) in r.iter_mut().enumerate() {
            *x -= &q * &hnf[(i, k)];
        }
    }
    r.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_of_2x2() {
        let a = IntMatrix::from_i64_rows(&[&[2, 4], &[3, 5]]);
        let h = hermite_normal_form(&a);
        // det = -2: lattice basis (1,1),(0,2)
        assert_eq!(h, IntMatrix::from_i64_rows(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn hnf_drops_dependent_rows() {
        let a = IntMatrix::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 0]]);
        let h = hermite_normal_form(&a);
        assert_eq!(h.rows(), 1);
        assert!(in_row_lattice(&h, &[3.into(), 6.into(), 9.into()]));
        assert!(!in_row_lattice(&h, &[1.into(), 2.into(), 4.into()]));
    }
}
