use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// Smith normal form `A = U * D * V` together with the inverse transforms
/// `left * A * right = D`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    /// Diagonal of `D`, length `min(rows, cols)`. Nonnegative, each divides the next.
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub left: IntMatrix,
    pub right: IntMatrix,
    rows: usize,
    cols: usize,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !d.is_zero()).count()
    }

    /// The full `rows x cols` matrix `D`.
    pub fn d_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.rows, self.cols);
        for (i, x) in self.diagonal.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }
}

struct Work {
    d: IntMatrix,
    left: IntMatrix,
    u: IntMatrix,
    right: IntMatrix,
    v: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.left.swap_rows(a, b);
        self.u.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.right.swap_cols(a, b);
        self.v.swap_rows(a, b);
    }

    /// row[t] += k * row[s]
    fn add_row(&mut self, t: usize, s: usize, k: &BigInt) {
        self.d.add_row_multiple(t, s, k);
        self.left.add_row_multiple(t, s, k);
        self.u.add_col_multiple(s, t, &-k);
    }

    /// col[t] += k * col[s]
    fn add_col(&mut self, t: usize, s: usize, k: &BigInt) {
        self.d.add_col_multiple(t, s, k);
        self.right.add_col_multiple(t, s, k);
        self.v.add_row_multiple(s, t, &-k);
    }

    fn negate_row(&mut self, t: usize) {
        self.d.negate_row(t);
        self.left.negate_row(t);
        self.u.negate_col(t);
    }

    fn smallest_nonzero(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.d.rows() {
            for j in t..self.d.cols() {
                let x = &self.d[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.d[(bi, bj)].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

/// Smith normal form by smallest-entry pivoting.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (r, c) = (a.rows(), a.cols());
    let mut w = Work {
        d: a.clone(),
        left: IntMatrix::identity(r),
        u: IntMatrix::identity(r),
        right: IntMatrix::identity(c),
        v: IntMatrix::identity(c),
    };
    let n = r.min(c);
    for t in 0..n {
        while let Some((pi, pj)) = w.smallest_nonzero(t) {
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..r {
                if !w.d[(i, t)].is_zero() {
                    let q = w.d[(i, t)].div_floor(&p);
                    w.add_row(i, t, &-q);
                    clean &= w.d[(i, t)].is_zero();
                }
            }
            for j in t + 1..c {
                if !w.d[(t, j)].is_zero() {
                    let q = w.d[(t, j)].div_floor(&p);
                    w.add_col(j, t, &-q);
                    clean &= w.d[(t, j)].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // Pivot must divide the rest of the block.
            let bad = (t + 1..r)
                .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                .find(|&(i, j)| !w.d[(i, j)].is_multiple_of(&p));
            match bad {
                Some((i, _)) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.d[(t, t)].is_negative() {
            w.negate_row(t);
        }
    }
    let diagonal = (0..n).map(|i| w.d[(i, i)].clone()).collect();
    SnfResult { diagonal, u: w.u, v: w.v, left: w.left, right: w.right, rows: r, cols: c }
}

/// Some integral `x` with `A x = b`, or `None` when no integral solution exists.
pub fn solve_integral(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let snf = smith_normal_form(a);
    Ok(solve_with_snf(&snf, b))
}

fn solve_with_snf(snf: &SnfResult, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let c = snf.left.mul_vec(b).expect("shape checked");
    let rank = snf.rank();
    let mut y = vec![BigInt::zero(); snf.cols];
    for (i, ci) in c.iter().enumerate() {
        if i < rank {
            let (q, rem) = ci.div_rem(&snf.diagonal[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(snf.right.mul_vec(&y).expect("shape checked"))
}

/// Basis of the integer kernel `{x in Z^cols : A x = 0}` as the columns of the result.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    let cols: Vec<usize> = (rank..a.cols()).collect();
    let basis = snf.right.select_columns(&cols);
    // Canonical, small representatives.
    super::hnf::hermite_normal_form(&basis.transpose()).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_invariants(a: &IntMatrix) -> SnfResult {
        let s = smith_normal_form(a);
        let recon = s.u.mul(&s.d_matrix()).unwrap().mul(&s.v).unwrap();
        assert_eq!(&recon, a);
        assert_eq!(&s.left.mul(a).unwrap().mul(&s.right).unwrap(), &s.d_matrix());
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        for w in s.diagonal.windows(2) {
            if !w[0].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            } else {
                assert!(w[1].is_zero());
            }
        }
        s
    }

    #[test]
    fn diag_2_3() {
        let s = check_invariants(&IntMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn identity_3() {
        let s = check_invariants(&IntMatrix::identity(3));
        assert!(s.diagonal.iter().all(|d| *d == BigInt::from(1)));
    }

    #[test]
    fn ad_matrix_has_three_invariant_factors() {
        let a = IntMatrix::from_i64_rows(&[
            &[1, -1, 0, 1, -1, 0],
            &[0, -1, 2, 0, -3, 2],
            &[-2, 0, 1, -1, 0, 2],
        ]);
        let s = check_invariants(&a);
        assert_eq!(s.rank(), 3);
        assert_eq!(s.diagonal.iter().filter(|d| !d.is_zero()).count(), 3);
    }

    #[test]
    fn solve_identity() {
        let x = solve_integral(&IntMatrix::identity(2), &[5.into(), 7.into()]).unwrap();
        assert_eq!(x, Some(vec![5.into(), 7.into()]));
    }

    #[test]
    fn solve_parity_obstruction() {
        let a = IntMatrix::from_i64_rows(&[&[2]]);
        assert_eq!(solve_integral(&a, &[1.into()]).unwrap(), None);
    }

    #[test]
    fn solve_cartier_datum_of_d7() {
        // rows v4, v5, v7; <m,v4> = <m,v5> = 0, <m,v7> = 1
        let a = IntMatrix::from_i64_rows(&[&[1, 0, -1], &[0, 1, -1], &[0, 0, -1]]);
        let x = solve_integral(&a, &[0.into(), 0.into(), 1.into()]).unwrap();
        // Unique since the matrix is invertible; compare against (1,1,1) up to sign convention.
        assert_eq!(x, Some(vec![(-1).into(), (-1).into(), (-1).into()]));
        let x = solve_integral(&a, &[0.into(), 0.into(), (-1).into()]).unwrap();
        assert_eq!(x, Some(vec![1.into(), 1.into(), 1.into()]));
    }

    #[test]
    fn kernel_is_annihilated() {
        let a = IntMatrix::from_i64_rows(&[&[1, 0, 1, -1], &[0, 1, 1, -1]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).unwrap().row_vectors().iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn empty_shapes() {
        let s = smith_normal_form(&IntMatrix::zeros(0, 3));
        assert_eq!(s.rank(), 0);
        assert_eq!(integer_kernel(&IntMatrix::zeros(0, 3)).cols(), 3);
    }
}
