//! Exact integer and rational linear algebra.
//!
//! Everything here is arbitrary precision. There is no floating point anywhere
//! in the engine.

mod hnf;
mod matrix;
pub mod rational;
mod snf;

pub use hnf::{hermite_normal_form, in_row_lattice};
pub use matrix::{primitive, IntMatrix, LatticeVector, RationalVector};
pub(crate) use matrix::{dot, primitive_integer_multiple, rat_dot_int};
pub use rational::{rank, Rat};
pub use snf::{integer_kernel, smith_normal_form, solve_integral, SnfResult};

#[cfg(test)]
mod proptests {
    use super::*;
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{Signed, Zero};
    use proptest::prelude::*;

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            prop::collection::vec(-6i64..=6, r * c).prop_map(move |xs| {
                let rows: Vec<Vec<BigInt>> =
                    xs.chunks(c).map(|ch| ch.iter().map(|&x| x.into()).collect()).collect();
                IntMatrix::from_rows(rows, c).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn snf_reconstructs(a in small_matrix()) {
            let s = smith_normal_form(&a);
            let recon = s.u.mul(&s.d_matrix()).unwrap().mul(&s.v).unwrap();
            prop_assert_eq!(&recon, &a);
            prop_assert!(s.u.determinant().unwrap().abs() == BigInt::from(1));
            prop_assert!(s.v.determinant().unwrap().abs() == BigInt::from(1));
            for w in s.diagonal.windows(2) {
                prop_assert!(!w[0].is_negative());
                if !w[0].is_zero() { prop_assert!(w[1].is_multiple_of(&w[0])); }
                else { prop_assert!(w[1].is_zero()); }
            }
            prop_assert_eq!(s.rank(), rank(&a));
        }

        #[test]
        fn rank_is_transpose_invariant(a in small_matrix()) {
            prop_assert_eq!(rank(&a), rank(&a.transpose()));
        }

        #[test]
        fn primitive_is_scale_invariant(
            v in prop::collection::vec(-20i64..=20, 1..5),
            k in 1i64..9,
        ) {
            let v = LatticeVector::from_i64(&v);
            prop_assume!(!v.is_zero());
            let p = primitive(&v).unwrap();
            prop_assert!(p.is_primitive());
            prop_assert_eq!(primitive(&v.scale(&BigInt::from(k))).unwrap(), p);
        }

        #[test]
        fn solve_integral_is_sound(a in small_matrix(), seed in prop::collection::vec(-4i64..=4, 4)) {
            // b in the image: always solvable
            let x0: Vec<BigInt> = (0..a.cols()).map(|j| seed[j % seed.len()].into()).collect();
            let b = a.mul_vec(&x0).unwrap();
            let x = solve_integral(&a, &b).unwrap();
            prop_assert!(x.is_some());
            prop_assert_eq!(a.mul_vec(&x.unwrap()).unwrap(), b.clone());
            // perturbed right-hand side: either solvable exactly, or the rational system or
            // an invariant factor obstructs it
            let mut b2 = b;
            b2[0] += 1;
            match solve_integral(&a, &b2).unwrap() {
                Some(x) => prop_assert_eq!(a.mul_vec(&x).unwrap(), b2),
                None => {
                    let ar = rational::int_rows_to_rat(&a);
                    let br: Vec<Rat> = b2.iter().map(rational::int_to_rat).collect();
                    let rat_sol = rational::solve(&ar, &br, a.cols());
                    if rat_sol.is_some() {
                        let s = smith_normal_form(&a);
                        let c = s.left.mul_vec(&b2).unwrap();
                        let obstructed = c.iter().enumerate().any(|(i, ci)| {
                            i < s.rank() && !ci.is_multiple_of(&s.diagonal[i])
                        });
                        prop_assert!(obstructed);
                    }
                }
            }
        }
    }
}
