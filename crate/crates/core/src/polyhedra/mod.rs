//! Exact polyhedral cone kernel: dual descriptions, membership and rational
//! feasibility of homogeneous systems with strict inequalities.

mod cone;
mod lp;

pub use cone::{dual_description, membership, HRepCone};
pub use lp::{common_denominator, cone_is_zero, FarkasCertificate, LinSystem, LpOutcome};
#[cfg(test)]
use lp::phase_one;

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::exactlin::rational::{int_to_rat, Rat};
    use crate::exactlin::{IntMatrix, LatticeVector, RationalVector};
    use num_bigint::BigInt;
    use num_traits::{One, Signed, Zero};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Membership via an explicit nonnegative combination of the generators.
    fn in_cone_by_lp(gens: &[LatticeVector], x: &[BigInt]) -> bool {
        // sum l_i g_i - t x = 0, l >= 0, t >= 1
        let n = x.len();
        let k = gens.len();
        let a: Vec<Vec<Rat>> = (0..n)
            .map(|c| {
                let mut row: Vec<Rat> = gens.iter().map(|g| int_to_rat(&g[c])).collect();
                row.push(-int_to_rat(&x[c]));
                row.push(Rat::zero());
                row
            })
            .chain(std::iter::once({
                let mut row = vec![Rat::zero(); k + 2];
                row[k] = Rat::one();
                row[k + 1] = -Rat::one();
                row
            }))
            .collect();
        let mut b = vec![Rat::zero(); n];
        b.push(Rat::one());
        phase_one(&a, &b, k + 2).is_some()
    }

    fn check_cone(gens: &[LatticeVector], seed: u64) {
        let dim = gens[0].dim();
        let h = dual_description(dim, gens).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            // Mix random points with points near the generators to hit boundaries.
            let x: Vec<BigInt> = if rng.gen_bool(0.5) {
                (0..dim).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect()
            } else {
                let mut acc = vec![BigInt::zero(); dim];
                for g in gens {
                    let c: i64 = rng.gen_range(-1..=3);
                    for (a, gi) in acc.iter_mut().zip(g.coords()) {
                        *a += gi * c;
                    }
                }
                acc
            };
            let q = RationalVector(x.iter().map(int_to_rat).collect());
            assert_eq!(membership(&h, &q).unwrap(), in_cone_by_lp(gens, &x), "point {x:?}");
        }
    }

    #[test]
    fn membership_agrees_with_generator_lp() {
        let lv = LatticeVector::from_i64;
        check_cone(&[lv(&[1, 0, 1]), lv(&[0, 1, 1]), lv(&[1, 0, -1]), lv(&[0, 1, -1])], 1);
        check_cone(&[lv(&[0, 1, 1]), lv(&[-1, -2, 1]), lv(&[0, 1, -1]), lv(&[-1, -1, -1])], 2);
        check_cone(&[lv(&[1, 0, -1]), lv(&[0, 1, -1]), lv(&[0, 0, -1])], 3);
        check_cone(&[lv(&[1, 0, 0]), lv(&[0, 1, 0])], 4);
        check_cone(&[lv(&[1, 0]), lv(&[-1, 0]), lv(&[0, 1])], 5);
    }

    proptest! {
        #[test]
        fn feasible_witness_or_certificate(
            rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..7),
            kinds in prop::collection::vec(0u8..3, 7),
        ) {
            let mut sys = LinSystem::new(3);
            for (r, kind) in rows.iter().zip(&kinds) {
                let r: Vec<BigInt> = r.iter().map(|&x| x.into()).collect();
                match kind {
                    0 => { sys.push_strict(r).unwrap(); }
                    1 => { sys.push_weak(r).unwrap(); }
                    _ => { sys.push_eq(r).unwrap(); }
                }
            }
            match sys.solve().unwrap() {
                LpOutcome::Feasible(x) => prop_assert!(sys.satisfied_by(&x)),
                LpOutcome::Infeasible(c) => prop_assert!(c.verifies(&sys)),
            }
        }

        #[test]
        fn zero_cone_rejects_random_points(
            rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 2), 0..5),
            seed in any::<u64>(),
        ) {
            let m = IntMatrix::from_rows(
                rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
                2,
            ).unwrap();
            if cone_is_zero(&m).unwrap() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..1000 {
                    let x: Vec<BigInt> = (0..2).map(|_| BigInt::from(rng.gen_range(-50..=50))).collect();
                    if x.iter().all(Zero::is_zero) { continue; }
                    let wx = m.mul_vec(&x).unwrap();
                    prop_assert!(wx.iter().any(Signed::is_negative));
                }
            }
        }
    }
}
