//! Fans from the literature and classical test varieties, each with the
//! claims the engine must reproduce.

use crate::error::{Error, Result};
use crate::exactlin::{primitive, LatticeVector};
use crate::fan::{build_fan, product, stellar_subdivide, Fan};
use crate::intersection::Verdict;
use crate::report::AnalysisReport;

fn s<T: ToString>(x: Option<T>) -> Option<String> {
    x.map(|v| v.to_string())
}

/// Partial analysis report; `None` fields are not asserted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpectedClaims {
    pub rays: Option<usize>,
    pub max_cones: Option<usize>,
    pub walls: Option<usize>,
    pub complete: Option<bool>,
    pub q_factorial: Option<bool>,
    pub smooth: Option<bool>,
    pub gorenstein: Option<bool>,
    pub projective: Option<bool>,
    pub pic_rank: Option<usize>,
    pub numerical_rank: Option<usize>,
    pub ne_equals_n1: Option<bool>,
    pub verdict: Option<Verdict>,
}

impl ExpectedClaims {
    /// Field-by-field comparison; returns one message per mismatch.
    pub fn mismatches(&self, r: &AnalysisReport) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |name: &str, want: Option<String>, got: String| {
            if let Some(w) = want {
                if w != got {
                    out.push(format!("{name}: expected {w}, computed {got}"));
                }
            }
        };
        check("rays", s(self.rays), r.fan.rays.to_string());
        check("max_cones", s(self.max_cones), r.fan.max_cones.to_string());
        check("walls", s(self.walls), r.fan.walls.to_string());
        check("complete", s(self.complete), r.flags.complete.to_string());
        check("q_factorial", s(self.q_factorial), r.flags.q_factorial.to_string());
        check("smooth", s(self.smooth), r.flags.smooth.to_string());
        check("gorenstein", s(self.gorenstein), r.flags.gorenstein.to_string());
        check("projective", s(self.projective), r.projective.projective.to_string());
        check("pic_rank", s(self.pic_rank), r.pic_rank.to_string());
        check("numerical_rank", s(self.numerical_rank), r.numerical_rank.to_string());
        check("ne_equals_n1", s(self.ne_equals_n1), r.ne_equals_n1.to_string());
        check("kleiman", self.verdict.map(|v| v.as_str().to_string()), r.kleiman.verdict.as_str().to_string());
        out
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub fan: Fan,
    pub expected: ExpectedClaims,
}

fn lv(v: &[i64]) -> LatticeVector {
    LatticeVector::from_i64(v)
}

/// Cones given with 1-based ray numbers, as in the literature.
fn fan_1based(dim: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Result<Fan> {
    build_fan(
        dim,
        rays.iter().map(|r| lv(r)).collect(),
        cones.iter().map(|c| c.iter().map(|i| i - 1).collect()).collect(),
    )
}

const P_RAYS: [&[i64]; 6] = [&[1, 0, 1], &[0, 1, 1], &[-1, -1, 1], &[1, 0, -1], &[0, 1, -1], &[-1, -1, -1]];
const A_RAYS: [&[i64]; 7] =
    [&[1, 0, 1], &[0, 1, 1], &[-1, -2, 1], &[1, 0, -1], &[0, 1, -1], &[-1, -1, -1], &[0, 0, -1]];

pub fn delta_p() -> Fan {
    fan_1based(3, &P_RAYS, &[&[1, 2, 4], &[2, 4, 5], &[2, 3, 5, 6], &[1, 3, 4, 6], &[1, 2, 3], &[4, 5, 6]])
        .expect("valid fixture")
}

pub fn delta_q() -> Fan {
    fan_1based(3, &P_RAYS, &[&[1, 2, 4, 5], &[2, 3, 5, 6], &[1, 3, 4, 6], &[1, 2, 3], &[4, 5, 6]])
        .expect("valid fixture")
}

pub fn delta_a() -> Fan {
    fan_1based(3, &A_RAYS[..6], &[&[1, 2, 4, 5], &[2, 3, 5, 6], &[1, 3, 4, 6], &[1, 2, 3], &[4, 5, 6]])
        .expect("valid fixture")
}

/// The table printed for `Delta_B`, verbatim (1-based). It lists
/// `<v4,v5,v6>` next to the three cones around `v7 = (v4+v5+v6)/3`, so it
/// overlaps itself and is rejected by validation.
pub const DELTA_B_TABLE: [&[usize]; 8] = [
    &[1, 2, 4, 5],
    &[2, 3, 5, 6],
    &[1, 3, 4, 6],
    &[1, 2, 3],
    &[4, 5, 6],
    &[4, 5, 7],
    &[4, 6, 7],
    &[5, 6, 7],
];

pub fn delta_b_verbatim() -> Result<Fan> {
    fan_1based(3, &A_RAYS, &DELTA_B_TABLE)
}

/// `Delta_B` as the blow-up of `Delta_A` along `v7`: the table without `<v4,v5,v6>`.
pub fn delta_b() -> Fan {
    let cones: Vec<&[usize]> = DELTA_B_TABLE.iter().copied().filter(|c| *c != [4, 5, 6]).collect();
    fan_1based(3, &A_RAYS, &cones).expect("valid fixture")
}

/// Projective space: rays `e_1, ..., e_n, -(e_1 + ... + e_n)`.
pub fn pn(n: usize) -> Result<Fan> {
    if n == 0 {
        return Err(Error::UnknownCatalogEntry("pn(0)".into()));
    }
    let mut rays: Vec<LatticeVector> = (0..n).map(|k| LatticeVector::unit(n, k)).collect();
    rays.push(LatticeVector::from_i64(&vec![-1; n]));
    let cones = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
    build_fan(n, rays, cones)
}

/// Hirzebruch surface `F_a`: rays `(1,0), (0,1), (-1,a), (0,-1)`.
pub fn hirzebruch(a: i64) -> Result<Fan> {
    build_fan(
        2,
        vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, a]), lv(&[0, -1])],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
}

pub fn weighted_p112() -> Fan {
    build_fan(2, vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -2])], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
        .expect("valid fixture")
}

/// `X_0 = X_A`, and `X_k` blows up `X_{k-1}` along `v_{k+6}`, where
/// `v_j` is the primitive vector on `v_4 + v_5 + v_{j-1}`.
pub fn xk_tower(k: usize) -> Result<Fan> {
    let mut fan = delta_a();
    let v45 = lv(A_RAYS[3]).add(&lv(A_RAYS[4]));
    let mut prev = lv(A_RAYS[5]);
    for _ in 0..k {
        let next = primitive(&v45.add(&prev))?;
        fan = stellar_subdivide(&fan, &next)?;
        prev = next;
    }
    Ok(fan)
}

/// `k`-fold product of a fan with itself.
pub fn product_power(fan: &Fan, k: usize) -> Result<Fan> {
    if k == 0 {
        return Err(Error::InvalidFan("product power needs k >= 1".into()));
    }
    let mut out = fan.clone();
    for _ in 1..k {
        out = product(&out, fan)?;
    }
    Ok(out)
}

/// Names accepted by [`get`]; parametrised families use `name:k`.
pub const NAMES: &[&str] = &[
    "delta_P",
    "delta_Q",
    "delta_A",
    "delta_B",
    "pn:<n>",
    "p1xp1",
    "hirzebruch:<a>",
    "weighted_p112",
    "tower:<k>",
    "delta_P_x_p1",
];

fn split_param(name: &str) -> Option<(&str, &str)> {
    if let Some((base, rest)) = name.split_once('(') {
        return rest.strip_suffix(')').map(|p| (base, p));
    }
    name.split_once(':')
}

pub fn get(name: &str) -> Result<CatalogEntry> {
    let unknown = || Error::UnknownCatalogEntry(name.to_string());
    let e = ExpectedClaims::default;
    let (fan, expected) = match name {
        "delta_P" => (
            delta_p(),
            ExpectedClaims {
                rays: Some(6),
                max_cones: Some(6),
                complete: Some(true),
                q_factorial: Some(false),
                smooth: Some(false),
                gorenstein: Some(true),
                projective: Some(false),
                pic_rank: Some(1),
                numerical_rank: Some(1),
                ne_equals_n1: Some(false),
                verdict: Some(Verdict::FailsWithCertificate),
                ..e()
            },
        ),
        "delta_Q" => (
            delta_q(),
            ExpectedClaims {
                rays: Some(6),
                max_cones: Some(5),
                complete: Some(true),
                q_factorial: Some(false),
                gorenstein: Some(true),
                projective: Some(true),
                pic_rank: Some(1),
                numerical_rank: Some(1),
                ne_equals_n1: Some(false),
                verdict: Some(Verdict::HoldsProjective),
                ..e()
            },
        ),
        "delta_A" => (
            delta_a(),
            ExpectedClaims {
                rays: Some(6),
                max_cones: Some(5),
                walls: Some(9),
                complete: Some(true),
                q_factorial: Some(false),
                projective: Some(false),
                pic_rank: Some(0),
                numerical_rank: Some(0),
                ne_equals_n1: Some(true),
                verdict: Some(Verdict::NotApplicable),
                ..e()
            },
        ),
        "delta_B" => (
            delta_b(),
            ExpectedClaims {
                rays: Some(7),
                max_cones: Some(7),
                complete: Some(true),
                q_factorial: Some(false),
                projective: Some(false),
                pic_rank: Some(1),
                numerical_rank: Some(1),
                ne_equals_n1: Some(true),
                verdict: Some(Verdict::NoPositiveDivisor),
                ..e()
            },
        ),
        "p1xp1" => (
            product(&pn(1)?, &pn(1)?)?,
            ExpectedClaims {
                rays: Some(4),
                max_cones: Some(4),
                smooth: Some(true),
                projective: Some(true),
                pic_rank: Some(2),
                numerical_rank: Some(2),
                ne_equals_n1: Some(false),
                verdict: Some(Verdict::HoldsProjective),
                ..e()
            },
        ),
        "weighted_p112" => (
            weighted_p112(),
            ExpectedClaims {
                rays: Some(3),
                q_factorial: Some(true),
                smooth: Some(false),
                gorenstein: Some(true),
                projective: Some(true),
                pic_rank: Some(1),
                numerical_rank: Some(1),
                ..e()
            },
        ),
        "delta_P_x_p1" => (
            product(&delta_p(), &pn(1)?)?,
            ExpectedClaims {
                rays: Some(8),
                max_cones: Some(12),
                complete: Some(true),
                q_factorial: Some(false),
                projective: Some(false),
                pic_rank: Some(2),
                ..e()
            },
        ),
        _ => {
            let (base, param) = split_param(name).ok_or_else(unknown)?;
            match base {
                "pn" => {
                    let n: usize = param.parse().map_err(|_| unknown())?;
                    (
                        pn(n)?,
                        ExpectedClaims {
                            rays: Some(n + 1),
                            max_cones: Some(n + 1),
                            smooth: Some(true),
                            projective: Some(true),
                            pic_rank: Some(1),
                            numerical_rank: Some(1),
                            verdict: Some(Verdict::HoldsProjective),
                            ..e()
                        },
                    )
                }
                "hirzebruch" => {
                    let a: i64 = param.parse().map_err(|_| unknown())?;
                    (
                        hirzebruch(a)?,
                        ExpectedClaims {
                            rays: Some(4),
                            smooth: Some(true),
                            projective: Some(true),
                            pic_rank: Some(2),
                            numerical_rank: Some(2),
                            ..e()
                        },
                    )
                }
                "tower" => {
                    let k: usize = param.parse().map_err(|_| unknown())?;
                    (
                        xk_tower(k)?,
                        ExpectedClaims {
                            rays: Some(6 + k),
                            complete: Some(true),
                            projective: Some(false),
                            pic_rank: Some(k),
                            numerical_rank: Some(k),
                            ne_equals_n1: Some(true),
                            ..e()
                        },
                    )
                }
                _ => return Err(unknown()),
            }
        }
    };
    Ok(CatalogEntry { name: name.to_string(), fan, expected })
}
