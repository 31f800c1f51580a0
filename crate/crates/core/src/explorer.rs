//! Seeded random search over complete fans.
//!
//! Candidates are random mutation chains applied to a template fan. Chains are
//! generated and analysed in parallel, each from its own RNG stream, and
//! emitted in candidate order, so a configuration always yields the same
//! stream of findings.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactlin::{primitive, LatticeVector};
use crate::fan::{build_fan, stellar_subdivide, Fan};
use crate::intersection::Verdict;
use crate::io::FanFile;
use crate::report::{analyze, AnalysisReport};

/// Attempts per mutation before giving up.
pub const MAX_ATTEMPTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Nonprojective,
    NeEqualsN1,
    KleimanFails,
    QfactorialNeEqualsN1,
}

impl Target {
    pub const ALL: [Target; 4] =
        [Target::Nonprojective, Target::NeEqualsN1, Target::KleimanFails, Target::QfactorialNeEqualsN1];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Nonprojective => "nonprojective",
            Target::NeEqualsN1 => "ne_equals_n1",
            Target::KleimanFails => "kleiman_fails",
            Target::QfactorialNeEqualsN1 => "qfactorial_ne_equals_n1",
        }
    }

    pub fn holds(self, r: &AnalysisReport) -> bool {
        match self {
            Target::Nonprojective => !r.projective.projective,
            Target::NeEqualsN1 => r.ne_equals_n1,
            Target::KleimanFails => r.kleiman.verdict == Verdict::FailsWithCertificate,
            Target::QfactorialNeEqualsN1 => r.flags.q_factorial && r.ne_equals_n1,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown search target `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub seed: u64,
    pub iterations: usize,
    /// Upper bound on the length of each mutation chain.
    pub mutations_per_step: usize,
    pub targets: BTreeSet<Target>,
    pub template: Fan,
}

/// One elementary change of a fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Star subdivision at a lattice vector.
    Subdivide { vector: Vec<i64> },
    /// Replace the vector of one ray, keeping the combinatorics.
    Nudge { ray: usize, vector: Vec<i64> },
    /// Triangulate a non-simplicial maximal cone by coning its facets
    /// away from one of its rays over that ray.
    Pull { cone: usize, ray: usize },
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::Subdivide { vector } => write!(f, "subdivide at {}", LatticeVector::from_i64(vector)),
            Mutation::Nudge { ray, vector } => {
                write!(f, "nudge v{} to {}", ray + 1, LatticeVector::from_i64(vector))
            }
            Mutation::Pull { cone, ray } => write!(f, "pull cone #{cone} at v{}", ray + 1),
        }
    }
}

/// Applies a mutation; the result is a validated complete fan.
pub fn apply_mutation(fan: &Fan, m: &Mutation) -> Result<Fan> {
    let out = match m {
        Mutation::Subdivide { vector } => stellar_subdivide(fan, &LatticeVector::from_i64(vector))?,
        Mutation::Nudge { ray, vector } => {
            let (dim, mut rays, cones) = fan.data();
            if *ray >= rays.len() {
                return Err(Error::InvalidFan(format!("no ray v{}", ray + 1)));
            }
            rays[*ray] = LatticeVector::from_i64(vector);
            build_fan(dim, rays, cones)?
        }
        Mutation::Pull { cone, ray } => {
            let c = fan
                .max_cones()
                .get(*cone)
                .ok_or_else(|| Error::InvalidFan(format!("no maximal cone #{cone}")))?;
            if !c.contains_ray(*ray) {
                return Err(Error::InvalidFan(format!("v{} is not a ray of cone #{cone}", ray + 1)));
            }
            let (dim, rays, mut cones) = fan.data();
            cones.remove(*cone);
            for facet in c.facets().iter().filter(|f| !f.contains(ray)) {
                let mut nc = facet.clone();
                nc.push(*ray);
                cones.push(nc);
            }
            build_fan(dim, rays, cones)?
        }
    };
    out.require_complete()?;
    Ok(out)
}

fn random_mutation(fan: &Fan, rng: &mut ChaCha8Rng) -> Option<Mutation> {
    let n = fan.dim();
    match rng.gen_range(0..4) {
        0 | 1 => {
            let c = &fan.max_cones()[rng.gen_range(0..fan.max_cones().len())];
            let mut v = LatticeVector::zero(n);
            for &i in c.ray_ids() {
                v = v.add(&fan.ray(i).scale(&rng.gen_range(1..=2).into()));
            }
            let v = primitive(&v).ok()?;
            v.to_i64().map(|vector| Mutation::Subdivide { vector })
        }
        2 => {
            let ray = rng.gen_range(0..fan.num_rays());
            let delta: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
            let v = fan.ray(ray).add(&LatticeVector::from_i64(&delta));
            let v = primitive(&v).ok()?;
            v.to_i64().map(|vector| Mutation::Nudge { ray, vector })
        }
        _ => {
            let candidates: Vec<usize> =
                (0..fan.max_cones().len()).filter(|&c| !fan.max_cones()[c].is_simplicial()).collect();
            if candidates.is_empty() {
                return None;
            }
            let cone = candidates[rng.gen_range(0..candidates.len())];
            let ids = fan.max_cones()[cone].ray_ids();
            Some(Mutation::Pull { cone, ray: ids[rng.gen_range(0..ids.len())] })
        }
    }
}

/// One random valid mutation, retried up to [`MAX_ATTEMPTS`] times.
pub fn mutate(fan: &Fan, rng: &mut ChaCha8Rng) -> Result<(Fan, Mutation)> {
    for _ in 0..MAX_ATTEMPTS {
        if let Some(m) = random_mutation(fan, rng) {
            if let Ok(out) = apply_mutation(fan, &m) {
                return Ok((out, m));
            }
        }
    }
    Err(Error::MutationBudgetExhausted(MAX_ATTEMPTS))
}

/// SHA-256 of the fan normalised under permutations of the coordinates:
/// rays sorted, cones relabelled and sorted, lexicographically least over
/// all permutations.
pub fn signature(fan: &Fan) -> String {
    type Normalised = (Vec<Vec<BigInt>>, Vec<Vec<usize>>);
    let (dim, rays, _) = fan.data();
    let mut best: Option<Normalised> = None;
    for perm in (0..dim).permutations(dim) {
        let permuted: Vec<Vec<BigInt>> =
            rays.iter().map(|r| perm.iter().map(|&k| r.coords()[k].clone()).collect()).collect();
        let order: Vec<usize> = (0..rays.len()).sorted_by_key(|&i| &permuted[i]).collect();
        let mut new_id = vec![0; rays.len()];
        for (new, &old) in order.iter().enumerate() {
            new_id[old] = new;
        }
        let sorted_rays: Vec<Vec<BigInt>> = order.iter().map(|&i| permuted[i].clone()).collect();
        let cones: Vec<Vec<usize>> = fan
            .max_cones()
            .iter()
            .map(|c| c.ray_ids().iter().map(|&i| new_id[i]).sorted().collect())
            .sorted()
            .collect();
        let cand = (sorted_rays, cones);
        if best.as_ref().is_none_or(|b| &cand < b) {
            best = Some(cand);
        }
    }
    let (r, c) = best.expect("at least one permutation");
    let rays: Vec<Vec<String>> =
        r.iter().map(|v| v.iter().map(ToString::to_string).collect()).collect();
    let text = serde_json::to_string(&(dim, rays, c)).expect("serialises");
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Finding {
    pub index: usize,
    pub signature: String,
    pub targets: Vec<Target>,
    /// Smooth with `NE = N_1`: would contradict the conjecture for smooth
    /// complete toric varieties and needs manual review.
    pub conjecture_candidate: bool,
    pub mutations: Vec<Mutation>,
    pub fan: FanFile,
    pub report: AnalysisReport,
}

impl Finding {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("finding serialises")
    }
}

fn candidate(config: &SearchConfig, index: usize) -> Option<(Fan, Vec<Mutation>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let steps = rng.gen_range(1..=config.mutations_per_step.max(1));
    let mut fan = config.template.clone();
    let mut chain = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (next, m) = mutate(&fan, &mut rng).ok()?;
        fan = next;
        chain.push(m);
    }
    Some((fan, chain))
}

/// Runs the search and returns deduplicated findings in candidate order.
pub fn search(config: &SearchConfig) -> Result<Vec<Finding>> {
    if config.targets.is_empty() {
        return Ok(Vec::new());
    }
    config.template.require_complete()?;
    let evaluated: Vec<Option<Finding>> = (0..config.iterations)
        .into_par_iter()
        .map(|index| -> Result<Option<Finding>> {
            let Some((fan, mutations)) = candidate(config, index) else { return Ok(None) };
            let report = match analyze(&fan) {
                Ok(r) => r,
                Err(Error::Overflow(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let targets: Vec<Target> =
                config.targets.iter().copied().filter(|t| t.holds(&report)).collect();
            if targets.is_empty() {
                return Ok(None);
            }
            let fan_file = match FanFile::from_fan(&fan) {
                Ok(f) => f,
                Err(_) => return Ok(None),
            };
            Ok(Some(Finding {
                index,
                signature: signature(&fan),
                targets,
                conjecture_candidate: report.flags.smooth && report.ne_equals_n1,
                mutations,
                fan: fan_file,
                report,
            }))
        })
        .collect::<Result<_>>()?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for f in evaluated.into_iter().flatten() {
        // Re-check on emission.
        if !f.targets.iter().all(|t| t.holds(&f.report)) {
            return Err(Error::Internal(format!("finding {} violates its targets", f.index)));
        }
        if seen.insert(f.signature.clone()) {
            out.push(f);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn forced_blow_up_of_delta_a_is_delta_b() {
        let m = Mutation::Subdivide { vector: vec![0, 0, -1] };
        let f = apply_mutation(&catalog::delta_a(), &m).unwrap();
        assert!(f.same_as(&catalog::delta_b()));
        assert_eq!(signature(&f), signature(&catalog::delta_b()));
    }

    #[test]
    fn pulling_delta_q_gives_delta_p() {
        let q = catalog::delta_q();
        // <v1,v2,v4,v5> is cone #0; pulling at v2 splits it along <v2,v4>.
        let f = apply_mutation(&q, &Mutation::Pull { cone: 0, ray: 1 }).unwrap();
        assert!(f.same_as(&catalog::delta_p()));
    }

    #[test]
    fn subdivision_of_p2() {
        let f = apply_mutation(&catalog::pn(2).unwrap(), &Mutation::Subdivide { vector: vec![1, 1] }).unwrap();
        assert_eq!(f.max_cones().len(), 4);
        assert!(f.flags().smooth);
    }

    #[test]
    fn invalid_nudge_is_rejected() {
        // Moving e1 onto -e2 leaves two rays on one line.
        let p2 = catalog::pn(2).unwrap();
        assert!(apply_mutation(&p2, &Mutation::Nudge { ray: 0, vector: vec![-1, -1] }).is_err());
    }

    #[test]
    fn signature_ignores_coordinate_order() {
        let a = build_fan(
            2,
            vec![LatticeVector::from_i64(&[1, 0]), LatticeVector::from_i64(&[0, 1]), LatticeVector::from_i64(&[-1, -2])],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let b = build_fan(
            2,
            vec![LatticeVector::from_i64(&[-2, -1]), LatticeVector::from_i64(&[1, 0]), LatticeVector::from_i64(&[0, 1])],
            vec![vec![1, 2], vec![0, 1], vec![0, 2]],
        )
        .unwrap();
        assert_eq!(signature(&a), signature(&b));
        assert_ne!(signature(&a), signature(&catalog::pn(2).unwrap()));
    }

    #[test]
    fn empty_targets_find_nothing() {
        let cfg = SearchConfig {
            seed: 1,
            iterations: 5,
            mutations_per_step: 1,
            targets: BTreeSet::new(),
            template: catalog::delta_q(),
        };
        assert!(search(&cfg).unwrap().is_empty());
    }
}
