//! The serialisable analysis record of a complete fan.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::divisor::TWeilDivisor;
use crate::error::{Error, Result};
use crate::fan::{Fan, FanFlags};
use crate::intersection::{diagnose, Projectivity, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSummary {
    pub dim: usize,
    pub rays: usize,
    pub max_cones: usize,
    pub walls: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallReport {
    pub id: usize,
    /// Ray labels of the wall, such as `["v4", "v7"]`.
    pub rays: Vec<String>,
    pub left: usize,
    pub right: usize,
    /// Pairings with the Picard basis.
    pub class: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallWeight {
    pub wall: usize,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationWeight {
    pub cone: usize,
    /// Coefficients per ray of an integer relation among the rays of `cone`.
    pub relation: Vec<i64>,
    pub weight: i64,
}

/// Weights making the positivity rows of the walls sum to zero modulo the
/// cone relations: `0 = sum weight * (D . C) > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateReport {
    pub walls: Vec<WallWeight>,
    pub relations: Vec<RelationWeight>,
    pub strict_total: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectivityReport {
    pub projective: bool,
    /// Coefficients of an ample Cartier divisor.
    pub witness: Option<Vec<i64>>,
    pub certificate: Option<CertificateReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KleimanReport {
    pub verdict: Verdict,
    pub projective: bool,
    pub positive_divisor: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub fan: FanSummary,
    pub flags: FanFlags,
    pub pic_rank: usize,
    pub numerical_rank: usize,
    /// Coefficient vectors of the Picard basis divisors.
    pub picard_basis: Vec<Vec<i64>>,
    pub projective: ProjectivityReport,
    pub ne_equals_n1: bool,
    pub trivial_walls: Vec<usize>,
    pub walls: Vec<WallReport>,
    pub kleiman: KleimanReport,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("analysis report: {e}")))
    }
}

pub(crate) fn small(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Overflow(x.to_string()))
}

pub(crate) fn small_vec(xs: &[BigInt]) -> Result<Vec<i64>> {
    xs.iter().map(small).collect()
}

fn divisor_vec(d: &TWeilDivisor) -> Result<Vec<i64>> {
    small_vec(d.coeffs())
}

pub fn projectivity_report(p: &Projectivity) -> Result<ProjectivityReport> {
    let certificate = match &p.certificate {
        None => None,
        Some(c) => Some(CertificateReport {
            walls: c
                .wall_weights()
                .into_iter()
                .map(|(wall, w)| Ok(WallWeight { wall, weight: small(&w)? }))
                .collect::<Result<_>>()?,
            relations: c
                .relation_weights()
                .into_iter()
                .map(|(cone, rel, w)| {
                    Ok(RelationWeight { cone, relation: small_vec(&rel)?, weight: small(&w)? })
                })
                .collect::<Result<_>>()?,
            strict_total: small(&c.farkas.strict_total())?,
        }),
    };
    Ok(ProjectivityReport {
        projective: p.projective,
        witness: p.witness.as_ref().map(divisor_vec).transpose()?,
        certificate,
    })
}

/// Full analysis of a complete fan.
pub fn analyze(fan: &Fan) -> Result<AnalysisReport> {
    let (pic, cones, proj, kleiman) = diagnose(fan)?;
    let walls = fan.walls()?;
    let wall_reports = walls
        .iter()
        .zip(&cones.ne_generators)
        .map(|(w, c)| {
            Ok(WallReport {
                id: w.id,
                rays: w.ray_ids.iter().map(|&i| fan.ray_label(i)).collect(),
                left: w.left,
                right: w.right,
                class: small_vec(&c.pairing)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalysisReport {
        fan: FanSummary {
            dim: fan.dim(),
            rays: fan.num_rays(),
            max_cones: fan.max_cones().len(),
            walls: walls.len(),
        },
        flags: fan.flags(),
        pic_rank: pic.rank,
        numerical_rank: cones.numerical_rank,
        picard_basis: pic.basis.iter().map(divisor_vec).collect::<Result<_>>()?,
        projective: projectivity_report(&proj)?,
        ne_equals_n1: cones.ne_equals_n1,
        trivial_walls: cones.trivial_walls.clone(),
        walls: wall_reports,
        kleiman: KleimanReport {
            verdict: kleiman.verdict,
            projective: kleiman.projective,
            positive_divisor: kleiman.positive_divisor.as_ref().map(divisor_vec).transpose()?,
        },
    })
}
