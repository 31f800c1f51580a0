//! The JSON fan file format and divisor literals.
//!
//! ```json
//! {"dim": 3, "rays": [[1,0,1], ...], "max_cones": [[0,1,3], ...]}
//! ```
//! Ray indices in `max_cones` are 0-based. Divisors are objects mapping
//! 1-based ray numbers (`"7"` or `"v7"`) to integer coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::divisor::TWeilDivisor;
use crate::error::{Error, Result};
use crate::exactlin::{primitive, LatticeVector};
use crate::fan::{build_fan, Fan};
use crate::report::small_vec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanFile {
    pub fn from_fan(fan: &Fan) -> Result<Self> {
        let (dim, rays, cones) = fan.data();
        Ok(FanFile {
            dim,
            rays: rays.iter().map(|r| small_vec(r.coords())).collect::<Result<_>>()?,
            max_cones: cones,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fan file serialises")
    }

    /// One ray or cone per line.
    pub fn to_pretty_json(&self) -> String {
        fn rows<T: Serialize>(xs: &[T]) -> String {
            let lines: Vec<String> =
                xs.iter().map(|x| format!("    {}", serde_json::to_string(x).expect("serialises"))).collect();
            if lines.is_empty() { "[]".into() } else { format!("[\n{}\n  ]", lines.join(",\n")) }
        }
        format!(
            "{{\n  \"dim\": {},\n  \"rays\": {},\n  \"max_cones\": {}\n}}\n",
            self.dim,
            rows(&self.rays),
            rows(&self.max_cones)
        )
    }

    /// Validates the data, reporting problems with a JSON pointer.
    pub fn build(&self) -> Result<Fan> {
        let mut seen: BTreeMap<&[i64], usize> = BTreeMap::new();
        for (i, r) in self.rays.iter().enumerate() {
            let at = |msg: String| Error::InvalidFan(format!("at /rays/{i}: {msg}"));
            if r.len() != self.dim {
                return Err(at(format!("ray has {} coordinates, expected {}", r.len(), self.dim)));
            }
            let v = LatticeVector::from_i64(r);
            if v.is_zero() {
                return Err(at("ray is the zero vector".into()));
            }
            if !v.is_primitive() {
                return Err(at(format!("ray {v} is not primitive; use {}", primitive(&v)?)));
            }
            if let Some(j) = seen.insert(r, i) {
                return Err(at(format!("duplicate ray {v}, same as /rays/{j}")));
            }
        }
        for (c, cone) in self.max_cones.iter().enumerate() {
            for (k, &idx) in cone.iter().enumerate() {
                if idx >= self.rays.len() {
                    return Err(Error::InvalidFan(format!(
                        "at /max_cones/{c}/{k}: ray index {idx} out of range (0..{})",
                        self.rays.len()
                    )));
                }
            }
            if cone.iter().collect::<BTreeSet<_>>().len() != cone.len() {
                return Err(Error::InvalidFan(format!("at /max_cones/{c}: repeated ray index")));
            }
        }
        build_fan(
            self.dim,
            self.rays.iter().map(|r| LatticeVector::from_i64(r)).collect(),
            self.max_cones.clone(),
        )
    }
}

pub fn parse_fan_str(text: &str) -> Result<Fan> {
    let file: FanFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    file.build()
}

pub fn read_fan_file(path: &Path) -> Result<Fan> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_fan_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::InvalidFan(m) => Error::InvalidFan(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Parses `{"7": 1, "v2": -3}` against the rays of `fan`.
pub fn parse_divisor(fan: &Fan, text: &str) -> Result<TWeilDivisor> {
    let map: BTreeMap<String, i64> = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("divisor: {e}")))?;
    let mut coeffs = vec![0i64; fan.num_rays()];
    for (key, value) in map {
        let num = key.strip_prefix('v').unwrap_or(&key);
        let i: usize = num
            .parse()
            .ok()
            .filter(|&i| (1..=fan.num_rays()).contains(&i))
            .ok_or_else(|| {
                Error::Parse(format!(
                    "divisor key `{key}` is not a ray number between 1 and {}",
                    fan.num_rays()
                ))
            })?;
        coeffs[i - 1] = value;
    }
    Ok(TWeilDivisor::from_i64(&coeffs))
}
