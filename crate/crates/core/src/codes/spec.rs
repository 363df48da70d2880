//! JSON code descriptions, as read by the command-line tool.
//!
//! ```json
//! {"family": "acar2", "p": 17, "t": 1, "m": 2,
//!  "sets": [[0, 1, 2, 3, 4, 5], [0, 1, 2, 3, 4, 5, 6]], "k": [2, 5]}
//! ```
//!
//! `sets` entries are `"full"`, `"nonzero"` or explicit lists of canonical
//! indices in `K`. It may be omitted for `rm`, `arm1` and `arm2`, which
//! always use `K^m`. `k` vectors and `exponents` refer to normalized axes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CartesianSet, CodeError, ExponentSet, MccCode};
use crate::field::{FieldTower, Level};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    Named(String),
    Explicit(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    Scalar(usize),
    Vector(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub family: String,
    pub p: u64,
    #[serde(default = "one")]
    pub e: usize,
    pub t: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<SetSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<KSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<Vec<usize>>>,
}

fn one() -> usize {
    1
}

fn spec_err(msg: impl Into<String>) -> CodeError {
    CodeError::Spec(msg.into())
}

impl CodeSpec {
    pub fn from_json(text: &str) -> Result<Self, CodeError> {
        serde_json::from_str(text).map_err(|e| spec_err(e.to_string()))
    }

    pub fn build(&self) -> Result<MccCode, CodeError> {
        let tower = Arc::new(FieldTower::new(self.p, self.e, self.t)?);
        if self.m == 0 {
            return Err(CodeError::NoAxes);
        }
        let scalar_k = || match &self.k {
            Some(KSpec::Scalar(k)) => Ok(*k),
            _ => Err(spec_err(format!("family {} needs a scalar k", self.family))),
        };
        let vector_k = || match &self.k {
            Some(KSpec::Vector(k)) => Ok(k.clone()),
            Some(KSpec::Scalar(k)) => Ok(vec![*k; self.m]),
            None => Err(spec_err(format!("family {} needs k", self.family))),
        };
        match self.family.as_str() {
            "rm" => return MccCode::rm(tower, self.m, scalar_k()?),
            "arm1" => return MccCode::arm1(tower, self.m, scalar_k()?),
            "arm2" => return MccCode::arm2(tower, self.m, scalar_k()?),
            _ => {}
        }
        let set = self.cartesian_set(&tower)?;
        match self.family.as_str() {
            "car" => MccCode::car(tower, set, scalar_k()?),
            "acar1" => MccCode::acar1(tower, set, vector_k()?),
            "acar2" => MccCode::acar2(tower, set, vector_k()?),
            "generic" => {
                let points = self.exponents.clone().ok_or_else(|| spec_err("generic codes need exponents"))?;
                let a = ExponentSet::new(self.m, points)?;
                MccCode::new(tower, set, a)
            }
            other => Err(spec_err(format!("unknown family {other:?}"))),
        }
    }

    fn cartesian_set(&self, tower: &FieldTower) -> Result<CartesianSet, CodeError> {
        let specs = match &self.sets {
            Some(s) => s.clone(),
            None => vec![SetSpec::Named("full".into()); self.m],
        };
        if specs.len() != self.m {
            return Err(spec_err(format!("expected {} sets, got {}", self.m, specs.len())));
        }
        let subsets = specs
            .iter()
            .map(|s| match s {
                SetSpec::Named(name) if name == "full" => Ok(tower.elements(Level::Top).collect()),
                SetSpec::Named(name) if name == "nonzero" => Ok(tower.elements(Level::Top).skip(1).collect()),
                SetSpec::Named(name) => Err(spec_err(format!("unknown set {name:?}"))),
                SetSpec::Explicit(idx) => {
                    idx.iter().map(|&i| tower.element(Level::Top, i).map_err(CodeError::from)).collect()
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        CartesianSet::new(subsets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_builds_acar2() {
        let spec = CodeSpec::from_json(
            r#"{"family":"acar2","p":17,"t":1,"m":2,"sets":[[0,1,2,3,4,5],[0,1,2,3,4,5,6]],"k":[2,5]}"#,
        )
        .unwrap();
        assert_eq!(spec.build().unwrap().dimension(), 37);
    }

    #[test]
    fn rejects_unknown_family_and_bad_set() {
        let bad = CodeSpec::from_json(r#"{"family":"xyz","p":2,"t":2,"m":1,"k":1}"#).unwrap();
        assert!(matches!(bad.build(), Err(CodeError::Spec(_))));
        let bad = CodeSpec::from_json(r#"{"family":"car","p":2,"t":2,"m":1,"sets":["odd"],"k":1}"#).unwrap();
        assert!(matches!(bad.build(), Err(CodeError::Spec(_))));
        assert!(CodeSpec::from_json(r#"{"family":"rm"}"#).is_err());
    }
}
