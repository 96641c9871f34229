//! The JSON system file and the machine-readable report.
//!
//! A system file holds any subset of four blocks:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "ks_instance": { "dimension": 2, "rays": [[1,0],[0,1]], "contexts": [[0,1]] },
//!   "measurement_system": { "observables": [...], "contexts": [...] },
//!   "structure": { "domain": ["a","b"], "relations": [{"name":"E","tuples":[["a","b"]]}] },
//!   "qset": { "electron": 2 }
//! }
//! ```
//!
//! Rationals are strings such as `"1/4"` or `"-1"`. Unknown fields are
//! errors at every level.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jpd::MeasurementSystem;
use crate::ks::{Context, KsError, KsInstance};
use crate::linalg::{canonical_ray, LinalgError};
use crate::qset::{FiniteStructure, Qset};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("malformed system file: {0}")]
    Json(String),
    #[error("unsupported format_version {0}, expected {FORMAT_VERSION}")]
    UnsupportedVersion(u32),
    #[error("system file has no {0} block")]
    MissingBlock(&'static str),
    #[error("ray {index}: {source}")]
    Ray { index: usize, source: LinalgError },
    #[error(transparent)]
    Ks(#[from] KsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KsInstanceBlock {
    pub dimension: usize,
    pub rays: Vec<Vec<i64>>,
    pub contexts: Vec<Vec<usize>>,
}

impl KsInstanceBlock {
    /// Rays are canonicalized; structure is checked, orthogonality is not.
    pub fn to_instance(&self) -> Result<KsInstance, IoError> {
        let rays = self
            .rays
            .iter()
            .enumerate()
            .map(|(index, r)| canonical_ray(r).map_err(|source| IoError::Ray { index, source }))
            .collect::<Result<Vec<_>, _>>()?;
        let contexts = self.contexts.iter().map(|c| Context::new(c.clone())).collect();
        Ok(KsInstance::new(self.dimension, rays, contexts)?)
    }

    pub fn from_instance(inst: &KsInstance) -> KsInstanceBlock {
        KsInstanceBlock {
            dimension: inst.dimension(),
            rays: inst.rays().iter().map(|r| r.components().to_vec()).collect(),
            contexts: inst.contexts().iter().map(|c| c.ray_ids().to_vec()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks_instance: Option<KsInstanceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurement_system: Option<MeasurementSystem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<FiniteStructure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qset: Option<Qset>,
}

impl SystemFile {
    pub fn empty() -> SystemFile {
        SystemFile {
            format_version: FORMAT_VERSION,
            ks_instance: None,
            measurement_system: None,
            structure: None,
            qset: None,
        }
    }

    pub fn from_json(text: &str) -> Result<SystemFile, IoError> {
        let file: SystemFile = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(IoError::UnsupportedVersion(file.format_version));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system files serialize")
    }

    pub fn ks_instance(&self) -> Result<KsInstance, IoError> {
        self.ks_instance
            .as_ref()
            .ok_or(IoError::MissingBlock("ks_instance"))?
            .to_instance()
    }

    pub fn measurement_system(&self) -> Result<&MeasurementSystem, IoError> {
        self.measurement_system
            .as_ref()
            .ok_or(IoError::MissingBlock("measurement_system"))
    }

    pub fn structure(&self) -> Result<&FiniteStructure, IoError> {
        self.structure.as_ref().ok_or(IoError::MissingBlock("structure"))
    }
}

/// What a command did and concluded. `details` carries the command's
/// witnesses and certificates in their library serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub verdict: String,
    pub exit_code: i32,
    pub details: serde_json::Value,
    /// Wall-clock milliseconds; only present when requested, so reports
    /// stay byte-identical across runs by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Report, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jpd::{feasibility_general, CorrelationTriple, DEFAULT_PRODUCT_BUDGET};
    use crate::ks::builtin_cabello;
    use crate::Rational;

    #[test]
    fn ks_block_round_trip() {
        let inst = builtin_cabello();
        let mut file = SystemFile::empty();
        file.ks_instance = Some(KsInstanceBlock::from_instance(&inst));
        let back = SystemFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back.ks_instance().unwrap(), inst);
    }

    #[test]
    fn rays_are_canonicalized() {
        let text = r#"{"format_version":1,"ks_instance":{"dimension":2,"rays":[[-2,0],[0,3]],"contexts":[[0,1]]}}"#;
        let inst = SystemFile::from_json(text).unwrap().ks_instance().unwrap();
        assert_eq!(inst.ray(0).components(), &[1, 0]);
        assert_eq!(inst.ray(1).components(), &[0, 1]);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(
            SystemFile::from_json(r#"{"format_version":1,"extra":0}"#),
            Err(IoError::Json(_))
        ));
        assert_eq!(
            SystemFile::from_json(r#"{"format_version":7}"#).unwrap_err(),
            IoError::UnsupportedVersion(7)
        );
        let float = r#"{"format_version":1,"measurement_system":{"observables":[{"name":"A","outcomes":["0",1.5]}],"contexts":[]}}"#;
        assert!(SystemFile::from_json(float).is_err());
        let zero = r#"{"format_version":1,"ks_instance":{"dimension":2,"rays":[[0,0]],"contexts":[[0]]}}"#;
        assert!(matches!(
            SystemFile::from_json(zero).unwrap().ks_instance(),
            Err(IoError::Ray { index: 0, .. })
        ));
        assert_eq!(
            SystemFile::empty().measurement_system().unwrap_err(),
            IoError::MissingBlock("measurement_system")
        );
    }

    #[test]
    fn report_round_trip_keeps_rationals_exact() {
        let sys = MeasurementSystem::pairwise_pm1(
            &CorrelationTriple::new(Rational::new(-1, 3), Rational::new(1, 7), Rational::zero()).unwrap(),
        );
        let res = feasibility_general(&sys, DEFAULT_PRODUCT_BUDGET).unwrap();
        let report = Report {
            command: "feasibility".into(),
            args: vec!["x.json".into()],
            verdict: "feasible".into(),
            exit_code: 0,
            details: serde_json::to_value(&res).unwrap(),
            timing_ms: None,
        };
        let text = report.to_json();
        assert!(!text.contains("timing_ms"));
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), text);
        let res_back: crate::jpd::FeasibilityResult = serde_json::from_value(back.details).unwrap();
        assert_eq!(res_back, res);
    }
}
