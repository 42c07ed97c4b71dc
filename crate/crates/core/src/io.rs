//! JSON file formats: point configurations and certificate reports.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::checks::Check;
use crate::error::{Error, Result};
use crate::generators::Generated;
use crate::geometry::{CVector, PointConfig, Subspace, C64};
use crate::lcc::DecodingFamily;

pub const FORMAT_VERSION: u32 = 1;

/// On-disk configuration. A point is a list of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub format_version: u32,
    pub dim: usize,
    pub points: Vec<Vec<C64>>,
    #[serde(default)]
    pub metadata: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<Subspace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoding_family: Option<DecodingFamily>,
}

impl ConfigFile {
    pub fn from_config(v: &PointConfig, metadata: Value) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dim: v.dim(),
            points: v.points().iter().map(|p| p.iter().copied().collect()).collect(),
            metadata,
            ground_truth: None,
            decoding_family: None,
        }
    }

    pub fn from_generated(g: &Generated) -> Self {
        Self {
            ground_truth: g.ground_truth.clone(),
            decoding_family: g.family.clone(),
            ..Self::from_config(&g.config, g.metadata.clone())
        }
    }

    /// Validates the version and the declared dimension.
    pub fn to_config(&self) -> Result<PointConfig> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported format_version {}, expected {FORMAT_VERSION}",
                self.format_version
            )));
        }
        let pts: Vec<CVector> = self.points.iter().map(|p| CVector::from_column_slice(p)).collect();
        let v = PointConfig::new(pts)?;
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        Ok(v)
    }
}

/// Everything a run measured, with the digest of its input file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateReport {
    pub format_version: u32,
    pub command: String,
    pub input_digest: String,
    pub parameters: Value,
    pub hypotheses: Vec<Check>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub failing: Vec<String>,
    /// Full result of the run: analysis, certificate or bracket.
    pub result: Value,
    pub timings_ms: BTreeMap<String, f64>,
}

impl CertificateReport {
    pub fn new(
        command: impl Into<String>,
        input_digest: String,
        parameters: Value,
        hypotheses: Vec<Check>,
        checks: Vec<Check>,
        result: Value,
    ) -> Self {
        let failing: Vec<String> = hypotheses
            .iter()
            .chain(&checks)
            .filter(|c| !c.holds)
            .map(|c| c.name.clone())
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            command: command.into(),
            input_digest,
            parameters,
            hypotheses,
            checks,
            passed: failing.is_empty(),
            failing,
            result,
            timings_ms: BTreeMap::new(),
        }
    }
}

/// Hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same bits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

/// Reads and parses a JSON file, returning it with the digest of its bytes.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<(T, String)> {
    let bytes = std::fs::read(path)?;
    let value = serde_json::from_slice(&bytes)?;
    Ok((value, digest(&bytes)))
}

pub fn read_config(path: &Path) -> Result<(ConfigFile, PointConfig, String)> {
    let (file, d): (ConfigFile, String) = read_json(path)?;
    let v = file.to_config()?;
    Ok((file, v, d))
}
