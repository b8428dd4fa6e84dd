//! Text file formats for configurations and distance matrices.
//!
//! Both are JSON documents. Floats are written in shortest round-trip form
//! and parsed with correct rounding, so a write/read cycle is bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Configuration, MatrixKind, UpperTriangularMatrix};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationFile {
    pub p: f64,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceMatrixFile {
    pub n: usize,
    pub kind: MatrixKind,
    pub entries: Vec<f64>,
}

impl From<&Configuration> for ConfigurationFile {
    fn from(c: &Configuration) -> Self {
        ConfigurationFile { p: c.p().get(), points: c.to_points() }
    }
}

impl TryFrom<ConfigurationFile> for Configuration {
    type Error = Error;
    fn try_from(f: ConfigurationFile) -> Result<Self> {
        Configuration::new(f.p, f.points)
    }
}

impl From<&UpperTriangularMatrix> for DistanceMatrixFile {
    fn from(m: &UpperTriangularMatrix) -> Self {
        DistanceMatrixFile { n: m.n(), kind: m.kind(), entries: m.entries().to_vec() }
    }
}

impl TryFrom<DistanceMatrixFile> for UpperTriangularMatrix {
    type Error = Error;
    fn try_from(f: DistanceMatrixFile) -> Result<Self> {
        UpperTriangularMatrix::new(f.n, f.kind, f.entries)
    }
}

pub(crate) fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        message: format!("line {}, column {}: {e}", e.line(), e.column()),
    })
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn configuration_to_json(c: &Configuration) -> String {
    to_json(&ConfigurationFile::from(c))
}

pub fn configuration_from_json(text: &str, origin: &str) -> Result<Configuration> {
    let file: ConfigurationFile = parse_json(text, origin)?;
    Configuration::try_from(file).map_err(|e| Error::Parse { path: origin.to_string(), message: e.to_string() })
}

pub fn matrix_to_json(m: &UpperTriangularMatrix) -> String {
    to_json(&DistanceMatrixFile::from(m))
}

pub fn matrix_from_json(text: &str, origin: &str) -> Result<UpperTriangularMatrix> {
    let file: DistanceMatrixFile = parse_json(text, origin)?;
    UpperTriangularMatrix::try_from(file).map_err(|e| Error::Parse { path: origin.to_string(), message: e.to_string() })
}

pub fn read_configuration(path: &Path) -> Result<Configuration> {
    configuration_from_json(&std::fs::read_to_string(path)?, &path.display().to_string())
}

pub fn read_matrix(path: &Path) -> Result<UpperTriangularMatrix> {
    matrix_from_json(&std::fs::read_to_string(path)?, &path.display().to_string())
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
