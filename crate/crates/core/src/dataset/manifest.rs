//! `manifest.jsonl`: a header object on the first line, then one row per
//! input image in index order. Rows are the plan fields followed by the
//! corpus fields `source`, `label`, `output` and `error`.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::composer::AugmentPlan;
use crate::config::PipelineConfig;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const MANIFEST_FORMAT: &str = "keeporig-manifest";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub format: String,
    pub version: u32,
    /// RNG generator name.
    pub generator: String,
    /// `corpus`, `cifar10` or `cifar100`.
    pub mode: String,
    pub config: PipelineConfig,
    pub notes: Vec<String>,
}

impl ManifestHeader {
    pub fn new(mode: &str, config: &PipelineConfig) -> Self {
        ManifestHeader {
            format: MANIFEST_FORMAT.into(),
            version: MANIFEST_VERSION,
            generator: crate::rng::GENERATOR.into(),
            mode: mode.into(),
            config: config.clone(),
            notes: Vec::new(),
        }
    }
}

/// CIFAR class index or directory-name class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Index(u16),
    Name(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    #[serde(flatten)]
    pub plan: AugmentPlan,
    /// Input path relative to the corpus root, or `file#index` for CIFAR.
    pub source: String,
    pub label: Option<Label>,
    /// Output path relative to the output root, or `file#index` for CIFAR.
    pub output: Option<String>,
    pub error: Option<String>,
}

fn to_line<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Manifest(e.to_string()))
}

pub fn encode_manifest(header: &ManifestHeader, rows: &[ManifestRow]) -> Result<String> {
    let mut out = to_line(header)?;
    out.push('\n');
    for row in rows {
        out.push_str(&to_line(row)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_manifest(path: &Path, header: &ManifestHeader, rows: &[ManifestRow]) -> Result<()> {
    let text = encode_manifest(header, rows)?;
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<(ManifestHeader, Vec<ManifestRow>)> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(f).lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Manifest(format!("{}: empty manifest", path.display())))?
        .map_err(|e| Error::io(path, e))?;
    let header: ManifestHeader =
        serde_json::from_str(&first).map_err(|e| Error::Manifest(format!("{}: line 1: {e}", path.display())))?;
    if header.format != MANIFEST_FORMAT || header.version != MANIFEST_VERSION {
        return Err(Error::Manifest(format!(
            "{}: unsupported manifest {} v{}",
            path.display(),
            header.format,
            header.version
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let row: ManifestRow = serde_json::from_str(&line)
            .map_err(|e| Error::Manifest(format!("{}: line {}: {e}", path.display(), i + 2)))?;
        if row.plan.image_index != rows.len() as u64 {
            return Err(Error::Manifest(format!(
                "{}: line {}: image_index {} breaks the contiguous sequence",
                path.display(),
                i + 2,
                row.plan.image_index
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
