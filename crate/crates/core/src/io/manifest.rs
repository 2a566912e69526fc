//! Label manifest: a CSV with header `file,cow_id,call_type` binding each
//! recording to its caller and call type.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest row {row}: referenced audio file {path} does not exist")]
    MissingFile { row: usize, path: PathBuf },
    #[error("manifest row {row}: call_type {token:?} is neither HF nor LF")]
    BadToken { row: usize, token: String },
    #[error("manifest has no data rows")]
    EmptyManifest,
    #[error("manifest header must be `file,cow_id,call_type`, found {0:?}")]
    BadHeader(String),
    #[error("manifest row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Open-mouth high-frequency or closed-mouth low-frequency call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CallType {
    #[serde(rename = "HF")]
    Hf,
    #[serde(rename = "LF")]
    Lf,
}

impl CallType {
    pub fn as_str(self) -> &'static str {
        match self {
            CallType::Hf => "HF",
            CallType::Lf => "LF",
        }
    }
}

impl fmt::Display for CallType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("call type must be HF or LF, got {0:?}")]
pub struct ParseCallTypeError(pub String);

impl FromStr for CallType {
    type Err = ParseCallTypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "HF" => Ok(CallType::Hf),
            "LF" => Ok(CallType::Lf),
            _ => Err(ParseCallTypeError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CallLabel {
    pub cow_id: String,
    pub call_type: CallType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    /// Resolved against the audio root.
    pub path: PathBuf,
    pub source_id: String,
    pub label: CallLabel,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestSummary {
    pub n: usize,
    pub hf: usize,
    pub lf: usize,
    pub calls_per_cow: BTreeMap<String, usize>,
}

impl Manifest {
    /// Parses the manifest without checking that audio files exist.
    pub fn parse(path: impl AsRef<Path>, audio_root: impl AsRef<Path>) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text, audio_root.as_ref())
    }

    pub fn parse_str(text: &str, audio_root: &Path) -> Result<Self, ManifestError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header != ["file", "cow_id", "call_type"] {
            return Err(ManifestError::BadHeader(header.join(",")));
        }
        let mut entries = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 1;
            let record = record?;
            if record.len() != 3 {
                return Err(ManifestError::BadRow {
                    row,
                    message: format!("expected 3 fields, found {}", record.len()),
                });
            }
            let file = &record[0];
            let cow_id = record[1].to_string();
            if file.is_empty() || cow_id.is_empty() {
                return Err(ManifestError::BadRow {
                    row,
                    message: "empty file or cow_id".into(),
                });
            }
            let call_type = record[2].parse().map_err(|_| ManifestError::BadToken {
                row,
                token: record[2].to_string(),
            })?;
            let path = audio_root.join(file);
            let source_id = Path::new(file)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| file.to_string());
            entries.push(ManifestEntry {
                path,
                source_id,
                label: CallLabel { cow_id, call_type },
            });
        }
        if entries.is_empty() {
            return Err(ManifestError::EmptyManifest);
        }
        Ok(Self { entries })
    }

    pub fn summary(&self) -> ManifestSummary {
        let mut calls_per_cow = BTreeMap::new();
        let mut hf = 0;
        for e in &self.entries {
            *calls_per_cow.entry(e.label.cow_id.clone()).or_insert(0) += 1;
            if e.label.call_type == CallType::Hf {
                hf += 1;
            }
        }
        ManifestSummary {
            n: self.entries.len(),
            hf,
            lf: self.entries.len() - hf,
            calls_per_cow,
        }
    }
}

/// Parses the manifest and checks that every referenced WAV exists.
pub fn load_manifest(
    path: impl AsRef<Path>,
    audio_root: impl AsRef<Path>,
) -> Result<Manifest, ManifestError> {
    let manifest = Manifest::parse(path, audio_root)?;
    if let Some((i, e)) = manifest
        .entries
        .iter()
        .enumerate()
        .find(|(_, e)| !e.path.is_file())
    {
        return Err(ManifestError::MissingFile {
            row: i + 1,
            path: e.path.clone(),
        });
    }
    Ok(manifest)
}
