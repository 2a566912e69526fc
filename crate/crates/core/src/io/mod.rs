//! Audio input, label manifests and the feature table.

mod clip;
pub mod manifest;
pub mod table;
pub mod wav;

pub use clip::{AudioClip, ClipError};
pub use manifest::{load_manifest, CallLabel, CallType, Manifest, ManifestEntry, ManifestError};
pub use table::{read_features_csv, write_features_csv, CorpusRow, LabeledCorpus, TableError};
pub use wav::{read_wav, write_wav, WavError};
