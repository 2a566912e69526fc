//! Acoustic analysis and explainable classification of cattle vocalizations.
//!
//! The crate is organised as a pipeline:
//!
//! - [`io`]: WAV decoding, label manifests and the feature table format.
//! - [`dsp`]: spectrogram, F0 contour, formant tracks, amplitude envelope and
//!   spectral statistics.
//! - [`features`]: the 23 per-call acoustic parameters built from the DSP outputs.
//! - [`learn`]: stratified folds, bagged stacked ensembles with majority vote,
//!   metrics and cross-validation.
//! - [`importance`]: leave-one-feature-out importance and its bar chart.
//! - [`synth`]: deterministic test-signal and synthetic-corpus generators.
//! - [`cli`]: the `cowvox` command-line front end.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod dsp;
pub mod features;
pub mod importance;
pub mod io;
pub mod learn;
pub mod seed;
pub mod synth;

pub use dsp::{AnalysisConfig, Spectrogram};
pub use features::{FeatureVector, FEATURE_NAMES};
pub use io::{AudioClip, CallLabel, CallType, LabeledCorpus};
pub use learn::{CvConfig, EnsembleModel, StackConfig, TaskSpec};
