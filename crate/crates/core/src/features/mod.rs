//! The 23 per-call acoustic parameters.

mod am;
mod extract;
mod vector;

pub use am::{am_metrics, AmMetrics};
pub use extract::{
    extract_corpus, extract_features, measure_call, CallMeasurement, CorpusExtraction,
    ExtractionFailure, FeatureError,
};
pub use vector::{formant_dispersal, FeatureVector, FEATURE_NAMES, N_FEATURES};
