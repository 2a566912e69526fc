use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::am::am_metrics;
use super::vector::{formant_dispersal, FeatureVector};
use crate::dsp::{
    amplitude_envelope, estimate_f0, estimate_formants, spectral_stats, spectrogram,
    AnalysisConfig, DspError,
};
use crate::io::{read_wav, AudioClip, CorpusRow, LabeledCorpus, Manifest, WavError};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("no voiced frame found")]
    UnvoicedCall,
    #[error("only {found} of 8 formant tracks were found")]
    IncompleteFormants { found: usize },
    #[error("formant F{slot} was not found in any call; cannot impute")]
    NoFormantValues { slot: usize },
    #[error("no call could be extracted")]
    NothingExtracted,
    #[error("audio file {0} does not exist")]
    MissingFile(String),
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Wav(#[from] WavError),
}

impl FeatureError {
    /// Short machine-readable name of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            FeatureError::UnvoicedCall => "UnvoicedCall",
            FeatureError::IncompleteFormants { .. } => "IncompleteFormants",
            FeatureError::NoFormantValues { .. } => "NoFormantValues",
            FeatureError::NothingExtracted => "NothingExtracted",
            FeatureError::MissingFile(_) => "MissingFile",
            FeatureError::Dsp(DspError::SilentClip) => "SilentClip",
            FeatureError::Dsp(DspError::ClipTooShort) => "ClipTooShort",
            FeatureError::Dsp(_) => "AnalysisError",
            FeatureError::Wav(WavError::NotWav(_)) => "NotWav",
            FeatureError::Wav(WavError::UnsupportedEncoding { .. }) => "UnsupportedEncoding",
            FeatureError::Wav(WavError::MultiChannel(_)) => "MultiChannel",
            FeatureError::Wav(WavError::Truncated { .. }) => "Truncated",
            FeatureError::Wav(WavError::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => {
                "MissingFile"
            }
            FeatureError::Wav(_) => "ReadError",
        }
    }
}

/// Everything measured on one call. Formant means may be missing when a
/// formant was never resolved; those are filled at corpus level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CallMeasurement {
    pub f0_mean_hz: f64,
    pub f0_max_hz: f64,
    pub f0_min_hz: f64,
    pub q25_hz: f64,
    pub q50_hz: f64,
    pub q75_hz: f64,
    pub fpeak_hz: f64,
    pub sound_duration_s: f64,
    pub am_var_db_per_s: f64,
    pub am_rate_per_s: f64,
    pub am_extent_db: f64,
    pub harmonicity_db: f64,
    pub formant_means_hz: [Option<f64>; 8],
    pub wiener_entropy_mean: f64,
    pub voiced_frames: usize,
    pub unstable_formant_frames: usize,
}

impl CallMeasurement {
    pub fn formants_found(&self) -> usize {
        self.formant_means_hz.iter().filter(|f| f.is_some()).count()
    }

    /// Builds the feature vector, taking missing formant means from `fill`.
    pub fn to_features(&self, fill: &[f64; 8]) -> FeatureVector {
        let formant_means_hz: [f64; 8] =
            std::array::from_fn(|i| self.formant_means_hz[i].unwrap_or(fill[i]));
        FeatureVector {
            f0_mean_hz: self.f0_mean_hz,
            f0_max_hz: self.f0_max_hz,
            f0_min_hz: self.f0_min_hz,
            f0_range_hz: self.f0_max_hz - self.f0_min_hz,
            q25_hz: self.q25_hz,
            q50_hz: self.q50_hz,
            q75_hz: self.q75_hz,
            fpeak_hz: self.fpeak_hz,
            sound_duration_s: self.sound_duration_s,
            am_var_db_per_s: self.am_var_db_per_s,
            am_rate_per_s: self.am_rate_per_s,
            am_extent_db: self.am_extent_db,
            harmonicity_db: self.harmonicity_db,
            formant_means_hz,
            formant_dispersal_hz: formant_dispersal(&formant_means_hz),
            wiener_entropy_mean: self.wiener_entropy_mean,
        }
    }
}

fn harmonicity_db(strength: f64) -> f64 {
    let r = strength.clamp(0.01, 0.999);
    10.0 * (r / (1.0 - r)).log10()
}

pub fn measure_call(clip: &AudioClip, cfg: &AnalysisConfig) -> Result<CallMeasurement, FeatureError> {
    let sg = spectrogram(clip, cfg.window_s, cfg.hop_s)?;
    let spectral = spectral_stats(&sg)?;

    let ceiling = cfg.pitch_ceiling_hz.min(clip.sample_rate() / 2.0);
    let pitch = estimate_f0(
        clip,
        cfg.pitch_floor_hz,
        ceiling,
        cfg.hop_s,
        cfg.voicing_threshold,
    )?;
    let voiced: Vec<(f64, f64)> = pitch.voiced().collect();
    if voiced.is_empty() {
        return Err(FeatureError::UnvoicedCall);
    }
    let n = voiced.len() as f64;
    let f0_mean_hz = voiced.iter().map(|v| v.0).sum::<f64>() / n;
    let f0_max_hz = voiced.iter().map(|v| v.0).fold(f64::MIN, f64::max);
    let f0_min_hz = voiced.iter().map(|v| v.0).fold(f64::MAX, f64::min);
    let harmonicity = voiced.iter().map(|v| harmonicity_db(v.1)).sum::<f64>() / n;

    let tracks = estimate_formants(clip, cfg)?;
    let formant_means_hz = std::array::from_fn(|slot| tracks.mean(slot));

    let duration = clip.duration_s();
    let env = amplitude_envelope(clip, cfg.envelope_frame_s, cfg.hop_s)?;
    let am = am_metrics(&env, duration, cfg.am_prominence_db);

    Ok(CallMeasurement {
        f0_mean_hz: f0_mean_hz.clamp(f0_min_hz, f0_max_hz),
        f0_max_hz,
        f0_min_hz,
        q25_hz: spectral.q25_hz,
        q50_hz: spectral.q50_hz,
        q75_hz: spectral.q75_hz,
        fpeak_hz: spectral.fpeak_hz,
        sound_duration_s: duration,
        am_var_db_per_s: am.am_var_db_per_s,
        am_rate_per_s: am.am_rate_per_s,
        am_extent_db: am.am_extent_db,
        harmonicity_db: harmonicity,
        formant_means_hz,
        wiener_entropy_mean: spectral.wiener_entropy_mean,
        voiced_frames: voiced.len(),
        unstable_formant_frames: tracks.unstable_frames(),
    })
}

/// Extracts a complete feature vector from one call. Fails with
/// `IncompleteFormants` if any of the eight formant tracks is empty; use
/// [`extract_corpus`] to impute those at corpus level.
pub fn extract_features(clip: &AudioClip, cfg: &AnalysisConfig) -> Result<FeatureVector, FeatureError> {
    let m = measure_call(clip, cfg)?;
    let found = m.formants_found();
    if found < 8 {
        return Err(FeatureError::IncompleteFormants { found });
    }
    Ok(m.to_features(&[0.0; 8]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionFailure {
    pub row: usize,
    pub source_id: String,
    pub path: String,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImputationFlags {
    pub source_id: String,
    /// `true` where the formant mean was imputed.
    pub imputed: [bool; 8],
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusExtraction {
    pub corpus: LabeledCorpus,
    pub failures: Vec<ExtractionFailure>,
    pub imputation: Vec<ImputationFlags>,
    /// Per-slot median used to fill missing formant means.
    pub formant_medians_hz: [f64; 8],
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 0 {
        0.5 * (values[mid - 1] + values[mid])
    } else {
        values[mid]
    })
}

/// Reads and measures every manifest entry (in parallel, order preserved),
/// then fills missing formant means with the per-slot corpus median.
/// Entries that fail are reported in `failures` and skipped.
pub fn extract_corpus(manifest: &Manifest, cfg: &AnalysisConfig) -> Result<CorpusExtraction, FeatureError> {
    let results: Vec<Result<CallMeasurement, FeatureError>> = manifest
        .entries
        .par_iter()
        .map(|e| {
            if !e.path.is_file() {
                return Err(FeatureError::MissingFile(e.path.display().to_string()));
            }
            let clip = read_wav(&e.path)?;
            measure_call(&clip, cfg)
        })
        .collect();

    let mut measured = Vec::new();
    let mut failures = Vec::new();
    for (i, (entry, result)) in manifest.entries.iter().zip(results).enumerate() {
        match result {
            Ok(m) => measured.push((entry, m)),
            Err(err) => failures.push(ExtractionFailure {
                row: i + 1,
                source_id: entry.source_id.clone(),
                path: entry.path.display().to_string(),
                kind: err.kind().to_string(),
                message: err.to_string(),
            }),
        }
    }
    if measured.is_empty() {
        return Err(FeatureError::NothingExtracted);
    }

    let mut medians = [0.0; 8];
    for (slot, m) in medians.iter_mut().enumerate() {
        let mut values: Vec<f64> = measured
            .iter()
            .filter_map(|(_, c)| c.formant_means_hz[slot])
            .collect();
        if values.len() < measured.len() {
            *m = median(&mut values).ok_or(FeatureError::NoFormantValues { slot: slot + 1 })?;
        }
    }

    let mut rows = Vec::with_capacity(measured.len());
    let mut imputation = Vec::with_capacity(measured.len());
    for (entry, m) in &measured {
        rows.push(CorpusRow {
            source_id: entry.source_id.clone(),
            features: m.to_features(&medians),
            label: entry.label.clone(),
        });
        imputation.push(ImputationFlags {
            source_id: entry.source_id.clone(),
            imputed: std::array::from_fn(|i| m.formant_means_hz[i].is_none()),
        });
    }
    Ok(CorpusExtraction {
        corpus: LabeledCorpus::new(rows),
        failures,
        imputation,
        formant_medians_hz: medians,
    })
}
