//! Signal analysis primitives for single calls.

mod envelope;
mod formant;
mod pitch;
mod resample;
mod spectral;
mod spectrogram;

pub use envelope::{amplitude_envelope, EnvelopeDb, ENVELOPE_FLOOR_DB};
pub use formant::{burg_lpc, estimate_formants, lpc_resonances, FormantTracks, Resonance};
pub use pitch::{estimate_f0, PitchContour};
pub use resample::resample;
pub use spectral::{spectral_stats, SpectralStats, FLATNESS_EPSILON};
pub use spectrogram::{spectrogram, Spectrogram};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DspError {
    #[error("clip is too short for analysis")]
    ClipTooShort,
    #[error("all spectral power is zero")]
    SilentClip,
    #[error("pitch search band is empty: shortest lag {min_lag} samples is below 2")]
    BandEmpty { min_lag: usize },
    #[error("invalid analysis parameter: {0}")]
    BadParameter(String),
}

/// Analysis settings shared by feature extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub window_s: f64,
    pub hop_s: f64,
    pub pitch_floor_hz: f64,
    pub pitch_ceiling_hz: f64,
    pub voicing_threshold: f64,
    pub formant_ceiling_hz: f64,
    pub n_formants: usize,
    pub formant_window_s: f64,
    pub preemphasis: f64,
    pub max_formant_bandwidth_hz: f64,
    pub envelope_frame_s: f64,
    pub am_prominence_db: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            window_s: 0.03,
            hop_s: 0.01,
            pitch_floor_hz: 50.0,
            pitch_ceiling_hz: 2000.0,
            voicing_threshold: 0.45,
            formant_ceiling_hz: 5000.0,
            n_formants: 8,
            formant_window_s: 0.025,
            preemphasis: 0.97,
            max_formant_bandwidth_hz: 700.0,
            envelope_frame_s: 0.03,
            am_prominence_db: 2.0,
        }
    }
}

/// Frame layout over a signal of `len` samples: `count` frames of `width`
/// samples spaced by `hop`, centred so leftover samples split evenly between
/// both ends. Signals shorter than one frame get a single zero-padded frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Framing {
    pub width: usize,
    pub hop: usize,
    pub count: usize,
    pub offset: usize,
}

impl Framing {
    pub fn new(len: usize, width: usize, hop: usize) -> Self {
        let hop = hop.max(1);
        if len <= width {
            return Self {
                width,
                hop,
                count: 1,
                offset: 0,
            };
        }
        let count = (len - width) / hop + 1;
        let offset = (len - width - (count - 1) * hop) / 2;
        Self {
            width,
            hop,
            count,
            offset,
        }
    }

    pub fn start(&self, i: usize) -> usize {
        self.offset + i * self.hop
    }

    /// Copies frame `i` into `buf`, zero-padding past the signal end.
    pub fn fill(&self, signal: &[f64], i: usize, buf: &mut [f64]) {
        let start = self.start(i);
        for (j, b) in buf.iter_mut().enumerate().take(self.width) {
            *b = signal.get(start + j).copied().unwrap_or(0.0);
        }
    }

    pub fn center_s(&self, i: usize, sample_rate: f64) -> f64 {
        (self.start(i) as f64 + self.width as f64 / 2.0) / sample_rate
    }
}

/// Symmetric Hann window.
pub(crate) fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

pub(crate) fn samples_for(seconds: f64, sample_rate: f64) -> usize {
    (seconds * sample_rate).round() as usize
}
