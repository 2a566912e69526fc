//! Deterministic test signals and synthetic corpora with known ground truth.
//!
//! Signals are returned as sample vectors in [-1, 1]; wrap them with
//! [`AudioClip::new`] or write them with [`crate::io::write_wav`].

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::features::{FeatureVector, FEATURE_NAMES, N_FEATURES};
use crate::io::{AudioClip, CallLabel, CallType, CorpusRow, LabeledCorpus};
use crate::learn::{Dataset, Matrix};
use crate::seed::rng_for;

const SYNTH_STREAM: u64 = 0x5359;

fn n_samples(duration_s: f64, sample_rate: u32) -> usize {
    (duration_s * sample_rate as f64).round() as usize
}

fn normalize_peak(mut x: Vec<f64>, peak: f64) -> Vec<f64> {
    let m = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if m > 0.0 {
        x.iter_mut().for_each(|v| *v *= peak / m);
    }
    x
}

pub fn clip(samples: Vec<f64>, sample_rate: u32, source_id: &str) -> AudioClip {
    AudioClip::new(samples, sample_rate, source_id).expect("synthesised samples lie in [-1, 1]")
}

pub fn sine(freq_hz: f64, duration_s: f64, sample_rate: u32, amplitude: f64) -> Vec<f64> {
    let sr = sample_rate as f64;
    (0..n_samples(duration_s, sample_rate))
        .map(|i| amplitude * (2.0 * PI * freq_hz * i as f64 / sr).sin())
        .collect()
}

/// Band-limited sawtooth from `harmonics` partials with 1/h amplitudes,
/// scaled to the given peak.
pub fn sawtooth(f0_hz: f64, duration_s: f64, sample_rate: u32, harmonics: usize, peak: f64) -> Vec<f64> {
    let sr = sample_rate as f64;
    let x = (0..n_samples(duration_s, sample_rate))
        .map(|i| {
            let t = i as f64 / sr;
            (1..=harmonics)
                .filter(|&h| h as f64 * f0_hz < sr / 2.0)
                .map(|h| (2.0 * PI * h as f64 * f0_hz * t).sin() / h as f64)
                .sum()
        })
        .collect();
    normalize_peak(x, peak)
}

/// Tone whose level in dB follows a sinusoid of `rate_hz` spanning
/// `peak_to_trough_db`; the loudest point has amplitude `peak`.
pub fn am_tone_db(
    carrier_hz: f64,
    rate_hz: f64,
    peak_to_trough_db: f64,
    duration_s: f64,
    sample_rate: u32,
    peak: f64,
) -> Vec<f64> {
    let sr = sample_rate as f64;
    let half = peak_to_trough_db / 2.0;
    (0..n_samples(duration_s, sample_rate))
        .map(|i| {
            let t = i as f64 / sr;
            let db = half * (2.0 * PI * rate_hz * t).sin() - half;
            peak * 10f64.powf(db / 20.0) * (2.0 * PI * carrier_hz * t).sin()
        })
        .collect()
}

/// Tone with linear modulation `1 + depth·sin(2π·rate·t)`.
pub fn am_tone_linear(
    carrier_hz: f64,
    rate_hz: f64,
    depth: f64,
    duration_s: f64,
    sample_rate: u32,
    peak: f64,
) -> Vec<f64> {
    let sr = sample_rate as f64;
    (0..n_samples(duration_s, sample_rate))
        .map(|i| {
            let t = i as f64 / sr;
            let env = (1.0 + depth * (2.0 * PI * rate_hz * t).sin()) / (1.0 + depth);
            peak * env * (2.0 * PI * carrier_hz * t).sin()
        })
        .collect()
}

/// Uniform white noise in `[-amplitude, amplitude]`.
pub fn white_noise(duration_s: f64, sample_rate: u32, amplitude: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng_for(seed, &[SYNTH_STREAM, 1]);
    (0..n_samples(duration_s, sample_rate))
        .map(|_| rng.random_range(-amplitude..=amplitude))
        .collect()
}

/// Two-pole resonator.
#[derive(Debug, Clone, Copy)]
struct Resonator {
    a1: f64,
    a2: f64,
    gain: f64,
}

impl Resonator {
    fn new(center_hz: f64, bandwidth_hz: f64, sample_rate: f64) -> Self {
        let r = (-PI * bandwidth_hz / sample_rate).exp();
        Self {
            a1: -2.0 * r * (2.0 * PI * center_hz / sample_rate).cos(),
            a2: r * r,
            gain: 1.0 - r,
        }
    }

    fn filter(&self, x: &[f64]) -> Vec<f64> {
        let (mut y1, mut y2) = (0.0, 0.0);
        x.iter()
            .map(|&v| {
                let y = self.gain * v - self.a1 * y1 - self.a2 * y2;
                y2 = y1;
                y1 = y;
                y
            })
            .collect()
    }
}

fn resonate(mut x: Vec<f64>, centers_hz: &[f64], bandwidths_hz: &[f64], sample_rate: u32) -> Vec<f64> {
    for (&c, &b) in centers_hz.iter().zip(bandwidths_hz) {
        x = Resonator::new(c, b, sample_rate as f64).filter(&x);
    }
    x
}

/// Ground truth written next to a source-filter fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormantTruth {
    pub f0_hz: Option<f64>,
    pub formants_hz: Vec<f64>,
    pub bandwidths_hz: Vec<f64>,
    pub sample_rate_hz: u32,
    pub duration_s: f64,
}

/// Impulse train at `f0_hz` through cascaded resonators at `formants_hz`.
pub fn source_filter(
    f0_hz: f64,
    formants_hz: &[f64],
    bandwidths_hz: &[f64],
    duration_s: f64,
    sample_rate: u32,
    peak: f64,
) -> (Vec<f64>, FormantTruth) {
    let n = n_samples(duration_s, sample_rate);
    let period = sample_rate as f64 / f0_hz;
    let mut source = vec![0.0; n];
    let mut t = 0.0_f64;
    while (t.round() as usize) < n {
        source[t.round() as usize] = 1.0;
        t += period;
    }
    let x = normalize_peak(resonate(source, formants_hz, bandwidths_hz, sample_rate), peak);
    let truth = FormantTruth {
        f0_hz: Some(f0_hz),
        formants_hz: formants_hz.to_vec(),
        bandwidths_hz: bandwidths_hz.to_vec(),
        sample_rate_hz: sample_rate,
        duration_s,
    };
    (x, truth)
}

/// White noise through cascaded resonators.
pub fn resonated_noise(
    formants_hz: &[f64],
    bandwidths_hz: &[f64],
    duration_s: f64,
    sample_rate: u32,
    peak: f64,
    seed: u64,
) -> (Vec<f64>, FormantTruth) {
    let noise = white_noise(duration_s, sample_rate, 1.0, seed);
    let x = normalize_peak(resonate(noise, formants_hz, bandwidths_hz, sample_rate), peak);
    let truth = FormantTruth {
        f0_hz: None,
        formants_hz: formants_hz.to_vec(),
        bandwidths_hz: bandwidths_hz.to_vec(),
        sample_rate_hz: sample_rate,
        duration_s,
    };
    (x, truth)
}

fn class_center(class: usize, separation: f64, m: usize) -> Vec<f64> {
    // one axis per class, flipped sign after the axes run out; any two
    // centres are `separation` apart
    let mut c = vec![0.0; m];
    let sign = if (class / m) % 2 == 0 { 1.0 } else { -1.0 };
    c[class % m] = sign * separation / std::f64::consts::SQRT_2;
    c
}

fn gaussian_rows(
    centers: &[Vec<f64>],
    per_class: usize,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = rng_for(seed, &[SYNTH_STREAM, 2]);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..per_class {
            rows.push(center.iter().map(|&mu| mu + rng.sample::<f64, _>(StandardNormal)).collect());
            y.push(c);
        }
    }
    (rows, y)
}

fn names(m: usize) -> Vec<String> {
    if m == N_FEATURES {
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (0..m).map(|j| format!("x{j}")).collect()
    }
}

/// Isotropic unit-variance Gaussian blobs, one per class, with centres
/// `separation` standard deviations apart.
pub fn blobs(n_classes: usize, per_class: usize, m: usize, separation: f64, seed: u64) -> Dataset {
    let centers: Vec<Vec<f64>> = (0..n_classes).map(|c| class_center(c, separation, m)).collect();
    let (rows, y) = gaussian_rows(&centers, per_class, seed);
    Dataset::new(
        Matrix::from_rows(&rows),
        y,
        (0..n_classes).map(|c| format!("c{c}")).collect(),
        names(m),
    )
    .expect("consistent shapes")
}

/// Blobs as a labelled feature table. Class `c` becomes cow `cowNN`; even
/// classes are HF calls and odd classes LF.
pub fn blobs_corpus(n_classes: usize, per_class: usize, separation: f64, seed: u64) -> LabeledCorpus {
    let d = blobs(n_classes, per_class, N_FEATURES, separation, seed);
    let rows = (0..d.len())
        .map(|i| {
            let c = d.y[i];
            let mut a = [0.0; N_FEATURES];
            a.copy_from_slice(d.x.row(i));
            CorpusRow {
                source_id: format!("blob{:05}", i + 1),
                features: FeatureVector::from_array(&a),
                label: CallLabel {
                    cow_id: format!("cow{:02}", c + 1),
                    call_type: if c % 2 == 0 { CallType::Hf } else { CallType::Lf },
                },
            }
        })
        .collect();
    LabeledCorpus::new(rows)
}

/// Two uniform features on [-1, 1]; the label is the XOR of their signs.
pub fn xor(n: usize, seed: u64) -> Dataset {
    let mut rng = rng_for(seed, &[SYNTH_STREAM, 3]);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        y.push(usize::from((a > 0.0) != (b > 0.0)));
        rows.push(vec![a, b]);
    }
    Dataset::new(Matrix::from_rows(&rows), y, vec!["same".into(), "differ".into()], names(2))
        .expect("consistent shapes")
}

/// `m` standard-normal columns; the label is the sign of column `planted`.
pub fn planted_feature(n: usize, m: usize, planted: usize, seed: u64) -> Dataset {
    let mut rng = rng_for(seed, &[SYNTH_STREAM, 4]);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        y.push(usize::from(row[planted] > 0.0));
        rows.push(row);
    }
    Dataset::new(Matrix::from_rows(&rows), y, vec!["neg".into(), "pos".into()], names(m))
        .expect("consistent shapes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_and_range() {
        assert_eq!(sine(440.0, 1.0, 44100, 0.5).len(), 44100);
        let s = sawtooth(220.0, 0.1, 16000, 20, 0.9);
        let peak = s.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        assert!((peak - 0.9).abs() < 1e-12);
        assert!(white_noise(0.1, 8000, 0.5, 1).iter().all(|v| v.abs() <= 0.5));
    }

    #[test]
    fn am_db_swings_by_depth() {
        let x = am_tone_db(1000.0, 5.0, 6.0, 1.0, 44100, 0.8);
        let peak = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        assert!((peak - 0.8).abs() < 1e-3);
    }

    #[test]
    fn blobs_centres_separated() {
        let a = class_center(0, 6.0, 23);
        let b = class_center(24, 6.0, 23);
        let d: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((d - 6.0).abs() < 1e-12);
        let c = blobs_corpus(20, 50, 6.0, 1);
        assert_eq!(c.len(), 1000);
        assert_eq!(c.cow_ids().len(), 20);
    }

    #[test]
    fn deterministic() {
        assert_eq!(xor(50, 3), xor(50, 3));
        assert_eq!(planted_feature(20, 23, 5, 1), planted_feature(20, 23, 5, 1));
    }
}
