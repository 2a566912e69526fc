//! Signal-level oracles: synthetic fixtures with known pitch, resonances and
//! modulation, checked against the analysis outputs.

use cowvox::dsp::{
    amplitude_envelope, estimate_f0, estimate_formants, spectral_stats, spectrogram,
    AnalysisConfig, ENVELOPE_FLOOR_DB,
};
use cowvox::features::{extract_features, measure_call};
use cowvox::io::AudioClip;
use cowvox::synth;
use proptest::prelude::*;

mod common;
use common::dsp::{self, clip, SR};

#[test]
fn f0_sine_440_within_1pct() {
    dsp::f0_sine_440().unwrap();
}

#[test]
fn f0_sawtooth_220_within_1pct_no_octave_error() {
    dsp::f0_sawtooth_220().unwrap();
}

#[test]
fn f0_white_noise_mostly_unvoiced() {
    let mut voiced = 0usize;
    let mut frames = 0usize;
    for seed in 0..100 {
        let c = clip(synth::white_noise(0.3, SR, 0.5, seed));
        let p = estimate_f0(&c, 50.0, 2000.0, 0.01, 0.45).unwrap();
        voiced += p.f0_hz.iter().filter(|f| f.is_some()).count();
        frames += p.f0_hz.len();
    }
    assert!((voiced as f64) / (frames as f64) <= 0.10, "{voiced}/{frames}");
}

#[test]
fn formants_of_pulse_train_through_800_1600() {
    dsp::formants_pulse_800_1600().unwrap();
}

#[test]
fn formant_of_noise_through_1200() {
    dsp::formant_noise_1200().unwrap();
}

#[test]
fn parseval_random_clips() {
    dsp::parseval().unwrap();
}

#[test]
fn sine_spectrum_single_line() {
    let c = clip(synth::sine(1000.0, 1.0, SR, 0.5));
    let sg = spectrogram(&c, 0.03, 0.01).unwrap();
    let bin = sg.freqs_hz[1] - sg.freqs_hz[0];
    for frame in sg.frames() {
        let k = frame.iter().enumerate().fold(0, |b, (k, &p)| if p > frame[b] { k } else { b });
        assert!((sg.freqs_hz[k] - 1000.0).abs() <= bin);
    }
    let s = spectral_stats(&sg).unwrap();
    for q in [s.q25_hz, s.q50_hz, s.q75_hz, s.fpeak_hz] {
        assert!((q - 1000.0).abs() <= bin, "{q}");
    }
    assert!(s.wiener_entropy_mean < -1.0);
}

#[test]
fn quartiles_match_cumulative_scan_oracle() {
    dsp::quartiles_oracle().unwrap();
}

#[test]
fn white_noise_wiener_entropy_near_zero() {
    for seed in 0..100 {
        let c = clip(synth::white_noise(0.5, SR, 0.5, seed));
        let s = spectral_stats(&spectrogram(&c, 0.03, 0.01).unwrap()).unwrap();
        assert!((-0.15..=0.0).contains(&s.wiener_entropy_mean), "seed {seed}: {}", s.wiener_entropy_mean);
    }
}

#[test]
fn envelope_constant_sine_and_silence() {
    let env = amplitude_envelope(&clip(synth::sine(440.0, 1.0, SR, 0.5)), 0.03, 0.01).unwrap();
    let n = env.level_db.len() as f64;
    let mean = env.level_db.iter().sum::<f64>() / n;
    let sd = (env.level_db.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert!(sd < 0.5, "{sd}");
    let env = amplitude_envelope(&clip(vec![0.0; 4410]), 0.03, 0.01).unwrap();
    assert!(env.level_db.iter().all(|&v| v == ENVELOPE_FLOOR_DB));
}

#[test]
fn am_tone_envelope_and_rate() {
    dsp::am_tone_metrics().unwrap();
}

#[test]
fn constant_sine_full_duration() {
    let m = measure_call(&clip(synth::sine(440.0, 1.0, SR, 0.5)), &AnalysisConfig::default()).unwrap();
    assert_eq!(m.sound_duration_s, 1.0);
}

#[test]
fn am_var_brute_force_oracle() {
    dsp::am_var_oracle().unwrap();
}

fn voiced_fixture() -> AudioClip {
    let (x, _) = synth::source_filter(180.0, &[700.0, 1500.0, 2600.0, 3500.0], &[90.0; 4], 0.6, SR, 0.5);
    // 4 Hz, 8 dB level modulation on top of the voiced source
    let env: Vec<f64> = (0..x.len())
        .map(|i| {
            let t = i as f64 / SR as f64;
            10f64.powf((4.0 * (2.0 * std::f64::consts::PI * 4.0 * t).sin() - 4.0) / 20.0)
        })
        .collect();
    clip(x.iter().zip(&env).map(|(a, e)| a * e).collect())
}

#[test]
fn features_deterministic_and_consistent() {
    let cfg = AnalysisConfig::default();
    let c = voiced_fixture();
    let a = measure_call(&c, &cfg).unwrap();
    let b = measure_call(&c, &cfg).unwrap();
    assert_eq!(a, b);
    let fv = a.to_features(&[0.0; 8]);
    assert_eq!(fv.f0_range_hz, fv.f0_max_hz - fv.f0_min_hz);
    assert!(fv.f0_min_hz <= fv.f0_mean_hz && fv.f0_mean_hz <= fv.f0_max_hz);
    assert!(fv.am_rate_per_s >= 0.0 && fv.am_extent_db >= 0.0 && fv.am_var_db_per_s >= 0.0);
    assert!(fv.wiener_entropy_mean <= 0.0);
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-12)
}

#[test]
fn amplitude_scaling_invariance() {
    let cfg = AnalysisConfig::default();
    let c = voiced_fixture();
    let base = measure_call(&c, &cfg).unwrap();
    for gain in [0.5, 0.3, 1.7] {
        let s = measure_call(&c.scaled(gain).unwrap(), &cfg).unwrap();
        let (fa, fb) = (base.to_features(&[0.0; 8]).to_array(), s.to_features(&[0.0; 8]).to_array());
        for (j, (x, y)) in fa.iter().zip(&fb).enumerate() {
            assert!(rel_close(*x, *y, 1e-6), "gain {gain} feature {j}: {x} vs {y}");
        }
        let e0 = amplitude_envelope(&c, 0.03, 0.01).unwrap();
        let e1 = amplitude_envelope(&c.scaled(gain).unwrap(), 0.03, 0.01).unwrap();
        for (a, b) in e0.level_db.iter().zip(&e1.level_db) {
            assert!((b - a - 20.0 * gain.log10()).abs() < 1e-9);
        }
    }
}

#[test]
fn time_reversal_keeps_spectral_summary() {
    let cfg = AnalysisConfig::default();
    // length chosen so frames align identically in both directions
    let n = 441 * 60 + 1323;
    let mut x = synth::white_noise(n as f64 / SR as f64, SR, 0.4, 9);
    let tone = synth::sawtooth(300.0, n as f64 / SR as f64, SR, 20, 0.4);
    x.iter_mut().zip(&tone).for_each(|(a, b)| *a += b);
    let c = clip(x);
    let a = measure_call(&c, &cfg).unwrap();
    let b = measure_call(&c.reversed(), &cfg).unwrap();
    assert_eq!(a.sound_duration_s, b.sound_duration_s);
    for (x, y) in [
        (a.q25_hz, b.q25_hz),
        (a.q50_hz, b.q50_hz),
        (a.q75_hz, b.q75_hz),
        (a.fpeak_hz, b.fpeak_hz),
        (a.wiener_entropy_mean, b.wiener_entropy_mean),
    ] {
        assert!(rel_close(x, y, 1e-6), "{x} vs {y}");
    }
}

#[test]
fn noise_is_unvoiced_call() {
    let c = clip(synth::white_noise(0.5, SR, 0.5, 1));
    assert!(extract_features(&c, &AnalysisConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pitch_inside_band_and_formants_ascending(seed in 0u64..1000, f0 in 80.0f64..900.0) {
        let mut x = synth::sawtooth(f0, 0.25, SR, 10, 0.5);
        let noise = synth::white_noise(0.25, SR, 0.2, seed);
        x.iter_mut().zip(&noise).for_each(|(a, b)| *a += b);
        let c = clip(x);
        let p = estimate_f0(&c, 50.0, 2000.0, 0.01, 0.45).unwrap();
        for f in p.f0_hz.iter().flatten() {
            prop_assert!((50.0..=2000.0).contains(f));
        }
        let t = estimate_formants(&c, &AnalysisConfig::default()).unwrap();
        for frame in &t.frequencies {
            prop_assert!(frame.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(frame.len() <= 8);
        }
        let s = spectral_stats(&spectrogram(&c, 0.03, 0.01).unwrap()).unwrap();
        prop_assert!(s.q25_hz <= s.q50_hz && s.q50_hz <= s.q75_hz);
        prop_assert!(s.wiener_entropy_mean <= 0.0);
    }
}
