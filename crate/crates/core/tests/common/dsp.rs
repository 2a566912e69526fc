use cowvox::dsp::{
    amplitude_envelope, estimate_f0, estimate_formants, spectral_stats, spectrogram, AnalysisConfig,
};
use cowvox::features::{am_metrics, measure_call};
use cowvox::io::AudioClip;
use cowvox::synth;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Check;
use crate::ensure;

pub const SR: u32 = 44100;

pub fn clip(x: Vec<f64>) -> AudioClip {
    synth::clip(x, SR, "fixture")
}

pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

fn f0_within(x: Vec<f64>, target: f64, tol: f64) -> Check {
    let p = estimate_f0(&clip(x), 50.0, 2000.0, 0.01, 0.45).map_err(|e| e.to_string())?;
    ensure!(p.voiced_fraction() > 0.9, "only {:.2} of frames voiced", p.voiced_fraction());
    for (f, _) in p.voiced() {
        ensure!((f - target).abs() / target < tol, "frame F0 {f:.2} Hz vs {target} Hz");
    }
    Ok(())
}

pub fn f0_sine_440() -> Check {
    f0_within(synth::sine(440.0, 1.0, SR, 0.5), 440.0, 0.01)
}

pub fn f0_sawtooth_220() -> Check {
    f0_within(synth::sawtooth(220.0, 1.0, SR, 20, 0.8), 220.0, 0.01)
}

/// Formant means with the model order matched to the number of synthesised
/// resonances (`2 * n + 2` poles).
pub fn formant_means(x: Vec<f64>, n_formants: usize) -> Result<Vec<f64>, String> {
    let cfg = AnalysisConfig {
        n_formants,
        ..AnalysisConfig::default()
    };
    let tracks = estimate_formants(&clip(x), &cfg).map_err(|e| e.to_string())?;
    for frame in &tracks.frequencies {
        ensure!(frame.windows(2).all(|w| w[0] < w[1]), "frame not ascending: {frame:?}");
        ensure!(frame.iter().all(|&f| f > 0.0 && f < tracks.ceiling_hz), "formant outside band");
    }
    (0..n_formants)
        .map(|s| tracks.mean(s).ok_or_else(|| format!("formant {} never found", s + 1)))
        .collect()
}

pub fn formants_pulse_800_1600() -> Check {
    let (x, _) = synth::source_filter(150.0, &[800.0, 1600.0], &[80.0, 80.0], 0.5, SR, 0.8);
    let m = formant_means(x, 2)?;
    ensure!((m[0] - 800.0).abs() / 800.0 < 0.05, "F1 {:.1} Hz", m[0]);
    ensure!((m[1] - 1600.0).abs() / 1600.0 < 0.05, "F2 {:.1} Hz", m[1]);
    Ok(())
}

pub fn formant_noise_1200() -> Check {
    let (x, _) = synth::resonated_noise(&[1200.0], &[80.0], 0.5, SR, 0.8, 7);
    let m = formant_means(x, 1)?;
    ensure!((m[0] - 1200.0).abs() / 1200.0 < 0.05, "F1 {:.1} Hz", m[0]);
    Ok(())
}

/// Frame energies computed directly from the documented centred framing.
pub fn parseval() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for len in [20_000usize, 5_000, 12_345] {
        let x: Vec<f64> = (0..len).map(|_| rng.random_range(-0.9..0.9)).collect();
        let sg = spectrogram(&clip(x.clone()), 0.03, 0.01).map_err(|e| e.to_string())?;
        let width = (0.03 * SR as f64).round() as usize;
        let hop = (0.01 * SR as f64).round() as usize;
        let count = 1 + (x.len() - width) / hop;
        let offset = (x.len() - width - (count - 1) * hop) / 2;
        ensure!(sg.n_frames() == count, "{} frames, expected {count}", sg.n_frames());
        let w = hann(width);
        for i in 0..count {
            let start = offset + i * hop;
            let energy: f64 = (0..width).map(|j| (x[start + j] * w[j]).powi(2)).sum();
            let power: f64 = sg.frame(i).iter().sum();
            ensure!((energy - power).abs() / energy < 1e-9, "frame {i}: {energy} vs {power}");
        }
    }
    Ok(())
}

/// Quartiles against an independent average-and-scan of the spectrogram.
pub fn quartiles_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let noise: Vec<f64> = (0..8820).map(|_| rng.random_range(-0.5..0.5)).collect();
        let (res, _) = synth::resonated_noise(&[rng.random_range(300.0..4000.0)], &[200.0], 0.2, SR, 0.7, rng.random());
        let mixed: Vec<f64> = noise.iter().zip(&res).map(|(a, b)| 0.3 * a + 0.6 * b).collect();
        let sg = spectrogram(&clip(mixed), 0.03, 0.01).map_err(|e| e.to_string())?;
        let nb = sg.n_bins();
        let mut avg = vec![0.0; nb];
        for frame in sg.frames() {
            avg.iter_mut().zip(frame).for_each(|(a, p)| *a += p);
        }
        avg.iter_mut().for_each(|a| *a /= sg.n_frames() as f64);
        let total: f64 = avg.iter().sum();
        let scan = |q: f64| {
            let mut acc = 0.0;
            for k in 0..nb {
                acc += avg[k];
                if acc >= q * total {
                    return sg.freqs_hz[k];
                }
            }
            sg.freqs_hz[nb - 1]
        };
        let s = spectral_stats(&sg).map_err(|e| e.to_string())?;
        ensure!(s.q25_hz == scan(0.25), "q25 {} vs {}", s.q25_hz, scan(0.25));
        ensure!(s.q50_hz == scan(0.5), "q50 {} vs {}", s.q50_hz, scan(0.5));
        ensure!(s.q75_hz == scan(0.75), "q75 {} vs {}", s.q75_hz, scan(0.75));
    }
    Ok(())
}

pub fn am_tone_metrics() -> Check {
    let c = clip(synth::am_tone_db(440.0, 5.0, 6.0, 2.0, SR, 0.8));
    let m = measure_call(&c, &AnalysisConfig::default()).map_err(|e| e.to_string())?;
    ensure!((m.am_rate_per_s - 5.0).abs() <= 0.5, "AMRate {}", m.am_rate_per_s);
    ensure!((m.am_extent_db - 6.0).abs() <= 1.0, "AMExtent {}", m.am_extent_db);
    let c = clip(synth::am_tone_linear(1000.0, 5.0, 0.5, 2.0, SR, 0.8));
    let env = amplitude_envelope(&c, 0.03, 0.01).map_err(|e| e.to_string())?;
    let l = &env.level_db;
    let maxima = (1..l.len() - 1).filter(|&i| l[i] > l[i - 1] && l[i] >= l[i + 1]).count();
    ensure!((9..=11).contains(&maxima), "{maxima} envelope maxima for 5 Hz AM over 2 s");
    let m = measure_call(&clip(synth::sine(440.0, 1.0, SR, 0.5)), &AnalysisConfig::default())
        .map_err(|e| e.to_string())?;
    ensure!(m.am_rate_per_s == 0.0 && m.am_var_db_per_s < 1.0, "constant sine AMRate {} AMVar {}", m.am_rate_per_s, m.am_var_db_per_s);
    Ok(())
}

pub fn am_var_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = clip((0..22050).map(|i| (0.2 + 0.6 * rng.random::<f64>()) * ((i as f64) * 0.1).sin()).collect());
    let env = amplitude_envelope(&c, 0.03, 0.01).map_err(|e| e.to_string())?;
    let m = am_metrics(&env, c.duration_s(), 2.0);
    let mut total = 0.0;
    for i in 1..env.level_db.len() {
        total += (env.level_db[i] - env.level_db[i - 1]).abs();
    }
    ensure!((m.am_var_db_per_s - total / c.duration_s()).abs() < 1e-12, "AMVar differs from brute force");
    Ok(())
}
