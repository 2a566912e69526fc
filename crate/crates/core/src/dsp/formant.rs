//! Formant tracking by linear prediction.
//!
//! The clip is resampled to twice the formant ceiling and pre-emphasised.
//! Each Hann-windowed frame is fitted with a Burg all-pole model of order
//! `2 * n_formants + 2`; the poles of that model in the upper half plane are
//! resonances, and the narrow ones inside the analysis band are formants.

use nalgebra::DMatrix;

use super::{hann, resample, samples_for, AnalysisConfig, DspError, Framing};
use crate::io::AudioClip;

const MIN_FORMANT_HZ: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormantTracks {
    pub times_s: Vec<f64>,
    /// Per frame, strictly ascending formant frequencies (at most
    /// `n_formants`). An empty list marks an unstable frame.
    pub frequencies: Vec<Vec<f64>>,
    pub ceiling_hz: f64,
}

impl FormantTracks {
    pub fn unstable_frames(&self) -> usize {
        self.frequencies.iter().filter(|f| f.is_empty()).count()
    }

    /// Mean of formant `slot` (0-based) over the frames where it was found.
    pub fn mean(&self, slot: usize) -> Option<f64> {
        let (sum, n) = self
            .frequencies
            .iter()
            .filter_map(|f| f.get(slot))
            .fold((0.0, 0usize), |(s, n), &v| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }
}

/// Burg's method. Returns `[1, a1, ..., ap]` such that
/// `x[n] + a1 x[n-1] + ... + ap x[n-p]` is the prediction error, or `None`
/// when the frame has no energy or is shorter than the order.
pub fn burg_lpc(x: &[f64], order: usize) -> Option<Vec<f64>> {
    if x.len() <= order + 1 {
        return None;
    }
    let last = x.len() - 1;
    let mut f = x.to_vec();
    let mut b = x.to_vec();
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut d: f64 = 2.0 * x.iter().map(|v| v * v).sum::<f64>() - x[0] * x[0] - x[last] * x[last];
    if d <= 0.0 {
        return None;
    }
    for k in 0..order {
        let span = last - k;
        let mut mu = 0.0;
        for n in 0..span {
            mu += f[n + k + 1] * b[n];
        }
        mu *= -2.0 / d;
        if !mu.is_finite() {
            return None;
        }
        for n in 0..=(k + 1) / 2 {
            let t1 = a[n] + mu * a[k + 1 - n];
            let t2 = a[k + 1 - n] + mu * a[n];
            a[n] = t1;
            a[k + 1 - n] = t2;
        }
        for n in 0..span {
            let t1 = f[n + k + 1] + mu * b[n];
            let t2 = b[n] + mu * f[n + k + 1];
            f[n + k + 1] = t1;
            b[n] = t2;
        }
        d = (1.0 - mu * mu) * d - f[k + 1] * f[k + 1] - b[last - k - 1] * b[last - k - 1];
        if d <= 0.0 {
            // perfectly predicted; higher coefficients stay zero
            break;
        }
    }
    Some(a)
}

/// Resonances of the all-pole filter `1 / A(z)` with `a = [1, a1, ..., ap]`,
/// sorted by frequency. Poles outside the unit circle are reflected inside.
pub fn lpc_resonances(a: &[f64], sample_rate: f64) -> Vec<Resonance> {
    let p = a.len() - 1;
    if p == 0 {
        return Vec::new();
    }
    let mut companion = DMatrix::<f64>::zeros(p, p);
    for j in 0..p {
        companion[(0, j)] = -a[j + 1] / a[0];
    }
    for i in 1..p {
        companion[(i, i - 1)] = 1.0;
    }
    let mut out: Vec<Resonance> = companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im > 0.0)
        .map(|z| {
            let mut r = z.norm();
            if r > 1.0 {
                r = 1.0 / r;
            }
            Resonance {
                frequency_hz: z.im.atan2(z.re) * sample_rate / (2.0 * std::f64::consts::PI),
                bandwidth_hz: -r.ln() * sample_rate / std::f64::consts::PI,
            }
        })
        .filter(|r| r.frequency_hz.is_finite() && r.bandwidth_hz.is_finite())
        .collect();
    out.sort_by(|x, y| x.frequency_hz.total_cmp(&y.frequency_hz));
    out
}

pub fn estimate_formants(clip: &AudioClip, cfg: &AnalysisConfig) -> Result<FormantTracks, DspError> {
    let sr = clip.sample_rate();
    let ceiling = cfg.formant_ceiling_hz;
    if !(1..=8).contains(&cfg.n_formants) {
        return Err(DspError::BadParameter(format!(
            "n_formants must be 1..=8, got {}",
            cfg.n_formants
        )));
    }
    if !(ceiling > 0.0 && ceiling <= sr / 2.0) {
        return Err(DspError::BadParameter(format!(
            "formant ceiling {ceiling} Hz exceeds Nyquist of {sr} Hz"
        )));
    }
    let rate = 2.0 * ceiling;
    let mut signal = resample(clip.samples(), sr, rate);
    if signal.is_empty() {
        return Err(DspError::ClipTooShort);
    }
    for i in (1..signal.len()).rev() {
        signal[i] -= cfg.preemphasis * signal[i - 1];
    }
    let order = 2 * cfg.n_formants + 2;
    let width = samples_for(cfg.formant_window_s, rate).max(order + 2);
    let framing = Framing::new(signal.len(), width, samples_for(cfg.hop_s, rate));
    let window = hann(width);
    let mut frame = vec![0.0; width];
    let mut tracks = FormantTracks {
        times_s: Vec::with_capacity(framing.count),
        frequencies: Vec::with_capacity(framing.count),
        ceiling_hz: ceiling,
    };
    for i in 0..framing.count {
        framing.fill(&signal, i, &mut frame);
        frame.iter_mut().zip(&window).for_each(|(x, w)| *x *= w);
        let mut found: Vec<f64> = Vec::with_capacity(cfg.n_formants);
        if let Some(a) = burg_lpc(&frame, order) {
            for r in lpc_resonances(&a, rate) {
                let in_band =
                    r.frequency_hz >= MIN_FORMANT_HZ && r.frequency_hz <= ceiling - MIN_FORMANT_HZ;
                let narrow = r.bandwidth_hz < cfg.max_formant_bandwidth_hz;
                let ascending = found.last().is_none_or(|&prev| r.frequency_hz > prev);
                if in_band && narrow && ascending && found.len() < cfg.n_formants {
                    found.push(r.frequency_hz);
                }
            }
        }
        tracks.times_s.push(framing.center_s(i, rate));
        tracks.frequencies.push(found);
    }
    Ok(tracks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burg_recovers_ar2() {
        // x[n] = 1.6 x[n-1] - 0.8 x[n-2] + small deterministic excitation
        let mut x = vec![0.0; 4000];
        let mut state = 12345u64;
        for n in 2..x.len() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let e = ((state >> 33) as f64 / (1u64 << 31) as f64) - 0.5;
            x[n] = 1.6 * x[n - 1] - 0.8 * x[n - 2] + e;
        }
        let a = burg_lpc(&x, 2).unwrap();
        assert!((a[1] + 1.6).abs() < 0.02, "{a:?}");
        assert!((a[2] - 0.8).abs() < 0.02, "{a:?}");
    }

    #[test]
    fn resonance_of_known_pole_pair() {
        let fs = 10000.0;
        let (f, bw) = (1200.0, 100.0);
        let r = (-std::f64::consts::PI * bw / fs).exp();
        let theta = 2.0 * std::f64::consts::PI * f / fs;
        let a = [1.0, -2.0 * r * theta.cos(), r * r];
        let res = lpc_resonances(&a, fs);
        assert_eq!(res.len(), 1);
        assert!((res[0].frequency_hz - f).abs() < 1e-6);
        assert!((res[0].bandwidth_hz - bw).abs() < 1e-6);
    }

    #[test]
    fn silent_frame_is_unstable() {
        assert!(burg_lpc(&[0.0; 100], 10).is_none());
        let clip = AudioClip::new(vec![0.0; 4410], 44100, "z").unwrap();
        let t = estimate_formants(&clip, &AnalysisConfig::default()).unwrap();
        assert_eq!(t.unstable_frames(), t.frequencies.len());
        assert_eq!(t.mean(0), None);
    }

    #[test]
    fn rejects_bad_settings() {
        let clip = AudioClip::new(vec![0.0; 4410], 8000, "z").unwrap();
        assert!(estimate_formants(&clip, &AnalysisConfig::default()).is_err());
        let cfg = AnalysisConfig {
            n_formants: 9,
            ..AnalysisConfig::default()
        };
        let clip = AudioClip::new(vec![0.0; 4410], 44100, "z").unwrap();
        assert!(estimate_formants(&clip, &cfg).is_err());
    }
}
