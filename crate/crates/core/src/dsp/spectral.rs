use serde::{Deserialize, Serialize};

use super::{DspError, Spectrogram};

/// Floor added to every power value before taking logarithms in the
/// flatness measure, relative to the mean power so the measure does not
/// depend on signal level.
pub const FLATNESS_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralStats {
    pub q25_hz: f64,
    pub q50_hz: f64,
    pub q75_hz: f64,
    pub fpeak_hz: f64,
    /// log10 of geometric over arithmetic mean of the time-averaged power
    /// spectrum; 0 for a flat spectrum, strongly negative for a pure tone.
    pub wiener_entropy_mean: f64,
}

/// Energy quartiles, peak frequency and Wiener entropy of the time-averaged
/// spectrum.
pub fn spectral_stats(sg: &Spectrogram) -> Result<SpectralStats, DspError> {
    let avg = sg.mean_spectrum();
    let total: f64 = avg.iter().sum();
    if total <= 0.0 {
        return Err(DspError::SilentClip);
    }
    let quantile = |fraction: f64| {
        let target = fraction * total;
        let mut cumulative = 0.0;
        for (k, p) in avg.iter().enumerate() {
            cumulative += p;
            if cumulative >= target {
                return sg.freqs_hz[k];
            }
        }
        *sg.freqs_hz.last().unwrap()
    };
    let peak = avg
        .iter()
        .enumerate()
        .fold(0, |best, (k, &p)| if p > avg[best] { k } else { best });
    Ok(SpectralStats {
        q25_hz: quantile(0.25),
        q50_hz: quantile(0.50),
        q75_hz: quantile(0.75),
        fpeak_hz: sg.freqs_hz[peak],
        wiener_entropy_mean: wiener_entropy(&avg),
    })
}

/// `log10(geomean(p + e) / mean(p + e))` with `e = FLATNESS_EPSILON * mean(p)`,
/// clamped to at most 0. An all-zero spectrum counts as flat.
pub fn wiener_entropy(power: &[f64]) -> f64 {
    let n = power.len() as f64;
    let floor = FLATNESS_EPSILON * power.iter().sum::<f64>() / n;
    if floor <= 0.0 || power.iter().all(|&p| p == power[0]) {
        return 0.0;
    }
    let log_mean = power.iter().map(|p| (p + floor).ln()).sum::<f64>() / n;
    let mean = power.iter().map(|p| p + floor).sum::<f64>() / n;
    ((log_mean - mean.ln()) / std::f64::consts::LN_10).min(0.0)
}
