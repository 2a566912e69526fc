//! F0 contour from the normalised autocorrelation.
//!
//! Each frame spans three periods of the pitch floor. For every candidate lag
//! `t` the frame is correlated with itself shifted by `t` and normalised by the
//! energies of the two overlapping parts, so a perfectly periodic frame scores
//! 1.0 at its period regardless of level. The chosen period is the shortest
//! local maximum scoring at least 90% of the best local maximum, which avoids
//! sub-octave picks on signals that also correlate at twice their period.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{samples_for, DspError, Framing};
use crate::io::AudioClip;

const OCTAVE_TOLERANCE: f64 = 0.9;
const PERIODS_PER_FRAME: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PitchContour {
    pub times_s: Vec<f64>,
    /// `None` marks an unvoiced frame.
    pub f0_hz: Vec<Option<f64>>,
    /// Peak normalised autocorrelation of each frame (0 if no peak in band).
    pub strength: Vec<f64>,
    pub floor_hz: f64,
    pub ceiling_hz: f64,
}

impl PitchContour {
    pub fn voiced(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.f0_hz
            .iter()
            .zip(&self.strength)
            .filter_map(|(f, &r)| f.map(|f| (f, r)))
    }

    pub fn voiced_fraction(&self) -> f64 {
        self.f0_hz.iter().filter(|f| f.is_some()).count() as f64 / self.f0_hz.len() as f64
    }
}

pub fn estimate_f0(
    clip: &AudioClip,
    floor_hz: f64,
    ceiling_hz: f64,
    hop_s: f64,
    voicing_threshold: f64,
) -> Result<PitchContour, DspError> {
    let sr = clip.sample_rate();
    if !(floor_hz > 0.0 && floor_hz < ceiling_hz) {
        return Err(DspError::BadParameter(format!(
            "pitch band [{floor_hz}, {ceiling_hz}] is not a valid interval"
        )));
    }
    let min_lag = (sr / ceiling_hz).ceil() as usize;
    if sr / ceiling_hz < 2.0 {
        return Err(DspError::BandEmpty {
            min_lag: (sr / ceiling_hz).floor() as usize,
        });
    }
    let max_lag = (sr / floor_hz).floor() as usize;
    let width = samples_for(PERIODS_PER_FRAME / floor_hz, sr).max(max_lag + 2);
    let hop = samples_for(hop_s, sr).max(1);
    let framing = Framing::new(clip.len(), width, hop);
    let fft_len = (2 * width).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(fft_len);
    let inv = planner.plan_fft_inverse(fft_len);

    let mut frame = vec![0.0; width];
    let mut buf = vec![Complex::new(0.0, 0.0); fft_len];
    let mut prefix = vec![0.0; width + 1];
    let mut corr = vec![0.0; max_lag + 2];

    let mut contour = PitchContour {
        times_s: Vec::with_capacity(framing.count),
        f0_hz: Vec::with_capacity(framing.count),
        strength: Vec::with_capacity(framing.count),
        floor_hz,
        ceiling_hz,
    };
    for i in 0..framing.count {
        framing.fill(clip.samples(), i, &mut frame);
        let mean = frame.iter().sum::<f64>() / width as f64;
        frame.iter_mut().for_each(|x| *x -= mean);
        for (j, b) in buf.iter_mut().enumerate() {
            *b = Complex::new(frame.get(j).copied().unwrap_or(0.0), 0.0);
        }
        fwd.process(&mut buf);
        buf.iter_mut().for_each(|c| *c = Complex::new(c.norm_sqr(), 0.0));
        inv.process(&mut buf);
        for j in 0..width {
            prefix[j + 1] = prefix[j] + frame[j] * frame[j];
        }
        let total = prefix[width];
        let lo = min_lag - 1;
        let hi = (max_lag + 1).min(width - 1);
        for lag in lo..=hi {
            let head = prefix[width - lag];
            let tail = total - prefix[lag];
            let denom = (head * tail).sqrt();
            corr[lag] = if denom > 0.0 && total > 0.0 {
                buf[lag].re / fft_len as f64 / denom
            } else {
                0.0
            };
        }
        let (f0, strength) = pick_period(&corr, min_lag, max_lag.min(hi - 1), sr);
        contour.times_s.push(framing.center_s(i, sr));
        let voiced = strength >= voicing_threshold
            && f0.is_some_and(|f| (floor_hz..=ceiling_hz).contains(&f));
        contour.f0_hz.push(if voiced { f0 } else { None });
        contour.strength.push(strength);
    }
    Ok(contour)
}

/// Returns (frequency, interpolated peak strength) of the selected lag.
fn pick_period(corr: &[f64], min_lag: usize, max_lag: usize, sr: f64) -> (Option<f64>, f64) {
    let peaks: Vec<usize> = (min_lag..=max_lag)
        .filter(|&t| corr[t] > corr[t - 1] && corr[t] >= corr[t + 1] && corr[t] > 0.0)
        .collect();
    let Some(best) = peaks.iter().map(|&t| corr[t]).reduce(f64::max) else {
        return (None, 0.0);
    };
    let t = peaks
        .into_iter()
        .find(|&t| corr[t] >= OCTAVE_TOLERANCE * best)
        .expect("best peak qualifies");
    let (a, b, c) = (corr[t - 1], corr[t], corr[t + 1]);
    let curvature = a - 2.0 * b + c;
    let (shift, peak) = if curvature < 0.0 {
        let d = 0.5 * (a - c) / curvature;
        (d, b - 0.25 * (a - c) * d)
    } else {
        (0.0, b)
    };
    (Some(sr / (t as f64 + shift)), peak.min(1.0))
}
