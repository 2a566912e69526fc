use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{hann, samples_for, DspError, Framing};
use crate::io::AudioClip;

/// Short-time power spectrum.
///
/// `power` is row-major, one row of `freqs_hz.len()` bins per frame. Each row
/// is the one-sided spectrum scaled so its sum equals the energy of the
/// windowed frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub power: Vec<f64>,
    pub times_s: Vec<f64>,
    pub freqs_hz: Vec<f64>,
    pub window_s: f64,
    pub hop_s: f64,
    pub sample_rate: f64,
    pub window_len: usize,
    pub fft_len: usize,
}

impl Spectrogram {
    pub fn n_frames(&self) -> usize {
        self.times_s.len()
    }

    pub fn n_bins(&self) -> usize {
        self.freqs_hz.len()
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        let b = self.n_bins();
        &self.power[i * b..(i + 1) * b]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[f64]> {
        self.power.chunks_exact(self.n_bins())
    }

    /// Power averaged over frames, per bin.
    pub fn mean_spectrum(&self) -> Vec<f64> {
        let mut avg = vec![0.0; self.n_bins()];
        for frame in self.frames() {
            for (a, p) in avg.iter_mut().zip(frame) {
                *a += p;
            }
        }
        let n = self.n_frames() as f64;
        avg.iter_mut().for_each(|a| *a /= n);
        avg
    }
}

/// Hann-windowed short-time FFT.
pub fn spectrogram(clip: &AudioClip, window_s: f64, hop_s: f64) -> Result<Spectrogram, DspError> {
    let sr = clip.sample_rate();
    let width = samples_for(window_s, sr);
    let hop = samples_for(hop_s, sr);
    if width < 16 {
        return Err(DspError::BadParameter(format!(
            "window of {width} samples is shorter than 16"
        )));
    }
    if hop_s <= 0.0 || hop == 0 {
        return Err(DspError::BadParameter("hop must be positive".into()));
    }
    if clip.is_empty() {
        return Err(DspError::ClipTooShort);
    }
    let framing = Framing::new(clip.len(), width, hop);
    let fft_len = width.next_power_of_two();
    let n_bins = fft_len / 2 + 1;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(fft_len);
    let window = hann(width);

    let mut frame = vec![0.0; width];
    let mut buf = vec![Complex::new(0.0, 0.0); fft_len];
    let mut power = Vec::with_capacity(framing.count * n_bins);
    let mut times_s = Vec::with_capacity(framing.count);
    let scale = 1.0 / fft_len as f64;
    for i in 0..framing.count {
        framing.fill(clip.samples(), i, &mut frame);
        for (j, b) in buf.iter_mut().enumerate() {
            *b = Complex::new(if j < width { frame[j] * window[j] } else { 0.0 }, 0.0);
        }
        fft.process(&mut buf);
        for (k, c) in buf.iter().take(n_bins).enumerate() {
            let edge = k == 0 || k == fft_len / 2;
            let p = c.norm_sqr() * scale;
            power.push(if edge { p } else { 2.0 * p });
        }
        times_s.push(framing.center_s(i, sr));
    }
    let freqs_hz = (0..n_bins).map(|k| k as f64 * sr / fft_len as f64).collect();
    Ok(Spectrogram {
        power,
        times_s,
        freqs_hz,
        window_s,
        hop_s,
        sample_rate: sr,
        window_len: width,
        fft_len,
    })
}
