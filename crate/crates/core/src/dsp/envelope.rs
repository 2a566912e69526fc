use super::{hann, samples_for, DspError, Framing};
use crate::io::AudioClip;

/// Level assigned to silent frames (16-bit noise floor).
pub const ENVELOPE_FLOOR_DB: f64 = -96.0;

/// Frame-wise Hann-weighted RMS level in dB re full scale.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeDb {
    pub times_s: Vec<f64>,
    pub level_db: Vec<f64>,
}

pub fn amplitude_envelope(clip: &AudioClip, frame_s: f64, hop_s: f64) -> Result<EnvelopeDb, DspError> {
    if !(hop_s > 0.0 && frame_s >= hop_s) {
        return Err(DspError::BadParameter(format!(
            "envelope needs frame >= hop > 0, got frame {frame_s}, hop {hop_s}"
        )));
    }
    if clip.is_empty() {
        return Err(DspError::ClipTooShort);
    }
    let sr = clip.sample_rate();
    let width = samples_for(frame_s, sr).max(1);
    let framing = Framing::new(clip.len(), width, samples_for(hop_s, sr));
    let mut buf = vec![0.0; width];
    let mut env = EnvelopeDb {
        times_s: Vec::with_capacity(framing.count),
        level_db: Vec::with_capacity(framing.count),
    };
    let weights = if width > 2 { hann(width) } else { vec![1.0; width] };
    let weight_sum: f64 = weights.iter().sum();
    for i in 0..framing.count {
        framing.fill(clip.samples(), i, &mut buf);
        let ms = buf.iter().zip(&weights).map(|(x, w)| w * x * x).sum::<f64>() / weight_sum;
        let db = if ms > 0.0 { 10.0 * ms.log10() } else { f64::NEG_INFINITY };
        env.times_s.push(framing.center_s(i, sr));
        env.level_db.push(db.max(ENVELOPE_FLOOR_DB));
    }
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silence_sits_on_floor() {
        let clip = AudioClip::new(vec![0.0; 4410], 44100, "z").unwrap();
        let env = amplitude_envelope(&clip, 0.03, 0.01).unwrap();
        assert!(env.level_db.iter().all(|&l| l == ENVELOPE_FLOOR_DB));
    }

    #[test]
    fn full_scale_square_is_zero_db() {
        let s: Vec<f64> = (0..4410).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let clip = AudioClip::new(s, 44100, "sq").unwrap();
        let env = amplitude_envelope(&clip, 0.03, 0.01).unwrap();
        assert!(env.level_db.iter().all(|l| l.abs() < 1e-12));
    }

    #[test]
    fn frame_shorter_than_hop_rejected() {
        let clip = AudioClip::new(vec![0.1; 4410], 44100, "z").unwrap();
        assert!(amplitude_envelope(&clip, 0.01, 0.02).is_err());
    }
}
