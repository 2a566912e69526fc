//! RIFF/WAVE decoding for 16-bit PCM mono recordings.

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::clip::{AudioClip, ClipError};

#[derive(Debug, Error)]
pub enum WavError {
    #[error("not a RIFF/WAVE file: {0}")]
    NotWav(String),
    #[error("unsupported encoding: format tag {format_tag}, {bits} bits per sample (need 16-bit PCM)")]
    UnsupportedEncoding { format_tag: u16, bits: u16 },
    #[error("{0} channels; only mono recordings are accepted")]
    MultiChannel(u16),
    #[error("data chunk declares {declared} bytes but only {available} are present")]
    Truncated { declared: usize, available: usize },
    #[error("invalid clip: {0}")]
    Clip(#[from] ClipError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const WAVE_FORMAT_PCM: u16 = 0x0001;
const WAVE_FORMAT_EXTENSIBLE: u16 = 0xFFFE;

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

struct Format {
    channels: u16,
    sample_rate: u32,
}

fn parse_fmt(body: &[u8]) -> Result<Format, WavError> {
    if body.len() < 16 {
        return Err(WavError::NotWav("fmt chunk shorter than 16 bytes".into()));
    }
    let mut format_tag = u16_at(body, 0);
    let channels = u16_at(body, 2);
    let sample_rate = u32_at(body, 4);
    let bits = u16_at(body, 14);
    if format_tag == WAVE_FORMAT_EXTENSIBLE && body.len() >= 26 {
        // first two bytes of the sub-format GUID carry the actual tag
        format_tag = u16_at(body, 24);
    }
    if format_tag != WAVE_FORMAT_PCM || bits != 16 {
        return Err(WavError::UnsupportedEncoding { format_tag, bits });
    }
    if channels != 1 {
        return Err(WavError::MultiChannel(channels));
    }
    if sample_rate == 0 {
        return Err(WavError::NotWav("zero sample rate".into()));
    }
    Ok(Format {
        channels,
        sample_rate,
    })
}

/// Decodes an in-memory WAV file. Samples are scaled by 1/32768.
pub fn decode_wav(bytes: &[u8], source_id: &str) -> Result<AudioClip, WavError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(WavError::NotWav("missing RIFF/WAVE signature".into()));
    }
    let mut format: Option<Format> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let declared = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let available = bytes.len() - body_start;
        if id == b"fmt " {
            if declared > available {
                return Err(WavError::Truncated {
                    declared,
                    available,
                });
            }
            format = Some(parse_fmt(&bytes[body_start..body_start + declared])?);
        } else if id == b"data" {
            let fmt = format
                .as_ref()
                .ok_or_else(|| WavError::NotWav("data chunk before fmt chunk".into()))?;
            debug_assert_eq!(fmt.channels, 1);
            if declared > available {
                return Err(WavError::Truncated {
                    declared,
                    available,
                });
            }
            let samples = bytes[body_start..body_start + declared]
                .chunks_exact(2)
                .map(|p| f64::from(i16::from_le_bytes([p[0], p[1]])) / 32768.0)
                .collect();
            return Ok(AudioClip::new(samples, fmt.sample_rate, source_id)?);
        }
        // chunks are word aligned
        pos = body_start.saturating_add(declared).saturating_add(declared & 1);
    }
    Err(WavError::NotWav("no data chunk".into()))
}

/// Reads a WAV file; the clip's `source_id` is the file stem.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip, WavError> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    decode_wav(&bytes, &stem)
}

/// Encodes samples as 16-bit PCM mono. Values are scaled by 32768, rounded and
/// saturated to the i16 range.
pub fn encode_wav(samples: &[f64], sample_rate_hz: u32) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&WAVE_FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(sample_rate_hz * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in samples {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

pub fn write_wav(path: impl AsRef<Path>, samples: &[f64], sample_rate_hz: u32) -> std::io::Result<()> {
    fs::write(path, encode_wav(samples, sample_rate_hz))
}
