use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClipError {
    #[error("audio clip has no samples")]
    Empty,
    #[error("sample rate must be positive")]
    ZeroRate,
    #[error("sample {index} = {value} is outside [-1, 1]")]
    OutOfRange { index: usize, value: f64 },
}

/// One trimmed call: mono samples normalised to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate_hz: u32,
    source_id: String,
}

impl AudioClip {
    pub fn new(
        samples: Vec<f64>,
        sample_rate_hz: u32,
        source_id: impl Into<String>,
    ) -> Result<Self, ClipError> {
        if samples.is_empty() {
            return Err(ClipError::Empty);
        }
        if sample_rate_hz == 0 {
            return Err(ClipError::ZeroRate);
        }
        if let Some((index, &value)) = samples
            .iter()
            .enumerate()
            .find(|(_, v)| !(-1.0..=1.0).contains(*v))
        {
            return Err(ClipError::OutOfRange { index, value });
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            source_id: source_id.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn sample_rate(&self) -> f64 {
        f64::from(self.sample_rate_hz)
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false for a constructed clip; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate()
    }

    /// Multiplies every sample by `gain`. Fails if the result clips.
    pub fn scaled(&self, gain: f64) -> Result<Self, ClipError> {
        Self::new(
            self.samples.iter().map(|s| s * gain).collect(),
            self.sample_rate_hz,
            self.source_id.clone(),
        )
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self {
            samples,
            sample_rate_hz: self.sample_rate_hz,
            source_id: self.source_id.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_clips() {
        assert_eq!(AudioClip::new(vec![], 100, "a"), Err(ClipError::Empty));
        assert_eq!(AudioClip::new(vec![0.0], 0, "a"), Err(ClipError::ZeroRate));
        assert!(matches!(
            AudioClip::new(vec![0.0, 1.5], 100, "a"),
            Err(ClipError::OutOfRange { index: 1, .. })
        ));
        assert!(AudioClip::new(vec![f64::NAN], 100, "a").is_err());
    }

    #[test]
    fn duration() {
        let c = AudioClip::new(vec![0.0; 441], 44100, "x").unwrap();
        assert!((c.duration_s() - 0.01).abs() < 1e-15);
    }
}
