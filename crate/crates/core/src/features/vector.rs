use serde::{Deserialize, Serialize};

pub const N_FEATURES: usize = 23;

/// Canonical column order of the feature table.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "F0Mean",
    "F0Max",
    "F0Min",
    "F0Range",
    "Q25",
    "Q50",
    "Q75",
    "Fpeak",
    "SoundDuration",
    "AMVar",
    "AMRate",
    "AMExtent",
    "Harmonicity",
    "F1Mean",
    "F2Mean",
    "F3Mean",
    "F4Mean",
    "F5Mean",
    "F6Mean",
    "F7Mean",
    "F8Mean",
    "FormantDispersal",
    "WienerEntropyMean",
];

/// The 23 acoustic parameters of one call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub f0_mean_hz: f64,
    pub f0_max_hz: f64,
    pub f0_min_hz: f64,
    pub f0_range_hz: f64,
    pub q25_hz: f64,
    pub q50_hz: f64,
    pub q75_hz: f64,
    pub fpeak_hz: f64,
    pub sound_duration_s: f64,
    pub am_var_db_per_s: f64,
    pub am_rate_per_s: f64,
    pub am_extent_db: f64,
    pub harmonicity_db: f64,
    /// Mean F1..F8 in Hz.
    pub formant_means_hz: [f64; 8],
    pub formant_dispersal_hz: f64,
    pub wiener_entropy_mean: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        let f = &self.formant_means_hz;
        [
            self.f0_mean_hz,
            self.f0_max_hz,
            self.f0_min_hz,
            self.f0_range_hz,
            self.q25_hz,
            self.q50_hz,
            self.q75_hz,
            self.fpeak_hz,
            self.sound_duration_s,
            self.am_var_db_per_s,
            self.am_rate_per_s,
            self.am_extent_db,
            self.harmonicity_db,
            f[0],
            f[1],
            f[2],
            f[3],
            f[4],
            f[5],
            f[6],
            f[7],
            self.formant_dispersal_hz,
            self.wiener_entropy_mean,
        ]
    }

    pub fn from_array(v: &[f64; N_FEATURES]) -> Self {
        let mut formant_means_hz = [0.0; 8];
        formant_means_hz.copy_from_slice(&v[13..21]);
        Self {
            f0_mean_hz: v[0],
            f0_max_hz: v[1],
            f0_min_hz: v[2],
            f0_range_hz: v[3],
            q25_hz: v[4],
            q50_hz: v[5],
            q75_hz: v[6],
            fpeak_hz: v[7],
            sound_duration_s: v[8],
            am_var_db_per_s: v[9],
            am_rate_per_s: v[10],
            am_extent_db: v[11],
            harmonicity_db: v[12],
            formant_means_hz,
            formant_dispersal_hz: v[21],
            wiener_entropy_mean: v[22],
        }
    }

    /// `(name, value)` pairs in canonical order.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        FEATURE_NAMES.iter().copied().zip(self.to_array()).collect()
    }
}

/// Minimum spacing between adjacent formant means.
pub fn formant_dispersal(means: &[f64; 8]) -> f64 {
    means
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}
