//! Amplitude-modulation metrics of a dB envelope.
//!
//! A modulation is a local maximum of the envelope whose prominence is at
//! least the configured threshold. Prominence and the flanking troughs follow
//! the usual topographic definition: walk left (right) from the peak until
//! the envelope rises above the peak or ends; the lowest point passed is that
//! side's trough, and prominence is the peak minus the higher of the two.

use serde::{Deserialize, Serialize};

use crate::dsp::EnvelopeDb;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmMetrics {
    /// Sum of absolute frame-to-frame level changes per second of call.
    pub am_var_db_per_s: f64,
    /// Modulations per second of call.
    pub am_rate_per_s: f64,
    /// Mean of (peak level - mean of its two troughs) over modulations.
    pub am_extent_db: f64,
    pub modulations: usize,
}

struct Peak {
    left_trough: f64,
    right_trough: f64,
    level: f64,
}

fn prominent_peaks(level: &[f64], min_prominence: f64) -> Vec<Peak> {
    let n = level.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if level[i] > level[i - 1] {
            // extend across a plateau
            let mut j = i;
            while j + 1 < n && level[j + 1] == level[i] {
                j += 1;
            }
            if j + 1 < n && level[j + 1] < level[i] {
                let peak = level[i];
                let mut left_trough = peak;
                for &v in level[..i].iter().rev() {
                    if v > peak {
                        break;
                    }
                    left_trough = left_trough.min(v);
                }
                let mut right_trough = peak;
                for &v in &level[j + 1..] {
                    if v > peak {
                        break;
                    }
                    right_trough = right_trough.min(v);
                }
                if peak - left_trough.max(right_trough) >= min_prominence {
                    peaks.push(Peak {
                        left_trough,
                        right_trough,
                        level: peak,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

pub fn am_metrics(env: &EnvelopeDb, duration_s: f64, min_prominence_db: f64) -> AmMetrics {
    let level = &env.level_db;
    let total_variation: f64 = level.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let peaks = prominent_peaks(level, min_prominence_db);
    let extent = if peaks.is_empty() {
        0.0
    } else {
        peaks
            .iter()
            .map(|p| p.level - 0.5 * (p.left_trough + p.right_trough))
            .sum::<f64>()
            / peaks.len() as f64
    };
    AmMetrics {
        am_var_db_per_s: total_variation / duration_s,
        am_rate_per_s: peaks.len() as f64 / duration_s,
        am_extent_db: extent,
        modulations: peaks.len(),
    }
}
