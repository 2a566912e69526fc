//! AMVar, AMRate and AMExtent of amplitude-modulated tones.

use cowvox::dsp::amplitude_envelope;
use cowvox::features::am_metrics;
use cowvox::synth;

fn main() {
    let sr = 44100;
    for (rate, depth_db) in [(0.0, 0.0), (3.0, 4.0), (5.0, 6.0), (8.0, 12.0)] {
        let x = if rate == 0.0 {
            synth::sine(440.0, 2.0, sr, 0.8)
        } else {
            synth::am_tone_db(440.0, rate, depth_db, 2.0, sr, 0.8)
        };
        let clip = synth::clip(x, sr, "am");
        let env = amplitude_envelope(&clip, 0.03, 0.01).expect("long enough");
        let m = am_metrics(&env, clip.duration_s(), 2.0);
        println!(
            "{rate:>4} Hz, {depth_db:>4} dB -> rate {:5.2}/s, extent {:5.2} dB, var {:6.1} dB/s ({} modulations)",
            m.am_rate_per_s, m.am_extent_db, m.am_var_db_per_s, m.modulations
        );
    }
}
