//! Formant tracking on a pulse train filtered by known resonances.

use cowvox::dsp::{estimate_formants, AnalysisConfig};
use cowvox::synth;

fn main() {
    let centres = [700.0, 1500.0, 2600.0];
    let (x, truth) = synth::source_filter(160.0, &centres, &[80.0; 3], 0.5, 44100, 0.8);
    let clip = synth::clip(x, 44100, "vowel");

    // model order 2n + 2 with n matching the number of resonances
    let cfg = AnalysisConfig {
        n_formants: centres.len(),
        ..AnalysisConfig::default()
    };
    let tracks = estimate_formants(&clip, &cfg).expect("analysable clip");
    println!("{} frames, {} unstable", tracks.frequencies.len(), tracks.unstable_frames());
    for (slot, want) in truth.formants_hz.iter().enumerate() {
        let got = tracks.mean(slot).unwrap_or(f64::NAN);
        println!("F{}: true {want:6.0} Hz  estimated {got:7.1} Hz", slot + 1);
    }
}
