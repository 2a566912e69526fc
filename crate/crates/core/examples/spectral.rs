//! Energy quartiles, peak frequency and Wiener entropy of a tone, white
//! noise and band-limited noise.

use cowvox::dsp::{spectral_stats, spectrogram};
use cowvox::synth;

fn main() {
    let sr = 44100;
    let signals = [
        ("sine 1 kHz", synth::sine(1000.0, 0.5, sr, 0.5)),
        ("white noise", synth::white_noise(0.5, sr, 0.5, 1)),
        ("noise through 2 kHz", synth::resonated_noise(&[2000.0], &[150.0], 0.5, sr, 0.7, 2).0),
    ];
    println!("{:<22}{:>9}{:>9}{:>9}{:>9}{:>10}", "signal", "Q25", "Q50", "Q75", "Fpeak", "entropy");
    for (name, x) in signals {
        let sg = spectrogram(&synth::clip(x, sr, name), 0.03, 0.01).expect("long enough");
        let s = spectral_stats(&sg).expect("not silent");
        println!(
            "{name:<22}{:>9.0}{:>9.0}{:>9.0}{:>9.0}{:>10.3}",
            s.q25_hz, s.q50_hz, s.q75_hz, s.fpeak_hz, s.wiener_entropy_mean
        );
    }
}
