//! F0 contour of a synthetic sawtooth call with a small pitch glide.

use cowvox::dsp::estimate_f0;
use cowvox::synth;

fn main() {
    let sr = 44100;
    let mut x = synth::sawtooth(180.0, 0.3, sr, 20, 0.5);
    x.extend(synth::sawtooth(240.0, 0.3, sr, 20, 0.5));
    let clip = synth::clip(x, sr, "glide");
    let contour = estimate_f0(&clip, 50.0, 2000.0, 0.01, 0.45).expect("analysable clip");
    println!("voiced fraction {:.2}", contour.voiced_fraction());
    for (i, (t, f)) in contour.times_s.iter().zip(&contour.f0_hz).enumerate().step_by(5) {
        match f {
            Some(f) => println!("{t:6.3} s  {f:7.2} Hz  r={:.3}", contour.strength[i]),
            None => println!("{t:6.3} s  unvoiced"),
        }
    }
}
