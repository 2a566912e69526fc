//! Writes a few synthetic calls to WAV, lists them in a manifest and
//! extracts the 23-feature table, as `cowvox extract` does.

use cowvox::features::extract_corpus;
use cowvox::io::{write_features_csv, write_wav, Manifest};
use cowvox::{synth, AnalysisConfig, FEATURE_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("cowvox-example-extract");
    std::fs::create_dir_all(&dir)?;
    let formants = [650.0, 1400.0, 2300.0, 3200.0, 4100.0, 5200.0, 6300.0, 7400.0];
    let mut manifest = String::from("file,cow_id,call_type\n");
    for (i, (f0, call_type)) in [(320.0, "HF"), (110.0, "LF"), (290.0, "HF")].iter().enumerate() {
        let (x, _) = synth::source_filter(*f0, &formants, &[90.0; 8], 0.6, 44100, 0.6);
        let name = format!("call{i}.wav");
        write_wav(dir.join(&name), &x, 44100)?;
        manifest.push_str(&format!("{name},cow{:02},{call_type}\n", i % 2 + 1));
    }
    manifest.push_str("not_recorded.wav,cow03,LF\n");

    let manifest = Manifest::parse_str(&manifest, &dir)?;
    let result = extract_corpus(&manifest, &AnalysisConfig::default())?;
    for f in &result.failures {
        println!("skipped {}: {}", f.source_id, f.kind);
    }
    for row in &result.corpus.rows {
        println!("{} ({}, {})", row.source_id, row.label.cow_id, row.label.call_type);
        for (name, v) in FEATURE_NAMES.iter().zip(row.features.to_array()).take(9) {
            println!("  {name:<14}{v:10.3}");
        }
    }
    let out = dir.join("features.csv");
    write_features_csv(&result.corpus, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
