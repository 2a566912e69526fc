//! Trains an ensemble, saves it, loads it back and classifies a call by
//! its named features.

use cowvox::learn::{train_ensemble, CvConfig, EnsembleModel, StackConfig, TaskSpec};
use cowvox::synth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = synth::blobs_corpus(2, 60, 4.0, 8);
    let task = TaskSpec::call_type();
    let data = task.dataset(&corpus)?;
    let model = train_ensemble(&data, &CvConfig { r: 5, ..CvConfig::default() }, &StackConfig::default())?;

    let path = std::env::temp_dir().join("cowvox-example-model.json");
    model.save(&path)?;
    let loaded = EnsembleModel::load(&path)?;
    println!("{} instances, classes {:?}, saved to {}", loaded.instances.len(), loaded.classes, path.display());

    let row = &corpus.rows[0];
    println!("{}: true {}, predicted {}", row.source_id, row.label.call_type, loaded.predict(&row.features)?);
    // vote() takes values in the model's stored column order
    let values = row.features.to_array();
    let stored: Vec<f64> = loaded.column_order(&cowvox::FEATURE_NAMES)?.iter().map(|&i| values[i]).collect();
    let vote = loaded.vote(&stored);
    println!("votes {:?}, summed probabilities {:.3?}", vote.counts, vote.prob_sums);
    assert_eq!(model.predict(&row.features)?, loaded.predict(&row.features)?);
    Ok(())
}
