//! Feature table to cross-validation report for every task, writing the
//! report JSON and the fold-assignment file a second model can reuse.

use cowvox::cli::fold_assignment_csv;
use cowvox::io::{read_features_csv, write_features_csv};
use cowvox::learn::{cross_validate, CvConfig, GridScope, StackConfig, Subset, TaskSpec};
use cowvox::synth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("cowvox-example-corpus");
    std::fs::create_dir_all(&dir)?;
    let table = dir.join("features.csv");
    write_features_csv(&synth::blobs_corpus(6, 20, 3.0, 5), &table)?;
    let corpus = read_features_csv(&table)?;
    println!("{} calls, {} cows, {} HF", corpus.len(), corpus.cow_ids().len(), corpus.count(cowvox::CallType::Hf));

    let cfg = CvConfig { r: 4, ..CvConfig::default() };
    let stack = StackConfig {
        grid_scope: GridScope::Shared,
        ..StackConfig::default()
    };
    let tasks = [
        TaskSpec::call_type(),
        TaskSpec::cow_id(Subset::All),
        TaskSpec::cow_id(Subset::Hf),
        TaskSpec::cow_id(Subset::Lf),
    ];
    for task in tasks {
        let data = task.dataset(&corpus)?;
        let report = cross_validate(&data, &task.to_string(), &cfg, &stack)?;
        println!("{}", report.summary_line());
        let stem = task.to_string().replace('/', "_");
        std::fs::write(dir.join(format!("{stem}_report.json")), serde_json::to_string_pretty(&report)?)?;
        std::fs::write(
            dir.join(format!("{stem}_folds.csv")),
            fold_assignment_csv(&task.source_ids(&corpus), &report.fold_assignment),
        )?;
    }
    println!("reports in {}", dir.display());
    Ok(())
}
