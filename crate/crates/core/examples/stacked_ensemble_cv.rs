//! Cross-validated accuracy of the bagged stacked ensemble on a synthetic
//! 4-class problem, next to one stacked model's internal grid choice.

use cowvox::learn::{cross_validate, train_stacked, CvConfig, StackConfig};
use cowvox::synth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = synth::blobs(4, 40, 6, 2.5, 3);
    let stack = StackConfig::default();

    let single = train_stacked(&data.x, &data.y, data.n_classes(), &stack, 1)?;
    for (learner, score) in single.base.iter().zip(&single.base_scores) {
        println!("{:<14} internal-fold score {score:.3}", learner.name());
    }
    let c = single.choice;
    println!(
        "meta-learner: depth {}, learning rate {}, {} trees, score {:.3}",
        c.max_depth, c.learning_rate, c.n_trees, c.score
    );

    // a short ensemble keeps the example quick; the default is r = 50
    let cfg = CvConfig { r: 5, ..CvConfig::default() };
    let report = cross_validate(&data, "blobs", &cfg, &stack)?;
    println!("{}", report.summary_line());
    for f in &report.folds {
        println!("fold {}: train {:.3} test {:.3} (macro-F1 {:.3})", f.fold, f.train.accuracy, f.test.accuracy, f.test.f1);
    }
    Ok(())
}
