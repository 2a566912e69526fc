//! Leave-one-feature-out importance on a table where only one column
//! carries the label, plus the bar chart.

use cowvox::importance::{lofo_importance, render_importance_chart};
use cowvox::learn::{CvConfig, StackConfig};
use cowvox::synth;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = synth::planted_feature(150, 8, 5, 2);
    let cfg = CvConfig { r: 3, ..CvConfig::default() };
    let report = lofo_importance(&data, "planted", &cfg, &StackConfig::default())?;
    for f in report.ranked() {
        println!("{:<6}{:7.2}% ± {:.2}", f.feature, f.mean_pct, f.std_pct);
    }
    let out = std::env::temp_dir().join("cowvox-example-importance.svg");
    std::fs::write(&out, render_importance_chart(&report))?;
    println!("chart -> {}", out.display());
    Ok(())
}
