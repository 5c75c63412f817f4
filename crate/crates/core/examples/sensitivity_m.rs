//! Accuracy of ALRL_MaxE as the number of pseudo annotators grows.

use alrl::bench::{aggregate, ExperimentConfig, MethodSpec, OVERALL};
use alrl::prelude::*;

fn main() -> Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/synthetic_suite.json");
    let mut cfg = ExperimentConfig::from_file(path)?;
    cfg.methods = vec![MethodSpec::alrl("alrl_maxe", 10, ActiveLearnerSpec::new(LearnerKind::MaxE))];
    cfg.budgets = vec![20, 40];
    cfg.trials = std::env::args().nth(1).and_then(|t| t.parse().ok()).unwrap_or(10);
    let rows = sensitivity_sweep(&cfg, &[1, 4, 8, 10, 12, 16, 20, 24])?;
    println!("{:>3} {:>8} {:>8}", "m", "N=20", "N=40");
    let summary: Vec<_> = aggregate(&rows).into_iter().filter(|s| s.dataset == OVERALL).collect();
    let mut ms: Vec<usize> = summary.iter().filter_map(|s| s.m).collect();
    ms.sort_unstable();
    ms.dedup();
    for m in ms {
        let at = |b| summary.iter().find(|s| s.m == Some(m) && s.budget == b).map_or(f64::NAN, |s| s.mean_accuracy);
        println!("{m:>3} {:>8.3} {:>8.3}", at(20), at(40));
    }
    Ok(())
}
