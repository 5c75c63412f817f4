//! k-means++ as a selection baseline: the best of many seeded runs, then the
//! nearest real point to each centroid.

use alrl::baselines::{kmeanspp_select, pool_rows, KmppConfig};
use alrl::bench::{evaluate_selection, Labeling};
use alrl::prelude::*;

fn main() -> Result<()> {
    let ds = SynthSpec {
        clusters: 8,
        classes: 4,
        dim: 3,
        spread: Some(6.0),
        sigma: 1.5,
        seed: 9,
        labeling: Labeling::NearestPrototype,
        ..Default::default()
    }
    .generate()?;
    let trial = prepare_trial(&ds, 11, 0.5, false)?;
    let points = pool_rows(trial.train.features.view(), &trial.pool.unlabeled);
    for restarts in [1, 10, 100] {
        let mut cfg = KmppConfig::new(16, 4);
        cfg.restarts = restarts;
        let out = kmeanspp_select(points.view(), &cfg)?;
        let picks: Vec<usize> = out.picks.iter().map(|&p| trial.pool.unlabeled[p]).collect();
        let acc = evaluate_selection(&trial, &picks, &FitOptions::default())?;
        println!(
            "{restarts:>4} restarts: best objective {:.2} (restart {}, {} Lloyd steps), accuracy {acc:.3}",
            out.best.objective, out.best_restart, out.best.iterations
        );
    }
    Ok(())
}
