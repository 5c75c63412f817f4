//! Select 20 points from a ten-cluster, five-class Gaussian set with random
//! labeling and compare the resulting classifier against a random selection.

use alrl::bench::{evaluate_selection, Labeling};
use alrl::prelude::*;
use alrl::rng::seeded_rng;

fn main() -> Result<()> {
    let ds = SynthSpec {
        clusters: 10,
        classes: 5,
        dim: 5,
        spread: Some(5.0),
        per_cluster: 30,
        sigma: 1.5,
        seed: 303,
        labeling: Labeling::NearestPrototype,
        ..Default::default()
    }
    .generate()?;
    let trial = prepare_trial(&ds, 42, 0.5, false)?;
    println!(
        "{} train / {} test points, {} initially labeled",
        trial.train.len(),
        trial.test.len(),
        trial.pool.labeled.len()
    );

    let cfg = AlrlConfig::new(20, 10, ActiveLearnerSpec::new(LearnerKind::MaxE), 7);
    let result = alrl_select(&trial.pool, &trial.train, &cfg)?;
    let random = random_select(&trial.pool.unlabeled, 20, &mut seeded_rng(7))?;

    let opts = FitOptions::default();
    println!("selected: {:?}", result.selected);
    println!("ALRL_MaxE accuracy: {:.3}", evaluate_selection(&trial, &result.selected, &opts)?);
    println!("random accuracy:    {:.3}", evaluate_selection(&trial, &random, &opts)?);
    Ok(())
}
