//! Two classes, four clusters. Plain entropy sampling in one shot piles its
//! picks onto the initial decision boundary; random labeling with one
//! annotator spreads out, and with ten annotators plus the nearest-neighbor
//! pick it reaches every cluster.

use alrl::bench::{cluster_coverage, prepare_trial};
use alrl::prelude::*;

fn main() -> Result<()> {
    let ds = SynthSpec::default().generate()?;
    let maxe = ActiveLearnerSpec::new(LearnerKind::MaxE);
    let budget = 20;
    let mut totals = [0usize; 3];
    let seeds = 20;
    for seed in 0..seeds {
        let trial = prepare_trial(&ds, seed, 0.5, false)?;
        let ids = trial.train.ids.as_deref();
        let single = single_shot_topk(&maxe, &trial.train, &trial.pool, budget, &FitOptions::default())?;
        let one = alrl_select(&trial.pool, &trial.train, &AlrlConfig::new(budget, 1, maxe, seed))?.selected;
        let ten = alrl_select(&trial.pool, &trial.train, &AlrlConfig::new(budget, 10, maxe, seed))?.selected;
        let cov = [
            cluster_coverage(&single, ids)?,
            cluster_coverage(&one, ids)?,
            cluster_coverage(&ten, ids)?,
        ];
        for (t, c) in totals.iter_mut().zip(cov) {
            *t += c;
        }
        if seed == 0 {
            println!("seed 0 picks (x, y, cluster):");
            for (name, picks) in [("MaxE", &single), ("m=10", &ten)] {
                let pts: Vec<String> = picks
                    .iter()
                    .map(|&i| {
                        let r = trial.train.row(i);
                        format!("({:.1},{:.1},{})", r[0], r[1], ids.unwrap()[i])
                    })
                    .collect();
                println!("  {name}: {}", pts.join(" "));
            }
        }
    }
    let avg = |t: usize| t as f64 / seeds as f64;
    println!("mean clusters covered out of 4 over {seeds} seeds:");
    println!("  single-shot MaxE      {:.2}", avg(totals[0]));
    println!("  ALRL_MaxE, m = 1      {:.2}", avg(totals[1]));
    println!("  ALRL_MaxE, m = 10     {:.2}", avg(totals[2]));
    Ok(())
}
