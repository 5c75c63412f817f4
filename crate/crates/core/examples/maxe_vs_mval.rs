//! Entropy and MVAL-lite scores on the same pool, and what each picks.

use alrl::learners::{build_rims, entropy_scores, mval_scores, sample_candidates, ActiveLearnerSpec, TrainView};
use alrl::prelude::*;
use alrl::rng::seeded_rng;
use ndarray::Axis;

fn main() -> Result<()> {
    let ds = SynthSpec { clusters: 6, classes: 3, per_cluster: 20, seed: 5, ..Default::default() }.generate()?;
    let trial = prepare_trial(&ds, 3, 0.5, false)?;
    let anchors = trial.pool.anchors();
    let lx = trial.train.features.select(Axis(0), &anchors);
    let ly: Vec<usize> = anchors.iter().map(|&i| trial.train.labels[i]).collect();
    let px = trial.train.features.select(Axis(0), &trial.pool.unlabeled);
    let view = TrainView { features: lx.view(), labels: &ly, num_classes: trial.train.num_classes };
    let opts = FitOptions::default();

    let post = view.fit(&opts)?.predict_proba(px.view())?;
    let h = entropy_scores(&post);

    let candidates = sample_candidates(px.nrows(), 12, &mut seeded_rng(1));
    let rims = build_rims(&view, px.view(), &candidates, &opts, false)?;
    let s = mval_scores(&rims);
    println!("{:>5} {:>8} {:>10} {:>10} {:>10}", "pos", "entropy", "V_info", "V_repr", "score");
    for (k, &c) in candidates.iter().enumerate() {
        println!("{c:>5} {:>8.4} {:>10.2e} {:>10.2e} {:>10.2e}", h[c], s.info[k], s.repr[k], s.score[k]);
    }

    let mut rng = seeded_rng(1);
    for kind in [LearnerKind::MaxE, LearnerKind::Mval] {
        let mut spec = ActiveLearnerSpec::new(kind);
        spec.mval_candidate_cap = 12;
        let pick = alrl::learners::learner_select(&spec, &view, px.view(), &opts, &mut rng)?;
        println!("{kind:?} picks pool position {pick}");
    }
    Ok(())
}
