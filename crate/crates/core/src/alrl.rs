//! Selection through random labeling.
//!
//! Each round, every pseudo annotator relabels the already selected points
//! `Q` uniformly at random, a learner trained on `L` (true labels) plus `Q`
//! (pseudo labels) proposes one candidate, and the candidate that leaves the
//! smallest summed nearest-anchor distance over the unlabeled pool is moved
//! into `Q`. No true label of `Q` is consulted until selection is over.

use ndarray::{ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, PoolState};
use crate::error::{Error, Result};
use crate::learners::{
    self, build_rims, entropy_scores, learner_select, mval_scores, ActiveLearnerSpec, LearnerKind,
    TrainView,
};
use crate::model::FitOptions;
use crate::rng::{mix_all, seeded_rng};

const ANNOTATOR_STREAM: u64 = 0x616e_6e6f;
const LEARNER_STREAM: u64 = 0x6c72_6e72;

/// `m` independent annotators that label uniformly at random. Annotator `i`
/// in round `r` draws from a stream keyed by `(base_seed, i, r)`, so streams
/// of existing annotators do not change when `m` grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PseudoAnnotatorBank {
    m: usize,
    base_seed: u64,
}

impl PseudoAnnotatorBank {
    pub fn new(m: usize, base_seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("need at least one pseudo annotator".into()));
        }
        Ok(PseudoAnnotatorBank { m, base_seed })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn stream(&self, annotator: usize, round: usize) -> ChaCha8Rng {
        seeded_rng(mix_all(
            self.base_seed,
            &[ANNOTATOR_STREAM, annotator as u64, round as u64],
        ))
    }

    /// Private randomness for the learner driven by `annotator` in `round`.
    fn learner_stream(&self, annotator: usize, round: usize, learner_seed: u64) -> ChaCha8Rng {
        seeded_rng(mix_all(
            self.base_seed,
            &[LEARNER_STREAM, learner_seed, annotator as u64, round as u64],
        ))
    }
}

/// Fresh i.i.d. uniform labels in `[0, num_classes)`, one per entry of `q`.
pub fn random_labels<R: Rng + ?Sized>(q: &[usize], num_classes: usize, rng: &mut R) -> Vec<usize> {
    q.iter().map(|_| rng.random_range(0..num_classes)).collect()
}

fn euclidean(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Sum over the rows of `points` of the Euclidean distance to the nearest
/// row of `anchors`.
///
/// An empty anchor set has no nearest neighbor and is reported as
/// [`Error::EmptyAnchors`].
pub fn dis(points: ArrayView2<'_, f64>, anchors: ArrayView2<'_, f64>) -> Result<f64> {
    if anchors.nrows() == 0 {
        return Err(Error::EmptyAnchors);
    }
    if points.nrows() > 0 && points.ncols() != anchors.ncols() {
        return Err(Error::DimensionMismatch {
            expected: anchors.ncols(),
            found: points.ncols(),
        });
    }
    Ok(points
        .outer_iter()
        .map(|u| {
            anchors
                .outer_iter()
                .map(|a| euclidean(u, a))
                .fold(f64::INFINITY, f64::min)
        })
        .sum())
}

/// Candidate list as emitted by the annotators, one per annotator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub candidates: Vec<usize>,
}

impl CandidateSet {
    /// Distinct candidates in first-occurrence order.
    pub fn unique(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::with_capacity(self.candidates.len());
        for &c in &self.candidates {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

/// Nearest-anchor distance of every unlabeled point, kept up to date as
/// anchors are added.
pub(crate) struct NearestCache<'a> {
    features: ArrayView2<'a, f64>,
    /// unlabeled train indices, ascending
    unlabeled: Vec<usize>,
    nearest: Vec<f64>,
}

impl<'a> NearestCache<'a> {
    pub(crate) fn new(features: ArrayView2<'a, f64>, unlabeled: &[usize], anchors: &[usize]) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::EmptyAnchors);
        }
        let nearest = unlabeled
            .iter()
            .map(|&u| {
                anchors
                    .iter()
                    .map(|&a| euclidean(features.row(u), features.row(a)))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(NearestCache {
            features,
            unlabeled: unlabeled.to_vec(),
            nearest,
        })
    }

    /// `Dis(U \ {s}, L, Q ∪ {s})`.
    pub(crate) fn dis_with(&self, s: usize) -> f64 {
        let xs = self.features.row(s);
        self.unlabeled
            .iter()
            .zip(&self.nearest)
            .filter(|(&u, _)| u != s)
            .map(|(&u, &d)| d.min(euclidean(self.features.row(u), xs)))
            .sum()
    }

    /// Unique candidates with their distances, and the winner (smallest
    /// distance, earliest on ties).
    pub(crate) fn pick(&self, unique: &[usize]) -> (usize, Vec<(usize, f64)>) {
        let scored: Vec<(usize, f64)> = unique.iter().map(|&s| (s, self.dis_with(s))).collect();
        let mut best = 0;
        for (k, &(_, d)) in scored.iter().enumerate() {
            if d < scored[best].1 {
                best = k;
            }
        }
        (scored[best].0, scored)
    }

    pub(crate) fn unlabeled(&self) -> &[usize] {
        &self.unlabeled
    }

    pub(crate) fn promote(&mut self, s: usize) {
        let pos = self
            .unlabeled
            .binary_search(&s)
            .expect("winner comes from the unlabeled pool");
        self.unlabeled.remove(pos);
        self.nearest.remove(pos);
        let xs = self.features.row(s);
        for (&u, d) in self.unlabeled.iter().zip(self.nearest.iter_mut()) {
            *d = d.min(euclidean(self.features.row(u), xs));
        }
    }
}

/// Result of a nearest-neighbor pick over a candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct MnndOutcome {
    pub winner: usize,
    /// `(candidate, Dis(U \ {s}, L, Q ∪ {s}))` for each distinct candidate.
    pub scores: Vec<(usize, f64)>,
}

/// Picks from `candidates` the point whose promotion to an anchor minimizes
/// the summed nearest-anchor distance of the remaining unlabeled points.
///
/// `unlabeled` and `anchors` (`L ∪ Q`) index rows of `features`; every
/// candidate must be unlabeled.
pub fn mnnd_pick(
    candidates: &CandidateSet,
    unlabeled: &[usize],
    anchors: &[usize],
    features: ArrayView2<'_, f64>,
) -> Result<MnndOutcome> {
    let unique = candidates.unique();
    if unique.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    let mut sorted = unlabeled.to_vec();
    sorted.sort_unstable();
    if let Some(&bad) = unique.iter().find(|c| sorted.binary_search(c).is_err()) {
        return Err(Error::InvalidParameter(format!(
            "candidate {bad} is not in the unlabeled pool"
        )));
    }
    let cache = NearestCache::new(features, &sorted, anchors)?;
    let (winner, scores) = cache.pick(&unique);
    Ok(MnndOutcome { winner, scores })
}

/// Distance used for the representativeness pick. Only Euclidean exists.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    #[default]
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlrlConfig {
    /// Number of samples to select.
    pub budget: usize,
    /// Number of pseudo annotators.
    #[serde(default = "default_m")]
    pub m: usize,
    pub learner: ActiveLearnerSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub distance: Distance,
    #[serde(default)]
    pub fit: FitOptions,
}

fn default_m() -> usize {
    10
}

impl AlrlConfig {
    pub fn new(budget: usize, m: usize, learner: ActiveLearnerSpec, seed: u64) -> Self {
        AlrlConfig {
            budget,
            m,
            learner,
            seed,
            distance: Distance::Euclidean,
            fit: FitOptions::default(),
        }
    }
}

/// What happened in one round of selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    /// One proposal per annotator, in annotator order.
    pub candidates: Vec<usize>,
    /// Distance after promoting each distinct candidate.
    pub mnnd: Vec<(usize, f64)>,
    pub winner: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Train indices in selection order.
    pub selected: Vec<usize>,
    pub steps: Vec<StepLog>,
}

/// Runs the full random-labeling selection loop and returns `budget` train
/// indices in the order they were chosen.
pub fn alrl_select(pool: &PoolState, train: &Dataset, cfg: &AlrlConfig) -> Result<SelectionResult> {
    cfg.learner.validate()?;
    cfg.fit.validate()?;
    pool.check()?;
    if pool.total() != train.len() {
        return Err(Error::DimensionMismatch {
            expected: train.len(),
            found: pool.total(),
        });
    }
    if cfg.budget > pool.unlabeled.len() {
        return Err(Error::BudgetExceedsPool {
            requested: cfg.budget,
            available: pool.unlabeled.len(),
        });
    }
    let bank = PseudoAnnotatorBank::new(cfg.m, cfg.seed)?;
    let features = train.features.view();
    let c = train.num_classes;
    let mut state = pool.clone();
    let mut cache = NearestCache::new(features, &state.unlabeled, &state.anchors())?;
    let mut steps = Vec::with_capacity(cfg.budget);

    for round in 0..cfg.budget {
        let anchors = state.anchors();
        let view_x = features.select(Axis(0), &anchors);
        let pool_x = features.select(Axis(0), &state.unlabeled);
        let true_labels: Vec<usize> = state.labeled.iter().map(|&i| train.labels[i]).collect();

        let propose = |i: usize| -> Result<usize> {
            let mut annotator = bank.stream(i, round);
            let mut labels = true_labels.clone();
            labels.extend(random_labels(&state.selected, c, &mut annotator));
            let view = TrainView {
                features: view_x.view(),
                labels: &labels,
                num_classes: c,
            };
            let mut rng = bank.learner_stream(i, round, cfg.learner.rng_seed);
            let pos = learner_select(&cfg.learner, &view, pool_x.view(), &cfg.fit, &mut rng)?;
            Ok(state.unlabeled[pos])
        };
        // with nothing to relabel every annotator sees the same training set
        let candidates: Vec<usize> = if state.selected.is_empty() && cfg.learner.kind == LearnerKind::MaxE {
            propose(0).map(|s| vec![s; cfg.m])
        } else {
            (0..cfg.m).into_par_iter().map(propose).collect::<Result<_>>()
        }
        .map_err(|e| Error::Step {
            step: round,
            source: Box::new(e),
        })?;

        let set = CandidateSet { candidates };
        let (winner, mnnd) = cache.pick(&set.unique());
        state.select(winner)?;
        cache.promote(winner);
        steps.push(StepLog {
            candidates: set.candidates,
            mnnd,
            winner,
        });
    }

    let result = SelectionResult {
        selected: state.selected[pool.selected.len()..].to_vec(),
        steps,
    };
    check_selection(&result.selected, pool, cfg.budget)?;
    Ok(result)
}

/// `|Q| = N`, no duplicates, nothing from `L` and nothing already selected.
pub fn check_selection(selected: &[usize], pool: &PoolState, budget: usize) -> Result<()> {
    if selected.len() != budget {
        return Err(Error::Invariant(format!(
            "selected {} samples, budget is {budget}",
            selected.len()
        )));
    }
    let mut sorted = selected.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Invariant("duplicate selection".into()));
    }
    if let Some(i) = selected.iter().find(|&&i| pool.unlabeled.binary_search(&i).is_err()) {
        return Err(Error::Invariant(format!("selected index {i} was not unlabeled")));
    }
    Ok(())
}

/// Top-`n` of a single scoring pass of `learner` trained on `L` alone, with
/// no refits between picks. Ties go to the lowest pool index.
///
/// MVAL scores `max(cap, n)` sampled candidates (capped by the pool size);
/// a random learner draws `n` distinct points.
pub fn single_shot_topk(
    learner: &ActiveLearnerSpec,
    train: &Dataset,
    pool: &PoolState,
    n: usize,
    opts: &FitOptions,
) -> Result<Vec<usize>> {
    learner.validate()?;
    let u = &pool.unlabeled;
    if n > u.len() {
        return Err(Error::BudgetExceedsPool {
            requested: n,
            available: u.len(),
        });
    }
    let mut rng = seeded_rng(learner.rng_seed);
    if learner.kind == LearnerKind::Random {
        let mut picks = rand::seq::index::sample(&mut rng, u.len(), n).into_vec();
        picks.iter_mut().for_each(|p| *p = u[*p]);
        return Ok(picks);
    }
    let features = train.features.view();
    let lx = features.select(Axis(0), &pool.anchors());
    let ly: Vec<usize> = pool.anchors().iter().map(|&i| train.labels[i]).collect();
    let view = TrainView {
        features: lx.view(),
        labels: &ly,
        num_classes: train.num_classes,
    };
    let pool_x = features.select(Axis(0), u);

    // (pool position, score)
    let scored: Vec<(usize, f64)> = match learner.kind {
        LearnerKind::MaxE => {
            let post = view.fit(opts)?.predict_proba(pool_x.view())?;
            entropy_scores(&post).into_iter().enumerate().collect()
        }
        LearnerKind::Mval => {
            let count = learner.mval_candidate_cap.max(n);
            let candidates = learners::sample_candidates(u.len(), count, &mut rng);
            let rims = build_rims(&view, pool_x.view(), &candidates, opts, learner.rim_warm_start)?;
            candidates.into_iter().zip(mval_scores(&rims).score).collect()
        }
        LearnerKind::Random => unreachable!(),
    };
    Ok(top_n(scored, n).into_iter().map(|p| u[p]).collect())
}

/// Positions of the `n` largest scores, ties to the lowest position.
pub(crate) fn top_n(mut scored: Vec<(usize, f64)>, n: usize) -> Vec<usize> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().take(n).map(|(p, _)| p).collect()
}
