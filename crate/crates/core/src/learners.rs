//! Myopic active learners: maximum-entropy uncertainty sampling, a
//! committee learner scored from retraining information matrices (RIMs), and
//! uniform random choice.
//!
//! Every learner returns a position into the pool it was handed. Ties always
//! resolve to the lowest position.

use ndarray::{concatenate, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, FitOptions, LinearModel, PosteriorMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    #[serde(alias = "MaxE")]
    MaxE,
    #[serde(alias = "MVAL")]
    Mval,
    #[serde(alias = "Random")]
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveLearnerSpec {
    pub kind: LearnerKind,
    #[serde(default = "default_cap")]
    pub mval_candidate_cap: usize,
    #[serde(default)]
    pub rng_seed: u64,
    /// Start each RIM refit from the base model's parameters.
    #[serde(default)]
    pub rim_warm_start: bool,
}

fn default_cap() -> usize {
    50
}

impl ActiveLearnerSpec {
    pub fn new(kind: LearnerKind) -> Self {
        ActiveLearnerSpec {
            kind,
            mval_candidate_cap: default_cap(),
            rng_seed: 0,
            rim_warm_start: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mval_candidate_cap == 0 {
            return Err(Error::InvalidParameter("mval_candidate_cap must be >= 1".into()));
        }
        Ok(())
    }
}

/// Labeled training view: features with the labels the learner should
/// believe (true labels for `L`, pseudo labels for `Q`).
#[derive(Debug, Clone, Copy)]
pub struct TrainView<'a> {
    pub features: ArrayView2<'a, f64>,
    pub labels: &'a [usize],
    pub num_classes: usize,
}

impl TrainView<'_> {
    pub fn fit(&self, opts: &FitOptions) -> Result<LinearModel> {
        model::fit(self.features, self.labels, self.num_classes, opts)
    }
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn entropy(p: ArrayView1<'_, f64>) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}

pub fn entropy_scores(post: &PosteriorMatrix) -> Vec<f64> {
    (0..post.nrows()).map(|i| entropy(post.row(i))).collect()
}

pub(crate) fn argmax_lowest(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    best
}

/// Row with the highest posterior entropy.
pub fn select_maxe(post: &PosteriorMatrix) -> Result<usize> {
    argmax_lowest(&entropy_scores(post)).ok_or(Error::Empty("unlabeled pool"))
}

/// Posteriors over the pool of a base model and of one refit per
/// `(candidate, assumed label)` member.
#[derive(Debug, Clone)]
pub struct RimTensor {
    /// One slice per member, each `|pool| × C`, in `member_index` order.
    pub values: Vec<PosteriorMatrix>,
    /// `(candidate position, assumed label)`, candidate-major.
    pub member_index: Vec<(usize, usize)>,
    pub base: PosteriorMatrix,
    /// Candidate positions into the pool, in the order given.
    pub candidates: Vec<usize>,
}

impl RimTensor {
    pub fn num_classes(&self) -> usize {
        self.base.num_classes()
    }

    pub fn pool_len(&self) -> usize {
        self.base.nrows()
    }

    /// Slice for member `(candidate_slot, label)`.
    pub fn slice(&self, candidate_slot: usize, label: usize) -> &PosteriorMatrix {
        &self.values[candidate_slot * self.num_classes() + label]
    }
}

/// Fits the base model on `view`, then one model per candidate and label on
/// `view` plus that single pseudo-labeled point, and records every model's
/// posteriors over the whole pool. Fits run in parallel, the tensor is
/// assembled in member order.
pub fn build_rims(
    view: &TrainView<'_>,
    pool: ArrayView2<'_, f64>,
    candidates: &[usize],
    opts: &FitOptions,
    warm_start: bool,
) -> Result<RimTensor> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    if let Some(&bad) = candidates.iter().find(|&&j| j >= pool.nrows()) {
        return Err(Error::InvalidParameter(format!(
            "candidate {bad} outside pool of {}",
            pool.nrows()
        )));
    }
    let c = view.num_classes;
    let base_model = view.fit(opts)?;
    let base = base_model.predict_proba(pool)?;
    let member_index: Vec<(usize, usize)> = candidates
        .iter()
        .flat_map(|&j| (0..c).map(move |y| (j, y)))
        .collect();

    let values = member_index
        .par_iter()
        .map(|&(j, y)| {
            let x = concatenate(Axis(0), &[view.features, pool.row(j).insert_axis(Axis(0))])
                .expect("pool and view share a feature dimension");
            let mut labels = view.labels.to_vec();
            labels.push(y);
            let fitted = if warm_start {
                model::fit_from(x.view(), &labels, c, opts, &base_model)
            } else {
                model::fit(x.view(), &labels, c, opts)
            };
            fitted
                .and_then(|m| m.predict_proba(pool))
                .map_err(|e| Error::RimFit {
                    candidate: j,
                    label: y,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(RimTensor {
        values,
        member_index,
        base,
        candidates: candidates.to_vec(),
    })
}

/// Per-candidate variance terms and their product, aligned with
/// `RimTensor::candidates`.
#[derive(Debug, Clone, PartialEq)]
pub struct MvalScores {
    /// Mean over classes of the across-member variance of the candidate's
    /// own posterior.
    pub info: Vec<f64>,
    /// Mean squared change of the pool posteriors caused by refitting with
    /// the candidate under each label.
    pub repr: Vec<f64>,
    pub score: Vec<f64>,
}

pub fn mval_scores(rims: &RimTensor) -> MvalScores {
    let c = rims.num_classes();
    let members = rims.values.len() as f64;
    let pool = rims.pool_len();
    let base = rims.base.view();

    let info: Vec<f64> = rims
        .candidates
        .iter()
        .map(|&i| {
            (0..c)
                .map(|k| {
                    let mean = rims.values.iter().map(|s| s.row(i)[k]).sum::<f64>() / members;
                    rims.values
                        .iter()
                        .map(|s| (s.row(i)[k] - mean).powi(2))
                        .sum::<f64>()
                        / members
                })
                .sum::<f64>()
                / c as f64
        })
        .collect();

    let repr: Vec<f64> = (0..rims.candidates.len())
        .map(|slot| {
            let total: f64 = (0..c)
                .map(|y| {
                    let slice = rims.slice(slot, y).view();
                    slice
                        .iter()
                        .zip(base.iter())
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                })
                .sum();
            total / (c * pool * c) as f64
        })
        .collect();

    let score = info.iter().zip(&repr).map(|(a, b)| a * b).collect();
    MvalScores { info, repr, score }
}

/// Candidate with the largest fused score, returned as a pool position. Ties
/// go to the lowest position.
pub fn select_mval(rims: &RimTensor) -> Result<usize> {
    if rims.candidates.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    let scores = mval_scores(rims).score;
    let mut best = 0;
    for slot in 1..scores.len() {
        let (cand, cur) = (rims.candidates[slot], rims.candidates[best]);
        if scores[slot] > scores[best] || (scores[slot] == scores[best] && cand < cur) {
            best = slot;
        }
    }
    Ok(rims.candidates[best])
}

/// `min(cap, pool_len)` distinct positions drawn without replacement, sorted.
pub fn sample_candidates<R: Rng + ?Sized>(pool_len: usize, cap: usize, rng: &mut R) -> Vec<usize> {
    if cap >= pool_len {
        return (0..pool_len).collect();
    }
    let mut v = rand::seq::index::sample(rng, pool_len, cap).into_vec();
    v.sort_unstable();
    v
}

/// One selection by the configured learner. `pool` holds the feature rows of
/// the unlabeled set; the result is a position into it.
pub fn learner_select<R: Rng + ?Sized>(
    spec: &ActiveLearnerSpec,
    view: &TrainView<'_>,
    pool: ArrayView2<'_, f64>,
    opts: &FitOptions,
    rng: &mut R,
) -> Result<usize> {
    let n = pool.nrows();
    if n == 0 {
        return Err(Error::Empty("unlabeled pool"));
    }
    match spec.kind {
        LearnerKind::Random => Ok(rng.random_range(0..n)),
        _ if n == 1 => Ok(0),
        LearnerKind::MaxE => {
            let m = view.fit(opts)?;
            select_maxe(&m.predict_proba(pool)?)
        }
        LearnerKind::Mval => {
            let candidates = sample_candidates(n, spec.mval_candidate_cap, rng);
            let rims = build_rims(view, pool, &candidates, opts, spec.rim_warm_start)?;
            select_mval(&rims)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use ndarray::{array, Array2};

    #[test]
    fn maxe_prefers_the_balanced_row() {
        let post = PosteriorMatrix::from_rows(&[[0.9, 0.1], [0.5, 0.5]]).unwrap();
        assert_eq!(select_maxe(&post).unwrap(), 1);
        let h = entropy_scores(&post);
        assert!((h[1] - 2f64.ln()).abs() < 1e-12);
        assert!((h[0] - 0.325_082_973_391_448_2).abs() < 1e-12);
    }

    #[test]
    fn one_hot_rows_are_never_chosen() {
        let post = PosteriorMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.98, 0.01, 0.01], [0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(entropy(post.row(0)), 0.0);
        assert_eq!(select_maxe(&post).unwrap(), 1);
    }

    #[test]
    fn uniform_rows_tie_to_index_zero() {
        let post = PosteriorMatrix::from_rows(&[[0.25; 4], [0.25; 4], [0.25; 4]]).unwrap();
        assert!((entropy(post.row(2)) - 4f64.ln()).abs() < 1e-12);
        assert_eq!(select_maxe(&post).unwrap(), 0);
    }

    #[test]
    fn empty_pool_is_an_error() {
        let post = PosteriorMatrix::from_array(Array2::zeros((0, 2))).unwrap();
        assert!(select_maxe(&post).is_err());
    }

    fn line_view() -> (Array2<f64>, Vec<usize>, Array2<f64>) {
        let lx = array![[-2.0], [-1.5], [1.5], [2.0]];
        let ly = vec![0, 0, 1, 1];
        let pool = Array2::from_shape_fn((10, 1), |(i, _)| -3.0 + 0.6 * i as f64);
        (lx, ly, pool)
    }

    #[test]
    fn rim_shape() {
        let mut lx = Array2::zeros((3, 1));
        lx[[1, 0]] = 1.0;
        lx[[2, 0]] = 2.0;
        let ly = vec![0, 1, 2];
        let pool = Array2::from_shape_fn((10, 1), |(i, _)| i as f64 * 0.3);
        let view = TrainView { features: lx.view(), labels: &ly, num_classes: 3 };
        let rims = build_rims(&view, pool.view(), &[2, 7], &FitOptions::default(), false).unwrap();
        assert_eq!(rims.values.len(), 6);
        assert_eq!(rims.member_index, vec![(2, 0), (2, 1), (2, 2), (7, 0), (7, 1), (7, 2)]);
        for s in &rims.values {
            assert_eq!(s.view().dim(), (10, 3));
            for row in s.view().outer_iter() {
                assert!((row.sum() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn all_slices_equal_base_gives_zero_scores() {
        let base = PosteriorMatrix::from_rows(&[[0.6, 0.4], [0.3, 0.7], [0.5, 0.5]]).unwrap();
        let rims = RimTensor {
            values: vec![base.clone(); 4],
            member_index: vec![(1, 0), (1, 1), (2, 0), (2, 1)],
            base,
            candidates: vec![1, 2],
        };
        let s = mval_scores(&rims);
        assert!(s.score.iter().all(|&v| v == 0.0));
        assert_eq!(select_mval(&rims).unwrap(), 1);
    }

    #[test]
    fn learner_on_singleton_pool() {
        let (lx, ly, _) = line_view();
        let view = TrainView { features: lx.view(), labels: &ly, num_classes: 2 };
        let pool = array![[0.3]];
        for kind in [LearnerKind::MaxE, LearnerKind::Mval, LearnerKind::Random] {
            let spec = ActiveLearnerSpec::new(kind);
            let mut rng = seeded_rng(1);
            assert_eq!(learner_select(&spec, &view, pool.view(), &FitOptions::default(), &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn random_learner_is_reproducible() {
        let (lx, ly, pool) = line_view();
        let view = TrainView { features: lx.view(), labels: &ly, num_classes: 2 };
        let spec = ActiveLearnerSpec::new(LearnerKind::Random);
        let draw = |seed| {
            let mut rng = seeded_rng(seed);
            (0..20)
                .map(|_| learner_select(&spec, &view, pool.view(), &FitOptions::default(), &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn candidate_cap_above_pool_uses_everything() {
        let mut rng = seeded_rng(0);
        assert_eq!(sample_candidates(5, 50, &mut rng), vec![0, 1, 2, 3, 4]);
        let s = sample_candidates(100, 7, &mut rng);
        assert_eq!(s.len(), 7);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn score_scaling_keeps_argmax() {
        let (lx, ly, pool) = line_view();
        let view = TrainView { features: lx.view(), labels: &ly, num_classes: 2 };
        let rims = build_rims(&view, pool.view(), &[0, 3, 5, 9], &FitOptions::default(), false).unwrap();
        let s = mval_scores(&rims).score;
        let scaled: Vec<f64> = s.iter().map(|v| v * 37.5).collect();
        assert_eq!(argmax_lowest(&s), argmax_lowest(&scaled));
    }

    #[test]
    fn rim_fit_failure_reports_the_member() {
        let lx = array![[0.0], [1.0]];
        let ly = vec![0, 1];
        let view = TrainView { features: lx.view(), labels: &ly, num_classes: 2 };
        let pool = array![[0.5], [f64::INFINITY]];
        let base_err = build_rims(&view, pool.view(), &[1], &FitOptions::default(), false);
        // the refit includes the non-finite pool row
        assert!(matches!(base_err, Err(Error::RimFit { candidate: 1, label: 0, .. })));
    }
}
