//! Label-free comparison selectors.

use ndarray::{Array2, ArrayView2, Axis};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alrl::NearestCache;
use crate::data::PoolState;
use crate::error::{Error, Result};
use crate::rng::{mix, seeded_rng};

/// `n` distinct entries of `unlabeled`, uniformly at random.
pub fn random_select<R: Rng + ?Sized>(unlabeled: &[usize], n: usize, rng: &mut R) -> Result<Vec<usize>> {
    if n > unlabeled.len() {
        return Err(Error::BudgetExceedsPool {
            requested: n,
            available: unlabeled.len(),
        });
    }
    Ok(rand::seq::index::sample(rng, unlabeled.len(), n)
        .into_iter()
        .map(|p| unlabeled[p])
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KmppConfig {
    pub k: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_lloyd")]
    pub max_lloyd_iters: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_restarts() -> usize {
    500
}

fn default_lloyd() -> usize {
    100
}

impl KmppConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KmppConfig {
            k,
            restarts: default_restarts(),
            max_lloyd_iters: default_lloyd(),
            seed,
        }
    }
}

/// Lloyd stops once the objective improves by less than this fraction.
const REL_TOL: f64 = 1e-8;

/// One seeded k-means run.
#[derive(Debug, Clone, PartialEq)]
pub struct KmeansRun {
    pub centroids: Array2<f64>,
    pub assignment: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub objective: f64,
    pub iterations: usize,
}

#[inline]
fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding followed by Lloyd iterations. Assignments are
/// maintained with Hamerly's upper/lower distance bounds, which skips most
/// distance evaluations once clusters settle; up to distance ties the
/// assignments are those of plain Lloyd.
pub fn kmeans<R: Rng + ?Sized>(points: ArrayView2<'_, f64>, k: usize, max_iters: usize, rng: &mut R) -> KmeansRun {
    let (n, d) = points.dim();
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let data = points.as_standard_layout();
    let data = data.as_slice().expect("standard layout");
    let row = |i: usize| &data[i * d..(i + 1) * d];

    // seeding; tracks nearest and second nearest seed of every point
    let mut centers = vec![0.0; k * d];
    let mut assign = vec![0usize; n];
    let mut upper = vec![f64::INFINITY; n];
    let mut lower = vec![f64::INFINITY; n];
    let mut chosen = vec![false; n];
    for j in 0..k {
        let pick = if j == 0 {
            rng.random_range(0..n)
        } else {
            let weights: Vec<f64> = upper.iter().map(|u| u * u).collect();
            match WeightedIndex::new(&weights) {
                Ok(w) => w.sample(rng),
                // every point already coincides with a seed
                Err(_) => {
                    let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
                    free[rng.random_range(0..free.len())]
                }
            }
        };
        chosen[pick] = true;
        centers[j * d..(j + 1) * d].copy_from_slice(row(pick));
        let c = &centers[j * d..(j + 1) * d];
        for i in 0..n {
            let dist = dist2(row(i), c).sqrt();
            if dist < upper[i] {
                lower[i] = upper[i];
                upper[i] = dist;
                assign[i] = j;
            } else if dist < lower[i] {
                lower[i] = dist;
            }
        }
    }

    let objective_of = |centers: &[f64], assign: &[usize]| -> f64 {
        (0..n).map(|i| dist2(row(i), &centers[assign[i] * d..(assign[i] + 1) * d])).sum()
    };

    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    let mut moved = vec![0.0; k];
    let mut half_gap = vec![0.0; k];
    let mut prev_obj = f64::INFINITY;
    let mut iterations = 0;
    loop {
        // center update
        sums.iter_mut().for_each(|v| *v = 0.0);
        counts.iter_mut().for_each(|v| *v = 0);
        for (i, &a) in assign.iter().enumerate() {
            counts[a] += 1;
            for (s, x) in sums[a * d..(a + 1) * d].iter_mut().zip(row(i)) {
                *s += x;
            }
        }
        for j in 0..k {
            if counts[j] == 0 {
                moved[j] = 0.0;
                continue;
            }
            let inv = 1.0 / counts[j] as f64;
            let mut shift = 0.0;
            for (c, s) in centers[j * d..(j + 1) * d].iter_mut().zip(&sums[j * d..(j + 1) * d]) {
                let new = s * inv;
                shift += (new - *c) * (new - *c);
                *c = new;
            }
            moved[j] = shift.sqrt();
        }
        let (mut max1, mut max2, mut arg1) = (0.0f64, 0.0f64, usize::MAX);
        for (j, &m) in moved.iter().enumerate() {
            if m > max1 {
                max2 = max1;
                max1 = m;
                arg1 = j;
            } else if m > max2 {
                max2 = m;
            }
        }
        for i in 0..n {
            upper[i] += moved[assign[i]];
            lower[i] -= if assign[i] == arg1 { max2 } else { max1 };
        }

        let obj = objective_of(&centers, &assign);
        if iterations >= max_iters || (prev_obj.is_finite() && prev_obj - obj <= REL_TOL * prev_obj) {
            return KmeansRun {
                centroids: Array2::from_shape_vec((k, d), centers).expect("k*d"),
                assignment: assign,
                objective: obj,
                iterations,
            };
        }
        prev_obj = obj;
        iterations += 1;

        // assignment step
        for j in 0..k {
            let cj = &centers[j * d..(j + 1) * d];
            half_gap[j] = 0.5
                * (0..k)
                    .filter(|&l| l != j)
                    .map(|l| dist2(cj, &centers[l * d..(l + 1) * d]).sqrt())
                    .fold(f64::INFINITY, f64::min);
        }
        let mut changed = 0;
        for i in 0..n {
            let bound = half_gap[assign[i]].max(lower[i]);
            if upper[i] <= bound {
                continue;
            }
            let a = assign[i];
            upper[i] = dist2(row(i), &centers[a * d..(a + 1) * d]).sqrt();
            if upper[i] <= bound {
                continue;
            }
            let (mut best, mut best_d, mut second_d) = (0, f64::INFINITY, f64::INFINITY);
            for j in 0..k {
                let dj = dist2(row(i), &centers[j * d..(j + 1) * d]).sqrt();
                if dj < best_d {
                    second_d = best_d;
                    best_d = dj;
                    best = j;
                } else if dj < second_d {
                    second_d = dj;
                }
            }
            if best != a {
                changed += 1;
            }
            assign[i] = best;
            upper[i] = best_d;
            lower[i] = second_d;
        }
        if changed == 0 {
            // centers are already the means of this assignment
            let obj = objective_of(&centers, &assign);
            return KmeansRun {
                centroids: Array2::from_shape_vec((k, d), centers).expect("k*d"),
                assignment: assign,
                objective: obj,
                iterations,
            };
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmppOutcome {
    /// Row positions into `points`, one per centroid, all distinct.
    pub picks: Vec<usize>,
    pub best: KmeansRun,
    pub best_restart: usize,
    pub restart_objectives: Vec<f64>,
}

/// Best-of-`restarts` k-means++ clustering, then the nearest actual point to
/// each final centroid. When two centroids share a nearest point, the later
/// centroid takes its nearest point not yet taken.
pub fn kmeanspp_select(points: ArrayView2<'_, f64>, cfg: &KmppConfig) -> Result<KmppOutcome> {
    let n = points.nrows();
    if cfg.k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if cfg.k > n {
        return Err(Error::BudgetExceedsPool {
            requested: cfg.k,
            available: n,
        });
    }
    if cfg.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be >= 1".into()));
    }
    let runs: Vec<KmeansRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeded_rng(mix(cfg.seed, r as u64));
            kmeans(points, cfg.k, cfg.max_lloyd_iters, &mut rng)
        })
        .collect();
    let restart_objectives: Vec<f64> = runs.iter().map(|r| r.objective).collect();
    let mut best_restart = 0;
    for (r, &obj) in restart_objectives.iter().enumerate() {
        if obj < restart_objectives[best_restart] {
            best_restart = r;
        }
    }
    let best = runs.into_iter().nth(best_restart).expect("restarts >= 1");
    let picks = nearest_distinct_points(points, best.centroids.view());
    Ok(KmppOutcome {
        picks,
        best,
        best_restart,
        restart_objectives,
    })
}

fn nearest_distinct_points(points: ArrayView2<'_, f64>, centroids: ArrayView2<'_, f64>) -> Vec<usize> {
    let mut taken = vec![false; points.nrows()];
    let mut picks = Vec::with_capacity(centroids.nrows());
    for c in centroids.outer_iter() {
        let mut order: Vec<(f64, usize)> = points
            .outer_iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(c.iter()).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let &(_, pick) = order.iter().find(|(_, i)| !taken[*i]).expect("k <= n");
        taken[pick] = true;
        picks.push(pick);
    }
    picks
}

/// Greedy selection sequence and the pool distance after each pick.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyMnnd {
    pub selected: Vec<usize>,
    pub distances: Vec<f64>,
}

/// `n` greedy steps, each promoting the unlabeled point whose addition to the
/// anchors minimizes the summed nearest-anchor distance of the rest of the
/// pool. Ties go to the lowest index.
pub fn simple_mnnd_select(features: ArrayView2<'_, f64>, pool: &PoolState, n: usize) -> Result<GreedyMnnd> {
    if n > pool.unlabeled.len() {
        return Err(Error::BudgetExceedsPool {
            requested: n,
            available: pool.unlabeled.len(),
        });
    }
    let mut cache = NearestCache::new(features, &pool.unlabeled, &pool.anchors())?;
    let mut selected = Vec::with_capacity(n);
    let mut distances = Vec::with_capacity(n);
    for _ in 0..n {
        let all = cache.unlabeled().to_vec();
        let (winner, scores) = cache.pick(&all);
        let d = scores
            .iter()
            .find(|(s, _)| *s == winner)
            .map(|(_, d)| *d)
            .expect("winner is scored");
        cache.promote(winner);
        selected.push(winner);
        distances.push(d);
    }
    Ok(GreedyMnnd { selected, distances })
}

/// Feature rows of `indices`, for running the unsupervised baselines on `U`.
pub fn pool_rows(features: ArrayView2<'_, f64>, indices: &[usize]) -> Array2<f64> {
    features.select(Axis(0), indices)
}
