//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use alrl::data::{Dataset, PoolState};
use alrl::model::FitOptions;
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-10.0..10.0)).collect())
        .collect()
}

pub fn to_array(rows: &[Vec<f64>], d: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows.len(), d), |(i, j)| rows[i][j])
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += (a[k] - b[k]) * (a[k] - b[k]);
    }
    s.sqrt()
}

/// Plain double loop over points and anchors.
pub fn brute_dis(points: &[Vec<f64>], anchors: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for p in points {
        let mut best = f64::INFINITY;
        for a in anchors {
            let d = euclid(p, a);
            if d < best {
                best = d;
            }
        }
        total += best;
    }
    total
}

/// Greedy MNND recomputing every distance from scratch at every step.
pub fn brute_simple_mnnd(x: &[Vec<f64>], labeled: &[usize], n: usize) -> (Vec<usize>, Vec<f64>) {
    let mut anchors: Vec<usize> = labeled.to_vec();
    let mut unlabeled: Vec<usize> = (0..x.len()).filter(|i| !labeled.contains(i)).collect();
    let mut picks = Vec::new();
    let mut dists = Vec::new();
    for _ in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for &s in &unlabeled {
            let rest: Vec<Vec<f64>> = unlabeled.iter().filter(|&&u| u != s).map(|&u| x[u].clone()).collect();
            let mut anc: Vec<Vec<f64>> = anchors.iter().map(|&a| x[a].clone()).collect();
            anc.push(x[s].clone());
            let d = brute_dis(&rest, &anc);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((s, d));
            }
        }
        let (s, d) = best.unwrap();
        unlabeled.retain(|&u| u != s);
        anchors.push(s);
        picks.push(s);
        dists.push(d);
    }
    (picks, dists)
}

/// Regularized mean cross-entropy written with explicit loops, parameters
/// laid out as row-major weights followed by biases.
pub fn naive_loss(params: &[f64], x: &Array2<f64>, y: &[usize], c: usize, lambda: f64) -> f64 {
    let (n, d) = x.dim();
    let w = |k: usize, j: usize| params[k * d + j];
    let b = |k: usize| params[c * d + k];
    let mut total = 0.0;
    for i in 0..n {
        let scores: Vec<f64> = (0..c)
            .map(|k| b(k) + (0..d).map(|j| w(k, j) * x[[i, j]]).sum::<f64>())
            .collect();
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
        total += lse - scores[y[i]];
    }
    let reg: f64 = params[..c * d].iter().map(|v| v * v).sum();
    total / n.max(1) as f64 + 0.5 * lambda * reg
}

pub fn central_difference(f: impl Fn(&[f64]) -> f64, at: &[f64], h: f64) -> Vec<f64> {
    (0..at.len())
        .map(|i| {
            let mut plus = at.to_vec();
            let mut minus = at.to_vec();
            plus[i] += h;
            minus[i] -= h;
            (f(&plus) - f(&minus)) / (2.0 * h)
        })
        .collect()
}

/// MVAL-lite components recomputed member by member with fresh fits.
pub struct NaiveMval {
    pub info: Vec<f64>,
    pub repr: Vec<f64>,
}

pub fn naive_mval(
    lx: &Array2<f64>,
    ly: &[usize],
    pool: &Array2<f64>,
    candidates: &[usize],
    c: usize,
    opts: &FitOptions,
) -> NaiveMval {
    use alrl::model::fit;
    let posteriors = |x: &Array2<f64>, y: &[usize]| -> Array2<f64> {
        let m = fit(x.view(), y, c, opts).unwrap();
        m.predict_proba(pool.view()).unwrap().into_inner()
    };
    let base = posteriors(lx, ly);
    let mut members: Vec<(usize, Array2<f64>)> = Vec::new();
    for (slot, &j) in candidates.iter().enumerate() {
        for label in 0..c {
            let mut rows: Vec<Vec<f64>> = lx.outer_iter().map(|r| r.to_vec()).collect();
            rows.push(pool.row(j).to_vec());
            let x = to_array(&rows, lx.ncols());
            let mut y = ly.to_vec();
            y.push(label);
            members.push((slot, posteriors(&x, &y)));
        }
    }
    let count = members.len() as f64;
    let mut info = Vec::new();
    let mut repr = Vec::new();
    for (slot, &i) in candidates.iter().enumerate() {
        let mut v = 0.0;
        for k in 0..c {
            let mean: f64 = members.iter().map(|(_, p)| p[[i, k]]).sum::<f64>() / count;
            v += members.iter().map(|(_, p)| (p[[i, k]] - mean).powi(2)).sum::<f64>() / count;
        }
        info.push(v / c as f64);
        let mut r = 0.0;
        let mut terms = 0usize;
        for (s, p) in &members {
            if *s != slot {
                continue;
            }
            for row in 0..pool.nrows() {
                for k in 0..c {
                    r += (p[[row, k]] - base[[row, k]]).powi(2);
                    terms += 1;
                }
            }
        }
        repr.push(r / terms as f64);
    }
    NaiveMval { info, repr }
}

/// Small labeled Gaussian blob dataset with a pool holding one label per class.
pub fn blobs(seed: u64, per_class: usize, c: usize, d: usize) -> (Dataset, PoolState) {
    let mut g = rng(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for k in 0..c {
        let center: Vec<f64> = (0..d).map(|_| g.random_range(-4.0..4.0)).collect();
        for _ in 0..per_class {
            rows.push(center.iter().map(|v| v + g.random_range(-1.0..1.0)).collect::<Vec<f64>>());
            labels.push(k);
        }
    }
    let ds = Dataset::new(to_array(&rows, d), labels, c).unwrap();
    let labeled = (0..c).map(|k| k * per_class).collect();
    let pool = PoolState::new(ds.len(), labeled).unwrap();
    (ds, pool)
}
