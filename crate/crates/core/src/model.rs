//! L2-regularized multinomial logistic regression.
//!
//! Training minimizes the mean cross-entropy plus `l2_lambda / 2 * ||W||²`
//! (biases are not penalized) with full-batch accelerated gradient descent.
//! Step sizes come from a backtracking line search on the Lipschitz estimate,
//! and a candidate step is only accepted when it does not increase the loss;
//! a rejected step restarts the momentum. Parameters start at zero, so a fit
//! is a pure function of its inputs.

use std::hash::{DefaultHasher, Hash, Hasher};

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Training options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub l2_lambda: f64,
    pub max_iters: usize,
    /// Stop once the gradient norm falls below this.
    pub tol: f64,
    /// `None` starts from zero parameters. `Some(seed)` starts from small
    /// seeded uniform noise in `[-0.01, 0.01]`.
    pub seed: Option<u64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            l2_lambda: 0.1,
            max_iters: 500,
            tol: 1e-6,
            seed: None,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "l2_lambda must be >= 0, got {}",
                self.l2_lambda
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Row-stochastic `n × C` matrix of class posteriors.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorMatrix(Array2<f64>);

impl PosteriorMatrix {
    /// Wraps a matrix after checking that rows are nonnegative and sum to one
    /// within `1e-9`.
    pub fn from_array(values: Array2<f64>) -> Result<Self> {
        for (i, row) in values.outer_iter().enumerate() {
            let sum: f64 = row.sum();
            if (sum - 1.0).abs() > 1e-9 || row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidParameter(format!(
                    "posterior row {i} is not a probability vector"
                )));
            }
        }
        Ok(PosteriorMatrix(values))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let c = rows.first().map_or(0, |r| r.as_ref().len());
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        let values = Array2::from_shape_vec((rows.len(), c), flat)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Self::from_array(values)
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.0.row(i)
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.0.ncols()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Index of the largest entry of row `i`, lowest class on ties.
    pub fn argmax(&self, i: usize) -> usize {
        argmax_first(self.0.row(i))
    }
}

pub(crate) fn argmax_first(row: ArrayView1<'_, f64>) -> usize {
    let mut best = 0;
    for (k, &p) in row.iter().enumerate() {
        if p > row[best] {
            best = k;
        }
    }
    best
}

/// Summary of a training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitInfo {
    pub iterations: usize,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub converged: bool,
}

/// Trained multinomial linear classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    /// `C × d`.
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
    pub num_classes: usize,
    /// Hash of the training inputs, usable as a cache key.
    pub trained_on: u64,
    pub info: FitInfo,
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.weights.ncols()
    }

    /// Parameters flattened as row-major weights followed by biases, the
    /// layout used by [`loss_and_gradient`].
    pub fn params(&self) -> Array1<f64> {
        self.weights.iter().chain(self.biases.iter()).copied().collect()
    }

    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<PosteriorMatrix> {
        predict_proba(self, x)
    }
}

/// Loss and gradient in one pass, over parameters laid out as
/// `[W (C×d, row-major), b (C)]`. An empty design matrix leaves only the
/// regularizer.
pub fn loss_and_gradient(
    params: ArrayView1<'_, f64>,
    x: ArrayView2<'_, f64>,
    y: &[usize],
    num_classes: usize,
    l2_lambda: f64,
) -> Result<(f64, Array1<f64>)> {
    let objective = Objective::new(x, y, num_classes, l2_lambda)?;
    if params.len() != objective.num_params() {
        return Err(Error::DimensionMismatch {
            expected: objective.num_params(),
            found: params.len(),
        });
    }
    Ok(objective.value_grad(params))
}

struct Objective<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [usize],
    c: usize,
    lambda: f64,
}

impl<'a> Objective<'a> {
    fn new(x: ArrayView2<'a, f64>, y: &'a [usize], c: usize, lambda: f64) -> Result<Self> {
        if y.len() != x.nrows() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        if c == 0 {
            return Err(Error::InvalidParameter("num_classes must be >= 1".into()));
        }
        if let Some(&bad) = y.iter().find(|&&v| v >= c) {
            return Err(Error::InvalidParameter(format!("label {bad} outside [0, {c})")));
        }
        Ok(Objective { x, y, c, lambda })
    }

    fn num_params(&self) -> usize {
        self.c * self.x.ncols() + self.c
    }

    fn split<'p>(&self, p: ArrayView1<'p, f64>) -> (ArrayView2<'p, f64>, ArrayView1<'p, f64>) {
        let cd = self.c * self.x.ncols();
        let (w, b) = p.split_at(Axis(0), cd);
        let w = w
            .into_shape_with_order((self.c, self.x.ncols()))
            .expect("contiguous parameter block");
        (w, b)
    }

    /// Scores shifted to log-probabilities in place; returns summed NLL.
    fn log_softmax(&self, p: ArrayView1<'_, f64>) -> (Array2<f64>, f64) {
        let (w, b) = self.split(p);
        let mut scores = self.x.dot(&w.t());
        scores += &b;
        let mut nll = 0.0;
        for (mut row, &label) in scores.outer_iter_mut().zip(self.y) {
            let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            let lse = max + row.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
            row -= lse;
            nll -= row[label];
        }
        (scores, nll)
    }

    fn penalty(&self, p: ArrayView1<'_, f64>) -> f64 {
        let (w, _) = self.split(p);
        0.5 * self.lambda * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn value(&self, p: ArrayView1<'_, f64>) -> f64 {
        let n = self.x.nrows();
        let data = if n == 0 { 0.0 } else { self.log_softmax(p).1 / n as f64 };
        data + self.penalty(p)
    }

    fn value_grad(&self, p: ArrayView1<'_, f64>) -> (f64, Array1<f64>) {
        let n = self.x.nrows();
        let d = self.x.ncols();
        let (w, _) = self.split(p);
        let mut grad = Array1::zeros(self.num_params());
        let mut loss = self.penalty(p);
        if n > 0 {
            let (mut logp, nll) = self.log_softmax(p);
            loss += nll / n as f64;
            // residual (P - Y) / n
            logp.mapv_inplace(f64::exp);
            for (mut row, &label) in logp.outer_iter_mut().zip(self.y) {
                row[label] -= 1.0;
            }
            logp /= n as f64;
            let gw = logp.t().dot(&self.x);
            grad.slice_mut(s![..self.c * d])
                .assign(&Array1::from_iter(gw.iter().copied()));
            grad.slice_mut(s![self.c * d..]).assign(&logp.sum_axis(Axis(0)));
        }
        let mut gw = grad
            .slice_mut(s![..self.c * d])
            .into_shape_with_order((self.c, d))
            .expect("contiguous");
        gw.scaled_add(self.lambda, &w);
        (loss, grad)
    }
}

fn fingerprint(x: ArrayView2<'_, f64>, y: &[usize], c: usize) -> u64 {
    let mut h = DefaultHasher::new();
    x.dim().hash(&mut h);
    for v in x.iter() {
        v.to_bits().hash(&mut h);
    }
    y.hash(&mut h);
    c.hash(&mut h);
    h.finish()
}

fn check_inputs(x: ArrayView2<'_, f64>, y: &[usize]) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::Empty("training set"));
    }
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    for ((row, col), v) in x.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row, col });
        }
    }
    Ok(())
}

/// Trains a model from zero (or seeded) initial parameters.
pub fn fit(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    num_classes: usize,
    opts: &FitOptions,
) -> Result<LinearModel> {
    fit_with_trace(x, y, num_classes, opts).map(|(m, _)| m)
}

/// Like [`fit`], also returning the loss after every iteration (index 0 is
/// the initial loss). The sequence is non-increasing.
pub fn fit_with_trace(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    num_classes: usize,
    opts: &FitOptions,
) -> Result<(LinearModel, Vec<f64>)> {
    opts.validate()?;
    check_inputs(x, y)?;
    let np = num_classes * x.ncols() + num_classes;
    let init = match opts.seed {
        None => Array1::zeros(np),
        Some(seed) => {
            let mut rng = seeded_rng(seed);
            Array1::from_shape_fn(np, |_| rng.random_range(-0.01..0.01))
        }
    };
    train(x, y, num_classes, opts, init)
}

/// Trains starting from the parameters of `start`.
pub fn fit_from(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    num_classes: usize,
    opts: &FitOptions,
    start: &LinearModel,
) -> Result<LinearModel> {
    opts.validate()?;
    check_inputs(x, y)?;
    if start.num_classes != num_classes || start.dim() != x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: num_classes * x.ncols(),
            found: start.num_classes * start.dim(),
        });
    }
    train(x, y, num_classes, opts, start.params()).map(|(m, _)| m)
}

fn train(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    c: usize,
    opts: &FitOptions,
    init: Array1<f64>,
) -> Result<(LinearModel, Vec<f64>)> {
    let obj = Objective::new(x, y, c, opts.l2_lambda)?;
    let mut best = init;
    let mut best_loss = obj.value(best.view());
    let initial_loss = best_loss;
    let mut trace = vec![best_loss];
    let mut momentum_point = best.clone();
    let mut t = 1.0f64;
    let mut lipschitz = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        iterations += 1;
        let (fy, gy) = obj.value_grad(momentum_point.view());
        let gnorm2 = gy.dot(&gy);
        if gnorm2.sqrt() <= opts.tol {
            if fy < best_loss {
                best = momentum_point;
                best_loss = fy;
            }
            trace.push(best_loss);
            converged = true;
            break;
        }
        // let the step grow again before backtracking
        lipschitz *= 0.5;
        let (candidate, f_candidate) = loop {
            let mut z = momentum_point.clone();
            z.scaled_add(-1.0 / lipschitz, &gy);
            let fz = obj.value(z.view());
            if fz <= fy - 0.5 * gnorm2 / lipschitz + 1e-12 * fy.abs() || lipschitz > 1e30 {
                break (z, fz);
            }
            lipschitz *= 2.0;
        };
        if f_candidate <= best_loss {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let prev = std::mem::replace(&mut best, candidate);
            best_loss = f_candidate;
            let beta = (t - 1.0) / t_next;
            momentum_point = &best + &((&best - &prev) * beta);
            t = t_next;
        } else if t == 1.0 {
            // a plain gradient step from the best point no longer descends
            trace.push(best_loss);
            break;
        } else {
            // restart from the last accepted point
            momentum_point = best.clone();
            t = 1.0;
        }
        trace.push(best_loss);
    }

    let obj_view = best.view();
    let (w, b) = obj.split(obj_view);
    let model = LinearModel {
        weights: w.to_owned(),
        biases: b.to_owned(),
        num_classes: c,
        trained_on: fingerprint(x, y, c),
        info: FitInfo {
            iterations,
            initial_loss,
            final_loss: best_loss,
            converged,
        },
    };
    Ok((model, trace))
}

/// Softmax of affine scores with max subtraction.
pub fn predict_proba(model: &LinearModel, x: ArrayView2<'_, f64>) -> Result<PosteriorMatrix> {
    if x.ncols() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: x.ncols(),
        });
    }
    let mut scores = x.dot(&model.weights.t());
    scores += &model.biases;
    for mut row in scores.outer_iter_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let z = row.sum();
        row /= z;
    }
    Ok(PosteriorMatrix(scores))
}

/// Fraction of argmax predictions matching the labels. Ties go to the lowest
/// class index.
pub fn accuracy(model: &LinearModel, test: &Dataset) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Empty("test set"));
    }
    let post = predict_proba(model, test.features.view())?;
    let correct = (0..test.len())
        .filter(|&i| post.argmax(i) == test.labels[i])
        .count();
    Ok(correct as f64 / test.len() as f64)
}
