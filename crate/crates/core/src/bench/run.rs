use std::time::Instant;

use ndarray::Axis;
use rayon::prelude::*;

use super::config::{ExperimentConfig, MethodKind, MethodSpec};
use super::report::ResultRow;
use crate::alrl::{alrl_select, single_shot_topk, AlrlConfig};
use crate::baselines::{kmeanspp_select, pool_rows, random_select, simple_mnnd_select, KmppConfig};
use crate::data::{init_labeled, split_indices, standardize, Dataset, PoolState, SplitSpec};
use crate::error::{Error, Result};
use crate::model::{self, FitOptions};
use crate::rng::{mix, mix_all, name_key, seeded_rng};

/// One prepared train/test split with its initial labeled set.
#[derive(Debug, Clone)]
pub struct Trial {
    pub train: Dataset,
    pub test: Dataset,
    pub pool: PoolState,
    pub seed: u64,
}

pub fn trial_seed(master_seed: u64, dataset_index: usize, trial: usize) -> u64 {
    mix_all(master_seed, &[dataset_index as u64, trial as u64])
}

/// Seed handed to a method for one trial. Depends only on the trial seed and
/// the method name, so adding or reordering methods changes nothing else.
pub fn method_seed(trial_seed: u64, method: &str) -> u64 {
    mix(trial_seed, name_key(method))
}

/// Splits, optionally standardizes with train statistics, and draws one
/// labeled example per class.
pub fn prepare_trial(ds: &Dataset, seed: u64, test_fraction: f64, standardize_features: bool) -> Result<Trial> {
    let split = SplitSpec {
        seed: mix(seed, name_key("split")),
        test_fraction,
    };
    let (tr, te) = split_indices(ds, &split)?;
    let (mut train, mut test) = (ds.subset(&tr), ds.subset(&te));
    if standardize_features {
        let (a, b, _) = standardize(&train, &test)?;
        train = a;
        test = b;
    }
    let pool = init_labeled(&train, mix(seed, name_key("init")))?;
    Ok(Trial { train, test, pool, seed })
}

/// Test accuracy of a classifier trained on `L` plus `selected`, all with
/// their true labels.
pub fn evaluate_selection(trial: &Trial, selected: &[usize], opts: &FitOptions) -> Result<f64> {
    let mut idx = trial.pool.labeled.clone();
    idx.extend_from_slice(selected);
    let x = trial.train.features.select(Axis(0), &idx);
    let y: Vec<usize> = idx.iter().map(|&i| trial.train.labels[i]).collect();
    let m = model::fit(x.view(), &y, trial.train.num_classes, opts)?;
    model::accuracy(&m, &trial.test)
}

/// Runs `method` on a prepared trial. Sequential methods select once at the
/// largest feasible budget and are evaluated on prefixes. k-means++ is rerun
/// with `k` equal to each budget.
pub fn run_method(
    method: &MethodSpec,
    trial: &Trial,
    budgets: &[usize],
    opts: &FitOptions,
    seed: u64,
) -> Vec<(usize, Result<f64>, u64)> {
    let available = trial.pool.unlabeled.len();
    let over = |b: usize| Error::BudgetExceedsPool {
        requested: b,
        available,
    };
    if let MethodKind::Kmeanspp {
        restarts,
        max_lloyd_iters,
    } = method.kind
    {
        let points = pool_rows(trial.train.features.view(), &trial.pool.unlabeled);
        return budgets
            .iter()
            .map(|&b| {
                let start = Instant::now();
                let cfg = KmppConfig {
                    k: b,
                    restarts,
                    max_lloyd_iters,
                    seed: mix(seed, b as u64),
                };
                let acc = kmeanspp_select(points.view(), &cfg).and_then(|out| {
                    let picks: Vec<usize> = out.picks.iter().map(|&p| trial.pool.unlabeled[p]).collect();
                    evaluate_selection(trial, &picks, opts)
                });
                (b, acc, start.elapsed().as_millis() as u64)
            })
            .collect();
    }

    let target = budgets.iter().copied().filter(|&b| b <= available).max().unwrap_or(0);
    let start = Instant::now();
    let selection = select_sequence(method, trial, target, opts, seed);
    let select_ms = start.elapsed().as_millis() as u64;
    budgets
        .iter()
        .map(|&b| {
            let start = Instant::now();
            let acc = if b > available {
                Err(over(b))
            } else {
                match &selection {
                    Ok(sel) => evaluate_selection(trial, &sel[..b], opts),
                    Err(e) => Err(Error::Invariant(e.to_string())),
                }
            };
            (b, acc, select_ms + start.elapsed().as_millis() as u64)
        })
        .collect()
}

fn select_sequence(method: &MethodSpec, trial: &Trial, n: usize, opts: &FitOptions, seed: u64) -> Result<Vec<usize>> {
    let pool = &trial.pool;
    match &method.kind {
        MethodKind::Alrl { m, learner } => {
            let mut learner = *learner;
            learner.rng_seed = mix(seed, name_key("learner"));
            let mut cfg = AlrlConfig::new(n, *m, learner, seed);
            cfg.fit = *opts;
            Ok(alrl_select(pool, &trial.train, &cfg)?.selected)
        }
        MethodKind::SingleShot { learner } => {
            let mut learner = *learner;
            learner.rng_seed = mix(seed, name_key("learner"));
            single_shot_topk(&learner, &trial.train, pool, n, opts)
        }
        MethodKind::Random => random_select(&pool.unlabeled, n, &mut seeded_rng(seed)),
        MethodKind::SimpleMnnd => Ok(simple_mnnd_select(trial.train.features.view(), pool, n)?.selected),
        MethodKind::Kmeanspp { .. } => unreachable!("k-means++ is not sequential"),
    }
}

/// Runs every (dataset, trial, method) cell. Failed cells produce rows with an
/// empty accuracy. Dataset loading and splitting failures abort the run.
/// Rows come back sorted by dataset, method, trial, budget and `m`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut trials = Vec::new();
    for (di, spec) in cfg.datasets.iter().enumerate() {
        let ds = spec.load()?;
        log::info!("dataset {}: {} rows, {} features, {} classes", spec.name, ds.len(), ds.dim(), ds.num_classes);
        for t in 0..cfg.trials {
            let seed = trial_seed(cfg.master_seed, di, t);
            trials.push((di, t, prepare_trial(&ds, seed, cfg.test_fraction, spec.standardize())?));
        }
    }
    let cells: Vec<(usize, &(usize, usize, Trial))> = trials
        .iter()
        .flat_map(|tr| (0..cfg.methods.len()).map(move |mi| (mi, tr)))
        .collect();
    let mut rows: Vec<ResultRow> = cells
        .par_iter()
        .flat_map_iter(|&(mi, (di, t, trial))| {
            let method = &cfg.methods[mi];
            let dataset = &cfg.datasets[*di].name;
            let seed = method_seed(trial.seed, &method.name);
            run_method(method, trial, &cfg.budgets, &cfg.fit, seed)
                .into_iter()
                .map(move |(budget, acc, ms)| {
                    let accuracy = match acc {
                        Ok(a) => Some(a),
                        Err(e) => {
                            log::warn!("{} on {dataset} trial {t} budget {budget}: {e}", method.name);
                            None
                        }
                    };
                    ResultRow {
                        method: method.name.clone(),
                        dataset: dataset.clone(),
                        trial: *t,
                        budget,
                        m: method.annotators(),
                        accuracy,
                        elapsed_ms: if cfg.record_timing { ms } else { 0 },
                        seed,
                    }
                })
        })
        .collect();
    sort_rows(&mut rows);
    Ok(rows)
}

pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        (&a.dataset, &a.method, a.trial, a.budget, a.m).cmp(&(&b.dataset, &b.method, b.trial, b.budget, b.m))
    });
}

/// Reruns the random-labeling methods of `cfg` once per annotator count in
/// `m_values`. Other methods are dropped. Seeds do not depend on `m`, so
/// each trial sees the same split and initial labels for every `m`.
pub fn sensitivity_sweep(cfg: &ExperimentConfig, m_values: &[usize]) -> Result<Vec<ResultRow>> {
    if m_values.is_empty() || m_values.contains(&0) {
        return Err(Error::Config("m values must be nonempty and positive".into()));
    }
    let methods: Vec<&MethodSpec> = cfg
        .methods
        .iter()
        .filter(|m| matches!(m.kind, MethodKind::Alrl { .. }))
        .collect();
    if methods.is_empty() {
        return Err(Error::Config("sweep needs at least one alrl method".into()));
    }
    let mut rows = Vec::new();
    for &mv in m_values {
        let mut sub = cfg.clone();
        sub.methods = methods
            .iter()
            .map(|m| {
                let mut m = (*m).clone();
                if let MethodKind::Alrl { m: ref mut count, .. } = m.kind {
                    *count = mv;
                }
                m
            })
            .collect();
        rows.extend(run_experiment(&sub)?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}
