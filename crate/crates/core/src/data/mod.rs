//! Datasets, pools and the preprocessing steps of the benchmark protocol.

mod io;
mod synth;

pub use io::{load_dataset, save_dense_csv, write_dense_csv, DataFormat};
pub use synth::{make_gaussian_clusters, ring_layout};

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Dense feature matrix with contiguous 0-based class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    /// Optional per-sample identifiers. Synthetic sets store the cluster of
    /// origin here.
    pub ids: Option<Vec<usize>>,
    /// Original label text, indexed by remapped class.
    pub class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset and checks its invariants: matching lengths, labels in
    /// `[0, num_classes)`, finite features, at least one row and column.
    pub fn new(features: Array2<f64>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        let class_names = (0..num_classes).map(|c| c.to_string()).collect();
        let ds = Dataset {
            features,
            labels,
            num_classes,
            ids: None,
            class_names,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn with_ids(mut self, ids: Vec<usize>) -> Result<Self> {
        if ids.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: ids.len(),
            });
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.num_classes {
            return Err(Error::DimensionMismatch {
                expected: self.num_classes,
                found: names.len(),
            });
        }
        self.class_names = names;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let (n, d) = self.features.dim();
        if n == 0 {
            return Err(Error::Empty("dataset"));
        }
        if d == 0 {
            return Err(Error::InvalidDataset("zero feature columns".into()));
        }
        if self.labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.labels.len(),
            });
        }
        if self.num_classes == 0 {
            return Err(Error::InvalidDataset("zero classes".into()));
        }
        if let Some(&bad) = self.labels.iter().find(|&&y| y >= self.num_classes) {
            return Err(Error::InvalidDataset(format!(
                "label {bad} outside [0, {})",
                self.num_classes
            )));
        }
        for ((row, col), v) in self.features.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    /// Per-class sample counts.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Indices of each class, in ascending order.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes];
        for (i, &y) in self.labels.iter().enumerate() {
            out[y].push(i);
        }
        out
    }

    /// Row subset in the given order. Class count and names are kept.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
            ids: self
                .ids
                .as_ref()
                .map(|ids| indices.iter().map(|&i| ids[i]).collect()),
            class_names: self.class_names.clone(),
        }
    }
}

/// Partition of a training set into truly labeled, selected and unlabeled
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolState {
    pub labeled: Vec<usize>,
    /// Selection order is preserved.
    pub selected: Vec<usize>,
    /// Kept in ascending order.
    pub unlabeled: Vec<usize>,
}

impl PoolState {
    /// Pool over `n` training indices with `labeled` revealed and everything
    /// else unlabeled.
    pub fn new(n: usize, labeled: Vec<usize>) -> Result<Self> {
        let mut mark = vec![false; n];
        for &i in &labeled {
            if i >= n {
                return Err(Error::InvalidParameter(format!(
                    "labeled index {i} out of range for {n} samples"
                )));
            }
            if mark[i] {
                return Err(Error::InvalidParameter(format!("labeled index {i} repeated")));
            }
            mark[i] = true;
        }
        let unlabeled = (0..n).filter(|&i| !mark[i]).collect();
        Ok(PoolState {
            labeled,
            selected: Vec::new(),
            unlabeled,
        })
    }

    pub fn total(&self) -> usize {
        self.labeled.len() + self.selected.len() + self.unlabeled.len()
    }

    /// Moves `index` from the unlabeled set to the end of the selection.
    pub fn select(&mut self, index: usize) -> Result<()> {
        match self.unlabeled.binary_search(&index) {
            Ok(pos) => {
                self.unlabeled.remove(pos);
                self.selected.push(index);
                Ok(())
            }
            Err(_) => Err(Error::Invariant(format!(
                "index {index} is not in the unlabeled pool"
            ))),
        }
    }

    /// `L ∪ Q` in a fixed order: labeled first, then selections in order.
    pub fn anchors(&self) -> Vec<usize> {
        self.labeled.iter().chain(&self.selected).copied().collect()
    }

    /// Checks disjointness and coverage of `0..total()`.
    pub fn check(&self) -> Result<()> {
        let n = self.total();
        let mut seen = vec![false; n];
        for &i in self.labeled.iter().chain(&self.selected).chain(&self.unlabeled) {
            if i >= n || seen[i] {
                return Err(Error::Invariant(format!(
                    "index {i} repeated or out of range in pool state"
                )));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Parameters of a stratified train/test split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub seed: u64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
}

fn default_test_fraction() -> f64 {
    0.5
}

impl SplitSpec {
    pub fn new(seed: u64) -> Self {
        SplitSpec {
            seed,
            test_fraction: default_test_fraction(),
        }
    }
}

/// Stratified split indices `(train, test)`, each in ascending order.
///
/// The training side holds `round(n * (1 - test_fraction))` samples. Per-class
/// training counts follow the largest-remainder rule, so every class count is
/// within one of its exact share; every class lands on both sides.
pub fn split_indices(ds: &Dataset, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let f = spec.test_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test_fraction must lie in (0, 1), got {f}"
        )));
    }
    let by_class = ds.class_indices();
    for (class, members) in by_class.iter().enumerate() {
        if members.len() == 1 {
            return Err(Error::SingletonClass { class });
        }
    }
    let n = ds.len();
    let target = (n as f64 * (1.0 - f)).round() as usize;

    // largest remainder apportionment, clamped so both sides stay nonempty
    let exact: Vec<f64> = by_class.iter().map(|m| m.len() as f64 * (1.0 - f)).collect();
    let mut counts: Vec<usize> = by_class
        .iter()
        .zip(&exact)
        .map(|(m, &e)| {
            if m.is_empty() {
                0
            } else {
                (e.floor() as usize).clamp(1, m.len() - 1)
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..by_class.len()).filter(|&c| !by_class[c].is_empty()).collect();
    let frac = |c: usize| exact[c] - counts[c] as f64;
    order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
    let mut total: usize = counts.iter().sum();
    while total < target {
        let Some(&c) = order.iter().find(|&&c| counts[c] + 1 < by_class[c].len()) else {
            break;
        };
        counts[c] += 1;
        total += 1;
        order.retain(|&o| o != c);
        order.push(c);
    }
    while total > target {
        let Some(&c) = order.iter().rev().find(|&&c| counts[c] > 1) else {
            break;
        };
        counts[c] -= 1;
        total -= 1;
        order.retain(|&o| o != c);
        order.insert(0, c);
    }

    let mut rng = seeded_rng(spec.seed);
    let mut train = Vec::with_capacity(target);
    let mut test = Vec::with_capacity(n - target);
    for (members, &k) in by_class.iter().zip(&counts) {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        train.extend_from_slice(&shuffled[..k]);
        test.extend_from_slice(&shuffled[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Stratified random split into `(train, test)` datasets.
pub fn split_train_test(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(ds, spec)?;
    Ok((ds.subset(&train), ds.subset(&test)))
}

/// One labeled sample per class, drawn uniformly within each class; the rest
/// of the training set is unlabeled.
pub fn init_labeled(train: &Dataset, seed: u64) -> Result<PoolState> {
    let mut rng = seeded_rng(seed);
    let mut labeled = Vec::with_capacity(train.num_classes);
    for (class, members) in train.class_indices().iter().enumerate() {
        if members.is_empty() {
            return Err(Error::MissingClass { class });
        }
        labeled.push(members[rng.random_range(0..members.len())]);
    }
    PoolState::new(train.len(), labeled)
}

/// Per-feature affine scaling fitted on a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Array1<f64>,
    /// Population standard deviations; zero marks a constant feature, which
    /// is centered but not divided.
    pub stds: Array1<f64>,
}

const ZERO_VARIANCE: f64 = 1e-12;

impl Standardizer {
    pub fn fit(train: &Dataset) -> Self {
        let x = &train.features;
        let means = x.mean_axis(Axis(0)).expect("dataset is nonempty");
        let stds = x.std_axis(Axis(0), 0.0);
        Standardizer { means, stds }
    }

    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        if ds.dim() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                found: ds.dim(),
            });
        }
        let scale = self.stds.mapv(|s| if s < ZERO_VARIANCE { 1.0 } else { s });
        let mut out = ds.clone();
        out.features -= &self.means;
        out.features /= &scale;
        Ok(out)
    }
}

/// Standardizes both sets with statistics computed on `train` alone.
pub fn standardize(train: &Dataset, test: &Dataset) -> Result<(Dataset, Dataset, Standardizer)> {
    let scaler = Standardizer::fit(train);
    Ok((scaler.transform(train)?, scaler.transform(test)?, scaler))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn two_class(per_class: usize) -> Dataset {
        let n = 2 * per_class;
        let x = Array2::from_shape_fn((n, 2), |(i, j)| (i * 3 + j) as f64);
        let y = (0..n).map(|i| i % 2).collect();
        Dataset::new(x, y, 2).unwrap()
    }

    #[test]
    fn equal_split_of_one_hundred() {
        let ds = two_class(50);
        let (train, test) = split_train_test(&ds, &SplitSpec::new(3)).unwrap();
        assert_eq!(train.len(), 50);
        assert_eq!(test.len(), 50);
    }

    #[test]
    fn stratified_five_per_side() {
        let ds = two_class(10);
        let (train, test) = split_train_test(&ds, &SplitSpec::new(11)).unwrap();
        assert_eq!(train.class_counts(), vec![5, 5]);
        assert_eq!(test.class_counts(), vec![5, 5]);
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let ds = two_class(17);
        let spec = SplitSpec { seed: 9, test_fraction: 0.3 };
        let a = split_indices(&ds, &spec).unwrap();
        let b = split_indices(&ds, &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.0.len(), (34.0f64 * 0.7).round() as usize);
        assert!(a.0.iter().all(|i| !a.1.contains(i)));
        let other = split_indices(&ds, &SplitSpec { seed: 10, test_fraction: 0.3 }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn uneven_classes_stay_within_one_of_exact_share() {
        let labels: Vec<usize> = (0..37).map(|i| if i < 5 { 0 } else if i < 19 { 1 } else { 2 }).collect();
        let x = Array2::zeros((37, 1));
        let ds = Dataset::new(x, labels, 3).unwrap();
        let spec = SplitSpec { seed: 1, test_fraction: 0.4 };
        let (train, _) = split_train_test(&ds, &spec).unwrap();
        assert_eq!(train.len(), 22);
        for (c, &count) in train.class_counts().iter().enumerate() {
            let exact = ds.class_counts()[c] as f64 * 0.6;
            assert!((count as f64 - exact).abs() <= 1.0);
        }
    }

    #[test]
    fn singleton_class_cannot_be_stratified() {
        let x = Array2::zeros((3, 1));
        let ds = Dataset::new(x, vec![0, 0, 1], 2).unwrap();
        assert!(matches!(
            split_train_test(&ds, &SplitSpec::new(0)),
            Err(Error::SingletonClass { class: 1 })
        ));
    }

    #[test]
    fn bad_fraction_is_rejected() {
        let ds = two_class(4);
        let spec = SplitSpec { seed: 0, test_fraction: 1.0 };
        assert!(split_indices(&ds, &spec).is_err());
    }

    #[test]
    fn init_labeled_picks_one_per_class() {
        let x = Array2::zeros((30, 1));
        let y: Vec<usize> = (0..30).map(|i| i % 10).collect();
        let ds = Dataset::new(x, y, 10).unwrap();
        let pool = init_labeled(&ds, 5).unwrap();
        assert_eq!(pool.labeled.len(), 10);
        assert_eq!(pool.unlabeled.len(), 20);
        assert!(pool.selected.is_empty());
        let mut classes: Vec<usize> = pool.labeled.iter().map(|&i| ds.labels[i]).collect();
        classes.sort_unstable();
        assert_eq!(classes, (0..10).collect::<Vec<_>>());
        assert_eq!(pool, init_labeled(&ds, 5).unwrap());
        pool.check().unwrap();
    }

    #[test]
    fn init_labeled_forced_choice() {
        let x = Array2::zeros((4, 1));
        let ds = Dataset::new(x, vec![0, 0, 0, 1], 2).unwrap();
        for seed in 0..10 {
            assert_eq!(init_labeled(&ds, seed).unwrap().labeled[1], 3);
        }
    }

    #[test]
    fn init_labeled_missing_class() {
        let x = Array2::zeros((2, 1));
        let ds = Dataset::new(x, vec![0, 0], 2).unwrap();
        assert!(matches!(init_labeled(&ds, 0), Err(Error::MissingClass { class: 1 })));
    }

    #[test]
    fn standardize_two_point_column() {
        let train = Dataset::new(array![[0.0, 4.0], [2.0, 4.0]], vec![0, 1], 2).unwrap();
        let (t, _, scaler) = standardize(&train, &train).unwrap();
        assert_eq!(scaler.means, array![1.0, 4.0]);
        assert_eq!(scaler.stds, array![1.0, 0.0]);
        assert_eq!(t.features, array![[-1.0, 0.0], [1.0, 0.0]]);
    }

    #[test]
    fn standardize_is_idempotent() {
        let x = Array2::from_shape_fn((20, 3), |(i, j)| ((i * 7 + j * 3) % 11) as f64 - 2.5);
        let ds = Dataset::new(x, (0..20).map(|i| i % 2).collect(), 2).unwrap();
        let (once, _, _) = standardize(&ds, &ds).unwrap();
        let (twice, _, scaler) = standardize(&once, &once).unwrap();
        for (&m, &s) in scaler.means.iter().zip(&scaler.stds) {
            assert!(m.abs() < 1e-9);
            assert!((s - 1.0).abs() < 1e-9);
        }
        for (a, b) in once.features.iter().zip(&twice.features) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn pool_select_moves_index() {
        let mut pool = PoolState::new(5, vec![0]).unwrap();
        pool.select(3).unwrap();
        pool.select(1).unwrap();
        assert_eq!(pool.selected, vec![3, 1]);
        assert_eq!(pool.unlabeled, vec![2, 4]);
        assert_eq!(pool.anchors(), vec![0, 3, 1]);
        assert!(pool.select(3).is_err());
        pool.check().unwrap();
    }
}
