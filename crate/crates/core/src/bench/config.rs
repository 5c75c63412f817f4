use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{load_dataset, make_gaussian_clusters, ring_layout, DataFormat, Dataset};
use crate::error::{Error, Result};
use crate::learners::ActiveLearnerSpec;
use crate::model::FitOptions;
use crate::rng::{mix, name_key, seeded_rng};

/// Full description of a benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSpec>,
    pub methods: Vec<MethodSpec>,
    #[serde(default = "default_budgets")]
    pub budgets: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Classifier options shared by selection-side fits and evaluation.
    #[serde(default)]
    pub fit: FitOptions,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    /// Write wall-clock milliseconds into `elapsed_ms`. Off by default so
    /// repeated runs produce identical files.
    #[serde(default)]
    pub record_timing: bool,
}

pub fn default_budgets() -> Vec<usize> {
    vec![20, 40, 60, 80, 100, 120]
}

fn default_trials() -> usize {
    20
}

fn default_test_fraction() -> f64 {
    0.5
}

impl ExperimentConfig {
    pub fn new(datasets: Vec<DatasetSpec>, methods: Vec<MethodSpec>) -> Self {
        ExperimentConfig {
            datasets,
            methods,
            budgets: default_budgets(),
            trials: default_trials(),
            master_seed: 0,
            output_path: None,
            fit: FitOptions::default(),
            test_fraction: default_test_fraction(),
            record_timing: false,
        }
    }

    /// Reads a JSON config. Relative dataset and output paths are resolved
    /// against the config file's directory. Every failure is a [`Error::Config`].
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for ds in &mut cfg.datasets {
            if let DatasetSource::File { path, .. } = &mut ds.source {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        if let Some(out) = cfg.output_path.as_mut().filter(|p| p.is_relative()) {
            *out = base.join(&*out);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.datasets.is_empty() {
            return bad("no datasets".into());
        }
        if self.methods.is_empty() {
            return bad("no methods".into());
        }
        if self.budgets.is_empty() || self.budgets[0] == 0 {
            return bad("budgets must be nonempty and positive".into());
        }
        if self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return bad("budgets must be strictly increasing".into());
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction {} outside (0, 1)", self.test_fraction));
        }
        self.fit.validate().map_err(|e| Error::Config(e.to_string()))?;
        let mut names: Vec<&str> = self.methods.iter().map(|m| m.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("method names must be unique".into());
        }
        let mut names: Vec<&str> = self.datasets.iter().map(|d| d.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("dataset names must be unique".into());
        }
        for m in &self.methods {
            m.validate()?;
        }
        Ok(())
    }

    pub fn max_budget(&self) -> usize {
        *self.budgets.last().expect("validated")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    #[serde(flatten)]
    pub source: DatasetSource,
    /// Defaults to on for files and off for synthetic data.
    #[serde(default)]
    pub standardize: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetSource {
    File { path: PathBuf, format: DataFormat },
    Synthetic { synthetic: SynthSpec },
}

impl DatasetSpec {
    pub fn file(name: &str, path: impl Into<PathBuf>, format: DataFormat) -> Self {
        DatasetSpec {
            name: name.into(),
            source: DatasetSource::File {
                path: path.into(),
                format,
            },
            standardize: None,
        }
    }

    pub fn synthetic(name: &str, spec: SynthSpec) -> Self {
        DatasetSpec {
            name: name.into(),
            source: DatasetSource::Synthetic { synthetic: spec },
            standardize: None,
        }
    }

    pub fn standardize(&self) -> bool {
        self.standardize
            .unwrap_or(matches!(self.source, DatasetSource::File { .. }))
    }

    pub fn load(&self) -> Result<Dataset> {
        match &self.source {
            DatasetSource::File { path, format } => load_dataset(path, *format),
            DatasetSource::Synthetic { synthetic } => synthetic.generate(),
        }
    }
}

/// Gaussian cluster data. Centers come from `centers`/`class_of` when given,
/// otherwise from the ring layout in two dimensions, otherwise uniformly from
/// `[-spread, spread]^dim` with classes assigned by `labeling`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    #[serde(default = "default_classes")]
    pub classes: usize,
    #[serde(default = "default_per_cluster")]
    pub per_cluster: usize,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub spread: Option<f64>,
    #[serde(default)]
    pub centers: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub class_of: Option<Vec<usize>>,
    #[serde(default)]
    pub labeling: Labeling,
}

/// Class assignment for randomly placed clusters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Labeling {
    /// Cluster `j` gets class `j % classes`.
    #[default]
    RoundRobin,
    /// One random prototype per class; each cluster takes the class of the
    /// prototype nearest its center, so classes are separated by hyperplanes.
    /// Prototypes are redrawn until every class owns a cluster.
    NearestPrototype,
}

fn default_clusters() -> usize {
    4
}
fn default_classes() -> usize {
    2
}
fn default_per_cluster() -> usize {
    50
}
fn default_sigma() -> f64 {
    1.0
}
fn default_dim() -> usize {
    2
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            clusters: default_clusters(),
            classes: default_classes(),
            per_cluster: default_per_cluster(),
            sigma: default_sigma(),
            seed: 0,
            dim: default_dim(),
            spread: None,
            centers: None,
            class_of: None,
            labeling: Labeling::RoundRobin,
        }
    }
}

impl SynthSpec {
    pub fn layout(&self) -> Result<(Array2<f64>, Vec<usize>)> {
        if let Some(rows) = &self.centers {
            let d = rows.first().map_or(0, Vec::len);
            if d == 0 || rows.iter().any(|r| r.len() != d) {
                return Err(Error::Config("synthetic centers must be a nonempty rectangular matrix".into()));
            }
            let centers = Array2::from_shape_fn((rows.len(), d), |(i, j)| rows[i][j]);
            let class_of = self
                .class_of
                .clone()
                .ok_or_else(|| Error::Config("explicit centers need class_of".into()))?;
            return Ok((centers, class_of));
        }
        if self.clusters == 0 || self.classes == 0 {
            return Err(Error::Config("clusters and classes must be >= 1".into()));
        }
        match self.spread {
            None if self.dim == 2 => Ok(ring_layout(self.clusters, self.classes)),
            spread => {
                let spread = spread.unwrap_or(5.0);
                let mut rng = seeded_rng(mix(self.seed, name_key("centers")));
                let centers =
                    Array2::from_shape_fn((self.clusters, self.dim), |_| rng.random_range(-spread..=spread));
                let class_of = match self.labeling {
                    Labeling::RoundRobin => (0..self.clusters).map(|j| j % self.classes).collect(),
                    Labeling::NearestPrototype => self.prototype_classes(&centers, spread)?,
                };
                Ok((centers, class_of))
            }
        }
    }

    fn prototype_classes(&self, centers: &Array2<f64>, spread: f64) -> Result<Vec<usize>> {
        if self.classes > self.clusters {
            return Err(Error::Config("more classes than clusters".into()));
        }
        let mut rng = seeded_rng(mix(self.seed, name_key("prototypes")));
        for _ in 0..10_000 {
            let protos =
                Array2::from_shape_fn((self.classes, self.dim), |_| rng.random_range(-spread..=spread));
            let class_of: Vec<usize> = centers
                .outer_iter()
                .map(|c| {
                    let d2 = |k: usize| protos.row(k).iter().zip(c.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
                    (0..self.classes).min_by(|&a, &b| d2(a).total_cmp(&d2(b))).expect("classes >= 1")
                })
                .collect();
            if (0..self.classes).all(|k| class_of.contains(&k)) {
                return Ok(class_of);
            }
        }
        Err(Error::Config("no prototype draw gave every class a cluster".into()))
    }

    pub fn generate(&self) -> Result<Dataset> {
        let (centers, class_of) = self.layout()?;
        make_gaussian_clusters(self.per_cluster, &centers, self.sigma, &class_of, self.seed)
    }
}

/// A named selection method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: MethodKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodKind {
    /// Random-labeling selection with `m` pseudo annotators.
    Alrl {
        #[serde(default = "default_m")]
        m: usize,
        learner: ActiveLearnerSpec,
    },
    /// Top-N of one scoring pass of the learner trained on the initial labels.
    SingleShot { learner: ActiveLearnerSpec },
    Random,
    Kmeanspp {
        #[serde(default = "default_restarts")]
        restarts: usize,
        #[serde(default = "default_lloyd")]
        max_lloyd_iters: usize,
    },
    SimpleMnnd,
}

fn default_m() -> usize {
    10
}
fn default_restarts() -> usize {
    500
}
fn default_lloyd() -> usize {
    100
}

impl MethodSpec {
    pub fn new(name: &str, kind: MethodKind) -> Self {
        MethodSpec {
            name: name.into(),
            kind,
        }
    }

    pub fn alrl(name: &str, m: usize, learner: ActiveLearnerSpec) -> Self {
        Self::new(name, MethodKind::Alrl { m, learner })
    }

    pub fn single_shot(name: &str, learner: ActiveLearnerSpec) -> Self {
        Self::new(name, MethodKind::SingleShot { learner })
    }

    pub fn kmeanspp(name: &str, restarts: usize) -> Self {
        Self::new(
            name,
            MethodKind::Kmeanspp {
                restarts,
                max_lloyd_iters: default_lloyd(),
            },
        )
    }

    /// Output of later budgets extends that of earlier ones.
    pub fn is_sequential(&self) -> bool {
        !matches!(self.kind, MethodKind::Kmeanspp { .. })
    }

    pub fn annotators(&self) -> Option<usize> {
        match self.kind {
            MethodKind::Alrl { m, .. } => Some(m),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(format!("method {}: {m}", self.name)));
        match &self.kind {
            MethodKind::Alrl { m, learner } => {
                if *m == 0 {
                    return err("m must be >= 1".into());
                }
                learner.validate().or_else(|e| err(e.to_string()))
            }
            MethodKind::SingleShot { learner } => learner.validate().or_else(|e| err(e.to_string())),
            MethodKind::Kmeanspp { restarts, .. } if *restarts == 0 => err("restarts must be >= 1".into()),
            _ => Ok(()),
        }
    }
}
