//! Cold-start active learning by random labeling.
//!
//! At each step a handful of pseudo annotators relabel the already selected
//! points at random, an ordinary active learner (entropy sampling or
//! MVAL-lite) proposes one sample per annotator, and the proposal that best
//! covers the remaining pool in nearest-neighbor distance is selected.
//!
//! ```
//! use alrl::prelude::*;
//!
//! let ds = SynthSpec::default().generate().unwrap();
//! let trial = prepare_trial(&ds, 1, 0.5, false).unwrap();
//! let cfg = AlrlConfig::new(4, 5, ActiveLearnerSpec::new(LearnerKind::MaxE), 9);
//! let picked = alrl_select(&trial.pool, &trial.train, &cfg).unwrap().selected;
//! assert_eq!(picked.len(), 4);
//! ```

pub mod alrl;
pub mod baselines;
pub mod bench;
pub mod data;
pub mod error;
pub mod learners;
pub mod model;
pub mod rng;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::alrl::{alrl_select, dis, single_shot_topk, AlrlConfig, SelectionResult};
    pub use crate::baselines::{kmeanspp_select, random_select, simple_mnnd_select, KmppConfig};
    pub use crate::bench::{
        aggregate, prepare_trial, run_experiment, sensitivity_sweep, DatasetSpec, ExperimentConfig, MethodKind,
        MethodSpec, ResultRow, SynthSpec, Trial,
    };
    pub use crate::data::{load_dataset, DataFormat, Dataset, PoolState};
    pub use crate::learners::{ActiveLearnerSpec, LearnerKind};
    pub use crate::model::{fit, FitOptions, LinearModel, PosteriorMatrix};
    pub use crate::{Error, Result};
}
