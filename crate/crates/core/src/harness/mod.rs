//! Dataset ingestion, experiment orchestration and result files.
//!
//! An experiment is described by an [`ExperimentConfig`], usually read from
//! TOML:
//!
//! ```toml
//! strategies = ["frfe", "3-srfe"]
//! repetitions = 10
//! seed = 42
//! out = "results"
//!
//! [[datasets]]
//! path = "data/sonar.csv"
//! label = -1
//!
//! [[rankers]]
//! kind = "forest"
//! ```
//!
//! All numbers in CSV and text outputs use 6 significant digits. Everything
//! except the timing files is a deterministic function of the configuration
//! and does not depend on the size of the worker pool.

mod config;
mod experiment;
mod ingest;
mod output;
mod report;

pub use config::{DatasetSource, ExperimentConfig, StrategySpec};
pub use experiment::{compare, holdout_metrics, outer_split, run_experiment, ExperimentOutcome, RunFailure};
pub use ingest::{load_csv, LabelColumn};
pub use output::{emit_curve, fmt_num, read_records, write_trace, RunRecord};
pub use report::{algorithm_labels, significance_report, summary_rows, Measure};

use crate::error::{Error, Result};

/// Environment variable capping the number of worker threads; 0 or unset
/// means one per core.
pub const THREADS_ENV: &str = "SUBSECTFS_THREADS";

/// Worker count requested through [`THREADS_ENV`], `None` for automatic.
pub fn requested_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(Error::Config(format!("{THREADS_ENV}={v} is not a thread count"))),
        },
    }
}

/// Run `f` on a worker pool sized by [`THREADS_ENV`].
pub fn with_thread_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = requested_threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
