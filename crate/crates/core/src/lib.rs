//! Wrapper feature selection by recursive feature elimination (RFE).
//!
//! Besides classic RFE with a fixed number of uniformly spaced steps, the
//! crate provides two selectors that treat the mean cross-validated score as a
//! function of the subset size and locate its maximum with a discrete line
//! search:
//!
//! * [`search::frfe`] places probes with a Fibonacci search,
//! * [`search::ksrfe`] sweeps `k` equally spaced sizes and recursively
//!   narrows the interval around the best one.
//!
//! When the wrapped classifier's ranking is stable and the score curve is
//! unimodal, both return the same subset size as step-1 RFE while evaluating
//! only a logarithmic number of subsets.
//!
//! The supporting pieces (stratified cross-validation, min-max scaling, a
//! logistic and a random forest ranker, evaluation metrics, and the Friedman,
//! Nemenyi and Wilcoxon tests used to compare selectors) live in their own
//! modules. [`harness`] ties them together into reproducible experiments.

pub mod crossval;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod preprocess;
pub mod rankers;
pub mod search;
pub mod seed;
pub mod stats;
pub mod synthetic;
pub mod types;

pub use error::{Error, Result};
pub use types::{select_top, Dataset, FeatureRanking, FoldAssignment, SearchTrace, SelectionResult};
