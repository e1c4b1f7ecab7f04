//! Feature elimination strategies.
//!
//! [`frfe`] and [`ksrfe`] search the subset size with a line search,
//! [`rfe_fixed_steps`] eliminates over a fixed, uniformly spaced schedule.
//! All three share the same inner loop: the subset for a size is the top of
//! the aggregated ranking computed at a larger, already evaluated size, and
//! every evaluation is cross-validated once and cached in a [`SearchTrace`].
//!
//! The `run_*` functions work on any [`SubsetScorer`], which is how the
//! strategies are exercised against synthetic score oracles; the
//! dataset-level entry points wire in real cross-validation and finish with
//! [`final_selection`].

mod line;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use line::{
    fibonacci_search, fibonacci_search_traced, fibonacci_upto, ksubsect_search, ksubsect_search_traced, FnProbe,
    LineSearchOutcome, SizeProbe,
};

use crate::crossval::{aggregate_ranking, CrossValidator, SubsetScorer};
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::preprocess::{apply_minmax, fit_minmax};
use crate::rankers::{train, RankerConfig};
use crate::types::{select_top, Dataset, SearchTrace, SelectionResult};
use line::Memo;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Frfe,
    Ksrfe { k: usize },
    RfeFixed { n_steps: usize },
}

impl Strategy {
    /// Short identifier: `frfe`, `3-srfe`, `rfe@12`.
    pub fn id(&self) -> String {
        match self {
            Strategy::Frfe => "frfe".into(),
            Strategy::Ksrfe { k } => format!("{k}-srfe"),
            Strategy::RfeFixed { n_steps } => format!("rfe@{n_steps}"),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// Accepts `frfe`, `<k>-srfe` and `rfe@<n_steps>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown strategy `{s}`"));
        if s == "frfe" {
            return Ok(Strategy::Frfe);
        }
        if let Some(k) = s.strip_suffix("-srfe") {
            return Ok(Strategy::Ksrfe { k: k.parse().map_err(|_| bad())? });
        }
        if let Some(n) = s.strip_prefix("rfe@") {
            return Ok(Strategy::RfeFixed { n_steps: n.parse().map_err(|_| bad())? });
        }
        Err(bad())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub cv_k: usize,
    /// Seed of the fold split.
    pub seed: u64,
    pub ranker: RankerConfig,
    pub metric: Metric,
}

impl SearchConfig {
    pub fn new(strategy: Strategy, ranker: RankerConfig) -> Self {
        SearchConfig { strategy, cv_k: 5, seed: 0, ranker, metric: Metric::Accuracy }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        match self.strategy {
            Strategy::Ksrfe { k } if k < 2 => Err(Error::domain("k-SRFE needs k >= 2")),
            Strategy::RfeFixed { n_steps } if n_steps < 2 => Err(Error::domain("RFE needs at least 2 steps")),
            _ if self.cv_k < 2 => Err(Error::domain("cross-validation needs at least 2 folds")),
            _ => Ok(()),
        }
    }
}

/// Trace of a search before the final selection pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub trace: SearchTrace,
    /// Size the strategy itself settled on.
    pub search_best: usize,
    /// Highest-scoring traced size, ties to the smaller.
    pub best_size: usize,
}

/// Probe that cross-validates the top of an anchor's ranking and records it.
struct TraceProbe<'a, S> {
    scorer: &'a S,
    trace: &'a mut SearchTrace,
}

impl<S: SubsetScorer> SizeProbe for TraceProbe<'_, S> {
    fn probe(&mut self, size: usize, anchor: usize) -> Result<f64> {
        let ranking = &self
            .trace
            .get(anchor)
            .ok_or_else(|| Error::domain(format!("anchor size {anchor} has no ranking")))?
            .aggregated_ranking;
        let subset = select_top(ranking, size)?;
        evaluate_into(self.scorer, self.trace, size, &subset)
    }
}

fn evaluate_into<S: SubsetScorer>(scorer: &S, trace: &mut SearchTrace, size: usize, subset: &[usize]) -> Result<f64> {
    let outcome = scorer.evaluate(subset)?;
    let aggregated = aggregate_ranking(&outcome.fold_rankings)?;
    log::debug!("size {size}: mean score {:.4}", outcome.mean_score());
    let entry = trace.insert(size, outcome.per_fold_scores, outcome.fold_rankings, aggregated)?;
    Ok(entry.mean_score())
}

fn initial_trace<S: SubsetScorer>(scorer: &S) -> Result<(SearchTrace, usize, f64)> {
    let m = scorer.n_features();
    if m < 2 {
        return Err(Error::domain("feature elimination needs at least 2 features"));
    }
    let mut trace = SearchTrace::new();
    let all: Vec<usize> = (0..m).collect();
    let score = evaluate_into(scorer, &mut trace, m, &all)?;
    Ok((trace, m, score))
}

fn finish(trace: SearchTrace, search_best: usize) -> SearchOutcome {
    let best_size = trace.best_size().expect("trace holds the full-size evaluation");
    SearchOutcome { trace, search_best, best_size }
}

/// Fibonacci search over subset sizes `[1, m]`.
pub fn run_frfe<S: SubsetScorer>(scorer: &S) -> Result<SearchOutcome> {
    let (mut trace, m, full) = initial_trace(scorer)?;
    let mut probe = TraceProbe { scorer, trace: &mut trace };
    let mut memo = Memo::new(&mut probe, BTreeMap::from([(m, full)]));
    let outcome = line::fibonacci_core(&mut memo, 1, m)?;
    Ok(finish(trace, outcome.best))
}

/// k-subsecting search over subset sizes `[1, m]`.
pub fn run_ksrfe<S: SubsetScorer>(scorer: &S, k: usize) -> Result<SearchOutcome> {
    if k < 2 {
        return Err(Error::domain("k-SRFE needs k >= 2"));
    }
    let (mut trace, m, full) = initial_trace(scorer)?;
    let mut probe = TraceProbe { scorer, trace: &mut trace };
    let mut memo = Memo::new(&mut probe, BTreeMap::from([(m, full)]));
    let outcome = line::ksubsect_core(&mut memo, 1, m, k)?;
    Ok(finish(trace, outcome.best))
}

/// Subset sizes for RFE with `n_steps` evaluations spread uniformly from `m`
/// down to 1. When `m - 1` is not a multiple of `n_steps - 1` the step is
/// `⌊m / n_steps⌋` and a final evaluation at 1 feature is appended.
pub fn rfe_schedule(m: usize, n_steps: usize) -> Result<Vec<usize>> {
    if n_steps < 2 {
        return Err(Error::domain("RFE needs at least 2 steps"));
    }
    if m < 2 {
        return Err(Error::domain("feature elimination needs at least 2 features"));
    }
    let mut sizes: Vec<usize> = if (m - 1).is_multiple_of(n_steps - 1) {
        let step = (m - 1) / (n_steps - 1);
        (0..n_steps).map(|i| m - i * step).collect()
    } else {
        let step = (m / n_steps).max(1);
        (0..n_steps).map(|i| i * step).take_while(|&d| d < m).map(|d| m - d).collect()
    };
    if sizes.last() != Some(&1) {
        sizes.push(1);
    }
    sizes.dedup();
    Ok(sizes)
}

/// RFE over [`rfe_schedule`]; each size truncates the ranking of the previous one.
pub fn run_rfe_fixed<S: SubsetScorer>(scorer: &S, n_steps: usize) -> Result<SearchOutcome> {
    let schedule = rfe_schedule(scorer.n_features(), n_steps)?;
    let (mut trace, _, _) = initial_trace(scorer)?;
    let mut probe = TraceProbe { scorer, trace: &mut trace };
    for pair in schedule.windows(2) {
        probe.probe(pair[1], pair[0])?;
    }
    let best = trace.best_size().expect("non-empty trace");
    Ok(finish(trace, best))
}

/// Run `strategy` against an arbitrary scorer.
pub fn run_strategy<S: SubsetScorer>(scorer: &S, strategy: Strategy) -> Result<SearchOutcome> {
    match strategy {
        Strategy::Frfe => run_frfe(scorer),
        Strategy::Ksrfe { k } => run_ksrfe(scorer, k),
        Strategy::RfeFixed { n_steps } => run_rfe_fixed(scorer, n_steps),
    }
}

/// Traced sizes from the largest down to `best`.
pub fn elimination_path(trace: &SearchTrace, best: usize) -> Result<Vec<usize>> {
    if !trace.contains(best) {
        return Err(Error::domain(format!("best size {best} was never evaluated")));
    }
    Ok(trace.sizes().rev().filter(|&s| s >= best).collect())
}

/// Re-run the elimination without cross-validation: train on every row at
/// each size on the path from `m` to `best`, truncating the fresh ranking
/// to the next size. Returns the `best`-sized subset, ascending.
pub fn final_selection(dataset: &Dataset, trace: &SearchTrace, best: usize, ranker: &RankerConfig) -> Result<Vec<usize>> {
    let path = elimination_path(trace, best)?;
    if path[0] != dataset.n_features() {
        return Err(Error::domain("trace does not start at the full feature set"));
    }
    let rows: Vec<usize> = (0..dataset.n_examples()).collect();
    let mut current: Vec<usize> = (0..dataset.n_features()).collect();
    for &next in &path[1..] {
        let x = dataset.submatrix(&rows, &current);
        let scaler = fit_minmax(x.view())?;
        let x = apply_minmax(&scaler, x.view())?;
        let model = train(ranker, x.view(), dataset.labels(), dataset.n_classes(), &current)?;
        current = select_top(&model.rank_features(), next)?;
    }
    Ok(current)
}

/// Run the configured strategy on `dataset` with stratified cross-validation
/// and finish with [`final_selection`].
///
/// Rows are put in a content-defined order first, so the result does not
/// depend on the order of examples in the input.
pub fn select(dataset: &Dataset, config: &SearchConfig) -> Result<SelectionResult> {
    config.validate()?;
    let started = Instant::now();
    let canonical = dataset.canonicalized();
    let cv = CrossValidator::new(&canonical, config.cv_k, config.seed, config.ranker.clone(), config.metric)?;
    let outcome = run_strategy(&cv, config.strategy)?;
    let selected = final_selection(&canonical, &outcome.trace, outcome.best_size, &config.ranker)?;
    Ok(SelectionResult {
        selected,
        best_size: outcome.best_size,
        search_best: outcome.search_best,
        trace: outcome.trace,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

fn with_strategy(config: &SearchConfig, expected: fn(&Strategy) -> bool, name: &str) -> Result<()> {
    if expected(&config.strategy) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} called with strategy {}", config.strategy)))
    }
}

/// Fibonacci recursive feature elimination.
pub fn frfe(dataset: &Dataset, config: &SearchConfig) -> Result<SelectionResult> {
    with_strategy(config, |s| matches!(s, Strategy::Frfe), "frfe")?;
    select(dataset, config)
}

/// k-subsecting recursive feature elimination.
pub fn ksrfe(dataset: &Dataset, config: &SearchConfig) -> Result<SelectionResult> {
    with_strategy(config, |s| matches!(s, Strategy::Ksrfe { .. }), "ksrfe")?;
    select(dataset, config)
}

/// RFE over a uniformly spaced schedule of subset sizes.
pub fn rfe_fixed_steps(dataset: &Dataset, config: &SearchConfig) -> Result<SelectionResult> {
    with_strategy(config, |s| matches!(s, Strategy::RfeFixed { .. }), "rfe_fixed_steps")?;
    select(dataset, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossval::CvOutcome;
    use crate::synthetic::SyntheticSpec;
    use crate::types::FeatureRanking;
    use std::cell::RefCell;

    /// Scores a subset by its size alone and ranks features in a fixed order.
    struct StubScorer<F> {
        m: usize,
        order: Vec<usize>,
        score: F,
        calls: RefCell<Vec<Vec<usize>>>,
    }

    impl<F: Fn(usize) -> f64> StubScorer<F> {
        fn new(m: usize, score: F) -> Self {
            StubScorer { m, order: (0..m).rev().collect(), score, calls: RefCell::new(Vec::new()) }
        }
    }

    impl<F: Fn(usize) -> f64> SubsetScorer for StubScorer<F> {
        fn evaluate(&self, subset: &[usize]) -> Result<CvOutcome> {
            self.calls.borrow_mut().push(subset.to_vec());
            let ranking: Vec<usize> = self.order.iter().copied().filter(|f| subset.contains(f)).collect();
            let ranking = FeatureRanking::new(ranking)?;
            let s = (self.score)(subset.len());
            Ok(CvOutcome { per_fold_scores: vec![s; 3], fold_rankings: vec![ranking; 3] })
        }

        fn n_features(&self) -> usize {
            self.m
        }
    }

    fn peaked(peak: usize) -> impl Fn(usize) -> f64 {
        move |x| -((x as f64) - peak as f64).abs()
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(&rfe_schedule(240, 12).unwrap()[..4], &[240, 220, 200, 180]);
        assert_eq!(rfe_schedule(240, 12).unwrap().len(), 13);
        assert_eq!(rfe_schedule(10, 10).unwrap(), (1..=10).rev().collect::<Vec<_>>());
        assert_eq!(rfe_schedule(10, 4).unwrap(), vec![10, 7, 4, 1]);
        assert_eq!(rfe_schedule(3, 10).unwrap(), vec![3, 2, 1]);
        assert!(rfe_schedule(10, 1).is_err());
    }

    #[test]
    fn ksrfe_first_sweep_for_nine_features() {
        let stub = StubScorer::new(9, peaked(2));
        let out = run_ksrfe(&stub, 3).unwrap();
        assert_eq!(&out.trace.evaluation_order()[..4], &[9, 6, 3, 1]);
        assert_eq!(out.best_size, 2);
    }

    #[test]
    fn ksrfe_chains_rankings_within_a_sweep() {
        let stub = StubScorer::new(9, peaked(2));
        run_ksrfe(&stub, 3).unwrap();
        let calls = stub.calls.borrow();
        // Stub ranks high indices first, so truncation keeps the top indices.
        assert_eq!(calls[1], vec![3, 4, 5, 6, 7, 8]);
        assert_eq!(calls[2], vec![6, 7, 8]);
        assert_eq!(calls[3], vec![8]);
    }

    #[test]
    fn two_features_probe_both_sizes() {
        for strategy in [Strategy::Frfe, Strategy::Ksrfe { k: 10 }] {
            let stub = StubScorer::new(2, |x| if x == 1 { 0.9 } else { 0.5 });
            let out = run_strategy(&stub, strategy).unwrap();
            assert_eq!(out.trace.sizes().collect::<Vec<_>>(), vec![1, 2]);
            assert_eq!(out.best_size, 1);
        }
    }

    #[test]
    fn frfe_eval_count_for_twenty_features() {
        let bound = 1 + (fibonacci_upto(19).unwrap().len() - 1);
        for peak in 1..=20 {
            let out = run_frfe(&StubScorer::new(20, peaked(peak))).unwrap();
            assert_eq!(out.best_size, peak);
            assert!(out.trace.eval_count() <= bound, "peak {peak}: {}", out.trace.eval_count());
            assert!(out.trace.eval_count() < 20);
        }
    }

    #[test]
    fn path_structure() {
        let mut trace = SearchTrace::new();
        for s in [20, 12, 7, 5, 3] {
            trace.insert(s, vec![0.5], vec![], FeatureRanking::identity(1)).unwrap();
        }
        assert_eq!(elimination_path(&trace, 5).unwrap(), vec![20, 12, 7, 5]);
        assert_eq!(elimination_path(&trace, 20).unwrap(), vec![20]);
        assert!(elimination_path(&trace, 4).is_err());
    }

    #[test]
    fn strategy_ids_round_trip() {
        for s in [Strategy::Frfe, Strategy::Ksrfe { k: 5 }, Strategy::RfeFixed { n_steps: 12 }] {
            assert_eq!(s.id().parse::<Strategy>().unwrap(), s);
        }
        assert!("srfe".parse::<Strategy>().is_err());
    }

    fn small_data() -> Dataset {
        SyntheticSpec { n_examples: 80, informative: 3, noise: 9, separation: 2.5, seed: 3 }
            .generate()
            .unwrap()
    }

    #[test]
    fn final_selection_best_m_keeps_everything() {
        let d = small_data();
        let mut trace = SearchTrace::new();
        trace.insert(12, vec![1.0], vec![], FeatureRanking::identity(12)).unwrap();
        let s = final_selection(&d, &trace, 12, &RankerConfig::logistic(0)).unwrap();
        assert_eq!(s, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn selection_is_deterministic_and_consistent() {
        let d = small_data();
        for strategy in [Strategy::Frfe, Strategy::Ksrfe { k: 3 }, Strategy::RfeFixed { n_steps: 4 }] {
            let config = SearchConfig::new(strategy, RankerConfig::logistic(1)).with_seed(7);
            let a = select(&d, &config).unwrap();
            let b = select(&d, &config).unwrap();
            assert_eq!(a.selected, b.selected);
            assert_eq!(a.trace, b.trace);
            assert_eq!(a.selected.len(), a.best_size);
            assert_eq!(Some(a.best_size), a.trace.best_size());
        }
    }

    #[test]
    fn wrong_strategy_entry_point_rejected() {
        let config = SearchConfig::new(Strategy::Frfe, RankerConfig::logistic(0));
        assert!(ksrfe(&small_data(), &config).is_err());
        let config = SearchConfig::new(Strategy::Ksrfe { k: 1 }, RankerConfig::logistic(0));
        assert!(ksrfe(&small_data(), &config).is_err());
    }
}
