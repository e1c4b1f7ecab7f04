// Stratified folds and cross-validated scoring of feature subsets.
//
// ```bash
// cargo run --release --example cross_validation
// ```

use subsectfs::crossval::{aggregate_ranking, stratified_folds, CrossValidator, SubsetScorer};
use subsectfs::metrics::Metric;
use subsectfs::rankers::RankerConfig;
use subsectfs::synthetic::SyntheticSpec;

pub fn run_example() -> subsectfs::Result<()> {
    let data = SyntheticSpec { n_examples: 90, informative: 2, noise: 6, separation: 2.5, seed: 8 }.generate()?;

    let folds = stratified_folds(data.labels(), 5, 3)?;
    for f in 0..folds.k() {
        println!("fold {f}: {} validation examples", folds.validation_indices(f).len());
    }

    let cv = CrossValidator::new(&data, 5, 3, RankerConfig::logistic(0), Metric::Kappa)?;
    for subset in [vec![0, 1], vec![0, 1, 2, 3, 4, 5, 6, 7], vec![5, 6, 7]] {
        let out = cv.evaluate(&subset)?;
        let ranking = aggregate_ranking(&out.fold_rankings)?;
        println!("{subset:?}: kappa {:.3}, ranking {:?}", out.mean_score(), ranking.order());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("cross-validation example");
}
