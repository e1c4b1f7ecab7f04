// Drive the selectors with a custom subset scorer. Here the score depends
// only on the subset size, which makes it easy to see which sizes each
// strategy visits.
//
// ```bash
// cargo run --example custom_scorer
// ```

use subsectfs::crossval::{CvOutcome, SubsetScorer};
use subsectfs::search::{run_strategy, Strategy};
use subsectfs::FeatureRanking;

/// Features ranked by index, scores peaking at `peak` selected features.
struct Peaked {
    n_features: usize,
    peak: usize,
}

impl SubsetScorer for Peaked {
    fn evaluate(&self, subset: &[usize]) -> subsectfs::Result<CvOutcome> {
        let score = 1.0 - (subset.len() as f64 - self.peak as f64).abs() / self.n_features as f64;
        Ok(CvOutcome { per_fold_scores: vec![score], fold_rankings: vec![FeatureRanking::new(subset.to_vec())?] })
    }

    fn n_features(&self) -> usize {
        self.n_features
    }
}

pub fn run_example() -> subsectfs::Result<()> {
    let scorer = Peaked { n_features: 120, peak: 17 };
    for strategy in [Strategy::Frfe, Strategy::Ksrfe { k: 3 }, Strategy::Ksrfe { k: 10 }, Strategy::RfeFixed { n_steps: 120 }] {
        let out = run_strategy(&scorer, strategy)?;
        let order = out.trace.evaluation_order();
        let shown: Vec<String> = order.iter().take(12).map(usize::to_string).collect();
        println!(
            "{:<8} best {:>3}  {:>3} evaluations: {}{}",
            strategy.id(),
            out.best_size,
            order.len(),
            shown.join(", "),
            if order.len() > 12 { ", ..." } else { "" }
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("custom scorer example");
}
