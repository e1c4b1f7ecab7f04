// k-SRFE against RFE with the same number of elimination steps, and
// against classic one-feature-at-a-time RFE.
//
// ```bash
// cargo run --release --example ksrfe_vs_rfe
// ```

use subsectfs::rankers::RankerConfig;
use subsectfs::search::{select, SearchConfig, Strategy};
use subsectfs::synthetic::SyntheticSpec;
use subsectfs::SelectionResult;

fn report(name: &str, r: &SelectionResult) {
    println!(
        "{name:<10} size {:>3}  cv accuracy {:.4}  evaluations {:>3}  {:.2} s",
        r.best_size,
        r.trace.mean_score(r.best_size).unwrap_or(f64::NAN),
        r.eval_count(),
        r.wall_time
    );
}

pub fn run_example() -> subsectfs::Result<()> {
    let data = SyntheticSpec { n_examples: 150, informative: 5, noise: 55, separation: 1.8, seed: 2 }.generate()?;
    let ranker = RankerConfig::logistic(0);
    let run = |strategy| select(&data, &SearchConfig::new(strategy, ranker.clone()).with_seed(1));

    let ksrfe = run(Strategy::Ksrfe { k: 3 })?;
    report("3-srfe", &ksrfe);
    let matched = run(Strategy::RfeFixed { n_steps: ksrfe.eval_count() })?;
    report("rfe-3", &matched);
    let exhaustive = run(Strategy::RfeFixed { n_steps: data.n_features() })?;
    report("rfe", &exhaustive);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("comparison example");
}
