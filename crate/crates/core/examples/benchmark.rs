// A small reproducible experiment: repeated outer holdout, step-matched
// baselines, summary table and significance report.
//
// ```bash
// cargo run --release --example benchmark
// ```

use std::fs;

use subsectfs::harness::{run_experiment, DatasetSource, ExperimentConfig, StrategySpec};
use subsectfs::synthetic::SyntheticSpec;

pub fn run_example() -> subsectfs::Result<()> {
    let dir = tempfile::tempdir()?;
    let datasets = vec![DatasetSource::Synthetic {
        synthetic: SyntheticSpec { n_examples: 100, informative: 3, noise: 17, separation: 2.0, seed: 1 },
        name: Some("toy".into()),
    }];
    let mut config = ExperimentConfig::new(datasets, vec![StrategySpec::Frfe, StrategySpec::Ksrfe { k: 3 }]);
    config.repetitions = 5;
    config.seed = 2024;
    config.out = dir.path().to_path_buf();
    config.traces = false;

    let outcome = run_experiment(&config)?;
    println!("{} runs", outcome.records.len());
    print!("{}", fs::read_to_string(dir.path().join("summary.csv"))?);
    let accuracy = outcome.report.split("== kappa ==").next().unwrap_or_default();
    print!("{accuracy}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("benchmark example");
}
