// Fibonacci feature elimination on a synthetic problem with a handful of
// informative columns hidden among noise.
//
// ```bash
// cargo run --release --example frfe_synthetic
// ```

use subsectfs::rankers::RankerConfig;
use subsectfs::search::{frfe, SearchConfig, Strategy};
use subsectfs::synthetic::SyntheticSpec;

pub fn run_example() -> subsectfs::Result<()> {
    let data = SyntheticSpec { n_examples: 160, informative: 4, noise: 36, separation: 2.0, seed: 11 }.generate()?;
    let config = SearchConfig::new(Strategy::Frfe, RankerConfig::logistic(1)).with_seed(5);
    let result = frfe(&data, &config)?;

    let names = data.feature_names().expect("synthetic columns are named");
    let chosen: Vec<&str> = result.selected.iter().map(|&i| names[i].as_str()).collect();
    println!("selected {} of {} features: {chosen:?}", result.best_size, data.n_features());
    println!("{} subsets evaluated in {:.2} s", result.eval_count(), result.wall_time);

    println!("size  mean accuracy");
    for (size, entry) in result.trace.iter().rev() {
        println!("{size:>4}  {:.4}", entry.mean_score());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("frfe example");
}
