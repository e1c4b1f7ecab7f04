// Train the random forest ranker directly and inspect its Gini importances.
//
// ```bash
// cargo run --release --example forest_ranking
// ```

use subsectfs::preprocess::{apply_minmax, fit_minmax};
use subsectfs::rankers::{train, RankerConfig};
use subsectfs::synthetic::SyntheticSpec;

pub fn run_example() -> subsectfs::Result<()> {
    let data = SyntheticSpec { n_examples: 200, informative: 3, noise: 7, separation: 2.0, seed: 4 }.generate()?;
    let scaler = fit_minmax(data.features().view())?;
    let x = apply_minmax(&scaler, data.features().view())?;
    let columns: Vec<usize> = (0..data.n_features()).collect();

    let mut config = RankerConfig::forest(7);
    config.forest.n_trees = 100;
    let model = train(&config, x.view(), data.labels(), data.n_classes(), &columns)?;

    let names = data.feature_names().expect("named columns");
    let importances = model.importances();
    println!("rank  feature   importance");
    for (rank, &f) in model.rank_features().order().iter().enumerate() {
        println!("{:>4}  {:<8}  {:.3}", rank + 1, names[f], importances[f]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("forest example");
}
