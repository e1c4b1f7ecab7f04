// Load a CSV file, select features and save the trace and score curve.
//
// ```bash
// cargo run --release --example csv_selection
// ```

use std::fmt::Write;
use std::fs;

use subsectfs::harness::{emit_curve, load_csv, write_trace, LabelColumn};
use subsectfs::rankers::RankerConfig;
use subsectfs::search::{ksrfe, SearchConfig, Strategy};
use subsectfs::synthetic::SyntheticSpec;

pub fn run_example() -> subsectfs::Result<()> {
    let dir = tempfile::tempdir()?;
    let csv = dir.path().join("tumours.csv");

    // Write a small file with a string label in the last column.
    let source = SyntheticSpec { n_examples: 80, informative: 3, noise: 9, separation: 2.5, seed: 6 }.generate()?;
    let mut text = String::new();
    let header: Vec<String> = (0..source.n_features()).map(|j| format!("gene{j}")).collect();
    writeln!(text, "{},diagnosis", header.join(",")).unwrap();
    for (row, &label) in source.features().rows().into_iter().zip(source.labels()) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
        writeln!(text, "{},{}", cells.join(","), if label == 1 { "malignant" } else { "benign" }).unwrap();
    }
    fs::write(&csv, text)?;

    let data = load_csv(&csv, &LabelColumn::Name("diagnosis".into()))?;
    println!("{}: {} examples, {} features, classes {:?}", data.name, data.n_examples(), data.n_features(), data.class_names());

    let result = ksrfe(&data, &SearchConfig::new(Strategy::Ksrfe { k: 5 }, RankerConfig::logistic(0)))?;
    let names = data.feature_names().expect("header names");
    let chosen: Vec<&str> = result.selected.iter().map(|&i| names[i].as_str()).collect();
    println!("selected {chosen:?}");

    write_trace(&result.trace, dir.path().join("trace.jsonl"))?;
    emit_curve(&result.trace, dir.path().join("curve.csv"))?;
    print!("{}", fs::read_to_string(dir.path().join("curve.csv"))?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("csv example");
}
