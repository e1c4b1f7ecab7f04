// Evaluation measures computed from a confusion matrix.
//
// ```bash
// cargo run --example metrics
// ```

use subsectfs::metrics::{confusion, ConfusionMatrix, Metric, MetricValues};

pub fn run_example() -> subsectfs::Result<()> {
    // Rows are true classes, columns predictions.
    let cm = ConfusionMatrix::from_counts(vec![vec![50, 10], vec![5, 35]])?;
    for metric in Metric::ALL {
        println!("{:<13} {:.4}", metric.name(), metric.evaluate(&cm)?);
    }

    let truth = [0, 0, 1, 1, 2, 2, 2];
    let predicted = [0, 1, 1, 1, 2, 0, 2];
    let values = MetricValues::from_confusion(&confusion(&truth, &predicted, 3)?)?;
    println!("three classes: {values:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("metrics example");
}
