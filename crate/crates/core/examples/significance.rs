// Compare several algorithms over several datasets with the Friedman test,
// Nemenyi critical distances and pairwise Wilcoxon tests.
//
// ```bash
// cargo run --example significance
// ```

use subsectfs::stats::{connected_pairs, friedman_test, nemenyi_cd, wilcoxon_signed_rank};

pub fn run_example() -> subsectfs::Result<()> {
    let names = ["frfe", "3-srfe", "rfe-f", "rfe"];
    // accuracy[algorithm][dataset]
    let accuracy = vec![
        vec![0.81, 0.92, 0.77, 0.65, 0.88, 0.71, 0.94, 0.83],
        vec![0.83, 0.91, 0.78, 0.66, 0.90, 0.72, 0.95, 0.82],
        vec![0.79, 0.90, 0.74, 0.61, 0.86, 0.70, 0.93, 0.80],
        vec![0.80, 0.92, 0.75, 0.63, 0.87, 0.69, 0.93, 0.81],
    ];

    let f = friedman_test(&accuracy)?;
    for (name, rank) in names.iter().zip(&f.avg_ranks) {
        println!("{name:<7} mean rank {rank:.3}");
    }
    println!("Iman-Davenport F = {:.3}, p = {:.4}", f.f_statistic, f.p_value);

    let cd = nemenyi_cd(names.len(), accuracy[0].len(), 0.05)?;
    println!("Nemenyi CD = {cd:.3}");
    for (i, j) in connected_pairs(&f.avg_ranks, cd) {
        println!("  {} and {} are not significantly different", names[i], names[j]);
    }

    let p = wilcoxon_signed_rank(&accuracy[1], &accuracy[2])?;
    println!("Wilcoxon 3-srfe vs rfe-f: p = {p:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("significance example");
}
