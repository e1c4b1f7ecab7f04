// Locate the maximum of a unimodal function over integers with the two
// line searches used by the selectors.
//
// ```bash
// cargo run --example line_search
// ```

use subsectfs::search::{fibonacci_search_traced, ksubsect_search_traced};

pub fn run_example() -> subsectfs::Result<()> {
    let f = |x: usize| -0.2 * (x * x) as f64 + 2.0 * x as f64;

    let fib = fibonacci_search_traced(f, 1, 10)?;
    println!("fibonacci: best x = {} after probing {:?}", fib.best, fib.probes);
    for (lo, hi) in &fib.intervals {
        println!("  bracket [{lo}, {hi}]");
    }

    let sub = ksubsect_search_traced(f, 1, 10, 3)?;
    println!("3-subsecting: best x = {} after probing {:?}", sub.best, sub.probes);

    // Larger ranges need only logarithmically many probes.
    let peak = 7_341;
    let g = |x: usize| -((x as f64) - peak as f64).abs();
    let out = fibonacci_search_traced(g, 1, 10_000)?;
    println!("fibonacci over [1, 10000]: best x = {} with {} probes", out.best, out.probes.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("line search example");
}
