//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the verdicts are always printed; exits non-zero if any fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ndarray::{array, Array1};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use subsectfs::crossval::{CvOutcome, SubsetScorer};
use subsectfs::harness::{run_experiment, DatasetSource, ExperimentConfig, StrategySpec};
use subsectfs::metrics::{accuracy, g_mean, kappa, macro_recall, ConfusionMatrix};
use subsectfs::rankers::logistic::loss_and_gradient;
use subsectfs::rankers::RankerConfig;
use subsectfs::search::{
    fibonacci_search, fibonacci_upto, ksubsect_search, rfe_schedule, run_frfe, run_ksrfe, run_rfe_fixed, select,
    SearchConfig, Strategy,
};
use subsectfs::stats::{ascending_ranks, descending_ranks, friedman_test, wilcoxon_signed_rank};
use subsectfs::synthetic::SyntheticSpec;
use subsectfs::{seed, FeatureRanking};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn rng(key: &str) -> ChaCha8Rng {
    seed::rng(seed::key_of(key))
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: f64, detail: String) -> Verdict {
    let s = elapsed.as_secs_f64();
    check(s < limit_s, format!("{detail}; {s:.2} s (limit {limit_s} s)"))
}

/// Ranks features in a fixed global order and scores a subset by its size.
struct Stub {
    position: Vec<usize>,
    order: Vec<usize>,
    scores: Vec<f64>,
}

impl Stub {
    fn new(order: Vec<usize>, scores: Vec<f64>) -> Self {
        let mut position = vec![0; order.len()];
        for (p, &f) in order.iter().enumerate() {
            position[f] = p;
        }
        Stub { position, order, scores }
    }
}

impl SubsetScorer for Stub {
    fn evaluate(&self, subset: &[usize]) -> subsectfs::Result<CvOutcome> {
        let mut ranked = subset.to_vec();
        ranked.sort_by_key(|&f| self.position[f]);
        let ranking = FeatureRanking::new(ranked)?;
        let s = self.scores[subset.len()];
        Ok(CvOutcome { per_fold_scores: vec![s; 3], fold_rankings: vec![ranking; 3] })
    }

    fn n_features(&self) -> usize {
        self.order.len()
    }
}

/// Strictly unimodal values on `1..=m` (index 0 unused) peaking at `peak`.
fn unimodal(rng: &mut ChaCha8Rng, m: usize, peak: usize) -> Vec<f64> {
    let mut v = vec![f64::NAN; m + 1];
    v[peak] = 1.0;
    for x in (1..peak).rev() {
        v[x] = v[x + 1] - rng.random_range(1e-3..0.1);
    }
    for x in peak + 1..=m {
        v[x] = v[x - 1] - rng.random_range(1e-3..0.1);
    }
    v
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut rng = rng("oracle-equivalence");
    for instance in 0..500 {
        let m = rng.random_range(2..=256);
        let peak = rng.random_range(1..=m);
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut rng);
        let stub = Stub::new(order.clone(), unimodal(&mut rng, m, peak));

        let rfe = run_rfe_fixed(&stub, m).map_err(|e| e.to_string())?;
        let mut outcomes = vec![("frfe".to_string(), run_frfe(&stub).map_err(|e| e.to_string())?)];
        for k in [2, 3, 5, 10] {
            outcomes.push((format!("{k}-srfe"), run_ksrfe(&stub, k).map_err(|e| e.to_string())?));
        }
        let expected = &order[..rfe.best_size];
        for (name, out) in &outcomes {
            let subset = out.trace.get(out.best_size).expect("best is traced").aggregated_ranking.order();
            if out.best_size != rfe.best_size || subset != expected {
                return Err(format!(
                    "instance {instance} (m = {m}, peak {peak}): {name} chose {}, step-1 RFE {}",
                    out.best_size, rfe.best_size
                ));
            }
        }
    }
    within(start.elapsed(), 10.0, "500 instances, frfe and k-SRFE (k = 2, 3, 5, 10) agree with step-1 RFE".into())
}

/// Integer array of length `n`, strictly increasing then strictly decreasing.
fn unimodal_ints(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    let peak = rng.random_range(0..n);
    let mut v = vec![0i64; n];
    v[peak] = 1000;
    for i in (0..peak).rev() {
        v[i] = v[i + 1] - rng.random_range(1..20);
    }
    for i in peak + 1..n {
        v[i] = v[i - 1] - rng.random_range(1..20);
    }
    v
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut rng = rng("line-search");
    for trial in 0..200 {
        let n = rng.random_range(2..=64);
        let v = unimodal_ints(&mut rng, n);
        let truth = (1..=n).max_by_key(|&x| v[x - 1]).expect("non-empty");
        let f = |x: usize| v[x - 1] as f64;
        let fib = fibonacci_search(f, 1, n).map_err(|e| e.to_string())?;
        if fib != truth {
            return Err(format!("fibonacci trial {trial}: {fib} vs argmax {truth} on {v:?}"));
        }
        let v = unimodal_ints(&mut rng, n);
        let truth = (1..=n).max_by_key(|&x| v[x - 1]).expect("non-empty");
        let k = [2, 3, 4, 5, 10][trial % 5];
        let sub = ksubsect_search(|x: usize| v[x - 1] as f64, 1, n, k).map_err(|e| e.to_string())?;
        if sub != truth {
            return Err(format!("{k}-subsect trial {trial}: {sub} vs argmax {truth} on {v:?}"));
        }
    }
    let parabola = fibonacci_search(|x| -0.2 * (x * x) as f64 + 2.0 * x as f64, 1, 10).map_err(|e| e.to_string())?;
    if parabola != 5 {
        return Err(format!("parabola maximum found at {parabola}"));
    }
    within(start.elapsed(), 1.0, "200 arrays each match brute force; parabola peak at 5".into())
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut rng = rng("eval-count");
    let mut parts = Vec::new();
    for m in [10, 100, 1_000, 10_000] {
        let bound = fibonacci_upto(m).map_err(|e| e.to_string())?.len();
        let mut peaks = vec![1, m / 2, m];
        peaks.extend((0..5).map(|_| rng.random_range(1..=m)));
        let mut worst = 0;
        for peak in peaks {
            let stub = Stub::new((0..m).collect(), unimodal(&mut rng, m, peak));
            worst = worst.max(run_frfe(&stub).map_err(|e| e.to_string())?.trace.eval_count());
        }
        if worst > bound || (m == 10_000 && worst > 25) {
            return Err(format!("m = {m}: {worst} evaluations, bound {bound}"));
        }
        parts.push(format!("m={m}: {worst} <= {bound}"));
    }
    within(start.elapsed(), 1.0, parts.join(", "))
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let schedule = rfe_schedule(240, 12).map_err(|e| e.to_string())?;
    let scores: Vec<f64> = (0..=240).map(|s| -(s as f64)).collect();
    let probes = run_rfe_fixed(&Stub::new((0..240).collect(), scores), 12).map_err(|e| e.to_string())?.trace.evaluation_order();
    let ok = schedule[..4] == [240, 220, 200, 180] && probes[..4] == [240, 220, 200, 180];
    if !ok {
        return Err(format!("schedule {schedule:?}, probes {probes:?}"));
    }
    within(start.elapsed(), 1.0, format!("probes begin {:?}", &probes[..4]))
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let cm = |c: Vec<Vec<u64>>| ConfusionMatrix::from_counts(c).expect("square");
    let k = kappa(&cm(vec![vec![50, 10], vec![5, 35]])).map_err(|e| e.to_string())?;
    let g = g_mean(&cm(vec![vec![9, 1], vec![2, 8]])).map_err(|e| e.to_string())?;
    let identity = cm(vec![vec![7, 0, 0], vec![0, 4, 0], vec![0, 0, 9]]);
    let annihilated = cm(vec![vec![0, 6], vec![6, 0]]);
    let all = |c: &ConfusionMatrix| -> subsectfs::Result<[f64; 4]> {
        Ok([accuracy(c)?, kappa(c)?, macro_recall(c)?, g_mean(c)?])
    };
    let id = all(&identity).map_err(|e| e.to_string())?;
    let an = all(&annihilated).map_err(|e| e.to_string())?;
    let ok = (k - 0.6939).abs() <= 1e-4
        && (g - 0.8485).abs() <= 1e-4
        && id == [1.0, 1.0, 1.0, 1.0]
        && an == [0.0, -1.0, 0.0, 0.0];
    let detail = format!("kappa {k:.6}, g_mean {g:.6}, identity {id:?}, annihilation {an:?}");
    if !ok {
        return Err(detail);
    }
    within(start.elapsed(), 1.0, detail)
}

/// Two-sided signed-rank p by enumerating all sign assignments.
fn enumeration_p(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|v| *v != 0.0).collect();
    let ranks = ascending_ranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let mean = ranks.iter().sum::<f64>() / 2.0;
    let w: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let n = ranks.len();
    let hits = (0u32..1 << n)
        .filter(|mask| {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            (s - mean).abs() >= (w - mean).abs() - 1e-9
        })
        .count();
    hits as f64 / (1u64 << n) as f64
}

fn chi_square(ranks: &[Vec<f64>]) -> f64 {
    let (d, a) = (ranks.len() as f64, ranks[0].len());
    let sq: f64 = (0..a).map(|i| (ranks.iter().map(|c| c[i]).sum::<f64>() / d).powi(2)).sum();
    let a = a as f64;
    12.0 * d / (a * (a + 1.0)) * (sq - a * (a + 1.0).powi(2) / 4.0)
}

/// Null distribution of the Friedman statistic by shuffling ranks within datasets.
fn permutation_p(scores: &[Vec<f64>], n_perm: usize, rng: &mut ChaCha8Rng) -> f64 {
    let d = scores[0].len();
    let mut ranks: Vec<Vec<f64>> =
        (0..d).map(|j| descending_ranks(&scores.iter().map(|r| r[j]).collect::<Vec<_>>())).collect();
    let observed = chi_square(&ranks);
    let mut hits = 0;
    for _ in 0..n_perm {
        for col in ranks.iter_mut() {
            col.shuffle(rng);
        }
        if chi_square(&ranks) >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / n_perm as f64
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut rng = rng("statistics");
    let mut cases = 0;
    for n in 5..=12 {
        for _ in 0..25 {
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
            match wilcoxon_signed_rank(&a, &b) {
                Ok(p) => {
                    let oracle = enumeration_p(&a, &b);
                    if (p - oracle).abs() > 1e-12 {
                        return Err(format!("wilcoxon {a:?} vs {b:?}: {p} vs enumeration {oracle}"));
                    }
                    cases += 1;
                }
                Err(subsectfs::Error::InsufficientData(_)) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    let mut worst: f64 = 0.0;
    for trial in 0..5 {
        let effect = 0.05 * trial as f64;
        let scores: Vec<Vec<f64>> =
            (0..4).map(|i| (0..20).map(|_| rng.random::<f64>() + effect * i as f64).collect()).collect();
        let p = friedman_test(&scores).map_err(|e| e.to_string())?.p_value;
        let oracle = permutation_p(&scores, 100_000, &mut rng);
        worst = worst.max((p - oracle).abs());
    }
    if worst >= 0.02 {
        return Err(format!("friedman p differs from the permutation oracle by {worst:.4}"));
    }
    within(start.elapsed(), 60.0, format!("{cases} exact wilcoxon cases; friedman worst |dp| = {worst:.4}"))
}

fn scaled_dataset() -> SyntheticSpec {
    SyntheticSpec { n_examples: 300, informative: 10, noise: 190, separation: 1.5, seed: 2024 }
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let source = DatasetSource::Synthetic { synthetic: scaled_dataset(), name: Some("scaled".into()) };
    let mut config = ExperimentConfig::new(vec![source], vec![StrategySpec::Ksrfe { k: 3 }]);
    config.repetitions = 10;
    config.cv_k = 5;
    config.seed = 7;
    config.traces = false;
    config.out = dir.path().to_path_buf();
    let outcome = run_experiment(&config).map_err(|e| e.to_string())?;
    let stat = |id: &str| {
        let runs: Vec<_> = outcome.records.iter().filter(|r| r.strategy == id).collect();
        let n = runs.len() as f64;
        (
            runs.len(),
            runs.iter().map(|r| r.selected.len() as f64).sum::<f64>() / n,
            runs.iter().map(|r| r.metrics.accuracy).sum::<f64>() / n,
        )
    };
    let (n_k, size_k, acc_k) = stat("3-srfe");
    let (n_b, size_b, acc_b) = stat("rfe-3");
    let detail = format!(
        "3-SRFE size {size_k:.1} acc {acc_k:.4} vs step-matched RFE size {size_b:.1} acc {acc_b:.4} ({n_k}+{n_b} runs)"
    );
    if n_k != 10 || n_b != 10 || size_k > size_b || (acc_k - acc_b).abs() > 0.02 {
        return Err(detail);
    }
    within(start.elapsed(), 300.0, detail)
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let data = scaled_dataset().generate().map_err(|e| e.to_string())?;
    let run = |strategy| select(&data, &SearchConfig::new(strategy, RankerConfig::logistic(3)).with_seed(11));
    let frfe = run(Strategy::Frfe).map_err(|e| e.to_string())?;
    let rfe = run(Strategy::RfeFixed { n_steps: data.n_features() }).map_err(|e| e.to_string())?;
    let ratio = frfe.wall_time / rfe.wall_time;
    let detail = format!(
        "frfe {:.2} s ({} evaluations) vs step-1 RFE {:.2} s ({} evaluations): {:.1} %",
        frfe.wall_time,
        frfe.eval_count(),
        rfe.wall_time,
        rfe.eval_count(),
        100.0 * ratio
    );
    if ratio >= 0.25 {
        return Err(detail);
    }
    within(start.elapsed(), 600.0, detail)
}

fn cli(args: &[&str], threads: &str) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_subsectfs"))
        .args(args)
        .env("SUBSECTFS_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn same_files(a: &Path, b: &Path, skip_prefix: &str) -> Result<usize, String> {
    let mut n = 0;
    for entry in fs::read_dir(a).map_err(|e| e.to_string())? {
        let name = entry.map_err(|e| e.to_string())?.file_name();
        let name = name.to_string_lossy();
        if name.starts_with(skip_prefix) {
            continue;
        }
        let x = fs::read(a.join(&*name)).map_err(|e| e.to_string())?;
        let y = fs::read(b.join(&*name)).map_err(|e| format!("{name}: {e}"))?;
        if x != y {
            return Err(format!("{name} differs between {} and {}", a.display(), b.display()));
        }
        n += 1;
    }
    Ok(n)
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = SyntheticSpec { n_examples: 80, informative: 3, noise: 13, separation: 2.0, seed: 9 }
        .generate()
        .map_err(|e| e.to_string())?;
    let mut text = (0..d.n_features()).map(|j| format!("x{j}")).collect::<Vec<_>>().join(",") + ",y\n";
    for (row, l) in d.features().rows().into_iter().zip(d.labels()) {
        text += &format!("{},{l}\n", row.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(","));
    }
    let csv = dir.path().join("d.csv");
    fs::write(&csv, text).map_err(|e| e.to_string())?;
    let config = dir.path().join("bench.toml");
    fs::write(&config, "strategies = [\"frfe\", \"3-srfe\"]\nrepetitions = 3\nseed = 31\n\n[[rankers]]\nkind = \"logistic\"\n\n[[rankers]]\nkind = \"forest\"\n\n[[datasets]]\npath = \"d.csv\"\n")
        .map_err(|e| e.to_string())?;

    let threads = ["1", "2", "4"];
    let mut compared = 0;
    for (strategy, ranker) in [("frfe", "logistic"), ("ksrfe", "forest"), ("rfe", "logistic")] {
        let outs: Vec<_> = threads.iter().map(|t| dir.path().join(format!("select-{strategy}-{t}"))).collect();
        for (t, out) in threads.iter().zip(&outs) {
            let args = ["select", "--data", csv.to_str().unwrap(), "--strategy", strategy, "--ranker", ranker, "--seed", "5", "--out", out.to_str().unwrap()];
            cli(&args, t)?;
        }
        for o in &outs[1..] {
            compared += same_files(&outs[0], o, "timing")?;
        }
    }
    let outs: Vec<_> = threads.iter().map(|t| dir.path().join(format!("bench-{t}"))).collect();
    for (t, out) in threads.iter().zip(&outs) {
        cli(&["benchmark", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()], t)?;
    }
    for o in &outs[1..] {
        compared += same_files(&outs[0], o, "timing")?;
    }
    check(compared > 0, format!("{compared} output files byte-identical across SUBSECTFS_THREADS = 1, 2, 4"))
}

fn criterion_10() -> Verdict {
    let start = Instant::now();
    let x = array![
        [0.2, 0.7, 0.1, 0.9, 0.4],
        [0.9, 0.1, 0.5, 0.3, 0.8],
        [0.4, 0.6, 0.8, 0.2, 0.1],
        [0.7, 0.3, 0.2, 0.6, 0.5],
        [0.1, 0.9, 0.6, 0.4, 0.7],
        [0.5, 0.5, 0.9, 0.8, 0.2],
        [0.8, 0.2, 0.3, 0.1, 0.9],
    ];
    let t = array![1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0];
    let w = array![0.5, -1.2, 0.8, 0.3, -0.6];
    let (b, l2, h) = (-0.2, 0.01, 1e-5);
    let loss = |w: &Array1<f64>, b: f64| loss_and_gradient(x.view(), t.view(), w.view(), b, l2).0;
    let (_, gw, gb) = loss_and_gradient(x.view(), t.view(), w.view(), b, l2);
    let mut analytic: Vec<f64> = gw.to_vec();
    analytic.push(gb);
    let mut numeric = Vec::new();
    for j in 0..5 {
        let (mut up, mut down) = (w.clone(), w.clone());
        up[j] += h;
        down[j] -= h;
        numeric.push((loss(&up, b) - loss(&down, b)) / (2.0 * h));
    }
    numeric.push((loss(&w, b + h) - loss(&w, b - h)) / (2.0 * h));
    let diff: f64 = analytic.iter().zip(&numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
    let norm = analytic.iter().map(|a| a * a).sum::<f64>().sqrt().max(numeric.iter().map(|a| a * a).sum::<f64>().sqrt());
    let rel = diff / norm;
    if rel >= 1e-4 {
        return Err(format!("relative error {rel:.3e}"));
    }
    within(start.elapsed(), 1.0, format!("relative error {rel:.3e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", criterion_1),
        ("line-search correctness", criterion_2),
        ("logarithmic evaluation count", criterion_3),
        ("step-matched baseline schedule", criterion_4),
        ("metric correctness", criterion_5),
        ("statistics correctness", criterion_6),
        ("scaled end-to-end experiment", criterion_7),
        ("speed-up over step-1 RFE", criterion_8),
        ("determinism across thread counts", criterion_9),
        ("logistic gradient check", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.ends_with(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        match run() {
            Ok(detail) => println!("PASS {id}: {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id}: {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
