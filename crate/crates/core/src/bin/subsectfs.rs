use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use subsectfs::harness::{self, emit_curve, fmt_num, load_csv, write_trace, ExperimentConfig, LabelColumn};
use subsectfs::metrics::Metric;
use subsectfs::rankers::{RankerConfig, RankerKind};
use subsectfs::search::{select, SearchConfig, Strategy};
use subsectfs::Result;

#[derive(Parser)]
#[command(version, about = "Recursive feature elimination with line searches over subset sizes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Frfe,
    Ksrfe,
    Rfe,
}

#[derive(Subcommand)]
enum Command {
    /// Select features from one CSV file.
    Select {
        #[arg(long)]
        data: PathBuf,
        /// Label column name or index (negative counts from the end).
        #[arg(long, default_value = "-1")]
        label: LabelColumn,
        #[arg(long, value_enum, default_value = "frfe")]
        strategy: StrategyArg,
        /// Subsections per sweep for ksrfe.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Number of evaluations for rfe; one feature per step if omitted.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value = "logistic")]
        ranker: RankerKind,
        #[arg(long, default_value_t = 5)]
        cv: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "accuracy")]
        metric: Metric,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment described by a TOML file.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output directory of the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the significance report for saved run records.
    Compare {
        /// Results directory or records.csv file.
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

#[derive(Serialize)]
struct SelectionFile<'a> {
    dataset: &'a str,
    strategy: String,
    ranker: &'a str,
    seed: u64,
    cv_k: usize,
    best_size: usize,
    search_best: usize,
    eval_count: usize,
    selected: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    selected_names: Option<Vec<&'a str>>,
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Select { data, label, strategy, k, steps, ranker, cv, seed, metric, out } => {
            let dataset = load_csv(&data, &label)?;
            let strategy = match strategy {
                StrategyArg::Frfe => Strategy::Frfe,
                StrategyArg::Ksrfe => Strategy::Ksrfe { k },
                StrategyArg::Rfe => Strategy::RfeFixed { n_steps: steps.unwrap_or(dataset.n_features()) },
            };
            let ranker = RankerConfig { kind: ranker, seed, ..Default::default() };
            let config = SearchConfig { strategy, cv_k: cv, seed, ranker, metric };
            let result = select(&dataset, &config)?;

            fs::create_dir_all(&out)?;
            let names = dataset.feature_names().map(|n| result.selected.iter().map(|&i| n[i].as_str()).collect());
            let file = SelectionFile {
                dataset: &dataset.name,
                strategy: strategy.id(),
                ranker: config.ranker.kind.name(),
                seed,
                cv_k: cv,
                best_size: result.best_size,
                search_best: result.search_best,
                eval_count: result.eval_count(),
                selected: &result.selected,
                selected_names: names,
            };
            let mut json = serde_json::to_string_pretty(&file)?;
            json.push('\n');
            fs::write(out.join("selection.json"), json)?;
            write_trace(&result.trace, out.join("trace.jsonl"))?;
            emit_curve(&result.trace, out.join("curve.csv"))?;
            println!(
                "{}: {} of {} features, cv {} = {}, {} evaluations, {} s",
                dataset.name,
                result.best_size,
                dataset.n_features(),
                metric,
                fmt_num(result.trace.mean_score(result.best_size).unwrap_or(f64::NAN)),
                result.eval_count(),
                fmt_num(result.wall_time)
            );
        }
        Command::Benchmark { config, out } => {
            let mut config = ExperimentConfig::from_file(&config)?;
            if let Some(out) = out {
                config.out = out;
            }
            let outcome = harness::run_experiment(&config)?;
            println!(
                "{} runs recorded, {} failed; results in {}",
                outcome.records.len(),
                outcome.failures.len(),
                config.out.display()
            );
        }
        Command::Compare { records, alpha } => {
            print!("{}", harness::compare(&records, alpha)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match harness::with_thread_pool(|| run(cli.command)).and_then(|r| r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
