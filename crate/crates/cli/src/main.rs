mod manifest;

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mst_core::classifiers::{fit_predict, write_predictions_csv, Algorithm, PipelineParams};
use mst_core::data::{read_dataset, write_dataset, Dataset};
use mst_core::evaluation::{
    accuracy, average_ranks, experiment_resample, pairwise_wilcoxon, run_experiment, PairwiseTest, Problem,
    ResultsTable,
};
use mst_core::seed::{derive_seed, rng_from_seed};
use mst_core::shapelets::{
    assess_candidate, count_candidates, sample_candidate, search_with_stats, transform, ShapeletSet, ShapeletVariant,
};
use mst_core::synthetic::{planted_problem, PlantedConfig};
use mst_core::{Error as CoreError, WarpingWindow};

use manifest::RunManifest;

/// Bad invocation or unreadable input: exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

#[derive(Parser)]
#[command(
    name = "mst",
    version,
    about = "Multivariate shapelet transform and time series classification benchmarks"
)]
struct Cli {
    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search shapelets on a training set and write the transformed features.
    Transform(TransformArgs),
    /// Fit one classifier and predict a test set.
    Classify(ClassifyArgs),
    /// Run several classifiers over resamples of several datasets.
    Benchmark(BenchmarkArgs),
    /// Write one stratified resample of a train/test pair.
    Resample(ResampleArgs),
    /// Project how much of the shapelet space a time budget covers.
    Estimate(EstimateArgs),
    /// Pairwise Wilcoxon tests across two benchmark results files.
    Compare(CompareArgs),
    /// Write a synthetic dataset with class-specific planted waveforms.
    Generate(GenerateArgs),
}

/// Shapelet search settings shared by the commands that search.
#[derive(Args, Serialize, Clone)]
struct SearchArgs {
    /// Shapelets to keep (default: 10 per class).
    #[arg(long)]
    k: Option<usize>,
    /// Shortest candidate length.
    #[arg(long, default_value_t = 3)]
    min: usize,
    /// Longest candidate length (default: series length).
    #[arg(long)]
    max: Option<usize>,
    /// Distinct candidates to assess (default 1000 when no time limit is given).
    #[arg(long)]
    total: Option<u64>,
    /// Wall-clock budget for the search in seconds.
    #[arg(long = "time-limit")]
    time_limit: Option<f64>,
    /// Compare raw rather than z-normalised subsequences.
    #[arg(long = "no-normalize")]
    no_normalize: bool,
}

impl SearchArgs {
    fn params(&self, seed: u64, window: f64) -> anyhow::Result<PipelineParams> {
        if let Some(t) = self.time_limit {
            if !(t.is_finite() && t > 0.0) {
                return Err(usage(format!(
                    "--time-limit must be a positive number of seconds, got {t}"
                )));
            }
        }
        if self.total == Some(0) {
            return Err(usage("--total must be at least 1"));
        }
        if self.k == Some(0) {
            return Err(usage("--k must be at least 1"));
        }
        Ok(PipelineParams {
            window: WarpingWindow::new(window).map_err(|e| usage(e.to_string()))?,
            seed,
            min_length: Some(self.min),
            max_length: self.max,
            k: self.k,
            total_shapelets: self.total,
            time_budget: self.time_limit,
            normalize: !self.no_normalize,
        })
    }
}

#[derive(Args, Serialize)]
struct TransformArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: Option<PathBuf>,
    /// independent, shapelet-d or shapelet-i.
    #[arg(long, default_value = "shapelet-d")]
    method: ShapeletVariant,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    search: SearchArgs,
    /// Reuse a previously written shapelets.json instead of searching.
    #[arg(long)]
    shapelets: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ClassifyArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// dtw-i, dtw-d, dtw-a, 1nn-ed-c, 1nn-dtw-c, 1nn-dtw-e, st-indep, st-d or st-i.
    #[arg(long)]
    algo: Algorithm,
    /// Warping window as a fraction of the series length.
    #[arg(long, default_value_t = 1.0)]
    window: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    search: SearchArgs,
    /// Predictions CSV.
    #[arg(long, default_value = "predictions.csv")]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct BenchmarkArgs {
    /// A TRAIN TEST pair; repeat for more datasets.
    #[arg(long, num_args = 2, value_names = ["TRAIN", "TEST"], action = clap::ArgAction::Append, required = true)]
    data: Vec<PathBuf>,
    /// Comma-separated algorithm names.
    #[arg(long, value_delimiter = ',', required = true)]
    algos: Vec<Algorithm>,
    #[arg(long, default_value_t = 10)]
    folds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    window: f64,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ResampleArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long)]
    fold: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct EstimateArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long, default_value = "shapelet-d")]
    method: ShapeletVariant,
    #[arg(long, default_value_t = 3)]
    min: usize,
    #[arg(long)]
    max: Option<usize>,
    /// Budget in seconds to project against.
    #[arg(long = "time-limit", default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "no-normalize")]
    no_normalize: bool,
}

#[derive(Args, Serialize)]
struct CompareArgs {
    first: PathBuf,
    second: PathBuf,
    /// Write the table here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GenerateArgs {
    #[arg(long, default_value = "planted")]
    name: String,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 3)]
    dims: usize,
    #[arg(long, default_value_t = 100)]
    length: usize,
    #[arg(long = "train-per-class", default_value_t = 10)]
    train_per_class: usize,
    #[arg(long = "test-per-class", default_value_t = 10)]
    test_per_class: usize,
    #[arg(long = "pattern-length", default_value_t = 20)]
    pattern_length: usize,
    #[arg(long, default_value_t = 2.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    /// Plant the pattern at a different offset in every dimension.
    #[arg(long = "independent-phases")]
    independent_phases: bool,
    /// Classes (from the first) that carry no pattern.
    #[arg(long = "blank-classes", default_value_t = 0)]
    blank_classes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    out: PathBuf,
}

fn load(path: &Path) -> anyhow::Result<Dataset> {
    read_dataset(path).map_err(|e| usage(format!("cannot load dataset {}: {e}", path.display())))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create directory {}", dir.display()))
}

fn cmd_transform(args: &TransformArgs) -> anyhow::Result<()> {
    let manifest = RunManifest::new("transform", args)?;
    let train = load(&args.train)?;
    let test = args.test.as_deref().map(load).transpose()?;
    let set = match &args.shapelets {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read shapelets {}: {e}", path.display())))?;
            ShapeletSet::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => {
            let config = args.search.params(args.seed, 1.0)?.search_config(&train, args.method)?;
            let (shapelets, stats) = search_with_stats(&train, &config)?;
            eprintln!(
                "assessed {} of {} candidates in {:.2}s",
                stats.evaluated,
                stats.space,
                stats.elapsed.as_secs_f64()
            );
            ShapeletSet { config, shapelets }
        }
    };
    ensure_dir(&args.out)?;
    write_text(&args.out.join("shapelets.json"), &manifest.wrap(&set)?)?;
    let comments = [manifest.comment()];
    let mut outputs = vec![("train_features.csv", &train)];
    if let Some(test) = &test {
        outputs.push(("test_features.csv", test));
    }
    for (file, data) in outputs {
        let features = transform(data, &set.shapelets)?;
        let path = args.out.join(file);
        let mut out = create(&path)?;
        features.write_csv(&mut out, &comments)?;
        out.flush()?;
    }
    println!("shapelets={}", set.shapelets.len());
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs) -> anyhow::Result<()> {
    let manifest = RunManifest::new("classify", args)?;
    let train = load(&args.train)?;
    let test = load(&args.test)?;
    let params = args.search.params(args.seed, args.window)?;
    let predictions = fit_predict(args.algo, &train, &test, &params)?;
    let labels: Vec<&str> = predictions.iter().map(|p| p.label.as_str()).collect();
    let acc = accuracy(&labels, &test.labels())?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    let mut out = create(&args.out)?;
    write_predictions_csv(&mut out, &test, &predictions, &[manifest.comment()])?;
    out.flush()?;
    println!("accuracy={acc:?}");
    Ok(())
}

fn write_pairwise_csv<W: Write>(out: &mut W, tests: &[PairwiseTest], comments: &[String]) -> anyhow::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "first,second,datasets,pValue")?;
    for t in tests {
        writeln!(out, "{},{},{},{}", t.first, t.second, t.datasets, t.p_value)?;
    }
    Ok(())
}

fn cmd_benchmark(args: &BenchmarkArgs) -> anyhow::Result<()> {
    let manifest = RunManifest::new("benchmark", args)?;
    if args.folds < 1 {
        return Err(usage("--folds must be at least 1"));
    }
    let mut algos: Vec<Algorithm> = Vec::new();
    for a in &args.algos {
        if !algos.contains(a) {
            algos.push(*a);
        }
    }
    if algos.len() < 2 {
        return Err(usage("--algos needs at least two distinct algorithms"));
    }
    let problems = args
        .data
        .chunks(2)
        .map(|pair| {
            Ok(Problem {
                train: load(&pair[0])?,
                test: load(&pair[1])?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let params = args.search.params(args.seed, args.window)?;
    let table = run_experiment(&problems, &algos, args.folds, args.seed, &params)?;
    for cell in table.failures() {
        eprintln!(
            "warning: {} / {} / fold {} failed: {}",
            cell.dataset,
            cell.algorithm,
            cell.fold,
            cell.error.as_deref().unwrap_or("unknown error")
        );
    }
    let ranks = average_ranks(&table)?;
    let pairwise = pairwise_wilcoxon(&table.algorithms, &table.mean_matrix())?;

    ensure_dir(&args.out)?;
    write_text(&args.out.join("results.json"), &manifest.wrap(&table)?)?;
    write_text(&args.out.join("ranks.json"), &manifest.wrap(&ranks)?)?;
    let comment = manifest.comment();
    let mut out = create(&args.out.join("ranks.csv"))?;
    writeln!(out, "# {comment}")?;
    writeln!(out, "algorithm,averageRank")?;
    for (a, r) in ranks.algorithms.iter().zip(&ranks.average_ranks) {
        writeln!(out, "{a},{r}")?;
    }
    out.flush()?;
    let mut out = create(&args.out.join("wilcoxon.csv"))?;
    write_pairwise_csv(&mut out, &pairwise, &[comment])?;
    out.flush()?;

    print_table(&table);
    println!();
    for (a, r) in ranks.algorithms.iter().zip(&ranks.average_ranks) {
        println!("rank {a} {r:.3}");
    }
    Ok(())
}

fn print_table(table: &ResultsTable) {
    let width = table.datasets.iter().map(String::len).max().unwrap_or(0).max(7);
    print!("{:width$}", "dataset");
    for a in &table.algorithms {
        print!("  {a:>15}");
    }
    println!();
    for d in &table.datasets {
        print!("{d:width$}");
        for a in &table.algorithms {
            let cell = match table.summary(d, a) {
                Some(s) => format!("{:.3} ({:.2})", s.mean, s.std),
                None => "failed".to_string(),
            };
            print!("  {cell:>15}");
        }
        println!();
    }
}

fn cmd_resample(args: &ResampleArgs) -> anyhow::Result<()> {
    let manifest = RunManifest::new("resample", args)?;
    let problem = Problem {
        train: load(&args.train)?,
        test: load(&args.test)?,
    };
    let (train, test) = experiment_resample(&problem, args.fold, args.seed)?;
    ensure_dir(&args.out)?;
    let comments = [manifest.comment()];
    for (split, data) in [("TRAIN", &train), ("TEST", &test)] {
        let path = args
            .out
            .join(format!("{}_fold{}_{split}.ts", problem.name(), args.fold));
        let mut out = create(&path)?;
        write_dataset(&mut out, data, &comments)?;
        out.flush()?;
        println!("{}", path.display());
    }
    Ok(())
}

const PILOT: usize = 100;

fn cmd_estimate(args: &EstimateArgs) -> anyhow::Result<()> {
    if !(args.time_limit.is_finite() && args.time_limit > 0.0) {
        return Err(usage(format!(
            "--time-limit must be a positive number of seconds, got {}",
            args.time_limit
        )));
    }
    let train = load(&args.train)?;
    let search = SearchArgs {
        k: None,
        min: args.min,
        max: args.max,
        total: None,
        time_limit: None,
        no_normalize: args.no_normalize,
    };
    let config = search.params(args.seed, 1.0)?.search_config(&train, args.method)?;
    let space = count_candidates(&train, &config);
    let mut rng = rng_from_seed(derive_seed(args.seed, "estimate", &[]));
    let pilot = (0..PILOT)
        .map(|_| sample_candidate(&mut rng, &train, &config))
        .collect::<mst_core::Result<Vec<_>>>()?;
    let started = Instant::now();
    pilot
        .into_par_iter()
        .map(|mut c| assess_candidate(&mut c, &train))
        .collect::<mst_core::Result<Vec<_>>>()?;
    let elapsed = started.elapsed().as_secs_f64().max(1e-9);
    let per_second = PILOT as f64 / elapsed;
    let per_hour = per_second * 3600.0;
    let within_budget = per_second * args.time_limit;
    let proportion = (within_budget / space as f64).min(1.0);
    println!("method={}", args.method);
    println!("candidates={space}");
    println!("pilot_seconds={elapsed:.6}");
    println!("candidates_per_hour={per_hour:.0}");
    println!("time_limit={}", args.time_limit);
    println!("feasible_proportion={proportion:.6}");
    if within_budget >= space as f64 {
        println!("full enumeration feasible");
    } else {
        println!(
            "full enumeration infeasible: about {:.1} budgets needed",
            space as f64 / within_budget
        );
    }
    Ok(())
}

/// Benchmark results as written by `benchmark`; the manifest is ignored.
#[derive(Deserialize)]
struct ResultsFile {
    #[serde(flatten)]
    table: ResultsTable,
}

fn read_results(path: &Path) -> anyhow::Result<ResultsTable> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let file: ResultsFile =
        serde_json::from_str(&text).map_err(|e| usage(format!("{} is not a results file: {e}", path.display())))?;
    file.table
        .validate()
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(file.table)
}

fn cmd_compare(args: &CompareArgs) -> anyhow::Result<()> {
    let manifest = RunManifest::new("compare", args)?;
    let first = read_results(&args.first)?;
    let second = read_results(&args.second)?;
    // datasets present in both files, in the first file's order
    let datasets: Vec<&String> = first.datasets.iter().filter(|d| second.datasets.contains(d)).collect();
    if datasets.is_empty() {
        bail!(usage("the two results files share no dataset"));
    }
    let clash = |a: &String| second.algorithms.contains(a) && first.algorithms.contains(a);
    let mut names = Vec::new();
    let mut columns: Vec<Vec<Option<f64>>> = Vec::new();
    for (table, tag) in [(&first, "1"), (&second, "2")] {
        for a in &table.algorithms {
            names.push(if clash(a) { format!("{a}@{tag}") } else { a.clone() });
            columns.push(datasets.iter().map(|d| table.summary(d, a).map(|s| s.mean)).collect());
        }
    }
    let means: Vec<Vec<Option<f64>>> = (0..datasets.len())
        .map(|d| columns.iter().map(|c| c[d]).collect())
        .collect();
    let tests = pairwise_wilcoxon(&names, &means)?;
    let comments = [manifest.comment()];
    match &args.out {
        Some(path) => {
            let mut out = create(path)?;
            write_pairwise_csv(&mut out, &tests, &comments)?;
            out.flush()?;
        }
        None => write_pairwise_csv(&mut std::io::stdout().lock(), &tests, &comments)?,
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let manifest = RunManifest::new("generate", args)?;
    let cfg = PlantedConfig {
        name: args.name.clone(),
        n_classes: args.classes,
        n_dims: args.dims,
        length: args.length,
        train_per_class: args.train_per_class,
        test_per_class: args.test_per_class,
        pattern_length: args.pattern_length,
        amplitude: args.amplitude,
        noise: args.noise,
        aligned: !args.independent_phases,
        blank_classes: args.blank_classes,
        seed: args.seed,
    };
    let planted = planted_problem(&cfg)?;
    ensure_dir(&args.out)?;
    let comments = [manifest.comment()];
    for (split, data) in [("TRAIN", &planted.problem.train), ("TEST", &planted.problem.test)] {
        let path = args.out.join(format!("{}_{split}.ts", args.name));
        let mut out = create(&path)?;
        write_dataset(&mut out, data, &comments)?;
        out.flush()?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot start the worker pool")?;
    }
    match &cli.command {
        Command::Transform(a) => cmd_transform(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Benchmark(a) => cmd_benchmark(a),
        Command::Resample(a) => cmd_resample(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Config(_) | CoreError::Parse { .. } | CoreError::InvalidData(_) | CoreError::Dimension(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
