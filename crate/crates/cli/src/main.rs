use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use elmboost::data_io::{Catalog, DatasetSource, DatasetSpec, Delimiter};
use elmboost::elm::activation;
use elmboost::partition::{EngineConfig, DEFAULT_MIN_PARTITION_ROWS};
use elmboost::pool::default_workers;
use elmboost::sweep::{
    self, emit_heatmap, read_records, reducer_by_name, run_baseline_elm, run_sweep, seed_list,
    summarize, write_records, Axis, Cell, RunOptions, SweepConfig, SweepRecord,
};
use elmboost::{Error, ErrorClass, Result};

mod ranges;

use ranges::parse_values;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "elmboost", version, about = "Partitioned AdaBoost ELM ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train and evaluate one configuration.
    Train(TrainArgs),
    /// Standard ELM (M=1, T=1) over a range of hidden-node counts; report the best.
    Baseline(BaselineArgs),
    /// Grid sweep over (M, T, nh) and seeds, appending to a results CSV.
    Sweep(SweepArgs),
    /// Collapse a results CSV into a two-axis accuracy grid.
    Heatmap(HeatmapArgs),
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Catalog dataset name or path to a data file.
    #[arg(long)]
    dataset: String,
    /// File format for path datasets.
    #[arg(long, default_value = "csv", value_parser = ["csv", "libsvm"])]
    format: String,
    /// Dataset catalog (TOML); defaults to the bundled catalog.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Directory catalog paths are relative to [env: ELMBOOST_DATA_DIR, default: data]
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Separate test file for path datasets.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Held-out fraction when a path dataset has no test file.
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    /// Skip the first line of CSV files.
    #[arg(long)]
    header: bool,
    /// Zero-based label column for CSV (default: last).
    #[arg(long)]
    label_col: Option<usize>,
    /// CSV delimiter: a single character, `tab` or `whitespace`.
    #[arg(long)]
    delimiter: Option<String>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, default_value = "sigmoid")]
    activation: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Relative singular-value cutoff for the least-squares solve.
    #[arg(long, default_value_t = elmboost::elm::DEFAULT_RCOND)]
    rcond: f64,
    #[arg(long, default_value_t = DEFAULT_MIN_PARTITION_ROWS)]
    min_partition_rows: usize,
    /// Train weak learners on uniform weights instead of the boosting distribution.
    #[arg(long)]
    unweighted_weak_learner: bool,
    /// Use the plain misclassification rate as the round error.
    #[arg(long)]
    unweighted_error: bool,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short = 'M', long, default_value_t = 1)]
    partitions: usize,
    #[arg(short = 'T', long, default_value_t = 1)]
    rounds: usize,
    #[arg(short = 'n', long, default_value_t = 100)]
    hidden: usize,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    /// Reduce-task workers.
    #[arg(long)]
    workers: Option<usize>,
    /// Write the run records as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Hidden-node counts: list and/or ranges, e.g. `1..500`, `21,50,100`, `10..100:10`.
    #[arg(short = 'n', long, default_value = "1..500")]
    hidden: String,
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    /// Concurrent runs.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short = 'M', long, default_value = "1..21")]
    partitions: String,
    #[arg(short = 'T', long, default_value = "1..10")]
    rounds: String,
    #[arg(short = 'n', long, default_value = "21,50,100,150,250,340,500")]
    hidden: String,
    #[arg(long, default_value_t = sweep::DEFAULT_SEED_COUNT)]
    seeds: usize,
    /// Concurrent sweep cells.
    #[arg(long)]
    workers: Option<usize>,
    /// Results CSV; an existing file is resumed.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct HeatmapArgs {
    /// Results CSV written by `sweep`.
    input: PathBuf,
    #[arg(long, default_value = "M")]
    x: String,
    #[arg(long, default_value = "T")]
    y: String,
    /// How to collapse the third axis: max or mean.
    #[arg(long, default_value = "max")]
    reduce: String,
    /// Grid CSV output (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot nonuniform-matrix file.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => EXIT_USAGE,
                ErrorClass::Data => EXIT_DATA,
                ErrorClass::Numeric => EXIT_NUMERIC,
            })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => train(args),
        Command::Baseline(args) => baseline(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Heatmap(args) => heatmap(args),
    }
}

fn data_dir(args: &DataArgs) -> PathBuf {
    args.data_dir
        .clone()
        .or_else(|| std::env::var_os("ELMBOOST_DATA_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"))
}

fn absolute(path: &Path) -> PathBuf {
    std::env::current_dir().map_or_else(|_| path.to_path_buf(), |cwd| cwd.join(path))
}

fn resolve_dataset(args: &DataArgs) -> Result<DatasetSpec> {
    let catalog = match &args.catalog {
        Some(path) => Catalog::from_path(path)?,
        None => Catalog::builtin(),
    };
    let path = Path::new(&args.dataset);
    let mut spec = match catalog.get(&args.dataset) {
        Some(spec) if !path.is_file() => spec.clone(),
        _ => {
            if !path.exists() {
                return Err(Error::io(
                    path,
                    io::Error::new(
                        io::ErrorKind::NotFound,
                        format!("not a catalog dataset ({}) or an existing file", names(&catalog)),
                    ),
                ));
            }
            let mut spec = DatasetSpec::from_path(absolute(path), &args.format);
            spec.test_fraction = args.test_fraction;
            if let Some(test) = &args.test {
                spec.source = DatasetSource::Files {
                    train: absolute(path),
                    test: absolute(test),
                };
            }
            spec
        }
    };
    if args.header {
        spec.read.header = true;
    }
    if args.label_col.is_some() {
        spec.read.label_col = args.label_col;
    }
    if let Some(d) = &args.delimiter {
        spec.read.delimiter = Delimiter::parse(d)?;
    }
    Ok(spec)
}

fn names(catalog: &Catalog) -> String {
    catalog.specs().iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn run_options(data: &DataArgs, model: &ModelArgs, engine_workers: usize) -> Result<RunOptions> {
    if engine_workers == 0 {
        return Err(Error::invalid("--workers must be at least 1"));
    }
    Ok(RunOptions {
        activation: activation::by_name(&model.activation)?,
        rcond: model.rcond,
        engine: EngineConfig {
            workers: engine_workers,
            min_partition_rows: model.min_partition_rows,
        },
        weighted_weak_learner: !model.unweighted_weak_learner,
        weighted_error: !model.unweighted_error,
        data_dir: data_dir(data),
    })
}

fn print_record(r: &SweepRecord) {
    println!(
        "{} M={} T={} nh={} seed={}  acc={:.4} prec={:.4} rec={:.4} f1={:.4}  train={:.1}ms predict={:.1}ms",
        r.dataset, r.partitions, r.rounds, r.nh, r.seed, r.accuracy, r.precision, r.recall, r.f1, r.train_ms, r.predict_ms
    );
}

fn print_summary(records: &[SweepRecord]) {
    for s in summarize(records) {
        println!(
            "M={} T={} nh={} runs={}  acc={:.4}±{:.4} prec={:.4}±{:.4} rec={:.4}±{:.4} f1={:.4}±{:.4}",
            s.partitions,
            s.rounds,
            s.nh,
            s.runs,
            s.accuracy.0,
            s.accuracy.1,
            s.precision.0,
            s.precision.1,
            s.recall.0,
            s.recall.1,
            s.f1.0,
            s.f1.1
        );
    }
}

fn train(args: TrainArgs) -> Result<()> {
    let opts = run_options(&args.data, &args.model, args.workers.unwrap_or_else(default_workers))?;
    if args.seeds == 0 {
        return Err(Error::invalid("--seeds must be at least 1"));
    }
    // Validate before touching any data.
    Cell {
        partitions: args.partitions,
        rounds: args.rounds,
        nh: args.hidden,
        seed: args.model.seed,
    }
    .validate()?;
    let spec = resolve_dataset(&args.data)?;
    let data = sweep::prepare(&spec, &opts.data_dir)?;
    let mut records = Vec::new();
    for seed in seed_list(args.model.seed, args.seeds) {
        let cell = Cell {
            partitions: args.partitions,
            rounds: args.rounds,
            nh: args.hidden,
            seed,
        };
        let r = sweep::run_prepared(&data, cell, &opts)?;
        print_record(&r);
        records.push(r);
    }
    if records.len() > 1 {
        print_summary(&records);
    }
    if let Some(out) = &args.out {
        write_records(out, &records)?;
    }
    Ok(())
}

fn baseline(args: BaselineArgs) -> Result<()> {
    let opts = run_options(&args.data, &args.model, 1)?;
    let nh_values = parse_values(&args.hidden)?;
    if args.seeds == 0 {
        return Err(Error::invalid("--seeds must be at least 1"));
    }
    let workers = args.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(Error::invalid("--workers must be at least 1"));
    }
    let spec = resolve_dataset(&args.data)?;
    let outcome = run_baseline_elm(&spec, &nh_values, &seed_list(args.model.seed, args.seeds), workers, &opts)?;
    print!("best: ");
    print_record(&outcome.best);
    if let Some(out) = &args.out {
        write_records(out, &outcome.records)?;
    }
    Ok(())
}

fn sweep_cmd(args: SweepArgs) -> Result<()> {
    let opts = run_options(&args.data, &args.model, 1)?;
    let workers = args.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(Error::invalid("--workers must be at least 1"));
    }
    let config = SweepConfig {
        dataset: resolve_dataset(&args.data)?,
        m_values: parse_values(&args.partitions)?,
        t_values: parse_values(&args.rounds)?,
        nh_values: parse_values(&args.hidden)?,
        seeds: seed_list(args.model.seed, args.seeds),
        output_path: args.out.clone(),
        workers,
        options: opts,
    };
    config.validate()?;
    let outcome = run_sweep(&config)?;
    eprintln!(
        "{}: {} new rows ({} failed), {} total",
        args.out.display(),
        outcome.new_rows,
        outcome.failed_rows,
        outcome.records.len()
    );
    print_summary(&outcome.records);
    Ok(())
}

fn heatmap(args: HeatmapArgs) -> Result<()> {
    let x: Axis = args.x.parse()?;
    let y: Axis = args.y.parse()?;
    let reducer = reducer_by_name(&args.reduce)?;
    let records = read_records(&args.input)?;
    let grid = emit_heatmap(&records, x, y, reducer.as_ref())?;
    let write_to = |path: &Path, f: &dyn Fn(&mut dyn Write) -> io::Result<()>| -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
    };
    match &args.out {
        Some(path) => write_to(path, &|w| grid.write_csv(w))?,
        None => grid
            .write_csv(&mut io::stdout().lock())
            .map_err(|e| Error::io("<stdout>", e))?,
    }
    if let Some(path) = &args.gnuplot {
        write_to(path, &|w| grid.write_gnuplot(w))?;
    }
    Ok(())
}
