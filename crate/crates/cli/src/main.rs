use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mtsforecast::dataset::{load_csv, slice_window, write_csv, CsvSchema, DatasetError, Recipe, ScalingTransform, SeriesMatrix};
use mtsforecast::forecasters::{ModelFamily, ModelSpec};
use mtsforecast::harness::{run_benchmark, BenchmarkReport, ExperimentConfig, HarnessError};
use mtsforecast::rolling_cv::{grid_search, FoldPlan, HyperGrid, Scheme, SearchOptions, SplitConfig, StackMode};
use mtsforecast::{Execution, RowsView};

/// Single-step forecasting benchmark for many short time series.
#[derive(Debug, Parser)]
#[command(name = "mtsf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a wide CSV dataset from a preparation recipe.
    Prepare {
        #[arg(long)]
        recipe: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the rolling-window fold plan of a scheme.
    Plan {
        #[arg(long)]
        scheme: Scheme,
        /// Total rows L.
        #[arg(long = "rows")]
        total: usize,
        /// Training rows L_tr.
        #[arg(long = "train")]
        train: usize,
        /// Inner window S (multi-dim-window and matrix-list).
        #[arg(long)]
        inner: Option<usize>,
        #[arg(long)]
        fixed_stack: bool,
    },
    /// Grid-search one model on one window of a dataset.
    Tune(TuneArgs),
    /// Run a full benchmark from an experiment config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Overrides the config's root seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-render CSV and text reports from a JSON detail file.
    Report {
        #[arg(long)]
        detail: PathBuf,
        /// Write report.csv, report.json and report.txt here instead of
        /// printing the table.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[arg(long, conflicts_with = "csv", required_unless_present = "csv")]
    recipe: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    family: ModelFamily,
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Grid as inline JSON, or `@path` to a JSON file. Defaults to the
    /// family's grid.
    #[arg(long)]
    grid: Option<String>,
    /// 1-based first row of the window.
    #[arg(long, default_value_t = 1)]
    start: usize,
    /// Window length L; defaults to the rest of the dataset.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    per_series: bool,
    #[arg(long)]
    fixed_stack: bool,
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }

    fn io(message: impl ToString) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io { .. } => Failure::io(e),
            _ => Failure::usage(e),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Io { .. } | HarnessError::Dataset(DatasetError::Io { .. }) => Failure::io(e),
            _ => Failure::usage(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Prepare { recipe, out } => {
            let m = Recipe::from_path(&recipe)?.prepare()?;
            write_csv(&m, &out)?;
            println!("{} series × {} rows", m.cols(), m.rows());
            Ok(0)
        }
        Command::Plan {
            scheme,
            total,
            train,
            inner,
            fixed_stack,
        } => {
            let stack = if fixed_stack { StackMode::Fixed } else { StackMode::Rolling };
            let plan = FoldPlan::build(scheme, SplitConfig::new(total, train, inner), stack).map_err(Failure::usage)?;
            print!("{}", plan.dump());
            Ok(0)
        }
        Command::Tune(args) => tune(args),
        Command::Bench {
            config,
            out_dir,
            threads,
            seed,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let base = config.parent().unwrap_or(Path::new("."));
            let report = Execution::with_threads(threads, || run_benchmark(&cfg, base, Execution::Parallel));
            let files = report.write(&out_dir)?;
            print!("{}", report.to_table());
            println!("\nwrote {}, {}, {}", files.csv.display(), files.json.display(), files.table.display());
            let failed = report.failed_cells();
            if failed > 0 {
                eprintln!("{failed} of {} cells failed", report.cells.len());
                return Ok(3);
            }
            Ok(0)
        }
        Command::Report { detail, out_dir } => {
            let text = std::fs::read_to_string(&detail)
                .map_err(|e| Failure::io(format!("cannot read {}: {e}", detail.display())))?;
            let report = BenchmarkReport::from_json(&text)?;
            match out_dir {
                Some(dir) => {
                    let files = report.write(&dir)?;
                    println!("wrote {}, {}, {}", files.csv.display(), files.json.display(), files.table.display());
                }
                None => print!("{}", report.to_table()),
            }
            Ok(0)
        }
    }
}

fn load_dataset(args: &TuneArgs) -> Result<SeriesMatrix, Failure> {
    Ok(match (&args.recipe, &args.csv) {
        (Some(r), _) => Recipe::from_path(r)?.prepare()?,
        (None, Some(c)) => load_csv(c, &CsvSchema::default())?,
        (None, None) => return Err(Failure::usage("one of --recipe or --csv is required")),
    })
}

fn tune(args: TuneArgs) -> Result<u8, Failure> {
    if args.start == 0 {
        return Err(Failure::usage("--start is 1-based"));
    }
    let data = load_dataset(&args)?;
    let length = args.window.unwrap_or(data.rows().saturating_sub(args.start - 1));
    let window = slice_window(&data, args.start, length)?;

    let mut spec = ModelSpec::new(args.family).per_series(args.per_series);
    if let Some(s) = args.scheme {
        spec = spec.with_scheme(s).map_err(Failure::usage)?;
    }
    let grid = match &args.grid {
        None => args.family.default_grid(),
        Some(g) => {
            let text = match g.strip_prefix('@') {
                Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {path}: {e}")))?,
                None => g.clone(),
            };
            serde_json::from_str::<HyperGrid>(&text).map_err(|e| Failure::usage(format!("--grid: {e}")))?
        }
    };

    let scaler = ScalingTransform::fit(window.view());
    let scaled = scaler.apply_rows(window.view()).map_err(Failure::usage)?;
    let view = RowsView::new(&scaled, window.cols());
    let config = SplitConfig::from_fraction(view.rows(), args.train_fraction, None);
    let opts = SearchOptions {
        stack: if args.fixed_stack { StackMode::Fixed } else { StackMode::Rolling },
        seed: args.seed,
        exec: Execution::Parallel,
    };
    let result = grid_search(&spec, &grid, view, config, &opts).map_err(Failure::usage)?;
    println!(
        "{} on rows {}..{} ({} train, {} validation folds, {})",
        args.family,
        args.start,
        args.start + length - 1,
        config.train,
        config.validation(),
        spec.scheme
    );
    for (point, err) in result.points.iter().zip(&result.mean_errors) {
        println!("{err:.6}  {point}");
    }
    println!("best: {} (mean sMAPE {:.6})", result.best(), result.best_error());
    Ok(0)
}
