//! `attrnoise`: verification, risk surfaces, corruption, fitting and experiments.
//!
//! Exit status is 0 on success, 1 when a verification check fails and 2 for
//! usage or input errors.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use attrnoise::experiment::{emit_results, emit_trials, run_experiment, write_results, ExperimentConfig};
use attrnoise::ingest::{read_dataset_csv, save_dataset_csv, DatasetId};
use attrnoise::noise::corrupt_sample;
use attrnoise::risk::evaluate_sample;
use attrnoise::solvers::{emit_risk_surface, fit_squared_sample, grid_minimize_zero_one, GridSpec, Parameterization};
use attrnoise::verify::{
    example_one_population, run_checks, square_population, three_point_population, Check, REFERENCE_SQUARE_CASES,
    SQUARE_NOISE, SQUARE_WEIGHTS,
};
use attrnoise::{corrupt_population, NoiseSpec, PopulationDistribution};

#[derive(Parser)]
#[command(name = "attrnoise", version, about = "Attribute-noise robustness of linear classifiers on ±1 data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Re-derive the worked examples and robustness results.
    Verify {
        #[arg(value_enum, default_value = "all")]
        which: Which,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a 0-1 risk surface over the (b, c) grid as CSV.
    Surface {
        /// 1-4 (weighted square labelings), example1 or additional.
        #[arg(long)]
        case: String,
        #[arg(long, value_enum)]
        which: Side,
        /// lo,hi,step applied to both axes.
        #[arg(long, default_value = "-5,5,0.1", allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Corrupt the attributes of a label-first ±1 CSV.
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
        /// One rate for syde, one per attribute (comma separated) for asyin.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Least-squares fit of a label-first ±1 CSV.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        intercept: bool,
    },
    /// Repeated split / corrupt / fit / evaluate trials on a UCI dataset.
    Experiment {
        #[arg(long)]
        dataset: DatasetId,
        #[arg(long, default_value = "data/uci")]
        data_dir: PathBuf,
        #[arg(long, default_value = "0,0.1,0.2,0.3,0.35,0.4")]
        p_list: String,
        #[arg(long, default_value_t = 15)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.8)]
        train_fraction: f64,
        #[arg(long)]
        intercept: bool,
        /// Skip the row for a classifier fit on all clean data.
        #[arg(long)]
        no_baseline: bool,
        /// Aggregate CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-trial CSV.
        #[arg(long)]
        trials_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    All,
    Example1,
    Example2,
    Theorem1,
    Theorem2,
    Additional,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Clean,
    Noisy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Syde,
    Asyin,
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("not a number: '{t}'")))
        .collect()
}

fn parse_grid(s: &str) -> Result<GridSpec> {
    match parse_floats(s)?.as_slice() {
        &[lo, hi, step] => Ok(GridSpec::square(lo, hi, step)?),
        _ => bail!("--grid expects lo,hi,step"),
    }
}

fn verify(which: Which, seed: u64, out: Option<PathBuf>) -> Result<ExitCode> {
    let check = match which {
        Which::All => Check::All,
        Which::Example1 => Check::ExampleOne,
        Which::Example2 => Check::ExampleTwo,
        Which::Theorem1 => Check::Theorem1,
        Which::Theorem2 => Check::Theorem2,
        Which::Additional => Check::Additional,
    };
    let report = run_checks(check, seed)?;
    match out {
        Some(path) => report.emit(&path)?,
        None => report.write_csv(&mut io::stdout().lock())?,
    }
    let failed = report.failures().count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", report.checks.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn surface(case: &str, side: Side, grid: &str, out: PathBuf) -> Result<ExitCode> {
    let grid = parse_grid(grid)?;
    let two = |p1: f64, p2: f64| NoiseSpec::asy_in(vec![p1, p2]);
    let (d, spec, param): (PopulationDistribution, NoiseSpec, Parameterization) = match case {
        "example1" => (example_one_population(), NoiseSpec::sy_de(0.4)?, Parameterization::Line),
        "additional" => (three_point_population(), two(SQUARE_NOISE.0, SQUARE_NOISE.1)?, Parameterization::UnitSecondWeight),
        k => {
            let idx: usize = k.parse().ok().filter(|i| (1..=4).contains(i)).with_context(|| {
                format!("unknown case '{k}'; expected 1-4, example1 or additional")
            })?;
            let labels = REFERENCE_SQUARE_CASES[idx - 1].0;
            (
                square_population(SQUARE_WEIGHTS, labels)?,
                two(SQUARE_NOISE.0, SQUARE_NOISE.1)?,
                Parameterization::UnitSecondWeight,
            )
        }
    };
    let target = match side {
        Side::Clean => d,
        Side::Noisy => corrupt_population(&d, &spec)?,
    };
    let s = grid_minimize_zero_one(&target, &grid, param)?;
    emit_risk_surface(&s, &out)?;
    println!("min risk {}; {} grid minimizers", s.min_risk, s.minimizers.len());
    Ok(ExitCode::SUCCESS)
}

fn corrupt(input: PathBuf, model: Model, p: &str, seed: u64, out: PathBuf) -> Result<ExitCode> {
    let s = read_dataset_csv(&input).with_context(|| format!("reading {}", input.display()))?;
    let rates = parse_floats(p)?;
    let spec = match model {
        Model::Syde => match rates.as_slice() {
            &[p] => NoiseSpec::sy_de(p)?,
            _ => bail!("syde takes a single rate"),
        },
        Model::Asyin => NoiseSpec::asy_in(rates)?,
    };
    save_dataset_csv(&corrupt_sample(&s, &spec, seed)?, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn fit(input: PathBuf, intercept: bool) -> Result<ExitCode> {
    let s = read_dataset_csv(&input).with_context(|| format!("reading {}", input.display()))?;
    let fit = fit_squared_sample(&s, intercept)?;
    let m = evaluate_sample(&s, &fit.classifier)?;
    let mut out = io::stdout().lock();
    let beta: Vec<String> = fit.classifier.weights().iter().map(|b| b.to_string()).collect();
    writeln!(out, "beta={}", beta.join(","))?;
    writeln!(out, "c={}", fit.classifier.intercept())?;
    writeln!(out, "train_accuracy={}", m.accuracy)?;
    writeln!(out, "train_am={}{}", m.am, if m.am_fallback { " (one class absent)" } else { "" })?;
    if fit.regularized {
        writeln!(out, "note=moment matrix singular; ridge added")?;
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    dataset: DatasetId,
    data_dir: PathBuf,
    p_list: &str,
    trials: usize,
    seed: u64,
    train_fraction: f64,
    intercept: bool,
    baseline: bool,
    out: Option<PathBuf>,
    trials_out: Option<PathBuf>,
) -> Result<ExitCode> {
    let s = dataset.load(&data_dir).with_context(|| format!("loading {dataset} from {}", data_dir.display()))?;
    let cfg = ExperimentConfig {
        noise_rates: parse_floats(p_list)?,
        trials,
        train_fraction,
        base_seed: seed,
        intercept,
        baseline,
        ..ExperimentConfig::new(dataset.name())
    };
    let res = run_experiment(&s, &cfg)?;
    match out {
        Some(path) => emit_results(&res.rows, &path)?,
        None => write_results(&res.rows, &mut io::stdout().lock())?,
    }
    if let Some(path) = trials_out {
        emit_trials(&res.trials, &path)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { which, seed, out } => verify(which, seed, out),
        Command::Surface { case, which, grid, out } => surface(&case, which, &grid, out),
        Command::Corrupt { input, model, p, seed, out } => corrupt(input, model, &p, seed, out),
        Command::Fit { input, intercept } => fit(input, intercept),
        Command::Experiment {
            dataset,
            data_dir,
            p_list,
            trials,
            seed,
            train_fraction,
            intercept,
            no_baseline,
            out,
            trials_out,
        } => experiment(dataset, data_dir, &p_list, trials, seed, train_fraction, intercept, !no_baseline, out, trials_out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
