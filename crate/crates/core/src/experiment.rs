//! Noise-injection experiments on sample datasets.
//!
//! Each trial splits the data, corrupts the training attributes with Sy-De
//! noise, fits least squares and scores the fit on the untouched test part.
//! Trial `t` uses seed `base + t` for every noise rate, so all rates see the
//! same splits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::corrupt_sample;
use crate::risk::{evaluate_sample, TrialMetrics};
use crate::solvers::fit_squared_sample;
use crate::types::{LinearClassifier, NoiseSpec, SampleDataset};

pub const DEFAULT_NOISE_RATES: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.35, 0.4];
pub const DEFAULT_TRIALS: usize = 15;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub noise_rates: Vec<f64>,
    pub trials: usize,
    pub train_fraction: f64,
    pub base_seed: u64,
    pub intercept: bool,
    /// Also report a classifier fit on the whole clean dataset.
    pub baseline: bool,
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<String>) -> Self {
        Self {
            dataset: dataset.into(),
            noise_rates: DEFAULT_NOISE_RATES.to_vec(),
            trials: DEFAULT_TRIALS,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            base_seed: 0,
            intercept: false,
            baseline: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!("train fraction {} must be in (0, 1)", self.train_fraction)));
        }
        if self.trials == 0 {
            return Err(Error::Config("at least one trial is needed".into()));
        }
        for &p in &self.noise_rates {
            NoiseSpec::sy_de(p)?;
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

/// Seed for the corruption stream of a trial, decorrelated from its split stream.
pub fn noise_seed(trial_seed: u64) -> u64 {
    let mut z = trial_seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform random split; the first `ceil(fraction * m)` shuffled points train.
pub fn split(s: &SampleDataset, fraction: f64, seed: u64) -> Result<(SampleDataset, SampleDataset)> {
    let m = s.len();
    if m < 2 {
        return Err(Error::Config(format!("cannot split {m} points")));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!("train fraction {fraction} must be in (0, 1)")));
    }
    // The small offset keeps exact products such as 0.8 * 10 from rounding up.
    let k = ((fraction * m as f64) - 1e-9).ceil() as usize;
    if k == 0 || k >= m {
        return Err(Error::Config(format!("fraction {fraction} of {m} points leaves an empty side")));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pick = |ids: &[usize]| s.with_points(ids.iter().map(|&i| s.points()[i].clone()).collect());
    Ok((pick(&idx[..k])?, pick(&idx[k..])?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub classifier: LinearClassifier,
    pub metrics: TrialMetrics,
    pub regularized: bool,
}

/// One split, Sy-De corruption of the training part, fit, clean evaluation.
pub fn run_trial(s: &SampleDataset, p: f64, seed: u64, cfg: &ExperimentConfig) -> Result<TrialOutcome> {
    let (train, test) = split(s, cfg.train_fraction, seed)?;
    let noisy = corrupt_sample(&train, &NoiseSpec::sy_de(p)?, noise_seed(seed))?;
    let fit = fit_squared_sample(&noisy, cfg.intercept)?;
    let metrics = evaluate_sample(&test, &fit.classifier)?;
    Ok(TrialOutcome { classifier: fit.classifier, metrics, regularized: fit.regularized })
}

/// Fit on the whole clean dataset, scored on the test part of the trial's split.
pub fn run_baseline_trial(s: &SampleDataset, seed: u64, cfg: &ExperimentConfig) -> Result<TrialOutcome> {
    let (_, test) = split(s, cfg.train_fraction, seed)?;
    let fit = fit_squared_sample(s, cfg.intercept)?;
    let metrics = evaluate_sample(&test, &fit.classifier)?;
    Ok(TrialOutcome { classifier: fit.classifier, metrics, regularized: fit.regularized })
}

/// `None` marks the clean full-data baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseLevel(pub Option<f64>);

impl std::fmt::Display for NoiseLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(p) => write!(f, "{p}"),
            None => f.write_str("baseline"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub dataset: String,
    pub p: NoiseLevel,
    pub trial: usize,
    pub seed: u64,
    pub outcome: TrialOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub dataset: String,
    pub p: NoiseLevel,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub mean_am: f64,
    pub sd_am: f64,
    /// False with a single trial; the SDs are then reported as 0.
    pub sd_defined: bool,
    /// Trials whose test split lacked a class.
    pub am_fallbacks: usize,
}

/// Mean and sample standard deviation (divisor `len - 1`).
pub fn mean_sd(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some(var.sqrt()))
}

fn aggregate(dataset: &str, p: NoiseLevel, records: &[&TrialRecord]) -> AggregateRow {
    let acc: Vec<f64> = records.iter().map(|r| r.outcome.metrics.accuracy).collect();
    let am: Vec<f64> = records.iter().map(|r| r.outcome.metrics.am).collect();
    let (mean_accuracy, sd_acc) = mean_sd(&acc);
    let (mean_am, sd_am) = mean_sd(&am);
    AggregateRow {
        dataset: dataset.to_string(),
        p,
        mean_accuracy,
        sd_accuracy: sd_acc.unwrap_or(0.0),
        mean_am,
        sd_am: sd_am.unwrap_or(0.0),
        sd_defined: sd_acc.is_some(),
        am_fallbacks: records.iter().filter(|r| r.outcome.metrics.am_fallback).count(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// Baseline first when requested, then one row per noise rate in config order.
    pub rows: Vec<AggregateRow>,
    pub trials: Vec<TrialRecord>,
}

impl ExperimentResult {
    pub fn row(&self, p: f64) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.p.0 == Some(p))
    }
}

pub fn run_experiment(s: &SampleDataset, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut levels: Vec<NoiseLevel> = Vec::new();
    if cfg.baseline {
        levels.push(NoiseLevel(None));
    }
    levels.extend(cfg.noise_rates.iter().map(|&p| NoiseLevel(Some(p))));

    let jobs: Vec<(NoiseLevel, usize)> =
        levels.iter().flat_map(|&l| (0..cfg.trials).map(move |t| (l, t))).collect();
    let trials = jobs
        .into_par_iter()
        .map(|(level, trial)| {
            let seed = cfg.trial_seed(trial);
            let outcome = match level.0 {
                Some(p) => run_trial(s, p, seed, cfg)?,
                None => run_baseline_trial(s, seed, cfg)?,
            };
            Ok(TrialRecord { dataset: cfg.dataset.clone(), p: level, trial, seed, outcome })
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = levels
        .iter()
        .map(|&level| {
            let recs: Vec<&TrialRecord> = trials.iter().filter(|r| r.p == level).collect();
            aggregate(&cfg.dataset, level, &recs)
        })
        .collect();
    Ok(ExperimentResult { rows, trials })
}

pub fn write_results<W: Write>(rows: &[AggregateRow], out: &mut W) -> Result<()> {
    writeln!(out, "dataset,p,mean_acc,sd_acc,mean_am,sd_am")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6}",
            r.dataset, r.p, r.mean_accuracy, r.sd_accuracy, r.mean_am, r.sd_am
        )?;
    }
    Ok(())
}

pub fn write_trials<W: Write>(records: &[TrialRecord], out: &mut W) -> Result<()> {
    writeln!(out, "dataset,p,trial,seed,accuracy,am")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            r.dataset, r.p, r.trial, r.seed, r.outcome.metrics.accuracy, r.outcome.metrics.am
        )?;
    }
    Ok(())
}

pub fn emit_results(rows: &[AggregateRow], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_results(rows, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn emit_trials(records: &[TrialRecord], path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_trials(records, &mut out)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{BinaryPoint, Provenance};

    fn dataset(m: usize) -> SampleDataset {
        // Label follows the first attribute except on every seventh point.
        let points = (0..m)
            .map(|k| {
                let x: Vec<i8> = (0..4).map(|j| if (k * 7 + j * 3) % 5 < 2 { 1 } else { -1 }).collect();
                let y = if k % 7 == 0 { -x[0] } else { x[0] };
                BinaryPoint::new(x, y).unwrap()
            })
            .collect();
        SampleDataset::new(points, Provenance::new("toy", "test")).unwrap()
    }

    #[test]
    fn split_sizes() {
        let (tr, te) = split(&dataset(10), 0.8, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (8, 2));
        let (tr, te) = split(&dataset(232), 0.8, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (186, 46));
    }

    #[test]
    fn split_is_seeded_and_a_partition() {
        let s = dataset(30);
        let a = split(&s, 0.8, 9).unwrap();
        assert_eq!(a, split(&s, 0.8, 9).unwrap());
        assert_ne!(a, split(&s, 0.8, 10).unwrap());
        let mut all: Vec<BinaryPoint> = a.0.points().iter().chain(a.1.points()).cloned().collect();
        let mut orig = s.points().to_vec();
        all.sort();
        orig.sort();
        assert_eq!(all, orig);
    }

    #[test]
    fn split_rejects_degenerate_sizes() {
        assert!(split(&dataset(1), 0.8, 0).is_err());
        assert!(split(&dataset(2), 0.99, 0).is_err());
        assert!(split(&dataset(10), 1.0, 0).is_err());
    }

    #[test]
    fn zero_noise_trial_is_plain_least_squares() {
        let s = dataset(50);
        let cfg = ExperimentConfig::new("toy");
        let t = run_trial(&s, 0.0, 4, &cfg).unwrap();
        let (train, test) = split(&s, 0.8, 4).unwrap();
        let fit = fit_squared_sample(&train, false).unwrap();
        assert_eq!(t.classifier, fit.classifier);
        assert_eq!(t.metrics, evaluate_sample(&test, &fit.classifier).unwrap());
    }

    #[test]
    fn single_trial_has_undefined_sd() {
        let mut cfg = ExperimentConfig::new("toy");
        cfg.noise_rates = vec![0.0];
        cfg.trials = 1;
        cfg.baseline = false;
        let r = run_experiment(&dataset(40), &cfg).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(!r.rows[0].sd_defined);
        assert_eq!(r.rows[0].sd_accuracy, 0.0);
    }

    #[test]
    fn results_are_deterministic_and_rows_match_trials() {
        let s = dataset(80);
        let mut cfg = ExperimentConfig::new("toy");
        cfg.trials = 5;
        let a = run_experiment(&s, &cfg).unwrap();
        let b = run_experiment(&s, &cfg).unwrap();
        let (mut fa, mut fb) = (Vec::new(), Vec::new());
        write_results(&a.rows, &mut fa).unwrap();
        write_results(&b.rows, &mut fb).unwrap();
        assert_eq!(fa, fb);
        let text = String::from_utf8(fa).unwrap();
        assert_eq!(text.lines().count(), 1 + 1 + DEFAULT_NOISE_RATES.len());
        assert!(text.lines().nth(1).unwrap().starts_with("toy,baseline,"));

        for rec in &a.trials {
            if let Some(p) = rec.p.0 {
                let (_, test) = split(&s, cfg.train_fraction, rec.seed).unwrap();
                assert_eq!(evaluate_sample(&test, &rec.outcome.classifier).unwrap(), rec.outcome.metrics, "p={p}");
            }
        }
    }

    #[test]
    fn sample_sd() {
        let (m, sd) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((sd.unwrap() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = ExperimentConfig::new("toy");
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::new("toy");
        cfg.noise_rates = vec![1.5];
        assert!(cfg.validate().is_err());
    }
}
