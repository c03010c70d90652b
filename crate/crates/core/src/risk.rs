//! Risk functionals and evaluation metrics.
//!
//! The 0-1 loss counts a zero decision value as an error for either label
//! (`f(x) y <= 0`). Example-level risks in this crate depend on that choice:
//! the origin-passing fit `(0.5, 0.5)` has zero margin on two atoms.

use crate::error::{Error, Result};
use crate::types::{LinearClassifier, NoiseSpec, PopulationDistribution, RiskReport, SampleDataset};

/// Default tolerance for comparing exact population risks.
pub const DEFAULT_ROBUSTNESS_TOL: f64 = 1e-9;

pub fn zero_one_risk(d: &PopulationDistribution, f: &LinearClassifier) -> Result<f64> {
    f.check_dim(d.dim())?;
    Ok(d.atoms()
        .iter()
        .filter(|a| f.errs_on(&a.point))
        .map(|a| a.weight)
        // An empty sum is -0.0; adding 0.0 prints it as 0.
        .sum::<f64>()
        + 0.0)
}

/// `E[(y - f(x))^2]`.
pub fn squared_risk(d: &PopulationDistribution, f: &LinearClassifier) -> Result<f64> {
    f.check_dim(d.dim())?;
    Ok(d.atoms()
        .iter()
        .map(|a| {
            let r = f64::from(a.point.label()) - f.decision(a.point.features());
            a.weight * r * r
        })
        .sum())
}

/// Gradient of [`squared_risk`] with respect to `(beta, c)`; the last entry is
/// the intercept derivative and is present only for affine classifiers.
pub fn squared_risk_gradient(d: &PopulationDistribution, f: &LinearClassifier) -> Result<Vec<f64>> {
    f.check_dim(d.dim())?;
    let n = d.dim();
    let mut grad = vec![0.0; n + usize::from(!f.is_origin_passing())];
    for a in d.atoms() {
        let x = a.point.features();
        let r = f64::from(a.point.label()) - f.decision(x);
        for j in 0..n {
            grad[j] -= 2.0 * a.weight * r * f64::from(x[j]);
        }
        if !f.is_origin_passing() {
            grad[n] -= 2.0 * a.weight * r;
        }
    }
    Ok(grad)
}

/// Confusion counts with accuracy and AM (mean of TPR and TNR).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub accuracy: f64,
    pub am: f64,
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
    /// One class was absent, so `am` is the recall of the class that was present.
    pub am_fallback: bool,
}

impl TrialMetrics {
    pub fn from_counts(tp: usize, tn: usize, fp: usize, fn_: usize) -> Self {
        let total = tp + tn + fp + fn_;
        let accuracy = if total == 0 { 0.0 } else { (tp + tn) as f64 / total as f64 };
        let pos = tp + fn_;
        let neg = tn + fp;
        let tpr = (pos > 0).then(|| tp as f64 / pos as f64);
        let tnr = (neg > 0).then(|| tn as f64 / neg as f64);
        let (am, am_fallback) = match (tpr, tnr) {
            (Some(a), Some(b)) => ((a + b) / 2.0, false),
            (Some(a), None) | (None, Some(a)) => (a, true),
            (None, None) => (0.0, true),
        };
        Self { accuracy, am, tp, tn, fp, fn_, am_fallback }
    }
}

/// Classifies every point of `s`; zero decision values are errors.
pub fn evaluate_sample(s: &SampleDataset, f: &LinearClassifier) -> Result<TrialMetrics> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    f.check_dim(s.dim())?;
    let (mut tp, mut tn, mut fp, mut fn_) = (0, 0, 0, 0);
    for p in s.points() {
        match (p.label() == 1, f.errs_on(p)) {
            (true, false) => tp += 1,
            (true, true) => fn_ += 1,
            (false, false) => tn += 1,
            (false, true) => fp += 1,
        }
    }
    Ok(TrialMetrics::from_counts(tp, tn, fp, fn_))
}

/// Clean 0-1 risks of a clean-trained and a noise-trained classifier, and
/// whether they agree within `tolerance`.
pub fn robustness_check(
    d: &PopulationDistribution,
    spec: &NoiseSpec,
    clean_opt: &LinearClassifier,
    noisy_opt: &LinearClassifier,
    tolerance: f64,
) -> Result<RiskReport> {
    spec.check_dim(d.dim())?;
    let clean = zero_one_risk(d, clean_opt)?;
    let noisy = zero_one_risk(d, noisy_opt)?;
    Ok(RiskReport {
        clean_risk_of_clean_opt: clean,
        clean_risk_of_noisy_opt: noisy,
        robust: (clean - noisy).abs() <= tolerance,
        clean_optimizer: clean_opt.clone(),
        noisy_optimizer: noisy_opt.clone(),
    })
}
