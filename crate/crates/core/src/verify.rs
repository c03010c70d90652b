//! Reproduction checks for the worked examples and robustness theorems.
//!
//! Every check compares the clean risk of a clean-data optimum against the
//! clean risk of a noisy-data optimum. When an optimizer returns a set (grid
//! search), the noisy side is represented by its member with the lowest clean
//! risk, so a reported failure means no noisy optimum is robust.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::corrupt_population;
use crate::risk::{robustness_check, zero_one_risk, DEFAULT_ROBUSTNESS_TOL};
use crate::solvers::{
    exact_minimize_zero_one_1d, exact_minimize_zero_one_2d, fit_squared_population, grid_minimize_zero_one,
    GridSpec, Parameterization, RiskSurface, SeparatorFamily, SquaredFit,
};
use crate::types::{LinearClassifier, NoiseSpec, PopulationDistribution, RiskReport};

/// Componentwise tolerance for the noisy squared fit against `(1 - 2p)` times the clean fit.
pub const SCALING_TOL: f64 = 1e-9;
/// Tolerance on closed-form fits compared with hand-derived values.
pub const FIT_TOL: f64 = 1e-12;

/// Feature points of the four-point square, in the order weights are given.
pub const SQUARE_POINTS: [[i8; 2]; 4] = [[1, 1], [1, -1], [-1, -1], [-1, 1]];
pub const SQUARE_WEIGHTS: [f64; 4] = [0.25, 0.33, 0.39, 0.03];
pub const SQUARE_NOISE: (f64, f64) = (0.12, 0.23);

/// The four worked labelings of the square with the `(b1, c)` point reported
/// to minimize both the clean and the noisy risk.
pub const REFERENCE_SQUARE_CASES: [([i8; 4], (f64, f64)); 4] = [
    ([1, -1, 1, -1], (-4.0, 4.0)),
    ([1, -1, -1, 1], (4.0, -4.0)),
    ([1, -1, -1, -1], (4.0, -4.0)),
    ([-1, -1, -1, -1], (0.0, -3.9)),
];

pub fn example_one_population() -> PopulationDistribution {
    PopulationDistribution::new(vec![(vec![-1], 1, 0.25), (vec![1], -1, 0.75)]).expect("valid population")
}

pub fn example_two_population() -> PopulationDistribution {
    PopulationDistribution::new(vec![
        (vec![-1, 1], 1, 0.25),
        (vec![-1, -1], -1, 0.5),
        (vec![1, -1], 1, 0.25),
    ])
    .expect("valid population")
}

/// Uniform three-point population with a single positive point at `(1, 1)`.
pub fn three_point_population() -> PopulationDistribution {
    PopulationDistribution::new(vec![
        (vec![1, 1], 1, 1.0 / 3.0),
        (vec![1, -1], -1, 1.0 / 3.0),
        (vec![-1, -1], -1, 1.0 / 3.0),
    ])
    .expect("valid population")
}

pub fn square_population(weights: [f64; 4], labels: [i8; 4]) -> Result<PopulationDistribution> {
    PopulationDistribution::new((0..4).map(|i| (SQUARE_POINTS[i].to_vec(), labels[i], weights[i])))
}

/// The `k`-th of the 16 labelings: `+1` before `-1`, first point slowest.
pub fn square_labeling(k: usize) -> [i8; 4] {
    std::array::from_fn(|i| if (k >> (3 - i)) & 1 == 0 { 1 } else { -1 })
}

fn fmt_labels(labels: &[i8]) -> String {
    labels.iter().map(|&y| if y > 0 { '+' } else { '-' }).collect()
}

/// Clean and noisy 0-1 optima of one population over a grid family, with the
/// exact oracle's minima alongside.
#[derive(Debug, Clone)]
pub struct ZeroOneComparison {
    pub report: RiskReport,
    pub clean_surface: RiskSurface,
    pub noisy_surface: RiskSurface,
    pub oracle_clean_min: f64,
    pub oracle_noisy_min: f64,
    /// Highest clean risk among the noisy grid minimizers.
    pub worst_clean_risk_of_noisy_opt: f64,
}

impl ZeroOneComparison {
    /// Grid and oracle agree on both minima.
    pub fn oracle_agrees(&self) -> bool {
        self.clean_surface.min_risk == self.oracle_clean_min && self.noisy_surface.min_risk == self.oracle_noisy_min
    }
}

pub fn compare_zero_one(
    d: &PopulationDistribution,
    spec: &NoiseSpec,
    grid: &GridSpec,
    parameterization: Parameterization,
) -> Result<ZeroOneComparison> {
    let noisy = corrupt_population(d, spec)?;
    let clean_surface = grid_minimize_zero_one(d, grid, parameterization)?;
    let noisy_surface = grid_minimize_zero_one(&noisy, grid, parameterization)?;
    let oracle = |pop: &PopulationDistribution| -> Result<f64> {
        Ok(match parameterization {
            Parameterization::Line => exact_minimize_zero_one_1d(pop)?.risk,
            Parameterization::UnitSecondWeight => {
                exact_minimize_zero_one_2d(pop, SeparatorFamily::UnitSecondWeight)?.risk
            }
        })
    };

    let clean_opt = clean_surface.minimizer_classifiers().next().ok_or(Error::NoMinimizers)?;
    let mut ranked: Vec<(f64, LinearClassifier)> = noisy_surface
        .minimizer_classifiers()
        .map(|f| zero_one_risk(d, &f).map(|r| (r, f)))
        .collect::<Result<_>>()?;
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let worst = ranked.last().ok_or(Error::NoMinimizers)?.0;
    let noisy_opt = ranked.swap_remove(0).1;

    Ok(ZeroOneComparison {
        report: robustness_check(d, spec, &clean_opt, &noisy_opt, DEFAULT_ROBUSTNESS_TOL)?,
        oracle_clean_min: oracle(d)?,
        oracle_noisy_min: oracle(&noisy)?,
        clean_surface,
        noisy_surface,
        worst_clean_risk_of_noisy_opt: worst,
    })
}

/// One attribute, Sy-De noise, 0-1 loss with `b x + c`.
pub fn verify_example_one(p: f64) -> Result<ZeroOneComparison> {
    compare_zero_one(&example_one_population(), &NoiseSpec::sy_de(p)?, &GridSpec::default(), Parameterization::Line)
}

#[derive(Debug, Clone)]
pub struct SquaredComparison {
    pub clean_fit: SquaredFit,
    pub noisy_fit: SquaredFit,
    pub report: RiskReport,
}

/// Origin-passing squared-loss fits under Asy-In noise.
pub fn verify_example_two(p1: f64, p2: f64) -> Result<SquaredComparison> {
    let d = example_two_population();
    let spec = NoiseSpec::asy_in(vec![p1, p2])?;
    let clean_fit = fit_squared_population(&d)?;
    let noisy_fit = fit_squared_population(&corrupt_population(&d, &spec)?)?;
    let report = robustness_check(&d, &spec, &clean_fit.classifier, &noisy_fit.classifier, DEFAULT_ROBUSTNESS_TOL)?;
    Ok(SquaredComparison { clean_fit, noisy_fit, report })
}

/// One random population that breaks the Sy-De squared-loss scaling, kept verbatim.
#[derive(Debug, Clone)]
pub struct ScalingFailure {
    pub index: usize,
    pub population: PopulationDistribution,
    pub p: f64,
    pub clean_beta: Vec<f64>,
    pub noisy_beta: Vec<f64>,
    pub max_scaling_error: f64,
    pub clean_risks: (f64, f64),
}

#[derive(Debug, Clone, Default)]
pub struct Theorem1Report {
    pub checked: usize,
    /// Draws whose moment matrix was singular; they are replaced by fresh draws.
    pub singular_redraws: usize,
    pub max_scaling_error: f64,
    pub failures: Vec<ScalingFailure>,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A random population on `{-1, 1}^n`: between `n` and `3n + 2` atoms with
/// random labels and weights.
pub fn random_population<R: Rng>(rng: &mut R, n: usize) -> PopulationDistribution {
    loop {
        let k = rng.random_range(n..=3 * n + 2);
        let atoms: Vec<(Vec<i8>, i8, f64)> = (0..k)
            .map(|_| {
                let x = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
                let y = if rng.random_bool(0.5) { 1 } else { -1 };
                (x, y, rng.random_range(0.01..1.0))
            })
            .collect();
        if let Ok(d) = PopulationDistribution::new(atoms) {
            return d;
        }
    }
}

/// Squared loss with origin-passing classifiers under Sy-De noise: the noisy
/// fit is `(1 - 2p)` times the clean fit and has the same clean 0-1 risk.
pub fn verify_theorem1(num_populations: usize, max_n: usize, seed: u64) -> Result<Theorem1Report> {
    if max_n == 0 || max_n > 10 {
        return Err(Error::Config(format!("max_n must be in 1..=10, got {max_n}")));
    }
    let mut report = Theorem1Report::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut index = 0;
    while report.checked < num_populations {
        let n = rng.random_range(1..=max_n);
        let d = random_population(&mut rng, n);
        let p = rng.random_range(0.0..0.5);
        index += 1;
        let clean = fit_squared_population(&d)?;
        if clean.regularized {
            report.singular_redraws += 1;
            continue;
        }
        let noisy = fit_squared_population(&corrupt_population(&d, &NoiseSpec::sy_de(p)?)?)?;
        let err = clean
            .classifier
            .weights()
            .iter()
            .zip(noisy.classifier.weights())
            .map(|(b, nb)| ((1.0 - 2.0 * p) * b - nb).abs())
            .fold(0.0, f64::max);
        let risks = (zero_one_risk(&d, &clean.classifier)?, zero_one_risk(&d, &noisy.classifier)?);
        report.checked += 1;
        report.max_scaling_error = report.max_scaling_error.max(err);
        if err > SCALING_TOL || risks.0 != risks.1 {
            report.failures.push(ScalingFailure {
                index: index - 1,
                population: d,
                p,
                clean_beta: clean.classifier.weights().to_vec(),
                noisy_beta: noisy.classifier.weights().to_vec(),
                max_scaling_error: err,
                clean_risks: risks,
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct LabelingOutcome {
    pub labels: [i8; 4],
    pub clean_min: f64,
    pub noisy_min: f64,
    pub clean_risk_of_noisy_opt: f64,
    pub worst_clean_risk_of_noisy_opt: f64,
    pub robust: bool,
    /// Some grid point minimizes both the clean and the noisy risk.
    pub shared_minimizer: bool,
    pub oracle_agrees: bool,
}

impl LabelingOutcome {
    fn from_comparison(labels: [i8; 4], c: &ZeroOneComparison) -> Self {
        let shared = c.clean_surface.minimizer_params().any(|(b, cc)| c.noisy_surface.has_minimizer(b, cc));
        Self {
            labels,
            clean_min: c.clean_surface.min_risk,
            noisy_min: c.noisy_surface.min_risk,
            clean_risk_of_noisy_opt: c.report.clean_risk_of_noisy_opt,
            worst_clean_risk_of_noisy_opt: c.worst_clean_risk_of_noisy_opt,
            robust: c.report.robust,
            shared_minimizer: shared,
            oracle_agrees: c.oracle_agrees(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Theorem2Report {
    pub weights: [f64; 4],
    pub p: (f64, f64),
    pub labelings: Vec<LabelingOutcome>,
}

impl Theorem2Report {
    pub fn all_robust(&self) -> bool {
        self.labelings.iter().all(|l| l.robust)
    }

    pub fn failing(&self) -> impl Iterator<Item = &LabelingOutcome> {
        self.labelings.iter().filter(|l| !l.robust)
    }
}

/// 0-1 loss with `b1 x1 + x2 + c` under Asy-In noise, for all 16 labelings of
/// the square with the given weights.
pub fn verify_theorem2(weights: [f64; 4], p1: f64, p2: f64, grid: &GridSpec) -> Result<Theorem2Report> {
    let spec = NoiseSpec::asy_in(vec![p1, p2])?;
    if !spec.is_below_half() {
        return Err(Error::Config(format!("noise rates must be below 0.5, got ({p1}, {p2})")));
    }
    let labelings = (0..16)
        .into_par_iter()
        .map(|k| {
            let labels = square_labeling(k);
            let d = square_population(weights, labels)?;
            let c = compare_zero_one(&d, &spec, grid, Parameterization::UnitSecondWeight)?;
            Ok(LabelingOutcome::from_comparison(labels, &c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Theorem2Report { weights, p: (p1, p2), labelings })
}

/// Whether the reference `(b1, c)` is a clean and a noisy grid minimizer.
#[derive(Debug, Clone)]
pub struct ReferenceCase {
    pub case: usize,
    pub labels: [i8; 4],
    pub point: (f64, f64),
    pub in_clean_set: bool,
    pub in_noisy_set: bool,
    pub clean_risk: f64,
    pub clean_min: f64,
}

pub fn verify_reference_square_cases(grid: &GridSpec) -> Result<Vec<ReferenceCase>> {
    let spec = NoiseSpec::asy_in(vec![SQUARE_NOISE.0, SQUARE_NOISE.1])?;
    REFERENCE_SQUARE_CASES
        .iter()
        .enumerate()
        .map(|(i, &(labels, (b, c)))| {
            let d = square_population(SQUARE_WEIGHTS, labels)?;
            let cmp = compare_zero_one(&d, &spec, grid, Parameterization::UnitSecondWeight)?;
            Ok(ReferenceCase {
                case: i + 1,
                labels,
                point: (b, c),
                in_clean_set: cmp.clean_surface.has_minimizer(b, c),
                in_noisy_set: cmp.noisy_surface.has_minimizer(b, c),
                clean_risk: zero_one_risk(&d, &Parameterization::UnitSecondWeight.classifier(b, c))?,
                clean_min: cmp.clean_surface.min_risk,
            })
        })
        .collect()
}

/// Random weights on the square and random rates below one half.
pub fn random_square_draw<R: Rng>(rng: &mut R) -> ([f64; 4], f64, f64) {
    let raw: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.01..1.0));
    let total: f64 = raw.iter().sum();
    let weights = raw.map(|w| w / total);
    (weights, rng.random_range(0.0..0.5), rng.random_range(0.0..0.5))
}

pub fn verify_theorem2_random(draws: usize, seed: u64, grid: &GridSpec) -> Result<Vec<Theorem2Report>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<_> = (0..draws).map(|_| random_square_draw(&mut rng)).collect();
    params.into_iter().map(|(w, p1, p2)| verify_theorem2(w, p1, p2, grid)).collect()
}

#[derive(Debug, Clone)]
pub struct ThreePointOutcome {
    pub comparison: ZeroOneComparison,
    /// Clean risk of `x1 / 3 + x2 + 1 / 3`, which lies between grid points.
    pub third_point_risk: f64,
    pub noisy_point_in_set: bool,
    pub noisy_point_clean_risk: f64,
}

/// The uniform three-point population under Asy-In noise.
pub fn verify_additional_example(p1: f64, p2: f64, grid: &GridSpec) -> Result<ThreePointOutcome> {
    let d = three_point_population();
    let comparison =
        compare_zero_one(&d, &NoiseSpec::asy_in(vec![p1, p2])?, grid, Parameterization::UnitSecondWeight)?;
    let third = Parameterization::UnitSecondWeight.classifier(1.0 / 3.0, 1.0 / 3.0);
    let noisy_point = Parameterization::UnitSecondWeight.classifier(3.0, -3.0);
    Ok(ThreePointOutcome {
        third_point_risk: zero_one_risk(&d, &third)?,
        noisy_point_in_set: comparison.noisy_surface.has_minimizer(3.0, -3.0),
        noisy_point_clean_risk: zero_one_risk(&d, &noisy_point)?,
        comparison,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: String,
    pub passed: bool,
    pub clean_risk_clean_opt: Option<f64>,
    pub clean_risk_noisy_opt: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    fn new(id: impl Into<String>, passed: bool, risks: Option<(f64, f64)>, detail: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            passed,
            clean_risk_clean_opt: risks.map(|r| r.0),
            clean_risk_noisy_opt: risks.map(|r| r.1),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "check_id,status,clean_risk_clean_opt,clean_risk_noisy_opt,detail")?;
        let num = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        for c in &self.checks {
            writeln!(
                out,
                "{},{},{},{},{}",
                c.id,
                if c.passed { "pass" } else { "fail" },
                num(c.clean_risk_clean_opt),
                num(c.clean_risk_noisy_opt),
                c.detail.replace(',', ";"),
            )?;
        }
        Ok(())
    }

    pub fn emit(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_csv(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

/// Which verification to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    All,
    ExampleOne,
    ExampleTwo,
    Theorem1,
    Theorem2,
    Additional,
}

pub const THEOREM1_POPULATIONS: usize = 1000;
pub const THEOREM1_MAX_DIM: usize = 10;
pub const THEOREM2_RANDOM_DRAWS: usize = 50;

pub fn check_example_one() -> Result<Vec<CheckResult>> {
    let c = verify_example_one(0.4)?;
    let r = &c.report;
    let ok = r.clean_risk_of_clean_opt == 0.0 && r.clean_risk_of_noisy_opt == 0.25 && !r.robust && c.oracle_agrees();
    let detail = format!(
        "p=0.4; clean opt {}; noisy opt {}; oracle minima {}/{}; expected non-robust",
        r.clean_optimizer, r.noisy_optimizer, c.oracle_clean_min, c.oracle_noisy_min
    );
    Ok(vec![CheckResult::new(
        "example1",
        ok,
        Some((r.clean_risk_of_clean_opt, r.clean_risk_of_noisy_opt)),
        detail,
    )])
}

pub fn check_example_two() -> Result<Vec<CheckResult>> {
    let c = verify_example_two(0.1, 0.2)?;
    let close = |f: &SquaredFit, want: [f64; 2]| f.classifier.weights().iter().zip(want).all(|(a, b)| (a - b).abs() <= FIT_TOL);
    let r = &c.report;
    let ok = close(&c.clean_fit, [0.5, 0.5])
        && close(&c.noisy_fit, [0.4, 0.3])
        && r.clean_risk_of_clean_opt == 0.5
        && r.clean_risk_of_noisy_opt == 0.25
        && !r.robust;
    let detail = format!(
        "p=(0.1 0.2); clean fit {}; noisy fit {}; expected non-robust",
        c.clean_fit.classifier, c.noisy_fit.classifier
    );
    Ok(vec![CheckResult::new(
        "example2",
        ok,
        Some((r.clean_risk_of_clean_opt, r.clean_risk_of_noisy_opt)),
        detail,
    )])
}

pub fn check_theorem1(seed: u64) -> Result<Vec<CheckResult>> {
    let r = verify_theorem1(THEOREM1_POPULATIONS, THEOREM1_MAX_DIM, seed)?;
    let mut detail = format!(
        "{} populations; {} singular redraws; max scaling error {:.3e}",
        r.checked, r.singular_redraws, r.max_scaling_error
    );
    if let Some(f) = r.failures.first() {
        detail.push_str(&format!(
            "; first failure #{} p={} clean beta {:?} noisy beta {:?} risks {:?}",
            f.index, f.p, f.clean_beta, f.noisy_beta, f.clean_risks
        ));
    }
    Ok(vec![CheckResult::new("theorem1", r.passed(), None, detail)])
}

pub fn check_theorem2(seed: u64) -> Result<Vec<CheckResult>> {
    let grid = GridSpec::default();
    let mut out = Vec::new();
    let fixed = verify_theorem2(SQUARE_WEIGHTS, SQUARE_NOISE.0, SQUARE_NOISE.1, &grid)?;
    for l in &fixed.labelings {
        out.push(CheckResult::new(
            format!("theorem2.labeling.{}", fmt_labels(&l.labels)),
            l.robust,
            Some((l.clean_min, l.clean_risk_of_noisy_opt)),
            format!(
                "noisy min {}; shared minimizer {}; oracle agrees {}",
                l.noisy_min, l.shared_minimizer, l.oracle_agrees
            ),
        ));
    }
    for case in verify_reference_square_cases(&grid)? {
        out.push(CheckResult::new(
            format!("theorem2.case{}", case.case),
            case.in_clean_set && case.in_noisy_set,
            Some((case.clean_min, case.clean_risk)),
            format!(
                "labels {}; point ({} {}); in clean set {}; in noisy set {}",
                fmt_labels(&case.labels),
                case.point.0,
                case.point.1,
                case.in_clean_set,
                case.in_noisy_set
            ),
        ));
    }
    let random = verify_theorem2_random(THEOREM2_RANDOM_DRAWS, seed, &grid)?;
    let bad: Vec<&Theorem2Report> = random.iter().filter(|r| !r.all_robust()).collect();
    let mut detail = format!("{} of {} random draws have a non-robust labeling", bad.len(), random.len());
    if let Some(r) = bad.first() {
        let l = r.failing().next().expect("failing labeling");
        detail.push_str(&format!(
            "; first: weights {:?} p {:?} labels {} clean min {} best noisy-opt clean risk {}",
            r.weights,
            r.p,
            fmt_labels(&l.labels),
            l.clean_min,
            l.clean_risk_of_noisy_opt
        ));
    }
    out.push(CheckResult::new("theorem2.random", bad.is_empty(), None, detail));
    Ok(out)
}

pub fn check_additional() -> Result<Vec<CheckResult>> {
    let o = verify_additional_example(SQUARE_NOISE.0, SQUARE_NOISE.1, &GridSpec::default())?;
    let clean_min = o.comparison.clean_surface.min_risk;
    let ok = clean_min == 0.0
        && o.third_point_risk == clean_min
        && o.noisy_point_in_set
        && o.noisy_point_clean_risk == 0.0
        && o.comparison.report.robust;
    let detail = format!(
        "risk at (1/3 1/3) {}; (3 -3) in noisy set {}; noisy min {}",
        o.third_point_risk, o.noisy_point_in_set, o.comparison.noisy_surface.min_risk
    );
    Ok(vec![CheckResult::new(
        "additional",
        ok,
        Some((clean_min, o.noisy_point_clean_risk)),
        detail,
    )])
}

pub fn run_checks(which: Check, seed: u64) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    let all = which == Check::All;
    if all || which == Check::ExampleOne {
        checks.extend(check_example_one()?);
    }
    if all || which == Check::ExampleTwo {
        checks.extend(check_example_two()?);
    }
    if all || which == Check::Theorem1 {
        checks.extend(check_theorem1(seed)?);
    }
    if all || which == Check::Theorem2 {
        checks.extend(check_theorem2(seed)?);
    }
    if all || which == Check::Additional {
        checks.extend(check_additional()?);
    }
    Ok(VerificationReport { checks })
}

pub fn run_all(seed: u64) -> Result<VerificationReport> {
    run_checks(Check::All, seed)
}
