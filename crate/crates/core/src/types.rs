//! Domain values shared across the crate: signed points, weighted populations,
//! finite samples, noise descriptions and linear classifiers.
//!
//! Everything here is immutable once constructed.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance under which a population's weight sum is treated as already
/// normalized.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Relative width of the band around zero in which a decision value counts as
/// exactly zero. Scaled by `sum |beta_j| + |c|`, which bounds `|beta . x + c|`
/// on the sign lattice.
pub const ZERO_MARGIN_RTOL: f64 = 1e-12;

fn check_sign(v: i8) -> Result<i8> {
    match v {
        -1 | 1 => Ok(v),
        other => Err(Error::NotASign(other as i64)),
    }
}

/// A feature vector in `{-1, +1}^n` together with a `{-1, +1}` label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryPoint {
    features: Vec<i8>,
    label: i8,
}

impl BinaryPoint {
    pub fn new(features: Vec<i8>, label: i8) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for &f in &features {
            check_sign(f)?;
        }
        check_sign(label)?;
        Ok(Self { features, label })
    }

    pub fn features(&self) -> &[i8] {
        &self.features
    }

    pub fn label(&self) -> i8 {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }

    /// Copy of this point with the attributes selected by `mask` negated.
    /// The label is left alone.
    pub fn flipped(&self, mask: &[bool]) -> Self {
        debug_assert_eq!(mask.len(), self.features.len());
        let features = self
            .features
            .iter()
            .zip(mask)
            .map(|(&f, &m)| if m { -f } else { f })
            .collect();
        Self { features, label: self.label }
    }

    pub fn negated(&self) -> Self {
        Self {
            features: self.features.iter().map(|f| -f).collect(),
            label: self.label,
        }
    }
}

impl fmt::Display for BinaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.features.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v:+}")?;
        }
        write!(f, "; {:+})", self.label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: BinaryPoint,
    pub weight: f64,
}

/// A finite distribution over labelled sign vectors.
///
/// Atoms are kept in canonical (lexicographic) order, merged on identical
/// `(features, label)`, stripped of zero weights and normalized to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationDistribution {
    dim: usize,
    atoms: Vec<Atom>,
}

impl PopulationDistribution {
    /// Builds a population from raw `(features, label, weight)` triples.
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i8>, i8, f64)>,
    {
        let points = atoms
            .into_iter()
            .map(|(x, y, w)| BinaryPoint::new(x, y).map(|p| (p, w)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_weighted_points(points)
    }

    pub fn from_weighted_points<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BinaryPoint, f64)>,
    {
        let mut merged: BTreeMap<BinaryPoint, f64> = BTreeMap::new();
        let mut dim = None;
        for (point, weight) in atoms {
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidWeight(weight));
            }
            match dim {
                None => dim = Some(point.dim()),
                Some(d) if d != point.dim() => {
                    return Err(Error::DimensionMismatch { expected: d, found: point.dim() })
                }
                Some(_) => {}
            }
            *merged.entry(point).or_insert(0.0) += weight;
        }
        let dim = dim.ok_or(Error::EmptyPopulation)?;

        let mut atoms: Vec<Atom> = merged
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(point, weight)| Atom { point, weight })
            .collect();
        if atoms.is_empty() {
            return Err(Error::ZeroTotalWeight);
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            for a in &mut atoms {
                a.weight /= total;
            }
        }
        Ok(Self { dim, atoms })
    }

    /// Uniform distribution over the points of a sample, duplicates merged.
    pub fn uniform_over(sample: &SampleDataset) -> Self {
        let w = 1.0 / sample.len() as f64;
        Self::from_weighted_points(sample.points().iter().cloned().map(|p| (p, w)))
            .expect("a sample dataset is non-empty and dimension-consistent")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Weight of the atom `(features, label)`, zero if absent.
    pub fn weight_of(&self, features: &[i8], label: i8) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.point.features() == features && a.point.label() == label)
            .map_or(0.0, |a| a.weight)
    }

    /// `P(Y = +1)`.
    pub fn positive_mass(&self) -> f64 {
        self.atoms.iter().filter(|a| a.point.label() == 1).map(|a| a.weight).sum()
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: n });
        }
        Ok(())
    }
}

/// Where a sample came from and how it was preprocessed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub name: String,
    pub preprocessing: String,
}

impl Provenance {
    pub fn new(name: impl Into<String>, preprocessing: impl Into<String>) -> Self {
        Self { name: name.into(), preprocessing: preprocessing.into() }
    }
}

/// A finite, ordered sample of labelled sign vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleDataset {
    dim: usize,
    points: Vec<BinaryPoint>,
    provenance: Provenance,
}

impl SampleDataset {
    pub fn new(points: Vec<BinaryPoint>, provenance: Provenance) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyDataset)?.dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Self { dim, points, provenance })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[BinaryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `(m_plus, m_minus)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.points.iter().filter(|p| p.label() == 1).count();
        (pos, self.points.len() - pos)
    }

    /// Same provenance, different points.
    pub(crate) fn with_points(&self, points: Vec<BinaryPoint>) -> Result<Self> {
        Self::new(points, self.provenance.clone())
    }
}

/// Attribute noise model.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    /// Symmetric dependent: every attribute flips together with probability `p`.
    SyDe { p: f64 },
    /// Asymmetric independent: attribute `j` flips with probability `ps[j]`,
    /// independently of the others.
    AsyIn { ps: Vec<f64> },
}

fn check_probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::InvalidProbability(p))
    }
}

impl NoiseSpec {
    pub fn sy_de(p: f64) -> Result<Self> {
        Ok(Self::SyDe { p: check_probability(p)? })
    }

    pub fn asy_in(ps: Vec<f64>) -> Result<Self> {
        if ps.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for &p in &ps {
            check_probability(p)?;
        }
        Ok(Self::AsyIn { ps })
    }

    /// Dimension the noise spec is tied to, if any. Sy-De applies to every `n`.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::SyDe { .. } => None,
            Self::AsyIn { ps } => Some(ps.len()),
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) if d != n => Err(Error::DimensionMismatch { expected: n, found: d }),
            _ => Ok(()),
        }
    }

    /// The robustness statements only hold for flip rates strictly below 1/2.
    pub fn is_below_half(&self) -> bool {
        match self {
            Self::SyDe { p } => *p < 0.5,
            Self::AsyIn { ps } => ps.iter().all(|p| *p < 0.5),
        }
    }

    pub fn is_noiseless(&self) -> bool {
        match self {
            Self::SyDe { p } => *p == 0.0,
            Self::AsyIn { ps } => ps.iter().all(|p| *p == 0.0),
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SyDe { p } => write!(f, "Sy-De(p={p})"),
            Self::AsyIn { ps } => {
                write!(f, "Asy-In(p=")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// `f(x) = beta . x + c`.
///
/// `intercept == None` marks an origin-passing classifier; its `c` is
/// identically zero rather than a fitted value that happens to be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearClassifier {
    weights: Vec<f64>,
    intercept: Option<f64>,
}

impl LinearClassifier {
    pub fn origin(weights: Vec<f64>) -> Self {
        Self { weights, intercept: None }
    }

    pub fn affine(weights: Vec<f64>, intercept: f64) -> Self {
        Self { weights, intercept: Some(intercept) }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `c`; zero for origin-passing classifiers.
    pub fn intercept(&self) -> f64 {
        self.intercept.unwrap_or(0.0)
    }

    pub fn is_origin_passing(&self) -> bool {
        self.intercept.is_none()
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.weights.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.weights.len() });
        }
        Ok(())
    }

    pub fn decision(&self, x: &[i8]) -> f64 {
        self.weights
            .iter()
            .zip(x)
            .map(|(b, &xi)| b * f64::from(xi))
            .sum::<f64>()
            + self.intercept()
    }

    /// Sign of the decision value: `-1`, `0` or `+1`. Values within
    /// [`ZERO_MARGIN_RTOL`] of zero, relative to the coefficient scale, are zero.
    pub fn decision_sign(&self, x: &[i8]) -> i8 {
        let v = self.decision(x);
        let scale = self.weights.iter().map(|b| b.abs()).sum::<f64>() + self.intercept().abs();
        if v.abs() <= ZERO_MARGIN_RTOL * scale {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Predicted label; a zero decision value predicts `-1`.
    pub fn predict(&self, x: &[i8]) -> i8 {
        if self.decision_sign(x) > 0 {
            1
        } else {
            -1
        }
    }

    /// `f(x) y <= 0`: a zero decision value is an error whatever the label.
    pub fn errs_on(&self, point: &BinaryPoint) -> bool {
        self.decision_sign(point.features()) * point.label() <= 0
    }

    /// `(lambda beta, lambda c)`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            weights: self.weights.iter().map(|b| b * lambda).collect(),
            intercept: self.intercept.map(|c| c * lambda),
        }
    }
}

impl fmt::Display for LinearClassifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "beta=(")?;
        for (i, b) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")?;
        match self.intercept {
            Some(c) => write!(f, ", c={c}"),
            None => write!(f, ", origin-passing"),
        }
    }
}

/// Outcome of comparing the clean 0-1 risk of a clean-trained and a
/// noise-trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub clean_risk_of_clean_opt: f64,
    pub clean_risk_of_noisy_opt: f64,
    pub robust: bool,
    pub clean_optimizer: LinearClassifier,
    pub noisy_optimizer: LinearClassifier,
}
