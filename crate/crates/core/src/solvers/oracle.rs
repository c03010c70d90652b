//! Exact 0-1 risk minimization for small populations by candidate enumeration.
//!
//! A finite point set has finitely many linear dichotomies, so a finite list
//! of separators, one strictly inside each cell of the relevant arrangement,
//! attains the minimum. These routines share no code with the grid search.

use crate::error::{Error, Result};
use crate::risk::zero_one_risk;
use crate::types::{LinearClassifier, PopulationDistribution};

/// Largest population accepted by the 2-D oracle.
pub const MAX_ORACLE_ATOMS: usize = 64;

/// Perturbation used to move candidates off lattice-aligned boundaries.
pub const ORACLE_EPSILON: f64 = 1e-6;

/// Which classifiers the oracle ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparatorFamily {
    /// Every `b1 x1 + b2 x2 + c`, including constant classifiers.
    Affine,
    /// `b1 x1 + x2 + c`: the family the grid search covers.
    UnitSecondWeight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub classifier: LinearClassifier,
    pub risk: f64,
    pub candidates: usize,
}

fn best_of(d: &PopulationDistribution, candidates: Vec<LinearClassifier>) -> Result<OracleSolution> {
    let count = candidates.len();
    let mut best: Option<(LinearClassifier, f64)> = None;
    for f in candidates {
        let r = zero_one_risk(d, &f)?;
        if best.as_ref().is_none_or(|(_, b)| r < *b) {
            best = Some((f, r));
        }
    }
    let (classifier, risk) = best.ok_or(Error::NoMinimizers)?;
    Ok(OracleSolution { classifier, risk, candidates: count })
}

fn distinct_points(d: &PopulationDistribution) -> Vec<[f64; 2]> {
    let mut pts: Vec<[i8; 2]> = d.atoms().iter().map(|a| [a.point.features()[0], a.point.features()[1]]).collect();
    pts.sort_unstable();
    pts.dedup();
    pts.into_iter().map(|[a, b]| [f64::from(a), f64::from(b)]).collect()
}

fn check_2d(d: &PopulationDistribution) -> Result<()> {
    d.check_dim(2)?;
    if d.len() > MAX_ORACLE_ATOMS {
        return Err(Error::TooManyAtoms { found: d.len(), max: MAX_ORACLE_ATOMS });
    }
    Ok(())
}

/// Minimum 0-1 risk over `family` on a two-attribute population.
pub fn exact_minimize_zero_one_2d(d: &PopulationDistribution, family: SeparatorFamily) -> Result<OracleSolution> {
    check_2d(d)?;
    let pts = distinct_points(d);
    let candidates = match family {
        SeparatorFamily::Affine => affine_candidates(&pts),
        SeparatorFamily::UnitSecondWeight => unit_weight_candidates(&pts),
    };
    best_of(d, candidates)
}

/// Lines through each pair of points, nudged in offset and angle, in both
/// orientations; axis-aligned thresholds; the two constant classifiers.
fn affine_candidates(pts: &[[f64; 2]]) -> Vec<LinearClassifier> {
    let eps = ORACLE_EPSILON;
    let mut out = vec![
        LinearClassifier::affine(vec![0.0, 0.0], 1.0),
        LinearClassifier::affine(vec![0.0, 0.0], -1.0),
    ];
    let mut push = |w: [f64; 2], c: f64| {
        out.push(LinearClassifier::affine(w.to_vec(), c));
        out.push(LinearClassifier::affine(vec![-w[0], -w[1]], -c));
    };

    for (i, p) in pts.iter().enumerate() {
        for (j, q) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let w = [p[1] - q[1], q[0] - p[0]];
            let norm = w[0].hypot(w[1]);
            let c = -(w[0] * p[0] + w[1] * p[1]);
            push(w, c + eps * norm);
            push(w, c - eps * norm);
            let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
            for angle in [eps, -eps] {
                let (s, co) = angle.sin_cos();
                let r = [co * w[0] - s * w[1], s * w[0] + co * w[1]];
                push(r, -(r[0] * mid[0] + r[1] * mid[1]));
            }
        }
    }

    for axis in 0..2 {
        let mut vals: Vec<f64> = pts.iter().map(|p| p[axis]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        let mut cuts: Vec<f64> = vals.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
        if let (Some(lo), Some(hi)) = (vals.first(), vals.last()) {
            cuts.push(lo - 1.0);
            cuts.push(hi + 1.0);
        }
        for t in cuts {
            let mut w = [0.0, 0.0];
            w[axis] = 1.0;
            push(w, -t);
        }
    }
    out
}

/// Each point `(x1, x2)` is the line `b x1 + c + x2 = 0` in the `(b, c)`
/// plane. One candidate per quadrant at every pairwise crossing reaches every
/// cell that has a vertex; two points astride a foot of each line handle the
/// all-parallel case.
fn unit_weight_candidates(pts: &[[f64; 2]]) -> Vec<LinearClassifier> {
    let eps = ORACLE_EPSILON;
    // Line i: a_i b + c = r_i with a = x1, r = -x2; direction (1, -a), normal (a, 1).
    let lines: Vec<(f64, f64)> = pts.iter().map(|p| (p[0], -p[1])).collect();
    let mut params: Vec<(f64, f64)> = Vec::new();

    for &(a, r) in &lines {
        let nn = a * a + 1.0;
        let foot = (a * r / nn, r / nn);
        let unit = (a / nn.sqrt(), 1.0 / nn.sqrt());
        params.push((foot.0 + eps * unit.0, foot.1 + eps * unit.1));
        params.push((foot.0 - eps * unit.0, foot.1 - eps * unit.1));
    }

    for (i, &(a1, r1)) in lines.iter().enumerate() {
        for &(a2, r2) in &lines[i + 1..] {
            let det = a1 - a2;
            if det == 0.0 {
                continue;
            }
            let b = (r1 - r2) / det;
            let c = r1 - a1 * b;
            let d1 = unit_dir(a1);
            let d2 = unit_dir(a2);
            for s1 in [1.0, -1.0] {
                for s2 in [1.0, -1.0] {
                    params.push((b + eps * (s1 * d1.0 + s2 * d2.0), c + eps * (s1 * d1.1 + s2 * d2.1)));
                }
            }
        }
    }

    if params.is_empty() {
        params.push((0.0, 0.0));
    }
    params
        .into_iter()
        .map(|(b, c)| LinearClassifier::affine(vec![b, 1.0], c))
        .collect()
}

fn unit_dir(a: f64) -> (f64, f64) {
    let n = (1.0 + a * a).sqrt();
    (1.0 / n, -a / n)
}

/// Minimum 0-1 risk over `b x + c` on a one-attribute population: every
/// threshold between or beyond the observed values, both orientations, and
/// the constants.
pub fn exact_minimize_zero_one_1d(d: &PopulationDistribution) -> Result<OracleSolution> {
    d.check_dim(1)?;
    let mut vals: Vec<f64> = d.atoms().iter().map(|a| f64::from(a.point.features()[0])).collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    let mut cuts: Vec<f64> = vals.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
    cuts.extend(vals.first().map(|v| v - 1.0));
    cuts.extend(vals.last().map(|v| v + 1.0));
    let mut candidates = vec![
        LinearClassifier::affine(vec![0.0], 1.0),
        LinearClassifier::affine(vec![0.0], -1.0),
    ];
    for t in cuts {
        candidates.push(LinearClassifier::affine(vec![1.0], -t));
        candidates.push(LinearClassifier::affine(vec![-1.0], t));
    }
    best_of(d, candidates)
}
