//! Closed-form squared-loss minimization.
//!
//! The population minimizer of `E[(y - beta . x)^2]` solves
//! `E[x x^T] beta = E[y x]`; the sample version replaces expectations with
//! sample means.

use crate::error::{Error, Result};
use crate::solvers::linalg::solve_linear_system;
use crate::types::{LinearClassifier, PopulationDistribution, SampleDataset};

/// Ridge added to the moment matrix when it is singular.
pub const SINGULAR_RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    /// `E[x x^T]`, row-major.
    pub second_moment: Vec<Vec<f64>>,
    /// `E[y x]`.
    pub cross_moment: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquaredFit {
    pub classifier: LinearClassifier,
    /// The moment matrix was singular and `SINGULAR_RIDGE * I` was added.
    pub regularized: bool,
    pub residual: f64,
}

pub fn population_moments(d: &PopulationDistribution) -> MomentSummary {
    let n = d.dim();
    let mut second = vec![vec![0.0; n]; n];
    let mut cross = vec![0.0; n];
    for a in d.atoms() {
        let x = a.point.features();
        let y = f64::from(a.point.label());
        for i in 0..n {
            let xi = f64::from(x[i]);
            cross[i] += a.weight * y * xi;
            for j in i..n {
                second[i][j] += a.weight * xi * f64::from(x[j]);
            }
        }
    }
    mirror_upper(&mut second);
    MomentSummary { second_moment: second, cross_moment: cross }
}

fn mirror_upper(m: &mut [Vec<f64>]) {
    for i in 0..m.len() {
        for j in 0..i {
            m[i][j] = m[j][i];
        }
    }
}

fn solve_moments(moments: &MomentSummary) -> Result<(Vec<f64>, bool, f64)> {
    match solve_linear_system(&moments.second_moment, &moments.cross_moment) {
        Ok(sol) => Ok((sol.x, false, sol.residual)),
        Err(Error::Singular { .. }) => {
            let mut ridged = moments.second_moment.clone();
            for (i, row) in ridged.iter_mut().enumerate() {
                row[i] += SINGULAR_RIDGE;
            }
            let sol = solve_linear_system(&ridged, &moments.cross_moment)?;
            Ok((sol.x, true, sol.residual))
        }
        Err(e) => Err(e),
    }
}

/// Origin-passing population minimizer of the squared risk.
pub fn fit_squared_population(d: &PopulationDistribution) -> Result<SquaredFit> {
    let (beta, regularized, residual) = solve_moments(&population_moments(d))?;
    Ok(SquaredFit { classifier: LinearClassifier::origin(beta), regularized, residual })
}

/// Least-squares fit on a sample. With `intercept`, every point is augmented
/// with a constant `+1` coordinate; noise never touches that coordinate since
/// it is added after corruption.
pub fn fit_squared_sample(s: &SampleDataset, intercept: bool) -> Result<SquaredFit> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = s.dim();
    let k = n + usize::from(intercept);
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    let mut row = vec![0.0; k];
    for p in s.points() {
        for (r, &x) in row.iter_mut().zip(p.features()) {
            *r = f64::from(x);
        }
        if intercept {
            row[n] = 1.0;
        }
        let y = f64::from(p.label());
        for i in 0..k {
            xty[i] += row[i] * y;
            for j in i..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    mirror_upper(&mut xtx);
    // Sample means rather than raw sums keep the ridge scale independent of m.
    let m = s.len() as f64;
    for (row, b) in xtx.iter_mut().zip(xty.iter_mut()) {
        for v in row.iter_mut() {
            *v /= m;
        }
        *b /= m;
    }
    let (mut beta, regularized, residual) =
        solve_moments(&MomentSummary { second_moment: xtx, cross_moment: xty })?;
    let classifier = if intercept {
        let c = beta.pop().expect("intercept coordinate");
        LinearClassifier::affine(beta, c)
    } else {
        LinearClassifier::origin(beta)
    };
    Ok(SquaredFit { classifier, regularized, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::corrupt_population;
    use crate::risk::evaluate_sample;
    use crate::types::{BinaryPoint, NoiseSpec, Provenance};

    fn example_two() -> PopulationDistribution {
        PopulationDistribution::new(vec![
            (vec![-1, 1], 1, 0.25),
            (vec![-1, -1], -1, 0.5),
            (vec![1, -1], 1, 0.25),
        ])
        .unwrap()
    }

    #[test]
    fn example_one_moments() {
        let d = PopulationDistribution::new(vec![(vec![-1], 1, 0.25), (vec![1], -1, 0.75)]).unwrap();
        let m = population_moments(&d);
        assert_eq!(m.second_moment, vec![vec![1.0]]);
        assert_eq!(m.cross_moment, vec![-1.0]);
    }

    #[test]
    fn example_two_moments_by_outer_products() {
        // Brute force: sum_w w * x x^T, written out per atom.
        let atoms: [([f64; 2], f64, f64); 3] =
            [([-1.0, 1.0], 1.0, 0.25), ([-1.0, -1.0], -1.0, 0.5), ([1.0, -1.0], 1.0, 0.25)];
        let mut s = [[0.0; 2]; 2];
        let mut c = [0.0; 2];
        for (x, y, w) in atoms {
            for i in 0..2 {
                c[i] += w * y * x[i];
                for j in 0..2 {
                    s[i][j] += w * x[i] * x[j];
                }
            }
        }
        let m = population_moments(&example_two());
        for i in 0..2 {
            assert_eq!(m.cross_moment[i], c[i]);
            for j in 0..2 {
                assert_eq!(m.second_moment[i][j], s[i][j]);
            }
        }
        assert_eq!(m.second_moment, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(m.cross_moment, vec![0.5, 0.5]);
    }

    #[test]
    fn example_two_clean_and_noisy_fits() {
        let clean = fit_squared_population(&example_two()).unwrap();
        assert_eq!(clean.classifier.weights(), &[0.5, 0.5]);
        let noisy_d = corrupt_population(&example_two(), &NoiseSpec::asy_in(vec![0.1, 0.2]).unwrap()).unwrap();
        let noisy = fit_squared_population(&noisy_d).unwrap();
        assert!((noisy.classifier.weights()[0] - 0.4).abs() < 1e-12);
        assert!((noisy.classifier.weights()[1] - 0.3).abs() < 1e-12);
        assert!(noisy.classifier.is_origin_passing());
    }

    #[test]
    fn single_atom_interpolates() {
        let d = PopulationDistribution::new(vec![(vec![1], 1, 1.0)]).unwrap();
        assert_eq!(fit_squared_population(&d).unwrap().classifier.weights(), &[1.0]);
    }

    #[test]
    fn singular_moments_fall_back_to_ridge() {
        // x1 == x2 on every atom.
        let d = PopulationDistribution::new(vec![(vec![1, 1], 1, 0.5), (vec![-1, -1], -1, 0.5)]).unwrap();
        let fit = fit_squared_population(&d).unwrap();
        assert!(fit.regularized);
        let b = fit.classifier.weights();
        assert!((b[0] - 0.5).abs() < 1e-6 && (b[1] - 0.5).abs() < 1e-6);
    }

    fn sample(points: Vec<(Vec<i8>, i8)>) -> SampleDataset {
        SampleDataset::new(
            points.into_iter().map(|(x, y)| BinaryPoint::new(x, y).unwrap()).collect(),
            Provenance::default(),
        )
        .unwrap()
    }

    #[test]
    fn sample_realization_of_example_two() {
        let s = sample(vec![
            (vec![-1, 1], 1),
            (vec![-1, -1], -1),
            (vec![-1, -1], -1),
            (vec![1, -1], 1),
        ]);
        let fit = fit_squared_sample(&s, false).unwrap();
        assert_eq!(fit.classifier.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn all_positive_with_intercept() {
        let s = sample(vec![(vec![1, -1, 1], 1), (vec![-1, -1, 1], 1), (vec![1, 1, -1], 1), (vec![-1, 1, 1], 1)]);
        let fit = fit_squared_sample(&s, true).unwrap();
        let m = evaluate_sample(&s, &fit.classifier).unwrap();
        assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn duplicating_the_sample_keeps_beta() {
        let pts = vec![
            (vec![1, -1, 1], 1),
            (vec![-1, -1, 1], -1),
            (vec![1, 1, -1], 1),
            (vec![-1, 1, 1], -1),
            (vec![1, 1, 1], 1),
        ];
        let once = fit_squared_sample(&sample(pts.clone()), true).unwrap();
        let mut doubled = pts.clone();
        doubled.extend(pts);
        let twice = fit_squared_sample(&sample(doubled), true).unwrap();
        assert_eq!(once.classifier, twice.classifier);
    }
}
