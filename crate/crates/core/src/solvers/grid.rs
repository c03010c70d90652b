//! Exhaustive 0-1 risk minimization over a rectangular parameter grid.
//!
//! Grid coordinates are decimal (`lo + k * step` with at most nine fractional
//! digits), so they are held as integers in units of `10^-d`. Decision values
//! on the sign lattice are then integer sums and their signs are exact; a grid
//! point lying on a class boundary really has zero margin.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{LinearClassifier, PopulationDistribution};

/// Default spacing between risk values treated as tied.
pub const DEFAULT_TIE_EPSILON: f64 = 1e-12;

const MAX_DECIMALS: u32 = 9;

/// The searched classifier family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameterization {
    /// `f(x) = b x + c` on one attribute; grid axes are `(b, c)`.
    Line,
    /// `f(x) = b1 x1 + x2 + c` on two attributes; grid axes are `(b1, c)`.
    /// Classifiers with a nonpositive second weight are outside this family.
    UnitSecondWeight,
}

impl Parameterization {
    pub fn dim(self) -> usize {
        match self {
            Self::Line => 1,
            Self::UnitSecondWeight => 2,
        }
    }

    pub fn classifier(self, b: f64, c: f64) -> LinearClassifier {
        match self {
            Self::Line => LinearClassifier::affine(vec![b], c),
            Self::UnitSecondWeight => LinearClassifier::affine(vec![b, 1.0], c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid("non-finite bound".into()));
        }
        if lo >= hi {
            return Err(Error::InvalidGrid(format!("lo {lo} must be below hi {hi}")));
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid(format!("step {step} must be positive")));
        }
        Ok(Self { lo, hi, step })
    }
}

/// Ranges for the two searched coefficients, `(b, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub b: Axis,
    pub c: Axis,
}

impl GridSpec {
    pub fn new(b: Axis, c: Axis) -> Self {
        Self { b, c }
    }

    /// The same range on both axes.
    pub fn square(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let axis = Axis::new(lo, hi, step)?;
        Ok(Self { b: axis, c: axis })
    }
}

impl Default for GridSpec {
    /// `[-5, 5]` on both axes, step `0.1`.
    fn default() -> Self {
        Self::square(-5.0, 5.0, 0.1).expect("valid default grid")
    }
}

fn to_units(v: f64, scale: f64) -> Option<i64> {
    let u = (v * scale).round();
    ((v * scale - u).abs() <= 1e-6 && u.abs() < 1e15).then_some(u as i64)
}

/// Integer image of a grid: coordinates are `units / scale`.
struct Lattice {
    scale: i64,
    b: Vec<i64>,
    c: Vec<i64>,
}

impl Lattice {
    fn new(grid: &GridSpec) -> Result<Self> {
        let values = [grid.b.lo, grid.b.hi, grid.b.step, grid.c.lo, grid.c.hi, grid.c.step];
        let scale = (0..=MAX_DECIMALS)
            .map(|d| 10i64.pow(d))
            .find(|&s| values.iter().all(|&v| to_units(v, s as f64).is_some()))
            .ok_or_else(|| {
                Error::InvalidGrid(format!("bounds and steps need at most {MAX_DECIMALS} decimal places"))
            })?;
        let axis = |a: &Axis| -> Result<Vec<i64>> {
            let s = scale as f64;
            let (lo, hi, step) = (to_units(a.lo, s).unwrap(), to_units(a.hi, s).unwrap(), to_units(a.step, s).unwrap());
            if step == 0 {
                return Err(Error::InvalidGrid("step rounds to zero".into()));
            }
            let count = (hi - lo) / step + 1;
            if count > 20_000 {
                return Err(Error::InvalidGrid(format!("{count} points per axis is too many")));
            }
            Ok((0..count).map(|k| lo + k * step).collect())
        };
        Ok(Self { scale, b: axis(&grid.b)?, c: axis(&grid.c)? })
    }

    fn value(&self, units: i64) -> f64 {
        units as f64 / self.scale as f64
    }
}

/// Risk values over a grid plus the tie-tolerant minimizer set.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSurface {
    pub parameterization: Parameterization,
    pub b_values: Vec<f64>,
    pub c_values: Vec<f64>,
    /// Row-major: `risks[i * c_values.len() + j]` is the risk at `(b_i, c_j)`.
    pub risks: Vec<f64>,
    pub min_risk: f64,
    /// Grid indices `(i, j)` whose risk is within `tie_epsilon` of the minimum.
    pub minimizers: Vec<(usize, usize)>,
    pub tie_epsilon: f64,
}

impl RiskSurface {
    pub fn risk_at(&self, i: usize, j: usize) -> f64 {
        self.risks[i * self.c_values.len() + j]
    }

    pub fn params(&self, i: usize, j: usize) -> (f64, f64) {
        (self.b_values[i], self.c_values[j])
    }

    pub fn minimizer_params(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.minimizers.iter().map(|&(i, j)| self.params(i, j))
    }

    pub fn minimizer_classifiers(&self) -> impl Iterator<Item = LinearClassifier> + '_ {
        self.minimizer_params().map(|(b, c)| self.parameterization.classifier(b, c))
    }

    /// Whether the grid point `(b, c)` (matched to within `1e-9`) is a minimizer.
    pub fn has_minimizer(&self, b: f64, c: f64) -> bool {
        self.minimizer_params()
            .any(|(bb, cc)| (bb - b).abs() < 1e-9 && (cc - c).abs() < 1e-9)
    }
}

/// Evaluates the 0-1 risk at every grid point.
pub fn grid_minimize_zero_one(
    d: &PopulationDistribution,
    grid: &GridSpec,
    parameterization: Parameterization,
) -> Result<RiskSurface> {
    grid_minimize_zero_one_with_ties(d, grid, parameterization, DEFAULT_TIE_EPSILON)
}

pub fn grid_minimize_zero_one_with_ties(
    d: &PopulationDistribution,
    grid: &GridSpec,
    parameterization: Parameterization,
    tie_epsilon: f64,
) -> Result<RiskSurface> {
    d.check_dim(parameterization.dim())?;
    let lattice = Lattice::new(grid)?;
    if lattice.b.is_empty() || lattice.c.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    let scale = lattice.scale;

    // Per atom: (coefficient on b, constant part, label, weight), so the
    // decision value is `b * coef + fixed + c` in lattice units.
    let atoms: Vec<(i64, i64, i64, f64)> = d
        .atoms()
        .iter()
        .map(|a| {
            let x = a.point.features();
            let fixed = match parameterization {
                Parameterization::Line => 0,
                Parameterization::UnitSecondWeight => i64::from(x[1]) * scale,
            };
            (i64::from(x[0]), fixed, i64::from(a.point.label()), a.weight)
        })
        .collect();

    let risks: Vec<f64> = lattice
        .b
        .par_iter()
        .flat_map_iter(|&b| {
            let atoms = &atoms;
            lattice.c.iter().map(move |&c| {
                atoms
                    .iter()
                    .filter(|(coef, fixed, y, _)| (b * coef + fixed + c) * y <= 0)
                    .map(|a| a.3)
                    .sum::<f64>()
                    + 0.0
            })
        })
        .collect();

    let min_risk = risks.iter().copied().fold(f64::INFINITY, f64::min);
    let nc = lattice.c.len();
    let minimizers: Vec<(usize, usize)> = risks
        .iter()
        .enumerate()
        .filter(|(_, r)| **r <= min_risk + tie_epsilon)
        .map(|(k, _)| (k / nc, k % nc))
        .collect();

    Ok(RiskSurface {
        parameterization,
        b_values: lattice.b.iter().map(|&u| lattice.value(u)).collect(),
        c_values: lattice.c.iter().map(|&u| lattice.value(u)).collect(),
        risks,
        min_risk,
        minimizers,
        tie_epsilon,
    })
}

/// Writes `p1,p2,risk` rows in row-major order, 17 significant digits.
pub fn emit_risk_surface(surface: &RiskSurface, path: &Path) -> Result<()> {
    if surface.minimizers.is_empty() {
        return Err(Error::NoMinimizers);
    }
    let mut out = BufWriter::new(File::create(path)?);
    write_risk_surface(surface, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_risk_surface<W: Write>(surface: &RiskSurface, out: &mut W) -> Result<()> {
    writeln!(out, "p1,p2,risk")?;
    for (i, b) in surface.b_values.iter().enumerate() {
        for (j, c) in surface.c_values.iter().enumerate() {
            writeln!(out, "{b:.16e},{c:.16e},{:.16e}", surface.risk_at(i, j))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::zero_one_risk;

    fn example_one() -> PopulationDistribution {
        PopulationDistribution::new(vec![(vec![-1], 1, 0.25), (vec![1], -1, 0.75)]).unwrap()
    }

    fn square_case(labels: [i8; 4]) -> PopulationDistribution {
        let pts = [[1, 1], [1, -1], [-1, -1], [-1, 1]];
        let w = [0.25, 0.33, 0.39, 0.03];
        PopulationDistribution::new((0..4).map(|i| (pts[i].to_vec(), labels[i], w[i]))).unwrap()
    }

    #[test]
    fn grid_values_are_exact_decimals() {
        let s = grid_minimize_zero_one(&example_one(), &GridSpec::default(), Parameterization::Line).unwrap();
        assert_eq!(s.b_values.len(), 101);
        assert_eq!(s.b_values[0], -5.0);
        assert_eq!(s.b_values[100], 5.0);
        assert_eq!(s.b_values[60], 1.0);
        assert_eq!(s.c_values[11], -3.9);
    }

    #[test]
    fn example_one_clean_surface() {
        let s = grid_minimize_zero_one(&example_one(), &GridSpec::default(), Parameterization::Line).unwrap();
        assert_eq!(s.min_risk, 0.0);
        assert!(s.has_minimizer(-1.0, -0.1));
    }

    #[test]
    fn square_xor_labeling() {
        let d = square_case([1, -1, 1, -1]);
        let s = grid_minimize_zero_one(&d, &GridSpec::default(), Parameterization::UnitSecondWeight).unwrap();
        // Only the 0.03 atom at (-1, +1) is misclassified by the best line.
        assert!((s.min_risk - 0.03).abs() < 1e-15);
        assert!(s.has_minimizer(-4.0, 4.0));
    }

    #[test]
    fn square_all_negative() {
        let d = square_case([-1, -1, -1, -1]);
        let s = grid_minimize_zero_one(&d, &GridSpec::default(), Parameterization::UnitSecondWeight).unwrap();
        assert_eq!(s.min_risk, 0.0);
        assert!(s.has_minimizer(0.0, -3.9));
    }

    #[test]
    fn boundary_grid_points_have_zero_margin() {
        // b = 0, c = 1 puts (x1, -1) exactly on the boundary: both are errors.
        let d = square_case([1, 1, 1, 1]);
        let s = grid_minimize_zero_one(&d, &GridSpec::default(), Parameterization::UnitSecondWeight).unwrap();
        let i = s.b_values.iter().position(|&b| b == 0.0).unwrap();
        let j = s.c_values.iter().position(|&c| c == 1.0).unwrap();
        assert!((s.risk_at(i, j) - (0.33 + 0.39)).abs() < 1e-15);
    }

    #[test]
    fn surface_agrees_with_direct_risk_off_boundaries() {
        let d = square_case([1, -1, -1, 1]);
        let grid = GridSpec::square(-2.0, 2.0, 0.25).unwrap();
        let s = grid_minimize_zero_one(&d, &grid, Parameterization::UnitSecondWeight).unwrap();
        for i in 0..s.b_values.len() {
            for j in 0..s.c_values.len() {
                let (b, c) = s.params(i, j);
                let f = Parameterization::UnitSecondWeight.classifier(b, c);
                assert_eq!(s.risk_at(i, j), zero_one_risk(&d, &f).unwrap(), "({b}, {c})");
            }
        }
    }

    #[test]
    fn invalid_grids() {
        assert!(GridSpec::square(1.0, -1.0, 0.1).is_err());
        assert!(GridSpec::square(-1.0, 1.0, 0.0).is_err());
        let odd = GridSpec::square(-1.0, 1.0, 1.0 / 3.0).unwrap();
        assert!(grid_minimize_zero_one(&example_one(), &odd, Parameterization::Line).is_err());
        let wrong_dim = grid_minimize_zero_one(&example_one(), &GridSpec::default(), Parameterization::UnitSecondWeight);
        assert!(matches!(wrong_dim, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn emitted_csv_has_one_row_per_point() {
        let grid = GridSpec::square(-1.0, 1.0, 1.0).unwrap();
        let s = grid_minimize_zero_one(&example_one(), &grid, Parameterization::Line).unwrap();
        let mut buf = Vec::new();
        write_risk_surface(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[0], "p1,p2,risk");
        assert_eq!(lines[1], "-1.0000000000000000e0,-1.0000000000000000e0,2.5000000000000000e-1");
    }

    #[test]
    fn emit_refuses_surfaces_without_minimizers() {
        let grid = GridSpec::square(-1.0, 1.0, 1.0).unwrap();
        let mut s = grid_minimize_zero_one(&example_one(), &grid, Parameterization::Line).unwrap();
        s.minimizers.clear();
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_risk_surface(&s, &dir.path().join("s.csv")), Err(Error::NoMinimizers)));
    }
}
