use crate::error::{Error, Result};

/// Pivots with absolute value below this are treated as singular.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    /// `||A x - b||_inf` against the original system.
    pub residual: f64,
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear_system(a: &[Vec<f64>], b: &[f64]) -> Result<LinearSolution> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::Shape);
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("non-empty range");
        let pivot = m[pivot_row][col];
        if pivot.abs() < PIVOT_TOL {
            return Err(Error::Singular { pivot: pivot.abs(), threshold: PIVOT_TOL });
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = m[row][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }

    let residual = a
        .iter()
        .zip(b)
        .map(|(row, bi)| (row.iter().zip(&x).map(|(aij, xj)| aij * xj).sum::<f64>() - bi).abs())
        .fold(0.0, f64::max);
    Ok(LinearSolution { x, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let a = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let s = solve_linear_system(&a, &[3.0, -2.0, 0.5]).unwrap();
        assert_eq!(s.x, vec![3.0, -2.0, 0.5]);
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn diagonal_system() {
        let s = solve_linear_system(&[vec![2.0, 0.0], vec![0.0, 2.0]], &[1.0, 1.0]).unwrap();
        assert_eq!(s.x, vec![0.5, 0.5]);
    }

    #[test]
    fn asy_in_example_system() {
        // 2 b1 = 1 - 2 p1, 2 b2 = 1 - 2 p2 with p = (0.1, 0.2)
        let s = solve_linear_system(&[vec![2.0, 0.0], vec![0.0, 2.0]], &[1.0 - 0.2, 1.0 - 0.4]).unwrap();
        assert!((s.x[0] - 0.4).abs() < 1e-15);
        assert!((s.x[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn needs_pivoting() {
        let s = solve_linear_system(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[2.0, 3.0]).unwrap();
        assert_eq!(s.x, vec![3.0, 2.0]);
    }

    #[test]
    fn singular_is_reported() {
        let err = solve_linear_system(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(solve_linear_system(&[vec![1.0, 0.0]], &[1.0]), Err(Error::Shape)));
        assert!(matches!(solve_linear_system(&[vec![1.0]], &[1.0, 2.0]), Err(Error::Shape)));
    }
}
