//! Optimal-classifier computation.

pub mod grid;
pub mod linalg;
pub mod oracle;
pub mod squared;

pub use grid::{
    emit_risk_surface, grid_minimize_zero_one, grid_minimize_zero_one_with_ties, write_risk_surface, Axis,
    GridSpec, Parameterization, RiskSurface, DEFAULT_TIE_EPSILON,
};
pub use linalg::{solve_linear_system, LinearSolution, PIVOT_TOL};
pub use oracle::{
    exact_minimize_zero_one_1d, exact_minimize_zero_one_2d, OracleSolution, SeparatorFamily, MAX_ORACLE_ATOMS,
    ORACLE_EPSILON,
};
pub use squared::{
    fit_squared_population, fit_squared_sample, population_moments, MomentSummary, SquaredFit, SINGULAR_RIDGE,
};
