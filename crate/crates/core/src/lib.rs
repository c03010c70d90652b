//! Attribute-noise robustness of linear classifiers over ±1 features.
//!
//! Populations are finite weighted point sets; corrupting one under a noise
//! model gives another population, so clean and noisy optima can be compared
//! exactly. Sample-level tools cover the dataset experiments.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod experiment;
pub mod ingest;
pub mod noise;
pub mod risk;
pub mod solvers;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use experiment::{run_experiment, run_trial, split, AggregateRow, ExperimentConfig, ExperimentResult};
pub use ingest::{parse_krkp, parse_spect, parse_vote, DatasetId};
pub use noise::{corrupt_population, corrupt_sample, flip_patterns, FlipPattern, MAX_EXACT_ASY_IN_DIM};
pub use risk::{
    evaluate_sample, robustness_check, squared_risk, squared_risk_gradient, zero_one_risk, TrialMetrics,
    DEFAULT_ROBUSTNESS_TOL,
};
pub use solvers::{
    exact_minimize_zero_one_2d, fit_squared_population, fit_squared_sample, grid_minimize_zero_one, GridSpec,
    Parameterization, RiskSurface, SeparatorFamily,
};
pub use types::{
    Atom, BinaryPoint, LinearClassifier, NoiseSpec, PopulationDistribution, Provenance, RiskReport, SampleDataset,
};
pub use verify::{CheckResult, VerificationReport};
