//! Boundary random walks (BRWs) on the half-line and their diffusive rescalings,
//! which approximate Feller's Brownian motions with general boundary behavior at 0.
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes through
//! [`libm`] so results are bit-identical across platforms. IO, file formats and
//! the experiment CLI live in the companion `fellerlab-cli` crate.

#![no_std]

extern crate alloc;

pub mod boundary;
pub mod error;
pub mod brw;
pub mod generator;
pub mod genfun;
pub mod math;
pub mod reference;
pub mod rng;
pub mod scaling;
pub mod stats;

pub use boundary::{BoundaryStageEstimate, FbmJumpLaw, FellerParams, P4Measure, ValidationReport};
pub use error::{Error, Result};
pub use brw::{
    simulate, simulate_path, simulate_path_summary, BrwPath, JumpingMeasure, PathEnsemble,
    PathSummary,
};
pub use generator::{
    boundary_residual, consistency_residuals, discrete_generator, generator_bounds_check,
    make_domain_function, martingale_residual_exact, martingale_residual_mc, scaled_generator,
    BoundsReport, GeneratorResidual, TestFunction,
};
pub use genfun::{
    catalan, catalan_first_passage, f_closed, f_series, first_passage_terms, occupation_bound,
    occupation_total, ReturnSeries,
};
pub use reference::{
    absorbed_marginal, exp_holding_survival, fine_grid_reference, reflected_marginal,
    EmpiricalMarginal, MarginalLaw,
};
pub use scaling::{
    build_measure, discrete_stage, preset, rescale, start_state, Regime, RescaledPath,
    ScalingScheme,
};
pub use stats::{ks_statistic, kill_fraction_error};
