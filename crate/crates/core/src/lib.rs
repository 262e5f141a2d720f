//! Lattice counts, theta saddle-point asymptotics and Fourier thresholding
//! for recovering the relevant coordinates of a sparse high-dimensional
//! regression function.
//!
//! Numerical code is generic over [`Real`] (`f32`, `f64`); exact counting is
//! generic over [`CountInt`] (`u64`, `u128`, `BigUint`). The aliases below fix
//! the usual choices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fourier;
pub mod lattice;
pub mod regime;
pub mod scalar;
pub mod synth;
pub mod theta;

pub use error::{Error, Result};
pub use fourier::{
    basis_eval, empirical_coeff, lambda_unit, relevance_q, select, select_with, tuning,
    CoefficientSource, DesignDensity, ModelParams, SampleCoefficients, SelectionRecord,
    SelectionResult, Trig, TuningParams, UniformDensity,
};
pub use lattice::{
    card_bound, count_exact, enumerate_ball, enumerate_ball_sq, enumerate_level,
    representation_numbers, CountResult, MultiIndex, RepSeries,
};
pub use regime::{gamma_star, regime_constants, RegimeFlags, RegimeReport};
pub use scalar::{CountInt, Real};
pub use synth::{
    fano_kl_bound, gen_design, gen_sample, lower_bound_conditions, mc_error, orth_check, run_trial,
    ExperimentConfig, FunctionSpec, LambdaRule, LowerBoundReport, McResult, QuadratureCoefficients,
    SparseAdditiveFunction, TrialOutcome,
};
pub use theta::{
    asymptotic_counts, figure_curves, solve_saddle, theta_h, AsymptoticCount, CurveRow, SaddlePoint,
};

pub type RepSeriesBig = RepSeries<num_bigint::BigUint>;
pub type RepSeriesU64 = RepSeries<u64>;

pub type SaddlePointF64 = SaddlePoint<f64>;
pub type SaddlePointF32 = SaddlePoint<f32>;
pub type AsymptoticCountF64 = AsymptoticCount<f64>;
pub type ModelParamsF64 = ModelParams<f64>;
pub type ModelParamsF32 = ModelParams<f32>;
pub type TuningParamsF64 = TuningParams<f64>;
pub type SelectionResultF64 = SelectionResult<f64>;
pub type SparseAdditiveFunctionF64 = SparseAdditiveFunction<f64>;
pub type ExperimentConfigF64 = ExperimentConfig<f64>;
pub type RegimeReportF64 = RegimeReport<f64>;
pub type LowerBoundReportF64 = LowerBoundReport<f64>;
