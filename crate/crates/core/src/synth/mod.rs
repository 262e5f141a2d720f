//! Additive cosine test functions, data generation, Monte Carlo recovery
//! experiments and the checkable lower-bound quantities.

pub mod bounds;
pub mod data;
pub mod experiment;
pub mod function;

pub use bounds::{
    alpha_max, fano_kl_bound, lower_bound_conditions, orth_check, LowerBoundReport, OrthReport,
};
pub use data::{gen_design, gen_sample};
pub use experiment::{
    mc_error, run_trial, trial_seed, ExperimentConfig, FunctionSpec, LambdaRule, McResult,
    TrialOutcome,
};
pub use function::{QuadratureCoefficients, SparseAdditiveFunction};
