//! Trigonometric basis, empirical Fourier coefficients, theorem tuning and
//! the thresholding estimator of the sparsity pattern.

pub mod basis;
pub mod coeff;
pub mod params;
pub mod select;

pub use basis::{basis_eval, Trig};
pub use coeff::{
    empirical_coeff, pairwise_sum, CoefficientSource, DesignDensity, SampleCoefficients,
    UniformDensity,
};
pub use params::{lambda_unit, tuning, ModelParams, TuningParams, THEOREM_LAMBDA_SCALE};
pub use select::{select, select_with, SelectionRecord, SelectionResult};

use crate::scalar::Real;
use crate::synth::SparseAdditiveFunction;

/// Relevance `Q_j[f] = sum_{k : k_j != 0} theta_k[f]^2` of coordinate `j`
/// (0-based), analytic for the additive cosine family: `a_j^2` on the
/// pattern, zero off it.
pub fn relevance_q<T: Real>(f: &SparseAdditiveFunction<T>, j: usize) -> T {
    f.amplitude(j).map_or(T::zero(), |a| a * a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relevance_examples() {
        let f = SparseAdditiveFunction::new(5, vec![1, 3], vec![1.5f64, -0.5]).unwrap();
        assert_eq!(relevance_q(&f, 0), 0.0);
        assert_eq!(relevance_q(&f, 1), 2.25);
        assert_eq!(relevance_q(&f, 3), 0.25);
    }
}
