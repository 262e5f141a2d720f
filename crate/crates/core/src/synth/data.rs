use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::synth::SparseAdditiveFunction;

/// `n` i.i.d. uniform points of `[0,1)^d`, drawn row by row.
pub fn gen_design<T: Real, R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Array2<T> {
    Array2::from_shape_simple_fn((n, d), || T::lit(rng.random::<f64>()))
}

/// `Y_i = f(X_i) + sigma * eps_i` with standard Gaussian `eps_i`.
///
/// One normal draw is consumed per row even when `sigma = 0`, so the
/// generator state after the call does not depend on `sigma`.
pub fn gen_sample<T: Real, R: Rng + ?Sized>(
    f: &SparseAdditiveFunction<T>,
    x: &Array2<T>,
    sigma: T,
    rng: &mut R,
) -> Result<Vec<T>> {
    if x.ncols() != f.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} columns, function has d = {}",
            x.ncols(),
            f.dimension()
        )));
    }
    Ok(x.rows()
        .into_iter()
        .map(|row| {
            let noise: f64 = rng.sample(StandardNormal);
            let fx = f.eval(row.as_slice().expect("standard layout"));
            if sigma == T::zero() {
                fx
            } else {
                fx + sigma * T::lit(noise)
            }
        })
        .collect())
}
