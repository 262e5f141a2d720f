use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lattice::MultiIndex;
use crate::scalar::Real;

/// Which member of the trigonometric pair attached to a canonical `k`.
///
/// `Sin` realizes the basis function indexed by `-k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Cos,
    Sin,
}

impl fmt::Display for Trig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trig::Cos => "cos",
            Trig::Sin => "sin",
        })
    }
}

/// Orthonormal Fourier basis on `[0,1]^d`: `1` at `k = 0`, otherwise
/// `sqrt(2) cos(2 pi k.x)` or `sqrt(2) sin(2 pi k.x)`.
pub fn basis_eval<T: Real>(k: &MultiIndex, trig: Trig, x: &[T]) -> Result<T> {
    if x.len() != k.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, frequency has dimension {}",
            x.len(),
            k.dimension()
        )));
    }
    if k.is_zero() {
        return match trig {
            Trig::Cos => Ok(T::one()),
            Trig::Sin => Err(invalid("the zero frequency only has a cosine member")),
        };
    }
    if !k.is_canonical() {
        return Err(Error::NonCanonical(k.to_string()));
    }
    let angle = T::lit(2.0) * T::PI() * k.dot(x);
    let wave = match trig {
        Trig::Cos => angle.cos(),
        Trig::Sin => angle.sin(),
    };
    Ok(T::SQRT_2() * wave)
}
