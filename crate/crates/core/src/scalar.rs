//! Scalar abstractions shared by every numeric routine in the crate.
//!
//! Floating-point work is written against [`Real`] (implemented for `f32`
//! and `f64`). Exact lattice counting is written against [`CountInt`]
//! (implemented for `u64`, `u128` and `BigUint`).

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::AddAssign;

use num_bigint::BigUint;
use num_traits::{Float, FloatConst, FromPrimitive, One, ToPrimitive, Zero};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Nonnegative integer type usable as an exact lattice-point counter.
///
/// Fixed-width implementations panic on overflow rather than wrap.
pub trait CountInt: Clone + Zero + One + AddAssign + Debug + Send + Sync {
    /// `self += a * b`.
    fn add_product(&mut self, a: &Self, b: &Self);

    /// Natural logarithm as `f64`; negative infinity for zero.
    fn ln(&self) -> f64;
}

impl CountInt for u64 {
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self = a
            .checked_mul(*b)
            .and_then(|p| self.checked_add(p))
            .expect("u64 lattice count overflow; use BigUint");
    }

    fn ln(&self) -> f64 {
        (*self as f64).ln()
    }
}

impl CountInt for u128 {
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self = a
            .checked_mul(*b)
            .and_then(|p| self.checked_add(p))
            .expect("u128 lattice count overflow; use BigUint");
    }

    fn ln(&self) -> f64 {
        (*self as f64).ln()
    }
}

impl CountInt for BigUint {
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn ln(&self) -> f64 {
        biguint_ln(self)
    }
}

/// Natural log of an arbitrary-precision integer, accurate to a few ulps
/// regardless of magnitude.
pub fn biguint_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().expect("fits in u64").to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("top 64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}
