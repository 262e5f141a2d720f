//! Empirical Fourier coefficients
//! `theta_hat_k = (1/n) sum_i phi_k(X_i) Y_i / g(X_i)`.
//!
//! [`empirical_coeff`] evaluates one coefficient straight from the formula.
//! [`SampleCoefficients`] serves many frequencies from a table of
//! per-coordinate phases `exp(2 pi i v x_ij)`, multiplying the phases of the
//! support coordinates instead of recomputing `cos(2 pi k.x)` for every `k`.

use ndarray::ArrayView2;
use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::fourier::basis::{basis_eval, Trig};
use crate::lattice::MultiIndex;
use crate::scalar::Real;

/// Known density of the design on `[0,1]^d`.
pub trait DesignDensity<T>: Sync {
    fn density_at(&self, x: &[T]) -> T;
}

/// `g = 1` on the unit cube.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformDensity;

impl<T: Real> DesignDensity<T> for UniformDensity {
    fn density_at(&self, _x: &[T]) -> T {
        T::one()
    }
}

impl<T, F> DesignDensity<T> for F
where
    F: Fn(&[T]) -> T + Sync,
{
    fn density_at(&self, x: &[T]) -> T {
        self(x)
    }
}

const PAIRWISE_BLOCK: usize = 64;

/// Fixed-order pairwise summation.
pub fn pairwise_sum<T: Real>(xs: &[T]) -> T {
    if xs.len() <= PAIRWISE_BLOCK {
        let mut acc = T::zero();
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn check_design<T: Real>(x: &ArrayView2<T>, y: &[T]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "design has {} rows but {} responses",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() == 0 {
        return Err(invalid("empty sample"));
    }
    if let Some(((i, j), v)) = x
        .indexed_iter()
        .find(|(_, &v)| !(v >= T::zero() && v <= T::one()))
    {
        return Err(invalid(format!(
            "design value {v} at row {i}, column {j} lies outside [0, 1]"
        )));
    }
    Ok(())
}

/// `Y_i / g(X_i)` with the density checked positive.
fn density_weights<T: Real>(
    x: &ArrayView2<T>,
    y: &[T],
    density: &impl DesignDensity<T>,
) -> Result<Vec<T>> {
    x.rows()
        .into_iter()
        .zip(y)
        .enumerate()
        .map(|(i, (row, &yi))| {
            let g = match row.as_slice() {
                Some(s) => density.density_at(s),
                None => density.density_at(&row.to_vec()),
            };
            if g > T::zero() && g.is_finite() {
                Ok(yi / g)
            } else {
                Err(Error::NonPositiveDensity {
                    row: i,
                    value: g.as_f64(),
                })
            }
        })
        .collect()
}

/// One empirical coefficient, summed in row order with pairwise summation.
pub fn empirical_coeff<T: Real>(
    x: ArrayView2<T>,
    y: &[T],
    density: &impl DesignDensity<T>,
    k: &MultiIndex,
    trig: Trig,
) -> Result<T> {
    check_design(&x, y)?;
    if k.dimension() != x.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "frequency dimension {} vs design width {}",
            k.dimension(),
            x.ncols()
        )));
    }
    let weights = density_weights(&x, y, density)?;
    let terms = x
        .rows()
        .into_iter()
        .zip(&weights)
        .map(|(row, &w)| Ok(basis_eval(k, trig, &row.to_vec())? * w))
        .collect::<Result<Vec<T>>>()?;
    Ok(pairwise_sum(&terms) / T::from_count(y.len()))
}

/// Anything that can report the `(cos, sin)` coefficient pair of a canonical
/// frequency.
pub trait CoefficientSource<T>: Sync {
    fn dimension(&self) -> usize;

    fn coefficient_pair(&self, k: &MultiIndex) -> Result<(T, T)>;
}

/// Empirical coefficients of one sample, for frequencies whose entries are
/// bounded by `max_abs_freq` in absolute value.
pub struct SampleCoefficients<T> {
    n: usize,
    d: usize,
    max_abs_freq: usize,
    weights: Vec<T>,
    /// `phases[j * max_abs_freq + v - 1][i] = exp(2 pi i v x_ij)`
    phases: Vec<Vec<Complex<T>>>,
}

impl<T: Real> SampleCoefficients<T> {
    pub fn new(
        x: ArrayView2<T>,
        y: &[T],
        density: &impl DesignDensity<T>,
        max_abs_freq: usize,
    ) -> Result<Self> {
        check_design(&x, y)?;
        let weights = density_weights(&x, y, density)?;
        let (n, d) = x.dim();
        let two_pi = T::lit(2.0) * T::PI();
        let mut phases = Vec::with_capacity(d * max_abs_freq);
        for column in x.columns() {
            for v in 1..=max_abs_freq {
                let freq = two_pi * T::from_count(v);
                phases.push(
                    column
                        .iter()
                        .map(|&xij| Complex::from_polar(T::one(), freq * xij))
                        .collect(),
                );
            }
        }
        Ok(Self {
            n,
            d,
            max_abs_freq,
            weights,
            phases,
        })
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    fn phase(&self, j: usize, v: i64) -> Result<&[Complex<T>]> {
        let a = v.unsigned_abs() as usize;
        if a == 0 || a > self.max_abs_freq {
            return Err(invalid(format!(
                "frequency entry {v} outside the tabulated range 1..={}",
                self.max_abs_freq
            )));
        }
        Ok(&self.phases[j * self.max_abs_freq + a - 1])
    }
}

impl<T: Real> CoefficientSource<T> for SampleCoefficients<T> {
    fn dimension(&self) -> usize {
        self.d
    }

    fn coefficient_pair(&self, k: &MultiIndex) -> Result<(T, T)> {
        if k.dimension() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "frequency dimension {} vs sample dimension {}",
                k.dimension(),
                self.d
            )));
        }
        if !k.is_canonical() {
            return Err(Error::NonCanonical(k.to_string()));
        }
        let mut entries = k.support().iter().zip(k.values());
        let (&j0, &v0) = entries.next().expect("canonical index has support");
        let mut acc = self.phase(j0, v0)?.to_vec();
        for (&j, &v) in entries {
            let table = self.phase(j, v)?;
            if v > 0 {
                acc.iter_mut().zip(table).for_each(|(a, p)| *a = *a * *p);
            } else {
                acc.iter_mut()
                    .zip(table)
                    .for_each(|(a, p)| *a = *a * p.conj());
            }
        }
        let re: Vec<T> = acc
            .iter()
            .zip(&self.weights)
            .map(|(a, &w)| a.re * w)
            .collect();
        let im: Vec<T> = acc
            .iter()
            .zip(&self.weights)
            .map(|(a, &w)| a.im * w)
            .collect();
        let scale = T::SQRT_2() / T::from_count(self.n);
        Ok((pairwise_sum(&re) * scale, pairwise_sum(&im) * scale))
    }
}
