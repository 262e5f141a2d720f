use num_complex::Complex;
use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fourier::{CoefficientSource, ModelParams, Trig};
use crate::lattice::MultiIndex;
use crate::scalar::Real;

/// `f(x) = sum_{j in J} a_j sqrt(2) cos(2 pi x_j)`.
///
/// The only nonzero Fourier coefficients are `theta_{e_j} = a_j` (cosine
/// member), so relevance, smoothness and both norms are available in closed
/// form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseAdditiveFunction<T> {
    d: usize,
    /// 0-based, strictly increasing.
    support: Vec<usize>,
    amplitudes: Vec<T>,
}

impl<T: Real> SparseAdditiveFunction<T> {
    pub fn new(d: usize, support: Vec<usize>, amplitudes: Vec<T>) -> Result<Self> {
        if d == 0 {
            return Err(invalid("ambient dimension must be positive"));
        }
        if support.len() != amplitudes.len() {
            return Err(invalid("support and amplitudes differ in length"));
        }
        if !support.windows(2).all(|w| w[0] < w[1]) || support.last().is_some_and(|&j| j >= d) {
            return Err(invalid(format!(
                "support must be strictly increasing indices below d = {d}"
            )));
        }
        if amplitudes.iter().any(|a| *a == T::zero() || !a.is_finite()) {
            return Err(invalid("amplitudes must be finite and nonzero"));
        }
        Ok(Self {
            d,
            support,
            amplitudes,
        })
    }

    /// Random pattern of `size` coordinates with amplitude magnitudes uniform
    /// in `[amp_lo, amp_hi]` and random signs.
    pub fn random<R: Rng + ?Sized>(
        d: usize,
        size: usize,
        amp_lo: f64,
        amp_hi: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if size > d {
            return Err(invalid(format!("pattern size {size} exceeds d = {d}")));
        }
        if !(0.0 < amp_lo && amp_lo <= amp_hi) {
            return Err(invalid("amplitude range must satisfy 0 < lo <= hi"));
        }
        let mut support = sample(rng, d, size).into_vec();
        support.sort_unstable();
        let amplitudes = support
            .iter()
            .map(|_| {
                let mag = rng.random_range(amp_lo..=amp_hi);
                T::lit(if rng.random::<bool>() { mag } else { -mag })
            })
            .collect();
        Self::new(d, support, amplitudes)
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    pub fn amplitude(&self, j: usize) -> Option<T> {
        self.support
            .binary_search(&j)
            .ok()
            .map(|pos| self.amplitudes[pos])
    }

    /// Univariate component `a_j sqrt(2) cos(2 pi t)` at `t` (zero off `J`).
    pub fn component(&self, j: usize, t: T) -> T {
        self.amplitude(j).map_or(T::zero(), |a| {
            a * T::SQRT_2() * (T::lit(2.0) * T::PI() * t).cos()
        })
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.support.iter().map(|&j| self.component(j, x[j])).sum()
    }

    /// Population coefficient `theta_k[f]` of the canonical pair member.
    pub fn population_coefficient(&self, k: &MultiIndex, trig: Trig) -> T {
        match (trig, k.support(), k.values()) {
            (Trig::Cos, [j], [1]) => self.amplitude(*j).unwrap_or(T::zero()),
            _ => T::zero(),
        }
    }

    /// Induced sup-norm bound `sum_j sqrt(2) |a_j|`.
    pub fn l_inf_bound(&self) -> T {
        self.amplitudes.iter().map(|a| T::SQRT_2() * a.abs()).sum()
    }

    /// `||f||_2^2 = sum_j a_j^2` under the uniform design.
    pub fn l2_sq(&self) -> T {
        self.amplitudes.iter().map(|&a| a * a).sum()
    }

    /// `sum_k k_j^2 theta_k^2`, which is `a_j^2` on the pattern.
    pub fn smoothness(&self, j: usize) -> T {
        self.amplitude(j).map_or(T::zero(), |a| a * a)
    }

    /// Checks relevance (`a_j^2 >= kappa`), smoothness (`a_j^2 <= L`),
    /// sparsity (`|J| <= d*`) and both norm bounds against `params`.
    pub fn validate_against(&self, params: &ModelParams<T>) -> Result<()> {
        params.validate()?;
        if self.d != params.d {
            return Err(Error::DimensionMismatch(format!(
                "function has d = {}, params say d = {}",
                self.d, params.d
            )));
        }
        if self.support.len() > params.d_star {
            return Err(invalid(format!(
                "pattern has {} coordinates, more than d_star = {}",
                self.support.len(),
                params.d_star
            )));
        }
        for (&j, &a) in self.support.iter().zip(&self.amplitudes) {
            let q = a * a;
            if q < params.kappa {
                return Err(invalid(format!(
                    "coordinate {} has relevance {q} below kappa = {}",
                    j + 1,
                    params.kappa
                )));
            }
            if q > params.l {
                return Err(invalid(format!(
                    "coordinate {} has smoothness {q} above L = {}",
                    j + 1,
                    params.l
                )));
            }
        }
        if self.l_inf_bound() > params.l_inf {
            return Err(invalid(format!(
                "sup-norm {} exceeds L_inf = {}",
                self.l_inf_bound(),
                params.l_inf
            )));
        }
        let slack = T::lit(1e-12) * params.l2 * params.l2;
        if self.l2_sq() > params.l2 * params.l2 + slack {
            return Err(invalid(format!(
                "quadratic mean {} exceeds L2 = {}",
                self.l2_sq().sqrt(),
                params.l2
            )));
        }
        Ok(())
    }

    /// Tightest parameters the function satisfies: `L = max a_j^2`,
    /// `L2 = ||f||_2`, `L_inf = sum sqrt(2)|a_j|`, uniform design.
    pub fn model_params(&self, d_star: usize, kappa: T, sigma: T) -> ModelParams<T> {
        let l = self.amplitudes.iter().map(|&a| a * a).fold(kappa, T::max);
        ModelParams {
            d: self.d,
            d_star,
            g_min: T::one(),
            l,
            kappa,
            sigma,
            l2: self.l2_sq().sqrt(),
            l_inf: self.l_inf_bound(),
        }
    }
}

/// Population coefficients of an additive function by tensor-product
/// midpoint quadrature on `[0,1]^d`.
///
/// For `f = sum_j f_j(x_j)` the `d`-dimensional rule factorizes into
/// one-dimensional midpoint sums, one per coordinate, so each coefficient
/// costs `O(|J| |supp k|)` table lookups.
pub struct QuadratureCoefficients<'a, T> {
    f: &'a SparseAdditiveFunction<T>,
    max_abs_freq: usize,
    /// `(1/M) sum_t exp(2 pi i v t)` for `v = -V..=V`
    plain: Vec<Complex<T>>,
    /// per pattern member: `(1/M) sum_t f_j(t) exp(2 pi i v t)`
    weighted: Vec<Vec<Complex<T>>>,
}

impl<'a, T: Real> QuadratureCoefficients<'a, T> {
    /// Tables for frequency entries up to `max_abs_freq`, with a rule that is
    /// exact for every trigonometric integrand involved.
    pub fn new(f: &'a SparseAdditiveFunction<T>, max_abs_freq: usize) -> Self {
        let points = 64.max(4 * max_abs_freq + 8);
        let nodes: Vec<T> = (0..points)
            .map(|t| (T::from_count(t) + T::lit(0.5)) / T::from_count(points))
            .collect();
        let two_pi = T::lit(2.0) * T::PI();
        let mean = |g: &dyn Fn(T) -> T, v: i64| -> Complex<T> {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &t in &nodes {
                acc = acc + Complex::from_polar(g(t), two_pi * T::lit(v as f64) * t);
            }
            acc / T::from_count(points)
        };
        let vmax = max_abs_freq as i64;
        let plain = (-vmax..=vmax).map(|v| mean(&|_| T::one(), v)).collect();
        let weighted = f
            .support()
            .iter()
            .map(|&j| {
                (-vmax..=vmax)
                    .map(|v| mean(&|t| f.component(j, t), v))
                    .collect()
            })
            .collect();
        Self {
            f,
            max_abs_freq,
            plain,
            weighted,
        }
    }

    fn slot(&self, v: i64) -> Result<usize> {
        let vmax = self.max_abs_freq as i64;
        if v.abs() > vmax {
            return Err(invalid(format!(
                "frequency entry {v} outside the tabulated range"
            )));
        }
        Ok((v + vmax) as usize)
    }
}

impl<T: Real> CoefficientSource<T> for QuadratureCoefficients<'_, T> {
    fn dimension(&self) -> usize {
        self.f.dimension()
    }

    fn coefficient_pair(&self, k: &MultiIndex) -> Result<(T, T)> {
        if k.dimension() != self.f.dimension() {
            return Err(Error::DimensionMismatch(
                "frequency vs function dimension".into(),
            ));
        }
        if !k.is_canonical() {
            return Err(Error::NonCanonical(k.to_string()));
        }
        let one = Complex::new(T::one(), T::zero());
        let mut integral = Complex::new(T::zero(), T::zero());
        for (member, &j) in self.f.support().iter().enumerate() {
            let mut term = one;
            for (&s, &v) in k.support().iter().zip(k.values()) {
                if s != j {
                    term = term * self.plain[self.slot(v)?];
                }
            }
            term = term * self.weighted[member][self.slot(k.get(j))?];
            integral = integral + term;
        }
        Ok((T::SQRT_2() * integral.re, T::SQRT_2() * integral.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_ball_sq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn construction_checks() {
        assert!(SparseAdditiveFunction::new(3, vec![1, 1], vec![1.0f64, 1.0]).is_err());
        assert!(SparseAdditiveFunction::new(3, vec![3], vec![1.0f64]).is_err());
        assert!(SparseAdditiveFunction::new(3, vec![0], vec![0.0f64]).is_err());
        assert!(SparseAdditiveFunction::new(3, vec![0, 2], vec![1.0f64]).is_err());
    }

    #[test]
    fn closed_form_norms() {
        let f = SparseAdditiveFunction::new(4, vec![0, 2], vec![1.0f64, -2.0]).unwrap();
        assert!((f.l_inf_bound() - 3.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.l2_sq(), 5.0);
        assert_eq!(f.smoothness(2), 4.0);
        assert_eq!(f.smoothness(1), 0.0);
        assert!((f.eval(&[0.0, 0.3, 0.0, 0.9]) - -2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn generated_functions_are_in_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let f = SparseAdditiveFunction::<f64>::random(12, 3, 1.0, 2.0, &mut rng).unwrap();
            let p = f.model_params(3, 1.0, 0.5);
            f.validate_against(&p).unwrap();
            for &j in f.support() {
                assert!(crate::fourier::relevance_q(&f, j) >= p.kappa);
                assert!(f.smoothness(j) <= p.l);
            }
        }
    }

    #[test]
    fn validation_rejects_out_of_class() {
        let f = SparseAdditiveFunction::new(4, vec![0, 2], vec![0.5f64, 1.0]).unwrap();
        let p = f.model_params(2, 1.0, 0.0);
        assert!(f.validate_against(&p).is_err());
        let p = ModelParams {
            d_star: 1,
            ..f.model_params(2, 0.25, 0.0)
        };
        assert!(f.validate_against(&p).is_err());
    }

    #[test]
    fn quadrature_reproduces_population_coefficients() {
        let f = SparseAdditiveFunction::new(5, vec![1, 4], vec![1.3f64, -0.7]).unwrap();
        let q = QuadratureCoefficients::new(&f, 3);
        for k in enumerate_ball_sq(5, 9, 3).unwrap() {
            let (c, s) = q.coefficient_pair(&k).unwrap();
            assert!(
                (c - f.population_coefficient(&k, Trig::Cos)).abs() < 1e-14,
                "{k}"
            );
            assert!(s.abs() < 1e-14, "{k}");
        }
    }
}
