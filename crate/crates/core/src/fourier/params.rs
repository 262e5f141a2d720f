use serde::Serialize;

use crate::error::{invalid, Result};
use crate::lattice::floor_snapped;
use crate::scalar::Real;

/// Model constants: dimensions, design-density floor, smoothness budget,
/// relevance level, noise scale and the two norm bounds on the regression
/// function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams<T> {
    /// Ambient dimension.
    pub d: usize,
    /// Upper bound on the number of relevant coordinates.
    pub d_star: usize,
    /// Lower bound of the design density on the unit cube.
    pub g_min: T,
    /// Smoothness budget: `sum_k k_j^2 theta_k^2 <= L` for every `j`.
    pub l: T,
    /// Relevance level: `Q_j >= kappa` for every relevant `j`.
    pub kappa: T,
    /// Noise scale; zero means noiseless.
    pub sigma: T,
    /// Bound on the design-weighted quadratic mean of `f`.
    pub l2: T,
    /// Bound on the essential supremum of `f`.
    pub l_inf: T,
}

impl<T: Real> ModelParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d_star == 0 {
            return Err(invalid("d and d_star must be positive"));
        }
        if self.d_star > self.d {
            return Err(invalid(format!(
                "d_star = {} exceeds d = {}",
                self.d_star, self.d
            )));
        }
        for (name, v) in [
            ("g_min", self.g_min),
            ("L", self.l),
            ("kappa", self.kappa),
            ("L2", self.l2),
            ("L_inf", self.l_inf),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.sigma >= T::zero() && self.sigma.is_finite()) {
            return Err(invalid(format!(
                "sigma must be nonnegative, got {}",
                self.sigma
            )));
        }
        if self.l2 > self.l_inf {
            return Err(invalid(format!(
                "L2 = {} exceeds L_inf = {}",
                self.l2, self.l_inf
            )));
        }
        Ok(())
    }
}

/// Truncation radius `m`, threshold `lambda` and the integer squared radius
/// `floor(m^2)` used for frequency enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TuningParams<T> {
    pub m: T,
    pub lambda: T,
    pub radius_sq: u64,
}

/// Constant in front of the threshold in the consistency theorem.
pub const THEOREM_LAMBDA_SCALE: f64 = 4.0;

/// `(sigma + L2) * sqrt(d* log(6 m d) / (n g_min^2))`: the threshold shape,
/// without its leading constant.
pub fn lambda_unit<T: Real>(params: &ModelParams<T>, m: T, n: usize) -> T {
    let d_star = T::from_count(params.d_star);
    let d = T::from_count(params.d);
    let log_term = (T::lit(6.0) * m * d).ln();
    (params.sigma + params.l2)
        * (d_star * log_term / (T::from_count(n) * params.g_min * params.g_min)).sqrt()
}

impl<T: Real> TuningParams<T> {
    /// `m = sqrt(2 L d* / kappa)` with the threshold `scale * lambda_unit`.
    pub fn with_lambda_scale(params: &ModelParams<T>, n: usize, scale: T) -> Result<Self> {
        if n == 0 {
            return Err(invalid("sample size must be at least 1"));
        }
        params.validate()?;
        let m_sq = T::lit(2.0) * params.l * T::from_count(params.d_star) / params.kappa;
        let m = m_sq.sqrt();
        Ok(Self {
            m,
            lambda: scale * lambda_unit(params, m, n),
            radius_sq: floor_snapped(m_sq.as_f64())? as u64,
        })
    }

    /// Theorem radius with a caller-chosen threshold.
    pub fn with_lambda(params: &ModelParams<T>, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(invalid(format!("lambda must be positive, got {lambda}")));
        }
        let base = Self::with_lambda_scale(params, 1, T::one())?;
        Ok(Self { lambda, ..base })
    }
}

/// Tuning from the consistency theorem:
/// `m = (2 L d*/kappa)^{1/2}`,
/// `lambda = 4 (sigma + L2) (d* log(6 m d) / (n g_min^2))^{1/2}`.
pub fn tuning<T: Real>(params: &ModelParams<T>, n: usize) -> Result<TuningParams<T>> {
    TuningParams::with_lambda_scale(params, n, T::lit(THEOREM_LAMBDA_SCALE))
}
