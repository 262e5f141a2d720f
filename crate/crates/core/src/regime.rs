//! Constants delimiting the recovery and impossibility regimes, and the
//! sample-size conditions of the upper and lower bounds.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::fourier::{tuning, ModelParams};
use crate::lattice::{card_bound, count_exact, floor_snapped, CountResult};
use crate::scalar::Real;
use crate::theta::{default_root_tol, diff_offset, solve_saddle, SaddlePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeFlags {
    pub thm1_cond_a: bool,
    pub thm1_cond_b: bool,
    pub thm2_hyp1: bool,
    pub prop2_impossible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport<T> {
    pub c_star_lower: T,
    pub c_star_upper: T,
    pub c1_lower: T,
    pub c2_lower: T,
    /// `2 log(g_min / (17 (sigma + L2)))`, the noise/scale part of `c2_lower`.
    pub c2_lower_scale_term: T,
    /// Saddle-point offset at `gamma = 2L`, the counting part of `c2_lower`.
    pub c2_lower_saddle_term: T,
    pub c1_upper: T,
    pub c2_upper: T,
    pub gamma_star: T,
    pub flags: RegimeFlags,
}

/// `log C(d, k)` through log-gamma; `d` may be non-integral.
pub fn log_binomial(d: f64, k: usize) -> f64 {
    let k = k as f64;
    ln_gamma(d + 1.0) - ln_gamma(k + 1.0) - ln_gamma(d - k + 1.0)
}

/// Largest `gamma = j / d*` (`j <= L d*`) with `L >= gamma (1 + 1/(2 z_gamma))`.
pub fn gamma_star<T: Real>(l: T, d_star: usize) -> Result<SaddlePoint<T>> {
    if d_star == 0 {
        return Err(invalid("d_star must be at least 1"));
    }
    if !(l > T::zero() && l.is_finite()) {
        return Err(invalid(format!("L must be positive, got {l}")));
    }
    let top = floor_snapped((l * T::from_count(d_star)).as_f64())?;
    for j in (1..=top).rev() {
        let gamma = T::from_count(j) / T::from_count(d_star);
        let sp = solve_saddle(gamma, default_root_tol())?;
        if l >= gamma * (T::one() + T::one() / (T::lit(2.0) * sp.z_gamma)) {
            return Ok(sp);
        }
    }
    Err(Error::NoAdmissibleGamma {
        l: l.as_f64(),
        d_star,
    })
}

/// Integer squared radius `gamma * d*` for a `gamma` on the `1/d*` grid.
pub(crate) fn grid_radius_sq<T: Real>(gamma: T, d_star: usize) -> Result<usize> {
    floor_snapped((gamma * T::from_count(d_star)).as_f64())
}

/// `log` of `(N1 - N2)^2 log C(d, d*) / (n^2 N1)`; `-inf` when `d = d*`.
pub fn hyp1_log_lhs(counts: &CountResult, d: f64, d_star: usize, n: usize) -> f64 {
    2.0 * counts.log_n_diff + log_binomial(d, d_star).ln() - 2.0 * (n as f64).ln() - counts.log_n1
}

/// `d* (log d - log d*) / n >= 1 / alpha`.
pub fn prop2_condition(d: f64, d_star: usize, n: usize, alpha: f64) -> bool {
    d_star as f64 * (d.ln() - (d_star as f64).ln()) / n as f64 >= 1.0 / alpha
}

/// `min(L2^2 / (2 d* L_inf^2), g_min^2 / (2^8 (1 + L2)^2 d* N(d*, 2L)))`,
/// where `N(d*, 2L)` counts the points of the radius-`(2 L d*)^{1/2}` ball
/// with a nonzero first entry.
pub fn c_star_lower<T: Real>(params: &ModelParams<T>) -> Result<T> {
    params.validate()?;
    let p = params;
    let ds = T::from_count(p.d_star);
    let n_2l = count_exact(p.d_star, grid_radius_sq(T::lit(2.0) * p.l, p.d_star)?)?;
    Ok((p.l2 * p.l2 / (T::lit(2.0) * ds * p.l_inf * p.l_inf)).min(
        p.g_min * p.g_min
            / (T::lit(256.0) * (T::one() + p.l2).powi(2) * ds * T::lit(n_2l.n_diff_f64())),
    ))
}

/// Every regime constant plus the four sample-size flags at `(n, alpha)`.
pub fn regime_constants<T: Real>(
    params: &ModelParams<T>,
    n: usize,
    alpha: T,
) -> Result<RegimeReport<T>> {
    params.validate()?;
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    if !(alpha > T::zero()) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    let p = params;
    let ds = T::from_count(p.d_star);
    let two = T::lit(2.0);

    let c_star_lower = c_star_lower(p)?;
    let c_star_upper = two * T::lit(3f64.ln()) / (ds * T::lit(1.5f64.ln()));

    let sp_2l = solve_saddle(two * p.l, default_root_tol())?;
    let c2_lower_scale_term = two * (p.g_min.ln() - (T::lit(17.0) * (p.sigma + p.l2)).ln());
    let c2_lower_saddle_term = diff_offset(&sp_2l);

    let sp_star = gamma_star(p.l, p.d_star)?;
    let (h, z) = (sp_star.h_val, sp_star.z_gamma);
    let root = (two * T::PI() * sp_star.l_pp).sqrt();
    let c2_upper = (h * h * z * (T::one() - z) * root / ((h - T::one()) * (h - T::one()))).ln()
        + T::lit(1.5f64.ln().ln() - 5f64.ln() - 3f64.ln().ln());

    // upper-bound conditions at the theorem tuning
    let tun = tuning(p, n)?;
    let log_card = T::lit(card_bound(tun.m.as_f64(), p.d, p.d_star));
    let nn = T::from_count(n);
    let thm1_cond_a = p.l_inf * p.l_inf * log_card / nn <= p.l2 * p.l2;
    let n_m = count_exact(p.d_star, tun.radius_sq as usize)?;
    let thm1_cond_b =
        T::lit(128.0) * (p.sigma + p.l2).powi(2) * T::lit(n_m.n_diff_f64()) * log_card
            / (nn * p.g_min * p.g_min)
            <= p.kappa;

    let n_star = count_exact(p.d_star, grid_radius_sq(sp_star.gamma, p.d_star)?)?;
    let thm2_hyp1 = hyp1_log_lhs(&n_star, p.d as f64, p.d_star, n) >= (alpha.as_f64() / 5.0).ln();

    Ok(RegimeReport {
        c_star_lower,
        c_star_upper,
        c1_lower: sp_2l.l_val,
        c2_lower: c2_lower_scale_term + c2_lower_saddle_term,
        c2_lower_scale_term,
        c2_lower_saddle_term,
        c1_upper: sp_star.l_val,
        c2_upper,
        gamma_star: sp_star.gamma,
        flags: RegimeFlags {
            thm1_cond_a,
            thm1_cond_b,
            thm2_hyp1,
            prop2_impossible: prop2_condition(p.d as f64, p.d_star, n, alpha.as_f64()),
        },
    })
}
