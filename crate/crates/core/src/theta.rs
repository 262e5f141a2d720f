//! Jacobi theta function `h(z) = sum_{r in Z} z^{r^2}` on `[0, 1)`, the
//! saddle point `z_gamma` of `l_gamma(z) = log h(z) - gamma log z`, and the
//! saddle-point equivalents of the ball counts.
//!
//! The saddle equation `l'_gamma(z) = 0` is solved in `y = -log z`, where it
//! reads `phi(y) = gamma` with
//! `phi(y) = sum k^2 e^{-y k^2} / sum e^{-y k^2}` strictly decreasing from
//! `+inf` to `0`. Its derivative is minus the variance of `k^2` under the
//! weights `e^{-y k^2}`, evaluated in closed form.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Relative truncation tolerance for the theta series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-15;

/// Relative truncation tolerance for the moment sums behind `phi`.
const MOMENT_TOL: f64 = 1e-16;

const MAX_BRACKET_STEPS: usize = 2000;
const MAX_BISECTIONS: usize = 200;
const MAX_NEWTON_STEPS: usize = 100;
/// Series cost grows like `y^{-1/2}`; below this the bracket search gives up.
const MIN_Y: f64 = 1e-12;

/// Root tolerance used when callers do not supply one: about `4096 eps`.
pub fn default_root_tol<T: Real>() -> T {
    T::epsilon() * T::lit(4096.0)
}

/// `h(z) = 1 + 2 sum_{j >= 1} z^{j^2}` truncated once the next term drops
/// below `tol` times the running sum.
pub fn theta_h<T: Real>(z: T, tol: T) -> Result<T> {
    if !(z >= T::zero() && z < T::one()) {
        return Err(invalid(format!("theta_h needs z in [0, 1), got {z}")));
    }
    if !(tol > T::zero()) {
        return Err(invalid("tolerance must be positive"));
    }
    let two = T::lit(2.0);
    let mut sum = T::one();
    if z == T::zero() {
        return Ok(sum);
    }
    let log_z = z.ln();
    for j in 1u64.. {
        let term = two * (log_z * T::lit((j * j) as f64)).exp();
        if term < tol * sum {
            break;
        }
        sum += term;
    }
    Ok(sum)
}

/// `(sum w_k, sum k^2 w_k, sum k^4 w_k)` over `k in Z` with `w_k = e^{-y k^2}`.
fn moments<T: Real>(y: T) -> (T, T, T) {
    let tol = T::lit(MOMENT_TOL);
    let two = T::lit(2.0);
    let (mut s0, mut s2, mut s4) = (T::one(), T::zero(), T::zero());
    for k in 1u64.. {
        let k2 = T::lit((k * k) as f64);
        let w = two * (-y * k2).exp();
        let t4 = w * k2 * k2;
        s0 += w;
        s2 += w * k2;
        s4 += t4;
        // k^4 e^{-y k^2} peaks at k^2 = 2 / y; only stop on the way down
        if y * k2 > two && (t4 <= tol * s4 || w == T::zero()) {
            break;
        }
    }
    (s0, s2, s4)
}

fn check_y<T: Real>(y: T) -> Result<()> {
    if y > T::zero() && y.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("phi needs y > 0, got {y}")))
    }
}

/// `phi(y) = e^{-y} h'(e^{-y}) / h(e^{-y})`.
pub fn phi<T: Real>(y: T) -> Result<T> {
    check_y(y)?;
    let (s0, s2, _) = moments(y);
    Ok(s2 / s0)
}

/// `phi'(y) = -(E[k^4] - E[k^2]^2)`, strictly negative.
pub fn phi_prime<T: Real>(y: T) -> Result<T> {
    check_y(y)?;
    let (s0, s2, s4) = moments(y);
    let mean = s2 / s0;
    Ok(-(s4 / s0 - mean * mean))
}

fn phi_and_prime<T: Real>(y: T) -> (T, T) {
    let (s0, s2, s4) = moments(y);
    let mean = s2 / s0;
    (mean, -(s4 / s0 - mean * mean))
}

/// Solution of `l'_gamma(z) = 0` in `(0, 1)` together with the quantities the
/// asymptotic formulas need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddlePoint<T> {
    pub gamma: T,
    pub y_gamma: T,
    /// `z_gamma = exp(-y_gamma)`
    pub z_gamma: T,
    /// `h(z_gamma)`
    pub h_val: T,
    /// `l_gamma(z_gamma) = log h(z_gamma) - gamma log z_gamma`
    pub l_val: T,
    /// `l''_gamma(z_gamma) = -z_gamma^{-2} phi'(y_gamma)`
    pub l_pp: T,
    /// Achieved `|phi(y_gamma) - gamma|`.
    pub tol: T,
}

/// Bracketing bisection on `phi(y) = gamma` followed by safeguarded Newton.
pub fn solve_saddle<T: Real>(gamma: T, tol: T) -> Result<SaddlePoint<T>> {
    if !(gamma > T::zero() && gamma.is_finite()) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")));
    }
    if !(tol > T::zero()) {
        return Err(invalid("tolerance must be positive"));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let breakdown = |residual: T| Error::NoConvergence {
        gamma: gamma.as_f64(),
        tol: tol.as_f64(),
        residual: residual.as_f64(),
    };

    let (mut lo, mut hi) = (T::lit(1e-8), T::one());
    let mut steps = 0;
    while phi_and_prime(hi).0 >= gamma {
        hi = hi * two;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
            return Err(breakdown(T::infinity()));
        }
    }
    while phi_and_prime(lo).0 <= gamma {
        lo = lo * half;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || lo < T::lit(MIN_Y) {
            return Err(breakdown(T::infinity()));
        }
    }

    // phi(lo) > gamma > phi(hi)
    let coarse = T::lit(1e-3);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= coarse * hi {
            break;
        }
        let mid = half * (lo + hi);
        if phi_and_prime(mid).0 > gamma {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut y = half * (lo + hi);
    let (mut value, mut slope) = phi_and_prime(y);
    let mut residual = value - gamma;
    for _ in 0..MAX_NEWTON_STEPS {
        if residual.abs() <= tol {
            break;
        }
        if residual > T::zero() {
            lo = y;
        } else {
            hi = y;
        }
        let mut next = y - residual / slope;
        if !(next > lo && next < hi) {
            next = half * (lo + hi);
        }
        if next == y {
            break;
        }
        y = next;
        (value, slope) = phi_and_prime(y);
        residual = value - gamma;
    }
    if !(residual.abs() <= tol) {
        return Err(breakdown(residual.abs()));
    }

    let z = (-y).exp();
    let h_val = theta_h(z, T::lit(DEFAULT_SERIES_TOL).max(T::epsilon()))?;
    Ok(SaddlePoint {
        gamma,
        y_gamma: y,
        z_gamma: z,
        h_val,
        l_val: h_val.ln() + gamma * y,
        l_pp: -slope / (z * z),
        tol: residual.abs(),
    })
}

/// Natural logs of the saddle-point equivalents of `N1`, `N2`, `N1 - N2`
/// with the vanishing remainder dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticCount<T> {
    pub d_star: usize,
    pub gamma: T,
    pub log_n1_asym: T,
    pub log_n2_asym: T,
    pub log_n_diff_asym: T,
}

/// `log{ h z (1 - z) sqrt(2 pi l'') / (h - 1) }`, the constant offset shared
/// by the `N1 - N2` equivalent and the regime constants.
pub fn diff_offset<T: Real>(sp: &SaddlePoint<T>) -> T {
    let z = sp.z_gamma;
    let root = (T::lit(2.0) * T::PI() * sp.l_pp).sqrt();
    (sp.h_val * z * (T::one() - z) * root / (sp.h_val - T::one())).ln()
}

/// Equivalents evaluated at a precomputed saddle point.
///
/// Faithful comparison with exact counts needs `gamma * d_star` integral.
pub fn asymptotic_counts_at<T: Real>(sp: &SaddlePoint<T>, d_star: usize) -> AsymptoticCount<T> {
    let d = T::from_count(d_star);
    let z = sp.z_gamma;
    let two_pi = T::lit(2.0) * T::PI();
    let log_n1 =
        d * sp.l_val - (z * (T::one() - z)).ln() - T::lit(0.5) * (two_pi * sp.l_pp * d).ln();
    AsymptoticCount {
        d_star,
        gamma: sp.gamma,
        log_n1_asym: log_n1,
        log_n2_asym: log_n1 - sp.h_val.ln(),
        log_n_diff_asym: d * sp.l_val - T::lit(0.5) * d.ln() - diff_offset(sp),
    }
}

pub fn asymptotic_counts<T: Real>(d_star: usize, gamma: T) -> Result<AsymptoticCount<T>> {
    if d_star == 0 {
        return Err(invalid("d_star must be at least 1"));
    }
    let sp = solve_saddle(gamma, default_root_tol())?;
    Ok(asymptotic_counts_at(&sp, d_star))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow<T> {
    pub gamma: T,
    pub z_gamma: T,
    pub l_value: T,
}

/// `gamma -> (z_gamma, l_gamma(z_gamma))` over a positive increasing grid.
pub fn figure_curves<T: Real>(gamma_grid: &[T]) -> Result<Vec<CurveRow<T>>> {
    if gamma_grid.iter().any(|&g| !(g > T::zero())) {
        return Err(invalid("gamma grid must be positive"));
    }
    if gamma_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("gamma grid must be strictly increasing"));
    }
    gamma_grid
        .par_iter()
        .map(|&gamma| {
            let sp = solve_saddle(gamma, default_root_tol())?;
            Ok(CurveRow {
                gamma,
                z_gamma: sp.z_gamma,
                l_value: sp.l_val,
            })
        })
        .collect()
}
