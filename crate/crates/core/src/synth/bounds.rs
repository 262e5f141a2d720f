use log::warn;
use ndarray::ArrayView2;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fourier::{basis_eval, ModelParams, Trig};
use crate::lattice::{count_exact, enumerate_ball_sq, floor_snapped, MultiIndex};
use crate::regime::{gamma_star, hyp1_log_lhs, prop2_condition};
use crate::scalar::Real;

/// Empirical Gram matrix of the basis over `S_{(d* L)^{1/2}, d*}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthReport<T> {
    /// Largest `|(1/n) sum_i phi_k(X_i) phi_k'(X_i)|` over distinct basis functions.
    pub max_offdiag: T,
    /// Largest `(1/n) sum_i phi_k(X_i)^2`.
    pub max_diag: T,
    /// `n / N1(d*, L)^2`.
    pub bound: T,
    pub satisfied: bool,
    /// Number of basis functions, the constant included.
    pub functions: usize,
}

/// Near-orthogonality of the basis on the sample rows of `x`.
///
/// The constant function and both trigonometric members of every canonical
/// nonzero frequency with `|k|^2 <= floor(d* L)`, `|k|_0 <= d*` take part.
/// Diagonal entries are reported apart from the off-diagonal maximum.
pub fn orth_check<T: Real>(x: ArrayView2<T>, d_star: usize, l: T) -> Result<OrthReport<T>> {
    let (n, d) = x.dim();
    if n == 0 {
        return Err(invalid("design has no rows"));
    }
    if d_star == 0 || d_star > d {
        return Err(invalid(format!(
            "need 1 <= d_star <= d = {d}, got {d_star}"
        )));
    }
    if !(l > T::zero() && l.is_finite()) {
        return Err(invalid(format!("L must be positive, got {l}")));
    }
    let radius_sq = floor_snapped((T::from_count(d_star) * l).as_f64())?;
    let mut functions = vec![(MultiIndex::zero(d), Trig::Cos)];
    for k in enumerate_ball_sq(d, radius_sq as u64, d_star)? {
        functions.push((k.clone(), Trig::Cos));
        functions.push((k, Trig::Sin));
    }
    if functions.len() < 2 {
        return Err(Error::EmptyFrequencySet);
    }

    let columns = functions
        .iter()
        .map(|(k, trig)| {
            x.rows()
                .into_iter()
                .map(|row| basis_eval(k, *trig, &row.to_vec()))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let nn = T::from_count(n);
    let mut max_offdiag = T::zero();
    let mut max_diag = T::zero();
    for (a, col_a) in columns.iter().enumerate() {
        for (b, col_b) in columns.iter().enumerate().skip(a) {
            let avg = col_a.iter().zip(col_b).map(|(&u, &v)| u * v).sum::<T>() / nn;
            if a == b {
                max_diag = max_diag.max(avg);
            } else {
                max_offdiag = max_offdiag.max(avg.abs());
            }
        }
    }

    let n1 = count_exact(d_star, radius_sq)?.n1_f64();
    let bound = nn / T::lit(n1 * n1);
    Ok(OrthReport {
        max_offdiag,
        max_diag,
        bound,
        satisfied: max_offdiag <= bound,
        functions: functions.len(),
    })
}

/// `4 |S| A^4 n^2 (1 + |S| eps / (4 n A^2))`, with `eps` bounding the
/// off-diagonal Gram entries.
pub fn fano_kl_bound<T: Real>(s_size: usize, a: T, n: usize, eps: T) -> T {
    let s = T::from_count(s_size);
    let nn = T::from_count(n);
    let a2 = a * a;
    T::lit(4.0) * s * a2 * a2 * nn * nn * (T::one() + s * eps / (T::lit(4.0) * nn * a2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundReport<T> {
    pub gamma_star: T,
    pub hyp1: bool,
    /// Log of the left side of the sample-size condition.
    pub hyp1_log_lhs: f64,
    pub prop2: bool,
    /// `(N1 - N2)^{-1/2}` at `gamma*`.
    pub a_value: T,
    /// `A^2 N1 < 1/(2 z_{gamma*}) + 1`.
    pub priors_in_class: bool,
    /// `alpha < (log 3 - log 2)/log 3`.
    pub alpha_admissible: bool,
}

/// Upper end of the `alpha` range in which the impossibility condition
/// carries its meaning.
pub fn alpha_max() -> f64 {
    (3f64.ln() - 2f64.ln()) / 3f64.ln()
}

/// Both impossibility conditions at `(n, alpha)` from exact counts at
/// `gamma*`, plus the perturbation amplitude and its class check.
pub fn lower_bound_conditions<T: Real>(
    params: &ModelParams<T>,
    n: usize,
    alpha: T,
) -> Result<LowerBoundReport<T>> {
    params.validate()?;
    if n == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let alpha = alpha.as_f64();
    if !(alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    let alpha_admissible = alpha < alpha_max();
    if !alpha_admissible {
        warn!(
            "alpha = {alpha} is not below {:.6}; the sample-size condition loses its meaning",
            alpha_max()
        );
    }
    let sp = gamma_star(params.l, params.d_star)?;
    let radius_sq = floor_snapped((sp.gamma * T::from_count(params.d_star)).as_f64())?;
    let counts = count_exact(params.d_star, radius_sq)?;
    let log_lhs = hyp1_log_lhs(&counts, params.d as f64, params.d_star, n);
    let a_value = T::lit((-0.5 * counts.log_n_diff).exp());
    // A^2 N1 = N1 / (N1 - N2)
    let ratio = (counts.log_n1 - counts.log_n_diff).exp();
    let z = sp.z_gamma.as_f64();
    Ok(LowerBoundReport {
        gamma_star: sp.gamma,
        hyp1: log_lhs >= (alpha / 5.0).ln(),
        hyp1_log_lhs: log_lhs,
        prop2: prop2_condition(params.d as f64, params.d_star, n, alpha),
        a_value,
        priors_in_class: ratio < 1.0 / (2.0 * z) + 1.0,
        alpha_admissible,
    })
}
