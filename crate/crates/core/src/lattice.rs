//! Exact counting and enumeration of integer lattice points in Euclidean
//! balls.
//!
//! Representation numbers `a_r = #{k in Z^p : |k|^2 = r}` are the power-series
//! coefficients of `h(z)^p` where `h(z) = 1 + 2 z + 2 z^4 + 2 z^9 + ...`. They
//! are computed by truncated polynomial powering (repeated squaring), so the
//! counts below stay exact for any dimension when the counter is `BigUint`.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::scalar::{biguint_ln, CountInt, Real};

/// Sparse integer frequency vector `k in Z^d`.
///
/// `support` holds 0-based coordinate indices in strictly increasing order,
/// `values` the matching nonzero entries. The zero vector has empty support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex {
    dimension: usize,
    support: Vec<usize>,
    values: Vec<i64>,
}

impl MultiIndex {
    pub fn new(dimension: usize, support: Vec<usize>, values: Vec<i64>) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("multi-index dimension must be positive"));
        }
        if support.len() != values.len() {
            return Err(invalid(format!(
                "support has {} entries but values has {}",
                support.len(),
                values.len()
            )));
        }
        if !support.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid("support indices must be strictly increasing"));
        }
        if support.last().is_some_and(|&j| j >= dimension) {
            return Err(invalid(format!(
                "support index out of range for dimension {dimension}"
            )));
        }
        if values.contains(&0) {
            return Err(invalid("multi-index values must be nonzero"));
        }
        Ok(Self {
            dimension,
            support,
            values,
        })
    }

    pub fn zero(dimension: usize) -> Self {
        Self {
            dimension,
            support: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from a dense vector, dropping zero entries.
    pub fn from_dense(dense: &[i64]) -> Result<Self> {
        let (support, values) = dense
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(j, &v)| (j, v))
            .unzip();
        Self::new(dense.len(), support, values)
    }

    /// Unit vector `e_j` (0-based).
    pub fn unit(dimension: usize, j: usize) -> Result<Self> {
        Self::new(dimension, vec![j], vec![1])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `|k|_0`
    pub fn l0(&self) -> usize {
        self.support.len()
    }

    /// `|k|_2^2`, exact.
    pub fn norm_sq(&self) -> u64 {
        self.values.iter().map(|v| v.unsigned_abs().pow(2)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// First nonzero entry positive (the zero index is not canonical).
    pub fn is_canonical(&self) -> bool {
        self.values.first().is_some_and(|&v| v > 0)
    }

    /// Entry at coordinate `j` (0 when off the support).
    pub fn get(&self, j: usize) -> i64 {
        self.support
            .binary_search(&j)
            .map(|pos| self.values[pos])
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<i64> {
        let mut dense = vec![0; self.dimension];
        for (&j, &v) in self.support.iter().zip(&self.values) {
            dense[j] = v;
        }
        dense
    }

    /// `-k`
    pub fn negated(&self) -> Self {
        Self {
            dimension: self.dimension,
            support: self.support.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// `k . x`, touching only support coordinates.
    pub fn dot<T: Real>(&self, x: &[T]) -> T {
        self.support
            .iter()
            .zip(&self.values)
            .map(|(&j, &v)| T::lit(v as f64) * x[j])
            .sum()
    }

    /// Copy with coordinates relabelled by `perm` (new index of old `j` is
    /// `perm[j]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut pairs: Vec<(usize, i64)> = self
            .support
            .iter()
            .zip(&self.values)
            .map(|(&j, &v)| (perm[j], v))
            .collect();
        pairs.sort_unstable();
        let (support, values) = pairs.into_iter().unzip();
        Self::new(self.dimension, support, values)
    }
}

/// Sparse textual form, 1-based: `{1:2, 4:-1}`.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (j, v)) in self.support.iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", j + 1, v)?;
        }
        write!(f, "}}")
    }
}

/// Representation numbers `a_0..a_R` of `Z^dimension`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepSeries<I> {
    pub dimension: usize,
    pub radius_sq_max: usize,
    pub coeffs: Vec<I>,
}

impl<I: CountInt> RepSeries<I> {
    /// Number of lattice points with `|k|^2 <= radius_sq` (clamped to `R`).
    pub fn cumulative(&self, radius_sq: usize) -> I {
        let mut total = I::zero();
        for c in &self.coeffs[..=radius_sq.min(self.radius_sq_max)] {
            total += c.clone();
        }
        total
    }

    /// Series of `Z^(p+q)` from series of `Z^p` and `Z^q`, truncated to the
    /// shorter radius.
    pub fn convolve(&self, other: &Self) -> Self {
        let radius = self.radius_sq_max.min(other.radius_sq_max);
        Self {
            dimension: self.dimension + other.dimension,
            radius_sq_max: radius,
            coeffs: mul_truncated(&self.coeffs, &other.coeffs, radius + 1),
        }
    }
}

/// Coefficients of `h(z) = sum_{j in Z} z^{j^2}` up to degree `radius_sq_max`.
fn theta_series<I: CountInt>(radius_sq_max: usize) -> Vec<I> {
    let two = I::one() + I::one();
    let mut coeffs = vec![I::zero(); radius_sq_max + 1];
    coeffs[0] = I::one();
    for j in 1.. {
        let r = j * j;
        if r > radius_sq_max {
            break;
        }
        coeffs[r] = two.clone();
    }
    coeffs
}

fn mul_truncated<I: CountInt>(a: &[I], b: &[I], len: usize) -> Vec<I> {
    let mut out = vec![I::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j].add_product(ai, bj);
            }
        }
    }
    out
}

/// `h(z)^exponent mod z^(R+1)`; exponent 0 gives the constant series 1.
fn theta_power<I: CountInt>(exponent: usize, radius_sq_max: usize) -> Vec<I> {
    let len = radius_sq_max + 1;
    let mut result = vec![I::zero(); len];
    result[0] = I::one();
    let mut base = theta_series::<I>(radius_sq_max);
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_truncated(&result, &base, len);
        }
        e >>= 1;
        if e > 0 {
            base = mul_truncated(&base, &base, len);
        }
    }
    result
}

/// Exact `a_0..a_R` for `Z^dimension`.
pub fn representation_numbers<I: CountInt>(
    dimension: usize,
    radius_sq_max: usize,
) -> Result<RepSeries<I>> {
    if dimension == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    Ok(RepSeries {
        dimension,
        radius_sq_max,
        coeffs: theta_power(dimension, radius_sq_max),
    })
}

/// Exact ball counts `N1`, `N2` and `N = N1 - N2` with log companions.
#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub n1: BigUint,
    pub n2: BigUint,
    pub n_diff: BigUint,
    pub log_n1: f64,
    pub log_n2: f64,
    pub log_n_diff: f64,
}

impl CountResult {
    fn new(n1: BigUint, n2: BigUint) -> Self {
        let n_diff = &n1 - &n2;
        Self {
            log_n1: biguint_ln(&n1),
            log_n2: biguint_ln(&n2),
            log_n_diff: biguint_ln(&n_diff),
            n1,
            n2,
            n_diff,
        }
    }

    pub fn n1_f64(&self) -> f64 {
        self.n1.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn n2_f64(&self) -> f64 {
        self.n2.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn n_diff_f64(&self) -> f64 {
        self.n_diff.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Counts lattice points of `Z^d_star` with `|k|^2 <= radius_sq` (`n1`), the
/// subset with `k_1 = 0` (`n2`), and those with `k_1 != 0` (`n_diff`).
pub fn count_exact(d_star: usize, radius_sq: usize) -> Result<CountResult> {
    if d_star == 0 {
        return Err(invalid("d_star must be at least 1"));
    }
    let len = radius_sq + 1;
    let slice: Vec<BigUint> = theta_power(d_star - 1, radius_sq);
    let full = mul_truncated(&slice, &theta_series::<BigUint>(radius_sq), len);
    let n1: BigUint = full.iter().sum();
    let n2: BigUint = slice.iter().sum();
    Ok(CountResult::new(n1, n2))
}

/// `floor(x)` for nonnegative `x`, snapping values within `1e-9` relative of
/// an integer to that integer so that `sqrt(8)^2` counts as 8.
pub fn floor_snapped(x: f64) -> Result<usize> {
    if !x.is_finite() || x < 0.0 {
        return Err(invalid(format!(
            "expected a finite nonnegative value, got {x}"
        )));
    }
    let nearest = x.round();
    let snapped = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        x.floor()
    };
    Ok(snapped as usize)
}

/// Value patterns of one `|k|_0` level: length-`level` vectors of nonzero
/// integers, first entry positive, squared norm at most `radius_sq`, in
/// lexicographic order.
fn level_patterns(level: usize, radius_sq: u64) -> Vec<Vec<i64>> {
    fn extend(prefix: &mut Vec<i64>, level: usize, budget: u64, out: &mut Vec<Vec<i64>>) {
        let remaining = (level - prefix.len()) as u64;
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        // every later entry needs at least 1 from the budget
        let room = budget - (remaining - 1);
        let vmax = room.isqrt() as i64;
        let lower = if prefix.is_empty() { 1 } else { -vmax };
        for v in lower..=vmax {
            if v == 0 {
                continue;
            }
            prefix.push(v);
            extend(prefix, level, budget - v.unsigned_abs().pow(2), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if level as u64 <= radius_sq {
        extend(&mut Vec::with_capacity(level), level, radius_sq, &mut out);
    }
    out
}

/// Canonical members of `S_{m,ell}` with exactly `level` nonzero coordinates,
/// supports in lexicographic order, then values in lexicographic order.
pub fn enumerate_level(
    d: usize,
    radius_sq: u64,
    level: usize,
) -> impl Iterator<Item = MultiIndex> + Send {
    let patterns = Arc::new(if level == 0 || level > d {
        Vec::new()
    } else {
        level_patterns(level, radius_sq)
    });
    let supports = if patterns.is_empty() {
        None
    } else {
        Some((0..d).combinations(level))
    };
    supports.into_iter().flatten().flat_map(move |support| {
        let patterns = Arc::clone(&patterns);
        (0..patterns.len()).map(move |p| MultiIndex {
            dimension: d,
            support: support.clone(),
            values: patterns[p].clone(),
        })
    })
}

/// Stream of canonical nonzero members of
/// `{k in Z^d : |k|^2 <= radius_sq, |k|_0 <= ell}`, grouped by increasing
/// `|k|_0`.
pub fn enumerate_ball_sq(
    d: usize,
    radius_sq: u64,
    ell: usize,
) -> Result<impl Iterator<Item = MultiIndex> + Send> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if ell > d {
        return Err(invalid(format!("ell = {ell} exceeds dimension d = {d}")));
    }
    Ok((1..=ell).flat_map(move |level| enumerate_level(d, radius_sq, level)))
}

/// [`enumerate_ball_sq`] with the radius given as a real `m`, using the
/// integer bound `floor(m^2)`.
pub fn enumerate_ball(
    d: usize,
    m: f64,
    ell: usize,
) -> Result<impl Iterator<Item = MultiIndex> + Send> {
    if m.is_nan() || m <= 0.0 {
        return Err(invalid(format!("radius m must be positive, got {m}")));
    }
    enumerate_ball_sq(d, floor_snapped(m * m)? as u64, ell)
}

/// `d* log(6 m d)`, the log of the bound `Card(S_{m,d*}) + 1 <= (6md)^{d*}`.
pub fn card_bound(m: f64, d: usize, d_star: usize) -> f64 {
    d_star as f64 * (6.0 * m * d as f64).ln()
}
