use std::collections::BTreeSet;

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::basis::Trig;
use crate::fourier::coeff::{CoefficientSource, DesignDensity, SampleCoefficients};
use crate::fourier::params::{ModelParams, TuningParams};
use crate::lattice::{enumerate_level, MultiIndex};
use crate::scalar::Real;

/// A coefficient that cleared the threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionRecord<T> {
    pub index: MultiIndex,
    pub trig: Trig,
    pub value: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult<T> {
    /// Selected coordinates, 0-based.
    pub selected: BTreeSet<usize>,
    pub records: Vec<SelectionRecord<T>>,
    /// Highest `|k|_0` level examined.
    pub levels_visited: usize,
    /// The `d*` cap was reached.
    pub stopped_early: bool,
}

/// Threshold estimator over `S_{m,d*}`, one `|k|_0` level at a time.
///
/// Every coordinate in the support of a frequency whose cosine or sine
/// coefficient exceeds `lambda` in magnitude (strictly) is selected. With
/// `cap_at_d_star` the search ends after the first level at which `d*`
/// coordinates have been selected; the decision is only taken at level
/// boundaries, so the result does not depend on evaluation order within a
/// level.
pub fn select_with<T: Real, S: CoefficientSource<T>>(
    source: &S,
    params: &ModelParams<T>,
    tuning: &TuningParams<T>,
    cap_at_d_star: bool,
) -> Result<SelectionResult<T>> {
    params.validate()?;
    if source.dimension() != params.d {
        return Err(Error::DimensionMismatch(format!(
            "coefficient source has dimension {}, params say d = {}",
            source.dimension(),
            params.d
        )));
    }
    let mut result = SelectionResult {
        selected: BTreeSet::new(),
        records: Vec::new(),
        levels_visited: 0,
        stopped_early: false,
    };
    for level in 1..=params.d_star {
        let frequencies: Vec<MultiIndex> =
            enumerate_level(params.d, tuning.radius_sq, level).collect();
        let pairs = frequencies
            .par_iter()
            .map(|k| source.coefficient_pair(k))
            .collect::<Result<Vec<_>>>()?;
        result.levels_visited = level;
        for (k, (cos, sin)) in frequencies.into_iter().zip(pairs) {
            let mut fired = false;
            for (trig, value) in [(Trig::Cos, cos), (Trig::Sin, sin)] {
                if value.abs() > tuning.lambda {
                    fired = true;
                    result.records.push(SelectionRecord {
                        index: k.clone(),
                        trig,
                        value,
                    });
                }
            }
            if fired {
                result.selected.extend(k.support().iter().copied());
            }
        }
        if cap_at_d_star && result.selected.len() >= params.d_star {
            result.stopped_early = true;
            break;
        }
    }
    Ok(result)
}

/// [`select_with`] on empirical coefficients of the sample `(x, y)`.
pub fn select<T: Real>(
    x: ArrayView2<T>,
    y: &[T],
    density: &impl DesignDensity<T>,
    params: &ModelParams<T>,
    tuning: &TuningParams<T>,
    cap_at_d_star: bool,
) -> Result<SelectionResult<T>> {
    let max_abs_freq = tuning.radius_sq.isqrt() as usize;
    let source = SampleCoefficients::new(x, y, density, max_abs_freq)?;
    select_with(&source, params, tuning, cap_at_d_star)
}
