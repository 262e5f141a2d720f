use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fourier::{select, tuning, ModelParams, TuningParams, UniformDensity};
use crate::scalar::Real;
use crate::synth::{gen_design, gen_sample, SparseAdditiveFunction};

/// How the threshold is chosen in each trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LambdaRule<T> {
    /// Theorem constant.
    Theorem,
    /// `c * lambda_unit` in place of the theorem constant.
    Scaled(T),
    /// Fixed threshold, independent of `n`.
    Fixed(T),
}

impl<T: Real> LambdaRule<T> {
    pub fn tuning(&self, params: &ModelParams<T>, n: usize) -> Result<TuningParams<T>> {
        match *self {
            Self::Theorem => tuning(params, n),
            Self::Scaled(c) => TuningParams::with_lambda_scale(params, n, c),
            Self::Fixed(lambda) => TuningParams::with_lambda(params, lambda),
        }
    }
}

/// Regression function used in every trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FunctionSpec<T> {
    Fixed(SparseAdditiveFunction<T>),
    /// Fresh random pattern per trial, drawn from the trial generator before
    /// the design.
    Random {
        size: usize,
        amp_lo: f64,
        amp_hi: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig<T> {
    pub params: ModelParams<T>,
    pub n: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub function: FunctionSpec<T>,
    pub cap_at_d_star: bool,
    pub lambda_rule: LambdaRule<T>,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.n == 0 {
            return Err(invalid("sample size must be at least 1"));
        }
        match &self.function {
            FunctionSpec::Fixed(f) => f.validate_against(&self.params),
            &FunctionSpec::Random {
                size,
                amp_lo,
                amp_hi,
            } => {
                let p = &self.params;
                let (lo, hi) = (T::lit(amp_lo), T::lit(amp_hi));
                let s = T::from_count(size);
                if size > p.d_star || size > p.d {
                    return Err(invalid(format!("pattern size {size} exceeds d_star or d")));
                }
                if !(amp_lo > 0.0 && amp_lo <= amp_hi) {
                    return Err(invalid("amplitude range must satisfy 0 < lo <= hi"));
                }
                if lo * lo < p.kappa || hi * hi > p.l {
                    return Err(invalid("amplitude range incompatible with kappa or L"));
                }
                if s * T::SQRT_2() * hi > p.l_inf || s * hi * hi > p.l2 * p.l2 {
                    return Err(invalid("amplitude range incompatible with L2 or L_inf"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub trial_index: usize,
    /// The selected set equals the true pattern.
    pub recovered: bool,
    /// 0-based.
    pub selected_set: BTreeSet<usize>,
    pub seed_used: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub error_rate: f64,
    pub outcomes: Vec<TrialOutcome>,
}

pub fn trial_seed(base_seed: u64, trial_index: usize) -> u64 {
    base_seed.wrapping_add(trial_index as u64)
}

fn run_trial_inner<T: Real>(
    config: &ExperimentConfig<T>,
    trial_index: usize,
) -> Result<TrialOutcome> {
    let seed = trial_seed(config.base_seed, trial_index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn;
    let f = match &config.function {
        FunctionSpec::Fixed(f) => f,
        &FunctionSpec::Random {
            size,
            amp_lo,
            amp_hi,
        } => {
            drawn =
                SparseAdditiveFunction::random(config.params.d, size, amp_lo, amp_hi, &mut rng)?;
            &drawn
        }
    };
    let x = gen_design::<T, _>(config.n, config.params.d, &mut rng);
    let y = gen_sample(f, &x, config.params.sigma, &mut rng)?;
    let tuning = config.lambda_rule.tuning(&config.params, config.n)?;
    let result = select(
        x.view(),
        &y,
        &UniformDensity,
        &config.params,
        &tuning,
        config.cap_at_d_star,
    )?;
    let truth: BTreeSet<usize> = f.support().iter().copied().collect();
    Ok(TrialOutcome {
        trial_index,
        recovered: result.selected == truth,
        selected_set: result.selected,
        seed_used: seed,
    })
}

/// One replication with generator seed `base_seed + trial_index`.
pub fn run_trial<T: Real>(
    config: &ExperimentConfig<T>,
    trial_index: usize,
) -> Result<TrialOutcome> {
    config.validate()?;
    run_trial_inner(config, trial_index).map_err(|e| Error::Trial {
        trial: trial_index,
        source: Box::new(e),
    })
}

/// Runs all trials in parallel; outcomes come back in trial order.
pub fn mc_error<T: Real>(config: &ExperimentConfig<T>) -> Result<McResult> {
    config.validate()?;
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            run_trial_inner(config, i).map_err(|e| Error::Trial {
                trial: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = outcomes.iter().filter(|o| !o.recovered).count();
    Ok(McResult {
        error_rate: failures as f64 / config.trials as f64,
        outcomes,
    })
}
