//! Noisy softplus regression with a ReLU neuron, against SGD.
//!
//! Data: `y = ln(1 + exp(γx + δ)) + v`, `v ~ N(0, noise_var)`. Both learners
//! see the same instances in the same order, one pass, and are scored on the
//! same test set after each checkpoint.

use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::Serialize;

use super::baseline::ClassicPerceptron;
use super::metrics::{mean_std, rmse};
use super::{check_trials, grid, trial_rng};
use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::perceptron::{BayesianPerceptron, TrainingInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionConfig {
    pub seed: u64,
    pub trials: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub gamma: f64,
    pub delta: f64,
    pub noise_var: f64,
    pub train_range: (f64, f64),
    pub test_range: (f64, f64),
    pub prior_var: f64,
    pub epsilon: f64,
    /// SGD step size of the baseline.
    pub learning_rate: f64,
    pub checkpoints: Vec<usize>,
    /// Spacing of the x-grid on which predictive bands are recorded.
    pub band_step: f64,
    /// When false, timing columns are written as zero so output is reproducible byte for byte.
    pub measure_timing: bool,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 50,
            n_train: 20,
            n_test: 40,
            gamma: 2.0,
            delta: 1.0,
            noise_var: 0.01,
            train_range: (-4.0, 2.0),
            test_range: (-4.0, 4.0),
            prior_var: 1.0,
            epsilon: 0.01,
            learning_rate: 0.05,
            checkpoints: vec![1, 5, 10, 15, 20],
            band_step: 0.25,
            measure_timing: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionRecord {
    pub trial: usize,
    pub checkpoint_n: usize,
    pub bp_rmse: f64,
    pub grad_rmse: f64,
    pub bp_time_s: f64,
    pub grad_time_s: f64,
}

/// Predictive mean and 3σ band of the Bayesian neuron at one x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub trial: usize,
    pub checkpoint_n: usize,
    pub x: f64,
    pub truth: f64,
    pub bp_mean: f64,
    pub bp_lower: f64,
    pub bp_upper: f64,
    pub grad_mean: f64,
}

#[derive(Debug, Clone)]
pub struct RegressionTrial {
    pub records: Vec<RegressionRecord>,
    pub bands: Vec<BandPoint>,
    /// Predictive standard deviation after all training, at x = -1 and x = 4.
    pub sigma_y_at_minus1: f64,
    pub sigma_y_at_4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointSummary {
    pub checkpoint_n: usize,
    pub bp_mean: f64,
    pub bp_std: f64,
    pub grad_mean: f64,
    pub grad_std: f64,
    pub bp_time_mean: f64,
    pub grad_time_mean: f64,
}

#[derive(Debug, Clone)]
pub struct RegressionRun {
    pub trials: Vec<RegressionTrial>,
    pub checkpoints: Vec<CheckpointSummary>,
    /// Share of trials where the predictive σ_y at x = 4 exceeds that at x = -1.
    pub wider_off_data: f64,
}

impl RegressionRun {
    pub fn records(&self) -> Vec<RegressionRecord> {
        self.trials
            .iter()
            .flat_map(|t| t.records.iter().copied())
            .collect()
    }

    pub fn bands(&self) -> Vec<BandPoint> {
        self.trials
            .iter()
            .flat_map(|t| t.bands.iter().copied())
            .collect()
    }
}

pub fn softplus(x: f64, gamma: f64, delta: f64) -> f64 {
    let z = gamma * x + delta;
    // ln(1 + e^z) without overflow
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sample_instances<R: Rng>(
    rng: &mut R,
    cfg: &RegressionConfig,
    n: usize,
    range: (f64, f64),
) -> Result<Vec<TrainingInstance<f64>>> {
    let noise = Normal::new(0.0, cfg.noise_var.sqrt())
        .map_err(|e| Error::InvalidConfig(format!("noise: {e}")))?;
    Ok((0..n)
        .map(|_| {
            let x = rng.random_range(range.0..=range.1);
            let y = softplus(x, cfg.gamma, cfg.delta) + noise.sample(rng);
            TrainingInstance::new(vec![x], y)
        })
        .collect())
}

fn with_bias(x: f64) -> Vec<f64> {
    vec![1.0, x]
}

fn run_trial(cfg: &RegressionConfig, trial: usize, band_xs: &[f64]) -> Result<RegressionTrial> {
    let mut rng = trial_rng(cfg.seed, trial);
    let train = sample_instances(&mut rng, cfg, cfg.n_train, cfg.train_range)?;
    let test = sample_instances(&mut rng, cfg, cfg.n_test, cfg.test_range)?;
    // the baseline starts from a draw of the Bayesian prior N(0, prior_var·I)
    let init: Vec<f64> = (0..2)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * cfg.prior_var.sqrt()
        })
        .collect();

    let mut bp = BayesianPerceptron::with_isotropic_prior(
        1,
        true,
        Activation::relu(),
        vec![0.0, 0.0],
        cfg.prior_var,
    )?
    .with_epsilon(cfg.epsilon)?;
    let mut grad = ClassicPerceptron::new(init, cfg.learning_rate, Activation::relu())?;

    let test_y: Vec<f64> = test.iter().map(|t| t.y).collect();
    let (mut bp_time, mut grad_time) = (0.0, 0.0);
    let mut records = Vec::with_capacity(cfg.checkpoints.len());
    let mut bands = Vec::new();
    for (i, inst) in train.iter().enumerate() {
        let start = cfg.measure_timing.then(Instant::now);
        bp = bp.update(inst).map_err(|e| Error::Instance {
            index: i,
            source: Box::new(e),
        })?;
        if let Some(s) = start {
            bp_time += s.elapsed().as_secs_f64();
        }

        let biased = TrainingInstance::new(with_bias(inst.x[0]), inst.y);
        let start = cfg.measure_timing.then(Instant::now);
        grad = grad.gradient_regression_step(&biased)?;
        if let Some(s) = start {
            grad_time += s.elapsed().as_secs_f64();
        }

        let n = i + 1;
        if !cfg.checkpoints.contains(&n) {
            continue;
        }
        let bp_pred = test
            .iter()
            .map(|t| bp.predict(&t.x).map(|p| p.mu_y))
            .collect::<Result<Vec<_>>>()?;
        let grad_pred = test
            .iter()
            .map(|t| grad.predict(&with_bias(t.x[0])))
            .collect::<Result<Vec<_>>>()?;
        records.push(RegressionRecord {
            trial,
            checkpoint_n: n,
            bp_rmse: rmse(&bp_pred, &test_y)?,
            grad_rmse: rmse(&grad_pred, &test_y)?,
            bp_time_s: bp_time,
            grad_time_s: grad_time,
        });
        for &x in band_xs {
            let p = bp.predict(&[x])?;
            let sd = p.sigma_y2.sqrt();
            bands.push(BandPoint {
                trial,
                checkpoint_n: n,
                x,
                truth: softplus(x, cfg.gamma, cfg.delta),
                bp_mean: p.mu_y,
                bp_lower: p.mu_y - 3.0 * sd,
                bp_upper: p.mu_y + 3.0 * sd,
                grad_mean: grad.predict(&with_bias(x))?,
            });
        }
    }
    Ok(RegressionTrial {
        records,
        bands,
        sigma_y_at_minus1: bp.predict(&[-1.0])?.sigma_y2.sqrt(),
        sigma_y_at_4: bp.predict(&[4.0])?.sigma_y2.sqrt(),
    })
}

pub fn run_softplus_regression(cfg: &RegressionConfig) -> Result<RegressionRun> {
    check_trials(cfg.trials)?;
    if cfg.checkpoints.is_empty() || cfg.checkpoints.iter().any(|&c| c == 0 || c > cfg.n_train) {
        return Err(Error::InvalidConfig(format!(
            "checkpoints must lie in 1..={}",
            cfg.n_train
        )));
    }
    if !(cfg.noise_var >= 0.0) || cfg.n_test == 0 || !(cfg.band_step > 0.0) {
        return Err(Error::InvalidConfig(
            "noise variance must be non-negative, test set and band step positive".into(),
        ));
    }
    let band_xs = grid(cfg.test_range.0, cfg.test_range.1, cfg.band_step);
    // sequential so that wall-clock timings are not skewed by contention
    let trials = (0..cfg.trials)
        .map(|t| run_trial(cfg, t, &band_xs))
        .collect::<Result<Vec<_>>>()?;

    let mut checkpoints = Vec::new();
    for &n in &cfg.checkpoints {
        let at: Vec<&RegressionRecord> = trials
            .iter()
            .flat_map(|t| t.records.iter())
            .filter(|r| r.checkpoint_n == n)
            .collect();
        let col = |f: fn(&RegressionRecord) -> f64| at.iter().map(|r| f(r)).collect::<Vec<_>>();
        let (bp_mean, bp_std) = mean_std(&col(|r| r.bp_rmse))?;
        let (grad_mean, grad_std) = mean_std(&col(|r| r.grad_rmse))?;
        checkpoints.push(CheckpointSummary {
            checkpoint_n: n,
            bp_mean,
            bp_std,
            grad_mean,
            grad_std,
            bp_time_mean: mean_std(&col(|r| r.bp_time_s))?.0,
            grad_time_mean: mean_std(&col(|r| r.grad_time_s))?.0,
        });
    }
    let wider_off_data = trials
        .iter()
        .filter(|t| t.sigma_y_at_4 > t.sigma_y_at_minus1)
        .count() as f64
        / trials.len() as f64;
    Ok(RegressionRun {
        trials,
        checkpoints,
        wider_off_data,
    })
}
