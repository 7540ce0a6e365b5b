//! Pre-activation posterior quality over a `(μ_a, σ_a²)` grid.
//!
//! For each grid point the label is `y = 1` iff `μ_a > 0`; the closed-form
//! refinement `(μ_i, σ_i²)` of a sigmoid neuron is compared with the
//! numerically integrated posterior under the likelihood `N(y; s(a), ε)`.

use rayon::prelude::*;
use serde::Serialize;

use super::grid;
use super::metrics::{cumulative_abs_error_distribution, mean_std};
use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::gaussian::Gaussian1D;
use crate::oracle::{true_posterior_a, QuadratureConfig};
use crate::perceptron::refine_preactivation;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthConfig {
    /// Noise variance of the oracle likelihood and of the closed-form update.
    pub epsilon: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_step: f64,
    pub var_max: f64,
    pub var_step: f64,
    pub quadrature: QuadratureConfig,
}

impl Default for GroundTruthConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            mu_min: -3.0,
            mu_max: 3.0,
            mu_step: 0.1,
            var_max: 2.0,
            var_step: 0.2,
            quadrature: QuadratureConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundTruthRecord {
    pub mu_a: f64,
    pub sigma_a2: f64,
    pub y: f64,
    pub approx_mean: f64,
    pub approx_var: f64,
    pub true_mean: f64,
    pub true_var: f64,
    pub mean_abs_err: f64,
    pub var_abs_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthSummary {
    pub mean_mae: f64,
    pub mean_err_std: f64,
    pub var_mae: f64,
    pub var_err_std: f64,
    /// Share of grid points whose posterior-mean error is at most 0.2.
    pub mean_err_within_0_2: f64,
    pub mean_err_cdf: Vec<(f64, f64)>,
    pub var_err_cdf: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct GroundTruthRun {
    pub records: Vec<GroundTruthRecord>,
    pub summary: GroundTruthSummary,
}

/// `1` for `μ_a > 0`, otherwise `0`.
pub fn heaviside_label(mu_a: f64) -> f64 {
    if mu_a > 0.0 {
        1.0
    } else {
        0.0
    }
}

fn evaluate_point(cfg: &GroundTruthConfig, mu_a: f64, sigma_a2: f64) -> Result<GroundTruthRecord> {
    let y = heaviside_label(mu_a);
    let prior = Gaussian1D::new(mu_a, sigma_a2)?;
    let approx = refine_preactivation(&Activation::Sigmoid, prior, y, cfg.epsilon)?.posterior;
    let truth = if sigma_a2 == 0.0 {
        Gaussian1D::point(mu_a)
    } else {
        true_posterior_a(&Activation::Sigmoid, prior, y, cfg.epsilon, &cfg.quadrature)?
    };
    Ok(GroundTruthRecord {
        mu_a,
        sigma_a2,
        y,
        approx_mean: approx.mean,
        approx_var: approx.variance,
        true_mean: truth.mean,
        true_var: truth.variance,
        mean_abs_err: (approx.mean - truth.mean).abs(),
        var_abs_err: (approx.variance - truth.variance).abs(),
    })
}

pub fn run_ground_truth_comparison(cfg: &GroundTruthConfig) -> Result<GroundTruthRun> {
    if !(cfg.epsilon > 0.0) || !(cfg.mu_step > 0.0) || !(cfg.var_step > 0.0) {
        return Err(Error::InvalidConfig(
            "epsilon and grid steps must be positive".into(),
        ));
    }
    let points: Vec<(f64, f64)> = grid(cfg.mu_min, cfg.mu_max, cfg.mu_step)
        .into_iter()
        .flat_map(|mu| {
            grid(0.0, cfg.var_max, cfg.var_step)
                .into_iter()
                .map(move |v| (mu, v))
        })
        .collect();
    let records = points
        .par_iter()
        .map(|&(mu, v)| {
            evaluate_point(cfg, mu, v).map_err(|e| Error::GridPoint {
                mu_a: mu,
                sigma_a2: v,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mean_errs: Vec<f64> = records.iter().map(|r| r.mean_abs_err).collect();
    let var_errs: Vec<f64> = records.iter().map(|r| r.var_abs_err).collect();
    let (mean_mae, mean_err_std) = mean_std(&mean_errs)?;
    let (var_mae, var_err_std) = mean_std(&var_errs)?;
    let within = mean_errs.iter().filter(|&&e| e <= 0.2).count() as f64 / mean_errs.len() as f64;
    let summary = GroundTruthSummary {
        mean_mae,
        mean_err_std,
        var_mae,
        var_err_std,
        mean_err_within_0_2: within,
        mean_err_cdf: cumulative_abs_error_distribution(&mean_errs)?,
        var_err_cdf: cumulative_abs_error_distribution(&var_errs)?,
    };
    Ok(GroundTruthRun { records, summary })
}
