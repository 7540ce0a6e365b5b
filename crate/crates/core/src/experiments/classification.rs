//! Sequential linear binary classification in two dimensions.
//!
//! Points are uniform on `[-r, r]²`, labelled `y = 1` iff `x₁ + x₂ > 0`, and
//! fed one by one to a bias-free sigmoid neuron starting from
//! `N([-1, 0], I)`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::metrics::median;
use super::{check_trials, grid, trial_rng};
use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::perceptron::{BayesianPerceptron, TrainingInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationConfig {
    pub seed: u64,
    pub trials: usize,
    pub n: usize,
    /// Training inputs are drawn from `[-half_range, half_range]²`.
    pub half_range: f64,
    pub prior_mean: [f64; 2],
    pub prior_var: f64,
    pub epsilon: f64,
    /// Evaluation lattice spans `[-lattice_half, lattice_half]²`.
    pub lattice_half: f64,
    pub lattice_step: f64,
    pub near_radius: f64,
    pub far_radius: f64,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 50,
            n: 25,
            half_range: 3.0,
            prior_mean: [-1.0, 0.0],
            prior_var: 1.0,
            epsilon: 0.01,
            lattice_half: 4.0,
            lattice_step: 0.1,
            near_radius: 1.0,
            far_radius: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationRecord {
    pub trial: usize,
    pub w1: f64,
    pub w2: f64,
    /// Cosine between the posterior mean and `[1, 1]/√2`.
    pub cosine: f64,
    pub angle_error_deg: f64,
    /// Share of lattice points whose predicted label matches the true one.
    pub accuracy: f64,
    /// Mean `σ_a²` over lattice points within `near_radius` of a training point.
    pub var_near: Option<f64>,
    /// Mean `σ_a²` over lattice points farther than `far_radius` from every training point.
    pub var_far: Option<f64>,
    pub var_centroid: f64,
    pub var_corners: f64,
}

/// One lattice point of the final predictive field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldPoint {
    pub x1: f64,
    pub x2: f64,
    pub mu_y: f64,
    pub sigma_a2: f64,
}

#[derive(Debug, Clone)]
pub struct ClassificationTrial {
    pub record: ClassificationRecord,
    pub data: Vec<TrainingInstance<f64>>,
    pub model: BayesianPerceptron<f64>,
    pub field: Vec<FieldPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationSummary {
    pub median_cosine: f64,
    pub median_accuracy: f64,
    pub mean_accuracy: f64,
    /// Trial averages of `var_near` / `var_far` over trials where they exist.
    pub mean_var_near: Option<f64>,
    pub mean_var_far: Option<f64>,
    /// Share of trials with `var_centroid ≤ var_corners`.
    pub centroid_below_corners: f64,
}

#[derive(Debug, Clone)]
pub struct ClassificationRun {
    pub trials: Vec<ClassificationTrial>,
    pub summary: ClassificationSummary,
}

impl ClassificationRun {
    pub fn records(&self) -> Vec<ClassificationRecord> {
        self.trials.iter().map(|t| t.record).collect()
    }
}

pub fn true_label(x: &[f64]) -> f64 {
    if x[0] + x[1] > 0.0 {
        1.0
    } else {
        0.0
    }
}

pub fn generate_data<R: Rng>(rng: &mut R, n: usize, half_range: f64) -> Vec<TrainingInstance<f64>> {
    (0..n)
        .map(|_| {
            let x = vec![
                rng.random_range(-half_range..=half_range),
                rng.random_range(-half_range..=half_range),
            ];
            let y = true_label(&x);
            TrainingInstance::new(x, y)
        })
        .collect()
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn run_trial(
    cfg: &ClassificationConfig,
    trial: usize,
    lattice: &[[f64; 2]],
) -> Result<ClassificationTrial> {
    let mut rng = trial_rng(cfg.seed, trial);
    let data = generate_data(&mut rng, cfg.n, cfg.half_range);
    let prior = BayesianPerceptron::with_isotropic_prior(
        2,
        false,
        Activation::Sigmoid,
        cfg.prior_mean.to_vec(),
        cfg.prior_var,
    )?
    .with_epsilon(cfg.epsilon)?;
    let model = prior.fit(&data)?;

    let w = model.weights().mean();
    let norm = (w[0] * w[0] + w[1] * w[1]).sqrt();
    let cosine = if norm > 0.0 {
        (w[0] + w[1]) / (norm * std::f64::consts::SQRT_2)
    } else {
        0.0
    };

    let mut field = Vec::with_capacity(lattice.len());
    let mut correct = 0usize;
    let mut near = Vec::new();
    let mut far = Vec::new();
    for p in lattice {
        let pred = model.predict(p)?;
        let (label, _) = model.classify(p, 0.5)?;
        if f64::from(label) == true_label(p) {
            correct += 1;
        }
        let nearest = data
            .iter()
            .map(|d| ((d.x[0] - p[0]).powi(2) + (d.x[1] - p[1]).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        if nearest <= cfg.near_radius {
            near.push(pred.sigma_a2);
        } else if nearest > cfg.far_radius {
            far.push(pred.sigma_a2);
        }
        field.push(FieldPoint {
            x1: p[0],
            x2: p[1],
            mu_y: pred.mu_y,
            sigma_a2: pred.sigma_a2,
        });
    }

    let centroid = [
        data.iter().map(|d| d.x[0]).sum::<f64>() / data.len().max(1) as f64,
        data.iter().map(|d| d.x[1]).sum::<f64>() / data.len().max(1) as f64,
    ];
    let h = cfg.lattice_half;
    let corners = [[h, h], [h, -h], [-h, h], [-h, -h]];
    let var_corners = corners
        .iter()
        .map(|c| model.predict(c).map(|p| p.sigma_a2))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .sum::<f64>()
        / 4.0;

    Ok(ClassificationTrial {
        record: ClassificationRecord {
            trial,
            w1: w[0],
            w2: w[1],
            cosine,
            angle_error_deg: cosine.clamp(-1.0, 1.0).acos().to_degrees(),
            accuracy: correct as f64 / lattice.len() as f64,
            var_near: mean_of(near.into_iter()),
            var_far: mean_of(far.into_iter()),
            var_centroid: model.predict(&centroid)?.sigma_a2,
            var_corners,
        },
        data,
        model,
        field,
    })
}

pub fn run_linear_classification(cfg: &ClassificationConfig) -> Result<ClassificationRun> {
    check_trials(cfg.trials)?;
    if !(cfg.lattice_step > 0.0) || !(cfg.half_range > 0.0) {
        return Err(Error::InvalidConfig(
            "ranges and lattice step must be positive".into(),
        ));
    }
    let axis = grid(-cfg.lattice_half, cfg.lattice_half, cfg.lattice_step);
    let lattice: Vec<[f64; 2]> = axis
        .iter()
        .flat_map(|&x2| axis.iter().map(move |&x1| [x1, x2]))
        .collect();
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t, &lattice))
        .collect::<Result<Vec<_>>>()?;

    let records: Vec<ClassificationRecord> = trials.iter().map(|t| t.record).collect();
    let cosines: Vec<f64> = records.iter().map(|r| r.cosine).collect();
    let accs: Vec<f64> = records.iter().map(|r| r.accuracy).collect();
    let summary = ClassificationSummary {
        median_cosine: median(&cosines)?,
        median_accuracy: median(&accs)?,
        mean_accuracy: accs.iter().sum::<f64>() / accs.len() as f64,
        mean_var_near: mean_of(records.iter().filter_map(|r| r.var_near)),
        mean_var_far: mean_of(records.iter().filter_map(|r| r.var_far)),
        centroid_below_corners: records
            .iter()
            .filter(|r| r.var_centroid <= r.var_corners)
            .count() as f64
            / records.len() as f64,
    };
    Ok(ClassificationRun { trials, summary })
}
