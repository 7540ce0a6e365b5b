//! Deterministic perceptron trained by the classic rule or by SGD.

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::perceptron::TrainingInstance;

/// Point-estimate perceptron. Inputs are used as given, so a bias column
/// must already be part of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicPerceptron {
    pub weights: Vec<f64>,
    pub learning_rate: f64,
    pub activation: Activation<f64>,
}

impl ClassicPerceptron {
    pub fn new(weights: Vec<f64>, learning_rate: f64, activation: Activation<f64>) -> Result<Self> {
        if !(learning_rate > 0.0) || !learning_rate.is_finite() {
            return Err(Error::InvalidConfig(
                "learning rate must be positive".into(),
            ));
        }
        activation.validate()?;
        Ok(Self {
            weights,
            learning_rate,
            activation,
        })
    }

    fn preactivation(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: x.len(),
            });
        }
        Ok(dot(x, &self.weights))
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.activation.eval(self.preactivation(x)?))
    }

    /// Half squared error `½(y − f(xᵀw))²`.
    pub fn loss(&self, inst: &TrainingInstance<f64>) -> Result<f64> {
        Ok(0.5 * (inst.y - self.predict(&inst.x)?).powi(2))
    }

    fn step(&self, x: &[f64], scale: f64) -> Self {
        let weights = self
            .weights
            .iter()
            .zip(x)
            .map(|(w, xi)| w + self.learning_rate * scale * xi)
            .collect();
        Self {
            weights,
            ..self.clone()
        }
    }

    /// `w ← w + α·(y − f(xᵀw))·x`.
    pub fn perceptron_rule_step(&self, inst: &TrainingInstance<f64>) -> Result<Self> {
        let err = inst.y - self.predict(&inst.x)?;
        Ok(self.step(&inst.x, err))
    }

    /// One SGD step on the half squared error: `w ← w + α·(y − f(a))·f'(a)·x`.
    pub fn gradient_regression_step(&self, inst: &TrainingInstance<f64>) -> Result<Self> {
        let a = self.preactivation(&inst.x)?;
        let err = inst.y - self.activation.eval(a);
        Ok(self.step(&inst.x, err * self.activation.derivative(a)))
    }
}
