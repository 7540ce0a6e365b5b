//! The Bayesian perceptron: Gaussian weight belief, moment-matched forward
//! pass and closed-form sequential backward pass.
//!
//! Training is a Kalman-style update. The forward pass gives the joint
//! Gaussian approximation of `(a, y)`; observing `y` refines the belief over
//! `a` (a scalar measurement update), and that refinement is pushed back onto
//! the weights through the rank-one smoother step in
//! [`posterior_reweight`](crate::gaussian::posterior_reweight).

use crate::activation::{output_moments, Activation, OutputMoments};
use crate::error::{Error, Result};
use crate::gaussian::{affine_forward, posterior_reweight, Gaussian1D, WeightPosterior};
use crate::linalg::SquareMatrix;
use crate::scalar::Scalar;

/// Output-noise variance used when none is given.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Lower bound applied to `σ_a²` before any gain is formed.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Forward-pass result for one input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<T> {
    pub mu_y: T,
    /// Variance of `f(a)`; does not include the output noise `epsilon`.
    pub sigma_y2: T,
    pub mu_a: T,
    pub sigma_a2: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingInstance<T> {
    pub x: Vec<T>,
    pub y: T,
}

impl<T: Scalar> TrainingInstance<T> {
    pub fn new(x: Vec<T>, y: T) -> Self {
        Self { x, y }
    }
}

/// Intermediate quantities of the scalar measurement update on `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreactivationUpdate<T> {
    /// Prior belief over `a` after flooring its variance.
    pub prior: Gaussian1D<T>,
    pub moments: OutputMoments<T>,
    /// `k = σ_ya / (σ_y² + ε)`.
    pub gain: T,
    /// Refined belief `N(μ_i, σ_i²)`.
    pub posterior: Gaussian1D<T>,
}

/// Scalar Kalman measurement update of the pre-activation belief.
///
/// Forms `k = σ_ya / (σ_y² + ε)`, `μ_i = μ_a + k·(y − μ_y)` and
/// `σ_i² = σ_a² − k·σ_ya`. The prior variance is floored at
/// [`VARIANCE_FLOOR`]; the refined variance is clamped at zero, which only
/// binds when the sigmoid cross-covariance approximation overshoots with a
/// very small `epsilon`.
///
/// Fails with [`Error::ZeroOutputVariance`] when `epsilon` is zero and the
/// unfloored output is deterministic.
pub fn refine_preactivation<T: Scalar>(
    act: &Activation<T>,
    prior: Gaussian1D<T>,
    y: T,
    epsilon: T,
) -> Result<PreactivationUpdate<T>> {
    if !(epsilon > T::zero()) && !(output_moments(act, prior)?.sigma_y2 > T::zero()) {
        return Err(Error::ZeroOutputVariance);
    }
    let prior = Gaussian1D {
        mean: prior.mean,
        variance: prior.variance.max(T::lit(VARIANCE_FLOOR)),
    };
    let moments = output_moments(act, prior)?;
    let total = moments.sigma_y2 + epsilon;
    if !(total > T::zero()) {
        return Err(Error::ZeroOutputVariance);
    }
    let gain = moments.sigma_ya / total;
    let posterior = Gaussian1D {
        mean: prior.mean + gain * (y - moments.mu_y),
        variance: (prior.variance - gain * moments.sigma_ya).max(T::zero()),
    };
    Ok(PreactivationUpdate {
        prior,
        moments,
        gain,
        posterior,
    })
}

/// A single neuron with Gaussian weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianPerceptron<T> {
    weights: WeightPosterior<T>,
    activation: Activation<T>,
    epsilon: T,
    input_dim: usize,
    bias: bool,
}

impl<T: Scalar> BayesianPerceptron<T> {
    /// With `bias`, `weights` has one extra leading entry for the bias weight.
    pub fn new(
        input_dim: usize,
        bias: bool,
        activation: Activation<T>,
        epsilon: T,
        weights: WeightPosterior<T>,
    ) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::InvalidConfig("input_dim must be positive".into()));
        }
        let expected = input_dim + usize::from(bias);
        if weights.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: weights.dim(),
            });
        }
        activation.validate()?;
        if !epsilon.is_finite() || epsilon < T::zero() {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be finite and non-negative, got {epsilon}"
            )));
        }
        Ok(Self {
            weights,
            activation,
            epsilon,
            input_dim,
            bias,
        })
    }

    /// Prior `N(prior_mean, prior_var·I)` with the default `epsilon`.
    pub fn with_isotropic_prior(
        input_dim: usize,
        bias: bool,
        activation: Activation<T>,
        prior_mean: Vec<T>,
        prior_var: T,
    ) -> Result<Self> {
        let dim = prior_mean.len();
        let weights =
            WeightPosterior::new(prior_mean, SquareMatrix::scaled_identity(dim, prior_var))?;
        Self::new(
            input_dim,
            bias,
            activation,
            T::lit(DEFAULT_EPSILON),
            weights,
        )
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < T::zero() {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be finite and non-negative, got {epsilon}"
            )));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn weights(&self) -> &WeightPosterior<T> {
        &self.weights
    }

    pub fn activation(&self) -> &Activation<T> {
        &self.activation
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn bias(&self) -> bool {
        self.bias
    }

    /// Prepends the constant 1 when the model carries a bias weight.
    pub fn augment(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        let mut out = Vec::with_capacity(self.weights.dim());
        if self.bias {
            out.push(T::one());
        }
        out.extend_from_slice(x);
        Ok(out)
    }

    /// Forward pass.
    pub fn predict(&self, x: &[T]) -> Result<Prediction<T>> {
        let x = self.augment(x)?;
        let a = affine_forward(&self.weights, &x)?;
        let m = output_moments(&self.activation, a)?;
        Ok(Prediction {
            mu_y: m.mu_y,
            sigma_y2: m.sigma_y2,
            mu_a: a.mean,
            sigma_a2: a.variance,
        })
    }

    /// Backward pass for one training instance; returns the updated model.
    pub fn update(&self, inst: &TrainingInstance<T>) -> Result<Self> {
        if inst.x.iter().any(|v| !v.is_finite()) || !inst.y.is_finite() {
            return Err(Error::NonFinite("training instance"));
        }
        let x = self.augment(&inst.x)?;
        let prior_a = affine_forward(&self.weights, &x)?;
        let step = refine_preactivation(&self.activation, prior_a, inst.y, self.epsilon)?;
        let weights = posterior_reweight(&self.weights, &x, step.prior, step.posterior)?;
        Ok(Self {
            weights,
            ..self.clone()
        })
    }

    /// Sequential single pass over `data`, in order.
    pub fn fit<'a, I>(&self, data: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a TrainingInstance<T>>,
    {
        data.into_iter()
            .enumerate()
            .try_fold(self.clone(), |model, (index, inst)| {
                model.update(inst).map_err(|e| Error::Instance {
                    index,
                    source: Box::new(e),
                })
            })
    }

    /// In-place variant of [`update`](Self::update). Leaves `self` untouched on error.
    pub fn learn(&mut self, inst: &TrainingInstance<T>) -> Result<()> {
        *self = self.update(inst)?;
        Ok(())
    }

    /// Label 1 iff `μ_y > threshold`. Only defined for sigmoid models.
    pub fn classify(&self, x: &[T], threshold: T) -> Result<(u8, T)> {
        if !self.activation.is_sigmoid() {
            return Err(Error::NotSigmoid);
        }
        let p = self.predict(x)?;
        Ok((u8::from(p.mu_y > threshold), p.mu_y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::sigmoid;
    use approx::assert_abs_diff_eq;

    fn sigmoid_model() -> BayesianPerceptron<f64> {
        BayesianPerceptron::with_isotropic_prior(
            2,
            false,
            Activation::Sigmoid,
            vec![-1.0, 0.0],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn predict_prior_example() {
        let p = sigmoid_model().predict(&[1.0, 1.0]).unwrap();
        assert_eq!((p.mu_a, p.sigma_a2), (-1.0, 2.0));
        let t = (1.0 + std::f64::consts::PI / 4.0).sqrt();
        assert_abs_diff_eq!(p.mu_y, sigmoid(-1.0 / t), epsilon = 1e-15);
        assert_abs_diff_eq!(p.mu_y, 0.3213, epsilon = 5e-4);
    }

    #[test]
    fn deterministic_model() {
        let w = WeightPosterior::new(vec![0.2, 0.5, -0.3], SquareMatrix::zeros(3)).unwrap();
        let m = BayesianPerceptron::new(2, true, Activation::relu(), 0.01, w).unwrap();
        let p = m.predict(&[2.0, 1.0]).unwrap();
        assert_eq!(p.sigma_a2, 0.0);
        assert_eq!(p.sigma_y2, 0.0);
        assert_abs_diff_eq!(p.mu_y, 0.9, epsilon = 1e-15);
    }

    #[test]
    fn linear_model_passes_moments_through() {
        let m = BayesianPerceptron::with_isotropic_prior(
            2,
            true,
            Activation::linear(),
            vec![0.1, 0.2, 0.3],
            0.7,
        )
        .unwrap();
        let p = m.predict(&[1.5, -2.0]).unwrap();
        assert_eq!(p.mu_y, p.mu_a);
        assert_eq!(p.sigma_y2, p.sigma_a2);
    }

    #[test]
    fn linear_update_example() {
        let m = BayesianPerceptron::with_isotropic_prior(
            1,
            false,
            Activation::linear(),
            vec![0.0],
            1.0,
        )
        .unwrap()
        .with_epsilon(1.0)
        .unwrap();
        let m = m.update(&TrainingInstance::new(vec![1.0], 1.0)).unwrap();
        assert_abs_diff_eq!(m.weights().mean()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.weights().cov()[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn huge_noise_ignores_data() {
        let m = sigmoid_model().with_epsilon(1e12).unwrap();
        let m2 = m
            .update(&TrainingInstance::new(vec![2.0, 1.0], 1.0))
            .unwrap();
        for (a, b) in m.weights().mean().iter().zip(m2.weights().mean()) {
            assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn zero_innovation_still_contracts() {
        let m = sigmoid_model();
        let x = [0.5, 1.5];
        let y = m.predict(&x).unwrap().mu_y;
        let m2 = m.update(&TrainingInstance::new(x.to_vec(), y)).unwrap();
        assert_eq!(m2.weights().mean(), m.weights().mean());
        assert!(m2.weights().cov().quad_form(&x) < m.weights().cov().quad_form(&x));
    }

    #[test]
    fn zero_noise_deterministic_output_refused() {
        let w = WeightPosterior::new(vec![1.0], SquareMatrix::zeros(1)).unwrap();
        let m = BayesianPerceptron::new(1, false, Activation::relu(), 0.0, w).unwrap();
        assert_eq!(
            m.update(&TrainingInstance::new(vec![1.0], 2.0)),
            Err(Error::ZeroOutputVariance)
        );
    }

    #[test]
    fn non_finite_instance_refused() {
        let m = sigmoid_model();
        assert_eq!(
            m.update(&TrainingInstance::new(vec![f64::NAN, 1.0], 1.0)),
            Err(Error::NonFinite("training instance"))
        );
        assert_eq!(
            m.update(&TrainingInstance::new(vec![1.0, 1.0], f64::INFINITY)),
            Err(Error::NonFinite("training instance"))
        );
    }

    #[test]
    fn fit_folds_and_reports_index() {
        let m = sigmoid_model();
        assert_eq!(m.fit(&[]).unwrap(), m);
        let inst = TrainingInstance::new(vec![1.0, -0.5], 1.0);
        assert_eq!(m.fit([&inst]).unwrap(), m.update(&inst).unwrap());

        let data = vec![inst.clone(), TrainingInstance::new(vec![1.0], 0.0)];
        match m.fit(&data) {
            Err(Error::Instance { index, source }) => {
                assert_eq!(index, 1);
                assert!(matches!(*source, Error::DimensionMismatch { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn learn_matches_update() {
        let mut m = sigmoid_model();
        let inst = TrainingInstance::new(vec![0.3, 0.9], 0.0);
        let expected = m.update(&inst).unwrap();
        m.learn(&inst).unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn classify_rules() {
        let w = WeightPosterior::new(vec![1.0, 0.0], SquareMatrix::zeros(2)).unwrap();
        let m = BayesianPerceptron::new(2, false, Activation::Sigmoid, 0.01, w).unwrap();
        assert_eq!(m.classify(&[0.2, 5.0], 0.5).unwrap().0, 1);
        // mu_y is exactly 1/2 on the boundary: strict inequality gives class 0
        let (label, mu) = m.classify(&[0.0, 5.0], 0.5).unwrap();
        assert_eq!((label, mu), (0, 0.5));
        assert_eq!(m.classify(&[3.0, 0.0], 0.9).unwrap().0, 1);

        let relu =
            BayesianPerceptron::with_isotropic_prior(1, false, Activation::relu(), vec![0.0], 1.0)
                .unwrap();
        assert_eq!(relu.classify(&[1.0], 0.5), Err(Error::NotSigmoid));
    }

    #[test]
    fn constructor_validation() {
        let w = WeightPosterior::isotropic(vec![0.0, 0.0], 1.0).unwrap();
        assert!(BayesianPerceptron::new(2, true, Activation::Sigmoid, 0.01, w.clone()).is_err());
        assert!(BayesianPerceptron::new(1, true, Activation::Sigmoid, 0.01, w.clone()).is_ok());
        assert!(BayesianPerceptron::new(2, false, Activation::Sigmoid, -1.0, w.clone()).is_err());
        assert!(BayesianPerceptron::new(
            2,
            false,
            Activation::Pwl {
                alpha: 2.0,
                beta: 1.0
            },
            0.01,
            w
        )
        .is_err());
    }

    #[test]
    fn single_precision_training() {
        let m = BayesianPerceptron::<f32>::with_isotropic_prior(
            2,
            true,
            Activation::relu(),
            vec![0.0, 0.0, 0.0],
            1.0,
        )
        .unwrap();
        let m = m
            .update(&TrainingInstance::new(vec![1.0, 2.0], 3.0))
            .unwrap();
        assert!(m.predict(&[1.0, 2.0]).unwrap().mu_y > 1.0);
    }
}
