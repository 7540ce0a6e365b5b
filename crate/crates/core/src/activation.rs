//! Output moments of an activation applied to a Gaussian pre-activation.
//!
//! Sigmoid moments use the scaled-probit substitution `s(a) ≈ φ(λ·a)` with
//! `λ = √(π/8)`, which turns each Gaussian integral into a closed form.
//! Piecewise-linear moments are exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{partial_moments, std_normal_cdf, std_normal_pdf, Gaussian1D};
use crate::scalar::Scalar;

/// `λ = √(π/8)`, the probit scale that best matches the logistic sigmoid.
pub const PROBIT_SCALE: f64 = 0.626_657_068_657_750_1;

/// Activation function of the neuron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Activation<T> {
    Sigmoid,
    /// `f(a) = max(alpha·a, beta·a)` with `0 ≤ alpha ≤ 1`, `beta ≥ 0`, `alpha ≤ beta`.
    Pwl {
        alpha: T,
        beta: T,
    },
}

impl<T: Scalar> Activation<T> {
    pub fn pwl(alpha: T, beta: T) -> Result<Self> {
        let act = Activation::Pwl { alpha, beta };
        act.validate()?;
        Ok(act)
    }

    pub fn relu() -> Self {
        Activation::Pwl {
            alpha: T::zero(),
            beta: T::one(),
        }
    }

    pub fn leaky_relu(slope: T) -> Result<Self> {
        Self::pwl(slope, T::one())
    }

    pub fn linear() -> Self {
        Activation::Pwl {
            alpha: T::one(),
            beta: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Activation::Sigmoid => Ok(()),
            Activation::Pwl { alpha, beta } => {
                if !alpha.is_finite() || !beta.is_finite() {
                    return Err(Error::InvalidActivation("non-finite slope".into()));
                }
                if alpha < T::zero() || alpha > T::one() {
                    return Err(Error::InvalidActivation(format!(
                        "alpha = {alpha} outside [0, 1]"
                    )));
                }
                if beta < T::zero() {
                    return Err(Error::InvalidActivation(format!(
                        "beta = {beta} is negative"
                    )));
                }
                if alpha > beta {
                    return Err(Error::InvalidActivation(format!(
                        "alpha = {alpha} exceeds beta = {beta}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_sigmoid(&self) -> bool {
        matches!(self, Activation::Sigmoid)
    }

    pub fn eval(&self, a: T) -> T {
        match *self {
            Activation::Sigmoid => sigmoid(a),
            Activation::Pwl { alpha, beta } => (alpha * a).max(beta * a),
        }
    }

    /// Derivative, taking the left slope `alpha` at the kink.
    pub fn derivative(&self, a: T) -> T {
        match *self {
            Activation::Sigmoid => {
                let s = sigmoid(a);
                s * (T::one() - s)
            }
            Activation::Pwl { alpha, beta } => {
                if a > T::zero() {
                    beta
                } else {
                    alpha
                }
            }
        }
    }
}

impl<T: Scalar> fmt::Display for Activation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Sigmoid => write!(f, "sigmoid"),
            Activation::Pwl { alpha, beta } => write!(f, "pwl({alpha}, {beta})"),
        }
    }
}

/// Mean and variance of `y = f(a)` plus the cross-covariance `cov(y, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputMoments<T> {
    pub mu_y: T,
    pub sigma_y2: T,
    pub sigma_ya: T,
}

/// Numerically stable logistic sigmoid.
pub fn sigmoid<T: Scalar>(a: T) -> T {
    if a >= T::zero() {
        T::one() / (T::one() + (-a).exp())
    } else {
        let e = a.exp();
        e / (T::one() + e)
    }
}

/// `t = √(1 + λ²·σ_a²)`.
fn probit_spread<T: Scalar>(variance: T) -> T {
    let lambda = T::lit(PROBIT_SCALE);
    (T::one() + lambda * lambda * variance).sqrt()
}

/// `μ_y ≈ s(μ_a / t)`, `σ_y² ≈ μ_y·(1 − μ_y)·(1 − 1/t)`.
pub fn sigmoid_mean_var<T: Scalar>(a: Gaussian1D<T>) -> (T, T) {
    let t = probit_spread(a.variance);
    let mu_y = sigmoid(a.mean / t);
    let sigma_y2 = mu_y * (T::one() - mu_y) * (T::one() - t.recip());
    (mu_y, sigma_y2)
}

/// `σ_ya ≈ (λ·σ_a² / t)·N(λ·μ_a / t; 0, 1)`.
pub fn sigmoid_cross_cov<T: Scalar>(a: Gaussian1D<T>) -> T {
    let lambda = T::lit(PROBIT_SCALE);
    let t = probit_spread(a.variance);
    lambda * a.variance / t * std_normal_pdf(lambda * a.mean / t)
}

fn pwl_slopes<T: Scalar>(act: &Activation<T>) -> Result<(T, T)> {
    act.validate()?;
    match *act {
        Activation::Pwl { alpha, beta } => Ok((alpha, beta)),
        Activation::Sigmoid => Err(Error::InvalidActivation(
            "piecewise-linear moments requested for sigmoid".into(),
        )),
    }
}

/// Exact mean and variance of `max(α·a, β·a)` for Gaussian `a`.
///
/// Writing `f(a) = α·a + (β−α)·r` with `r = max(0, a)`:
/// `μ_y = α·μ + (β−α)·E{r}` and
/// `σ_y² = α²σ² + 2α(β−α)σ²·φ(μ/σ) + (β−α)²·var(r)`.
/// This is the raw-moment expression `α²E₂ + (β²−α²)(E₂φ + μ·p_a) − μ_y²`
/// rearranged so that nothing cancels; it is exact for `α = β`.
pub fn pwl_mean_var<T: Scalar>(act: &Activation<T>, a: Gaussian1D<T>) -> Result<(T, T)> {
    let (alpha, beta) = pwl_slopes(act)?;
    let pm = partial_moments(a)?;
    if a.variance == T::zero() {
        return Ok((act.eval(a.mean), T::zero()));
    }
    let delta = beta - alpha;
    let mu = a.mean;
    let var = a.variance;
    let mu_y = alpha * mu + delta * pm.t1;

    let upper = pm.p0;
    let lower = std_normal_cdf(-mu / var.sqrt());
    let two = T::lit(2.0);
    // var(max(0, a)) = σ²P + μ²PQ + μ·p_a·(Q − P) − p_a²
    let rect_var =
        var * upper + mu * mu * upper * lower + mu * pm.pa * (lower - upper) - pm.pa * pm.pa;
    let sigma_y2 = alpha * alpha * var
        + two * alpha * delta * var * upper
        + delta * delta * rect_var.max(T::zero());
    Ok((mu_y, sigma_y2.max(T::zero())))
}

/// Exact `E{a·f(a)} − μ_y·μ_a` for piecewise-linear `f`.
///
/// The raw-moment form `α·E₂ + (β−α)(E₂φ + μ·p_a) − μ_y·μ_a` collapses to
/// `σ²·(α + (β−α)·φ(μ/σ))`, which is what is evaluated. `mu_y` is accepted
/// for interface symmetry with the raw form and checked only in debug builds.
pub fn pwl_cross_cov<T: Scalar>(act: &Activation<T>, a: Gaussian1D<T>, mu_y: T) -> Result<T> {
    let (alpha, beta) = pwl_slopes(act)?;
    let pm = partial_moments(a)?;
    debug_assert!({
        let expected = alpha * a.mean + (beta - alpha) * pm.t1;
        (expected - mu_y).abs() <= T::lit(1e-6) * (T::one() + expected.abs())
    });
    if a.variance == T::zero() {
        return Ok(T::zero());
    }
    Ok(a.variance * (alpha + (beta - alpha) * pm.p0))
}

/// Dispatches to the sigmoid or piecewise-linear closed forms.
pub fn output_moments<T: Scalar>(
    act: &Activation<T>,
    a: Gaussian1D<T>,
) -> Result<OutputMoments<T>> {
    match act {
        Activation::Sigmoid => {
            let (mu_y, sigma_y2) = sigmoid_mean_var(a);
            Ok(OutputMoments {
                mu_y,
                sigma_y2,
                sigma_ya: sigmoid_cross_cov(a),
            })
        }
        Activation::Pwl { .. } => {
            let (mu_y, sigma_y2) = pwl_mean_var(act, a)?;
            let sigma_ya = pwl_cross_cov(act, a, mu_y)?;
            Ok(OutputMoments {
                mu_y,
                sigma_y2,
                sigma_ya,
            })
        }
    }
}
