//! Scalar and vector Gaussian primitives used by the forward and backward pass.
//!
//! Everything here is a pure function of its inputs. Point masses
//! (`variance == 0`) are handled by explicit limits rather than by dividing
//! through by the standard deviation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, SquareMatrix};
use crate::scalar::Scalar;

/// Scalar Gaussian belief `N(mean, variance)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian1D<T> {
    pub mean: T,
    pub variance: T,
}

impl<T: Scalar> Gaussian1D<T> {
    pub fn new(mean: T, variance: T) -> Result<Self> {
        if !mean.is_finite() || !variance.is_finite() {
            return Err(Error::NonFinite("gaussian"));
        }
        if variance < T::zero() {
            return Err(Error::NegativeVariance(variance.as_f64()));
        }
        Ok(Self { mean, variance })
    }

    pub fn point(mean: T) -> Self {
        Self {
            mean,
            variance: T::zero(),
        }
    }

    pub fn std_dev(&self) -> T {
        self.variance.sqrt()
    }

    /// Density at `x`. Undefined (infinite) for point masses.
    pub fn pdf(&self, x: T) -> T {
        normal_pdf(x, self.mean, self.variance)
    }
}

/// Gaussian belief over the (optionally bias-augmented) weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPosterior<T> {
    mean: Vec<T>,
    cov: SquareMatrix<T>,
}

impl<T: Scalar> WeightPosterior<T> {
    /// Validates dimensions, finiteness, symmetry and positive semi-definiteness.
    pub fn new(mean: Vec<T>, cov: SquareMatrix<T>) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: cov.dim(),
            });
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("weight mean"));
        }
        cov.check_covariance()?;
        Ok(Self { mean, cov })
    }

    /// `N(mean, variance·I)`.
    pub fn isotropic(mean: Vec<T>, variance: T) -> Result<Self> {
        let dim = mean.len();
        Self::new(mean, SquareMatrix::scaled_identity(dim, variance))
    }

    pub(crate) fn from_parts_unchecked(mean: Vec<T>, cov: SquareMatrix<T>) -> Self {
        Self { mean, cov }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn cov(&self) -> &SquareMatrix<T> {
        &self.cov
    }

    fn check_input(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Truncated and full raw moments of a scalar Gaussian split at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialMoments<T> {
    /// Probability mass on `[0, ∞)`.
    pub p0: T,
    /// `∫₀^∞ a·p(a) da`.
    pub t1: T,
    /// `∫₀^∞ a²·p(a) da`.
    pub t2: T,
    /// Full first raw moment (the mean).
    pub e1: T,
    /// Full second raw moment `μ² + σ²`.
    pub e2: T,
    /// `σ²·p(0)`.
    pub pa: T,
}

pub fn std_normal_pdf<T: Scalar>(z: T) -> T {
    let inv_sqrt_2pi = T::FRAC_1_SQRT_2() * T::FRAC_2_SQRT_PI() * T::lit(0.5);
    inv_sqrt_2pi * (-(z * z) * T::lit(0.5)).exp()
}

/// Standard normal CDF (the probit function).
///
/// Evaluated through `erfc` so that the lower tail keeps full relative
/// precision instead of cancelling against 1.
pub fn std_normal_cdf<T: Scalar>(z: T) -> T {
    T::lit(0.5) * (-z * T::FRAC_1_SQRT_2()).erfc()
}

/// `N(x; mean, variance)` for `variance > 0`.
pub fn normal_pdf<T: Scalar>(x: T, mean: T, variance: T) -> T {
    let sd = variance.sqrt();
    std_normal_pdf((x - mean) / sd) / sd
}

pub fn partial_moments<T: Scalar>(g: Gaussian1D<T>) -> Result<PartialMoments<T>> {
    if g.variance < T::zero() {
        return Err(Error::NegativeVariance(g.variance.as_f64()));
    }
    let mu = g.mean;
    let var = g.variance;
    let e1 = mu;
    let e2 = mu * mu + var;
    if var == T::zero() {
        let heaviside = if mu > T::zero() {
            T::one()
        } else if mu < T::zero() {
            T::zero()
        } else {
            T::lit(0.5)
        };
        return Ok(PartialMoments {
            p0: heaviside,
            t1: mu.max(T::zero()),
            t2: mu * mu * heaviside,
            e1,
            e2,
            pa: T::zero(),
        });
    }
    let sd = var.sqrt();
    let z = mu / sd;
    let p0 = std_normal_cdf(z);
    // σ²·N(0; μ, σ²) = σ·φ(μ/σ)
    let pa = sd * std_normal_pdf(z);
    Ok(PartialMoments {
        p0,
        t1: mu * p0 + pa,
        t2: e2 * p0 + mu * pa,
        e1,
        e2,
        pa,
    })
}

/// Linear prediction step: belief over `a = xᵀw`.
pub fn affine_forward<T: Scalar>(w: &WeightPosterior<T>, x: &[T]) -> Result<Gaussian1D<T>> {
    w.check_input(x)?;
    let mean = dot(x, w.mean());
    let mut variance = w.cov().quad_form(x);
    if variance < T::zero() {
        let floor = T::lit(1e-14) * w.cov().trace().abs();
        if -variance <= floor {
            variance = T::zero();
        } else {
            return Err(Error::NegativeVariance(variance.as_f64()));
        }
    }
    Ok(Gaussian1D { mean, variance })
}

/// Rank-one reweighting of the weight posterior given a refined belief over
/// the pre-activation.
///
/// With gain `l = C·x / σ_a²` the update is `μ' = μ + l·(μ_i − μ_a)` and
/// `C' = C + l·(σ_i² − σ_a²)·lᵀ`, followed by symmetrization.
pub fn posterior_reweight<T: Scalar>(
    w: &WeightPosterior<T>,
    x: &[T],
    prior_a: Gaussian1D<T>,
    updated_a: Gaussian1D<T>,
) -> Result<WeightPosterior<T>> {
    w.check_input(x)?;
    if !(prior_a.variance > T::zero()) {
        return Err(Error::DegeneratePrior);
    }
    let gain: Vec<T> = w
        .cov()
        .mul_vec(x)
        .into_iter()
        .map(|c| c / prior_a.variance)
        .collect();
    let shift = updated_a.mean - prior_a.mean;
    let mean = w
        .mean()
        .iter()
        .zip(&gain)
        .map(|(&m, &l)| m + l * shift)
        .collect();
    let mut cov = w.cov().clone();
    cov.rank_one_update(&gain, updated_a.variance - prior_a.variance);
    cov.symmetrize();
    Ok(WeightPosterior::from_parts_unchecked(mean, cov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pdf_values() {
        assert_abs_diff_eq!(
            std_normal_pdf(0.0),
            0.398_942_280_401_432_7,
            epsilon = 1e-16
        );
        assert_eq!(std_normal_pdf(1.7), std_normal_pdf(-1.7));
        assert!(std_normal_pdf(10.0) < 1e-20);
        assert!(std_normal_pdf(10.0) > 0.0);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_abs_diff_eq!(
            std_normal_cdf(1.0),
            0.841_344_746_068_542_9,
            epsilon = 1e-15
        );
        for i in -80..=80 {
            let z = f64::from(i) * 0.1;
            assert_abs_diff_eq!(std_normal_cdf(z) + std_normal_cdf(-z), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn point_mass_limits() {
        let m = partial_moments(Gaussian1D::point(3.0)).unwrap();
        assert_eq!((m.p0, m.t1, m.t2, m.pa), (1.0, 3.0, 9.0, 0.0));
        let m = partial_moments(Gaussian1D::point(-2.0)).unwrap();
        assert_eq!((m.p0, m.t1, m.t2), (0.0, 0.0, 0.0));
        let m = partial_moments(Gaussian1D::point(0.0)).unwrap();
        assert_eq!(m.p0, 0.5);
    }

    #[test]
    fn negative_variance_rejected() {
        let g = Gaussian1D {
            mean: 0.0,
            variance: -1.0,
        };
        assert_eq!(partial_moments(g), Err(Error::NegativeVariance(-1.0)));
        assert!(Gaussian1D::new(0.0, -1e-3).is_err());
        assert!(Gaussian1D::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn symmetric_split_at_zero_mean() {
        let m = partial_moments(Gaussian1D::new(0.0, 3.7).unwrap()).unwrap();
        assert_abs_diff_eq!(m.p0, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn affine_forward_prior_example() {
        let w = WeightPosterior::isotropic(vec![-1.0, 0.0], 1.0).unwrap();
        let a = affine_forward(&w, &[1.0, 1.0]).unwrap();
        assert_eq!((a.mean, a.variance), (-1.0, 2.0));

        let w = WeightPosterior::new(vec![0.3, 0.2], SquareMatrix::zeros(2)).unwrap();
        assert_eq!(affine_forward(&w, &[4.0, -9.0]).unwrap().variance, 0.0);

        assert_eq!(
            affine_forward(&w, &[1.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn reweight_zero_innovation_is_identity() {
        let w = WeightPosterior::new(
            vec![0.5, -1.0],
            SquareMatrix::from_rows(vec![vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap(),
        )
        .unwrap();
        let x = [1.0, 2.0];
        let a = affine_forward(&w, &x).unwrap();
        let w2 = posterior_reweight(&w, &x, a, a).unwrap();
        assert_eq!(w2, w);
    }

    #[test]
    fn reweight_scalar_example() {
        let w = WeightPosterior::isotropic(vec![0.0], 1.0).unwrap();
        let prior = Gaussian1D::new(0.0, 1.0).unwrap();
        let upd = Gaussian1D::new(0.5, 0.5).unwrap();
        let w2 = posterior_reweight(&w, &[1.0], prior, upd).unwrap();
        assert_eq!(w2.mean(), &[0.5]);
        assert_eq!(w2.cov()[(0, 0)], 0.5);
    }

    #[test]
    fn reweight_rejects_zero_prior_variance() {
        let w = WeightPosterior::isotropic(vec![0.0], 1.0).unwrap();
        let r = posterior_reweight(&w, &[1.0], Gaussian1D::point(0.0), Gaussian1D::point(0.0));
        assert_eq!(r, Err(Error::DegeneratePrior));
    }

    #[test]
    fn works_in_single_precision() {
        let m = partial_moments(Gaussian1D::new(0.0f32, 1.0).unwrap()).unwrap();
        assert!((m.t1 - 0.398_942_3).abs() < 1e-6);
        assert!((m.t2 - 0.5).abs() < 1e-6);
    }
}
