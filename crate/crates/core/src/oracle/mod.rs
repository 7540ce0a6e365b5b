//! Independent ground truth for the closed-form approximations.
//!
//! Everything here is computed by brute force (numerical integration or
//! sampling) in `f64` and shares no code path with the moment formulas it is
//! used to check, apart from evaluating the activation itself.

pub mod quadrature;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::gaussian::{std_normal_pdf, Gaussian1D, WeightPosterior};
use crate::linalg::{dot, SquareMatrix};
use quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    /// Integration range in standard deviations on either side of the mean.
    pub half_width: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            half_width: 12.0,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidConfig("abs_tol must be positive".into()));
        }
        if !(self.half_width >= 8.0) {
            return Err(Error::InvalidConfig("half_width must be at least 8".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidConfig(
                "max_subdivisions must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `(μ_y, σ_y², σ_ya)` from an oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mu_y: f64,
    pub sigma_y2: f64,
    pub sigma_ya: f64,
}

/// Monte-Carlo moments together with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledMoments {
    pub moments: MomentEstimate,
    pub se_mu_y: f64,
    pub se_sigma_y2: f64,
    pub se_sigma_ya: f64,
}

const INITIAL_PANELS: usize = 16;

fn kink_break(act: &Activation<f64>, a: Gaussian1D<f64>) -> Vec<f64> {
    match act {
        Activation::Pwl { .. } => vec![-a.mean / a.std_dev()],
        Activation::Sigmoid => Vec::new(),
    }
}

/// Moments of `f(a)` for `a ~ N(μ, σ²)` by adaptive quadrature in the
/// standardized variable `z = (a − μ)/σ`. Second moments are integrated in
/// central form to avoid cancellation.
pub fn quad_output_moments(
    act: &Activation<f64>,
    a: Gaussian1D<f64>,
    cfg: &QuadratureConfig,
) -> Result<MomentEstimate> {
    cfg.validate()?;
    act.validate()?;
    if a.variance == 0.0 {
        return Ok(MomentEstimate {
            mu_y: act.eval(a.mean),
            sigma_y2: 0.0,
            sigma_ya: 0.0,
        });
    }
    let sd = a.std_dev();
    let h = cfg.half_width;
    let breaks = kink_break(act, a);
    let run = |g: &dyn Fn(f64) -> f64| {
        integrate(
            |z| g(z) * std_normal_pdf(z),
            -h,
            h,
            cfg.abs_tol,
            cfg.max_subdivisions,
            INITIAL_PANELS,
            &breaks,
        )
        .map(|r| r.value)
    };
    let f = |z: f64| act.eval(a.mean + sd * z);
    let mu_y = run(&|z| f(z))?;
    let sigma_y2 = run(&|z| (f(z) - mu_y).powi(2))?;
    let sigma_ya = run(&|z| (f(z) - mu_y) * sd * z)?;
    Ok(MomentEstimate {
        mu_y,
        sigma_y2: sigma_y2.max(0.0),
        sigma_ya,
    })
}

/// Mean and variance of `p(a | y) ∝ N(y; f(a), ε)·N(a; μ, σ²)`, normalized
/// numerically.
pub fn true_posterior_a(
    act: &Activation<f64>,
    prior: Gaussian1D<f64>,
    y: f64,
    epsilon: f64,
    cfg: &QuadratureConfig,
) -> Result<Gaussian1D<f64>> {
    cfg.validate()?;
    act.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    if !(prior.variance > 0.0) {
        return Err(Error::DegeneratePrior);
    }
    let sd = prior.std_dev();
    let h = cfg.half_width;
    let log_density = |z: f64| {
        let r = y - act.eval(prior.mean + sd * z);
        -0.5 * r * r / epsilon - 0.5 * z * z
    };

    // Locate the mode on a coarse grid so the integrand can be rescaled to a
    // unit peak, then bracket it with panels scaled to the local width
    // (Kronrod nodes never sit on panel ends, so an unbracketed narrow peak
    // can be missed entirely).
    const GRID: usize = 4000;
    let (mode, log_peak) = (0..=GRID)
        .map(|i| -h + 2.0 * h * i as f64 / GRID as f64)
        .map(|z| (z, log_density(z)))
        .fold((0.0, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    let step = 1e-4;
    let curvature =
        -(log_density(mode + step) - 2.0 * log_peak + log_density(mode - step)) / (step * step);
    let width = if curvature > 1.0 {
        curvature.sqrt().recip()
    } else {
        1.0
    };
    let mut breaks = kink_break(act, prior);
    breaks.extend([-8.0, -3.0, -1.0, 1.0, 3.0, 8.0].map(|k| mode + k * width));
    let density = |z: f64| (log_density(z) - log_peak).exp();
    let run = |g: &dyn Fn(f64) -> f64| {
        integrate(
            |z| g(z) * density(z),
            -h,
            h,
            cfg.abs_tol,
            cfg.max_subdivisions,
            INITIAL_PANELS * 4,
            &breaks,
        )
        .map(|r| r.value)
    };

    let norm = run(&|_| 1.0)?;
    // the true evidence is norm·exp(log_peak)/√(2π ε)
    let evidence_log = norm.ln() + log_peak;
    if !(norm > 0.0) || evidence_log < -700.0 {
        return Err(Error::VanishingEvidence(evidence_log.exp()));
    }
    let mean_z = run(&|z| z)? / norm;
    let var_z = run(&|z| (z - mean_z).powi(2))? / norm;
    Ok(Gaussian1D {
        mean: prior.mean + sd * mean_z,
        variance: (var_z * prior.variance).max(0.0),
    })
}

/// Conjugate linear-Gaussian posterior for `y = xᵀw + v`, `v ~ N(0, ε)`.
pub fn exact_linear_posterior(
    w: &WeightPosterior<f64>,
    x: &[f64],
    y: f64,
    epsilon: f64,
) -> Result<WeightPosterior<f64>> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig("epsilon must be positive".into()));
    }
    if x.len() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            got: x.len(),
        });
    }
    let n = w.dim();
    let cx = w.cov().mul_vec(x);
    let innovation_var = dot(x, &cx) + epsilon;
    let residual = y - dot(x, w.mean());
    let mean = w
        .mean()
        .iter()
        .zip(&cx)
        .map(|(m, c)| m + c * residual / innovation_var)
        .collect();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| w.cov()[(i, j)] - cx[i] * cx[j] / innovation_var)
                .collect()
        })
        .collect();
    let mut cov = SquareMatrix::from_rows(rows)?;
    cov.symmetrize();
    WeightPosterior::new(mean, cov)
}

/// Sample moments of `f(a)` from `n_samples` draws, deterministic in `seed`.
pub fn mc_output_moments(
    act: &Activation<f64>,
    a: Gaussian1D<f64>,
    n_samples: usize,
    seed: u64,
) -> Result<SampledMoments> {
    if n_samples < 10_000 {
        return Err(Error::InvalidConfig(format!(
            "at least 10^4 samples required, got {n_samples}"
        )));
    }
    act.validate()?;
    if a.variance == 0.0 {
        return Ok(SampledMoments {
            moments: MomentEstimate {
                mu_y: act.eval(a.mean),
                sigma_y2: 0.0,
                sigma_ya: 0.0,
            },
            se_mu_y: 0.0,
            se_sigma_y2: 0.0,
            se_sigma_ya: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = a.std_dev();
    let draws: Vec<(f64, f64)> = (0..n_samples)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            let av = a.mean + sd * z;
            (av, act.eval(av))
        })
        .collect();
    let n = n_samples as f64;
    let mean_a = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let mean_y = draws.iter().map(|d| d.1).sum::<f64>() / n;
    let (mut m2, mut m4, mut cross, mut cross2) = (0.0, 0.0, 0.0, 0.0);
    for &(av, yv) in &draws {
        let dy = yv - mean_y;
        let c = dy * (av - mean_a);
        m2 += dy * dy;
        m4 += dy.powi(4);
        cross += c;
        cross2 += c * c;
    }
    let var_y = m2 / (n - 1.0);
    let cov_ya = cross / (n - 1.0);
    let m4 = m4 / n;
    let cross2 = cross2 / n;
    Ok(SampledMoments {
        moments: MomentEstimate {
            mu_y: mean_y,
            sigma_y2: var_y,
            sigma_ya: cov_ya,
        },
        se_mu_y: (var_y / n).sqrt(),
        se_sigma_y2: ((m4 - var_y * var_y).max(0.0) / n).sqrt(),
        se_sigma_ya: ((cross2 - cov_ya * cov_ya).max(0.0) / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn g(mean: f64, variance: f64) -> Gaussian1D<f64> {
        Gaussian1D::new(mean, variance).unwrap()
    }

    #[test]
    fn quad_linear_is_closed_form() {
        let cfg = QuadratureConfig::default();
        let m = quad_output_moments(&Activation::linear(), g(1.3, 2.2), &cfg).unwrap();
        assert_abs_diff_eq!(m.mu_y, 1.3, epsilon = 1e-10);
        assert_abs_diff_eq!(m.sigma_y2, 2.2, epsilon = 1e-10);
        assert_abs_diff_eq!(m.sigma_ya, 2.2, epsilon = 1e-10);
    }

    #[test]
    fn quad_relu_half_gaussian() {
        let cfg = QuadratureConfig::default();
        let m = quad_output_moments(&Activation::relu(), g(0.0, 1.0), &cfg).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        assert_abs_diff_eq!(m.mu_y, 1.0 / tau.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(m.sigma_y2, 0.5 - 1.0 / tau, epsilon = 1e-10);
        assert_abs_diff_eq!(m.sigma_ya, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn quad_sigmoid_symmetry() {
        let cfg = QuadratureConfig::default();
        let m = quad_output_moments(&Activation::Sigmoid, g(0.0, 1.0), &cfg).unwrap();
        assert_abs_diff_eq!(m.mu_y, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn quad_point_mass() {
        let cfg = QuadratureConfig::default();
        let m = quad_output_moments(&Activation::Sigmoid, g(2.0, 0.0), &cfg).unwrap();
        assert_eq!((m.sigma_y2, m.sigma_ya), (0.0, 0.0));
    }

    #[test]
    fn config_validation() {
        let bad = QuadratureConfig {
            half_width: 5.0,
            ..Default::default()
        };
        assert!(quad_output_moments(&Activation::Sigmoid, g(0.0, 1.0), &bad).is_err());
        let bad = QuadratureConfig {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn posterior_linear_is_kalman() {
        let cfg = QuadratureConfig::default();
        let (mu, var, y, eps) = (0.4, 1.7, 1.0, 0.25);
        let p = true_posterior_a(&Activation::linear(), g(mu, var), y, eps, &cfg).unwrap();
        assert_abs_diff_eq!(p.mean, mu + var * (y - mu) / (var + eps), epsilon = 1e-10);
        assert_abs_diff_eq!(p.variance, var * eps / (var + eps), epsilon = 1e-10);
    }

    #[test]
    fn posterior_sigmoid_moves_toward_evidence() {
        let cfg = QuadratureConfig::default();
        let p = true_posterior_a(&Activation::Sigmoid, g(0.0, 1.0), 1.0, 0.01, &cfg).unwrap();
        assert!(p.mean > 0.0);
        assert!(p.variance < 1.0);
    }

    #[test]
    fn posterior_rejects_bad_inputs() {
        let cfg = QuadratureConfig::default();
        assert!(true_posterior_a(&Activation::Sigmoid, g(0.0, 1.0), 1.0, 0.0, &cfg).is_err());
        assert_eq!(
            true_posterior_a(&Activation::Sigmoid, g(0.0, 0.0), 1.0, 0.1, &cfg),
            Err(Error::DegeneratePrior)
        );
    }

    #[test]
    fn posterior_vanishing_evidence() {
        // a sigmoid can never produce y = 40 with noise variance 1e-4
        let cfg = QuadratureConfig::default();
        let r = true_posterior_a(&Activation::Sigmoid, g(0.0, 1.0), 40.0, 1e-4, &cfg);
        assert!(matches!(r, Err(Error::VanishingEvidence(_))));
    }

    #[test]
    fn exact_linear_scalar() {
        let w = WeightPosterior::isotropic(vec![0.0], 1.0).unwrap();
        let p = exact_linear_posterior(&w, &[1.0], 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.mean()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.cov()[(0, 0)], 0.5, epsilon = 1e-15);
        let p = exact_linear_posterior(&w, &[1.0], 1.0, 1e15).unwrap();
        assert_abs_diff_eq!(p.mean()[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.cov()[(0, 0)], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn mc_is_deterministic_and_exact_for_point_mass() {
        let act = Activation::Sigmoid;
        let a = mc_output_moments(&act, g(1.0, 2.0), 20_000, 7).unwrap();
        let b = mc_output_moments(&act, g(1.0, 2.0), 20_000, 7).unwrap();
        assert_eq!(a, b);
        let p = mc_output_moments(&act, g(1.0, 0.0), 20_000, 7).unwrap();
        assert_eq!(p.moments.sigma_y2, 0.0);
        assert!(mc_output_moments(&act, g(1.0, 2.0), 100, 7).is_err());
    }
}
