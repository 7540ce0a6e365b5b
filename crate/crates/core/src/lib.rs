//! Bayesian perceptron: a single neuron whose weights are Gaussian, trained
//! sequentially in closed form and queried by moment matching.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix it to `f64`, which is what the oracles and
//! experiments use.
//!
//! ```
//! use bayesian_perceptron::{Activation, Perceptron, TrainingInstance};
//!
//! let model = Perceptron::with_isotropic_prior(2, false, Activation::Sigmoid, vec![-1.0, 0.0], 1.0)?;
//! let model = model.update(&TrainingInstance::new(vec![1.0, 2.0], 1.0))?;
//! let p = model.predict(&[1.0, 1.0])?;
//! assert!(p.mu_y > 0.0 && p.mu_y < 1.0);
//! # Ok::<(), bayesian_perceptron::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activation;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod linalg;
pub mod model_file;
pub mod oracle;
pub mod perceptron;
pub mod scalar;

pub use activation::{Activation, OutputMoments};
pub use error::{Error, Result};
pub use gaussian::{Gaussian1D, PartialMoments, WeightPosterior};
pub use linalg::SquareMatrix;
pub use model_file::ModelFile;
pub use perceptron::{BayesianPerceptron, Prediction, TrainingInstance, DEFAULT_EPSILON};
pub use scalar::Scalar;

pub type Perceptron = BayesianPerceptron<f64>;
pub type Perceptron32 = BayesianPerceptron<f32>;
pub type Gaussian = Gaussian1D<f64>;
pub type Weights = WeightPosterior<f64>;
pub type Instance = TrainingInstance<f64>;
