//! Text persistence for [`BayesianPerceptron`].
//!
//! The document is JSON:
//!
//! ```json
//! {
//!   "version": 1,
//!   "input_dim": 2,
//!   "bias": false,
//!   "activation": { "kind": "pwl", "alpha": 0.0, "beta": 1.0 },
//!   "epsilon": 0.01,
//!   "mean": [-1.0, 0.0],
//!   "cov": [[1.0, 0.0], [0.0, 1.0]]
//! }
//! ```
//!
//! Numbers are written in shortest round-trip form, so every field survives
//! a save/load cycle bit for bit.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::gaussian::WeightPosterior;
use crate::linalg::SquareMatrix;
use crate::perceptron::BayesianPerceptron;
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile<T> {
    pub version: u32,
    pub input_dim: usize,
    pub bias: bool,
    pub activation: Activation<T>,
    pub epsilon: T,
    pub mean: Vec<T>,
    pub cov: Vec<Vec<T>>,
}

impl<T: Scalar> From<&BayesianPerceptron<T>> for ModelFile<T> {
    fn from(m: &BayesianPerceptron<T>) -> Self {
        Self {
            version: FORMAT_VERSION,
            input_dim: m.input_dim(),
            bias: m.bias(),
            activation: *m.activation(),
            epsilon: m.epsilon(),
            mean: m.weights().mean().to_vec(),
            cov: m.weights().cov().rows(),
        }
    }
}

impl<T: Scalar> TryFrom<ModelFile<T>> for BayesianPerceptron<T> {
    type Error = Error;

    fn try_from(f: ModelFile<T>) -> Result<Self> {
        if f.version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported version {} (expected {FORMAT_VERSION})",
                f.version
            )));
        }
        let cov = SquareMatrix::from_rows(f.cov)?;
        let weights = WeightPosterior::new(f.mean, cov)?;
        BayesianPerceptron::new(f.input_dim, f.bias, f.activation, f.epsilon, weights)
    }
}

impl<T: Scalar + Serialize + DeserializeOwned> BayesianPerceptron<T> {
    pub fn to_model_string(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self))
            .expect("model serialisation is infallible for finite values")
    }

    pub fn from_model_str(s: &str) -> Result<Self> {
        let f: ModelFile<T> =
            serde_json::from_str(s).map_err(|e| Error::ModelFormat(e.to_string()))?;
        f.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn document_shape() {
        let m = BayesianPerceptron::with_isotropic_prior(
            1,
            true,
            Activation::leaky_relu(0.1).unwrap(),
            vec![0.5, -0.25],
            2.0,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&m.to_model_string()).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["input_dim"], 1);
        assert_eq!(v["bias"], true);
        assert_eq!(v["activation"]["kind"], "pwl");
        assert_eq!(v["activation"]["alpha"], 0.1);
        assert_eq!(v["epsilon"], 0.01);
        assert_eq!(v["cov"][1][1], 2.0);

        let s =
            BayesianPerceptron::with_isotropic_prior(1, false, Activation::Sigmoid, vec![0.0], 1.0)
                .unwrap()
                .to_model_string();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["activation"], serde_json::json!({"kind": "sigmoid"}));
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            BayesianPerceptron::<f64>::from_model_str("{"),
            Err(Error::ModelFormat(_))
        ));
        let bad_version = r#"{"version":2,"input_dim":1,"bias":false,"activation":{"kind":"sigmoid"},
            "epsilon":0.01,"mean":[0.0],"cov":[[1.0]]}"#;
        assert!(matches!(
            BayesianPerceptron::<f64>::from_model_str(bad_version),
            Err(Error::ModelFormat(_))
        ));
        let bad_pwl = r#"{"version":1,"input_dim":1,"bias":false,"activation":{"kind":"pwl","alpha":0.5,"beta":0.2},
            "epsilon":0.01,"mean":[0.0],"cov":[[1.0]]}"#;
        assert!(matches!(
            BayesianPerceptron::<f64>::from_model_str(bad_pwl),
            Err(Error::InvalidActivation(_))
        ));
        let bad_dim = r#"{"version":1,"input_dim":2,"bias":false,"activation":{"kind":"sigmoid"},
            "epsilon":0.01,"mean":[0.0],"cov":[[1.0]]}"#;
        assert!(matches!(
            BayesianPerceptron::<f64>::from_model_str(bad_dim),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            mean in prop::collection::vec(-1e6f64..1e6, 3),
            l in prop::collection::vec(-3.0f64..3.0, 9),
            eps in 1e-9f64..10.0,
        ) {
            // C = L·Lᵀ is PSD; symmetrize explicitly to keep the entries mirrored
            let mut rows = vec![vec![0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    rows[i][j] = (0..3).map(|k| l[i * 3 + k] * l[j * 3 + k]).sum();
                }
            }
            let mut cov = SquareMatrix::from_rows(rows).unwrap();
            cov.symmetrize();
            let w = WeightPosterior::new(mean, cov).unwrap();
            let m = BayesianPerceptron::new(2, true, Activation::Sigmoid, eps, w).unwrap();
            let back = BayesianPerceptron::from_model_str(&m.to_model_string()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
