use std::fs::File;
use std::path::Path;

use bayesian_perceptron::{Activation, Instance};

use crate::Failure;

pub fn finite_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("'{s}': {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// Comma-separated finite decimals.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Err("empty vector".into());
    }
    s.split(',').map(finite_f64).collect()
}

/// `sigmoid`, `relu`, `linear`, `leaky:<slope>` or `pwl:<alpha>,<beta>`.
pub fn parse_activation(spec: &str) -> Result<Activation<f64>, Failure> {
    let bad = |m: String| Failure::new(4, format!("--activation {spec}: {m}"));
    let spec_lc = spec.trim().to_ascii_lowercase();
    let act = match spec_lc.split_once(':') {
        None => match spec_lc.as_str() {
            "sigmoid" => Activation::Sigmoid,
            "relu" => Activation::relu(),
            "linear" => Activation::linear(),
            other => return Err(bad(format!("unknown activation '{other}'"))),
        },
        Some(("leaky", s)) => {
            Activation::leaky_relu(finite_f64(s).map_err(bad)?).map_err(|e| bad(e.to_string()))?
        }
        Some(("pwl", params)) => match parse_vector(params).map_err(bad)?.as_slice() {
            [a, b] => Activation::pwl(*a, *b).map_err(|e| bad(e.to_string()))?,
            _ => return Err(bad("expected pwl:<alpha>,<beta>".into())),
        },
        Some((other, _)) => return Err(bad(format!("unknown activation '{other}'"))),
    };
    Ok(act)
}

#[derive(Debug)]
pub struct TrainingData {
    /// `None` when the file has no header row at all.
    pub input_dim: Option<usize>,
    pub instances: Vec<Instance>,
}

/// Reads a headed CSV whose last column is the target.
pub fn read_training_csv(path: &Path) -> Result<TrainingData, Failure> {
    let io = |e: csv::Error| Failure::io(path, e);
    let file = File::open(path).map_err(|e| Failure::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers().map_err(io)?.clone();
    if headers.is_empty() {
        return Ok(TrainingData {
            input_dim: None,
            instances: Vec::new(),
        });
    }
    if headers.len() < 2 {
        return Err(Failure::new(
            2,
            format!("{}: need columns x1..xd,y", path.display()),
        ));
    }
    let cols = headers.len();
    let mut instances = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(io)?;
        let line = row + 2;
        if record.len() != cols {
            return Err(Failure::new(
                3,
                format!(
                    "{} line {line}: {} fields, header has {cols}",
                    path.display(),
                    record.len()
                ),
            ));
        }
        let values = record
            .iter()
            .map(finite_f64)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|m| Failure::new(2, format!("{} line {line}: {m}", path.display())))?;
        let (x, y) = values.split_at(cols - 1);
        instances.push(Instance::new(x.to_vec(), y[0]));
    }
    Ok(TrainingData {
        input_dim: Some(cols - 1),
        instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn activation_specs() {
        assert_eq!(parse_activation("sigmoid").unwrap(), Activation::Sigmoid);
        assert_eq!(parse_activation("relu").unwrap(), Activation::relu());
        assert_eq!(
            parse_activation("pwl:0.2,0.5").unwrap(),
            Activation::pwl(0.2, 0.5).unwrap()
        );
        assert_eq!(
            parse_activation("leaky:0.1").unwrap(),
            Activation::leaky_relu(0.1).unwrap()
        );
        for bad in ["pwl:0.5,0.2", "tanh", "pwl:1", "leaky:x", "foo:1"] {
            assert_eq!(parse_activation(bad).unwrap_err().code, 4, "{bad}");
        }
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_vector("-1, 0").unwrap(), vec![-1.0, 0.0]);
        assert!(parse_vector("1,nan").is_err());
        assert!(parse_vector("").is_err());
        assert!(finite_f64("inf").is_err());
    }
}
