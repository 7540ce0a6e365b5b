use crate::error::{Error, Result};

fn paired(pred: &[f64], truth: &[f64]) -> Result<()> {
    if pred.is_empty() {
        return Err(Error::EmptyInput);
    }
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: pred.len(),
            got: truth.len(),
        });
    }
    Ok(())
}

pub fn mae(pred: &[f64], truth: &[f64]) -> Result<f64> {
    paired(pred, truth)?;
    Ok(pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / pred.len() as f64)
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    paired(pred, truth)?;
    let mse = pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t).powi(2))
        .sum::<f64>()
        / pred.len() as f64;
    Ok(mse.sqrt())
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Empirical CDF of `|errors|` as `(error, P(|e| ≤ error))` steps, one per
/// distinct value, ascending. The last probability is exactly 1.
pub fn cumulative_abs_error_distribution(errors: &[f64]) -> Result<Vec<(f64, f64)>> {
    if errors.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let n = abs.len();
    let mut steps: Vec<(f64, f64)> = Vec::new();
    for (i, e) in abs.iter().enumerate() {
        let p = (i + 1) as f64 / n as f64;
        match steps.last_mut() {
            Some(last) if last.0 == *e => last.1 = p,
            _ => steps.push((*e, p)),
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(mae(&[1.0, -1.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(rmse(&[3.0], &[0.0]).unwrap(), 3.0);
        let cdf = cumulative_abs_error_distribution(&[0.1, 0.1, 0.3]).unwrap();
        assert_eq!(cdf, vec![(0.1, 2.0 / 3.0), (0.3, 1.0)]);
        assert_eq!(median(&[3.0, 1.0, 2.0, 10.0]).unwrap(), 2.5);
        assert_eq!(mean_std(&[1.0, 3.0]).unwrap(), (2.0, 1.0));
    }

    #[test]
    fn empty_and_mismatched() {
        assert_eq!(mae(&[], &[]), Err(Error::EmptyInput));
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert_eq!(
            cumulative_abs_error_distribution(&[]),
            Err(Error::EmptyInput)
        );
    }
}
