//! Ordinary least squares on small series.

use crate::error::{Error, Result};

/// Least-squares line `y = slope * x + intercept`.
///
/// Needs at least two distinct `x` values.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::SizeMismatch { left: xs.len(), right: ys.len() });
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    if xs.len() < 2 || sxx == 0.0 {
        let distinct = if xs.is_empty() { 0 } else { 1 };
        return Err(Error::TooFewPoints { needed: 2, got: distinct });
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    Ok((slope, mean_y - slope * mean_x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let (s, c) = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_abscissa_rejected() {
        assert!(linear_fit(&[2.0, 2.0], &[1.0, 3.0]).is_err());
        assert!(linear_fit(&[], &[]).is_err());
    }
}
