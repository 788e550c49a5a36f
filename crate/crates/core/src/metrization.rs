//! Chain metrization of a quasimetric.
//!
//! For a quasimetric with constant `K`, pick `q` with `(2K)^q = 2` and
//! define the chain distance as the infimum of `Σ d(x_{j-1}, x_j)^q` over
//! finite chains from `x` to `y`. The result is a metric sandwiched as
//! `chain <= d^q <= 4 chain`.
//!
//! On a finite sample the infimum is attained by a simple path: revisiting a
//! vertex only adds nonnegative weight. So the chain distance is the
//! all-pairs shortest path in the complete graph weighted by `d^q`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{quasi_constant, DistanceMatrix};
use crate::tolerance::approx_le;

/// Upper factor in the sandwich `chain <= d^q <= SANDWICH_FACTOR * chain`.
pub const SANDWICH_FACTOR: f64 = 4.0;

/// `q = ln 2 / ln(2K)`, the exponent with `(2K)^q = 2`.
pub fn exponent_q(k: f64) -> Result<f64> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::InvalidParameter { name: "K", expected: "a finite real >= 1", value: k });
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    Ok(std::f64::consts::LN_2 / (2.0 * k).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetrizationResult {
    pub q: f64,
    /// Shortest-chain distances.
    pub chain: DistanceMatrix,
    /// The powered quasimetric `d^q`.
    pub powered: DistanceMatrix,
    /// Largest `powered / chain` over distinct pairs.
    pub max_sandwich_ratio: f64,
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "q", expected: "in (0, 1]", value: q })
    }
}

/// Floyd–Warshall over `d^q`. Each pivot round updates rows in parallel;
/// row `k` itself is unchanged during round `k`, so the result does not
/// depend on scheduling.
fn all_pairs_shortest(weights: &DistanceMatrix) -> Vec<Vec<f64>> {
    let n = weights.n();
    let mut dist = weights.to_rows();
    for k in 0..n {
        let pivot = dist[k].clone();
        dist.par_iter_mut().for_each(|row| {
            let via = row[k];
            for (cell, &tail) in row.iter_mut().zip(&pivot) {
                let candidate = via + tail;
                if candidate < *cell {
                    *cell = candidate;
                }
            }
        });
    }
    // Floating sums can break exact symmetry by an ulp; keep the smaller
    // value, which is still the length of a real chain.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = dist[i][j].min(dist[j][i]);
            dist[i][j] = v;
            dist[j][i] = v;
        }
    }
    dist
}

pub fn chain_metric(m: &DistanceMatrix, q: f64) -> Result<MetrizationResult> {
    check_q(q)?;
    let powered = if q == 1.0 { m.clone() } else { m.map(|d| d.powf(q))? };
    let mut chain = DistanceMatrix::new(all_pairs_shortest(&powered))?;
    if let Some(labels) = m.labels() {
        chain = chain.with_labels(labels.to_vec())?;
    }
    let n = m.n();
    let mut max_ratio = 1.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max_ratio = max_ratio.max(powered.get(i, j) / chain.get(i, j));
        }
    }
    Ok(MetrizationResult { q, chain, powered, max_sandwich_ratio: max_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub quasi_constant: f64,
    pub q: f64,
    pub holds: bool,
    pub max_sandwich_ratio: f64,
}

/// Runs the metrization with the canonical exponent and checks
/// `chain <= d^q <= 4 chain` entrywise up to the relative tolerance.
pub fn sandwich_check(m: &DistanceMatrix) -> Result<(SandwichReport, MetrizationResult)> {
    let k = quasi_constant(m);
    let q = exponent_q(k)?;
    let result = chain_metric(m, q)?;
    let n = m.n();
    let mut holds = true;
    for i in 0..n {
        for j in (i + 1)..n {
            let (c, p) = (result.chain.get(i, j), result.powered.get(i, j));
            holds &= approx_le(c, p) && approx_le(p, SANDWICH_FACTOR * c);
        }
    }
    let report = SandwichReport { quasi_constant: k, q, holds, max_sandwich_ratio: result.max_sandwich_ratio };
    Ok((report, result))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64], f: impl Fn(f64) -> f64 + Sync) -> DistanceMatrix {
        DistanceMatrix::from_fn(points.len(), |i, j| f((points[i] - points[j]).abs())).unwrap()
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(exponent_q(1.0).unwrap(), 1.0);
        assert!((exponent_q(2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((exponent_q(8.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(exponent_q(0.5).is_err());
        assert!(exponent_q(f64::NAN).is_err());
    }

    #[test]
    fn metric_input_is_fixed_by_q_one() {
        let m = line(&[0.0, 0.3, 0.5, 1.0], |t| t);
        let r = chain_metric(&m, 1.0).unwrap();
        assert_eq!(r.chain, m);
        assert_eq!(r.max_sandwich_ratio, 1.0);
    }

    #[test]
    fn squared_line_recovers_absolute_value() {
        let m = line(&[0.0, 0.5, 1.0], |t| t * t);
        let r = chain_metric(&m, 0.5).unwrap();
        assert_eq!(r.chain.get(0, 1), 0.5);
        assert_eq!(r.chain.get(0, 2), 1.0);
        assert_eq!(r.chain.get(1, 2), 0.5);
    }

    #[test]
    fn q_too_large_collapses_chains() {
        let pts: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let m = line(&pts, |t| t * t);
        let r = chain_metric(&m, 1.0).unwrap();
        assert!((r.chain.get(0, 10) - 0.1).abs() < 1e-12);
        assert_eq!(r.powered.get(0, 10), 1.0);
    }

    #[test]
    fn rejects_bad_q() {
        let m = line(&[0.0, 1.0], |t| t);
        assert!(chain_metric(&m, 0.0).is_err());
        assert!(chain_metric(&m, 1.5).is_err());
    }

    #[test]
    fn sandwich_examples() {
        let (r, _) = sandwich_check(&line(&[0.0, 0.2, 0.9], |t| t)).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_sandwich_ratio, 1.0);
        let (r, res) = sandwich_check(&line(&[0.0, 0.5, 1.0], |t| t * t)).unwrap();
        assert!(r.holds);
        assert_eq!(r.quasi_constant, 2.0);
        assert!((r.max_sandwich_ratio - 1.0).abs() < 1e-12);
        assert!((res.chain.get(0, 2) - 1.0).abs() < 1e-12);
    }
}
