//! Separated sets, covering numbers, cover profiles and packing exponents.

mod clique;
mod cover;
mod separated;

use serde::Serialize;

pub use cover::{
    cover_subset, covering_number, covering_number_with, geometric_doubling_profile, geometric_doubling_profile_with,
    CoverCount, CoverOptions, CoverProfile, ProfileRow, COVER_CAP, MAX_EXACT_TARGETS,
};
pub use separated::{
    greedy_separated, is_separated, max_separated_exact, max_separated_exact_capped, SeparatedSet, EXACT_CAP,
};

use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::stats::linear_fit;

/// Least-squares model `count ≈ C 2^(N l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PackingFit {
    /// Fitted `N̂`, the slope of `log2 count` against `l`.
    #[serde(rename = "N")]
    pub exponent: f64,
    /// Fitted `Ĉ = 2^intercept`.
    #[serde(rename = "C")]
    pub constant: f64,
}

/// Fits `log2 count` against the dyadic level `l` (radius `2^-l`).
pub fn packing_exponent_fit(l_values: &[i32], counts: &[usize]) -> Result<PackingFit> {
    let xs: Vec<f64> = l_values.iter().map(|&l| f64::from(l)).collect();
    packing_exponent_fit_levels(&xs, counts)
}

/// Same fit with real-valued levels `l = -log2 r`.
pub fn packing_exponent_fit_levels(levels: &[f64], counts: &[usize]) -> Result<PackingFit> {
    if levels.len() != counts.len() {
        return Err(Error::SizeMismatch { left: levels.len(), right: counts.len() });
    }
    if let Some(&c) = counts.iter().find(|&&c| c == 0) {
        return Err(Error::InvalidParameter { name: "count", expected: ">= 1", value: c as f64 });
    }
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).log2()).collect();
    let (slope, intercept) = linear_fit(levels, &ys)?;
    Ok(PackingFit { exponent: slope, constant: intercept.exp2() })
}

/// Separated-set counts over a radius list, ready for the exponent fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingReport {
    pub radii: Vec<f64>,
    /// Largest r-separated set found at each radius.
    pub counts: Vec<usize>,
    /// Whether each count is the sample's exact maximum.
    pub exact: Vec<bool>,
    /// `-log2 r` per radius.
    pub levels: Vec<f64>,
    pub fit: Option<PackingFit>,
    /// Direction of the bound relative to the underlying space.
    pub bound: &'static str,
}

/// Counts the largest r-separated set found per radius. With `exact` the
/// maximum-clique search runs (the sample must fit under `cap`); otherwise
/// greedy sets are used.
///
/// A set separated at a larger radius is separated at every smaller one,
/// so each count is raised to the best count found at any larger radius.
/// This keeps the counts nonincreasing in the radius.
pub fn packing_report<M: FiniteMetric + ?Sized>(
    m: &M,
    radii: &[f64],
    exact: bool,
    cap: usize,
) -> Result<PackingReport> {
    let sets = radii
        .iter()
        .map(|&r| if exact { max_separated_exact_capped(m, r, cap) } else { greedy_separated(m, r) })
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]));
    let mut counts = vec![0; radii.len()];
    let mut exact_flags = vec![false; radii.len()];
    let mut running = 0;
    for k in order {
        running = running.max(sets[k].len());
        counts[k] = running;
        exact_flags[k] = sets[k].exact && running == sets[k].len();
    }
    let levels: Vec<f64> = radii.iter().map(|r| -r.log2()).collect();
    let fit = packing_exponent_fit_levels(&levels, &counts).ok();
    Ok(PackingReport {
        radii: radii.to_vec(),
        counts,
        exact: exact_flags,
        levels,
        fit,
        bound: "lower bound on the packing number of the underlying space",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_on_exact_powers() {
        let ls = [1, 2, 3, 4];
        let counts: Vec<usize> = ls.iter().map(|&l| 1 << l).collect();
        let f = packing_exponent_fit(&ls, &counts).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12);
        assert!((f.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_needs_two_levels() {
        assert!(packing_exponent_fit(&[3], &[8]).is_err());
        assert!(packing_exponent_fit(&[3, 3], &[8, 8]).is_err());
        assert!(packing_exponent_fit(&[1, 2], &[0, 4]).is_err());
        assert!(packing_exponent_fit(&[1, 2], &[4]).is_err());
    }
}
