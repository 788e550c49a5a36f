//! Doubling constants of atomic measures on finite samples.
//!
//! For positive finite atomic measures every ball has finite positive mass,
//! so only the doubling inequality itself needs checking. A finite sweep
//! over centers and radii can only ever be consistent with doubling; it
//! never proves it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{check_index, check_radius, DistanceMatrix, FiniteMetric};
use crate::stats::linear_fit;

/// Default least-squares slope (per unit of `l`) above which a ratio series
/// counts as growing.
pub const TREND_THRESHOLD: f64 = 0.1;

/// A finite metric sample with a nonnegative mass on every point.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredSpace<M = DistanceMatrix> {
    metric: M,
    weights: Vec<f64>,
}

impl<M: FiniteMetric> MeasuredSpace<M> {
    pub fn new(metric: M, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != metric.len() {
            return Err(Error::SizeMismatch { left: metric.len(), right: weights.len() });
        }
        if let Some(&w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter { name: "weight", expected: "finite and nonnegative", value: w });
        }
        if weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::ZeroTotalMass);
        }
        Ok(Self { metric, weights })
    }

    /// Uniform unit masses.
    pub fn counting(metric: M) -> Result<Self> {
        let n = metric.len();
        Self::new(metric, vec![1.0; n])
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weights multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self>
    where
        M: Clone,
    {
        Self::new(self.metric.clone(), self.weights.iter().map(|w| w * c).collect())
    }
}

/// Mass of the open ball `B(center, r)`.
pub fn ball_measure<M: FiniteMetric>(s: &MeasuredSpace<M>, center: usize, r: f64) -> Result<f64> {
    check_radius(r)?;
    check_index(center, s.len())?;
    Ok((0..s.len()).filter(|&i| s.metric.dist(center, i) < r).map(|i| s.weights[i]).sum())
}

/// Masses of `B(center, r)` for many radii from one sorted distance profile.
struct CenterProfile {
    distances: Vec<f64>,
    cumulative: Vec<f64>,
}

impl CenterProfile {
    fn new<M: FiniteMetric>(s: &MeasuredSpace<M>, center: usize) -> Self {
        let mut pairs: Vec<(f64, usize)> = (0..s.len()).map(|i| (s.metric.dist(center, i), i)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(pairs.len() + 1);
        cumulative.push(0.0);
        for &(_, i) in &pairs {
            acc += s.weights[i];
            cumulative.push(acc);
        }
        Self { distances: pairs.into_iter().map(|p| p.0).collect(), cumulative }
    }

    fn mass(&self, r: f64) -> f64 {
        self.cumulative[self.distances.partition_point(|&d| d < r)]
    }
}

/// Which centers a sweep visits.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DoublingSweep {
    #[default]
    AllCenters,
    /// Only these centers. Enough for translation-invariant metrics with a
    /// translation-invariant measure, where every center behaves the same.
    Centers(Vec<usize>),
}

impl DoublingSweep {
    fn centers(&self, n: usize) -> Result<Vec<usize>> {
        match self {
            DoublingSweep::AllCenters => Ok((0..n).collect()),
            DoublingSweep::Centers(c) => {
                c.iter().try_for_each(|&i| check_index(i, n))?;
                Ok(c.clone())
            }
        }
    }
}

/// The worst ratio `μ(B(x, 2r)) / μ(B(x, r))` found by a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingConstant {
    pub value: f64,
    pub center: usize,
    pub radius: f64,
}

/// Per-radius worst ratio over centers, with the argmax center. Ties go to
/// the lowest index so the result does not depend on thread scheduling.
fn sweep_ratios<M: FiniteMetric>(
    s: &MeasuredSpace<M>,
    radii: &[f64],
    sweep: &DoublingSweep,
) -> Result<Vec<(f64, usize)>> {
    radii.iter().try_for_each(|&r| check_radius(r))?;
    let centers = sweep.centers(s.len())?;
    let per_center: Vec<Vec<f64>> = centers
        .par_iter()
        .map(|&x| {
            let profile = CenterProfile::new(s, x);
            radii
                .iter()
                .map(|&r| {
                    let inner = profile.mass(r);
                    if inner > 0.0 {
                        Ok(profile.mass(2.0 * r) / inner)
                    } else {
                        Err(Error::ZeroMassBall { center: x, radius: r })
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok((0..radii.len())
        .map(|k| {
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for (row, &x) in per_center.iter().zip(&centers) {
                if row[k] > best.0 {
                    best = (row[k], x);
                }
            }
            best
        })
        .collect())
}

/// Least admissible doubling constant on the sweep `centers × radii`.
pub fn doubling_constant<M: FiniteMetric>(s: &MeasuredSpace<M>, radii: &[f64]) -> Result<DoublingConstant> {
    doubling_constant_with(s, radii, &DoublingSweep::AllCenters)
}

pub fn doubling_constant_with<M: FiniteMetric>(
    s: &MeasuredSpace<M>,
    radii: &[f64],
    sweep: &DoublingSweep,
) -> Result<DoublingConstant> {
    if radii.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let ratios = sweep_ratios(s, radii, sweep)?;
    let mut best = DoublingConstant { value: f64::NEG_INFINITY, center: 0, radius: radii[0] };
    for (&(value, center), &radius) in ratios.iter().zip(radii) {
        if value > best.value {
            best = DoublingConstant { value, center, radius };
        }
    }
    Ok(best)
}

/// Doubling ratios over the dyadic radii `2^-l` and a growth verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    pub l_values: Vec<i32>,
    pub radii: Vec<f64>,
    /// Worst ratio over the swept centers, per radius.
    pub ratios: Vec<f64>,
    /// Center attaining each ratio.
    pub argmax_centers: Vec<usize>,
    pub max_ratio: f64,
    /// Least-squares slope of the ratios against `l`.
    pub trend_slope: f64,
    pub threshold: f64,
    /// True when the ratios show no growth trend above the threshold.
    /// Sample-level evidence only.
    pub consistent_with_doubling: bool,
    pub sweep: DoublingSweep,
}

pub fn doubling_verdict<M: FiniteMetric>(s: &MeasuredSpace<M>, l_values: &[i32]) -> Result<DoublingReport> {
    doubling_verdict_with(s, l_values, &DoublingSweep::AllCenters, TREND_THRESHOLD)
}

pub fn doubling_verdict_with<M: FiniteMetric>(
    s: &MeasuredSpace<M>,
    l_values: &[i32],
    sweep: &DoublingSweep,
    threshold: f64,
) -> Result<DoublingReport> {
    if s.total_mass() <= 0.0 {
        return Err(Error::ZeroTotalMass);
    }
    let radii: Vec<f64> = l_values.iter().map(|&l| 2f64.powi(-l)).collect();
    let swept = sweep_ratios(s, &radii, sweep)?;
    let ratios: Vec<f64> = swept.iter().map(|p| p.0).collect();
    let xs: Vec<f64> = l_values.iter().map(|&l| f64::from(l)).collect();
    let (trend_slope, _) = linear_fit(&xs, &ratios)?;
    Ok(DoublingReport {
        l_values: l_values.to_vec(),
        radii,
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        argmax_centers: swept.iter().map(|p| p.1).collect(),
        ratios,
        trend_slope,
        threshold,
        consistent_with_doubling: trend_slope <= threshold,
        sweep: sweep.clone(),
    })
}
