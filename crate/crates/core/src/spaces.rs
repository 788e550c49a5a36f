//! Concrete sample spaces: truncated torus grids with product metrics, the
//! middle-thirds Cantor set with its coin-flip measure, and the real line
//! under the non-doubling metric `ln(1 + |x - y|)`.
//!
//! Points of the infinite-dimensional torus are stored by their first `n`
//! coordinates; every later coordinate is 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MeasuredSpace;
use crate::metric::{DistanceMatrix, FiniteMetric};

/// Default cap on the number of points a torus grid may have.
pub const TORUS_GRID_CAP: usize = 1 << 20;

/// Default cap on Cantor sample size; the sample is stored as a full matrix.
pub const CANTOR_CAP: usize = 1 << 12;

#[inline]
pub(crate) fn toric(x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    d.min(1.0 - d)
}

fn check_torus_coord(x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfTorus { value: x })
    }
}

/// Distance on the circle `[0, 1)` with endpoints glued.
pub fn toric_distance(x: f64, y: f64) -> Result<f64> {
    check_torus_coord(x)?;
    check_torus_coord(y)?;
    Ok(toric(x, y))
}

/// A finitely supported point of the infinite-dimensional torus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        coords.iter().try_for_each(|&x| check_torus_coord(x))?;
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Group doubling `2x mod 1`.
    pub fn doubled(&self) -> Self {
        Self(self.0.iter().map(|&x| (2.0 * x).fract()).collect())
    }

    /// Group translation `x + t mod 1`.
    pub fn translated(&self, t: &TorusPoint) -> Result<Self> {
        if t.0.len() != self.0.len() {
            return Err(Error::DimensionMismatch { expected: self.0.len(), got: t.0.len() });
        }
        Ok(Self(self.0.iter().zip(&t.0).map(|(a, b)| (a + b).fract()).collect()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    Torus,
    Real,
    Cantor,
}

/// Indexed points with coordinates in a named ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub ambient: Ambient,
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(ambient: Ambient, points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if ambient == Ambient::Torus {
                p.iter().try_for_each(|&x| check_torus_coord(x))?;
            }
        }
        Ok(Self { ambient, dim, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// `Σ w_i ρ_T(x_i, y_i)`, the classical product metric with `w_i = 2^-i`.
    WeightedSum,
    /// `max_i ρ_T(x_i, y_i)`.
    Sup,
    /// `(Σ a_i ρ_T(x_i, y_i)²)^(1/2)`.
    Bendikov,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::WeightedSum => "weighted_sum",
            MetricKind::Sup => "sup",
            MetricKind::Bendikov => "bendikov",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "weighted_sum" => Ok(MetricKind::WeightedSum),
            "sup" => Ok(MetricKind::Sup),
            "bendikov" => Ok(MetricKind::Bendikov),
            other => Err(format!("unknown metric kind {other:?} (weighted_sum | sup | bendikov)")),
        }
    }
}

/// Translation-invariant product metric on truncated torus points.
///
/// An empty weight list means the default `w_i = 2^-i` (1-based `i`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductMetricSpec {
    pub kind: MetricKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<f64>,
}

impl ProductMetricSpec {
    pub fn sup() -> Self {
        Self { kind: MetricKind::Sup, weights: Vec::new() }
    }

    pub fn weighted_sum(weights: Vec<f64>) -> Self {
        Self { kind: MetricKind::WeightedSum, weights }
    }

    pub fn bendikov(weights: Vec<f64>) -> Self {
        Self { kind: MetricKind::Bendikov, weights }
    }

    /// `kind` with the dyadic default weights.
    pub fn dyadic(kind: MetricKind) -> Self {
        Self { kind, weights: Vec::new() }
    }

    /// Weight of the 0-based coordinate `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if self.weights.is_empty() {
            0.5_f64.powi(i as i32 + 1)
        } else {
            self.weights[i]
        }
    }

    /// Checks that the spec can measure points with `dim` coordinates.
    pub fn check(&self, dim: usize) -> Result<()> {
        if self.kind == MetricKind::Sup || self.weights.is_empty() {
            return Ok(());
        }
        if self.weights.len() < dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.weights.len() });
        }
        for &w in &self.weights {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "weight",
                    expected: "finite and strictly positive",
                    value: w,
                });
            }
        }
        Ok(())
    }

    /// Distance between two coordinate vectors of equal length.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let pairs = x.iter().zip(y).enumerate();
        match self.kind {
            MetricKind::Sup => x.iter().zip(y).map(|(&a, &b)| toric(a, b)).fold(0.0, f64::max),
            MetricKind::WeightedSum => pairs.map(|(i, (&a, &b))| self.weight(i) * toric(a, b)).sum(),
            MetricKind::Bendikov => pairs
                .map(|(i, (&a, &b))| {
                    let t = toric(a, b);
                    self.weight(i) * t * t
                })
                .sum::<f64>()
                .sqrt(),
        }
    }
}

fn check_torus_cloud(points: &PointCloud, spec: &ProductMetricSpec) -> Result<()> {
    if points.ambient != Ambient::Torus {
        return Err(Error::InvalidMatrix("product metrics need torus points".into()));
    }
    spec.check(points.dim)
}

/// Full distance matrix of a product metric on a torus point cloud.
pub fn product_metric(points: &PointCloud, spec: &ProductMetricSpec) -> Result<DistanceMatrix> {
    check_torus_cloud(points, spec)?;
    DistanceMatrix::from_fn(points.len(), |i, j| spec.distance(points.point(i), points.point(j)))
}

/// Lazily evaluated product metric over a torus point cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusSample {
    pub cloud: PointCloud,
    pub spec: ProductMetricSpec,
}

impl TorusSample {
    pub fn new(cloud: PointCloud, spec: ProductMetricSpec) -> Result<Self> {
        check_torus_cloud(&cloud, &spec)?;
        Ok(Self { cloud, spec })
    }

    pub fn to_matrix(&self) -> Result<DistanceMatrix> {
        product_metric(&self.cloud, &self.spec)
    }
}

impl FiniteMetric for TorusSample {
    fn len(&self) -> usize {
        self.cloud.len()
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.spec.distance(self.cloud.point(i), self.cloud.point(j))
    }
}

fn grid_size(n: usize, j: usize, cap: usize) -> Result<usize> {
    if n == 0 || j == 0 {
        return Err(Error::InvalidParameter { name: "n and j", expected: ">= 1", value: n.min(j) as f64 });
    }
    let bits = n.checked_mul(j).filter(|&b| b < usize::BITS as usize);
    match bits.map(|b| 1usize << b) {
        Some(size) if size <= cap => Ok(size),
        _ => Err(Error::CapExceeded {
            what: "torus grid",
            size: bits.map_or(usize::MAX, |b| 1usize << b),
            cap,
            hint: "lower n or j, or raise the cap",
        }),
    }
}

/// The subgroup of points whose first `n` coordinates lie on the dyadic
/// grid `{k 2^-j}` and whose tail is zero. Index 0 is the identity; the
/// first coordinate varies slowest.
pub fn torus_grid(n: usize, j: usize) -> Result<PointCloud> {
    torus_grid_capped(n, j, TORUS_GRID_CAP)
}

pub fn torus_grid_capped(n: usize, j: usize, cap: usize) -> Result<PointCloud> {
    let size = grid_size(n, j, cap)?;
    let side = 1usize << j;
    let step = 1.0 / side as f64;
    let points = (0..size)
        .map(|mut idx| {
            let mut p = vec![0.0; n];
            for slot in p.iter_mut().rev() {
                *slot = (idx % side) as f64 * step;
                idx /= side;
            }
            p
        })
        .collect();
    PointCloud::new(Ambient::Torus, points)
}

/// Smallest distance from the identity to another element of the grid
/// subgroup. For translation-invariant metrics this is the grid's minimum
/// pairwise distance.
pub fn subgroup_min_distance(n: usize, j: usize, spec: &ProductMetricSpec) -> Result<f64> {
    subgroup_min_distance_capped(n, j, spec, TORUS_GRID_CAP)
}

pub fn subgroup_min_distance_capped(n: usize, j: usize, spec: &ProductMetricSpec, cap: usize) -> Result<f64> {
    let grid = torus_grid_capped(n, j, cap)?;
    spec.check(n)?;
    let zero = vec![0.0; n];
    Ok(grid.points[1..].iter().map(|z| spec.distance(&zero, z)).fold(f64::INFINITY, f64::min))
}

/// Integer positions of the level-`level` Cantor sample in units of
/// `3^-level`, in increasing order, together with the unit denominator.
///
/// A binary code `(b_1, …, b_level)` maps to `Σ 2 b_n 3^(level - n)`, the
/// image of `Σ 4 x_n / 3^n` with `x_n = b_n / 2`.
pub fn cantor_numerators(level: u32) -> Result<(Vec<u64>, u64)> {
    cantor_numerators_capped(level, CANTOR_CAP)
}

fn cantor_numerators_capped(level: u32, cap: usize) -> Result<(Vec<u64>, u64)> {
    if level == 0 {
        return Err(Error::InvalidParameter { name: "level", expected: ">= 1", value: 0.0 });
    }
    let size = 1usize.checked_shl(level).filter(|&s| s <= cap && level < 40).ok_or(Error::CapExceeded {
        what: "Cantor sample",
        size: 1usize.checked_shl(level).unwrap_or(usize::MAX),
        cap,
        hint: "lower the level",
    })?;
    let denominator = 3u64.pow(level);
    let numerators = (0..size)
        .map(|code| {
            (0..level).filter(|bit| code >> (level - 1 - bit) & 1 == 1).map(|bit| 2 * 3u64.pow(level - 1 - bit)).sum()
        })
        .collect();
    Ok((numerators, denominator))
}

/// Radius `3^-k` expressed the same way Cantor distances are computed, so
/// that ball membership comparisons see consistent rounding.
pub fn cantor_radius(level: u32, k: u32) -> f64 {
    if k > level {
        return 3f64.powi(-(k as i32));
    }
    3u64.pow(level - k) as f64 / 3u64.pow(level) as f64
}

/// Level-truncated Cantor set with the metric of the real line and the
/// uniform measure `2^-level` on level codes.
pub fn cantor_space(level: u32) -> Result<MeasuredSpace> {
    cantor_space_capped(level, CANTOR_CAP)
}

pub fn cantor_space_capped(level: u32, cap: usize) -> Result<MeasuredSpace> {
    let (nums, den) = cantor_numerators_capped(level, cap)?;
    let den = den as f64;
    let m = DistanceMatrix::from_fn(nums.len(), |i, j| nums[i].abs_diff(nums[j]) as f64 / den)?;
    let labels = (0..nums.len()).map(|c| format!("{c:0width$b}", width = level as usize)).collect();
    let weight = 0.5_f64.powi(level as i32);
    MeasuredSpace::new(m.with_labels(labels)?, vec![weight; nums.len()])
}

/// `count` evenly spaced reals from `lo` to `hi` inclusive.
pub fn evenly_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "range",
            expected: "finite with lo < hi and count >= 2",
            value: count as f64,
        });
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|k| if k + 1 == count { hi } else { lo + k as f64 * step }).collect())
}

/// The real line under `ln(1 + |x - y|)`: same topology, not doubling.
pub fn log_line(xs: &[f64]) -> Result<DistanceMatrix> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    for w in order.windows(2) {
        if xs[w[0]] == xs[w[1]] {
            let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::DuplicatePoint { value: xs[w[0]], first, second });
        }
    }
    if let Some(&bad) = xs.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter { name: "point", expected: "finite", value: bad });
    }
    DistanceMatrix::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs().ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{quasi_constant, validate_quasimetric};

    #[test]
    fn toric_examples() {
        assert!((toric_distance(0.1, 0.9).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(toric_distance(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(toric_distance(0.25, 0.75).unwrap(), 0.5);
        assert!(toric_distance(1.0, 0.5).is_err());
        assert!(toric_distance(0.5, -0.1).is_err());
    }

    #[test]
    fn grid_examples() {
        let g = torus_grid(1, 1).unwrap();
        assert_eq!(g.points, vec![vec![0.0], vec![0.5]]);
        assert_eq!(torus_grid(2, 2).unwrap().len(), 16);
        assert_eq!(torus_grid(3, 2).unwrap().len(), 64);
        assert_eq!(torus_grid(2, 3).unwrap().point(0), &[0.0, 0.0]);
        assert!(matches!(torus_grid(5, 5), Err(Error::CapExceeded { .. })));
        assert!(torus_grid(0, 3).is_err());
        assert!(torus_grid_capped(2, 2, 15).is_err());
    }

    #[test]
    fn product_metric_examples() {
        let ws = ProductMetricSpec::weighted_sum(vec![0.5, 0.25]);
        assert_eq!(ws.distance(&[0.0, 0.0], &[0.5, 0.5]), 0.375);
        assert_eq!(ProductMetricSpec::sup().distance(&[0.3, 0.1], &[0.3, 0.1]), 0.0);
        let bk = ProductMetricSpec::bendikov(vec![1.0, 1.0]);
        assert_eq!(bk.distance(&[0.0, 0.0], &[0.5, 0.0]), 0.5);
        // Default weights are dyadic.
        assert_eq!(ProductMetricSpec::dyadic(MetricKind::WeightedSum).weight(2), 0.125);
    }

    #[test]
    fn product_metric_checks_inputs() {
        let g = torus_grid(3, 1).unwrap();
        let short = ProductMetricSpec::weighted_sum(vec![0.5, 0.25]);
        assert!(matches!(product_metric(&g, &short), Err(Error::DimensionMismatch { .. })));
        let bad = ProductMetricSpec::bendikov(vec![1.0, 0.0, 1.0]);
        assert!(product_metric(&g, &bad).is_err());
        let reals = PointCloud::new(Ambient::Real, vec![vec![0.0], vec![1.0]]).unwrap();
        assert!(product_metric(&reals, &ProductMetricSpec::sup()).is_err());
    }

    #[test]
    fn product_metrics_are_metrics() {
        let g = torus_grid(2, 2).unwrap();
        for kind in [MetricKind::WeightedSum, MetricKind::Sup, MetricKind::Bendikov] {
            let m = product_metric(&g, &ProductMetricSpec::dyadic(kind)).unwrap();
            assert!(quasi_constant(&m) <= 1.0 + 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn subgroup_minimum_examples() {
        for n in 1..=3 {
            for j in 1..=3 {
                let r = subgroup_min_distance(n, j, &ProductMetricSpec::sup()).unwrap();
                assert_eq!(r, 0.5_f64.powi(j as i32));
            }
        }
        let ws = ProductMetricSpec::weighted_sum(vec![0.5, 0.25]);
        assert_eq!(subgroup_min_distance(2, 1, &ws).unwrap(), 0.125);
    }

    #[test]
    fn cantor_examples() {
        let s = cantor_space(1).unwrap();
        assert_eq!(s.metric().get(0, 1), 2.0 / 3.0);
        assert_eq!(s.weights(), &[0.5, 0.5]);
        let (nums, den) = cantor_numerators(2).unwrap();
        assert_eq!(nums, vec![0, 2, 6, 8]);
        assert_eq!(den, 9);
        let s = cantor_space(6).unwrap();
        assert_eq!(s.total_mass(), 1.0);
        assert!(cantor_space(0).is_err());
        assert!(matches!(cantor_space(13), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn log_line_examples() {
        let m = log_line(&[0.0, std::f64::consts::E - 1.0, 3.0]).unwrap();
        assert!((m.get(0, 1) - 1.0).abs() < 1e-15);
        assert!(validate_quasimetric(&m.to_rows()).unwrap().is_metric);
        assert!(matches!(log_line(&[1.0, 2.0, 1.0]), Err(Error::DuplicatePoint { first: 0, second: 2, .. })));
    }

    #[test]
    fn evenly_spaced_hits_endpoints() {
        let xs = evenly_spaced(-2.0, 2.0, 5).unwrap();
        assert_eq!(xs, vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(evenly_spaced(1.0, 1.0, 3).is_err());
    }
}
