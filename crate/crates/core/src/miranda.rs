//! Separated witness sets inside torus cubes via a Poincaré–Miranda solver.
//!
//! The cube `E_n = [0, 1/2]^n` (tail coordinates 0) is sampled on a grid.
//! For each axis `i`, `f_i(x)` is the distance from `x` to the sampled lower
//! face `{x_i = 0}`. Every `f_i` vanishes on its lower face and is at least
//! the face gap `C` on the upper face `{x_i = 1/2}`, so for any target
//! vector `v ∈ (0, C]^n` the Miranda boundary conditions hold and some
//! `x_v` has `f(x_v) = v`. Targets on the grid `{k C / 2^j}^n` give `2^{nj}`
//! witnesses; since each `f_i` is 1-Lipschitz, witnesses whose targets
//! differ by one grid step are at distance at least `C / 2^j`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{quasi_constant, DistanceMatrix};
use crate::spaces::ProductMetricSpec;
use crate::tolerance::{approx_ge, approx_le, REL_TOL};

pub type MetricFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A metric on truncated torus coordinates: a built-in product metric or
/// an arbitrary callback (which need not be translation invariant).
#[derive(Clone)]
pub enum TorusMetric {
    Product(ProductMetricSpec),
    Custom { name: String, distance: MetricFn },
}

impl TorusMetric {
    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        TorusMetric::Custom { name: name.into(), distance: Arc::new(f) }
    }

    #[inline]
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            TorusMetric::Product(spec) => spec.distance(x, y),
            TorusMetric::Custom { distance, .. } => distance(x, y),
        }
    }

    pub fn name(&self) -> String {
        match self {
            TorusMetric::Product(spec) => spec.kind.name().to_string(),
            TorusMetric::Custom { name, .. } => name.clone(),
        }
    }
}

impl fmt::Debug for TorusMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorusMetric::Product(spec) => f.debug_tuple("Product").field(spec).finish(),
            TorusMetric::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

impl From<ProductMetricSpec> for TorusMetric {
    fn from(spec: ProductMetricSpec) -> Self {
        TorusMetric::Product(spec)
    }
}

/// Default cap on cube sample size.
pub const CUBE_CAP: usize = 1 << 20;

/// Grid sample of the cube `[0, 1/2]^n` with `resolution` cells per axis.
#[derive(Debug, Clone)]
pub struct CubeSample {
    n: usize,
    resolution: usize,
    points: Vec<Vec<f64>>,
    metric: TorusMetric,
    lower_faces: Vec<Vec<usize>>,
    upper_faces: Vec<Vec<usize>>,
}

impl CubeSample {
    pub fn new(n: usize, resolution: usize, metric: TorusMetric) -> Result<Self> {
        if n == 0 || resolution == 0 {
            return Err(Error::InvalidParameter {
                name: "n and resolution",
                expected: ">= 1",
                value: n.min(resolution) as f64,
            });
        }
        if let TorusMetric::Product(spec) = &metric {
            spec.check(n)?;
        }
        let side = resolution + 1;
        let size = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(side)).filter(|&s| s <= CUBE_CAP).ok_or(
            Error::CapExceeded {
                what: "cube sample",
                size: side.saturating_pow(n as u32),
                cap: CUBE_CAP,
                hint: "lower the resolution",
            },
        )?;
        let coord = |k: usize| k as f64 / (2 * resolution) as f64;
        let mut points = Vec::with_capacity(size);
        let mut lower_faces = vec![Vec::new(); n];
        let mut upper_faces = vec![Vec::new(); n];
        for idx in 0..size {
            let mut rest = idx;
            let mut p = vec![0.0; n];
            for axis in (0..n).rev() {
                let k = rest % side;
                rest /= side;
                p[axis] = coord(k);
                if k == 0 {
                    lower_faces[axis].push(idx);
                } else if k == resolution {
                    upper_faces[axis].push(idx);
                }
            }
            points.push(p);
        }
        Ok(Self { n, resolution, points, metric, lower_faces, upper_faces })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn metric(&self) -> &TorusMetric {
        &self.metric
    }

    pub fn lower_face(&self, axis: usize) -> &[usize] {
        &self.lower_faces[axis]
    }

    pub fn upper_face(&self, axis: usize) -> &[usize] {
        &self.upper_faces[axis]
    }

    /// Grid spacing in torus coordinates.
    pub fn step(&self) -> f64 {
        0.5 / self.resolution as f64
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.n {
            return Err(Error::IndexOutOfRange { index: axis, len: self.n });
        }
        if self.lower_faces[axis].is_empty() {
            return Err(Error::EmptyFace { axis, side: "lower" });
        }
        if self.upper_faces[axis].is_empty() {
            return Err(Error::EmptyFace { axis, side: "upper" });
        }
        Ok(())
    }

    #[inline]
    fn face_distance_unchecked(&self, axis: usize, x: &[f64]) -> f64 {
        self.lower_faces[axis].iter().map(|&y| self.metric.distance(x, &self.points[y])).fold(f64::INFINITY, f64::min)
    }

    /// All face distances at `x`.
    pub fn face_vector(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.face_distance_unchecked(i, x)).collect()
    }

    /// Largest distance from a sample point to the point half a cell away
    /// along the diagonal; an estimate of how far the sampled face
    /// distances can sit above the continuum ones.
    pub fn discretization_error(&self) -> f64 {
        let half = 0.5 * self.step();
        self.points
            .par_iter()
            .map(|x| {
                let shifted: Vec<f64> = x.iter().map(|&c| if c + half <= 0.5 { c + half } else { c - half }).collect();
                self.metric.distance(x, &shifted)
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Distance from `x` to the sampled lower face `{x_axis = 0}`.
pub fn face_distance(c: &CubeSample, axis: usize, x: &[f64]) -> Result<f64> {
    c.check_axis(axis)?;
    if x.len() != c.n {
        return Err(Error::DimensionMismatch { expected: c.n, got: x.len() });
    }
    Ok(c.face_distance_unchecked(axis, x))
}

/// Smallest distance between sampled opposite faces over all axes.
pub fn face_gap(c: &CubeSample) -> Result<f64> {
    let mut gap = f64::INFINITY;
    for axis in 0..c.n {
        c.check_axis(axis)?;
        let axis_gap = c.upper_faces[axis]
            .par_iter()
            .map(|&y| c.face_distance_unchecked(axis, &c.points[y]))
            .reduce(|| f64::INFINITY, f64::min);
        gap = gap.min(axis_gap);
    }
    if !(gap > 0.0) {
        return Err(Error::DegenerateGap { gap });
    }
    Ok(gap)
}

/// Checks `|f_i(x) - f_i(x')| <= d(x, x')` over all sampled pairs.
pub fn lipschitz_check(c: &CubeSample, axis: usize) -> Result<bool> {
    c.check_axis(axis)?;
    let values: Vec<f64> = c.points.par_iter().map(|x| c.face_distance_unchecked(axis, x)).collect();
    Ok((0..c.points.len()).into_par_iter().all(|a| {
        ((a + 1)..c.points.len()).all(|b| {
            let d = c.metric.distance(&c.points[a], &c.points[b]);
            approx_le((values[a] - values[b]).abs(), d)
        })
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MirandaOptions {
    /// Samples per axis on each face of the unit cube for the boundary check.
    pub boundary_samples: usize,
    /// Samples per axis on a bisecting plane.
    pub plane_samples: usize,
    pub max_bisections: usize,
    pub max_polish_steps: usize,
}

impl Default for MirandaOptions {
    fn default() -> Self {
        Self { boundary_samples: 17, plane_samples: 9, max_bisections: 400, max_polish_steps: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MirandaSolution {
    pub point: Vec<f64>,
    pub values: Vec<f64>,
    pub residual: f64,
    pub bisections: usize,
    pub polish_steps: usize,
}

fn residual(values: &[f64], target: &[f64]) -> f64 {
    values.iter().zip(target).map(|(v, a)| (v - a).abs()).fold(0.0, f64::max)
}

fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let count = count.max(2);
    (0..count).map(move |k| if k + 1 == count { hi } else { lo + (hi - lo) * k as f64 / (count - 1) as f64 })
}

/// Calls `visit` on a grid over the face of `[lo, hi]` where coordinate
/// `axis` is fixed to `value`. Stops early when `visit` returns false.
fn for_face_samples<F>(lo: &[f64], hi: &[f64], axis: usize, value: f64, samples: usize, mut visit: F) -> bool
where
    F: FnMut(&[f64]) -> bool,
{
    let n = lo.len();
    let axes: Vec<Vec<f64>> =
        (0..n).map(|k| if k == axis { vec![value] } else { linspace(lo[k], hi[k], samples).collect() }).collect();
    let mut idx = vec![0usize; n];
    let mut p: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    loop {
        if !visit(&p) {
            return false;
        }
        let mut k = n;
        loop {
            if k == 0 {
                return true;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                p[k] = axes[k][idx[k]];
                break;
            }
            idx[k] = 0;
            p[k] = axes[k][0];
        }
    }
}

/// Finds `x ∈ [0, 1]^n` with `max_i |f_i(x) - target_i| <= tol`, given
/// `f_i <= target_i` on `{x_i = 0}` and `f_i >= target_i` on `{x_i = 1}`
/// (checked on a sampled boundary grid).
///
/// The box is bisected along its widest axis, keeping the lower half when
/// its new face satisfies the condition at the sampled plane points and
/// the upper half otherwise; if neither half of any axis qualifies the
/// search moves on to a compass pattern search around the best point seen.
pub fn miranda_solve<F>(f: F, target: &[f64], tol: f64, opts: &MirandaOptions) -> Result<MirandaSolution>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = target.len();
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", expected: "positive", value: tol });
    }
    let unit_lo = vec![0.0; n];
    let unit_hi = vec![1.0; n];
    for axis in 0..n {
        for (side, value) in [("lower", 0.0), ("upper", 1.0)] {
            let mut bad = None;
            for_face_samples(&unit_lo, &unit_hi, axis, value, opts.boundary_samples, |p| {
                let fv = f(p)[axis];
                let ok = if value == 0.0 { fv <= target[axis] } else { fv >= target[axis] };
                if !ok {
                    bad = Some(fv);
                }
                ok
            });
            if let Some(fv) = bad {
                return Err(Error::BoundaryCondition { axis, side, value: fv, target: target[axis] });
            }
        }
    }

    let mut lo = unit_lo;
    let mut hi = unit_hi;
    let center = |lo: &[f64], hi: &[f64]| -> Vec<f64> { lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect() };
    let mut best_point = center(&lo, &hi);
    let mut best_values = f(&best_point);
    let mut best = residual(&best_values, target);
    let mut bisections = 0;
    while best > tol && bisections < opts.max_bisections {
        let mut axes: Vec<usize> = (0..n).collect();
        axes.sort_by(|&a, &b| (hi[b] - lo[b]).total_cmp(&(hi[a] - lo[a])).then(a.cmp(&b)));
        if hi[axes[0]] - lo[axes[0]] < f64::EPSILON {
            break;
        }
        let mut moved = false;
        for &k in &axes {
            let mid = 0.5 * (lo[k] + hi[k]);
            let (mut all_ge, mut all_le) = (true, true);
            for_face_samples(&lo, &hi, k, mid, opts.plane_samples, |p| {
                let fv = f(p)[k];
                all_ge &= fv >= target[k];
                all_le &= fv <= target[k];
                all_ge || all_le
            });
            if all_ge {
                hi[k] = mid;
            } else if all_le {
                lo[k] = mid;
            } else {
                continue;
            }
            moved = true;
            break;
        }
        if !moved {
            break;
        }
        bisections += 1;
        let c = center(&lo, &hi);
        let values = f(&c);
        let r = residual(&values, target);
        if r < best {
            best = r;
            best_point = c;
            best_values = values;
        }
    }

    let mut polish_steps = 0;
    if best > tol {
        let width = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
        let mut step = width.max(1e-3);
        while best > tol && step > 1e-15 && polish_steps < opts.max_polish_steps {
            let mut improved = false;
            'directions: for k in 0..n {
                for sign in [-1.0, 1.0] {
                    let mut trial = best_point.clone();
                    trial[k] = (trial[k] + sign * step).clamp(0.0, 1.0);
                    polish_steps += 1;
                    let values = f(&trial);
                    let r = residual(&values, target);
                    if r < best {
                        best = r;
                        best_point = trial;
                        best_values = values;
                        improved = true;
                        break 'directions;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
    }
    if best > tol {
        return Err(Error::NoConvergence { tol, residual: best });
    }
    Ok(MirandaSolution { point: best_point, values: best_values, residual: best, bisections, polish_steps })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Target vector `v`.
    pub target: Vec<f64>,
    /// Witness `x_v` in torus coordinates (inside `[0, 1/2]^n`).
    pub point: Vec<f64>,
    /// `f(x_v)`.
    pub values: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSet {
    pub n: usize,
    pub j: usize,
    pub metric: String,
    pub resolution: usize,
    pub tol: f64,
    /// Face gap `C` of the sampled cube.
    pub gap: f64,
    /// Target grid step `C / 2^j`.
    pub step: f64,
    pub discretization_error: f64,
    pub witnesses: Vec<Witness>,
    pub min_pairwise: f64,
    /// `step - 2 tol`, the separation every pair must reach.
    pub required_separation: f64,
    pub pass: bool,
    /// Whether every pair obeys the separation mechanism: along an axis
    /// where targets differ by `k` steps, face values differ by at least
    /// `k step - 2 tol` and by at most the distance of the witnesses.
    pub mechanism_holds: bool,
}

impl WitnessSet {
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.witnesses.iter().map(|w| w.point.clone()).collect()
    }

    /// Distance matrix of the witnesses under `metric`.
    pub fn distance_matrix(&self, metric: &TorusMetric) -> Result<DistanceMatrix> {
        let pts = self.points();
        DistanceMatrix::from_fn(pts.len(), |a, b| metric.distance(&pts[a], &pts[b]))
    }
}

/// Default cap on the number of witnesses.
pub const WITNESS_CAP: usize = 1 << 12;

const COARSE_POINTS: usize = 128;

/// Builds the `2^{nj}` witnesses `x_v` for the target grid
/// `{C/2^j, 2C/2^j, …, C}^n` and certifies their separation.
pub fn theorem3_witness(n: usize, j: usize, metric: TorusMetric, resolution: usize, tol: f64) -> Result<WitnessSet> {
    let bits = n.checked_mul(j).filter(|&b| b < 31).ok_or(Error::CapExceeded {
        what: "witness set",
        size: usize::MAX,
        cap: WITNESS_CAP,
        hint: "lower n or j",
    })?;
    let count = 1usize << bits;
    if count > WITNESS_CAP {
        return Err(Error::CapExceeded { what: "witness set", size: count, cap: WITNESS_CAP, hint: "lower n or j" });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", expected: "positive", value: tol });
    }
    let cube = CubeSample::new(n, resolution, metric)?;
    // The triangle inequality is spot-checked on a coarse subgrid.
    let coarse = CubeSample::new(n, resolution.min(4), cube.metric.clone())?;
    let stride = coarse.points.len().div_ceil(COARSE_POINTS);
    let probe: Vec<&Vec<f64>> = coarse.points.iter().step_by(stride).collect();
    let coarse_matrix = DistanceMatrix::from_fn(probe.len(), |a, b| coarse.metric.distance(probe[a], probe[b]))?;
    let k = quasi_constant(&coarse_matrix);
    if k > 1.0 + REL_TOL {
        return Err(Error::InvalidParameter { name: "metric quasi-triangle constant", expected: "1", value: k });
    }
    let gap = face_gap(&cube)?;
    let levels = 1usize << j;
    let step = gap / levels as f64;
    let opts = MirandaOptions { boundary_samples: resolution + 1, ..MirandaOptions::default() };

    let targets: Vec<Vec<f64>> = (0..count)
        .map(|mut idx| {
            let mut v = vec![0.0; n];
            for slot in v.iter_mut().rev() {
                *slot = (idx % levels + 1) as f64 * step;
                idx /= levels;
            }
            v
        })
        .collect();
    let witnesses = targets
        .par_iter()
        .map(|v| {
            let f = |u: &[f64]| {
                let x: Vec<f64> = u.iter().map(|c| 0.5 * c).collect();
                cube.face_vector(&x)
            };
            miranda_solve(f, v, tol, &opts)
                .map(|sol| Witness {
                    target: v.clone(),
                    point: sol.point.iter().map(|c| 0.5 * c).collect(),
                    values: sol.values,
                    residual: sol.residual,
                })
                .map_err(|e| Error::WitnessFailed { target: v.clone(), source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut min_pairwise = f64::INFINITY;
    let mut mechanism_holds = true;
    for a in 0..witnesses.len() {
        for b in (a + 1)..witnesses.len() {
            let (wa, wb) = (&witnesses[a], &witnesses[b]);
            let d = cube.metric.distance(&wa.point, &wb.point);
            min_pairwise = min_pairwise.min(d);
            for i in 0..n {
                let (low, high) = if wa.target[i] < wb.target[i] { (wa, wb) } else { (wb, wa) };
                let steps = ((high.target[i] - low.target[i]) / step).round();
                if steps == 0.0 {
                    continue;
                }
                let rise = high.values[i] - low.values[i];
                mechanism_holds &= approx_ge(rise, steps * step - 2.0 * tol) && approx_le(rise, d);
            }
        }
    }
    let required_separation = step - 2.0 * tol;
    Ok(WitnessSet {
        n,
        j,
        metric: cube.metric.name(),
        resolution,
        tol,
        gap,
        step,
        discretization_error: cube.discretization_error(),
        pass: min_pairwise >= required_separation,
        witnesses,
        min_pairwise,
        required_separation,
        mechanism_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::MetricKind;

    fn sup() -> TorusMetric {
        ProductMetricSpec::sup().into()
    }

    #[test]
    fn cube_faces() {
        let c = CubeSample::new(2, 4, sup()).unwrap();
        assert_eq!(c.points().len(), 25);
        assert_eq!(c.lower_face(0).len(), 5);
        assert_eq!(c.upper_face(1).len(), 5);
        for &i in c.upper_face(0) {
            assert_eq!(c.points()[i][0], 0.5);
        }
        assert!(CubeSample::new(0, 4, sup()).is_err());
        assert!(CubeSample::new(2, 0, sup()).is_err());
    }

    #[test]
    fn face_distance_examples() {
        let c = CubeSample::new(2, 8, sup()).unwrap();
        for &i in c.lower_face(1) {
            assert_eq!(face_distance(&c, 1, &c.points()[i]).unwrap(), 0.0);
        }
        let gap = face_gap(&c).unwrap();
        for &i in c.upper_face(0) {
            assert!(face_distance(&c, 0, &c.points()[i]).unwrap() >= gap);
        }
        let line = CubeSample::new(1, 64, sup()).unwrap();
        assert!((face_distance(&line, 0, &[0.3]).unwrap() - 0.3).abs() < 1e-15);
        assert!(face_distance(&c, 2, &[0.0, 0.0]).is_err());
        assert!(face_distance(&c, 0, &[0.0]).is_err());
    }

    #[test]
    fn gap_examples() {
        for n in 1..=3 {
            assert_eq!(face_gap(&CubeSample::new(n, 4, sup()).unwrap()).unwrap(), 0.5);
        }
        let ws = CubeSample::new(2, 8, ProductMetricSpec::dyadic(MetricKind::WeightedSum).into()).unwrap();
        assert_eq!(face_gap(&ws).unwrap(), 0.125);
        let doubled = TorusMetric::custom("2 sup", |x, y| 2.0 * ProductMetricSpec::sup().distance(x, y));
        let c = CubeSample::new(2, 8, doubled).unwrap();
        assert_eq!(face_gap(&c).unwrap(), 1.0);
        let zero = TorusMetric::custom("zero", |_, _| 0.0);
        assert!(matches!(face_gap(&CubeSample::new(1, 2, zero).unwrap()), Err(Error::DegenerateGap { .. })));
    }

    #[test]
    fn lipschitz_on_metrics() {
        let c = CubeSample::new(2, 6, sup()).unwrap();
        assert!(lipschitz_check(&c, 0).unwrap());
        let c = CubeSample::new(2, 6, ProductMetricSpec::dyadic(MetricKind::Bendikov).into()).unwrap();
        assert!(lipschitz_check(&c, 1).unwrap());
        // The square of a metric is not a metric; its face distance is not
        // 1-Lipschitz for it.
        let sq = TorusMetric::custom("sup squared", |x, y| {
            let d = ProductMetricSpec::sup().distance(x, y);
            d * d
        });
        let c = CubeSample::new(1, 8, sq).unwrap();
        assert!(!lipschitz_check(&c, 0).unwrap());
    }

    #[test]
    fn solve_identity() {
        let opts = MirandaOptions::default();
        let s = miranda_solve(|x| x.to_vec(), &[0.5], 1e-9, &opts).unwrap();
        assert!((s.point[0] - 0.5).abs() <= 1e-9);
        let s = miranda_solve(|x| x.to_vec(), &[0.3, 0.7], 1e-6, &opts).unwrap();
        assert!((s.point[0] - 0.3).abs() <= 1e-6 && (s.point[1] - 0.7).abs() <= 1e-6);
    }

    #[test]
    fn solve_sheared_linear_map() {
        let f = |x: &[f64]| vec![x[0] + 0.2 * x[1], x[1]];
        let s = miranda_solve(f, &[0.5, 0.5], 1e-8, &MirandaOptions::default()).unwrap();
        assert!(s.residual <= 1e-8);
        assert!((s.point[0] - 0.4).abs() < 1e-7);
        assert!((s.point[1] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn boundary_violation_is_rejected() {
        let err = miranda_solve(|x| vec![1.0 - x[0]], &[0.5], 1e-6, &MirandaOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BoundaryCondition { axis: 0, side: "lower", .. }));
    }

    #[test]
    fn unreachable_tolerance_reports_residual() {
        // A step function satisfies the sampled boundary checks but never
        // takes the target value.
        let f = |x: &[f64]| vec![if x[0] < 0.5 { 0.0 } else { 1.0 }];
        let err = miranda_solve(f, &[0.5], 1e-6, &MirandaOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { residual, .. } if (residual - 0.5).abs() < 1e-12));
    }

    #[test]
    fn one_dimensional_witnesses() {
        let w = theorem3_witness(1, 1, sup(), 64, 1e-3).unwrap();
        assert_eq!(w.gap, 0.5);
        assert_eq!(w.witnesses.len(), 2);
        assert_eq!(w.witnesses[0].target, vec![0.25]);
        assert_eq!(w.witnesses[1].target, vec![0.5]);
        assert!(w.min_pairwise >= 0.25 - 2e-3);
        assert!(w.pass && w.mechanism_holds);
    }

    #[test]
    fn square_witnesses() {
        let w = theorem3_witness(2, 2, sup(), 64, 1e-3).unwrap();
        assert_eq!(w.witnesses.len(), 16);
        assert!(w.witnesses.iter().all(|x| x.residual <= 1e-3));
        assert!(w.min_pairwise >= 0.125 - 2e-3);
        assert!(w.pass && w.mechanism_holds);
    }

    #[test]
    fn rejects_non_metrics() {
        let sq = TorusMetric::custom("sup squared", |x, y| {
            let d = ProductMetricSpec::sup().distance(x, y);
            d * d
        });
        assert!(theorem3_witness(1, 1, sq, 16, 1e-3).is_err());
    }
}
