//! Finite quasimetric samples: storage, axiom checks, the quasi-triangle
//! constant, equivalence constants, power transforms and balls.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerance::REL_TOL;

/// Anything that can report pairwise distances over `0..len()`.
///
/// Large samples (torus grids with tens of thousands of points) implement
/// this lazily instead of materializing a [`DistanceMatrix`].
pub trait FiniteMetric: Sync {
    fn len(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<M: FiniteMetric + ?Sized> FiniteMetric for &M {
    fn len(&self) -> usize {
        (**self).len()
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        (**self).dist(i, j)
    }
}

/// Symmetric matrix of distances over an indexed finite point set.
///
/// Construction enforces the quasimetric axioms that do not involve the
/// triangle constant: zero diagonal, strictly positive off-diagonal entries,
/// exact symmetry and finiteness.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl DistanceMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = check_structure(&rows)?;
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            data.extend(row);
        }
        let m = Self { n, data, labels: None };
        m.check_axioms()?;
        Ok(m)
    }

    /// Builds the matrix from a distance function evaluated on `i < j`.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        if n == 0 {
            return Err(Error::Empty);
        }
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => f(i, j),
                        std::cmp::Ordering::Equal => 0.0,
                        std::cmp::Ordering::Greater => f(j, i),
                    })
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::SizeMismatch { left: self.n, right: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of point `i`, falling back to its index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Largest entry.
    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Entrywise image under `f`, keeping labels. `f(0)` must be 0.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        let data: Vec<f64> = self.data.iter().map(|&d| f(d)).collect();
        let m = Self { n: self.n, data, labels: self.labels.clone() };
        for i in 0..m.n {
            for j in 0..m.n {
                let v = m.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::BadEntry { i, j, value: v });
                }
            }
        }
        m.check_axioms()?;
        Ok(m)
    }

    /// Restriction to the given indices, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= self.n {
                return Err(Error::IndexOutOfRange { index: i, len: self.n });
            }
        }
        let rows = indices.iter().map(|&i| indices.iter().map(|&j| self.get(i, j)).collect()).collect();
        let mut m = Self::new(rows)?;
        if let Some(labels) = &self.labels {
            m.labels = Some(indices.iter().map(|&i| labels[i].clone()).collect());
        }
        Ok(m)
    }

    fn check_axioms(&self) -> Result<()> {
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return Err(Error::InvalidMatrix(format!("diagonal entry {i} is nonzero")));
            }
            for j in (i + 1)..self.n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if a != b {
                    return Err(Error::InvalidMatrix(format!("entries ({i}, {j}) and ({j}, {i}) differ: {a} vs {b}")));
                }
                if a <= 0.0 {
                    return Err(Error::InvalidMatrix(format!("distinct points {i} and {j} are at distance 0")));
                }
            }
        }
        Ok(())
    }
}

impl FiniteMetric for DistanceMatrix {
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// Square, nonempty, finite, nonnegative. Returns the side length.
fn check_structure<R: AsRef<[f64]>>(rows: &[R]) -> Result<usize> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != n {
            return Err(Error::NotSquare { row: i, len: row.len(), expected: n });
        }
        for (j, &value) in row.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::BadEntry { i, j, value });
            }
        }
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub n: usize,
    pub symmetric: bool,
    pub positive_off_diagonal: bool,
    pub zero_diagonal: bool,
    /// Least admissible quasi-triangle constant on the sample. Infinite when
    /// two distinct points sit at distance zero from a third pair's chain.
    pub quasi_constant: f64,
    pub is_metric: bool,
}

/// Checks every quasimetric axiom on a raw square array.
///
/// Structural defects (non-square, NaN, negative entries) are errors; axiom
/// failures are reported through the flags.
pub fn validate_quasimetric<R: AsRef<[f64]> + Sync>(rows: &[R]) -> Result<ValidationReport> {
    let n = check_structure(rows)?;
    let at = |i: usize, j: usize| rows[i].as_ref()[j];
    let mut symmetric = true;
    let mut positive_off_diagonal = true;
    let mut zero_diagonal = true;
    for i in 0..n {
        zero_diagonal &= at(i, i) == 0.0;
        for j in 0..n {
            if i != j {
                symmetric &= at(i, j) == at(j, i);
                positive_off_diagonal &= at(i, j) > 0.0;
            }
        }
    }
    let quasi_constant = triple_ratio_max(n, at);
    let is_metric = symmetric && positive_off_diagonal && zero_diagonal && quasi_constant <= 1.0 + REL_TOL;
    Ok(ValidationReport { n, symmetric, positive_off_diagonal, zero_diagonal, quasi_constant, is_metric })
}

/// Least `K` with `d(i,j) <= K (d(i,k) + d(k,j))` over all sampled triples.
///
/// Exact O(n³) enumeration; at least 1 by convention, so samples with fewer
/// than three points return 1.
pub fn quasi_constant<M: FiniteMetric + ?Sized>(m: &M) -> f64 {
    triple_ratio_max(m.len(), |i, j| m.dist(i, j))
}

fn triple_ratio_max<F>(n: usize, d: F) -> f64
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    // The ratio for (i, j, k) equals the ratio for (j, i, k) only when the
    // array is symmetric, so both orders are visited.
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 1.0_f64;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let direct = d(i, j);
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let via = d(i, k) + d(k, j);
                    let ratio = if via > 0.0 {
                        direct / via
                    } else if direct > 0.0 {
                        f64::INFINITY
                    } else {
                        continue;
                    };
                    if ratio > worst {
                        worst = ratio;
                    }
                }
            }
            worst
        })
        .reduce(|| 1.0, f64::max)
}

/// Entrywise power `d^alpha`, again a quasimetric for every `alpha > 0`.
pub fn power_transform(m: &DistanceMatrix, alpha: f64) -> Result<DistanceMatrix> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter { name: "alpha", expected: "a finite positive real", value: alpha });
    }
    if alpha == 1.0 {
        return Ok(m.clone());
    }
    m.map(|d| d.powf(alpha))
}

/// Least `M >= 1` with `m1 / M <= m2 <= M * m1` entrywise.
pub fn equivalence_constant<A, B>(m1: &A, m2: &B) -> Result<f64>
where
    A: FiniteMetric + ?Sized,
    B: FiniteMetric + ?Sized,
{
    let n = m1.len();
    if n != m2.len() {
        return Err(Error::SizeMismatch { left: n, right: m2.len() });
    }
    let mut worst = 1.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (m1.dist(i, j), m2.dist(i, j));
            if (a == 0.0) != (b == 0.0) {
                return Err(Error::InvalidMatrix(format!("pair ({i}, {j}) is at distance zero in only one matrix")));
            }
            if a > 0.0 {
                worst = worst.max(a / b).max(b / a);
            }
        }
    }
    Ok(worst)
}

/// Open ball `{ i : d(center, i) < radius }`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    pub members: Vec<usize>,
}

impl Ball {
    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && !r.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "radius", expected: "positive", value: r })
    }
}

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, len })
    }
}

pub fn ball<M: FiniteMetric + ?Sized>(m: &M, center: usize, radius: f64) -> Result<Ball> {
    check_radius(radius)?;
    check_index(center, m.len())?;
    let members = (0..m.len()).filter(|&i| m.dist(center, i) < radius).collect();
    Ok(Ball { center, radius, members })
}

/// Finite stand-in for "equivalent quasimetrics share a topology": checks
/// `B1(x, r/M) ⊆ B2(x, r) ⊆ B1(x, M r)` for every center on a radius grid
/// built from the critical values where some ball gains a member.
///
/// `M` is widened by the relative tolerance so that a constant computed by
/// [`equivalence_constant`] is not defeated by the last ulp of a ratio.
pub fn ball_nesting_check<A, B>(m1: &A, m2: &B, big_m: f64) -> Result<bool>
where
    A: FiniteMetric + ?Sized,
    B: FiniteMetric + ?Sized,
{
    let radii = nesting_radius_grid(m1, m2, big_m);
    ball_nesting_check_on(m1, m2, big_m, &radii)
}

pub fn ball_nesting_check_on<A, B>(m1: &A, m2: &B, big_m: f64, radii: &[f64]) -> Result<bool>
where
    A: FiniteMetric + ?Sized,
    B: FiniteMetric + ?Sized,
{
    let n = m1.len();
    if n != m2.len() {
        return Err(Error::SizeMismatch { left: n, right: m2.len() });
    }
    if !(big_m >= 1.0) {
        return Err(Error::InvalidParameter { name: "M", expected: ">= 1", value: big_m });
    }
    let widened = big_m * (1.0 + REL_TOL);
    for &r in radii {
        check_radius(r)?;
        for x in 0..n {
            for y in 0..n {
                let (d1, d2) = (m1.dist(x, y), m2.dist(x, y));
                if d1 < r / widened && d2 >= r {
                    return Ok(false);
                }
                if d2 < r && d1 >= widened * r {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Every distance of either sample, the scaled versions that bound the
/// inner and outer balls, midpoints between consecutive values and one
/// radius past the largest.
fn nesting_radius_grid<A, B>(m1: &A, m2: &B, big_m: f64) -> Vec<f64>
where
    A: FiniteMetric + ?Sized,
    B: FiniteMetric + ?Sized,
{
    let n = m1.len().min(m2.len());
    let mut critical = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (d1, d2) = (m1.dist(i, j), m2.dist(i, j));
            critical.extend([d1, d2, d1 * big_m, d1 / big_m]);
        }
    }
    critical.retain(|v| *v > 0.0 && v.is_finite());
    critical.sort_by(f64::total_cmp);
    critical.dedup();
    let mut grid = Vec::with_capacity(critical.len() * 2 + 1);
    for w in critical.windows(2) {
        grid.push(w[0]);
        grid.push(0.5 * (w[0] + w[1]));
    }
    match critical.last() {
        Some(&last) => {
            grid.push(last);
            grid.push(2.0 * last);
        }
        None => grid.push(1.0),
    }
    grid
}
