//! r-separated subsets: greedy maximal sets and exact maximum sets.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::clique::CliqueSearch;
use crate::error::{Error, Result};
use crate::metric::{check_radius, FiniteMetric};

/// Default cap on the sample size for the exact search.
pub const EXACT_CAP: usize = 64;

/// Points pairwise at distance `>= radius`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatedSet {
    pub radius: f64,
    pub members: Vec<usize>,
    /// True when `members` is a maximum r-separated subset of the sample.
    pub exact: bool,
}

impl SeparatedSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Pairwise check `d(i, j) >= r` over distinct members, no tolerance.
pub fn is_separated<M: FiniteMetric + ?Sized>(m: &M, members: &[usize], r: f64) -> bool {
    members.iter().enumerate().all(|(a, &i)| members[a + 1..].iter().all(|&j| i == j || m.dist(i, j) >= r))
}

/// Scans indices in increasing order and keeps every point at distance
/// `>= r` from all points kept so far.
///
/// The result is maximal, hence also an r-cover: every sample point lies
/// within `< r` of some member.
pub fn greedy_separated<M: FiniteMetric + ?Sized>(m: &M, r: f64) -> Result<SeparatedSet> {
    check_radius(r)?;
    let mut members: Vec<usize> = Vec::new();
    for i in 0..m.len() {
        if members.iter().all(|&c| m.dist(c, i) >= r) {
            members.push(i);
        }
    }
    debug_assert!(is_separated(m, &members, r));
    Ok(SeparatedSet { radius: r, members, exact: false })
}

/// A maximum r-separated subset, i.e. a maximum clique of the graph
/// joining points at distance `>= r`. Worst-case exponential, hence the cap.
pub fn max_separated_exact<M: FiniteMetric + ?Sized>(m: &M, r: f64) -> Result<SeparatedSet> {
    max_separated_exact_capped(m, r, EXACT_CAP)
}

pub fn max_separated_exact_capped<M: FiniteMetric + ?Sized>(m: &M, r: f64, cap: usize) -> Result<SeparatedSet> {
    check_radius(r)?;
    let n = m.len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "exact separated-set search",
            size: n,
            cap,
            hint: "use the greedy separated set as a lower bound",
        });
    }
    let seed = greedy_separated(m, r)?.members;
    let adj: Vec<FixedBitSet> = (0..n)
        .map(|i| {
            let mut row = FixedBitSet::with_capacity(n);
            for j in 0..n {
                if j != i && m.dist(i, j) >= r {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    let members = CliqueSearch::new(&adj, seed).run();
    if !is_separated(m, &members, r) {
        return Err(Error::InvalidMatrix("asymmetric distances defeat the separated-set search".into()));
    }
    Ok(SeparatedSet { radius: r, members, exact: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::DistanceMatrix;
    use crate::spaces::{product_metric, torus_grid, ProductMetricSpec};

    fn line(points: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_fn(points.len(), |i, j| (points[i] - points[j]).abs()).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let single = DistanceMatrix::new(vec![vec![0.0]]).unwrap();
        assert_eq!(greedy_separated(&single, 3.0).unwrap().members, vec![0]);
        let m = line(&[0.0, 0.5, 1.0]);
        let s = greedy_separated(&m, 0.6).unwrap();
        assert_eq!(s.members, vec![0, 2]);
        assert!(!s.exact);
        assert!(greedy_separated(&m, 0.0).is_err());
    }

    #[test]
    fn greedy_keeps_whole_toric_grid() {
        for j in 1..=5 {
            let g = torus_grid(1, j).unwrap();
            let m = product_metric(&g, &ProductMetricSpec::sup()).unwrap();
            let s = greedy_separated(&m, 0.5_f64.powi(j as i32)).unwrap();
            assert_eq!(s.len(), 1 << j);
        }
    }

    #[test]
    fn exact_examples() {
        let m = line(&[0.0, 0.5, 1.0]);
        assert_eq!(max_separated_exact(&m, 0.6).unwrap().len(), 2);
        assert_eq!(max_separated_exact(&m, 0.5).unwrap().len(), 3);
        let g = torus_grid(2, 2).unwrap();
        let m = product_metric(&g, &ProductMetricSpec::sup()).unwrap();
        let s = max_separated_exact(&m, 0.25).unwrap();
        assert_eq!(s.len(), 16);
        assert!(s.exact);
    }

    #[test]
    fn exact_beats_greedy() {
        // Index order makes greedy start at the middle point.
        let m = line(&[1.0, 0.0, 2.0]);
        let g = greedy_separated(&m, 1.5).unwrap();
        let e = max_separated_exact(&m, 1.5).unwrap();
        assert_eq!(g.members, vec![0]);
        assert_eq!(e.members, vec![1, 2]);
    }

    #[test]
    fn cap_is_enforced() {
        let pts: Vec<f64> = (0..10).map(f64::from).collect();
        let m = line(&pts);
        assert!(matches!(max_separated_exact_capped(&m, 1.0, 9), Err(Error::CapExceeded { .. })));
    }
}
