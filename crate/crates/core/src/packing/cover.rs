//! Covering by open balls centered at sample points.
//!
//! Small target sets (at most 64 points) are covered exactly by branch and
//! bound over `u64` masks. Larger ones get the greedy max-coverage cover,
//! an upper bound, paired with a lower bound: targets no single ball can
//! hold in pairs need one ball each.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{check_index, check_radius, FiniteMetric};

/// Exact cover is attempted only up to this many targets (mask width).
pub const MAX_EXACT_TARGETS: usize = 64;

/// Default cap on the sample size for cover computations; ball bitsets
/// take `n²` bits.
pub const COVER_CAP: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverOptions {
    /// Target sets up to this size are covered exactly (at most 64).
    pub exact_cap: usize,
    /// Branch-and-bound node budget before falling back to the best cover
    /// found so far.
    pub node_budget: u64,
    pub sample_cap: usize,
}

impl Default for CoverOptions {
    fn default() -> Self {
        Self { exact_cap: MAX_EXACT_TARGETS, node_budget: 2_000_000, sample_cap: COVER_CAP }
    }
}

/// Result of covering a set of points by radius-`r` balls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverCount {
    pub radius: f64,
    /// Size of the cover found; an upper bound on the minimum.
    pub count: usize,
    /// A lower bound on the minimum; equals `count` when `exact`.
    pub lower_bound: usize,
    pub exact: bool,
    pub centers: Vec<usize>,
}

/// Open balls of one radius around every sample point, as bitsets.
pub(crate) struct BallIndex {
    balls: Vec<FixedBitSet>,
}

impl BallIndex {
    pub(crate) fn new<M: FiniteMetric + ?Sized>(m: &M, r: f64) -> Self {
        let n = m.len();
        let balls = (0..n)
            .into_par_iter()
            .map(|c| {
                let mut b = FixedBitSet::with_capacity(n);
                for i in 0..n {
                    if m.dist(c, i) < r {
                        b.insert(i);
                    }
                }
                b
            })
            .collect();
        Self { balls }
    }

    pub(crate) fn ball(&self, c: usize) -> &FixedBitSet {
        &self.balls[c]
    }
}

fn check_sample(n: usize, opts: &CoverOptions) -> Result<()> {
    if n > opts.sample_cap {
        return Err(Error::CapExceeded {
            what: "cover sample",
            size: n,
            cap: opts.sample_cap,
            hint: "subsample the space or raise the cap",
        });
    }
    Ok(())
}

/// Minimal number of radius-`r` balls with sample centers covering the
/// whole sample (exact for small samples, bracketed otherwise).
pub fn covering_number<M: FiniteMetric + ?Sized>(m: &M, r: f64) -> Result<CoverCount> {
    covering_number_with(m, r, &CoverOptions::default())
}

pub fn covering_number_with<M: FiniteMetric + ?Sized>(m: &M, r: f64, opts: &CoverOptions) -> Result<CoverCount> {
    let targets: Vec<usize> = (0..m.len()).collect();
    cover_subset(m, &targets, r, opts)
}

/// Covers `targets` by radius-`r` balls centered anywhere in the sample.
pub fn cover_subset<M: FiniteMetric + ?Sized>(
    m: &M,
    targets: &[usize],
    r: f64,
    opts: &CoverOptions,
) -> Result<CoverCount> {
    check_radius(r)?;
    check_sample(m.len(), opts)?;
    targets.iter().try_for_each(|&t| check_index(t, m.len()))?;
    let index = BallIndex::new(m, r);
    let mut found = cover_with_index(&index, m.len(), targets, opts);
    if !found.exact {
        found.lower_bound = conflict_lower_bound(&index, targets);
    }
    found.radius = r;
    Ok(found)
}

/// Cover without the lower-bound pass; `lower_bound` is 1 (or 0 for an
/// empty target set) unless the cover is exact.
pub(crate) fn cover_with_index(index: &BallIndex, n: usize, targets: &[usize], opts: &CoverOptions) -> CoverCount {
    let mut targets = targets.to_vec();
    targets.sort_unstable();
    targets.dedup();
    if targets.is_empty() {
        return CoverCount { radius: 0.0, count: 0, lower_bound: 0, exact: true, centers: vec![] };
    }
    if targets.len() <= opts.exact_cap.min(MAX_EXACT_TARGETS) {
        let (centers, exact) = small_cover(index, n, &targets, opts.node_budget);
        let count = centers.len();
        CoverCount { radius: 0.0, count, lower_bound: if exact { count } else { 1 }, exact, centers }
    } else {
        let centers = lazy_greedy(index, n, &targets);
        CoverCount { radius: 0.0, count: centers.len(), lower_bound: 1, exact: false, centers }
    }
}

/// Greedy max-coverage with lazy gain updates. Ties go to the lowest
/// center index, the same choice the eager greedy would make.
fn lazy_greedy(index: &BallIndex, n: usize, targets: &[usize]) -> Vec<usize> {
    let mut uncovered = FixedBitSet::with_capacity(n);
    targets.iter().for_each(|&t| uncovered.insert(t));
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        (0..n).map(|c| (index.ball(c).intersection_count(&uncovered), Reverse(c))).filter(|&(g, _)| g > 0).collect();
    let mut centers = Vec::new();
    while !uncovered.is_clear() {
        let Some((stale, Reverse(c))) = heap.pop() else { break };
        let gain = index.ball(c).intersection_count(&uncovered);
        if gain == 0 {
            continue;
        }
        if gain < stale {
            heap.push((gain, Reverse(c)));
            continue;
        }
        centers.push(c);
        uncovered.difference_with(index.ball(c));
    }
    centers.sort_unstable();
    centers
}

/// Targets pairwise unable to share a ball, chosen greedily in index order.
/// Their number lower-bounds every cover. By symmetry the centers whose
/// ball holds `t` are exactly the members of `t`'s own ball.
pub(crate) fn conflict_lower_bound(index: &BallIndex, targets: &[usize]) -> usize {
    let mut sorted = targets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut chosen: Vec<&FixedBitSet> = Vec::new();
    for t in sorted {
        let holders = index.ball(t);
        if chosen.iter().all(|c| c.is_disjoint(holders)) {
            chosen.push(holders);
        }
    }
    chosen.len()
}

/// Exact minimum cover of at most 64 targets. Returns the centers and
/// whether the search finished inside the node budget.
fn small_cover(index: &BallIndex, n: usize, targets: &[usize], budget: u64) -> (Vec<usize>, bool) {
    let full: u64 = if targets.len() == 64 { u64::MAX } else { (1u64 << targets.len()) - 1 };
    let mut masks: Vec<(u64, usize)> = (0..n)
        .filter_map(|c| {
            let ball = index.ball(c);
            let mask = targets
                .iter()
                .enumerate()
                .filter(|&(_, &t)| ball.contains(t))
                .fold(0u64, |acc, (bit, _)| acc | 1 << bit);
            (mask != 0).then_some((mask, c))
        })
        .collect();
    // Identical masks are interchangeable; keep the lowest center.
    masks.sort_unstable();
    masks.dedup_by_key(|p| p.0);
    masks.sort_by_key(|p| p.1);

    let greedy = {
        let mut uncovered = full;
        let mut picked = Vec::new();
        while uncovered != 0 {
            let &(mask, _) = masks
                .iter()
                .rev()
                .max_by_key(|(m, _)| (m & uncovered).count_ones())
                .expect("every target covers itself");
            picked.push(mask);
            uncovered &= !mask;
        }
        picked
    };
    let mut search = MaskCover {
        masks: masks.iter().map(|p| p.0).collect(),
        chosen: Vec::new(),
        best: greedy,
        nodes: 0,
        budget,
        aborted: false,
    };
    search.search(full);
    let complete = !search.aborted;
    let mut centers: Vec<usize> = search
        .best
        .iter()
        .map(|m| masks.iter().find(|p| p.0 == *m).map(|p| p.1).expect("mask came from the list"))
        .collect();
    centers.sort_unstable();
    (centers, complete)
}

struct MaskCover {
    masks: Vec<u64>,
    chosen: Vec<u64>,
    best: Vec<u64>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl MaskCover {
    fn search(&mut self, uncovered: u64) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        if uncovered == 0 {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        let max_gain = self.masks.iter().map(|m| (m & uncovered).count_ones()).max().unwrap_or(0);
        let remaining = uncovered.count_ones();
        let needed = remaining.div_ceil(max_gain) as usize;
        if self.chosen.len() + needed >= self.best.len() {
            return;
        }
        // Branch on the uncovered target with the fewest covering balls.
        let mut pivot = (usize::MAX, 0u32);
        let mut bits = uncovered;
        while bits != 0 {
            let bit = bits.trailing_zeros();
            bits &= bits - 1;
            let holders = self.masks.iter().filter(|m| *m >> bit & 1 == 1).count();
            if holders < pivot.0 {
                pivot = (holders, bit);
            }
        }
        let mut options: Vec<u64> = self.masks.iter().copied().filter(|m| m >> pivot.1 & 1 == 1).collect();
        options.sort_by_key(|m| Reverse((m & uncovered).count_ones()));
        for mask in options {
            self.chosen.push(mask);
            self.search(uncovered & !mask);
            self.chosen.pop();
            if self.aborted {
                return;
            }
        }
    }
}

/// Per radius, how many radius-`r` balls each center's `B(x, 2r)` needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverProfile {
    pub rows: Vec<ProfileRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub radius: f64,
    /// Cover size per center.
    pub counts: Vec<usize>,
    pub max: usize,
    pub argmax_center: usize,
    /// Largest certified lower bound over centers. Equals `max` on exact
    /// rows; on other rows the true row maximum lies in `[max_lower_bound, max]`.
    pub max_lower_bound: usize,
    /// True when every count in the row is an exact minimum.
    pub exact: bool,
}

impl CoverProfile {
    pub fn max_counts(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.max).collect()
    }
}

/// Cover profile behind the geometric doubling condition: for each radius
/// `r` and center `x`, the number of radius-`r` balls needed to cover
/// `B(x, 2r)`. The row maximum is a sample-level lower bound for `2^N`
/// when the row is exact.
pub fn geometric_doubling_profile<M: FiniteMetric + ?Sized>(m: &M, radii: &[f64]) -> Result<CoverProfile> {
    geometric_doubling_profile_with(m, radii, &CoverOptions::default())
}

pub fn geometric_doubling_profile_with<M: FiniteMetric + ?Sized>(
    m: &M,
    radii: &[f64],
    opts: &CoverOptions,
) -> Result<CoverProfile> {
    radii.iter().try_for_each(|&r| check_radius(r))?;
    let n = m.len();
    check_sample(n, opts)?;
    let rows = radii
        .iter()
        .map(|&r| {
            let small = BallIndex::new(m, r);
            let big = BallIndex::new(m, 2.0 * r);
            let covers: Vec<CoverCount> = (0..n)
                .into_par_iter()
                .map(|x| {
                    let targets: Vec<usize> = big.ball(x).ones().collect();
                    let mut c = cover_with_index(&small, n, &targets, opts);
                    if !c.exact {
                        c.lower_bound = conflict_lower_bound(&small, &targets);
                    }
                    c
                })
                .collect();
            let counts: Vec<usize> = covers.iter().map(|c| c.count).collect();
            let (argmax_center, max) =
                counts.iter().copied().enumerate().fold((0, 0), |best, (x, c)| if c > best.1 { (x, c) } else { best });
            let max_lower_bound = covers.iter().map(|c| c.lower_bound).max().unwrap_or(0);
            ProfileRow { radius: r, exact: covers.iter().all(|c| c.exact), counts, max, argmax_center, max_lower_bound }
        })
        .collect();
    Ok(CoverProfile { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::DistanceMatrix;

    fn line(points: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_fn(points.len(), |i, j| (points[i] - points[j]).abs()).unwrap()
    }

    #[test]
    fn covering_examples() {
        let m = line(&[0.0, 0.4, 1.0]);
        let c = covering_number(&m, 2.0).unwrap();
        assert_eq!((c.count, c.exact, c.lower_bound), (1, true, 1));
        let m = line(&[0.0, 1.0]);
        assert_eq!(covering_number(&m, 0.5).unwrap().count, 2);
        assert!(covering_number(&m, 0.0).is_err());
    }

    #[test]
    fn exact_cover_on_six_points() {
        let pts = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let m = line(&pts);
        let c = covering_number(&m, 1.5).unwrap();
        assert_eq!(c.count, 2);
        assert!(c.exact);
        assert_eq!(c.centers, vec![1, 4]);
    }

    #[test]
    fn greedy_path_brackets_the_minimum() {
        let pts: Vec<f64> = (0..100).map(f64::from).collect();
        let m = line(&pts);
        let c = covering_number(&m, 1.5).unwrap();
        assert!(!c.exact);
        // Each ball holds 3 consecutive integers: minimum is 34.
        assert!(c.lower_bound <= 34 && 34 <= c.count);
        assert_eq!(c.lower_bound, 34);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let pts: Vec<f64> = (0..40).map(f64::from).collect();
        let m = line(&pts);
        let opts = CoverOptions { node_budget: 0, ..CoverOptions::default() };
        let c = covering_number_with(&m, 1.5, &opts).unwrap();
        assert!(!c.exact);
        assert_eq!(c.count, 14);
        assert!(c.lower_bound <= 14);
    }

    #[test]
    fn sample_cap_is_enforced() {
        let m = line(&[0.0, 1.0, 2.0]);
        let opts = CoverOptions { sample_cap: 2, ..CoverOptions::default() };
        assert!(matches!(covering_number_with(&m, 1.0, &opts), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn profile_on_two_points() {
        let m = line(&[0.0, 1.0]);
        let p = geometric_doubling_profile(&m, &[0.25, 0.5]).unwrap();
        for row in &p.rows {
            assert_eq!(row.counts, vec![1, 1]);
            assert!(row.exact);
        }
    }
}
