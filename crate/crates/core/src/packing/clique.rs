//! Maximum clique by branch and bound with a greedy-coloring bound.

use fixedbitset::FixedBitSet;

pub(crate) struct CliqueSearch<'a> {
    adj: &'a [FixedBitSet],
    current: Vec<usize>,
    best: Vec<usize>,
}

impl<'a> CliqueSearch<'a> {
    /// `seed` must already be a clique; it is the incumbent to beat.
    pub(crate) fn new(adj: &'a [FixedBitSet], seed: Vec<usize>) -> Self {
        Self { adj, current: Vec::new(), best: seed }
    }

    /// Largest clique, members in ascending order.
    pub(crate) fn run(mut self) -> Vec<usize> {
        let n = self.adj.len();
        let degree: Vec<usize> = self.adj.iter().map(|a| a.count_ones(..)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(a.cmp(&b)));
        self.expand(order);
        let mut best = self.best;
        best.sort_unstable();
        best
    }

    /// Greedy sequential coloring of `candidates`; returns the vertices
    /// grouped by color and each vertex's color number (1-based), which
    /// bounds the clique size reachable from the prefix ending there.
    fn color_sort(&self, candidates: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in candidates {
            let slot = classes.iter().position(|class| class.iter().all(|&u| !self.adj[v].contains(u)));
            match slot {
                Some(k) => classes[k].push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(candidates.len());
        let mut colors = Vec::with_capacity(candidates.len());
        for (k, class) in classes.into_iter().enumerate() {
            colors.extend(std::iter::repeat(k + 1).take(class.len()));
            order.extend(class);
        }
        (order, colors)
    }

    fn expand(&mut self, candidates: Vec<usize>) {
        let (order, colors) = self.color_sort(&candidates);
        let mut removed = FixedBitSet::with_capacity(self.adj.len());
        for idx in (0..order.len()).rev() {
            if self.current.len() + colors[idx] <= self.best.len() {
                return;
            }
            let v = order[idx];
            self.current.push(v);
            let next: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&u| u != v && !removed.contains(u) && self.adj[v].contains(u))
                .collect();
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            removed.insert(v);
        }
    }
}
