//! Connected components of a percolated graph and the `L1` statistic.

use serde::Serialize;

use crate::percolation::PercolationOutcome;

/// Disjoint sets with path compression and union by size. On equal sizes the
/// root with the smaller id wins, and every root tracks the smallest vertex
/// of its set.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
    min_vertex: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            min_vertex: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (big, small) = match self.size[ra].cmp(&self.size[rb]) {
            std::cmp::Ordering::Greater => (ra, rb),
            std::cmp::Ordering::Less => (rb, ra),
            std::cmp::Ordering::Equal => (ra.min(rb), ra.max(rb)),
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.min_vertex[big] = self.min_vertex[big].min(self.min_vertex[small]);
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub n: usize,
    /// All component sizes, descending.
    pub component_sizes: Vec<usize>,
    pub l1_size: usize,
    /// Smallest vertex of `L1`, the first maximum-order component in order
    /// of smallest contained vertex.
    pub l1_root: usize,
    pub l2_size: usize,
    /// `|L1| / n`.
    pub fraction: f64,
}

impl ComponentSummary {
    pub fn l2_fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.l2_size as f64 / self.n as f64
        }
    }
}

/// Components of `n` vertices joined by `edges`. Loops are ignored.
pub fn components_of_edges<I>(n: usize, edges: I) -> ComponentSummary
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut sets = DisjointSets::new(n);
    for (u, v) in edges {
        if u != v {
            sets.union(u, v);
        }
    }
    // (size, min vertex) of each root
    let mut roots: Vec<(usize, usize)> = (0..n)
        .filter(|&v| sets.parent[v] == v)
        .map(|r| (sets.size[r], sets.min_vertex[r]))
        .collect();
    roots.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let component_sizes: Vec<usize> = roots.iter().map(|r| r.0).collect();
    let (l1_size, l1_root) = roots.first().copied().unwrap_or((0, 0));
    let l2_size = roots.get(1).map_or(0, |r| r.0);
    ComponentSummary {
        n,
        component_sizes,
        l1_size,
        l1_root,
        l2_size,
        fraction: if n == 0 { 0.0 } else { l1_size as f64 / n as f64 },
    }
}

/// Components of the surviving graph over all `n` vertices, deleted vertices
/// included as singletons.
pub fn components(outcome: &PercolationOutcome) -> ComponentSummary {
    components_of_edges(outcome.n(), outcome.edges.iter().copied())
}
