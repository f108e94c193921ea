//! Bond and site percolation on a configuration-model matching.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::configuration::HalfEdgeGraph;
use crate::degrees::DegreeSequence;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PercolationKind {
    Bond,
    Site,
}

impl fmt::Display for PercolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PercolationKind::Bond => "bond",
            PercolationKind::Site => "site",
        })
    }
}

impl FromStr for PercolationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bond" => Ok(PercolationKind::Bond),
            "site" => Ok(PercolationKind::Site),
            other => Err(Error::InvalidArgument(format!(
                "percolation kind must be bond or site, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PercolationOutcome {
    pub kind: PercolationKind,
    pub p: f64,
    pub seed: u64,
    /// `M` of the percolated graph.
    pub original_edges: usize,
    /// Surviving point pairs, in matching order.
    pub survivors: Vec<(usize, usize)>,
    /// Surviving pairs projected to vertices.
    pub edges: Vec<(usize, usize)>,
    /// `d'(n)`.
    pub induced: DegreeSequence,
    /// Site only: `deleted[v]` is true when vertex `v` was removed.
    pub deleted: Option<Vec<bool>>,
    /// Site only: `b`, matched pairs with exactly one deleted endpoint owner.
    pub boundary: Option<usize>,
    /// Site only: `M_2`, total original degree of the retained vertices.
    pub retained_degree: Option<usize>,
}

impl PercolationOutcome {
    pub fn n(&self) -> usize {
        self.induced.n()
    }

    /// `k`.
    pub fn surviving_edges(&self) -> usize {
        self.survivors.len()
    }

    pub fn summary(&self) -> OutcomeSummary {
        OutcomeSummary {
            kind: self.kind,
            p: self.p,
            n: self.n(),
            m: self.original_edges,
            k: self.surviving_edges(),
            b: self.boundary,
            m2: self.retained_degree,
            degree_counts: induced_degree_counts(self),
            seed: self.seed,
        }
    }
}

/// JSON record of one outcome.
#[derive(Debug, Clone, Serialize)]
pub struct OutcomeSummary {
    pub kind: PercolationKind,
    pub p: f64,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(rename = "M2", skip_serializing_if = "Option::is_none")]
    pub m2: Option<usize>,
    pub degree_counts: BTreeMap<usize, usize>,
    pub seed: u64,
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

fn induced_sequence(graph: &HalfEdgeGraph, survivors: &[(usize, usize)]) -> DegreeSequence {
    let mut deg = vec![0usize; graph.n()];
    for &(a, b) in survivors {
        deg[graph.owner(a)] += 1;
        deg[graph.owner(b)] += 1;
    }
    DegreeSequence::new(deg).expect("every surviving pair adds two points")
}

/// Keeps each matched pair independently with probability `p`, drawing one
/// uniform per pair in matching order (kept iff `u < p`).
pub fn bond_percolate(graph: &HalfEdgeGraph, p: f64, rng_seed: u64) -> Result<PercolationOutcome> {
    check_probability(p)?;
    let mut rng = seed::rng(rng_seed);
    let survivors: Vec<(usize, usize)> = graph
        .matching()
        .iter()
        .copied()
        .filter(|_| rng.random::<f64>() < p)
        .collect();
    let edges = survivors
        .iter()
        .map(|&(a, b)| (graph.owner(a), graph.owner(b)))
        .collect();
    let induced = induced_sequence(graph, &survivors);
    Ok(PercolationOutcome {
        kind: PercolationKind::Bond,
        p,
        seed: rng_seed,
        original_edges: graph.edge_count(),
        survivors,
        edges,
        induced,
        deleted: None,
        boundary: None,
        retained_degree: None,
    })
}

/// Retains each vertex independently with probability `p` (one uniform per
/// vertex in index order), then keeps the pairs whose two owners survive.
pub fn site_percolate(graph: &HalfEdgeGraph, p: f64, rng_seed: u64) -> Result<PercolationOutcome> {
    check_probability(p)?;
    let mut rng = seed::rng(rng_seed);
    let deleted: Vec<bool> = (0..graph.n()).map(|_| rng.random::<f64>() >= p).collect();
    Ok(site_percolate_with_deletions(graph, p, rng_seed, deleted))
}

/// Site percolation for a given deletion pattern.
pub fn site_percolate_with_deletions(
    graph: &HalfEdgeGraph,
    p: f64,
    rng_seed: u64,
    deleted: Vec<bool>,
) -> PercolationOutcome {
    assert_eq!(deleted.len(), graph.n());
    let mut survivors = Vec::new();
    let mut boundary = 0;
    for &(a, b) in graph.matching() {
        match (deleted[graph.owner(a)], deleted[graph.owner(b)]) {
            (false, false) => survivors.push((a, b)),
            (true, true) => {}
            _ => boundary += 1,
        }
    }
    let retained_degree = graph
        .sequence()
        .degrees()
        .iter()
        .zip(&deleted)
        .filter(|(_, &gone)| !gone)
        .map(|(&d, _)| d)
        .sum();
    let edges = survivors
        .iter()
        .map(|&(a, b)| (graph.owner(a), graph.owner(b)))
        .collect();
    let induced = induced_sequence(graph, &survivors);
    PercolationOutcome {
        kind: PercolationKind::Site,
        p,
        seed: rng_seed,
        original_edges: graph.edge_count(),
        survivors,
        edges,
        induced,
        deleted: Some(deleted),
        boundary: Some(boundary),
        retained_degree: Some(retained_degree),
    }
}

pub fn percolate(
    graph: &HalfEdgeGraph,
    kind: PercolationKind,
    p: f64,
    rng_seed: u64,
) -> Result<PercolationOutcome> {
    match kind {
        PercolationKind::Bond => bond_percolate(graph, p, rng_seed),
        PercolationKind::Site => site_percolate(graph, p, rng_seed),
    }
}

/// `D_i'`, the number of vertices of induced degree `i`, for every `i` with a
/// positive count.
pub fn induced_degree_counts(outcome: &PercolationOutcome) -> BTreeMap<usize, usize> {
    outcome
        .induced
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i, c))
        .collect()
}

/// A statistic together with its centre and concentration half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowCheck {
    pub value: f64,
    pub expected: f64,
    pub half_width: f64,
    pub within: bool,
}

impl WindowCheck {
    fn new(value: f64, expected: f64, half_width: f64) -> Self {
        Self {
            value,
            expected,
            half_width,
            within: (value - expected).abs() <= half_width,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurvivorStatistics {
    pub k: usize,
    /// Bond: `|k - Mp| <= ln n sqrt(n)`.
    pub k_window: Option<WindowCheck>,
    /// Site: `|M_2 - 2Mp| <= n^{2/3} ln n`.
    pub m2_window: Option<WindowCheck>,
    /// Site: `|b - 2Mp(1-p)| <= n^{2/3} ln^2 n`.
    pub b_window: Option<WindowCheck>,
}

impl SurvivorStatistics {
    pub fn all_within(&self) -> bool {
        [self.k_window, self.m2_window, self.b_window]
            .iter()
            .flatten()
            .all(|w| w.within)
    }
}

pub fn survivor_statistics(outcome: &PercolationOutcome) -> SurvivorStatistics {
    let n = outcome.n() as f64;
    let ln_n = n.ln();
    let m = outcome.original_edges as f64;
    let p = outcome.p;
    let k = outcome.surviving_edges();
    match outcome.kind {
        PercolationKind::Bond => SurvivorStatistics {
            k,
            k_window: Some(WindowCheck::new(k as f64, m * p, ln_n * n.sqrt())),
            m2_window: None,
            b_window: None,
        },
        PercolationKind::Site => {
            let n23 = n.powf(2.0 / 3.0);
            SurvivorStatistics {
                k,
                k_window: None,
                m2_window: outcome
                    .retained_degree
                    .map(|m2| WindowCheck::new(m2 as f64, 2.0 * m * p, n23 * ln_n)),
                b_window: outcome.boundary.map(|b| {
                    WindowCheck::new(b as f64, 2.0 * m * p * (1.0 - p), n23 * ln_n * ln_n)
                }),
            }
        }
    }
}
