//! Configuration model: points (half-edges), uniform perfect matchings on
//! them, and the projected multigraph.

use std::io::{self, Write};

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::degrees::{sparse_degree_cap, DegreeSequence};
use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

/// A degree sequence's point set together with a perfect matching on it.
///
/// Vertex `v` owns the points `first_point(v) .. first_point(v) + d_v`.
/// Pairs are stored with the smaller point first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdgeGraph {
    sequence: DegreeSequence,
    owner: Vec<usize>,
    offsets: Vec<usize>,
    matching: Vec<(usize, usize)>,
}

fn point_layout(seq: &DegreeSequence) -> (Vec<usize>, Vec<usize>) {
    let mut owner = Vec::with_capacity(seq.total_degree());
    let mut offsets = Vec::with_capacity(seq.n() + 1);
    for (v, &d) in seq.degrees().iter().enumerate() {
        offsets.push(owner.len());
        owner.extend(std::iter::repeat(v).take(d));
    }
    offsets.push(owner.len());
    (owner, offsets)
}

impl HalfEdgeGraph {
    /// Wraps an explicit matching, checking that every point is used once.
    pub fn from_matching(sequence: DegreeSequence, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let points = sequence.total_degree();
        if pairs.len() * 2 != points {
            return Err(Error::InvalidArgument(format!(
                "{} pairs cannot match {points} points",
                pairs.len()
            )));
        }
        let mut seen = vec![false; points];
        let mut matching = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            for x in [a, b] {
                if x >= points || seen[x] {
                    return Err(Error::InvalidArgument(format!(
                        "point {x} is out of range or matched twice"
                    )));
                }
                seen[x] = true;
            }
            matching.push((a.min(b), a.max(b)));
        }
        let (owner, offsets) = point_layout(&sequence);
        Ok(Self {
            sequence,
            owner,
            offsets,
            matching,
        })
    }

    pub fn sequence(&self) -> &DegreeSequence {
        &self.sequence
    }

    pub fn n(&self) -> usize {
        self.sequence.n()
    }

    /// `M`.
    pub fn edge_count(&self) -> usize {
        self.matching.len()
    }

    pub fn point_count(&self) -> usize {
        self.owner.len()
    }

    pub fn owner(&self, point: usize) -> usize {
        self.owner[point]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn first_point(&self, vertex: usize) -> usize {
        self.offsets[vertex]
    }

    pub fn matching(&self) -> &[(usize, usize)] {
        &self.matching
    }

    /// Matching sorted by pair; equal for equal matchings regardless of draw order.
    pub fn canonical_matching(&self) -> Vec<(usize, usize)> {
        let mut m = self.matching.clone();
        m.sort_unstable();
        m
    }

    /// Projected edges `(owner(a), owner(b))` in matching order.
    pub fn vertex_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.matching
            .iter()
            .map(|&(a, b)| (self.owner[a], self.owner[b]))
    }
}

/// Draws a uniformly random perfect matching on the points of `seq`: the
/// point array is shuffled and consecutive entries are paired.
pub fn uniform_matching(seq: &DegreeSequence, rng_seed: u64) -> Result<HalfEdgeGraph> {
    if seq.total_degree() % 2 != 0 {
        return Err(Error::OddTotalDegree(seq.total_degree()));
    }
    let (owner, offsets) = point_layout(seq);
    let mut points: Vec<usize> = (0..owner.len()).collect();
    let mut rng = seed::rng(rng_seed);
    points.shuffle(&mut rng);
    let matching = points
        .chunks_exact(2)
        .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
        .collect();
    Ok(HalfEdgeGraph {
        sequence: seq.clone(),
        owner,
        offsets,
        matching,
    })
}

/// Source of configuration-model matchings. The validation suite is written
/// against this trait so that faulty samplers can be plugged in.
pub trait MatchingSampler: Sync {
    fn sample(&self, seq: &DegreeSequence, rng_seed: u64) -> Result<HalfEdgeGraph>;
}

/// The shuffle-and-pair sampler.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShuffleSampler;

impl MatchingSampler for ShuffleSampler {
    fn sample(&self, seq: &DegreeSequence, rng_seed: u64) -> Result<HalfEdgeGraph> {
        uniform_matching(seq, rng_seed)
    }
}

/// Multigraph view: `(u, v, multiplicity)` with `u <= v`, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Multigraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, usize)>,
}

impl Multigraph {
    pub fn loop_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.0 == e.1)
            .map(|e| e.2)
            .sum()
    }

    pub fn has_multi_edge(&self) -> bool {
        self.edges.iter().any(|e| e.2 > 1)
    }

    pub fn is_simple(&self) -> bool {
        self.edges.iter().all(|e| e.0 != e.1 && e.2 == 1)
    }

    /// Degree of each vertex, loops counted twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v, m) in &self.edges {
            deg[u] += m;
            deg[v] += m;
        }
        deg
    }
}

fn sorted_vertex_pairs(graph: &HalfEdgeGraph) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = graph
        .vertex_edges()
        .map(|(u, v)| (u.min(v), u.max(v)))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Projects the matching onto the vertices.
pub fn project(graph: &HalfEdgeGraph) -> Multigraph {
    let pairs = sorted_vertex_pairs(graph);
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for (u, v) in pairs {
        match edges.last_mut() {
            Some(last) if last.0 == u && last.1 == v => last.2 += 1,
            _ => edges.push((u, v, 1)),
        }
    }
    Multigraph { n: graph.n(), edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplicityReport {
    pub has_loop: bool,
    pub has_multi_edge: bool,
    /// `(1/M) sum_i C(d_i, 2)`.
    pub lambda: f64,
    /// `exp(-lambda/2 - lambda^2/4)`.
    pub predicted_simple_prob: f64,
}

impl SimplicityReport {
    pub fn is_simple(&self) -> bool {
        !self.has_loop && !self.has_multi_edge
    }
}

/// `lambda = (1/M) sum_i C(d_i, 2)`; zero when there are no edges.
pub fn simplicity_lambda(seq: &DegreeSequence) -> f64 {
    let m = seq.edge_count();
    if m == 0 {
        return 0.0;
    }
    let pairs: u128 = seq
        .degrees()
        .iter()
        .map(|&d| (d as u128) * (d as u128).saturating_sub(1) / 2)
        .sum();
    pairs as f64 / m as f64
}

pub fn predicted_simple_prob(seq: &DegreeSequence) -> f64 {
    let lambda = simplicity_lambda(seq);
    (-lambda / 2.0 - lambda * lambda / 4.0).exp()
}

pub fn simplicity(graph: &HalfEdgeGraph) -> SimplicityReport {
    let pairs = sorted_vertex_pairs(graph);
    let has_loop = pairs.iter().any(|&(u, v)| u == v);
    let has_multi_edge = pairs.windows(2).any(|w| w[0] == w[1]);
    SimplicityReport {
        has_loop,
        has_multi_edge,
        lambda: simplicity_lambda(graph.sequence()),
        predicted_simple_prob: predicted_simple_prob(graph.sequence()),
    }
}

/// A simple graph drawn by rejection, with the number of matchings tried.
#[derive(Debug, Clone)]
pub struct SimpleSample {
    pub graph: HalfEdgeGraph,
    pub attempts: usize,
}

/// Rejection-samples matchings until the projection is simple. Attempt `j`
/// (0-based) uses seed `derive(rng_seed, j)`.
pub fn uniform_simple_graph(
    seq: &DegreeSequence,
    rng_seed: u64,
    max_attempts: usize,
) -> Result<SimpleSample> {
    uniform_simple_graph_with(&ShuffleSampler, seq, rng_seed, max_attempts)
}

pub fn uniform_simple_graph_with<S: MatchingSampler + ?Sized>(
    sampler: &S,
    seq: &DegreeSequence,
    rng_seed: u64,
    max_attempts: usize,
) -> Result<SimpleSample> {
    if max_attempts == 0 {
        return Err(Error::InvalidArgument("max_attempts must be at least 1".into()));
    }
    for attempt in 0..max_attempts {
        let graph = sampler.sample(seq, seed::derive(rng_seed, attempt as u64))?;
        if simplicity(&graph).is_simple() {
            return Ok(SimpleSample {
                graph,
                attempts: attempt + 1,
            });
        }
    }
    Err(Error::AttemptsExhausted {
        attempts: max_attempts,
        predicted: predicted_simple_prob(seq),
    })
}

/// `Some(message)` when the maximum degree exceeds `floor(n^(1/9))`.
pub fn degree_regime_warning(seq: &DegreeSequence) -> Option<String> {
    let cap = sparse_degree_cap(seq.n());
    (seq.max_degree() > cap).then(|| {
        format!(
            "maximum degree {} exceeds floor(n^(1/9)) = {cap} for n = {}",
            seq.max_degree(),
            seq.n()
        )
    })
}

/// Writes the projected edges as text: a `# n=<n> m=<M>` header, then one
/// `u v` line per matched pair in matching order (loops as `u u`).
pub fn write_edge_list<W: Write>(graph: &HalfEdgeGraph, mut out: W) -> io::Result<()> {
    writeln!(out, "# n={} m={}", graph.n(), graph.edge_count())?;
    for (u, v) in graph.vertex_edges() {
        writeln!(out, "{} {}", u.min(v), u.max(v))?;
    }
    Ok(())
}
