//! Exhaustive enumeration over tiny configuration-model instances, in exact
//! rational arithmetic.
//!
//! Matchings are generated by pairing the smallest unmatched point with each
//! remaining candidate in turn, which yields every perfect matching exactly
//! once, each as a sorted list of `(a, b)` pairs with `a < b`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::components::components_of_edges;
use crate::degrees::DegreeSequence;
use crate::error::{Error, Result};
use crate::percolation::PercolationKind;

pub type Matching = Vec<(usize, usize)>;

/// Largest point count accepted by [`enumerate_matchings`] and
/// [`exact_l1_distribution`].
pub const MAX_POINTS: usize = 10;
/// Largest point count accepted by the conditional-law enumerations.
pub const MAX_CONDITIONAL_POINTS: usize = 8;
pub const MAX_VERTICES: usize = 6;

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `(2M)! / (M! 2^M) = (2M - 1)!!`.
pub fn matching_count(points: usize) -> u128 {
    assert!(points % 2 == 0);
    (1..points as u128).step_by(2).product()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u128).fold(1, |acc, j| acc * (n as u128 - j) / (j + 1))
}

fn check_size(points: usize, limit: usize) -> Result<()> {
    if points > limit {
        return Err(Error::TooLarge(format!("{points} points, limit {limit}")));
    }
    Ok(())
}

/// Every perfect matching of the given points.
pub fn matchings_of(points: &[usize]) -> Vec<Matching> {
    fn recurse(rest: &[usize], current: &mut Matching, out: &mut Vec<Matching>) {
        let Some((&first, tail)) = rest.split_first() else {
            let mut m = current.clone();
            m.sort_unstable();
            out.push(m);
            return;
        };
        for (i, &partner) in tail.iter().enumerate() {
            let mut remaining = tail.to_vec();
            remaining.remove(i);
            current.push((first.min(partner), first.max(partner)));
            recurse(&remaining, current, out);
            current.pop();
        }
    }
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    if sorted.len() % 2 == 0 {
        recurse(&sorted, &mut Vec::new(), &mut out);
    }
    out
}

/// All perfect matchings on the points of `seq` (at most [`MAX_POINTS`]).
pub fn enumerate_matchings(seq: &DegreeSequence) -> Result<Vec<Matching>> {
    check_size(seq.total_degree(), MAX_POINTS)?;
    let points: Vec<usize> = (0..seq.total_degree()).collect();
    Ok(matchings_of(&points))
}

fn owners(seq: &DegreeSequence) -> Vec<usize> {
    seq.degrees()
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat(v).take(d))
        .collect()
}

fn offsets(degrees: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    degrees
        .iter()
        .map(|&d| {
            let start = acc;
            acc += d;
            start
        })
        .collect()
}

fn check_probability(p: &BigRational) -> Result<()> {
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::InvalidProbability(to_f64(p)));
    }
    Ok(())
}

/// `p^k (1-p)^(m-k)`.
fn bernoulli_weight(p: &BigRational, kept: usize, total: usize) -> BigRational {
    let q = BigRational::one() - p;
    num_traits::pow(p.clone(), kept) * num_traits::pow(q, total - kept)
}

/// Calls `visit(matching, kept_pairs, weight)` for every matching and every
/// subset of its pairs, weighted by `P(matching) P(subset survives)`.
fn for_each_bond_outcome<F>(seq: &DegreeSequence, p: &BigRational, mut visit: F) -> Result<()>
where
    F: FnMut(&Matching, &[(usize, usize)], &BigRational),
{
    let matchings = enumerate_matchings(seq)?;
    let per_matching = BigRational::new(BigInt::one(), BigInt::from(matchings.len()));
    let m = seq.edge_count();
    for matching in &matchings {
        for mask in 0u32..(1 << m) {
            let kept: Vec<(usize, usize)> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| matching[i])
                .collect();
            let w = &per_matching * bernoulli_weight(p, kept.len(), m);
            visit(matching, &kept, &w);
        }
    }
    Ok(())
}

/// Conditional law of the surviving matching given the induced degree
/// sequence.
#[derive(Debug, Clone)]
pub struct BondConditional {
    /// Survivor matchings relabeled onto `P(d')`: the `r`-th surviving point of
    /// vertex `v` becomes point `r` of `v` in the layout of `d'`.
    pub relabeled: BTreeMap<Matching, BigRational>,
    /// Survivor matchings on the original point labels.
    pub point_level: BTreeMap<Matching, BigRational>,
    /// Number of perfect matchings on `P(d')`.
    pub space_size: u128,
    /// `P(d'(n) = d')`.
    pub probability: BigRational,
}

impl BondConditional {
    /// Every perfect matching on `P(d')` occurs, each with probability
    /// exactly `1 / space_size`.
    pub fn is_uniform(&self) -> bool {
        let expected = BigRational::new(BigInt::one(), BigInt::from(self.space_size));
        self.relabeled.len() as u128 == self.space_size
            && self.relabeled.values().all(|x| *x == expected)
    }
}

/// Exact distribution of the survivor matching of bond percolation at `p`,
/// conditional on the induced degree sequence being `target`.
pub fn exact_bond_conditional(
    seq: &DegreeSequence,
    p: &BigRational,
    target: &[usize],
) -> Result<BondConditional> {
    check_size(seq.total_degree(), MAX_CONDITIONAL_POINTS)?;
    check_probability(p)?;
    if target.len() != seq.n() {
        return Err(Error::InvalidArgument(format!(
            "target has {} vertices, sequence has {}",
            target.len(),
            seq.n()
        )));
    }
    let owner = owners(seq);
    let target_offsets = offsets(target);
    let mut relabeled: BTreeMap<Matching, BigRational> = BTreeMap::new();
    let mut point_level: BTreeMap<Matching, BigRational> = BTreeMap::new();
    let mut probability = BigRational::zero();

    for_each_bond_outcome(seq, p, |_, kept, w| {
        if w.is_zero() {
            return;
        }
        let mut deg = vec![0usize; seq.n()];
        for &(a, b) in kept {
            deg[owner[a]] += 1;
            deg[owner[b]] += 1;
        }
        if deg != target {
            return;
        }
        let mut survivors: Vec<usize> = kept.iter().flat_map(|&(a, b)| [a, b]).collect();
        survivors.sort_unstable();
        let mut new_label = BTreeMap::new();
        let mut rank = vec![0usize; seq.n()];
        for x in survivors {
            let v = owner[x];
            new_label.insert(x, target_offsets[v] + rank[v]);
            rank[v] += 1;
        }
        let mut moved: Matching = kept
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (new_label[&a], new_label[&b]);
                (x.min(y), x.max(y))
            })
            .collect();
        moved.sort_unstable();
        let mut orig = kept.to_vec();
        orig.sort_unstable();
        *relabeled.entry(moved).or_insert_with(BigRational::zero) += w;
        *point_level.entry(orig).or_insert_with(BigRational::zero) += w;
        probability += w;
    })?;

    if probability.is_zero() {
        return Err(Error::Unreachable);
    }
    for v in relabeled.values_mut().chain(point_level.values_mut()) {
        *v /= &probability;
    }
    let total: usize = target.iter().sum();
    Ok(BondConditional {
        relabeled,
        point_level,
        space_size: matching_count(total),
        probability,
    })
}

/// Exact law of the surviving point set `C` given `k` surviving edges.
#[derive(Debug, Clone)]
pub struct SurvivorSetLaw {
    pub sets: BTreeMap<Vec<usize>, BigRational>,
    /// `C(2M, 2k)`.
    pub subset_count: u128,
}

impl SurvivorSetLaw {
    pub fn is_uniform(&self) -> bool {
        let expected = BigRational::new(BigInt::one(), BigInt::from(self.subset_count));
        self.sets.len() as u128 == self.subset_count && self.sets.values().all(|x| *x == expected)
    }
}

pub fn exact_survivor_set_law(
    seq: &DegreeSequence,
    p: &BigRational,
    k: usize,
) -> Result<SurvivorSetLaw> {
    check_size(seq.total_degree(), MAX_CONDITIONAL_POINTS)?;
    check_probability(p)?;
    if k > seq.edge_count() {
        return Err(Error::Unreachable);
    }
    let mut sets: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
    let mut total = BigRational::zero();
    for_each_bond_outcome(seq, p, |_, kept, w| {
        if kept.len() != k || w.is_zero() {
            return;
        }
        let mut c: Vec<usize> = kept.iter().flat_map(|&(a, b)| [a, b]).collect();
        c.sort_unstable();
        *sets.entry(c).or_insert_with(BigRational::zero) += w;
        total += w;
    })?;
    if total.is_zero() {
        return Err(Error::Unreachable);
    }
    for v in sets.values_mut() {
        *v /= &total;
    }
    Ok(SurvivorSetLaw {
        sets,
        subset_count: binomial(seq.total_degree(), 2 * k),
    })
}

/// Exact distribution of `|L1|` after percolation of a uniform matching.
pub fn exact_l1_distribution(
    seq: &DegreeSequence,
    p: &BigRational,
    kind: PercolationKind,
) -> Result<BTreeMap<usize, BigRational>> {
    check_size(seq.total_degree(), MAX_POINTS)?;
    if seq.n() > MAX_VERTICES {
        return Err(Error::TooLarge(format!(
            "{} vertices, limit {MAX_VERTICES}",
            seq.n()
        )));
    }
    check_probability(p)?;
    let owner = owners(seq);
    let n = seq.n();
    let mut law: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut add = |edges: Vec<(usize, usize)>, w: BigRational| {
        if w.is_zero() {
            return;
        }
        let size = components_of_edges(n, edges).l1_size;
        *law.entry(size).or_insert_with(BigRational::zero) += w;
    };
    match kind {
        PercolationKind::Bond => {
            for_each_bond_outcome(seq, p, |_, kept, w| {
                add(
                    kept.iter().map(|&(a, b)| (owner[a], owner[b])).collect(),
                    w.clone(),
                );
            })?;
        }
        PercolationKind::Site => {
            let matchings = enumerate_matchings(seq)?;
            let per_matching = BigRational::new(BigInt::one(), BigInt::from(matchings.len()));
            for matching in &matchings {
                for mask in 0u32..(1 << n) {
                    let retained = |v: usize| mask >> v & 1 == 1;
                    let kept = mask.count_ones() as usize;
                    let w = &per_matching * bernoulli_weight(p, kept, n);
                    let edges = matching
                        .iter()
                        .map(|&(a, b)| (owner[a], owner[b]))
                        .filter(|&(u, v)| retained(u) && retained(v))
                        .collect();
                    add(edges, w);
                }
            }
        }
    }
    Ok(law)
}
