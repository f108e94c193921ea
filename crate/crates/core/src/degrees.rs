//! Degree sequences, limiting degree distributions and their generating
//! polynomial `L(s) = sum_i lambda_i s^i`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zeta;

/// Allowed deviation of a declared weight table from total mass 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// A concrete degree vector on `n` vertices with an even total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<usize>,
    total: usize,
    max: usize,
    // counts[i] = number of vertices of degree i
    counts: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        let total: usize = degrees.iter().sum();
        if total % 2 != 0 {
            return Err(Error::OddTotalDegree(total));
        }
        let max = degrees.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0; max + 1];
        for &d in &degrees {
            counts[d] += 1;
        }
        Ok(Self {
            degrees,
            total,
            max,
            counts,
        })
    }

    pub fn regular(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.degrees[vertex]
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// `2M`, the number of points.
    pub fn total_degree(&self) -> usize {
        self.total
    }

    /// `M`, the number of edges of any realization.
    pub fn edge_count(&self) -> usize {
        self.total / 2
    }

    pub fn max_degree(&self) -> usize {
        self.max
    }

    /// `counts()[i]` is `D_i`, the number of vertices of degree `i`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, degree: usize) -> usize {
        self.counts.get(degree).copied().unwrap_or(0)
    }

    /// `(1/n) sum_i i(i-2) D_i`.
    pub fn q_value(&self) -> f64 {
        if self.degrees.is_empty() {
            return 0.0;
        }
        let sum: i128 = self
            .counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as i128) * (i as i128 - 2) * c as i128)
            .sum();
        sum as f64 / self.n() as f64
    }

    /// Empirical distribution `D_i / n`.
    pub fn empirical(&self) -> DegreeDistribution {
        let n = self.n().max(1) as f64;
        DegreeDistribution::Finite(self.counts.iter().map(|&c| c as f64 / n).collect())
    }
}

/// `lambda_k = c k^{-gamma}` for `k >= min_degree`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawSpec {
    gamma: f64,
    min_degree: usize,
    normalization: f64,
}

impl PowerLawSpec {
    pub fn new(gamma: f64, min_degree: usize) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "power-law exponent must exceed 1 to be normalizable, got {gamma}"
            )));
        }
        if min_degree == 0 {
            return Err(Error::InvalidDistribution(
                "power-law minimum degree must be at least 1".into(),
            ));
        }
        let mass = zeta::zeta_tail(gamma, min_degree as u64)
            .expect("gamma > 1 and min_degree >= 1");
        Ok(Self {
            gamma,
            min_degree,
            normalization: 1.0 / mass,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    /// The constant `c`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn weight(&self, k: usize) -> f64 {
        if k < self.min_degree {
            0.0
        } else {
            self.normalization * (k as f64).powf(-self.gamma)
        }
    }

    /// `c sum_{k >= min_degree} k^{-s}`, divergent for `s <= 1`.
    fn scaled_tail(&self, s: f64) -> Option<f64> {
        zeta::zeta_tail(s, self.min_degree as u64).map(|t| self.normalization * t)
    }

    /// The zeta-function form `(c zeta(gamma-1), c (zeta(gamma-2) - zeta(gamma-1)))`,
    /// which keeps the terms below `min_degree`. Only meaningful as a
    /// cross-check; [`DegreeDistribution::generating_derivatives`] returns the
    /// exact sums over the support.
    pub fn zeta_form_derivatives(&self) -> Result<GeneratingDerivatives> {
        let z1 = zeta::zeta(self.gamma - 1.0).ok_or(Error::DivergentMoment {
            moment: 1,
            gamma: self.gamma,
        })?;
        let z2 = zeta::zeta(self.gamma - 2.0).ok_or(Error::DivergentMoment {
            moment: 2,
            gamma: self.gamma,
        })?;
        Ok(GeneratingDerivatives {
            first: self.normalization * z1,
            second: self.normalization * (z2 - z1),
        })
    }
}

/// `(L'(1), L''(1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratingDerivatives {
    pub first: f64,
    pub second: f64,
}

impl GeneratingDerivatives {
    /// `L''(1) - L'(1) = sum_i i(i-2) lambda_i`.
    pub fn q(&self) -> f64 {
        self.second - self.first
    }
}

/// Limiting degree distribution `lambda_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeDistribution {
    /// `weights[i] = lambda_i`.
    Finite(Vec<f64>),
    PowerLaw(PowerLawSpec),
}

impl DegreeDistribution {
    pub fn regular(d: usize) -> Self {
        let mut w = vec![0.0; d + 1];
        w[d] = 1.0;
        DegreeDistribution::Finite(w)
    }

    /// Builds a finite distribution from `(degree, weight)` pairs. Weights
    /// must be non-negative and sum to 1 within [`WEIGHT_SUM_TOLERANCE`].
    pub fn from_weights<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut w: Vec<f64> = Vec::new();
        for (degree, weight) in pairs {
            if !(weight >= 0.0) || !weight.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "weight for degree {degree} is {weight}"
                )));
            }
            if w.len() <= degree {
                w.resize(degree + 1, 0.0);
            }
            w[degree] += weight;
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        while w.len() > 1 && w.last() == Some(&0.0) {
            w.pop();
        }
        Ok(DegreeDistribution::Finite(w))
    }

    pub fn power_law(gamma: f64, min_degree: usize) -> Result<Self> {
        PowerLawSpec::new(gamma, min_degree).map(DegreeDistribution::PowerLaw)
    }

    pub fn weight(&self, degree: usize) -> f64 {
        match self {
            DegreeDistribution::Finite(w) => w.get(degree).copied().unwrap_or(0.0),
            DegreeDistribution::PowerLaw(spec) => spec.weight(degree),
        }
    }

    /// Dense weight vector for finite distributions.
    pub fn finite_weights(&self) -> Option<&[f64]> {
        match self {
            DegreeDistribution::Finite(w) => Some(w),
            DegreeDistribution::PowerLaw(_) => None,
        }
    }

    /// Largest degree with positive weight, `None` for unbounded support.
    pub fn max_support(&self) -> Option<usize> {
        match self {
            DegreeDistribution::Finite(w) => Some(w.iter().rposition(|&x| x > 0.0).unwrap_or(0)),
            DegreeDistribution::PowerLaw(_) => None,
        }
    }

    pub fn min_support(&self) -> usize {
        match self {
            DegreeDistribution::Finite(w) => w.iter().position(|&x| x > 0.0).unwrap_or(0),
            DegreeDistribution::PowerLaw(spec) => spec.min_degree,
        }
    }

    /// `L'(1) = sum_i i lambda_i` and `L''(1) = sum_i i(i-1) lambda_i`.
    pub fn generating_derivatives(&self) -> Result<GeneratingDerivatives> {
        match self {
            DegreeDistribution::Finite(w) => {
                let mut first = 0.0;
                let mut second = 0.0;
                for (i, &x) in w.iter().enumerate() {
                    let i = i as f64;
                    first += i * x;
                    second += i * (i - 1.0) * x;
                }
                Ok(GeneratingDerivatives { first, second })
            }
            DegreeDistribution::PowerLaw(spec) => {
                let gamma = spec.gamma;
                let first = spec
                    .scaled_tail(gamma - 1.0)
                    .ok_or(Error::DivergentMoment { moment: 1, gamma })?;
                let k2 = spec
                    .scaled_tail(gamma - 2.0)
                    .ok_or(Error::DivergentMoment { moment: 2, gamma })?;
                Ok(GeneratingDerivatives {
                    first,
                    second: k2 - first,
                })
            }
        }
    }

    /// `Q = sum_i i(i-2) lambda_i = L''(1) - L'(1)`.
    pub fn q_value(&self) -> Result<f64> {
        self.generating_derivatives().map(|g| g.q())
    }

    /// Mean number of children of a vertex reached along an edge,
    /// `sum_i (i-1) i lambda_i / sum_j j lambda_j = L''(1)/L'(1)`.
    pub fn offspring_mean(&self) -> Result<f64> {
        let g = self.generating_derivatives()?;
        if g.first <= 0.0 {
            return Err(Error::ZeroFirstMoment);
        }
        Ok(g.second / g.first)
    }

    /// Restriction to degrees `<= cap`, renormalized. Returns the restricted
    /// distribution and the removed mass.
    pub fn truncated(&self, cap: usize) -> Result<(DegreeDistribution, f64)> {
        let kept: Vec<f64> = (0..=cap).map(|i| self.weight(i)).collect();
        let mass: f64 = kept.iter().sum();
        if mass <= 0.0 {
            return Err(Error::EntirelyAboveCap { cap });
        }
        let removed = match self {
            DegreeDistribution::Finite(w) => w.iter().skip(cap + 1).sum(),
            DegreeDistribution::PowerLaw(_) => (1.0 - mass).max(0.0),
        };
        let mut weights: Vec<f64> = kept.into_iter().map(|x| x / mass).collect();
        while weights.len() > 1 && weights.last() == Some(&0.0) {
            weights.pop();
        }
        Ok((DegreeDistribution::Finite(weights), removed))
    }
}

/// Declarative form of a degree distribution, as written in experiment
/// configs (`{"kind":"regular","d":3}`, `{"kind":"table","weights":{"1":0.5,"3":0.5}}`,
/// `{"kind":"powerlaw","gamma":3.5,"min_degree":2}`) or on the command line
/// (`regular:3`, `table:1=0.5,3=0.5`, `powerlaw:3.5[:min_degree]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistSpec {
    Regular {
        d: usize,
    },
    Table {
        #[serde(with = "degree_keys")]
        weights: BTreeMap<usize, f64>,
    },
    #[serde(rename = "powerlaw")]
    PowerLaw {
        gamma: f64,
        #[serde(default = "default_min_degree")]
        min_degree: usize,
    },
}

// JSON object keys are strings; internally tagged enums do not coerce them.
mod degree_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(w: &BTreeMap<usize, f64>, s: S) -> Result<S::Ok, S::Error> {
        let as_strings: BTreeMap<String, f64> = w.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        as_strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, f64>, D::Error> {
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.parse::<usize>()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("degree key {k:?} is not an integer")))
            })
            .collect()
    }
}

fn default_min_degree() -> usize {
    2
}

impl DistSpec {
    pub fn to_distribution(&self) -> Result<DegreeDistribution> {
        match self {
            DistSpec::Regular { d } => Ok(DegreeDistribution::regular(*d)),
            DistSpec::Table { weights } => {
                DegreeDistribution::from_weights(weights.iter().map(|(&k, &w)| (k, w)))
            }
            DistSpec::PowerLaw { gamma, min_degree } => {
                DegreeDistribution::power_law(*gamma, *min_degree)
            }
        }
    }

    /// Degree cap used when none is given: the largest supported degree for
    /// finite tables, `floor(n^(1/9))` for power laws.
    pub fn default_cap(&self, n: usize) -> usize {
        match self {
            DistSpec::Regular { d } => *d,
            DistSpec::Table { weights } => weights
                .iter()
                .filter(|(_, &w)| w > 0.0)
                .map(|(&k, _)| k)
                .max()
                .unwrap_or(0),
            DistSpec::PowerLaw { .. } => sparse_degree_cap(n),
        }
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Regular { d } => write!(f, "regular:{d}"),
            DistSpec::Table { weights } => {
                write!(f, "table:")?;
                for (i, (k, w)) in weights.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}={w}")?;
                }
                Ok(())
            }
            DistSpec::PowerLaw { gamma, min_degree } => write!(f, "powerlaw:{gamma}:{min_degree}"),
        }
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidDistribution(format!("{s:?}: {why}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected kind:params"))?;
        match kind {
            "regular" => rest
                .parse()
                .map(|d| DistSpec::Regular { d })
                .map_err(|_| bad("degree must be a non-negative integer")),
            "table" => {
                let mut weights = BTreeMap::new();
                for entry in rest.split(',') {
                    let (k, w) = entry
                        .split_once('=')
                        .ok_or_else(|| bad("table entries look like degree=weight"))?;
                    let k: usize = k.trim().parse().map_err(|_| bad("bad degree"))?;
                    let w: f64 = w.trim().parse().map_err(|_| bad("bad weight"))?;
                    *weights.entry(k).or_insert(0.0) += w;
                }
                Ok(DistSpec::Table { weights })
            }
            "powerlaw" => {
                let mut parts = rest.split(':');
                let gamma: f64 = parts
                    .next()
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| bad("bad exponent"))?;
                let min_degree = match parts.next() {
                    Some(m) => m.parse().map_err(|_| bad("bad minimum degree"))?,
                    None => default_min_degree(),
                };
                if parts.next().is_some() {
                    return Err(bad("too many fields"));
                }
                Ok(DistSpec::PowerLaw { gamma, min_degree })
            }
            _ => Err(bad("kind must be regular, table or powerlaw")),
        }
    }
}

/// Largest `c` with `c^9 <= n`, i.e. `floor(n^{1/9})` in exact arithmetic.
pub fn sparse_degree_cap(n: usize) -> usize {
    let mut c = (n as f64).powf(1.0 / 9.0).floor() as usize;
    let pow9 = |c: usize| (c as u128).pow(9);
    while c > 0 && pow9(c) > n as u128 {
        c -= 1;
    }
    while pow9(c + 1) <= n as u128 {
        c += 1;
    }
    c
}

/// Output of [`from_distribution`].
#[derive(Debug, Clone)]
pub struct Realization {
    pub sequence: DegreeSequence,
    /// Mass of the limiting distribution above the cap.
    pub truncated_mass: f64,
    pub parity_repaired: bool,
    pub warnings: Vec<String>,
}

impl Realization {
    pub fn empirical(&self) -> DegreeDistribution {
        self.sequence.empirical()
    }
}

/// Realizes a degree sequence on `n` vertices whose empirical fractions track
/// `dist` restricted to degrees `<= max_degree_cap`.
///
/// Counts are apportioned by largest remainder (ties toward the smaller
/// degree), so they sum to exactly `n`. Vertices are laid out in ascending
/// degree order. An odd total is repaired by decrementing one vertex of
/// maximum degree.
pub fn from_distribution(
    dist: &DegreeDistribution,
    n: usize,
    max_degree_cap: usize,
) -> Result<Realization> {
    if n == 0 {
        return Err(Error::TooFewVertices(n));
    }
    let (restricted, truncated_mass) = dist.truncated(max_degree_cap)?;
    let weights = restricted.finite_weights().expect("truncation is finite");

    let quotas: Vec<f64> = weights.iter().map(|w| w * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut remaining = n.saturating_sub(assigned);
    let mut order: Vec<usize> = (0..quotas.len()).filter(|&i| weights[i] > 0.0).collect();
    // stable: equal remainders keep ascending degree order
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa)
    });
    for &i in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        counts[i] += 1;
        remaining -= 1;
    }

    let mut degrees: Vec<usize> = Vec::with_capacity(n);
    for (d, &c) in counts.iter().enumerate() {
        degrees.extend(std::iter::repeat(d).take(c));
    }
    degrees.truncate(n);

    let mut warnings = Vec::new();
    if truncated_mass > 0.0 {
        warnings.push(format!(
            "degree cap {max_degree_cap} removed mass {truncated_mass:.6e} of the distribution"
        ));
    }
    let total: usize = degrees.iter().sum();
    let parity_repaired = total % 2 == 1;
    if parity_repaired {
        // ascending layout: the last vertex has maximum degree
        let last = degrees.len() - 1;
        degrees[last] -= 1;
        warnings.push(format!(
            "odd total degree {total}: vertex {last} decremented from {} to {}",
            degrees[last] + 1,
            degrees[last]
        ));
    }
    let sequence = DegreeSequence::new(degrees)?;
    let cap = sparse_degree_cap(n);
    if sequence.max_degree() > cap {
        warnings.push(format!(
            "maximum degree {} exceeds floor(n^(1/9)) = {cap}",
            sequence.max_degree()
        ));
    }
    Ok(Realization {
        sequence,
        truncated_mass,
        parity_repaired,
        warnings,
    })
}
