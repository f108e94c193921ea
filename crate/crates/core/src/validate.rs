//! Checks of the sampling code against the exact oracle on tiny instances.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::components::components;
use crate::configuration::{predicted_simple_prob, simplicity, MatchingSampler};
use crate::degrees::DegreeSequence;
use crate::error::Result;
use crate::oracle::{self, rational, Matching};
use crate::percolation::{percolate, PercolationKind};
use crate::seed;
use crate::stats::{chi_square_uniform, total_variation};

/// Significance level of the matching-uniformity test.
pub const UNIFORMITY_ALPHA: f64 = 0.001;
pub const L1_TV_TOLERANCE: f64 = 0.01;
pub const SIMPLICITY_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ValidationOptions {
    pub seed: u64,
    pub matching_draws: usize,
    pub l1_samples: usize,
    pub simplicity_draws: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            matching_draws: 100_000,
            l1_samples: 1_000_000,
            simplicity_draws: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{tag} {}: {}", c.name, c.detail);
        }
        let _ = writeln!(
            s,
            "{} of {} checks passed",
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        );
        s
    }
}

fn seq(d: &[usize]) -> DegreeSequence {
    DegreeSequence::new(d.to_vec()).expect("fixture has even total")
}

/// Fixtures with at most 10 points.
pub fn matching_fixtures() -> Vec<DegreeSequence> {
    [
        &[1, 1][..],
        &[2, 2],
        &[3, 3],
        &[1, 1, 1, 1],
        &[2, 1, 1],
        &[2, 2, 2],
        &[1, 2, 3, 2, 2],
        &[5, 5],
    ]
    .iter()
    .map(|d| seq(d))
    .collect()
}

/// Fixtures with at most 8 points, for the conditional laws.
pub fn conditional_fixtures() -> Vec<DegreeSequence> {
    [&[1, 1][..], &[2, 2], &[1, 1, 1, 1], &[3, 1], &[2, 1, 1], &[2, 1, 1, 2], &[3, 3, 2]]
        .iter()
        .map(|d| seq(d))
        .collect()
}

/// Fixtures for the `|L1|` law comparison (at most 10 points, 6 vertices).
pub fn l1_fixtures() -> Vec<(DegreeSequence, PercolationKind, (i64, i64))> {
    vec![
        (seq(&[2, 2, 1, 1]), PercolationKind::Bond, (1, 2)),
        (seq(&[3, 3, 2, 2]), PercolationKind::Bond, (3, 5)),
        (seq(&[3, 3, 2, 2]), PercolationKind::Site, (3, 5)),
        (seq(&[1, 2, 1, 2, 1, 1]), PercolationKind::Site, (7, 10)),
    ]
}

pub fn check_matching_counts() -> Result<CheckResult> {
    let mut bad = Vec::new();
    let mut detail = Vec::new();
    for s in matching_fixtures() {
        let got = oracle::enumerate_matchings(&s)?.len() as u128;
        let want = oracle::matching_count(s.total_degree());
        detail.push(format!("2M={} {got}", s.total_degree()));
        if got != want {
            bad.push(format!("{:?}: {got} != {want}", s.degrees()));
        }
    }
    Ok(CheckResult {
        name: "matching-count".into(),
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            detail.join(", ")
        } else {
            bad.join("; ")
        },
    })
}

/// Chi-square test of the sampler's matchings against the uniform law on
/// every fixture.
pub fn check_matching_uniformity<S: MatchingSampler + ?Sized>(
    sampler: &S,
    opts: &ValidationOptions,
) -> Result<CheckResult> {
    let mut passed = true;
    let mut detail = Vec::new();
    for (f, s) in matching_fixtures().into_iter().enumerate() {
        let all = oracle::enumerate_matchings(&s)?;
        if all.len() < 2 {
            continue;
        }
        let index: BTreeMap<&Matching, usize> =
            all.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let base = seed::derive(opts.seed, 100 + f as u64);
        let counts = (0..opts.matching_draws)
            .into_par_iter()
            .map(|t| -> Result<Vec<u64>> {
                let g = sampler.sample(&s, seed::derive(base, t as u64))?;
                let mut c = vec![0u64; all.len()];
                let idx = index.get(&g.canonical_matching()).copied();
                match idx {
                    Some(i) => c[i] += 1,
                    None => {
                        return Err(crate::Error::InvalidArgument(
                            "sampler produced an invalid matching".into(),
                        ))
                    }
                }
                Ok(c)
            })
            .try_reduce(
                || vec![0u64; all.len()],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    Ok(a)
                },
            )?;
        let test = chi_square_uniform(&counts);
        let ok = test.p_value >= UNIFORMITY_ALPHA;
        passed &= ok;
        detail.push(format!(
            "{:?} chi2={:.2} df={} p={:.4}",
            s.degrees(),
            test.statistic,
            test.degrees_of_freedom,
            test.p_value
        ));
    }
    Ok(CheckResult {
        name: "matching-uniformity".into(),
        passed,
        detail: detail.join("; "),
    })
}

/// Exact uniformity of the surviving point set given its size, every `k`.
pub fn check_survivor_sets() -> Result<CheckResult> {
    let mut cases = 0;
    let mut bad = Vec::new();
    for s in conditional_fixtures() {
        for p in [rational(1, 3), rational(1, 2)] {
            for k in 0..=s.edge_count() {
                let law = oracle::exact_survivor_set_law(&s, &p, k)?;
                cases += 1;
                if !law.is_uniform() {
                    bad.push(format!("{:?} p={p} k={k}", s.degrees()));
                }
            }
        }
    }
    Ok(CheckResult {
        name: "survivor-set-uniformity".into(),
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{cases} conditional laws exactly uniform")
        } else {
            format!("not uniform: {}", bad.join(", "))
        },
    })
}

/// Every induced degree sequence reachable from `seq`.
pub fn reachable_induced(seq: &DegreeSequence) -> Result<Vec<Vec<usize>>> {
    let owner: Vec<usize> = seq
        .degrees()
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat(v).take(d))
        .collect();
    let mut out = std::collections::BTreeSet::new();
    for m in oracle::enumerate_matchings(seq)? {
        for mask in 0u32..(1 << m.len()) {
            let mut deg = vec![0; seq.n()];
            for (i, &(a, b)) in m.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    deg[owner[a]] += 1;
                    deg[owner[b]] += 1;
                }
            }
            out.insert(deg);
        }
    }
    Ok(out.into_iter().collect())
}

/// Exact uniformity of the survivor matching given the induced degrees.
pub fn check_conditional_matchings() -> Result<CheckResult> {
    let mut cases = 0;
    let mut bad = Vec::new();
    let p = rational(2, 5);
    for s in conditional_fixtures() {
        for target in reachable_induced(&s)? {
            let law = oracle::exact_bond_conditional(&s, &p, &target)?;
            cases += 1;
            if !law.is_uniform() {
                bad.push(format!("{:?} -> {target:?}", s.degrees()));
            }
        }
    }
    Ok(CheckResult {
        name: "conditional-matching-uniformity".into(),
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{cases} induced sequences, all exactly uniform")
        } else {
            format!("not uniform: {}", bad.join(", "))
        },
    })
}

/// Empirical `|L1|` law from `samples` runs, indexed by size.
pub fn sampled_l1_law<S: MatchingSampler + ?Sized>(
    sampler: &S,
    s: &DegreeSequence,
    kind: PercolationKind,
    p: f64,
    samples: usize,
    base_seed: u64,
) -> Result<Vec<f64>> {
    let n = s.n();
    let counts = (0..samples)
        .into_par_iter()
        .map(|t| -> Result<Vec<u64>> {
            let ts = seed::derive(base_seed, t as u64);
            let g = sampler.sample(s, seed::derive(ts, 0))?;
            let out = percolate(&g, kind, p, seed::derive(ts, 1))?;
            let mut c = vec![0u64; n + 1];
            c[components(&out).l1_size] += 1;
            Ok(c)
        })
        .try_reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / samples as f64)
        .collect())
}

pub fn exact_l1_law_f64(
    s: &DegreeSequence,
    kind: PercolationKind,
    p: &BigRational,
) -> Result<Vec<f64>> {
    let law = oracle::exact_l1_distribution(s, p, kind)?;
    let mut v = vec![0.0; s.n() + 1];
    for (size, prob) in law {
        v[size] = oracle::to_f64(&prob);
    }
    Ok(v)
}

pub fn check_l1_laws<S: MatchingSampler + ?Sized>(
    sampler: &S,
    opts: &ValidationOptions,
) -> Result<CheckResult> {
    let mut passed = true;
    let mut detail = Vec::new();
    for (f, (s, kind, (num, den))) in l1_fixtures().into_iter().enumerate() {
        let exact = exact_l1_law_f64(&s, kind, &rational(num, den))?;
        let p = num as f64 / den as f64;
        let sampled = sampled_l1_law(
            sampler,
            &s,
            kind,
            p,
            opts.l1_samples,
            seed::derive(opts.seed, 200 + f as u64),
        )?;
        let tv = total_variation(&exact, &sampled);
        passed &= tv <= L1_TV_TOLERANCE;
        detail.push(format!("{:?} {kind} p={num}/{den} tv={tv:.5}", s.degrees()));
    }
    Ok(CheckResult {
        name: "l1-law".into(),
        passed,
        detail: detail.join("; "),
    })
}

/// Fraction of simple projections among `draws` matchings of a 3-regular
/// sequence on 1000 vertices, against `exp(-lambda/2 - lambda^2/4)`.
pub fn check_simplicity_rate<S: MatchingSampler + ?Sized>(
    sampler: &S,
    opts: &ValidationOptions,
) -> Result<CheckResult> {
    let s = DegreeSequence::regular(1000, 3)?;
    let base = seed::derive(opts.seed, 300);
    let simple = (0..opts.simplicity_draws)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let g = sampler.sample(&s, seed::derive(base, t as u64))?;
            Ok(simplicity(&g).is_simple() as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let frac = simple as f64 / opts.simplicity_draws as f64;
    let predicted = predicted_simple_prob(&s);
    Ok(CheckResult {
        name: "simplicity-rate".into(),
        passed: (frac - predicted).abs() <= SIMPLICITY_TOLERANCE,
        detail: format!(
            "simple fraction {frac:.4} vs predicted {predicted:.4} over {} draws",
            opts.simplicity_draws
        ),
    })
}

/// Runs every check with `sampler` as the matching source.
pub fn run_validation<S: MatchingSampler + ?Sized>(
    sampler: &S,
    opts: &ValidationOptions,
) -> Result<ValidationReport> {
    Ok(ValidationReport {
        checks: vec![
            check_matching_counts()?,
            check_matching_uniformity(sampler, opts)?,
            check_survivor_sets()?,
            check_conditional_matchings()?,
            check_l1_laws(sampler, opts)?,
            check_simplicity_rate(sampler, opts)?,
        ],
    })
}
