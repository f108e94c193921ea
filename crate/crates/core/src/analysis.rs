//! Closed-form percolation predictions and the Monte Carlo estimators that
//! are checked against them.
//!
//! For a limiting distribution `lambda` with `L'(1)` and `L''(1)` finite:
//!
//! * bond percolation thins every degree binomially,
//!   `lambda_i^bond = sum_{d >= i} lambda_d C(d,i) p^i (1-p)^{d-i}`;
//! * site percolation scales that by the retention probability,
//!   `lambda_d^site = p lambda_d^bond`, the missing mass `1 - p` being the
//!   deleted vertices;
//! * the thinned Molloy–Reed sums are `Q'_bond(p) = p (p L''(1) - L'(1))` and
//!   `Q'_site(p) = p Q'_bond(p)`, so both kinds change sign at
//!   `p_c = L'(1) / L''(1)`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::components::components;
use crate::configuration::{uniform_matching, uniform_simple_graph, DEFAULT_MAX_ATTEMPTS};
use crate::degrees::{
    from_distribution, DegreeDistribution, DegreeSequence, DistSpec, GeneratingDerivatives,
    Realization,
};
use crate::error::{Error, Result};
use crate::percolation::{percolate, PercolationKind};
use crate::seed;
use crate::stats::mean_sd;
use crate::zeta;

/// Root-finding tolerance for thresholds.
pub const ROOT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_EPSILON: f64 = 0.02;
pub const DEFAULT_TRIALS: usize = 20;

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

fn binomial_pmf(d: usize, i: usize, p: f64) -> f64 {
    if i > d {
        return 0.0;
    }
    let k = i.min(d - i);
    let mut coeff = 1.0;
    for j in 0..k {
        coeff = coeff * (d - j) as f64 / (j + 1) as f64;
    }
    coeff * p.powi(i as i32) * (1.0 - p).powi((d - i) as i32)
}

/// Binomially thinned distribution `lambda^bond`. Needs finite support.
pub fn lambda_bond(dist: &DegreeDistribution, p: f64) -> Result<DegreeDistribution> {
    check_probability(p)?;
    let weights = dist.finite_weights().ok_or(Error::InfiniteSupport)?;
    let thinned = (0..weights.len())
        .map(|i| {
            weights
                .iter()
                .enumerate()
                .skip(i)
                .map(|(d, &w)| w * binomial_pmf(d, i, p))
                .sum()
        })
        .collect();
    Ok(DegreeDistribution::Finite(thinned))
}

/// Per-degree site limits `lambda_d^site = p lambda_d^bond` and the deleted
/// mass `1 - p` that is not part of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteThinning {
    pub weights: Vec<f64>,
    pub deficit: f64,
}

impl SiteThinning {
    /// Full distribution of induced degrees, deleted vertices counted at degree 0.
    pub fn with_deleted_mass(&self) -> Vec<f64> {
        let mut w = self.weights.clone();
        if let Some(first) = w.first_mut() {
            *first += self.deficit;
        }
        w
    }
}

pub fn lambda_site(dist: &DegreeDistribution, p: f64) -> Result<SiteThinning> {
    let bond = lambda_bond(dist, p)?;
    let weights = bond
        .finite_weights()
        .expect("finite")
        .iter()
        .map(|w| p * w)
        .collect();
    Ok(SiteThinning {
        weights,
        deficit: 1.0 - p,
    })
}

/// Thinned per-degree weights for either kind (site without the deleted mass).
pub fn thinned_weights(dist: &DegreeDistribution, p: f64, kind: PercolationKind) -> Result<Vec<f64>> {
    match kind {
        PercolationKind::Bond => Ok(lambda_bond(dist, p)?
            .finite_weights()
            .expect("finite")
            .to_vec()),
        PercolationKind::Site => Ok(lambda_site(dist, p)?.weights),
    }
}

/// `Q'(p)` in closed form: `p (p L''(1) - L'(1))` for bond, `p` times that
/// for site.
pub fn q_prime(dist: &DegreeDistribution, p: f64, kind: PercolationKind) -> Result<f64> {
    check_probability(p)?;
    let g = dist.generating_derivatives()?;
    Ok(q_prime_from(&g, p, kind))
}

fn q_prime_from(g: &GeneratingDerivatives, p: f64, kind: PercolationKind) -> f64 {
    let bond = p * (p * g.second - g.first);
    match kind {
        PercolationKind::Bond => bond,
        PercolationKind::Site => p * bond,
    }
}

/// `Q'(p) = sum_i i(i-2) lambda_i'` summed directly over the thinned weights.
pub fn q_prime_by_summation(
    dist: &DegreeDistribution,
    p: f64,
    kind: PercolationKind,
) -> Result<f64> {
    let weights = thinned_weights(dist, p, kind)?;
    Ok(weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let i = i as f64;
            i * (i - 2.0) * w
        })
        .sum())
}

/// Bisection for a sign change of `f` on `[lo, hi]`; `f(lo)` and `f(hi)` must
/// have opposite strict signs.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tolerance: f64) -> Option<f64> {
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo * f_hi < 0.0) {
        return None;
    }
    let lo_negative = f_lo < 0.0;
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return Some(mid);
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `L'(1) / L''(1)`, the same for both kinds.
pub fn critical_probability(dist: &DegreeDistribution, _kind: PercolationKind) -> Result<f64> {
    let g = dist.generating_derivatives()?;
    check_transition(&g)?;
    Ok(g.first / g.second)
}

fn check_transition(g: &GeneratingDerivatives) -> Result<()> {
    if g.first <= 0.0 {
        return Err(Error::ZeroFirstMoment);
    }
    if g.second <= g.first {
        return Err(Error::NoTransition {
            l1: g.first,
            l2: g.second,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdPrediction {
    pub kind: PercolationKind,
    pub p_hat: f64,
    pub l1: f64,
    pub l2: f64,
    /// Positive root of `Q'` located by bisection, independent of the ratio.
    pub bisection_root: f64,
}

impl ThresholdPrediction {
    pub fn q_function(&self, p: f64) -> f64 {
        let g = GeneratingDerivatives {
            first: self.l1,
            second: self.l2,
        };
        q_prime_from(&g, p, self.kind)
    }
}

pub fn threshold_prediction(
    dist: &DegreeDistribution,
    kind: PercolationKind,
) -> Result<ThresholdPrediction> {
    let g = dist.generating_derivatives()?;
    check_transition(&g)?;
    let p_hat = g.first / g.second;
    // Q' < 0 just above 0 and Q'(1) = L''(1) - L'(1) > 0
    let lo = (p_hat * 1e-3).min(1e-6);
    let bisection_root = bisect(|p| q_prime_from(&g, p, kind), lo, 1.0, ROOT_TOLERANCE)
        .ok_or_else(|| Error::NoBracket("Q' has no sign change on (0, 1]".into()))?;
    Ok(ThresholdPrediction {
        kind,
        p_hat,
        l1: g.first,
        l2: g.second,
        bisection_root,
    })
}

/// `g(gamma) = zeta(gamma - 2) - 2 zeta(gamma - 1)`; positive exactly where the
/// zeta-form threshold lies in `(0, 1)`.
pub fn gamma0_criterion(gamma: f64) -> Option<f64> {
    Some(zeta::zeta(gamma - 2.0)? - 2.0 * zeta::zeta(gamma - 1.0)?)
}

/// Bracket on which `gamma0` is located.
pub const GAMMA0_BRACKET: (f64, f64) = (3.2, 3.6);
pub const GAMMA0_TOLERANCE: f64 = 1e-6;

/// `gamma0 = sup { gamma > 3 : zeta(gamma-2) / zeta(gamma-1) > 2 }`.
pub fn gamma0() -> Result<f64> {
    let (lo, hi) = GAMMA0_BRACKET;
    bisect(
        |g| gamma0_criterion(g).unwrap_or(f64::NAN),
        lo,
        hi,
        GAMMA0_TOLERANCE,
    )
    .ok_or_else(|| Error::NoBracket(format!("g changes no sign on [{lo}, {hi}]")))
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerLawThreshold {
    pub gamma: f64,
    /// `zeta(gamma-1) / (zeta(gamma-2) - zeta(gamma-1))`.
    pub zeta_ratio: f64,
    /// Same ratio with the sums restricted to `k >= 2`:
    /// `(zeta(gamma-1) - 1) / (zeta(gamma-2) - zeta(gamma-1))`.
    pub truncated_ratio: f64,
    pub gamma0: f64,
    /// `3 < gamma < gamma0`.
    pub valid: bool,
}

/// Power-law thresholds for exponent `gamma`. Diverges for `gamma <= 3`;
/// outside `(3, gamma0)` the ratios are still reported with `valid = false`.
pub fn powerlaw_threshold(gamma: f64) -> Result<PowerLawThreshold> {
    let z1 = zeta::zeta(gamma - 1.0).ok_or(Error::DivergentMoment { moment: 1, gamma })?;
    let z2 = zeta::zeta(gamma - 2.0).ok_or(Error::DivergentMoment { moment: 2, gamma })?;
    let gamma0 = gamma0()?;
    Ok(PowerLawThreshold {
        gamma,
        zeta_ratio: z1 / (z2 - z1),
        truncated_ratio: (z1 - 1.0) / (z2 - z1),
        gamma0,
        valid: gamma > 3.0 && gamma < gamma0,
    })
}

/// Shared parameters of the Monte Carlo drivers.
#[derive(Debug, Clone, Serialize)]
pub struct Experiment {
    pub dist: DistSpec,
    pub n: usize,
    pub kind: PercolationKind,
    pub trials: usize,
    pub base_seed: u64,
    /// Condition every graph on being simple.
    pub simple_only: bool,
    /// Maximum realized degree; `None` uses [`DistSpec::default_cap`].
    pub max_degree_cap: Option<usize>,
    pub max_attempts: usize,
}

impl Experiment {
    pub fn new(dist: DistSpec, n: usize, kind: PercolationKind) -> Self {
        Self {
            dist,
            n,
            kind,
            trials: DEFAULT_TRIALS,
            base_seed: 0,
            simple_only: false,
            max_degree_cap: None,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn simple_only(mut self, yes: bool) -> Self {
        self.simple_only = yes;
        self
    }

    pub fn cap(&self) -> usize {
        self.max_degree_cap
            .unwrap_or_else(|| self.dist.default_cap(self.n))
    }

    pub fn realize(&self) -> Result<Realization> {
        let dist = self.dist.to_distribution()?;
        from_distribution(&dist, self.n, self.cap())
    }

    fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::InvalidArgument(format!("n = {} < 10", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        Ok(())
    }

    /// Seed of trial `trial` at grid point or probe `point`.
    pub fn trial_seed(&self, point: u64, trial: u64) -> u64 {
        seed::derive(seed::derive(self.base_seed, point), trial)
    }
}

/// One graph + percolation run.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub l1_fraction: Option<f64>,
    pub l2_fraction: Option<f64>,
    /// Matchings drawn to obtain the graph.
    pub attempts: usize,
    pub error: Option<String>,
}

/// Generates a fresh graph from `trial_seed`, percolates it and measures
/// components. The graph uses stream 0 of the seed and percolation stream 1,
/// so bond and site runs with the same seed see the same graph.
pub fn run_trial(
    seq: &DegreeSequence,
    kind: PercolationKind,
    p: f64,
    trial: usize,
    trial_seed: u64,
    simple_only: bool,
    max_attempts: usize,
) -> TrialRecord {
    let graph_seed = seed::derive(trial_seed, 0);
    let graph = if simple_only {
        uniform_simple_graph(seq, graph_seed, max_attempts).map(|s| (s.graph, s.attempts))
    } else {
        uniform_matching(seq, graph_seed).map(|g| (g, 1))
    };
    let result = graph.and_then(|(g, attempts)| {
        let outcome = percolate(&g, kind, p, seed::derive(trial_seed, 1))?;
        Ok((components(&outcome), attempts))
    });
    match result {
        Ok((summary, attempts)) => TrialRecord {
            trial,
            seed: trial_seed,
            l1_fraction: Some(summary.fraction),
            l2_fraction: Some(summary.l2_fraction()),
            attempts,
            error: None,
        },
        Err(e) => TrialRecord {
            trial,
            seed: trial_seed,
            l1_fraction: None,
            l2_fraction: None,
            attempts: match e {
                Error::AttemptsExhausted { attempts, .. } => attempts,
                _ => 0,
            },
            error: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub p: f64,
    pub trials: usize,
    pub failures: usize,
    pub mean_l1_frac: f64,
    pub sd_l1_frac: f64,
    pub mean_l2_frac: f64,
    pub records: Vec<TrialRecord>,
}

impl SweepPoint {
    fn from_records(p: f64, records: Vec<TrialRecord>) -> Self {
        let l1: Vec<f64> = records.iter().filter_map(|r| r.l1_fraction).collect();
        let l2: Vec<f64> = records.iter().filter_map(|r| r.l2_fraction).collect();
        let (mean_l1_frac, sd_l1_frac) = mean_sd(&l1);
        let (mean_l2_frac, _) = mean_sd(&l2);
        Self {
            p,
            trials: records.len(),
            failures: records.len() - l1.len(),
            mean_l1_frac,
            sd_l1_frac,
            mean_l2_frac,
            records,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepMetadata {
    pub n: usize,
    pub kind: PercolationKind,
    pub seed: u64,
    pub trials: usize,
    pub simple_only: bool,
    pub distribution: DistSpec,
    pub max_degree: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub metadata: SweepMetadata,
    pub points: Vec<SweepPoint>,
}

#[derive(Serialize)]
struct CsvRow {
    p: f64,
    trials: usize,
    mean_l1_frac: f64,
    sd_l1_frac: f64,
    mean_l2_frac: f64,
}

impl SweepResult {
    /// Columns `p, trials, mean_l1_frac, sd_l1_frac, mean_l2_frac`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for pt in &self.points {
            w.serialize(CsvRow {
                p: pt.p,
                trials: pt.trials,
                mean_l1_frac: pt.mean_l1_frac,
                sd_l1_frac: pt.sd_l1_frac,
                mean_l2_frac: pt.mean_l2_frac,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

fn run_point(exp: &Experiment, seq: &DegreeSequence, point: u64, p: f64) -> Vec<TrialRecord> {
    (0..exp.trials)
        .into_par_iter()
        .map(|t| {
            run_trial(
                seq,
                exp.kind,
                p,
                t,
                exp.trial_seed(point, t as u64),
                exp.simple_only,
                exp.max_attempts,
            )
        })
        .collect()
}

/// Mean `|L1|/n` over fresh graphs at every `p` of the grid. Grid point `j`,
/// trial `t` uses seed `derive(derive(base_seed, j), t)`.
pub fn sweep(exp: &Experiment, p_grid: &[f64]) -> Result<SweepResult> {
    exp.validate()?;
    for &p in p_grid {
        check_probability(p)?;
    }
    let realization = exp.realize()?;
    let seq = &realization.sequence;
    let points = p_grid
        .iter()
        .enumerate()
        .map(|(j, &p)| SweepPoint::from_records(p, run_point(exp, seq, j as u64, p)))
        .collect();
    Ok(SweepResult {
        metadata: SweepMetadata {
            n: exp.n,
            kind: exp.kind,
            seed: exp.base_seed,
            trials: exp.trials,
            simple_only: exp.simple_only,
            distribution: exp.dist.clone(),
            max_degree: seq.max_degree(),
            warnings: realization.warnings.clone(),
        },
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Probe {
    pub index: usize,
    pub p: f64,
    pub mean_fraction: f64,
    pub failures: usize,
    pub supercritical: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdEstimate {
    pub estimate: f64,
    pub bracket: (f64, f64),
    pub epsilon: f64,
    pub tolerance: f64,
    pub trace: Vec<Probe>,
}

/// Bisection on `p` for the empirical threshold: `p` counts as supercritical
/// when the mean `|L1|/n` over `trials` fresh graphs exceeds `epsilon`. Probe
/// `j` uses the seeds of grid point `j`. Returns the midpoint of the final
/// bracket once it is narrower than `tolerance`.
pub fn estimate_threshold(
    exp: &Experiment,
    epsilon: f64,
    tolerance: f64,
) -> Result<ThresholdEstimate> {
    exp.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} not in (0,1)")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tolerance} not positive")));
    }
    let realization = exp.realize()?;
    let seq = &realization.sequence;
    let mut trace: Vec<Probe> = Vec::new();
    let probe = |p: f64, trace: &mut Vec<Probe>| -> bool {
        let index = trace.len();
        let pt = SweepPoint::from_records(p, run_point(exp, seq, index as u64, p));
        let supercritical = pt.mean_l1_frac > epsilon;
        trace.push(Probe {
            index,
            p,
            mean_fraction: pt.mean_l1_frac,
            failures: pt.failures,
            supercritical,
        });
        supercritical
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let lo_super = probe(lo, &mut trace);
    let hi_super = probe(hi, &mut trace);
    if lo_super || !hi_super {
        return Err(Error::NoBracket(
            serde_json::to_string(&trace).unwrap_or_default(),
        ));
    }
    while hi - lo >= tolerance {
        let mid = 0.5 * (lo + hi);
        if probe(mid, &mut trace) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdEstimate {
        estimate: 0.5 * (lo + hi),
        bracket: (lo, hi),
        epsilon,
        tolerance,
        trace,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeLawRow {
    pub degree: usize,
    pub empirical: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeLawReport {
    pub kind: PercolationKind,
    pub p: f64,
    pub trials: usize,
    pub rows: Vec<DegreeLawRow>,
    /// Over all degrees, deleted site vertices counted at degree 0.
    pub max_deviation: f64,
    /// Over degrees `>= 1` only.
    pub max_deviation_positive: f64,
}

/// Mean `D_i'/n` over fresh graphs against the thinned limits of the
/// distribution restricted to the realized cap.
pub fn empirical_vs_analytic(exp: &Experiment, p: f64) -> Result<DegreeLawReport> {
    exp.validate()?;
    check_probability(p)?;
    let realization = exp.realize()?;
    let seq = &realization.sequence;
    let (target, _) = exp.dist.to_distribution()?.truncated(exp.cap())?;
    let predicted = match exp.kind {
        PercolationKind::Bond => thinned_weights(&target, p, exp.kind)?,
        PercolationKind::Site => lambda_site(&target, p)?.with_deleted_mass(),
    };

    let per_trial: Vec<Result<Vec<usize>>> = (0..exp.trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = exp.trial_seed(0, t as u64);
            let graph_seed = seed::derive(trial_seed, 0);
            let graph = if exp.simple_only {
                uniform_simple_graph(seq, graph_seed, exp.max_attempts)?.graph
            } else {
                uniform_matching(seq, graph_seed)?
            };
            let out = percolate(&graph, exp.kind, p, seed::derive(trial_seed, 1))?;
            Ok(out.induced.counts().to_vec())
        })
        .collect();

    let width = predicted.len().max(seq.max_degree() + 1);
    let mut sums = vec![0.0; width];
    for counts in per_trial {
        for (i, c) in counts?.into_iter().enumerate() {
            sums[i] += c as f64 / exp.n as f64;
        }
    }
    let rows: Vec<DegreeLawRow> = (0..width)
        .map(|i| DegreeLawRow {
            degree: i,
            empirical: sums[i] / exp.trials as f64,
            predicted: predicted.get(i).copied().unwrap_or(0.0),
        })
        .collect();
    let dev = |r: &DegreeLawRow| (r.empirical - r.predicted).abs();
    let max_deviation = rows.iter().map(dev).fold(0.0, f64::max);
    let max_deviation_positive = rows.iter().skip(1).map(dev).fold(0.0, f64::max);
    Ok(DegreeLawReport {
        kind: exp.kind,
        p,
        trials: exp.trials,
        rows,
        max_deviation,
        max_deviation_positive,
    })
}
