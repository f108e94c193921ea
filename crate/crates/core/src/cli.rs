//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 invalid configuration,
//! 3 divergent moments, 4 I/O failure, 5 threshold bracket not established.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{
    estimate_threshold, lambda_bond, lambda_site, powerlaw_threshold, q_prime, sweep,
    threshold_prediction,
};
use crate::config::ExperimentConfig;
use crate::configuration::{uniform_matching, uniform_simple_graph, write_edge_list, ShuffleSampler};
use crate::degrees::{from_distribution, sparse_degree_cap, DegreeDistribution, DistSpec};
use crate::error::Error;
use crate::percolation::PercolationKind;
use crate::validate::{run_validation, ValidationOptions};

#[derive(Debug, Parser)]
#[command(name = "percolab", version, about = "Percolation on configuration-model random graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form thresholds, moments and thinned distributions (JSON).
    Analytic(Overrides),
    /// Mean largest-component fraction over a grid of p (CSV, plus JSON with --out).
    Sweep(Overrides),
    /// Empirical threshold by bisection (JSON).
    Threshold(Overrides),
    /// Exact-oracle validation of the samplers.
    Validate(ValidateArgs),
    /// Dump one graph as an edge list.
    Generate(Overrides),
}

#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// regular:D | table:D=W,... | powerlaw:GAMMA[:MIN_DEGREE]
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Comma-separated probabilities.
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub simple_only: bool,
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long)]
    pub max_attempts: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fewer Monte Carlo samples (10^4 instead of 10^5 / 10^6).
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Divergent(String),
    Io(String),
    Bracket(String),
    ValidationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed => 1,
            CliError::Config(_) => 2,
            CliError::Divergent(_) => 3,
            CliError::Io(_) => 4,
            CliError::Bracket(_) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) => format!("invalid configuration: {m}"),
            CliError::Divergent(m) => format!("divergent moments: {m}"),
            CliError::Io(m) => format!("i/o error: {m}"),
            CliError::Bracket(m) => format!("threshold bracket not established: {m}"),
            CliError::ValidationFailed => "validation failed".into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DivergentMoment { .. } => CliError::Divergent(e.to_string()),
            Error::NoBracket(trace) => CliError::Bracket(trace),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Overrides {
    /// Loads the config file (if any) and applies the flags on top.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(d) = &self.dist {
            c.dist = Some(d.parse::<DistSpec>()?);
        }
        if let Some(n) = self.n {
            c.n = n;
        }
        if let Some(k) = &self.kind {
            c.kind = k.parse::<PercolationKind>()?;
        }
        if self.p.is_some() {
            c.p = self.p;
        }
        if let Some(g) = &self.p_grid {
            c.p_grid = g.clone();
        }
        if let Some(t) = self.trials {
            c.trials = t;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(e) = self.epsilon {
            c.epsilon = e;
        }
        if let Some(t) = self.tolerance {
            c.tolerance = t;
        }
        if self.simple_only {
            c.simple_only = true;
        }
        if self.max_degree.is_some() {
            c.max_degree = self.max_degree;
        }
        if let Some(a) = self.max_attempts {
            c.max_attempts = a;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        Ok(c)
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::Io(e.to_string()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn cmd_analytic(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = cfg.dist()?;
    let dist = spec.to_distribution()?;
    let g = dist.generating_derivatives()?;
    let mut report = json!({
        "config_hash": cfg.hash(),
        "distribution": spec,
        "l1": g.first,
        "l2": g.second,
        "q": g.q(),
        "offspring_mean": dist.offspring_mean().ok(),
    });

    let mut warnings: Vec<String> = Vec::new();
    let prediction = match (
        threshold_prediction(&dist, PercolationKind::Bond),
        threshold_prediction(&dist, PercolationKind::Site),
    ) {
        (Ok(bond), Ok(site)) => Some((bond, site)),
        (Err(e), _) | (_, Err(e)) => {
            warnings.push(e.to_string());
            None
        }
    };
    report["p_hat"] = json!(prediction.as_ref().map(|(b, _)| b.p_hat));
    report["bisection_root"] = json!(prediction
        .as_ref()
        .map(|(b, s)| json!({"bond": b.bisection_root, "site": s.bisection_root})));

    let p = cfg
        .p
        .or_else(|| prediction.as_ref().map(|(b, _)| b.p_hat))
        .unwrap_or(0.5);
    report["p"] = json!(p);
    report["q_prime"] = json!({
        "bond": q_prime(&dist, p, PercolationKind::Bond)?,
        "site": q_prime(&dist, p, PercolationKind::Site)?,
    });

    match &dist {
        DegreeDistribution::Finite(_) => {
            let bond = lambda_bond(&dist, p)?;
            let site = lambda_site(&dist, p)?;
            report["lambda_bond"] = json!(bond.finite_weights());
            report["lambda_site"] = json!(site.weights);
            report["site_deficit"] = json!(site.deficit);
        }
        DegreeDistribution::PowerLaw(spec_pl) => {
            let t = powerlaw_threshold(spec_pl.gamma())?;
            let cap = cfg.max_degree.unwrap_or_else(|| sparse_degree_cap(cfg.n));
            let kept: f64 = (0..=cap).map(|k| dist.weight(k)).sum();
            if !t.valid {
                warnings.push(format!(
                    "gamma = {} lies outside (3, gamma0 = {:.6}); the zeta ratio is not a threshold",
                    t.gamma, t.gamma0
                ));
            }
            warnings.push(format!(
                "at n = {} the degree cap floor(n^(1/9)) = {cap} keeps mass {kept:.6} of the power law; simulations see the truncated distribution",
                cfg.n
            ));
            report["power_law"] = json!({
                "zeta_ratio": t.zeta_ratio,
                "truncated_ratio": t.truncated_ratio,
                "gamma0": t.gamma0,
                "valid": t.valid,
                "n": cfg.n,
                "degree_cap": cap,
                "mass_below_cap": kept,
            });
        }
    }
    report["warnings"] = json!(warnings);
    emit(out, &to_json(&report))
}

pub fn cmd_sweep(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    if cfg.p_grid.is_empty() {
        return Err(CliError::Config("sweep needs a non-empty p_grid".into()));
    }
    let exp = cfg.experiment()?;
    let result = sweep(&exp, &cfg.p_grid)?;
    let mut csv_bytes = Vec::new();
    result
        .write_csv(&mut csv_bytes)
        .map_err(|e| CliError::Io(e.to_string()))?;
    match &cfg.out {
        Some(dir) => {
            ensure_dir(dir)?;
            write_file(&dir.join("sweep.csv"), &csv_bytes)?;
            let doc = json!({
                "config_hash": cfg.hash(),
                "config": cfg.canonical(),
                "result": result,
            });
            write_file(&dir.join("sweep.json"), to_json(&doc).as_bytes())?;
            emit(
                out,
                &format!("wrote {} and {}", dir.join("sweep.csv").display(), dir.join("sweep.json").display()),
            )
        }
        None => out
            .write_all(&csv_bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

pub fn cmd_threshold(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let exp = cfg.experiment()?;
    let estimate = estimate_threshold(&exp, cfg.epsilon, cfg.tolerance)?;
    let analytic = cfg
        .dist()?
        .to_distribution()
        .and_then(|d| threshold_prediction(&d, cfg.kind))
        .map(|t| t.p_hat)
        .ok();
    let doc = json!({
        "config_hash": cfg.hash(),
        "kind": cfg.kind,
        "n": cfg.n,
        "seed": cfg.seed,
        "estimate": estimate.estimate,
        "bracket": estimate.bracket,
        "analytic_p_hat": analytic,
        "epsilon": estimate.epsilon,
        "tolerance": estimate.tolerance,
        "trace": estimate.trace,
    });
    let text = to_json(&doc);
    if let Some(dir) = &cfg.out {
        ensure_dir(dir)?;
        write_file(&dir.join("threshold.json"), text.as_bytes())?;
    }
    emit(out, &text)
}

pub fn cmd_generate(cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = cfg.dist()?;
    let dist = spec.to_distribution()?;
    let cap = cfg.max_degree.unwrap_or_else(|| spec.default_cap(cfg.n));
    let realization = from_distribution(&dist, cfg.n, cap)?;
    for w in &realization.warnings {
        eprintln!("warning: {w}");
    }
    let graph = if cfg.simple_only {
        uniform_simple_graph(&realization.sequence, cfg.seed, cfg.max_attempts)?.graph
    } else {
        uniform_matching(&realization.sequence, cfg.seed)?
    };
    match &cfg.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
            let mut w = std::io::BufWriter::new(file);
            write_edge_list(&graph, &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| io_err(path, e))
        }
        None => write_edge_list(&graph, out).map_err(|e| CliError::Io(e.to_string())),
    }
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = if args.quick {
        ValidationOptions {
            seed: args.seed,
            matching_draws: 10_000,
            l1_samples: 10_000,
            simplicity_draws: 2_000,
        }
    } else {
        ValidationOptions {
            seed: args.seed,
            ..Default::default()
        }
    };
    let report = run_validation(&ShuffleSampler, &opts)?;
    let mut text = report.render();
    text.push_str(&format!(
        "seed {} draws {}/{}/{}",
        opts.seed, opts.matching_draws, opts.l1_samples, opts.simplicity_draws
    ));
    emit(out, &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::ValidationFailed)
    }
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Analytic(o) => cmd_analytic(&o.resolve()?, out),
        Command::Sweep(o) => cmd_sweep(&o.resolve()?, out),
        Command::Threshold(o) => cmd_threshold(&o.resolve()?, out),
        Command::Generate(o) => cmd_generate(&o.resolve()?, out),
        Command::Validate(v) => cmd_validate(v, out),
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code. Errors go to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
