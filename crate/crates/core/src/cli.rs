//! The `tbdlab` command line: bound evaluation, verification suites,
//! process simulation and experiments.
//!
//! Parameters come from flags or from a JSON file given with `--config`
//! whose keys are the flag names in snake case; flags win. Exit status is 0
//! on success, 1 when a verification suite fails and 2 on configuration
//! errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::bounds::{
    bdi_bound, janson_zero_bound, tbdi_bernoulli_bound, tbdi_bound, truncation_bound, BernoulliOptions, LipschitzProfile,
    TbdiOptions,
};
use crate::exactcheck::{run_martingale_suite, run_product_space_suite, GeneratorConfig};
use crate::graphs::{GraphError, PatternGraph};
use crate::harness::{
    bennett_dominance, bernstein_tightness, coupling_experiment, formulation_equivalence, lipschitz_sweep, plotdata,
    reverse_process_experiment, to_json, triangle_experiment, write_atomic, write_csv, CouplingConfig, CsvRow, Envelope,
    HarnessError, LipschitzConfig, Report, ReverseConfig, TriangleConfig,
};
use crate::processes::{self, rle, ProcessConfig, Variant};

/// Largest `n` for the removal formulation unless `--allow-large` is given.
pub const REMOVAL_CAP: usize = 64;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Failed(String),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "tbdlab", version, about = "Typical bounded differences: bounds, exact checks and random graph processes")]
pub struct Cli {
    /// Worker threads [default: available cores]
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
    /// JSON file of parameters; keys are flag names, flags override them
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Result file, repeatable; format from the extension: .json, .csv, or .dat/.txt for plot data
    #[arg(long, global = true)]
    pub output: Vec<PathBuf>,
    /// Print the JSON document to stdout instead of a summary
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a tail bound
    Bound(BoundArgs),
    /// Run a verification suite
    Verify(VerifyArgs),
    /// Run a random graph process
    Simulate(SimulateArgs),
    /// Run an experiment
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Mean final edges of the reverse process over a grid of n, fitted on log-log scale when there are at least three points
    Reverse(ReverseArgs),
    /// Triangle counts in G(n,p) against the three bounds
    Triangle(TriangleArgs),
    /// Truncated versus full reverse process on shared edge orders
    Coupling(CouplingArgs),
    /// Effect of one swapped or replaced edge on the final edge count
    Lipschitz(LipschitzArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    Bdi,
    Tbdi,
    Bernstein,
    Bennett,
    Truncation,
    Janson,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundArgs {
    /// Which bound [default: tbdi]
    #[arg(long, value_enum)]
    pub formula: Option<Formula>,
    /// Typical Lipschitz constants, comma separated; a single value is broadcast
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub c: Vec<f64>,
    /// Worst-case constants [default: c]
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub d: Vec<f64>,
    /// Compensation factors [default: 1]
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub gamma: Vec<f64>,
    /// Success probabilities for the Bernoulli forms
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub p: Vec<f64>,
    /// Smallest outcome weights for the two-sided form
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub q: Vec<f64>,
    /// Repeat the coordinate lists this many times [default: 1]
    #[arg(long)]
    pub repeat: Option<usize>,
    /// Deviation
    #[arg(long)]
    pub t: Option<f64>,
    /// Probability of leaving the good event
    #[arg(long)]
    pub gamma_fail: Option<f64>,
    /// Two-valued coordinates (factor 4) [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub two_valued: Option<bool>,
    /// Two-sided error terms, needs --q [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub two_sided: Option<bool>,
    /// Asymmetric Bernoulli variance [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub asymmetric: Option<bool>,
    /// Probability of the bad event, for monotone functions
    #[arg(long)]
    pub monotone_bad_prob: Option<f64>,
    /// Range of f, for the truncation shift
    #[arg(long)]
    pub s: Option<f64>,
    /// Truncation without shift [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub monotone: Option<bool>,
    /// Janson: mean
    #[arg(long)]
    pub mu: Option<f64>,
    /// Janson: overlap term
    #[arg(long)]
    pub janson_delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ProductSpaces,
    Martingales,
    Bernstein,
    Bennett,
    Equivalence,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Suite to run
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Instances, samples or runs [defaults: product-spaces 1000, martingales 200, bennett 10000, equivalence 10000]
    #[arg(long)]
    pub instances: Option<u64>,
    /// Master seed [default: 2024]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    /// reverse-addition, reverse-removal, birth-time, forward-hfree or h-removal [default: reverse-addition]
    #[arg(long)]
    pub variant: Option<String>,
    /// Vertices
    #[arg(long)]
    pub n: Option<usize>,
    /// Built-in name or edge-list file; repeat for a family [default: K3]
    #[arg(long)]
    #[serde(default)]
    pub pattern: Vec<String>,
    /// Stop after this many traversed edges
    #[arg(long)]
    pub m_cap: Option<usize>,
    /// Truncate at n^(2-1/m2) (ln n)^2 [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub default_truncation: Option<bool>,
    /// Birth-time cutoff
    #[arg(long)]
    pub p_cap: Option<f64>,
    /// Master seed [default: 2024]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of replications [default: 1]
    #[arg(long)]
    pub replications: Option<u64>,
    /// Append the accepted bits of every replication, run-length encoded, to this file
    #[arg(long)]
    pub dump_accepted: Option<PathBuf>,
    /// Lift the size cap on the removal formulations [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub allow_large: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReverseArgs {
    /// Built-in name or edge-list file; repeat for a family [default: K3]
    #[arg(long)]
    #[serde(default)]
    pub pattern: Vec<String>,
    /// Comma-separated vertex counts [default: 64,128,256,512]
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub grid: Vec<usize>,
    /// Replications per grid point [default: 300]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed [default: 2024]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Traverse every pair instead of truncating [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub untruncated: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleArgs {
    /// Vertices [default: 200]
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability [default: n^(-p_exponent)]
    #[arg(long)]
    pub p: Option<f64>,
    /// Sets p = n^(-p_exponent) when --p is absent [default: 1/3]
    #[arg(long)]
    pub p_exponent: Option<f64>,
    /// Exponent in Delta = max(2np^2, n^eps) [default: 0.1]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Relative deviation [default: 0.5]
    #[arg(long)]
    pub t_rel: Option<f64>,
    /// Samples [default: 2000]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed [default: 2024]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingArgs {
    /// Built-in name or edge-list file; repeat for a family [default: K3]
    #[arg(long)]
    #[serde(default)]
    pub pattern: Vec<String>,
    /// Vertices [default: 100]
    #[arg(long)]
    pub n: Option<usize>,
    /// Paired runs [default: 1000]
    #[arg(long)]
    pub trials: Option<u64>,
    /// Truncation point [default: n^(2-1/m2) (ln n)^2]
    #[arg(long)]
    pub m: Option<usize>,
    /// Master seed [default: 2024]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzArgs {
    /// Built-in name or edge-list file [default: K3]
    #[arg(long)]
    pub pattern: Option<String>,
    /// Vertices [default: 60]
    #[arg(long)]
    pub n: Option<usize>,
    /// Truncation point [default: n^(2-1/m2) (ln n)^2]
    #[arg(long)]
    pub m: Option<usize>,
    /// Perturbations [default: 1000]
    #[arg(long)]
    pub sweeps: Option<u64>,
    /// Master seed [default: 2024]
    #[arg(long)]
    pub seed: Option<u64>,
}

const DEFAULT_SEED: u64 = 2024;

/// Global settings that may also come from the config file.
#[derive(Debug, Default, Deserialize)]
struct Globals {
    parallelism: Option<usize>,
    #[serde(default)]
    output: Vec<PathBuf>,
}

/// Overlays the set flags of `flags` onto the config-file object.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<Map<String, Value>>) -> Result<T, CliError> {
    let mut merged = file.unwrap_or_default();
    if let Value::Object(set) = serde_json::to_value(flags).map_err(config_err)? {
        for (k, v) in set {
            let unset = v.is_null() || v.as_array().is_some_and(|a| a.is_empty());
            if !unset {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(config_err)
}

fn read_config(path: &Path) -> Result<(Globals, Map<String, Value>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(config_err(format!("{}: expected a JSON object", path.display())));
    };
    let mut globals = Map::new();
    for key in ["parallelism", "output"] {
        if let Some(v) = map.remove(key) {
            globals.insert(key.to_string(), v);
        }
    }
    let globals: Globals = serde_json::from_value(Value::Object(globals)).map_err(config_err)?;
    Ok((globals, map))
}

/// Resolves a built-in name or an edge-list file.
pub fn resolve_pattern(spec: &str) -> Result<PatternGraph, CliError> {
    match PatternGraph::named(spec) {
        Ok(p) => Ok(p),
        Err(GraphError::UnknownPattern(_)) => {
            let path = Path::new(spec);
            if !path.exists() {
                return Err(config_err(format!(
                    "unknown pattern {spec:?}: not a built-in name ({}) and no such file",
                    PatternGraph::NAMES.join(", ")
                )));
            }
            let text = fs::read_to_string(path).map_err(|e| config_err(format!("{spec}: {e}")))?;
            let mut p = PatternGraph::parse(&text).map_err(|e| config_err(format!("{spec}: {e}")))?;
            if p.name().is_none() {
                p = PatternGraph::new(p.v(), p.edges()).map_err(config_err)?;
            }
            Ok(p)
        }
        Err(e) => Err(config_err(e)),
    }
}

fn resolve_patterns(specs: &[String]) -> Result<Vec<PatternGraph>, CliError> {
    if specs.is_empty() {
        return Ok(vec![PatternGraph::named("K3").expect("built-in")]);
    }
    specs.iter().map(|s| resolve_pattern(s)).collect()
}

enum Format {
    Json,
    Csv,
    Plot,
}

fn format_of(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("csv") => Format::Csv,
        Some("dat" | "txt" | "plot") => Format::Plot,
        _ => Format::Json,
    }
}

struct Emitter {
    outputs: Vec<PathBuf>,
    json: bool,
}

impl Emitter {
    fn emit<C: Serialize, R: Report>(&self, config: &C, report: &R, summary: &str) -> Result<(), CliError> {
        let doc = to_json(&Envelope::new(config, report))?;
        for path in &self.outputs {
            let bytes = match format_of(path) {
                Format::Json => doc.clone().into_bytes(),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&report.csv_rows(), &mut buf)?;
                    buf
                }
                Format::Plot => plotdata(&report.plot_series()).into_bytes(),
            };
            write_atomic(path, &bytes)?;
        }
        if self.json {
            print!("{doc}");
        } else {
            println!("{summary}");
        }
        Ok(())
    }
}

/// Parses `args` (including the program name), runs, and maps the result to
/// an exit status.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tbdlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let (globals, file) = match &cli.config {
        Some(path) => {
            let (g, m) = read_config(path)?;
            (g, Some(m))
        }
        None => (Globals::default(), None),
    };
    let parallelism = cli.parallelism.or(globals.parallelism);
    if parallelism == Some(0) {
        return Err(config_err("parallelism must be at least 1"));
    }
    let outputs = if cli.output.is_empty() { globals.output } else { cli.output };
    let emitter = Emitter { outputs, json: cli.json };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.unwrap_or(0))
        .build()
        .map_err(|e| config_err(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.command, file, &emitter))
}

fn dispatch(command: &Command, file: Option<Map<String, Value>>, out: &Emitter) -> Result<(), CliError> {
    match command {
        Command::Bound(a) => bound(&merge(a, file)?, out),
        Command::Verify(a) => verify(&merge(a, file)?, out),
        Command::Simulate(a) => simulate(&merge(a, file)?, out),
        Command::Experiment(ExperimentCommand::Reverse(a)) => reverse(&merge(a, file)?, out),
        Command::Experiment(ExperimentCommand::Triangle(a)) => triangle(&merge(a, file)?, out),
        Command::Experiment(ExperimentCommand::Coupling(a)) => coupling(&merge(a, file)?, out),
        Command::Experiment(ExperimentCommand::Lipschitz(a)) => lipschitz(&merge(a, file)?, out),
    }
}

#[derive(Debug, Clone, Serialize)]
struct BoundOutput {
    formula: Formula,
    t: f64,
    coordinates: usize,
    value: f64,
    exponent: f64,
    variance_term: Option<f64>,
    max_term: Option<f64>,
    bad_budget: Option<f64>,
    shift: Option<f64>,
}

impl Report for BoundOutput {
    fn kind(&self) -> &'static str {
        "bound"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        vec![
            CsvRow::new("bound", self.coordinates, "value", self.value),
            CsvRow::new("bound", self.coordinates, "exponent", self.exponent),
        ]
    }
}

/// Broadcasts length-1 lists to the common length, then repeats.
fn coordinate_lists(a: &BoundArgs) -> Result<Vec<Vec<f64>>, CliError> {
    let lists = [&a.c, &a.d, &a.gamma, &a.p, &a.q];
    let len = lists.iter().map(|l| l.len()).max().unwrap_or(0);
    let repeat = a.repeat.unwrap_or(1);
    if repeat == 0 {
        return Err(config_err("repeat must be at least 1"));
    }
    let mut out = Vec::new();
    for (name, list) in ["c", "d", "gamma", "p", "q"].iter().zip(lists) {
        let full: Vec<f64> = match list.len() {
            0 => Vec::new(),
            1 => vec![list[0]; len],
            l if l == len => list.clone(),
            l => return Err(config_err(format!("--{name} has {l} entries, expected 1 or {len}"))),
        };
        out.push(full.iter().copied().cycle().take(full.len() * repeat).collect());
    }
    Ok(out)
}

fn bound(a: &BoundArgs, out: &Emitter) -> Result<(), CliError> {
    let formula = a.formula.unwrap_or(Formula::Tbdi);
    if formula == Formula::Janson {
        let mu = a.mu.ok_or_else(|| config_err("janson needs --mu"))?;
        let delta = a.janson_delta.unwrap_or(0.0);
        let value = janson_zero_bound(mu, delta).map_err(config_err)?;
        let o = BoundOutput {
            formula,
            t: 0.0,
            coordinates: 0,
            value,
            exponent: -value.ln(),
            variance_term: None,
            max_term: None,
            bad_budget: None,
            shift: None,
        };
        return out.emit(a, &o, &format!("value {value:e}\nexponent {:e}", o.exponent));
    }
    let t = a.t.ok_or_else(|| config_err("--t is required"))?;
    let lists = coordinate_lists(a)?;
    let [c, d, gamma, p, q] = <[Vec<f64>; 5]>::try_from(lists).expect("five lists");
    if c.is_empty() {
        return Err(config_err("--c is required"));
    }
    let n = c.len();
    let d = if d.is_empty() { c.clone() } else { d };
    let gamma = if gamma.is_empty() { vec![1.0; n] } else { gamma };
    let mut profile = LipschitzProfile::new(c, d, gamma).map_err(config_err)?;
    if !p.is_empty() {
        profile = profile.with_p(p).map_err(config_err)?;
    }
    if !q.is_empty() {
        profile = profile.with_q(q).map_err(config_err)?;
    }
    let flag = |b: Option<bool>| b.unwrap_or(false);
    let mut shift = None;
    let b = match formula {
        Formula::Bdi => bdi_bound(&profile, t),
        Formula::Tbdi => tbdi_bound(
            &profile,
            t,
            &TbdiOptions { gamma_fail: a.gamma_fail, two_valued: flag(a.two_valued), two_sided: flag(a.two_sided) },
        ),
        Formula::Bernstein | Formula::Bennett => tbdi_bernoulli_bound(
            &profile,
            t,
            &BernoulliOptions {
                gamma_fail: a.gamma_fail,
                bennett: formula == Formula::Bennett,
                asymmetric: flag(a.asymmetric),
                monotone_bad_prob: a.monotone_bad_prob,
                two_sided: flag(a.two_sided),
            },
        ),
        Formula::Truncation => {
            let s = a.s.ok_or_else(|| config_err("truncation needs --s"))?;
            let fail = a.gamma_fail.ok_or_else(|| config_err("truncation needs --gamma-fail"))?;
            truncation_bound(&profile, t, s, fail, flag(a.monotone)).map(|tb| {
                shift = Some(tb.shift);
                tb.bound
            })
        }
        Formula::Janson => unreachable!("handled above"),
    }
    .map_err(config_err)?;
    let o = BoundOutput {
        formula,
        t,
        coordinates: n,
        value: b.value,
        exponent: b.exponent,
        variance_term: b.variance_term,
        max_term: b.max_term,
        bad_budget: b.bad_budget,
        shift,
    };
    let mut summary = format!("value {:e}\nexponent {:e}", o.value, o.exponent);
    if let Some(budget) = o.bad_budget {
        summary.push_str(&format!("\nbad_budget {budget:e}"));
    }
    if let Some(s) = shift {
        summary.push_str(&format!("\nshift {s:e}"));
    }
    out.emit(a, &o, &summary)
}

#[derive(Debug, Clone, Serialize)]
struct VerifyOutput {
    suite: Suite,
    passed: bool,
    detail: Value,
}

impl Report for VerifyOutput {
    fn kind(&self) -> &'static str {
        "verify"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        vec![CsvRow::new("verify", 0, "passed", if self.passed { 1.0 } else { 0.0 })]
    }
}

fn verify(a: &VerifyArgs, out: &Emitter) -> Result<(), CliError> {
    let suite = a.suite.ok_or_else(|| config_err("--suite is required"))?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let (passed, detail, summary) = match suite {
        Suite::ProductSpaces => {
            let count = a.instances.unwrap_or(1000);
            let s = run_product_space_suite(&GeneratorConfig::default(), seed, count).map_err(config_err)?;
            let line = format!("{} instances, {} checks, {} violations", s.instances, s.checks, s.counterexamples.len());
            (s.passed(), detail(&s), line)
        }
        Suite::Martingales => {
            let count = a.instances.unwrap_or(200);
            let s = run_martingale_suite(&GeneratorConfig::default(), seed, count).map_err(config_err)?;
            let line = format!("{} martingales, {} checks, {} failures", s.instances, s.checks, s.failures.len());
            (s.failures.is_empty(), detail(&s), line)
        }
        Suite::Bernstein => {
            let reports = [bernstein_tightness(20, 0.1)?, bernstein_tightness(20, 0.5)?];
            let passed = reports.iter().all(|r| r.passed());
            let line = reports
                .iter()
                .map(|r| format!("p={}: dominates {}, factor two {}", r.p, r.dominates, r.within_factor_two))
                .collect::<Vec<_>>()
                .join("\n");
            (passed, detail(&reports.to_vec()), line)
        }
        Suite::Bennett => {
            let r = bennett_dominance(a.instances.unwrap_or(10_000), seed)?;
            let line = format!("{} triples, {} violations, {} ties with Ct/V >= 1e-3", r.samples, r.violations, r.ties_away_from_zero);
            (r.passed(), detail(&r), line)
        }
        Suite::Equivalence => {
            let k3 = PatternGraph::named("K3").expect("built-in");
            let r = formulation_equivalence(&k3, 4, 5, a.instances.unwrap_or(10_000), seed, 1e-3)?;
            let line = format!(
                "n=4 exact laws identical: {}\nn=5 chi-square {:.3} on {} df, p = {:.4}",
                r.exhaustive_identical, r.chi_square, r.degrees_of_freedom, r.p_value
            );
            (r.passed(), detail(&r), line)
        }
    };
    let o = VerifyOutput { suite, passed, detail };
    out.emit(a, &o, &format!("{summary}\n{}", if passed { "PASS" } else { "FAIL" }))?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{suite:?}")))
    }
}

fn detail<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

#[derive(Debug, Clone, Serialize)]
struct SimulateOutput {
    runs: Vec<processes::OutcomeRecord>,
}

impl Report for SimulateOutput {
    fn kind(&self) -> &'static str {
        "simulate"
    }

    fn csv_rows(&self) -> Vec<CsvRow> {
        self.runs.iter().map(|r| CsvRow::new("simulate", r.n, "final_edges", r.final_edges as f64)).collect()
    }
}

fn simulate(a: &SimulateArgs, out: &Emitter) -> Result<(), CliError> {
    let variant: Variant = a.variant.as_deref().unwrap_or("reverse-addition").parse().map_err(config_err)?;
    let n = a.n.ok_or_else(|| config_err("--n is required"))?;
    let patterns = resolve_patterns(&a.pattern)?;
    let removal = matches!(variant, Variant::ReverseRemoval | Variant::HRemoval);
    if removal && n > REMOVAL_CAP && !a.allow_large.unwrap_or(false) {
        return Err(config_err(format!("{variant:?} is capped at n <= {REMOVAL_CAP}; pass --allow-large to lift")));
    }
    let replications = a.replications.unwrap_or(1);
    if replications == 0 {
        return Err(config_err("replications must be at least 1"));
    }
    let mut cfg = ProcessConfig::new(n, patterns, variant, a.seed.unwrap_or(DEFAULT_SEED));
    cfg.m_cap = a.m_cap;
    cfg.p_cap = a.p_cap;
    if a.default_truncation.unwrap_or(false) {
        if a.m_cap.is_some() {
            return Err(config_err("give either --m-cap or --default-truncation"));
        }
        cfg = cfg.with_default_truncation().map_err(config_err)?;
    }
    cfg.validate().map_err(config_err)?;
    use rayon::prelude::*;
    let outcomes: Vec<processes::ProcessOutcome> = (0..replications)
        .into_par_iter()
        .map(|r| processes::run(&cfg.clone().replication(r)))
        .collect::<Result<_, _>>()
        .map_err(config_err)?;
    if let Some(path) = &a.dump_accepted {
        let mut bytes = Vec::new();
        for o in &outcomes {
            rle::encode(&o.accepted, &mut bytes).map_err(config_err)?;
        }
        write_atomic(path, &bytes)?;
    }
    let runs: Vec<_> = outcomes.iter().map(|o| o.record()).collect();
    let finals: Vec<String> = runs.iter().take(10).map(|r| r.final_edges.to_string()).collect();
    let more = if runs.len() > 10 { " ..." } else { "" };
    let summary = format!("{variant:?} n={n}: final edges {}{more}", finals.join(" "));
    out.emit(&cfg_summary(&cfg, replications), &SimulateOutput { runs }, &summary)
}

#[derive(Serialize)]
struct SimulateConfig<'a> {
    process: &'a ProcessConfig,
    replications: u64,
}

fn cfg_summary(cfg: &ProcessConfig, replications: u64) -> SimulateConfig<'_> {
    SimulateConfig { process: cfg, replications }
}

fn reverse(a: &ReverseArgs, out: &Emitter) -> Result<(), CliError> {
    let grid = if a.grid.is_empty() { vec![64, 128, 256, 512] } else { a.grid.clone() };
    let cfg = ReverseConfig {
        patterns: resolve_patterns(&a.pattern)?,
        n_grid: grid,
        trials: a.trials.unwrap_or(300),
        seed: a.seed.unwrap_or(DEFAULT_SEED),
        untruncated: a.untruncated.unwrap_or(false),
    };
    let r = reverse_process_experiment(&cfg).map_err(harness_config)?;
    let mut summary = String::new();
    for row in &r.rows {
        summary.push_str(&format!("n={:>5}  mean {:>10.2}  std/sqrt(mean) {:.3}\n", row.n, row.mean, row.std_over_sqrt_mean));
    }
    match (&r.fit, r.predicted_slope) {
        (Some(f), Some(p)) => summary.push_str(&format!("slope {:.4} (predicted {p:.4}), r2 {:.4}", f.slope, f.r2)),
        (Some(f), None) => summary.push_str(&format!("slope {:.4}, r2 {:.4}", f.slope, f.r2)),
        _ => summary.push_str("no fit"),
    }
    out.emit(&cfg, &r, &summary)
}

/// Parameter problems are config errors, everything else propagates.
fn harness_config(e: HarnessError) -> CliError {
    match e {
        HarnessError::Io(_) | HarnessError::Csv(_) => CliError::Harness(e),
        other => config_err(other),
    }
}

fn triangle(a: &TriangleArgs, out: &Emitter) -> Result<(), CliError> {
    let n = a.n.unwrap_or(200);
    let p = a.p.unwrap_or_else(|| (n as f64).powf(-a.p_exponent.unwrap_or(1.0 / 3.0)));
    let cfg = TriangleConfig {
        n,
        p,
        eps: a.eps.unwrap_or(0.1),
        t_rel: a.t_rel.unwrap_or(0.5),
        trials: a.trials.unwrap_or(2000),
        seed: a.seed.unwrap_or(DEFAULT_SEED),
    };
    let r = triangle_experiment(&cfg).map_err(harness_config)?;
    let summary = format!(
        "n={} p={:.5} Delta={:.3} mean {:.1} (exact {:.1})\n\
         upper tail {:.4} [{:.4}, {:.4}]\n\
         bdi {:e}  tbdi {:e}  tbdi two-valued {:e}  bernstein {:e}  budget {:e}\n\
         Gamma failure {:.4} (union bound {:e})",
        n,
        p,
        r.delta,
        r.empirical_mean,
        r.exact_mean,
        r.upper_tail.point,
        r.upper_tail.ci_low,
        r.upper_tail.ci_high,
        r.bdi.value,
        r.tbdi.value,
        r.tbdi_two_valued.value,
        r.tbdi_bernstein.value,
        r.tbdi_two_valued.bad_budget.unwrap_or(0.0),
        r.gamma_failure.point,
        r.gamma_failure_bound
    );
    out.emit(&cfg, &r, &summary)
}

fn coupling(a: &CouplingArgs, out: &Emitter) -> Result<(), CliError> {
    let cfg = CouplingConfig {
        patterns: resolve_patterns(&a.pattern)?,
        n: a.n.unwrap_or(100),
        trials: a.trials.unwrap_or(1000),
        seed: a.seed.unwrap_or(DEFAULT_SEED),
        m: a.m,
    };
    let r = coupling_experiment(&cfg).map_err(harness_config)?;
    let summary = format!(
        "n={} m={} (of {}): agreement {:.4} [{:.4}, {:.4}], every pair closes {:.4}",
        r.n, r.m, r.pairs, r.agreement.point, r.agreement.ci_low, r.agreement.ci_high, r.every_pair_closes.point
    );
    out.emit(&cfg, &r, &summary)
}

fn lipschitz(a: &LipschitzArgs, out: &Emitter) -> Result<(), CliError> {
    let pattern = match &a.pattern {
        Some(s) => resolve_pattern(s)?,
        None => PatternGraph::named("K3").expect("built-in"),
    };
    let cfg = LipschitzConfig {
        pattern,
        n: a.n.unwrap_or(60),
        m: a.m,
        sweeps: a.sweeps.unwrap_or(1000),
        seed: a.seed.unwrap_or(DEFAULT_SEED),
    };
    let r = lipschitz_sweep(&cfg).map_err(harness_config)?;
    let summary = format!(
        "n={} m={}: {} swaps, {} replacements; {} conforming pairs, {} violations of {:.1}; max change {}",
        r.n, r.m, r.swaps, r.replacements, r.conforming, r.violations, r.limit, r.max_change
    );
    out.emit(&cfg, &r, &summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("tbdlab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_file() {
        let Command::Experiment(ExperimentCommand::Reverse(a)) =
            parse(&["experiment", "reverse", "--trials", "7"]).command
        else {
            panic!()
        };
        let file: Map<String, Value> = serde_json::from_str(r#"{"trials": 3, "grid": [8, 16, 32], "seed": 9}"#).unwrap();
        let m = merge(&a, Some(file)).unwrap();
        assert_eq!((m.trials, m.grid.clone(), m.seed), (Some(7), vec![8, 16, 32], Some(9)));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let file: Map<String, Value> = serde_json::from_str(r#"{"trails": 3}"#).unwrap();
        let err = merge(&ReverseArgs::default(), Some(file)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn broadcast_lists() {
        let Command::Bound(a) = parse(&["bound", "--c", "1,2", "--d", "5", "--t", "1", "--repeat", "2"]).command else {
            panic!()
        };
        let lists = coordinate_lists(&a).unwrap();
        assert_eq!(lists[0], vec![1.0, 2.0, 1.0, 2.0]);
        assert_eq!(lists[1], vec![5.0; 4]);
        assert!(lists[2].is_empty());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Failed("x".into()).exit_code(), 1);
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
    }

    #[test]
    fn unknown_pattern_message() {
        let err = resolve_pattern("K9").unwrap_err();
        assert!(err.to_string().contains("unknown pattern"));
        assert_eq!(err.exit_code(), 2);
    }
}
