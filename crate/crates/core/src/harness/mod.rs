//! Experiment driver behind the `qsq` binary: flat `key = value` configs,
//! seeded trials, CSV results and a JSON manifest per run.

mod commands;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::RngCore;
use serde::Serialize;

use crate::oracle::{NoiseModel, QueryLedger};
use crate::rng::SeedStream;
use crate::{QsqError, Result};

pub use commands::figure1_prediction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Figure1,
    Junta,
    Gl,
    Shallow,
    Tomo,
    Unitarity,
    Separation,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Figure1,
        Command::Junta,
        Command::Gl,
        Command::Shallow,
        Command::Tomo,
        Command::Unitarity,
        Command::Separation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Figure1 => "figure1",
            Command::Junta => "junta",
            Command::Gl => "gl",
            Command::Shallow => "shallow",
            Command::Tomo => "tomo",
            Command::Unitarity => "unitarity",
            Command::Separation => "separation",
        }
    }

    fn default_noise(self) -> NoiseModel {
        match self {
            Command::Figure1 => NoiseModel::Gaussian,
            Command::Junta | Command::Tomo => NoiseModel::BoundedUniform,
            Command::Gl => NoiseModel::AdversarialSign { positive: true },
            Command::Shallow | Command::Unitarity | Command::Separation => NoiseModel::Exact,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = QsqError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| QsqError::InvalidConfig(format!("unknown command `{s}`")))
    }
}

/// Parse flat `key = value` text. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| QsqError::InvalidConfig(format!("line {}: expected `key = value`", no + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(QsqError::InvalidConfig(format!("line {}: empty key", no + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// A single `key=value` override from the command line.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| QsqError::InvalidConfig(format!("expected key=value, got `{s}`")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub noise: NoiseModel,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(command: Command, seed: u64) -> Self {
        Self { command, seed, jobs: None, noise: command.default_noise(), params: BTreeMap::new() }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Merge file values, then overrides on top.
    pub fn with_params(mut self, file: BTreeMap<String, String>, overrides: Vec<(String, String)>) -> Self {
        self.params.extend(file);
        self.params.extend(overrides);
        self
    }
}

/// Typed access to the parameter map, recording resolved values and
/// rejecting keys nobody asked for.
pub(crate) struct Params {
    raw: BTreeMap<String, String>,
    used: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

impl Params {
    fn new(raw: BTreeMap<String, String>) -> Self {
        Self { raw, used: BTreeSet::new(), resolved: BTreeMap::new() }
    }

    fn get<T: FromStr + fmt::Display>(&mut self, key: &str, default: T) -> Result<T> {
        self.used.insert(key.to_string());
        let v = match self.raw.get(key) {
            Some(s) => s.parse().map_err(|_| QsqError::InvalidConfig(format!("{key}: cannot parse `{s}`")))?,
            None => default,
        };
        self.resolved.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub(crate) fn positive_usize(&mut self, key: &str, default: usize) -> Result<usize> {
        let v = self.get(key, default)?;
        if v == 0 {
            return Err(QsqError::InvalidConfig(format!("{key} must be positive")));
        }
        Ok(v)
    }

    pub(crate) fn positive_f64(&mut self, key: &str, default: f64) -> Result<f64> {
        let v: f64 = self.get(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(QsqError::InvalidConfig(format!("{key} must be positive, got {v}")));
        }
        Ok(v)
    }

    pub(crate) fn boolean(&mut self, key: &str, default: bool) -> Result<bool> {
        self.get(key, default)
    }

    pub(crate) fn text(&mut self, key: &str, default: &str) -> Result<String> {
        self.get(key, default.to_string())
    }

    fn list<T: FromStr + fmt::Display>(&mut self, key: &str, default: &[T]) -> Result<Vec<T>> {
        self.used.insert(key.to_string());
        let out = match self.raw.get(key) {
            Some(s) => s
                .split(',')
                .map(|x| {
                    x.trim().parse().map_err(|_| QsqError::InvalidConfig(format!("{key}: cannot parse `{}`", x.trim())))
                })
                .collect::<Result<Vec<T>>>()?,
            None => default.iter().map(|x| x.to_string().parse().ok().expect("default round-trips")).collect(),
        };
        if out.is_empty() {
            return Err(QsqError::InvalidConfig(format!("{key} must not be empty")));
        }
        let shown: Vec<String> = out.iter().map(|x| x.to_string()).collect();
        self.resolved.insert(key.to_string(), shown.join(","));
        Ok(out)
    }

    pub(crate) fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = self.list(key, default)?;
        if let Some(bad) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(QsqError::InvalidConfig(format!("{key}: {bad} is not positive")));
        }
        Ok(v)
    }

    pub(crate) fn usize_list(&mut self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        self.list(key, default)
    }

    fn finish(self) -> Result<BTreeMap<String, String>> {
        if let Some(k) = self.raw.keys().find(|k| !self.used.contains(*k)) {
            return Err(QsqError::InvalidConfig(format!("unknown key `{k}`")));
        }
        Ok(self.resolved)
    }
}

/// Format with 9 significant digits, `%g`-style.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if !(-5..9).contains(&exp) {
        format!("{}e{}{:02}", trim(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim(format!("{:.*}", (8 - exp) as usize, v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => f.write_str(&format_float(*x)),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => f.write_str(if *b { "true" } else { "false" }),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: Vec<&'static str>) -> Self {
        Self { name: name.to_string(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub label: String,
    pub seed: u64,
    pub total_queries: u64,
    pub min_tolerance: Option<f64>,
}

impl TrialRecord {
    pub fn new(label: String, seed: u64, ledger: &QueryLedger) -> Self {
        Self {
            label,
            seed,
            total_queries: ledger.total_queries,
            min_tolerance: ledger.min_tolerance.is_finite().then_some(ledger.min_tolerance),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: Command,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub version: &'static str,
    pub trials: Vec<TrialRecord>,
    pub total_queries: u64,
    pub min_tolerance: Option<f64>,
    pub wallclock_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub manifest: RunManifest,
    pub assertions: Vec<Assertion>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Write every table as `<name>.csv` and the manifest as
    /// `<command>_manifest.json`, each through a temporary file and a rename.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            written.push(write_atomic(dir, &format!("{}.csv", t.name), &t.to_csv())?);
        }
        let manifest = serde_json::to_string_pretty(&self.manifest)? + "\n";
        written.push(write_atomic(dir, &format!("{}_manifest.json", self.manifest.command), &manifest)?);
        Ok(written)
    }
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, &target)?;
    Ok(target)
}

/// Seed for the trial at `path` below `seed`.
pub fn trial_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(SeedStream::new(seed), |s, &l| s.child(l)).rng().next_u64()
}

/// Accumulates the parts of a run that every command produces.
pub(crate) struct Run {
    pub(crate) tables: Vec<Table>,
    pub(crate) trials: Vec<TrialRecord>,
    pub(crate) assertions: Vec<Assertion>,
}

impl Run {
    fn new() -> Self {
        Self { tables: Vec::new(), trials: Vec::new(), assertions: Vec::new() }
    }

    pub(crate) fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion::new(name, passed, detail));
    }
}

/// Run a command on the current rayon pool, or on one with `jobs` threads.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cfg.jobs {
        Some(0) => Err(QsqError::InvalidConfig("--jobs must be positive".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| QsqError::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| run_inner(cfg)),
        None => run_inner(cfg),
    }
}

fn run_inner(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let mut params = Params::new(cfg.params.clone());
    let mut run = Run::new();
    match cfg.command {
        Command::Figure1 => commands::figure1(cfg, &mut params, &mut run)?,
        Command::Junta => commands::junta(cfg, &mut params, &mut run)?,
        Command::Gl => commands::gl(cfg, &mut params, &mut run)?,
        Command::Shallow => commands::shallow(cfg, &mut params, &mut run)?,
        Command::Tomo => commands::tomo(cfg, &mut params, &mut run)?,
        Command::Unitarity => commands::unitarity(cfg, &mut params, &mut run)?,
        Command::Separation => commands::separation(cfg, &mut params, &mut run)?,
    }
    let mut config = params.finish()?;
    config.insert("noise".into(), cfg.noise.name().into());
    let total_queries = run.trials.iter().map(|t| t.total_queries).sum();
    let min_tolerance = run.trials.iter().filter_map(|t| t.min_tolerance).reduce(f64::min);
    Ok(RunOutput {
        tables: run.tables,
        manifest: RunManifest {
            command: cfg.command,
            config,
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION"),
            trials: run.trials,
            total_queries,
            min_tolerance,
            wallclock_s: start.elapsed().as_secs_f64(),
        },
        assertions: run.assertions,
    })
}
