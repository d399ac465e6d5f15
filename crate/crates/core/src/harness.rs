//! Experiment configs, the trial runner and report files.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{RIDistribution, RadialDistribution};
use crate::error::{Error, Result};
use crate::oracles::{FunctionOracle, HalfspaceSpec, OracleKind, Sign};
use crate::rng::{stream, trial_seed};
use crate::testers::{ri_tester_live, simple_tester, Decision, TRule, TesterConfig, TesterVerdict};

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Radial part of the input distribution, per cell dimension `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// One sphere; the radius defaults to `√n`.
    Sphere { radius: Option<f64> },
    /// Spheres of the given radii; equal weights unless given.
    Mixture {
        radii: Vec<f64>,
        weights: Option<Vec<f64>>,
        #[serde(default)]
        isotropic: bool,
    },
    /// `½(σ_{inner·√n} + σ_{√n})`.
    TwoSphere { inner: f64 },
    /// Radius uniform on `[lo, hi]`.
    Uniform {
        lo: f64,
        hi: f64,
        #[serde(default)]
        isotropic: bool,
    },
    /// Radial grid read from a two-column file.
    Grid {
        path: PathBuf,
        #[serde(default)]
        isotropic: bool,
    },
}

impl DistributionSpec {
    pub fn build(&self, n: usize) -> Result<RIDistribution> {
        let rn = (n as f64).sqrt();
        let (radial, iso) = match self {
            Self::Sphere { radius } => (RadialDistribution::point(radius.unwrap_or(rn))?, false),
            Self::Mixture {
                radii,
                weights,
                isotropic,
            } => {
                let r = match weights {
                    Some(w) => RadialDistribution::atoms(radii.clone(), w.clone())?,
                    None => RadialDistribution::equal_atoms(radii.clone())?,
                };
                (r, *isotropic)
            }
            Self::TwoSphere { inner } => (
                RadialDistribution::equal_atoms(vec![inner * rn, rn])?,
                false,
            ),
            Self::Uniform { lo, hi, isotropic } => {
                (RadialDistribution::uniform(*lo, *hi)?, *isotropic)
            }
            Self::Grid { path, isotropic } => (RadialDistribution::load_grid(path)?, *isotropic),
        };
        let d = RIDistribution::new(n, radial)?;
        if iso {
            d.isotropic_rescale()
        } else {
            Ok(d)
        }
    }
}

fn default_true() -> bool {
    true
}

/// The function under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OracleSpec {
    /// `sign(⟨w, x⟩ − t)`. `w = e₁` unless `random_normal`, in which case it
    /// is drawn once per cell. With `sqrt_n`, `t` is in units of `√n`.
    Halfspace {
        #[serde(default)]
        threshold: f64,
        #[serde(default)]
        sqrt_n: bool,
        #[serde(default)]
        random_normal: bool,
    },
    /// `sign(x₁ − t)` negated on the sphere of radius `inner·√n`.
    ShellFlip {
        inner: f64,
        #[serde(default)]
        threshold: f64,
    },
    /// A halfspace with each label flipped with probability `rate`.
    Noisy {
        rate: f64,
        #[serde(default)]
        threshold: f64,
        #[serde(default)]
        sqrt_n: bool,
    },
    Constant {
        #[serde(default = "default_true")]
        positive: bool,
    },
}

impl OracleSpec {
    /// The oracle for dimension `n`; `seed` keys random normals and noise.
    pub fn build(&self, n: usize, seed: u64) -> Result<FunctionOracle> {
        let rn = (n as f64).sqrt();
        let axis =
            |t: f64, scaled: bool| HalfspaceSpec::axis(n, 0, if scaled { t * rn } else { t });
        match self {
            Self::Halfspace {
                threshold,
                sqrt_n,
                random_normal,
            } => {
                let t = if *sqrt_n { threshold * rn } else { *threshold };
                let h = if *random_normal {
                    let mut rng = stream(seed, 0x40);
                    let w: Vec<f64> = (0..n)
                        .map(|_| rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    HalfspaceSpec::new(w, t)?
                } else {
                    axis(*threshold, *sqrt_n)?
                };
                Ok(FunctionOracle::halfspace(h))
            }
            Self::ShellFlip { inner, threshold } => Ok(FunctionOracle::shell_flip(
                axis(*threshold, false)?,
                vec![inner * rn],
            )),
            Self::Noisy {
                rate,
                threshold,
                sqrt_n,
            } => FunctionOracle::noisy(
                OracleKind::Halfspace(axis(*threshold, *sqrt_n)?),
                n,
                *rate,
                seed,
            ),
            Self::Constant { positive } => Ok(FunctionOracle::constant(
                n,
                if *positive { Sign::Pos } else { Sign::Neg },
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TesterKind {
    #[default]
    Ri,
    Simple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    #[default]
    Calibrated,
    Theoretical,
}

/// Constants on top of a preset; unset fields keep the preset's value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantOverrides {
    #[serde(default)]
    pub preset: Preset,
    pub l: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub k3: Option<f64>,
    pub c: Option<f64>,
    pub eta: Option<f64>,
    pub kappa: Option<f64>,
    pub consistency_scale: Option<f64>,
    pub t_rule: Option<TRule>,
    pub rings: Option<usize>,
}

impl ConstantOverrides {
    pub fn tester_config(&self, eps: f64, delta: f64) -> TesterConfig {
        let mut c = match self.preset {
            Preset::Calibrated => TesterConfig::calibrated(eps, delta),
            Preset::Theoretical => TesterConfig::theoretical(eps, delta),
        };
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut c.l, self.l);
        set(&mut c.k1, self.k1);
        set(&mut c.k2, self.k2);
        set(&mut c.k3, self.k3);
        set(&mut c.c, self.c);
        set(&mut c.eta, self.eta);
        set(&mut c.kappa, self.kappa);
        set(&mut c.consistency_scale, self.consistency_scale);
        if let Some(t) = self.t_rule {
            c.t_rule = t;
        }
        if self.rings.is_some() {
            c.ring_count_override = self.rings;
        }
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Csv,
    JsonLines,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json-lines" | "jsonl" => Ok(Self::JsonLines),
            _ => Err(config_err(format!(
                "unknown format `{s}` (csv, json-lines)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
}

/// One experiment: a grid of cells `(n, ε, δ)`, each run `trials` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    #[serde(default)]
    pub tester: TesterKind,
    pub distribution: DistributionSpec,
    pub oracle: OracleSpec,
    pub dims: Vec<usize>,
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub constants: ConstantOverrides,
    #[serde(default)]
    pub output: OutputSpec,
    /// Off by default so reports are reproducible byte for byte.
    #[serde(default)]
    pub record_wall_time: bool,
}

/// Sets `key` (dotted path) in a TOML table to `value`, parsed as a TOML
/// value when possible and as a string otherwise.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| config_err(format!("override `{assignment}` is not KEY=VALUE")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| config_err(format!("override `{key}`: `{p}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_with(text, &[])
    }

    /// Parses `text` after applying `KEY=VALUE` overrides.
    pub fn from_toml_with(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: Self = table
            .try_into()
            .map_err(|e: toml::de::Error| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_with(&text, overrides).map_err(|e| match e {
            Error::Config(m) => config_err(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(config_err("trials must be ≥ 1"));
        }
        if self.dims.is_empty() || self.eps.is_empty() || self.delta.is_empty() {
            return Err(config_err("dims, eps and delta must be nonempty"));
        }
        if self.dims.contains(&0) {
            return Err(config_err("dimensions must be ≥ 1"));
        }
        for cell in self.cells() {
            self.constants
                .tester_config(cell.eps, cell.delta)
                .validate()
                .map_err(|e| config_err(e.to_string()))?;
        }
        Ok(())
    }

    /// Cells in report order: `n` outermost, then `ε`, then `δ`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &n in &self.dims {
            for &eps in &self.eps {
                for &delta in &self.delta {
                    out.push(Cell {
                        index: out.len(),
                        n,
                        eps,
                        delta,
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
}

/// One trial's line in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: String,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub trial: usize,
    pub seed: u64,
    pub verdict: Decision,
    /// Oracle calls made during the trial.
    pub samples_used: u64,
    pub wall_ms: f64,
    pub diag_digest: String,
}

pub const CSV_HEADER: [&str; 10] = [
    "scenario",
    "n",
    "eps",
    "delta",
    "trial",
    "seed",
    "verdict",
    "samples_used",
    "wall_ms",
    "diag_digest",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A finished trial: its row and the full verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub row: ReportRow,
    pub verdict: TesterVerdict,
}

fn run_trial(cfg: &ExperimentConfig, cell: Cell, trial: usize) -> Result<TrialOutcome> {
    let seed = trial_seed(cfg.seed, cell.index as u64, trial as u64);
    let dist = cfg.distribution.build(cell.n)?;
    // The oracle depends on the cell only, so random normals agree across trials.
    let f = cfg
        .oracle
        .build(cell.n, trial_seed(cfg.seed, cell.index as u64, u64::MAX))?;
    let tc = cfg.constants.tester_config(cell.eps, cell.delta);
    let mut rng = stream(seed, 0);
    let start = Instant::now();
    let verdict = match cfg.tester {
        TesterKind::Ri => ri_tester_live(&dist, &f, &tc, &mut rng)?,
        TesterKind::Simple => simple_tester(&dist, &f, &tc, &mut rng)?,
    };
    let wall_ms = if cfg.record_wall_time {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let row = ReportRow {
        scenario: cfg.scenario.clone(),
        n: cell.n,
        eps: cell.eps,
        delta: cell.delta,
        trial,
        seed,
        verdict: verdict.decision,
        samples_used: f.calls(),
        wall_ms,
        diag_digest: verdict.digest()?,
    };
    Ok(TrialOutcome { row, verdict })
}

/// Every trial of every cell, in `(cell, trial)` order, on `threads` workers.
pub fn run_experiment_detailed(
    cfg: &ExperimentConfig,
    threads: usize,
) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let jobs: Vec<(Cell, usize)> = cfg
        .cells()
        .into_iter()
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| config_err(format!("thread pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(c, t)| run_trial(cfg, c, t))
            .collect()
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<ReportRow>> {
    Ok(run_experiment_detailed(cfg, threads)?
        .into_iter()
        .map(|o| o.row)
        .collect())
}

fn csv_err(e: csv::Error) -> Error {
    config_err(format!("csv: {e}"))
}

fn io_err(path: &str) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_string(),
        source,
    }
}

/// Writes `rows` to `out`; `path` is only used in error messages.
pub fn write_report<W: Write>(
    rows: &[ReportRow],
    format: ReportFormat,
    out: W,
    path: &str,
) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            for r in rows {
                w.write_record([
                    r.scenario.clone(),
                    r.n.to_string(),
                    fmt_real(r.eps),
                    fmt_real(r.delta),
                    r.trial.to_string(),
                    r.seed.to_string(),
                    r.verdict.as_str().to_string(),
                    r.samples_used.to_string(),
                    fmt_real(r.wall_ms),
                    r.diag_digest.clone(),
                ])
                .map_err(csv_err)?;
            }
            w.flush().map_err(io_err(path))
        }
        ReportFormat::JsonLines => {
            let mut out = out;
            for r in rows {
                let line = format!(
                    "{{\"scenario\":{},\"n\":{},\"eps\":{},\"delta\":{},\"trial\":{},\"seed\":{},\"verdict\":\"{}\",\"samples_used\":{},\"wall_ms\":{},\"diag_digest\":{}}}",
                    serde_json::to_string(&r.scenario).map_err(|e| config_err(e.to_string()))?,
                    r.n,
                    fmt_real(r.eps),
                    fmt_real(r.delta),
                    r.trial,
                    r.seed,
                    r.verdict.as_str(),
                    r.samples_used,
                    fmt_real(r.wall_ms),
                    serde_json::to_string(&r.diag_digest).map_err(|e| config_err(e.to_string()))?,
                );
                writeln!(out, "{line}").map_err(io_err(path))?;
            }
            out.flush().map_err(io_err(path))
        }
    }
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(rows: &[ReportRow], format: ReportFormat, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let name = p.display().to_string();
            let file = std::fs::File::create(p).map_err(io_err(&name))?;
            write_report(rows, format, std::io::BufWriter::new(file), &name)
        }
        None => write_report(rows, format, std::io::stdout().lock(), "<stdout>"),
    }
}

fn parse_field<T: FromStr>(s: &str, field: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| config_err(format!("line {line}: bad {field} `{s}`")))
}

fn parse_decision(s: &str, line: usize) -> Result<Decision> {
    match s {
        "accept" => Ok(Decision::Accept),
        "reject" => Ok(Decision::Reject),
        _ => Err(config_err(format!("line {line}: bad verdict `{s}`"))),
    }
}

/// Inverse of [`write_report`].
pub fn parse_report<R: BufRead>(input: R, format: ReportFormat) -> Result<Vec<ReportRow>> {
    match format {
        ReportFormat::Csv => {
            let mut rd = csv::Reader::from_reader(input);
            let header = rd.headers().map_err(csv_err)?.clone();
            if header.iter().ne(CSV_HEADER) {
                return Err(config_err(format!("unexpected header {header:?}")));
            }
            let mut rows = Vec::new();
            for (i, rec) in rd.records().enumerate() {
                let rec = rec.map_err(csv_err)?;
                let line = i + 2;
                if rec.len() != CSV_HEADER.len() {
                    return Err(config_err(format!(
                        "line {line}: expected {} fields",
                        CSV_HEADER.len()
                    )));
                }
                rows.push(ReportRow {
                    scenario: rec[0].to_string(),
                    n: parse_field(&rec[1], "n", line)?,
                    eps: parse_field(&rec[2], "eps", line)?,
                    delta: parse_field(&rec[3], "delta", line)?,
                    trial: parse_field(&rec[4], "trial", line)?,
                    seed: parse_field(&rec[5], "seed", line)?,
                    verdict: parse_decision(&rec[6], line)?,
                    samples_used: parse_field(&rec[7], "samples_used", line)?,
                    wall_ms: parse_field(&rec[8], "wall_ms", line)?,
                    diag_digest: rec[9].to_string(),
                });
            }
            Ok(rows)
        }
        ReportFormat::JsonLines => input
            .lines()
            .enumerate()
            .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|(i, l)| {
                let l = l.map_err(io_err("<report>"))?;
                serde_json::from_str(&l).map_err(|e| config_err(format!("line {}: {e}", i + 1)))
            })
            .collect(),
    }
}

/// Per-cell summary of a set of rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub trials: usize,
    pub accepts: usize,
    pub median_samples: u64,
}

impl CellSummary {
    pub fn accept_rate(&self) -> f64 {
        self.accepts as f64 / self.trials as f64
    }
}

impl fmt::Display for CellSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} eps={} delta={}: {}/{} accepted, median samples {}",
            self.n, self.eps, self.delta, self.accepts, self.trials, self.median_samples
        )
    }
}

/// Groups rows by cell, keeping first-seen order.
pub fn summarize(rows: &[ReportRow]) -> Vec<CellSummary> {
    let mut order: Vec<(usize, u64, u64)> = Vec::new();
    let mut groups: BTreeMap<(usize, u64, u64), Vec<&ReportRow>> = BTreeMap::new();
    for r in rows {
        let key = (r.n, r.eps.to_bits(), r.delta.to_bits());
        if !groups.contains_key(&key) {
            order.push(key);
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let g = &groups[&key];
            let mut s: Vec<u64> = g.iter().map(|r| r.samples_used).collect();
            s.sort_unstable();
            CellSummary {
                n: key.0,
                eps: f64::from_bits(key.1),
                delta: f64::from_bits(key.2),
                trials: g.len(),
                accepts: g.iter().filter(|r| r.verdict.is_accept()).count(),
                median_samples: s[s.len() / 2],
            }
        })
        .collect()
}

/// What a calibration scenario should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationScenario {
    pub expect: Expectation,
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
}

/// A sweep over constant values, each combination run on every scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    /// Constant name (a field of `[constants]`) to candidate values.
    pub grid: BTreeMap<String, Vec<toml::Value>>,
    pub scenario: Vec<CalibrationScenario>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    /// `name=value` pairs joined by `;`.
    pub constants: String,
    pub scenario: String,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub trials: usize,
    /// Fraction of trials with the expected decision.
    pub agree_rate: f64,
    pub median_samples: u64,
}

impl CalibrationConfig {
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut table: toml::Table =
            toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: Self = table
            .try_into()
            .map_err(|e: toml::de::Error| config_err(format!("{}: {e}", path.display())))?;
        if cfg.scenario.is_empty() {
            return Err(config_err("calibration needs at least one [[scenario]]"));
        }
        Ok(cfg)
    }

    /// Every combination of grid values, in lexicographic key order.
    pub fn combinations(&self) -> Vec<Vec<(String, toml::Value)>> {
        let mut out = vec![Vec::new()];
        for (k, vals) in &self.grid {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<(String, toml::Value)>| {
                    vals.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push((k.clone(), v.clone()));
                        p
                    })
                })
                .collect();
        }
        out
    }
}

/// Runs every grid combination on every scenario.
pub fn calibrate(cfg: &CalibrationConfig, threads: usize) -> Result<Vec<CalibrationRow>> {
    let mut out = Vec::new();
    for combo in cfg.combinations() {
        let label = combo
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        for sc in &cfg.scenario {
            let mut table =
                toml::Table::try_from(&sc.experiment).map_err(|e| config_err(e.to_string()))?;
            for (k, v) in &combo {
                apply_override(&mut table, &format!("constants.{k}={v}"))?;
            }
            let exp: ExperimentConfig = table
                .try_into()
                .map_err(|e: toml::de::Error| config_err(e.to_string()))?;
            let rows = run_experiment(&exp, threads)?;
            for s in summarize(&rows) {
                let agree = match sc.expect {
                    Expectation::Accept => s.accepts,
                    Expectation::Reject => s.trials - s.accepts,
                };
                out.push(CalibrationRow {
                    constants: label.clone(),
                    scenario: exp.scenario.clone(),
                    n: s.n,
                    eps: s.eps,
                    delta: s.delta,
                    trials: s.trials,
                    agree_rate: agree as f64 / s.trials as f64,
                    median_samples: s.median_samples,
                });
            }
        }
    }
    Ok(out)
}

pub fn write_calibration<W: Write>(rows: &[CalibrationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "constants",
        "scenario",
        "n",
        "eps",
        "delta",
        "trials",
        "agree_rate",
        "median_samples",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.constants.clone(),
            r.scenario.clone(),
            r.n.to_string(),
            fmt_real(r.eps),
            fmt_real(r.delta),
            r.trials.to_string(),
            fmt_real(r.agree_rate),
            r.median_samples.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err("<calibration>"))
}
