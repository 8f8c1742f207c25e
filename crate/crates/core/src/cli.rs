//! Command-line front end: experiment configuration and the subcommands of
//! the `coincidence` binary.
//!
//! Structured reports are JSON, distributions are JSON lines and landscape
//! grids are CSV. Every artifact carries the hash of the effective
//! configuration; timings go to stderr so artifacts stay reproducible.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::analyze;
use crate::delays::{delay_matrix, discretize, snapped_delay_matrix, ArrivalSpec, DelayMatrix};
use crate::error::{Error, Result};
use crate::interferometer::{haar_unitary, monomial_vector, Interferometer, OutputString};
use crate::matfun::ComplexMatrix;
use crate::rates::{
    block_decompose, build_transform, gamas_vanishes, rate_blocked, rate_direct, rate_matrix,
    rate_streaming, rate_truncated, Species, Transform, MAX_DENSE_DEGREE, MAX_DIRECT_DEGREE,
};
use crate::sampling::{build_distribution_with, sample, short_hash, OutputDistribution};
use crate::symgroup::{all_permutations, partitions_of, GroupOrdering, Partition};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Direct,
    Blocked,
    Truncated,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Direct => "direct",
            Engine::Blocked => "blocked",
            Engine::Truncated => "truncated",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Engine::Direct),
            "blocked" => Ok(Engine::Blocked),
            "truncated" => Ok(Engine::Truncated),
            other => Err(Error::config("engine", format!("unknown engine {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum UnitarySource {
    /// Haar-random; falls back to the top-level seed when `seed` is absent.
    Haar {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// JSON file of `[re, im]` rows, relative to the config file.
    File {
        path: PathBuf,
    },
    Matrix {
        rows: Vec<Vec<[f64; 2]>>,
    },
}

/// `"all"` for every collision-free string, or one string such as `"01101"`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum OutputSelection {
    #[default]
    All,
    One(OutputString),
}

impl TryFrom<String> for OutputSelection {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        if s == "all" {
            Ok(OutputSelection::All)
        } else {
            Ok(OutputSelection::One(s.parse()?))
        }
    }
}

impl From<OutputSelection> for String {
    fn from(o: OutputSelection) -> String {
        match o {
            OutputSelection::All => "all".into(),
            OutputSelection::One(s) => s.to_string(),
        }
    }
}

fn default_species() -> Species {
    Species::Boson
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub unitary: UnitarySource,
    #[serde(default = "default_species")]
    pub species: Species,
    pub arrival: ArrivalSpec,
    /// Snap arrival times to bin centers before building the delay matrix.
    #[serde(default)]
    pub binned: bool,
    #[serde(default)]
    pub output: OutputSelection,
    #[serde(default)]
    pub engine: Engine,
    /// Worker threads for parallel evaluation; 0 uses the default pool.
    #[serde(default)]
    pub threads_chunk: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_json_str(&std::fs::read_to_string(path)?)?;
        if let UnitarySource::File { path: p } = &mut cfg.unitary {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("n", "at least one particle is required"));
        }
        if self.n > self.m {
            return Err(Error::config(
                "n",
                format!("n = {} exceeds m = {}", self.n, self.m),
            ));
        }
        if self.arrival.particles() != self.n {
            return Err(Error::config(
                "arrival.taus",
                format!(
                    "{} arrival times for n = {}",
                    self.arrival.particles(),
                    self.n
                ),
            ));
        }
        self.arrival.validate()?;
        if let OutputSelection::One(s) = &self.output {
            if s.len() != self.m || s.ones() != self.n {
                return Err(Error::config(
                    "output",
                    format!(
                        "{s} is not a string of {} modes with {} detections",
                        self.m, self.n
                    ),
                ));
            }
        }
        let limit = match self.engine {
            Engine::Direct => MAX_DIRECT_DEGREE,
            Engine::Blocked | Engine::Truncated => MAX_DENSE_DEGREE,
        };
        if self.n > limit {
            return Err(Error::SizeLimit {
                what: "particle count for this engine",
                value: self.n as u128,
                limit: limit as u128,
            });
        }
        if let UnitarySource::Matrix { rows } = &self.unitary {
            if rows.len() != self.m {
                return Err(Error::config(
                    "unitary.rows",
                    format!("expected {} rows", self.m),
                ));
            }
        }
        Ok(())
    }

    /// Short SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        short_hash(&serde_json::to_vec(self).expect("config serializes"))
    }

    pub fn interferometer(&self) -> Result<Interferometer> {
        let u = match &self.unitary {
            UnitarySource::Haar { seed } => haar_unitary(self.m, seed.unwrap_or(self.seed))?,
            UnitarySource::File { path } => Interferometer::load(path)?,
            UnitarySource::Matrix { rows } => {
                Interferometer::from_json_str(&serde_json::to_string(rows)?)?
            }
        };
        if u.channels() != self.m {
            return Err(Error::config(
                "unitary",
                format!(
                    "unitary has {} modes, config says m = {}",
                    u.channels(),
                    self.m
                ),
            ));
        }
        Ok(u)
    }

    /// Delay matrix and, when binning applies, the delay partition.
    pub fn delays(&self) -> Result<(DelayMatrix, Option<Partition>)> {
        if self.binned || self.engine == Engine::Truncated {
            let d = discretize(&self.arrival)?;
            Ok((
                snapped_delay_matrix(&d.bin_of, &self.arrival),
                Some(d.partition.partition().clone()),
            ))
        } else {
            Ok((delay_matrix(&self.arrival), None))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub partition: Partition,
    pub contribution: f64,
    pub max_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EngineResult {
    pub rate: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub kept_blocks: Vec<BlockReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dropped_blocks: Vec<BlockReport>,
}

/// A configured rate evaluator for one delay matrix.
pub struct RateEngine {
    engine: Engine,
    species: Species,
    r: DelayMatrix,
    mu: Option<Partition>,
    ordering: GroupOrdering,
    transform: Option<Arc<Transform>>,
}

impl RateEngine {
    pub fn new(
        engine: Engine,
        species: Species,
        r: DelayMatrix,
        mu: Option<Partition>,
    ) -> Result<Self> {
        let ordering = all_permutations(r.n())?;
        let transform = match engine {
            Engine::Direct => None,
            Engine::Blocked | Engine::Truncated => Some(Arc::new(build_transform(&ordering)?)),
        };
        if engine == Engine::Truncated && mu.is_none() {
            return Err(Error::config(
                "engine",
                "truncated engine needs binned arrival times",
            ));
        }
        Ok(RateEngine {
            engine,
            species,
            r,
            mu,
            ordering,
            transform,
        })
    }

    pub fn with_delays(&self, r: DelayMatrix) -> RateEngine {
        RateEngine {
            engine: self.engine,
            species: self.species,
            r,
            mu: self.mu.clone(),
            ordering: self.ordering.clone(),
            transform: self.transform.clone(),
        }
    }

    pub fn evaluate(&self, a: &ComplexMatrix) -> Result<EngineResult> {
        let plain = |rate| EngineResult {
            rate,
            kept_blocks: vec![],
            dropped_blocks: vec![],
        };
        match (self.engine, &self.transform) {
            (Engine::Direct, _) if self.r.n() <= MAX_DENSE_DEGREE => {
                let v = monomial_vector(a, &self.ordering);
                let rm = rate_matrix(&self.r, self.species, &self.ordering)?;
                rate_direct(&v, &rm).map(plain)
            }
            (Engine::Direct, _) => rate_streaming(a, &self.r, self.species).map(plain),
            (engine, Some(t)) => {
                let v = monomial_vector(a, &self.ordering);
                let d = block_decompose(&v, &self.r, t, self.species)?;
                let report = |term: &crate::rates::BlockTerm| BlockReport {
                    partition: term.slot.clone(),
                    contribution: term.contribution(),
                    max_abs: term.max_abs(),
                };
                if engine == Engine::Blocked {
                    return Ok(EngineResult {
                        rate: rate_blocked(&d)?,
                        kept_blocks: d.terms.iter().map(report).collect(),
                        dropped_blocks: vec![],
                    });
                }
                let mu = self.mu.as_ref().expect("checked in new");
                let tr = rate_truncated(&d, mu)?;
                let (mut kept, mut dropped) = (vec![], vec![]);
                for term in &d.terms {
                    if gamas_vanishes(&term.block_partition, mu)? {
                        dropped.push(report(term));
                    } else {
                        kept.push(report(term));
                    }
                }
                Ok(EngineResult {
                    rate: tr.rate,
                    kept_blocks: kept,
                    dropped_blocks: dropped,
                })
            }
            (_, None) => unreachable!("block engines always carry a transform"),
        }
    }

    pub fn rate(&self, a: &ComplexMatrix) -> Result<f64> {
        match self.engine {
            Engine::Direct => rate_streaming(a, &self.r, self.species),
            _ => self.evaluate(a).map(|x| x.rate),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StringRate {
    pub s: String,
    #[serde(flatten)]
    pub result: EngineResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub config_hash: String,
    pub engine: Engine,
    pub species: Species,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_partition: Option<Partition>,
    pub results: Vec<StringRate>,
}

pub fn cmd_rate(cfg: &ExperimentConfig) -> Result<RateReport> {
    let u = cfg.interferometer()?;
    let (r, mu) = cfg.delays()?;
    let engine = RateEngine::new(cfg.engine, cfg.species, r, mu.clone())?;
    let strings = match &cfg.output {
        OutputSelection::One(s) => vec![s.clone()],
        OutputSelection::All => crate::interferometer::enumerate_outputs(cfg.m, cfg.n)?,
    };
    let results = strings
        .iter()
        .map(|s| {
            Ok(StringRate {
                s: s.to_string(),
                result: engine.evaluate(&u.submatrix(s, cfg.n)?)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RateReport {
        config_hash: cfg.hash(),
        engine: cfg.engine,
        species: cfg.species,
        delay_partition: mu,
        results,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionSummary {
    pub config_hash: String,
    pub strings: usize,
    pub entropy_bits: f64,
    pub max_prob_string: String,
    pub max_prob: f64,
    /// `None` when the reference has zero total rate on collision-free strings.
    pub tv_from_indistinguishable: Option<f64>,
    pub tv_from_distinguishable: Option<f64>,
}

pub fn cmd_distribution(
    cfg: &ExperimentConfig,
) -> Result<(OutputDistribution, DistributionSummary)> {
    let u = cfg.interferometer()?;
    let (r, mu) = cfg.delays()?;
    let engine = RateEngine::new(cfg.engine, cfg.species, r, mu)?;
    let dist = build_distribution_with(&u, cfg.n, cfg.species, cfg.hash(), |a| engine.rate(a))?;
    let reference = |r: DelayMatrix| -> Result<Option<f64>> {
        let e = RateEngine::new(Engine::Direct, cfg.species, r, None)?;
        match build_distribution_with(&u, cfg.n, cfg.species, String::new(), |a| e.rate(a)) {
            Ok(d) => Ok(Some(dist.total_variation(&d)?)),
            Err(Error::Numerical(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let top = dist.most_likely();
    let summary = DistributionSummary {
        config_hash: cfg.hash(),
        strings: dist.len(),
        entropy_bits: dist.entropy_bits(),
        max_prob_string: top.s.to_string(),
        max_prob: top.prob,
        tv_from_indistinguishable: reference(DelayMatrix::ones(cfg.n))?,
        tv_from_distinguishable: reference(DelayMatrix::identity(cfg.n))?,
    };
    Ok((dist, summary))
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub config_hash: String,
    pub seed: u64,
    pub count: usize,
    pub samples: Vec<String>,
}

pub fn cmd_sample(cfg: &ExperimentConfig, count: usize) -> Result<SampleReport> {
    let (dist, _) = cmd_distribution(cfg)?;
    Ok(SampleReport {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        count,
        samples: sample(&dist, count, cfg.seed)
            .iter()
            .map(|s| s.to_string())
            .collect(),
    })
}

/// One grid axis: particle `particle` (0-based, not the first) arrives at
/// `τ_1 + value` for each value.
#[derive(Clone, Debug)]
pub struct LandscapeAxis {
    pub particle: usize,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LandscapePoint {
    pub offsets: Vec<f64>,
    pub rate: f64,
}

/// Largest grid [`landscape`] evaluates unless told otherwise.
pub const DEFAULT_MAX_LANDSCAPE_POINTS: usize = 1_000_000;

/// Rates over a grid of relative arrival times, first axis slowest.
pub fn landscape(
    engine: &RateEngine,
    a: &ComplexMatrix,
    base_taus: &[f64],
    delta_omega: f64,
    axes: &[LandscapeAxis],
    max_points: usize,
) -> Result<Vec<LandscapePoint>> {
    let n = base_taus.len();
    if axes.iter().any(|ax| ax.particle == 0 || ax.particle >= n) {
        return Err(Error::config(
            "landscape",
            "axis particle must be one of 2..=n",
        ));
    }
    let points: usize = axes.iter().map(|ax| ax.values.len()).product();
    if points > max_points {
        return Err(Error::SizeLimit {
            what: "landscape grid points",
            value: points as u128,
            limit: max_points as u128,
        });
    }
    let mut out = Vec::with_capacity(points);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..points {
        let mut taus = base_taus.to_vec();
        let offsets: Vec<f64> = axes.iter().zip(&idx).map(|(ax, &i)| ax.values[i]).collect();
        for (ax, &off) in axes.iter().zip(&offsets) {
            taus[ax.particle] = base_taus[0] + off;
        }
        let r = DelayMatrix::from_times(&taus, delta_omega);
        out.push(LandscapePoint {
            offsets,
            rate: engine.with_delays(r).rate(a)?,
        });
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < axes[k].values.len() {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(out)
}

pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![from],
        _ => (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GamasTable {
    /// Column partitions `λ`, lexicographically increasing.
    pub columns: Vec<Partition>,
    pub rows: Vec<GamasRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GamasRow {
    pub delay_partition: Partition,
    /// Basis labels, e.g. `f1 f1 f2 f3`.
    pub basis: String,
    pub vanishes: Vec<bool>,
}

pub fn gamas_table(n: usize) -> Result<GamasTable> {
    if n == 0 || n > 20 {
        return Err(Error::config("n", "gamas-table supports 1 <= n <= 20"));
    }
    let mut parts = partitions_of(n);
    parts.reverse();
    let rows = parts
        .iter()
        .map(|mu| {
            let basis = mu
                .parts()
                .iter()
                .enumerate()
                .flat_map(|(k, &len)| std::iter::repeat_n(format!("f{}", k + 1), len))
                .collect::<Vec<_>>()
                .join(" ");
            Ok(GamasRow {
                delay_partition: mu.clone(),
                basis,
                vanishes: parts
                    .iter()
                    .map(|l| gamas_vanishes(l, mu))
                    .collect::<Result<_>>()?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(GamasTable {
        columns: parts,
        rows,
    })
}

impl fmt::Display for GamasTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.columns.iter().map(|p| p.to_string()).collect();
        let widths: Vec<usize> = labels.iter().map(String::len).collect();
        let basis_w = self.rows.iter().map(|r| r.basis.len()).max().unwrap_or(0);
        write!(f, "{:basis_w$}", "")?;
        for l in &labels {
            write!(f, " | {l}")?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(f, "{:basis_w$}", row.basis)?;
            for (&v, &w) in row.vanishes.iter().zip(&widths) {
                write!(f, " | {:^w$}", if v { "0" } else { "" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "coincidence",
    version,
    about = "Coincidence rates of partially distinguishable particles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// direct | blocked | truncated
    #[arg(long, global = true)]
    pub engine: Option<Engine>,
    /// boson | fermion
    #[arg(long, global = true)]
    pub species: Option<Species>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long = "threads-chunk", global = true)]
    pub threads_chunk: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unnormalized coincidence rate for the configured output string(s).
    Rate,
    /// Exact distribution over collision-free strings, as JSON lines.
    Distribution,
    /// Draw samples from the exact distribution.
    Sample {
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    /// Rates over a grid of relative arrival times, as CSV.
    Landscape {
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 61)]
        steps: usize,
        /// Scan only this particle (1-based) against the others.
        #[arg(long)]
        slice: Option<usize>,
        #[arg(long = "max-points", default_value_t = DEFAULT_MAX_LANDSCAPE_POINTS)]
        max_points: usize,
    },
    /// Delay-partition probabilities and witness flags for n particles in b bins.
    Analyze {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        bins: usize,
    },
    /// Which immanants of an n x n Gram matrix vanish, per delay partition.
    GamasTable {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
}

impl Cli {
    fn config(&self) -> Result<ExperimentConfig> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| Error::config("--config", "this command needs a configuration file"))?;
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(engine) = self.engine {
            cfg.engine = engine;
        }
        if let Some(species) = self.species {
            cfg.species = species;
        }
        if let Some(t) = self.threads_chunk {
            cfg.threads_chunk = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
            None => Box::new(std::io::stdout().lock()),
        })
    }
}

fn write_json<T: Serialize>(mut w: impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn init_threads(n: usize) {
    if n > 0 {
        // a second call in one process is a no-op
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let start = Instant::now();
    match &cli.command {
        Command::Rate => {
            let cfg = cli.config()?;
            init_threads(cfg.threads_chunk);
            let report = cmd_rate(&cfg)?;
            write_json(cli.sink()?, &report)?;
        }
        Command::Distribution => {
            let cfg = cli.config()?;
            init_threads(cfg.threads_chunk);
            let (dist, summary) = cmd_distribution(&cfg)?;
            let mut w = cli.sink()?;
            for e in &dist.entries {
                let line = serde_json::json!({
                    "s": e.s.to_string(),
                    "rate": e.rate,
                    "prob": e.prob,
                    "config_hash": summary.config_hash,
                });
                writeln!(w, "{line}")?;
            }
            w.flush()?;
            if cli.out.is_some() {
                write_json(std::io::stdout().lock(), &summary)?;
            } else {
                write_json(std::io::stderr().lock(), &summary)?;
            }
        }
        Command::Sample { count } => {
            let cfg = cli.config()?;
            init_threads(cfg.threads_chunk);
            write_json(cli.sink()?, &cmd_sample(&cfg, *count)?)?;
        }
        Command::Landscape {
            from,
            to,
            steps,
            slice,
            max_points,
        } => {
            let cfg = cli.config()?;
            init_threads(cfg.threads_chunk);
            let OutputSelection::One(s) = &cfg.output else {
                return Err(Error::config(
                    "output",
                    "landscape needs a single output string",
                ));
            };
            if cfg.engine == Engine::Truncated {
                return Err(Error::config(
                    "engine",
                    "landscape scans continuous times; use direct or blocked",
                ));
            }
            let values = linspace(*from, *to, *steps);
            let axes: Vec<LandscapeAxis> = match (slice, cfg.n) {
                (Some(k), _) => vec![LandscapeAxis {
                    particle: k.saturating_sub(1),
                    values,
                }],
                (None, 2) => vec![LandscapeAxis {
                    particle: 1,
                    values,
                }],
                (None, 3) => vec![
                    LandscapeAxis {
                        particle: 1,
                        values: values.clone(),
                    },
                    LandscapeAxis {
                        particle: 2,
                        values,
                    },
                ],
                (None, _) => {
                    return Err(Error::config(
                        "--slice",
                        "grids need n = 2 or 3; pick a particle to slice",
                    ))
                }
            };
            let u = cfg.interferometer()?;
            let a = u.submatrix(s, cfg.n)?;
            let engine = RateEngine::new(cfg.engine, cfg.species, DelayMatrix::ones(cfg.n), None)?;
            let grid = landscape(
                &engine,
                &a,
                &cfg.arrival.taus,
                cfg.arrival.delta_omega,
                &axes,
                *max_points,
            )?;
            let mut w = cli.sink()?;
            writeln!(w, "# config_hash={}", cfg.hash())?;
            let mut csv = csv::Writer::from_writer(w);
            let mut header: Vec<String> = axes
                .iter()
                .map(|ax| format!("delay_{}", ax.particle + 1))
                .collect();
            header.push("rate".into());
            csv.write_record(&header)?;
            for p in &grid {
                let mut rec: Vec<String> = p.offsets.iter().map(f64::to_string).collect();
                rec.push(p.rate.to_string());
                csv.write_record(&rec)?;
            }
            csv.flush()?;
        }
        Command::Analyze { n, bins } => {
            write_json(cli.sink()?, &analyze(*n, *bins)?)?;
        }
        Command::GamasTable { n, json } => {
            let table = gamas_table(*n)?;
            let mut w = cli.sink()?;
            if *json {
                write_json(w, &table)?;
            } else {
                write!(w, "{table}")?;
                w.flush()?;
            }
        }
    }
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
