//! Benchmark commands behind the `pbhash` binary.
//!
//! Every timing is preceded by a full bijection check. Queries are timed in a
//! single pass over the keys in shuffled order, without warm-up.

use std::fmt;
use std::hint::black_box;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{measure_work, WorkReport, WorkRow};
use crate::assignment::{AssignmentKind, AssignmentSpec};
use crate::builder::BuildConfig;
use crate::encoders::SeedEncoding;
use crate::keys::{gen_keys, KeyCorpus, KeySet};
use crate::mphf::{verify_bijection, Mphf};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Human,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "human" => Ok(OutputFormat::Human),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown output format `{s}`")),
        }
    }
}

#[derive(Debug)]
pub enum BenchError {
    Validation(String),
    Build(crate::Error),
    /// The function does not map the key corpus bijectively.
    Verification(String),
    Io(String),
}

impl BenchError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Validation(_) => 2,
            BenchError::Build(_) | BenchError::Verification(_) | BenchError::Io(_) => 3,
        }
    }
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Validation(m) => write!(f, "invalid configuration: {m}"),
            BenchError::Build(e) => write!(f, "build failed: {e}"),
            BenchError::Verification(m) => write!(f, "verification failed: {m}"),
            BenchError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for BenchError {}

impl From<crate::Error> for BenchError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::InvalidConfig(m) => BenchError::Validation(m),
            crate::Error::Domain { .. } => BenchError::Validation(e.to_string()),
            other => BenchError::Build(other),
        }
    }
}

fn io_err(e: impl fmt::Display) -> BenchError {
    BenchError::Io(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n: usize,
    pub lambda: f64,
    pub partition_size: f64,
    pub encoder: SeedEncoding,
    pub assignment: AssignmentKind,
    /// Overrides the default `ε` of `β_ε`.
    pub epsilon: Option<f64>,
    pub threads: usize,
    pub seed: u64,
    pub output: OutputFormat,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n: 1_000_000,
            lambda: 8.0,
            partition_size: 2500.0,
            encoder: SeedEncoding::InterleavedRice,
            assignment: AssignmentKind::BetaEps,
            epsilon: None,
            threads: 1,
            seed: 1,
            output: OutputFormat::Human,
        }
    }
}

impl BenchConfig {
    pub fn build_config(&self) -> Result<BuildConfig, BenchError> {
        if self.n == 0 {
            return Err(BenchError::Validation("n must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(BenchError::Validation("threads must be at least 1".into()));
        }
        let mut cfg = BuildConfig::new(self.lambda, self.partition_size)
            .with_assignment(self.assignment)
            .with_encoding(self.encoder)
            .with_seed(self.seed);
        if let Some(eps) = self.epsilon {
            if self.assignment != AssignmentKind::BetaEps {
                return Err(BenchError::Validation("--epsilon only applies to beta-eps".into()));
            }
            cfg.assignment = AssignmentSpec::beta_eps(eps);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, BenchError> {
        rayon::ThreadPoolBuilder::new().num_threads(self.threads).build().map_err(io_err)
    }

    pub fn keys(&self) -> KeyCorpus {
        gen_keys(self.n, self.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub n: u64,
    pub lambda: f64,
    pub partition_size: f64,
    pub encoder: SeedEncoding,
    pub assignment: String,
    pub epsilon: f64,
    pub threads: usize,
    pub seed: u64,
    pub attempts: u32,
    pub num_partitions: u64,
    pub buckets: usize,
    pub size_bytes: usize,
    pub bits_per_key: f64,
    pub trials_per_key: f64,
    pub construction_ns_per_key: f64,
}

/// Generates the corpus, builds, verifies and optionally saves.
pub fn cmd_build(cfg: &BenchConfig, save: Option<&Path>) -> Result<(BuildReport, Mphf), BenchError> {
    let build_cfg = cfg.build_config()?;
    let keys = cfg.keys();
    let pool = cfg.pool()?;
    let start = Instant::now();
    let build = pool.install(|| Mphf::build_detailed(&keys, &build_cfg))?;
    let elapsed = start.elapsed();
    let f = build.mphf.clone();
    if !verify_bijection(&f, &keys) {
        return Err(BenchError::Build(crate::Error::Format("built function is not a bijection".into())));
    }
    if let Some(path) = save {
        f.save(path).map_err(|e| BenchError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    let report = BuildReport {
        n: f.n(),
        lambda: f.lambda(),
        partition_size: f.partition_size(),
        encoder: f.encoding(),
        assignment: f.assignment().kind.name().to_string(),
        epsilon: f.assignment().epsilon,
        threads: cfg.threads,
        seed: cfg.seed,
        attempts: build.attempts,
        num_partitions: f.layout().num_partitions(),
        buckets: f.buckets(),
        size_bytes: f.to_bytes().len(),
        bits_per_key: f.bits_per_key(),
        trials_per_key: build.trial_count() as f64 / f.n() as f64,
        construction_ns_per_key: elapsed.as_nanos() as f64 / f.n() as f64,
    };
    Ok((report, f))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    pub n: u64,
    pub encoder: SeedEncoding,
    pub bits_per_key: f64,
    pub verified: bool,
    pub ns_per_query: f64,
}

/// Times one pass of queries in random order. Loads the function from `load`
/// or builds it from the config; `keys` overrides the generated corpus.
pub fn cmd_query_bench(
    cfg: &BenchConfig,
    load: Option<&Path>,
    keys: Option<KeyCorpus>,
) -> Result<QueryReport, BenchError> {
    let keys = keys.unwrap_or_else(|| cfg.keys());
    let f = match load {
        Some(path) => Mphf::load(path).map_err(|e| BenchError::Io(format!("cannot load {}: {e}", path.display())))?,
        None => {
            let build_cfg = cfg.build_config()?;
            cfg.pool()?.install(|| Mphf::build(&keys, &build_cfg))?
        }
    };
    if !verify_bijection(&f, &keys) {
        return Err(BenchError::Verification("function is not a bijection on the key corpus".into()));
    }
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let start = Instant::now();
    let mut acc = 0u64;
    for &i in &order {
        acc = acc.wrapping_add(f.query(black_box(keys.key(i))));
    }
    let elapsed = start.elapsed();
    black_box(acc);
    Ok(QueryReport {
        n: f.n(),
        encoder: f.encoding(),
        bits_per_key: f.bits_per_key(),
        verified: true,
        ns_per_query: elapsed.as_nanos() as f64 / keys.len() as f64,
    })
}

/// Work sweep over assignment functions and `λ` values on one corpus.
pub fn cmd_analyze(
    cfg: &BenchConfig,
    assignments: &[AssignmentKind],
    lambdas: &[f64],
) -> Result<Vec<WorkReport>, BenchError> {
    cfg.build_config()?;
    let keys = cfg.keys();
    let mut configs = Vec::new();
    for &lambda in lambdas {
        for &kind in assignments {
            let c = BenchConfig { lambda, assignment: kind, epsilon: None, ..cfg.clone() };
            configs.push(c.build_config()?);
        }
    }
    let pool = cfg.pool()?;
    Ok(pool.install(|| measure_work(&keys, &configs))?)
}

fn csv_string<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("serializable row");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

pub fn render_build(r: &BuildReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(r).unwrap(),
        OutputFormat::Csv => csv_string(std::slice::from_ref(r)),
        OutputFormat::Human => format!(
            "n = {}, λ = {}, P = {}, {} / {} (ε = {:.4})\n\
             {} partitions × {} buckets, {} global seed attempt(s)\n\
             space: {:.4} bits/key ({} bytes)\n\
             search: {:.1} trials/key\n\
             construction: {:.1} ns/key on {} thread(s)\n",
            r.n,
            r.lambda,
            r.partition_size,
            r.assignment,
            r.encoder,
            r.epsilon,
            r.num_partitions,
            r.buckets,
            r.attempts,
            r.bits_per_key,
            r.size_bytes,
            r.trials_per_key,
            r.construction_ns_per_key,
            r.threads
        ),
    }
}

pub fn render_query(r: &QueryReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(r).unwrap(),
        OutputFormat::Csv => csv_string(std::slice::from_ref(r)),
        OutputFormat::Human => format!(
            "n = {}, {} at {:.4} bits/key, bijection verified\nquery: {:.1} ns/query (single pass, random order)\n",
            r.n, r.encoder, r.bits_per_key, r.ns_per_query
        ),
    }
}

pub fn render_analysis(reports: &[WorkReport], format: OutputFormat) -> String {
    let rows: Vec<WorkRow> = reports.iter().map(|r| r.csv_row()).collect();
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&rows).unwrap(),
        OutputFormat::Csv => csv_string(&rows),
        OutputFormat::Human => {
            let mut s = format!("{:<10} {:>6} {:>8} {:>14} {:>10} {:>9}\n", "γ", "λ", "P", "trials/key", "bits/key", "seconds");
            for r in &rows {
                s += &format!(
                    "{:<10} {:>6} {:>8} {:>14.2} {:>10.4} {:>9.3}\n",
                    r.assignment, r.lambda, r.partition_size, r.trials_per_key, r.bits_per_key, r.wall_seconds
                );
            }
            s
        }
    }
}
