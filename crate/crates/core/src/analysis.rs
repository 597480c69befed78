//! Cost model oracles and empirical work measurement.
//!
//! Placing a bucket of `s` keys into a table of size `n` at load `α` costs
//! between `(1 − α)^−s` and `s·(1 − α')^−s` candidate seeds, with
//! `α' = α + (s − 1)/n`. The search over buckets processed in a fixed order is
//! modelled as a chain that advances with probability `p_i` and restarts
//! otherwise; its expected length is `Σ_i 1/(p_i ⋯ p_k)`.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::AssignmentTable;
use crate::builder::BuildConfig;
use crate::error::{Error, Result};
use crate::keys::KeySet;
use crate::mphf::{Build, Mphf};

/// One placement: bucket size `s` into a table of size `n` at load `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostQuery {
    pub s: u64,
    pub alpha: f64,
    pub n: u64,
}

/// Lower and upper bound on the expected number of seeds tried.
pub fn cost_bounds(q: CostQuery) -> Result<(f64, f64)> {
    if q.s == 0 || q.n == 0 || !(0.0..1.0).contains(&q.alpha) {
        return Err(Error::Domain { value: q.alpha, domain: "α ∈ [0, 1), s ≥ 1, n ≥ 1" });
    }
    let alpha2 = q.alpha + (q.s - 1) as f64 / q.n as f64;
    if alpha2 >= 1.0 {
        return Err(Error::Domain { value: alpha2, domain: "α + (s − 1)/n < 1" });
    }
    let s = q.s as f64;
    Ok(((1.0 - q.alpha).powf(-s), s * (1.0 - alpha2).powf(-s)))
}

/// `n · H_k`: cost of placing `k` singleton buckets last into `n` slots.
pub fn coupon_work(k: u64, n: u64) -> f64 {
    // sum small terms first
    n as f64 * (1..=k).rev().map(|i| 1.0 / i as f64).sum::<f64>()
}

/// Success probabilities `p_1..p_k` of a restart chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    probs: Vec<f64>,
}

impl ChainSpec {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some(&p) = probs.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::Domain { value: p, domain: "(0, 1)" });
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

const LOG_SWITCH: f64 = 1e-300;

/// `Σ_{i=1}^k 1/(p_i ⋯ p_k)`, accumulated right to left. Moves to log space
/// once the running product drops below `1e-300`; the result may be infinite.
pub fn chain_work(spec: &ChainSpec) -> f64 {
    chain_log_work(spec).exp()
}

/// Natural logarithm of [`chain_work`], finite whenever the chain is.
pub fn chain_log_work(spec: &ChainSpec) -> f64 {
    let probs = &spec.probs;
    let mut prod = 1.0f64;
    let mut sum = 0.0f64;
    let mut idx = probs.len();
    while idx > 0 {
        let next = prod * probs[idx - 1];
        if next < LOG_SWITCH {
            break;
        }
        prod = next;
        sum += 1.0 / prod;
        idx -= 1;
    }
    let mut log_prod = prod.ln();
    let mut log_sum = sum.ln();
    for &p in probs[..idx].iter().rev() {
        log_prod += p.ln();
        let t = -log_prod;
        let (hi, lo) = if t > log_sum { (t, log_sum) } else { (log_sum, t) };
        log_sum = hi + (lo - hi).exp().ln_1p();
    }
    log_sum
}

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Simulates the chain `runs` times from state 0 and counts steps until state `k`.
pub fn chain_simulate(spec: &ChainSpec, runs: u64, seed: u64) -> Estimate {
    assert!(runs >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = spec.probs.len();
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for _ in 0..runs {
        let mut state = 0;
        let mut steps = 0u64;
        while state < k {
            steps += 1;
            if rng.random_bool(spec.probs[state]) {
                state += 1;
            } else {
                state = 0;
            }
        }
        let s = steps as f64;
        sum += s;
        sum_sq += s * s;
    }
    let r = runs as f64;
    let mean = sum / r;
    let var = if runs > 1 { (sum_sq - r * mean * mean).max(0.0) / (r - 1.0) } else { 0.0 };
    Estimate { mean, std_error: (var / r).sqrt() }
}

fn exact_work(probs: &[BigRational]) -> BigRational {
    let mut prod = BigRational::one();
    let mut sum = BigRational::zero();
    for p in probs.iter().rev() {
        prod *= p;
        sum += prod.recip();
    }
    sum
}

/// Compares, in exact rational arithmetic, the work of splitting a strictly
/// decreasing chain after `k − i` versus after `i` steps:
/// `w(p_1..p_{k−i}) + w(p_{k−i+1}..p_k) < w(p_1..p_i) + w(p_{i+1}..p_k)`.
pub fn exchange_check(probs: &[f64], i: usize) -> Result<bool> {
    let k = probs.len();
    if probs.windows(2).any(|w| w[1] >= w[0]) || probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::InvalidConfig("probabilities must be strictly decreasing in (0, 1)".into()));
    }
    if i < 1 || 2 * i >= k {
        return Err(Error::InvalidConfig(format!("split {i} must satisfy 1 ≤ i < k/2 for k = {k}")));
    }
    let exact: Vec<BigRational> = probs.iter().map(|&p| BigRational::from_float(p).unwrap()).collect();
    let lhs = exact_work(&exact[..k - i]) + exact_work(&exact[k - i..]);
    let rhs = exact_work(&exact[..i]) + exact_work(&exact[i..]);
    Ok(lhs < rhs)
}

/// `λ_i = n·(γ⁻¹(i/B) − γ⁻¹((i − 1)/B))` for `i = 1..=B`.
pub fn expected_bucket_sizes(table: &AssignmentTable, n: f64, buckets: usize) -> Result<Vec<f64>> {
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(buckets);
    for i in 1..=buckets {
        let x = table.inverse((i as f64 / buckets as f64).min(1.0))?;
        out.push(n * (x - prev));
        prev = x;
    }
    Ok(out)
}

#[inline]
fn ceil_log2(x: u128) -> u64 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros() as u64
    }
}

/// Elias-δ code length `⌈log₂ x⌉ + 2⌈log₂(⌈log₂ x⌉ + 1)⌉ + 1` of `x = v + 1`.
pub fn elias_delta_len(v: u64) -> u64 {
    let l = ceil_log2(v as u128 + 1);
    l + 2 * ceil_log2(l as u128 + 1) + 1
}

/// Total Elias-δ size of `seeds`, each shifted by one.
pub fn elias_delta_bits(seeds: &[u64]) -> u64 {
    seeds.iter().map(|&v| elias_delta_len(v)).sum()
}

/// Search effort of one build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkReport {
    pub assignment: String,
    pub lambda: f64,
    pub partition_size: f64,
    pub n: u64,
    /// Summed over partitions, indexed by bucket index minus one.
    pub bucket_trials: Vec<u64>,
    pub total_trials: u64,
    pub trials_per_key: f64,
    /// `size_histogram[s]` counts buckets holding `s` keys.
    pub size_histogram: Vec<u64>,
    /// Trials per key of each partition.
    pub partition_trials_per_key: Vec<f64>,
    pub bits_per_key: f64,
    pub wall_seconds: f64,
}

impl WorkReport {
    pub fn from_build(build: &Build, config: &BuildConfig, wall_seconds: f64) -> Self {
        let buckets = config.buckets();
        let mut bucket_trials = vec![0u64; buckets];
        let mut size_histogram = Vec::new();
        for p in &build.partitions {
            for (acc, t) in bucket_trials.iter_mut().zip(&p.bucket_trials) {
                *acc += t;
            }
            for &s in &p.bucket_sizes {
                if size_histogram.len() <= s as usize {
                    size_histogram.resize(s as usize + 1, 0);
                }
                size_histogram[s as usize] += 1;
            }
        }
        let total_trials = bucket_trials.iter().sum();
        let n = build.mphf.n();
        let partition_trials_per_key = build
            .partitions
            .iter()
            .zip(build.mphf.layout().sizes())
            .filter(|(_, m)| *m > 0)
            .map(|(p, m)| p.trial_count as f64 / m as f64)
            .collect();
        Self {
            assignment: config.assignment.kind.name().to_string(),
            lambda: config.lambda,
            partition_size: config.partition_size,
            n,
            bucket_trials,
            total_trials,
            trials_per_key: total_trials as f64 / n as f64,
            size_histogram,
            partition_trials_per_key,
            bits_per_key: build.mphf.bits_per_key(),
            wall_seconds,
        }
    }

    /// Mean and standard error of trials per key over partitions.
    pub fn partition_estimate(&self) -> Estimate {
        let v = &self.partition_trials_per_key;
        let r = v.len() as f64;
        let mean = v.iter().sum::<f64>() / r;
        let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0) } else { 0.0 };
        Estimate { mean, std_error: (var / r).sqrt() }
    }

    pub fn csv_row(&self) -> WorkRow {
        WorkRow {
            assignment: self.assignment.clone(),
            lambda: self.lambda,
            partition_size: self.partition_size,
            trials_per_key: self.trials_per_key,
            bits_per_key: self.bits_per_key,
            wall_seconds: self.wall_seconds,
        }
    }
}

/// One CSV line of an analysis sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkRow {
    pub assignment: String,
    pub lambda: f64,
    pub partition_size: f64,
    pub trials_per_key: f64,
    pub bits_per_key: f64,
    pub wall_seconds: f64,
}

/// Builds `keys` under every config and reports the search effort.
pub fn measure_work<K: KeySet + ?Sized>(keys: &K, configs: &[BuildConfig]) -> Result<Vec<WorkReport>> {
    configs
        .iter()
        .map(|c| {
            let start = Instant::now();
            let build = Mphf::build_detailed(keys, c)?;
            Ok(WorkReport::from_build(&build, c, start.elapsed().as_secs_f64()))
        })
        .collect()
}

/// Writes report rows as CSV with a header line.
pub fn write_csv<W: std::io::Write>(reports: &[WorkReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}
