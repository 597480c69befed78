//! Per-partition construction.
//!
//! Keys are distributed into `B` buckets by the assignment function, buckets
//! are processed largest first, and for each bucket the smallest seed
//! `p = s·m + d` is searched such that the positions `(h(x, s) + d) mod m` of
//! its keys are pairwise distinct and still free.

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::assignment::{bucket_count, default_epsilon, AssignmentKind, AssignmentSpec, AssignmentTable};
use crate::bits::BitVec;
use crate::encoders::SeedEncoding;
use crate::error::{Error, Result};
use crate::hashing::{normalized_hash, position_hash, position_hash_mixed, seed_mix, GlobalSeed, MasterHash};

pub const DEFAULT_SEED_CAP: u64 = 1 << 40;

/// Processing order of the non-empty buckets of a partition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BucketOrder {
    /// Largest first; among equal sizes, larger bucket index (smaller expected size) first.
    #[default]
    IncreasingExpectedSize,
    /// Largest first; among equal sizes, smaller bucket index first.
    DecreasingExpectedSize,
    /// Smallest first. Only useful to measure how much worse it is.
    SmallestFirst,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuildConfig {
    /// Average bucket size.
    pub lambda: f64,
    /// Expected partition size.
    pub partition_size: f64,
    pub assignment: AssignmentSpec,
    /// Largest seed value the search may return.
    pub seed_cap: u64,
    pub global_seed: GlobalSeed,
    pub encoding: SeedEncoding,
    pub order: BucketOrder,
    pub singleton_fast_path: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self::new(8.0, 2500.0)
    }
}

impl BuildConfig {
    /// `β_ε` with the default `ε`, interleaved Rice coding.
    pub fn new(lambda: f64, partition_size: f64) -> Self {
        Self {
            lambda,
            partition_size,
            assignment: AssignmentSpec::beta_eps(default_epsilon(lambda, partition_size)),
            seed_cap: DEFAULT_SEED_CAP,
            global_seed: GlobalSeed(0),
            encoding: SeedEncoding::InterleavedRice,
            order: BucketOrder::default(),
            singleton_fast_path: true,
        }
    }

    pub fn with_assignment(mut self, kind: AssignmentKind) -> Self {
        self.assignment = match kind {
            AssignmentKind::BetaEps => {
                AssignmentSpec::beta_eps(default_epsilon(self.lambda, self.partition_size))
            }
            AssignmentKind::Uniform => AssignmentSpec::uniform(),
            AssignmentKind::Skew => AssignmentSpec::skew(),
            AssignmentKind::BetaStar => AssignmentSpec::beta_star(),
        };
        self
    }

    pub fn with_encoding(mut self, encoding: SeedEncoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.global_seed = GlobalSeed(seed);
        self
    }

    pub fn with_order(mut self, order: BucketOrder) -> Self {
        self.order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.is_nan() || self.lambda <= 0.0 || !self.lambda.is_finite() {
            return Err(Error::InvalidConfig(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.partition_size.is_nan() || self.partition_size < 1.0 || !self.partition_size.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "partition size must be at least 1, got {}",
                self.partition_size
            )));
        }
        if (self.seed_cap as f64) < self.partition_size {
            return Err(Error::InvalidConfig("seed cap must allow one full displacement sweep".into()));
        }
        self.assignment.validate()
    }

    pub fn buckets(&self) -> usize {
        bucket_count(self.partition_size, self.lambda)
    }

    pub fn table(&self) -> Result<AssignmentTable> {
        AssignmentTable::tabulate(self.assignment)
    }
}

/// Seed `p = s·m + d` of one bucket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeedValue(pub u64);

impl SeedValue {
    pub fn from_parts(s: u64, d: u64, m: u64) -> Self {
        debug_assert!(d < m);
        SeedValue(s * m + d)
    }

    pub fn s(self, m: u64) -> u64 {
        self.0 / m
    }

    pub fn d(self, m: u64) -> u64 {
        self.0 % m
    }
}

/// Position of `h` within a partition of size `m` under seed `p`.
#[inline]
pub fn place(h: MasterHash, p: u64, m: u64) -> u64 {
    let base = position_hash(h, p / m, m);
    let pos = base + p % m;
    if pos >= m {
        pos - m
    } else {
        pos
    }
}

/// A bucket with its 1-based index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bucket {
    pub index: usize,
    pub keys: Vec<MasterHash>,
}

/// Result of building one partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSeeds {
    /// `seeds[i]` belongs to bucket `i + 1`; empty buckets hold 0.
    pub seeds: Vec<u64>,
    /// Candidate-position evaluations over the whole partition.
    pub trial_count: u64,
    /// Same, split by bucket (`bucket_trials[i]` for bucket `i + 1`).
    pub bucket_trials: Vec<u64>,
    /// Number of keys in each bucket.
    pub bucket_sizes: Vec<u32>,
}

/// Keys of one partition grouped by bucket, stored flat.
struct Grouped {
    keys: Vec<MasterHash>,
    /// bucket `i + 1` holds `keys[starts[i]..starts[i + 1]]`
    starts: Vec<u32>,
}

impl Grouped {
    fn new(partition: &[MasterHash], table: &AssignmentTable, buckets: usize) -> Self {
        let ids: Vec<u32> = partition
            .iter()
            .map(|&h| table.bucket_for_hash(normalized_hash(h), buckets) as u32 - 1)
            .collect();
        let mut starts = vec![0u32; buckets + 1];
        for &b in &ids {
            starts[b as usize + 1] += 1;
        }
        for i in 0..buckets {
            starts[i + 1] += starts[i];
        }
        let mut fill = starts.clone();
        let mut keys = vec![MasterHash::default(); partition.len()];
        for (&h, &b) in partition.iter().zip(&ids) {
            keys[fill[b as usize] as usize] = h;
            fill[b as usize] += 1;
        }
        Self { keys, starts }
    }

    fn bucket(&self, i: usize) -> &[MasterHash] {
        &self.keys[self.starts[i] as usize..self.starts[i + 1] as usize]
    }

    fn sizes(&self) -> Vec<usize> {
        self.starts.windows(2).map(|w| (w[1] - w[0]) as usize).collect()
    }
}

/// Groups a partition's keys into `B` buckets (index order, possibly empty).
pub fn assign_buckets(partition: &[MasterHash], table: &AssignmentTable, buckets: usize) -> Vec<Bucket> {
    let g = Grouped::new(partition, table, buckets.max(1));
    (0..buckets.max(1))
        .map(|i| Bucket { index: i + 1, keys: g.bucket(i).to_vec() })
        .collect()
}

/// Processing order for buckets given their sizes in index order.
///
/// Returns 1-based indices of the non-empty buckets.
pub fn order_by_sizes(sizes: &[usize], order: BucketOrder) -> Vec<usize> {
    let mut idx: Vec<usize> = (1..=sizes.len()).filter(|&i| sizes[i - 1] > 0).collect();
    match order {
        BucketOrder::IncreasingExpectedSize => idx.sort_unstable_by_key(|&i| (Reverse(sizes[i - 1]), Reverse(i))),
        BucketOrder::DecreasingExpectedSize => idx.sort_unstable_by_key(|&i| (Reverse(sizes[i - 1]), i)),
        BucketOrder::SmallestFirst => idx.sort_unstable_by_key(|&i| (sizes[i - 1], i)),
    }
    idx
}

/// Largest first, ties by descending index. Empty buckets are left out.
pub fn order_buckets(buckets: &[Bucket]) -> Vec<usize> {
    let mut idx: Vec<usize> = buckets.iter().filter(|b| !b.keys.is_empty()).map(|b| b.index).collect();
    let size_of = |i: usize| buckets.iter().find(|b| b.index == i).map_or(0, |b| b.keys.len());
    idx.sort_unstable_by_key(|&i| (Reverse(size_of(i)), Reverse(i)));
    idx
}

fn has_duplicate_lo(keys: &[MasterHash]) -> bool {
    if keys.len() <= 16 {
        keys.iter().enumerate().any(|(i, a)| keys[i + 1..].iter().any(|b| b.lo == a.lo))
    } else {
        let mut lo: Vec<u64> = keys.iter().map(|h| h.lo).collect();
        lo.sort_unstable();
        lo.windows(2).any(|w| w[0] == w[1])
    }
}

/// Searches the smallest seed placing `keys` onto free slots of `occupied` and
/// marks those slots. Returns the seed and the number of candidate-position
/// evaluations spent.
pub fn search_bucket(
    keys: &[MasterHash],
    m: u64,
    occupied: &mut BitVec,
    seed_cap: u64,
) -> Result<(SeedValue, u64)> {
    let mut scratch = Scratch::new(m);
    search_bucket_with(keys, m, occupied, seed_cap, &mut scratch)
}

/// Reusable buffers for the search within one partition.
struct Scratch {
    positions: Vec<u64>,
    /// All clear between calls.
    marks: BitVec,
}

impl Scratch {
    fn new(m: u64) -> Self {
        Self { positions: Vec::new(), marks: BitVec::zeros(m as usize) }
    }
}

/// Whether `positions` are pairwise distinct. Also returns the number of
/// positions examined, counting the one that repeats.
fn distinct(positions: &[u64], marks: &mut BitVec) -> (bool, u64) {
    let mut seen = 0;
    let mut ok = true;
    for &p in positions {
        if marks.get(p as usize) {
            ok = false;
            seen += 1;
            break;
        }
        marks.set(p as usize, true);
        seen += 1;
    }
    for &p in &positions[..if ok { seen } else { seen - 1 }] {
        marks.set(p as usize, false);
    }
    (ok, seen as u64)
}

fn search_bucket_with(
    keys: &[MasterHash],
    m: u64,
    occupied: &mut BitVec,
    seed_cap: u64,
    scratch: &mut Scratch,
) -> Result<(SeedValue, u64)> {
    debug_assert!(!keys.is_empty() && occupied.len() as u64 == m);
    // Equal low halves collide under every seed.
    if has_duplicate_lo(keys) {
        return Err(Error::SeedExhausted { seed_cap });
    }
    let positions = &mut scratch.positions;
    let mut trials = 0u64;
    let mut s = 0u64;
    loop {
        let base = s.checked_mul(m).filter(|&b| b <= seed_cap).ok_or(Error::SeedExhausted { seed_cap })?;
        let mix = seed_mix(s);
        positions.clear();
        positions.extend(keys.iter().map(|h| position_hash_mixed(h.lo, mix, m)));
        // a displacement moves all keys together, so a collision inside the
        // bucket rules out every d for this s
        if keys.len() > 1 {
            let (ok, seen) = distinct(positions, &mut scratch.marks);
            trials += seen;
            if !ok {
                s += 1;
                continue;
            }
        }
        let sweep = m.min(seed_cap - base + 1);
        for d in 0..sweep {
            let mut taken = 0;
            let mut ok = true;
            for &p in positions.iter() {
                let mut q = p + d;
                if q >= m {
                    q -= m;
                }
                let q = q as usize;
                if occupied.get(q) {
                    ok = false;
                    break;
                }
                occupied.set(q, true);
                taken += 1;
            }
            trials += taken as u64 + !ok as u64;
            if ok {
                return Ok((SeedValue(base + d), trials));
            }
            for &p in &positions[..taken] {
                let mut q = p + d;
                if q >= m {
                    q -= m;
                }
                occupied.set(q as usize, false);
            }
        }
        s += 1;
    }
}

/// Direct placement of a single key: first free slot at or after `h(x, 0)`,
/// wrapping around. Gives the same seed and trial count as [`search_bucket`].
pub fn search_singleton_fast(key: MasterHash, m: u64, occupied: &mut BitVec) -> (SeedValue, u64) {
    let base = position_hash(key, 0, m) as usize;
    let slot = occupied
        .next_zero(base)
        .or_else(|| occupied.next_zero(0))
        .expect("no free slot for singleton bucket");
    occupied.set(slot, true);
    let d = (slot + m as usize - base) as u64 % m;
    (SeedValue(d), d + 1)
}

/// Builds the seeds of one partition, whose keys must be distinct.
pub fn build_partition(partition: &[MasterHash], config: &BuildConfig, table: &AssignmentTable) -> Result<PartitionSeeds> {
    let buckets = config.buckets();
    let m = partition.len() as u64;
    let mut seeds = vec![0u64; buckets];
    let mut bucket_trials = vec![0u64; buckets];
    if m == 0 {
        return Ok(PartitionSeeds { seeds, trial_count: 0, bucket_trials, bucket_sizes: vec![0; buckets] });
    }
    let grouped = Grouped::new(partition, table, buckets);
    let sizes = grouped.sizes();
    let order = order_by_sizes(&sizes, config.order);
    let mut occupied = BitVec::zeros(m as usize);
    let mut scratch = Scratch::new(m);
    let mut total = 0u64;
    for i in order {
        let keys = grouped.bucket(i - 1);
        let (seed, trials) = if keys.len() == 1 && config.singleton_fast_path {
            search_singleton_fast(keys[0], m, &mut occupied)
        } else {
            search_bucket_with(keys, m, &mut occupied, config.seed_cap, &mut scratch)?
        };
        seeds[i - 1] = seed.0;
        bucket_trials[i - 1] = trials;
        total += trials;
    }
    let bucket_sizes = sizes.iter().map(|&s| s as u32).collect();
    Ok(PartitionSeeds { seeds, trial_count: total, bucket_trials, bucket_sizes })
}
