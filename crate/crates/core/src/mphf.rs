//! The queryable minimal perfect hash function and its file format.
//!
//! Layout (little-endian): magic `PHOB`, `u32` version, `u64 n`,
//! `u64` partition count, `f64 λ`, `f64 P`, `u8` assignment kind, `f64 ε`,
//! `u64` global seed, `u8` delta width followed by the packed offset deltas,
//! the seed section (see [`crate::encoders`]) and a `u64` xxh3 checksum of
//! everything before it. The first 16 bytes are not counted in bits/key.

use std::path::Path;

use rayon::prelude::*;
use xxhash_rust::xxh3::xxh3_64;

use crate::assignment::{bucket_count, AssignmentKind, AssignmentSpec, AssignmentTable};
use crate::bits::{bit_length, PackedArray, SignedArray};
use crate::builder::{build_partition, place, BuildConfig, PartitionSeeds};
use crate::encoders::{SeedEncoding, SeedStore};
use crate::error::{Error, Result};
use crate::hashing::{master_hash, normalized_hash, GlobalSeed, MasterHash};
use crate::keys::KeySet;
use crate::partition::{partition, partition_count, PartitionLayout};
use crate::serial::{ByteReader, ByteWriter};

pub const MAGIC: &[u8; 4] = b"PHOB";
pub const VERSION: u32 = 1;
/// Magic, version and `n`.
pub const HEADER_BYTES: usize = 16;
/// Global seeds tried after the first one fails.
pub const MAX_RETRIES: u32 = 3;

/// Fixed fields after the header: partition count, λ, P, kind, ε, global seed.
const CONFIG_BYTES: usize = 8 + 8 + 8 + 1 + 8 + 8;
const CHECKSUM_BYTES: usize = 8;

/// Minimal perfect hash function mapping `n` keys onto `[0, n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mphf {
    n: u64,
    global_seed: GlobalSeed,
    lambda: f64,
    partition_size: f64,
    table: AssignmentTable,
    buckets: usize,
    layout: PartitionLayout,
    seeds: SeedStore,
}

/// A build together with the per-partition search results.
#[derive(Clone, Debug)]
pub struct Build {
    pub mphf: Mphf,
    pub partitions: Vec<PartitionSeeds>,
    /// Global seeds tried, including the successful one.
    pub attempts: u32,
}

impl Build {
    pub fn trial_count(&self) -> u64 {
        self.partitions.iter().map(|p| p.trial_count).sum()
    }
}

impl Mphf {
    pub fn build<K: KeySet + ?Sized>(keys: &K, config: &BuildConfig) -> Result<Self> {
        Self::build_detailed(keys, config).map(|b| b.mphf)
    }

    /// Builds and keeps the raw seeds and trial counts of every partition.
    ///
    /// If some bucket finds no seed, the whole construction is repeated with
    /// the next global seed, at most [`MAX_RETRIES`] times.
    pub fn build_detailed<K: KeySet + ?Sized>(keys: &K, config: &BuildConfig) -> Result<Build> {
        config.validate()?;
        if keys.is_empty() {
            return Err(Error::InvalidConfig("key set is empty".into()));
        }
        let table = config.table()?;
        for attempt in 0..=MAX_RETRIES {
            let seed = GlobalSeed(config.global_seed.0.wrapping_add(attempt as u64));
            let hashes: Vec<MasterHash> =
                (0..keys.len()).into_par_iter().map(|i| master_hash(keys.key(i), seed)).collect();
            match Self::build_from_hashes(hashes, seed, config, &table) {
                Ok((mphf, partitions)) => return Ok(Build { mphf, partitions, attempts: attempt + 1 }),
                Err(Error::SeedExhausted { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::DuplicateKeys { attempts: MAX_RETRIES + 1 })
    }

    fn build_from_hashes(
        hashes: Vec<MasterHash>,
        seed: GlobalSeed,
        config: &BuildConfig,
        table: &AssignmentTable,
    ) -> Result<(Self, Vec<PartitionSeeds>)> {
        let n = hashes.len() as u64;
        let (parts, layout) = partition(hashes, config.partition_size)?;
        let partitions = (0..parts.num_partitions())
            .into_par_iter()
            .map(|j| build_partition(parts.partition(j), config, table))
            .collect::<Result<Vec<_>>>()?;
        let buckets = config.buckets();
        let seeds = SeedStore::encode(&partitions, buckets, config.encoding);
        let mphf = Mphf {
            n,
            global_seed: seed,
            lambda: config.lambda,
            partition_size: config.partition_size,
            table: table.clone(),
            buckets,
            layout,
            seeds,
        };
        Ok((mphf, partitions))
    }

    /// Same function with the seeds stored under another encoding.
    pub fn with_encoding(&self, encoding: SeedEncoding) -> Self {
        let raw = self.raw_seeds();
        Self { seeds: SeedStore::encode(&raw, self.buckets, encoding), ..self.clone() }
    }

    /// Decoded seeds, one array of `B` values per partition.
    pub fn raw_seeds(&self) -> Vec<Vec<u64>> {
        (0..self.seeds.num_partitions())
            .map(|j| (1..=self.buckets).map(|i| self.seeds.seed(j, i)).collect())
            .collect()
    }

    /// Index of `key` in `[0, n)`. Keys outside the build set get an arbitrary index in range.
    #[inline]
    pub fn query(&self, key: &[u8]) -> u64 {
        self.query_hash(master_hash(key, self.global_seed))
    }

    #[inline]
    pub fn query_hash(&self, h: MasterHash) -> u64 {
        let j = self.layout.partition_of(h);
        let offset = self.layout.offset_unchecked(j);
        let m = self.layout.offset_unchecked(j + 1) - offset;
        if m == 0 {
            return offset.min(self.n - 1);
        }
        let i = self.table.bucket_for_hash(normalized_hash(h), self.buckets);
        offset + place(h, self.seeds.seed(j, i), m)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn global_seed(&self) -> GlobalSeed {
        self.global_seed
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn partition_size(&self) -> f64 {
        self.partition_size
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn table(&self) -> &AssignmentTable {
        &self.table
    }

    pub fn assignment(&self) -> AssignmentSpec {
        self.table.spec()
    }

    pub fn layout(&self) -> &PartitionLayout {
        &self.layout
    }

    pub fn seeds(&self) -> &SeedStore {
        &self.seeds
    }

    pub fn encoding(&self) -> SeedEncoding {
        self.seeds.encoding()
    }

    /// Serialized size in bits, excluding the 16-byte header.
    pub fn size_bits(&self) -> usize {
        let deltas = self.layout.deltas().packed().bits().len().div_ceil(8);
        (CONFIG_BYTES + 1 + deltas + CHECKSUM_BYTES) * 8 + self.seeds.total_bits()
    }

    pub fn bits_per_key(&self) -> f64 {
        self.size_bits() as f64 / self.n as f64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = ByteWriter::new();
        w.bytes(MAGIC);
        w.u32(VERSION);
        w.u64(self.n);
        w.u64(self.layout.num_partitions());
        w.f64(self.lambda);
        w.f64(self.partition_size);
        let spec = self.table.spec();
        w.u8(spec.kind.tag());
        w.f64(spec.epsilon);
        w.u64(self.global_seed.0);
        let deltas = self.layout.deltas();
        w.u8(deltas.width() as u8);
        w.bits(deltas.packed().bits());
        self.seeds.write(&mut w);
        let mut bytes = w.into_inner();
        let sum = xxh3_64(&bytes);
        bytes.extend_from_slice(&sum.to_le_bytes());
        bytes
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_BYTES + CHECKSUM_BYTES {
            return Err(Error::Format("input too short".into()));
        }
        let (body, sum) = bytes.split_at(bytes.len() - CHECKSUM_BYTES);
        let mut r = ByteReader::new(body);
        if r.take(4)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        if xxh3_64(body).to_le_bytes() != sum {
            return Err(Error::Format("checksum mismatch".into()));
        }
        let n = r.u64()?;
        let num_partitions = r.u64()?;
        let lambda = r.f64()?;
        let partition_size = r.f64()?;
        let kind = AssignmentKind::from_tag(r.u8()?)
            .ok_or_else(|| Error::Format("unknown assignment kind".into()))?;
        let epsilon = r.f64()?;
        let global_seed = GlobalSeed(r.u64()?);

        if n == 0 {
            return Err(Error::Format("empty function".into()));
        }
        let config = BuildConfig { assignment: AssignmentSpec { kind, epsilon }, ..BuildConfig::new(lambda, partition_size) };
        config.validate().map_err(|e| Error::Format(e.to_string()))?;
        if num_partitions != partition_count(n as usize, partition_size) {
            return Err(Error::Format("partition count does not match n and P".into()));
        }
        let table = AssignmentTable::tabulate(config.assignment).map_err(|e| Error::Format(e.to_string()))?;

        let width = r.u8()? as u32;
        if !(1..=64).contains(&width) {
            return Err(Error::Format(format!("bad delta width {width}")));
        }
        let count = num_partitions as usize + 1;
        if (count as u128 * width as u128).div_ceil(8) > r.remaining().len() as u128 {
            return Err(Error::Format("truncated delta section".into()));
        }
        let deltas = SignedArray::from_packed(PackedArray::from_bits(r.bits(count * width as usize)?, width, count));
        let max_abs = (0..count).map(|j| deltas.get(j).unsigned_abs()).max().unwrap_or(0);
        if bit_length(max_abs) + 1 != width {
            return Err(Error::Format("delta width is not minimal".into()));
        }
        let layout = PartitionLayout::from_parts(n, num_partitions, deltas)?;

        let seeds = SeedStore::read(&mut r, num_partitions as usize)?;
        if seeds.buckets() != bucket_count(partition_size, lambda) {
            return Err(Error::Format("bucket count does not match λ and P".into()));
        }
        if !r.remaining().is_empty() {
            return Err(Error::Format("trailing bytes".into()));
        }
        Ok(Mphf { n, global_seed, lambda, partition_size, table, buckets: seeds.buckets(), layout, seeds })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> anyhow::Result<Self> {
        let bytes = std::fs::read(path)?;
        Ok(Self::from_bytes(&bytes)?)
    }
}

/// Checks that `f` maps `keys` onto `[0, n)` without collisions.
pub fn verify_bijection<K: KeySet + ?Sized>(f: &Mphf, keys: &K) -> bool {
    if keys.len() as u64 != f.n() {
        return false;
    }
    let mut seen = crate::bits::BitVec::zeros(keys.len());
    for i in 0..keys.len() {
        let v = f.query(keys.key(i));
        if v >= f.n() || seen.get(v as usize) {
            return false;
        }
        seen.set(v as usize, true);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::gen_keys;

    #[test]
    fn single_key() {
        let f = Mphf::build(&vec!["only"], &BuildConfig::default()).unwrap();
        assert_eq!(f.n(), 1);
        assert_eq!(f.query(b"only"), 0);
        assert_eq!(f.layout().num_partitions(), 1);
    }

    #[test]
    fn empty_and_invalid() {
        let empty: Vec<&[u8]> = Vec::new();
        assert!(matches!(Mphf::build(&empty, &BuildConfig::default()), Err(Error::InvalidConfig(_))));
        let keys = vec!["a", "b"];
        assert!(matches!(Mphf::build(&keys, &BuildConfig::new(0.0, 2500.0)), Err(Error::InvalidConfig(_))));
        assert!(matches!(Mphf::build(&keys, &BuildConfig::new(4.0, 0.5)), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn duplicates_are_reported() {
        let keys = vec!["x", "y", "x", "z"];
        assert_eq!(Mphf::build(&keys, &BuildConfig::default()), Err(Error::DuplicateKeys { attempts: 4 }));
    }

    #[test]
    fn bijection_and_range() {
        let keys = gen_keys(20_000, 11);
        for enc in [SeedEncoding::InterleavedRice, SeedEncoding::InterleavedCompact, SeedEncoding::MonoRice] {
            let f = Mphf::build(&keys, &BuildConfig::new(5.0, 1000.0).with_encoding(enc)).unwrap();
            assert!(verify_bijection(&f, &keys));
            assert!(f.bits_per_key() > std::f64::consts::LOG2_E);
            for k in ["not a key", "", "zzzzzzzzzzzzzzzzzzz"] {
                assert!(f.query(k.as_bytes()) < f.n());
            }
        }
    }

    #[test]
    fn input_order_does_not_matter() {
        let keys = gen_keys(5000, 12);
        let mut rev: Vec<&[u8]> = keys.iter().collect();
        rev.reverse();
        let cfg = BuildConfig::new(4.0, 500.0);
        let a = Mphf::build(&keys, &cfg).unwrap().to_bytes();
        let b = Mphf::build(&rev, &cfg).unwrap().to_bytes();
        assert_eq!(a, b);
    }

    #[test]
    fn reencoding_keeps_queries() {
        let keys = gen_keys(8000, 13);
        let f = Mphf::build(&keys, &BuildConfig::new(4.0, 800.0)).unwrap();
        for enc in [SeedEncoding::InterleavedCompact, SeedEncoding::Mixed(5), SeedEncoding::MonoCompact] {
            let g = f.with_encoding(enc);
            assert_eq!(g.encoding(), enc);
            assert_eq!(g.raw_seeds(), f.raw_seeds());
            assert!(keys.iter().all(|k| g.query(k) == f.query(k)));
        }
    }

    #[test]
    fn size_matches_serialization() {
        let keys = gen_keys(3000, 14);
        for enc in [SeedEncoding::InterleavedRice, SeedEncoding::Mixed(3), SeedEncoding::MonoCompact] {
            let f = Mphf::build(&keys, &BuildConfig::new(3.0, 300.0).with_encoding(enc)).unwrap();
            let bytes = f.to_bytes();
            assert_eq!((bytes.len() - HEADER_BYTES) * 8, f.size_bits());
            let g = Mphf::from_bytes(&bytes).unwrap();
            assert_eq!(g, f);
            assert_eq!(g.to_bytes(), bytes);
        }
    }

    #[test]
    fn rejects_damage() {
        let keys = gen_keys(2000, 15);
        let bytes = Mphf::build(&keys, &BuildConfig::new(3.0, 500.0)).unwrap().to_bytes();
        for cut in [0, 3, 15, 16, 40, bytes.len() / 2, bytes.len() - 1] {
            assert!(Mphf::from_bytes(&bytes[..cut]).is_err());
        }
        for pos in [0, 4, 9, 20, 60, bytes.len() / 2, bytes.len() - 3] {
            let mut bad = bytes.clone();
            bad[pos] ^= 0x10;
            assert!(Mphf::from_bytes(&bad).is_err(), "flip at {pos}");
        }
        let mut long = bytes.clone();
        long.push(0);
        assert!(Mphf::from_bytes(&long).is_err());
    }

    #[test]
    fn hand_built_toy() {
        // two partitions of four keys, uniform assignment, two buckets each
        let hashes: Vec<MasterHash> = (0u64..)
            .map(|i| master_hash(&i.to_le_bytes(), GlobalSeed(0)))
            .take(8)
            .collect();
        let cfg = BuildConfig { assignment: AssignmentSpec::uniform(), ..BuildConfig::new(2.0, 4.0) };
        let table = cfg.table().unwrap();
        let (f, parts) = Mphf::build_from_hashes(hashes.clone(), GlobalSeed(0), &cfg, &table).unwrap();
        assert_eq!(f.layout().num_partitions(), 2);
        let mut outputs = Vec::new();
        for h in &hashes {
            let j = reduce_partition(h.hi, 2);
            let off = f.layout().offset(j).unwrap();
            let m = f.layout().offset(j + 1).unwrap() - off;
            let x = normalized_hash(*h);
            let i = (x * 2.0).ceil().clamp(1.0, 2.0) as usize;
            let p = parts[j].seeds[i - 1];
            let pos = (crate::hashing::position_hash(*h, p / m, m) + p) % m;
            assert_eq!(f.query_hash(*h), off + pos);
            outputs.push(off + pos);
        }
        outputs.sort_unstable();
        assert_eq!(outputs, (0..8).collect::<Vec<_>>());
    }

    fn reduce_partition(hi: u64, k: u64) -> usize {
        ((hi as u128 * k as u128) >> 64) as usize
    }
}
