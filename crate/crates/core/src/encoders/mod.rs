//! Seed storage.
//!
//! Seeds of bucket `i` in different partitions follow the same distribution,
//! so interleaved coding keeps one encoder per bucket index: encoder `i`
//! holds the seed of bucket `i + 1` of every partition and picks its own
//! parameters. A mono layout puts every seed into a single encoder instead.
//!
//! Section layout (little-endian): `u32 B`, `u8 layout` (0 interleaved,
//! 1 mono), then per encoder `u8 kind` (0 Compact, 1 Rice), `u8 param`
//! (width or Rice parameter), `u64 count` and the payload padded to a byte.
//! A Rice payload is the low bits, then the unary high parts, then the
//! select samples at `bit_length(unary length)` bits each.

mod compact;
mod rice;
mod select;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use compact::CompactVector;
pub use rice::{rice_parameter, rice_size, RiceVector};
pub use select::{select_in_word, SelectIndex, SAMPLE_RATE};

use crate::bits::{bit_length, PackedArray};
use crate::builder::PartitionSeeds;
use crate::error::{Error, Result};
use crate::serial::{ByteReader, ByteWriter};

const KIND_COMPACT: u8 = 0;
const KIND_RICE: u8 = 1;
const LAYOUT_INTERLEAVED: u8 = 0;
const LAYOUT_MONO: u8 = 1;

/// Per-encoder metadata: kind, parameter and count.
pub const ENCODER_HEADER_BITS: usize = 8 + 8 + 64;
/// Section metadata: `B` and the layout tag.
pub const SECTION_HEADER_BITS: usize = 32 + 8;

/// How the seeds of a build are stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SeedEncoding {
    /// Interleaved, all Rice (IC-R).
    InterleavedRice,
    /// Interleaved, all Compact (IC-C).
    InterleavedCompact,
    /// Interleaved, the first `t` encoders Compact and the rest Rice.
    Mixed(usize),
    /// One Rice encoder over all seeds.
    MonoRice,
    /// One Compact encoder over all seeds.
    MonoCompact,
}

impl fmt::Display for SeedEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedEncoding::InterleavedRice => f.write_str("ic-r"),
            SeedEncoding::InterleavedCompact => f.write_str("ic-c"),
            SeedEncoding::Mixed(t) => write!(f, "mixed:{t}"),
            SeedEncoding::MonoRice => f.write_str("mono-r"),
            SeedEncoding::MonoCompact => f.write_str("mono-c"),
        }
    }
}

impl FromStr for SeedEncoding {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ic-r" => Ok(SeedEncoding::InterleavedRice),
            "ic-c" => Ok(SeedEncoding::InterleavedCompact),
            "mono-r" => Ok(SeedEncoding::MonoRice),
            "mono-c" => Ok(SeedEncoding::MonoCompact),
            _ => match s.strip_prefix("mixed:") {
                Some(t) => t.parse().map(SeedEncoding::Mixed).map_err(|e| format!("bad compact prefix `{t}`: {e}")),
                None => Err(format!("unknown encoder `{s}`")),
            },
        }
    }
}

impl From<SeedEncoding> for String {
    fn from(e: SeedEncoding) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for SeedEncoding {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

/// A single integer sequence encoder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Encoder {
    Compact(CompactVector),
    Rice(RiceVector),
}

impl Encoder {
    pub fn compact(values: &[u64]) -> Self {
        Encoder::Compact(CompactVector::encode(values))
    }

    pub fn rice(values: &[u64]) -> Self {
        Encoder::Rice(RiceVector::encode_optimal(values))
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        match self {
            Encoder::Compact(c) => c.get(i),
            Encoder::Rice(r) => r.get(i),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Encoder::Compact(c) => c.len(),
            Encoder::Rice(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, Encoder::Compact(_))
    }

    fn payload_bits(&self) -> usize {
        match self {
            Encoder::Compact(c) => c.payload_bits(),
            Encoder::Rice(r) => r.payload_bits(),
        }
    }

    /// Serialized size including metadata and padding.
    pub fn total_bits(&self) -> usize {
        ENCODER_HEADER_BITS + self.payload_bits().div_ceil(8) * 8
    }

    pub fn write(&self, w: &mut ByteWriter) {
        match self {
            Encoder::Compact(c) => {
                w.u8(KIND_COMPACT);
                w.u8(c.width() as u8);
                w.u64(c.len() as u64);
                w.bits(c.packed().bits());
            }
            Encoder::Rice(r) => {
                w.u8(KIND_RICE);
                w.u8(r.parameter() as u8);
                w.u64(r.len() as u64);
                let mut payload = r.lows().bits().clone();
                for i in (0..r.highs().len()).step_by(64) {
                    let take = (r.highs().len() - i).min(64) as u32;
                    payload.push_bits(r.highs().read(i, take), take);
                }
                let width = SelectIndex::sample_width(r.highs().len());
                for &s in r.select().samples() {
                    payload.push_bits(s, width);
                }
                w.bits(&payload);
            }
        }
    }

    pub fn read(r: &mut ByteReader) -> Result<Self> {
        let kind = r.u8()?;
        let param = r.u8()? as u32;
        let count = r.u64()?;
        if param > 64 {
            return Err(Error::Format(format!("encoder parameter {param} exceeds 64")));
        }
        let avail = r.remaining().len() as u128 * 8;
        if count as u128 * param as u128 > avail || (kind == KIND_RICE && count as u128 > avail) {
            return Err(Error::Format("encoder count exceeds input size".into()));
        }
        let count = count as usize;
        let lows_len = count * param as usize;
        match kind {
            KIND_COMPACT => {
                let bits = r.bits(lows_len)?;
                let c = CompactVector::from_packed(PackedArray::from_bits(bits, param, count));
                if (0..count).map(|i| c.get(i)).max().map_or(0, bit_length) != param {
                    return Err(Error::Format("compact width is not minimal".into()));
                }
                Ok(Encoder::Compact(c))
            }
            KIND_RICE => {
                let highs_end = end_of_nth_one(r.remaining(), lows_len, count)
                    .ok_or_else(|| Error::Format("truncated unary part".into()))?;
                let highs_len = highs_end - lows_len;
                let width = SelectIndex::sample_width(highs_len);
                let nsamples = SelectIndex::sample_count(count);
                let bits = r.bits(highs_end + nsamples * width as usize)?;
                let lows = PackedArray::from_bits(bits.slice(0, lows_len), param, count);
                let highs = bits.slice(lows_len, highs_len);
                let samples: Vec<u64> =
                    (0..nsamples).map(|k| bits.read(highs_end + k * width as usize, width)).collect();
                let select = SelectIndex::new(&highs);
                if select.samples() != samples.as_slice() {
                    return Err(Error::Format("select samples do not match unary part".into()));
                }
                Ok(Encoder::Rice(RiceVector::from_parts(param, lows, highs, select)))
            }
            other => Err(Error::Format(format!("unknown encoder kind {other}"))),
        }
    }
}

/// Bit position just past the `count`-th set bit at or after `start`.
fn end_of_nth_one(bytes: &[u8], start: usize, count: usize) -> Option<usize> {
    if count == 0 {
        return Some(start);
    }
    let mut left = count;
    let mut pos = start;
    let total = bytes.len() * 8;
    while pos < total && !pos.is_multiple_of(8) {
        if (bytes[pos / 8] >> (pos % 8)) & 1 == 1 {
            left -= 1;
            if left == 0 {
                return Some(pos + 1);
            }
        }
        pos += 1;
    }
    for (i, &byte) in bytes.iter().enumerate().skip(pos / 8) {
        let ones = byte.count_ones() as usize;
        if ones >= left {
            let bit = select_in_word(byte as u64, (left - 1) as u32) as usize;
            return Some(i * 8 + bit + 1);
        }
        left -= ones;
    }
    None
}

/// Seeds stored with one encoder per bucket index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterleavedSeeds {
    encoders: Vec<Encoder>,
    num_partitions: usize,
    compact_prefix: usize,
}

impl InterleavedSeeds {
    pub fn encoders(&self) -> &[Encoder] {
        &self.encoders
    }

    pub fn num_partitions(&self) -> usize {
        self.num_partitions
    }

    pub fn compact_prefix(&self) -> usize {
        self.compact_prefix
    }
}

/// Seeds stored partition-major in one encoder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoSeeds {
    encoder: Encoder,
    num_partitions: usize,
    buckets: usize,
}

impl MonoSeeds {
    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }
}

/// Stored seeds in either layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedStore {
    Interleaved(InterleavedSeeds),
    Mono(MonoSeeds),
}

impl AsRef<[u64]> for PartitionSeeds {
    fn as_ref(&self) -> &[u64] {
        &self.seeds
    }
}

/// Interleaves per-partition seed arrays; encoders `0..t` are Compact, the rest Rice.
pub fn interleave<S: AsRef<[u64]> + Sync>(seeds: &[S], buckets: usize, t: usize) -> InterleavedSeeds {
    assert!(seeds.iter().all(|s| s.as_ref().len() == buckets));
    let t = t.min(buckets);
    let encoders = (0..buckets)
        .into_par_iter()
        .map(|i| {
            let column: Vec<u64> = seeds.iter().map(|s| s.as_ref()[i]).collect();
            if i < t {
                Encoder::compact(&column)
            } else {
                Encoder::rice(&column)
            }
        })
        .collect();
    InterleavedSeeds { encoders, num_partitions: seeds.len(), compact_prefix: t }
}

/// All seeds, partition-major, in one encoder.
pub fn mono<S: AsRef<[u64]>>(seeds: &[S], buckets: usize, rice: bool) -> MonoSeeds {
    let all: Vec<u64> = seeds.iter().flat_map(|s| s.as_ref().iter().copied()).collect();
    assert_eq!(all.len(), seeds.len() * buckets);
    let encoder = if rice { Encoder::rice(&all) } else { Encoder::compact(&all) };
    MonoSeeds { encoder, num_partitions: seeds.len(), buckets }
}

impl SeedStore {
    pub fn encode<S: AsRef<[u64]> + Sync>(seeds: &[S], buckets: usize, encoding: SeedEncoding) -> Self {
        match encoding {
            SeedEncoding::InterleavedRice => SeedStore::Interleaved(interleave(seeds, buckets, 0)),
            SeedEncoding::InterleavedCompact => SeedStore::Interleaved(interleave(seeds, buckets, buckets)),
            SeedEncoding::Mixed(t) => SeedStore::Interleaved(interleave(seeds, buckets, t)),
            SeedEncoding::MonoRice => SeedStore::Mono(mono(seeds, buckets, true)),
            SeedEncoding::MonoCompact => SeedStore::Mono(mono(seeds, buckets, false)),
        }
    }

    pub fn buckets(&self) -> usize {
        match self {
            SeedStore::Interleaved(s) => s.encoders.len(),
            SeedStore::Mono(s) => s.buckets,
        }
    }

    pub fn num_partitions(&self) -> usize {
        match self {
            SeedStore::Interleaved(s) => s.num_partitions,
            SeedStore::Mono(s) => s.num_partitions,
        }
    }

    /// Which encoding produced this store.
    pub fn encoding(&self) -> SeedEncoding {
        match self {
            SeedStore::Interleaved(s) if s.compact_prefix == 0 => SeedEncoding::InterleavedRice,
            SeedStore::Interleaved(s) if s.compact_prefix == s.encoders.len() => SeedEncoding::InterleavedCompact,
            SeedStore::Interleaved(s) => SeedEncoding::Mixed(s.compact_prefix),
            SeedStore::Mono(s) if s.encoder.is_compact() => SeedEncoding::MonoCompact,
            SeedStore::Mono(_) => SeedEncoding::MonoRice,
        }
    }

    /// Seed of bucket `bucket` (1-based) in partition `partition`, unchecked.
    #[inline]
    pub fn seed(&self, partition: usize, bucket: usize) -> u64 {
        match self {
            SeedStore::Interleaved(s) => s.encoders[bucket - 1].get(partition),
            SeedStore::Mono(s) => s.encoder.get(partition * s.buckets + bucket - 1),
        }
    }

    pub fn seed_at(&self, partition: usize, bucket: usize) -> Result<u64> {
        if partition >= self.num_partitions() {
            return Err(Error::Index { index: partition, len: self.num_partitions() });
        }
        if bucket == 0 || bucket > self.buckets() {
            return Err(Error::Index { index: bucket, len: self.buckets() + 1 });
        }
        Ok(self.seed(partition, bucket))
    }

    fn encoder_list(&self) -> Vec<&Encoder> {
        match self {
            SeedStore::Interleaved(s) => s.encoders.iter().collect(),
            SeedStore::Mono(s) => vec![&s.encoder],
        }
    }

    /// Exact serialized size of the section.
    pub fn total_bits(&self) -> usize {
        SECTION_HEADER_BITS + self.encoder_list().iter().map(|e| e.total_bits()).sum::<usize>()
    }

    pub fn write(&self, w: &mut ByteWriter) {
        w.u32(self.buckets() as u32);
        w.u8(match self {
            SeedStore::Interleaved(_) => LAYOUT_INTERLEAVED,
            SeedStore::Mono(_) => LAYOUT_MONO,
        });
        for e in self.encoder_list() {
            e.write(w);
        }
    }

    pub fn read(r: &mut ByteReader, num_partitions: usize) -> Result<Self> {
        let buckets = r.u32()? as usize;
        if buckets == 0 {
            return Err(Error::Format("bucket count must be positive".into()));
        }
        match r.u8()? {
            LAYOUT_INTERLEAVED => {
                let mut encoders = Vec::with_capacity(buckets.min(1 << 20));
                for _ in 0..buckets {
                    let e = Encoder::read(r)?;
                    if e.len() != num_partitions {
                        return Err(Error::Format("encoder length differs from partition count".into()));
                    }
                    encoders.push(e);
                }
                let compact_prefix = encoders.iter().take_while(|e| e.is_compact()).count();
                if encoders[compact_prefix..].iter().any(|e| e.is_compact()) {
                    return Err(Error::Format("compact encoders must form a prefix".into()));
                }
                Ok(SeedStore::Interleaved(InterleavedSeeds { encoders, num_partitions, compact_prefix }))
            }
            LAYOUT_MONO => {
                let encoder = Encoder::read(r)?;
                if Some(encoder.len()) != num_partitions.checked_mul(buckets) {
                    return Err(Error::Format("mono encoder length mismatch".into()));
                }
                Ok(SeedStore::Mono(MonoSeeds { encoder, num_partitions, buckets }))
            }
            other => Err(Error::Format(format!("unknown seed layout {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_layout() {
        // two partitions, two buckets: [[a, b], [c, d]]
        let (a, b, c, d) = (11u64, 22, 33, 44);
        let seeds = vec![vec![a, b], vec![c, d]];
        for t in 0..=2 {
            let s = SeedStore::Interleaved(interleave(&seeds, 2, t));
            let SeedStore::Interleaved(inner) = &s else { unreachable!() };
            assert_eq!(inner.encoders()[0].get(0), a);
            assert_eq!(inner.encoders()[0].get(1), c);
            assert_eq!(inner.encoders()[1].get(0), b);
            assert_eq!(inner.encoders()[1].get(1), d);
            assert_eq!(s.seed_at(1, 1).unwrap(), c);
            assert_eq!(s.seed_at(0, 2).unwrap(), b);
            assert!(s.seed_at(2, 1).is_err());
            assert!(s.seed_at(0, 0).is_err());
            assert!(s.seed_at(0, 3).is_err());
        }
    }

    #[test]
    fn presets() {
        let seeds = vec![vec![1u64, 2, 3]; 4];
        let ic = interleave(&seeds, 3, 3);
        assert!(ic.encoders().iter().all(|e| e.is_compact()));
        let ir = interleave(&seeds, 3, 0);
        assert!(ir.encoders().iter().all(|e| !e.is_compact()));
        for enc in [
            SeedEncoding::InterleavedRice,
            SeedEncoding::InterleavedCompact,
            SeedEncoding::Mixed(1),
            SeedEncoding::MonoRice,
            SeedEncoding::MonoCompact,
        ] {
            let s = SeedStore::encode(&seeds, 3, enc);
            assert_eq!(s.encoding(), enc);
            assert_eq!(enc.to_string().parse::<SeedEncoding>().unwrap(), enc);
            for j in 0..4 {
                for i in 1..=3 {
                    assert_eq!(s.seed(j, i), i as u64);
                }
            }
        }
        assert!("mixed:x".parse::<SeedEncoding>().is_err());
        assert!("ic".parse::<SeedEncoding>().is_err());
    }

    #[test]
    fn total_bits_matches_serializer() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let seeds: Vec<Vec<u64>> = (0..3000)
            .map(|_| (0..7).map(|i| rng.random_range(0..(1u64 << (3 * i + 1)))).collect())
            .collect();
        let empty: Vec<Vec<u64>> = Vec::new();
        let e = SeedStore::encode(&empty, 7, SeedEncoding::InterleavedRice);
        assert!(e.total_bits() > 0);
        for enc in [
            SeedEncoding::InterleavedRice,
            SeedEncoding::InterleavedCompact,
            SeedEncoding::Mixed(3),
            SeedEncoding::MonoRice,
            SeedEncoding::MonoCompact,
        ] {
            for store in [SeedStore::encode(&seeds, 7, enc), SeedStore::encode(&empty, 7, enc)] {
                let mut w = ByteWriter::new();
                store.write(&mut w);
                let bytes = w.into_inner();
                assert_eq!(bytes.len() * 8, store.total_bits(), "{enc}");
                let mut r = ByteReader::new(&bytes);
                let back = SeedStore::read(&mut r, store.num_partitions()).unwrap();
                assert_eq!(r.remaining().len(), 0);
                assert_eq!(back, store);
            }
        }
    }

    #[test]
    fn rejects_truncated_sections() {
        let seeds = vec![vec![5u64, 900, 3]; 50];
        let store = SeedStore::encode(&seeds, 3, SeedEncoding::InterleavedRice);
        let mut w = ByteWriter::new();
        store.write(&mut w);
        let bytes = w.into_inner();
        for cut in 0..bytes.len() {
            assert!(SeedStore::read(&mut ByteReader::new(&bytes[..cut]), 50).is_err(), "cut {cut}");
        }
    }

    #[test]
    fn nth_one_scan() {
        let bytes = [0b0000_0100u8, 0, 0b1000_0001];
        assert_eq!(end_of_nth_one(&bytes, 0, 1), Some(3));
        assert_eq!(end_of_nth_one(&bytes, 3, 1), Some(17));
        assert_eq!(end_of_nth_one(&bytes, 0, 3), Some(24));
        assert_eq!(end_of_nth_one(&bytes, 0, 4), None);
        assert_eq!(end_of_nth_one(&bytes, 5, 0), Some(5));
    }
}
