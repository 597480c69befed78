//! Key fingerprinting and the seeded position hash used by the seed search.
//!
//! Every key is reduced once to a 128-bit [`MasterHash`]. The high half picks
//! the partition and (after a remix) the bucket, the low half feeds the
//! per-bucket position hash `h(x, s)`.

use xxhash_rust::xxh3::xxh3_128_with_seed;

/// Global seed for the master hash. Changing it re-randomizes everything downstream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalSeed(pub u64);

/// 128-bit key fingerprint.
///
/// Ordering is lexicographic on `(hi, lo)`, which is what the builder sorts by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MasterHash {
    pub hi: u64,
    pub lo: u64,
}

const BUCKET_REMIX: u64 = 0x9e37_79b9_7f4a_7c15;
const SEED_REMIX: u64 = 0xd6e8_feb8_6659_fd93;

/// Hashes an arbitrary byte key under `seed`.
#[inline]
pub fn master_hash(key: &[u8], seed: GlobalSeed) -> MasterHash {
    let h = xxh3_128_with_seed(key, seed.0);
    MasterHash {
        hi: (h >> 64) as u64,
        lo: h as u64,
    }
}

/// Murmur3 64-bit finalizer. A bijection on `u64`.
#[inline(always)]
pub fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^= k >> 33;
    k
}

/// `floor(a * m / 2^64)`: maps a uniform `u64` onto `[0, m)` without division.
#[inline(always)]
pub fn reduce(a: u64, m: u64) -> u64 {
    ((a as u128 * m as u128) >> 64) as u64
}

/// The 64 bits reserved for bucket selection, decorrelated from the partition choice.
#[inline(always)]
pub fn bucket_bits(h: MasterHash) -> u64 {
    fmix64(h.hi ^ BUCKET_REMIX)
}

/// Maps a 64-bit value `v` to `(v + 1) / 2^64`, which lies in `(0, 1]`.
#[inline(always)]
pub fn unit_interval(v: u64) -> f64 {
    const INV_2_64: f64 = 1.0 / 18_446_744_073_709_551_616.0;
    (v as f64 + 1.0) * INV_2_64
}

/// Normalized bucket hash `x` in `(0, 1]`.
#[inline(always)]
pub fn normalized_hash(h: MasterHash) -> f64 {
    unit_interval(bucket_bits(h))
}

/// Per-seed mixing constant. Hoisted out of the per-key loop by the search.
#[inline(always)]
pub fn seed_mix(s: u64) -> u64 {
    fmix64(s.wrapping_add(SEED_REMIX))
}

/// `h(x, s)` reduced to `[0, m)` given a precomputed [`seed_mix`] value.
#[inline(always)]
pub fn position_hash_mixed(lo: u64, mixed_seed: u64, m: u64) -> u64 {
    reduce(fmix64(lo ^ mixed_seed), m)
}

/// `h(x, s)` reduced to `[0, m)`. Requires `m >= 1`.
#[inline]
pub fn position_hash(h: MasterHash, s: u64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    position_hash_mixed(h.lo, seed_mix(s), m)
}
