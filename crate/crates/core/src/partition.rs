//! Splitting keys into small partitions and concatenating their outputs.
//!
//! A hash goes to partition `⌊hi · k / 2^64⌋` for `k` partitions. The global
//! output of a key is its partition's offset plus its local position, where
//! offsets are prefix sums of the partition sizes. Offsets are stored as
//! signed differences to `round(j·n/k)`, which keeps them a few bits wide.

use rayon::prelude::*;

use crate::bits::SignedArray;
use crate::error::{Error, Result};
use crate::hashing::{reduce, MasterHash};

/// Offsets of all partitions, stored relative to their expectation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionLayout {
    n: u64,
    num_partitions: u64,
    deltas: SignedArray,
}

/// `round(j · n / k)` with halves rounded up.
#[inline]
pub fn expected_offset(j: u64, n: u64, k: u64) -> u64 {
    ((2 * j as u128 * n as u128 + k as u128) / (2 * k as u128)) as u64
}

/// `max(1, round(n / P))`.
pub fn partition_count(n: usize, partition_size: f64) -> u64 {
    ((n as f64 / partition_size).round() as u64).max(1)
}

impl PartitionLayout {
    /// Builds the layout from actual partition sizes.
    pub fn from_sizes(sizes: &[u64]) -> Self {
        let k = sizes.len() as u64;
        assert!(k >= 1);
        let n: u64 = sizes.iter().sum();
        let mut deltas = Vec::with_capacity(sizes.len() + 1);
        let mut offset = 0u64;
        for j in 0..=k {
            deltas.push(offset as i64 - expected_offset(j, n, k) as i64);
            if j < k {
                offset += sizes[j as usize];
            }
        }
        Self { n, num_partitions: k, deltas: SignedArray::from_values(&deltas) }
    }

    /// Reassembles a layout from its stored parts, checking that offsets are consistent.
    pub fn from_parts(n: u64, num_partitions: u64, deltas: SignedArray) -> Result<Self> {
        if num_partitions == 0 || deltas.len() as u64 != num_partitions + 1 {
            return Err(Error::Format("partition delta count mismatch".into()));
        }
        let layout = Self { n, num_partitions, deltas };
        if layout.deltas.get(0) != 0 || layout.deltas.get(num_partitions as usize) != 0 {
            return Err(Error::Format("partition offsets must span [0, n]".into()));
        }
        let mut prev = 0i128;
        for j in 0..=num_partitions {
            let o = expected_offset(j, n, num_partitions) as i128 + layout.deltas.get(j as usize) as i128;
            if o < prev || o > n as i128 {
                return Err(Error::Format("partition offsets are not monotone".into()));
            }
            prev = o;
        }
        Ok(layout)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn num_partitions(&self) -> u64 {
        self.num_partitions
    }

    pub fn deltas(&self) -> &SignedArray {
        &self.deltas
    }

    /// Global offset of partition `j`, for `j ∈ [0, num_partitions]`.
    pub fn offset(&self, j: usize) -> Result<u64> {
        if j as u64 > self.num_partitions {
            return Err(Error::Index { index: j, len: self.num_partitions as usize + 1 });
        }
        Ok(self.offset_unchecked(j))
    }

    #[inline]
    pub fn offset_unchecked(&self, j: usize) -> u64 {
        (expected_offset(j as u64, self.n, self.num_partitions) as i64 + self.deltas.get(j)) as u64
    }

    #[inline]
    pub fn partition_of(&self, h: MasterHash) -> usize {
        reduce(h.hi, self.num_partitions) as usize
    }

    pub fn size(&self, j: usize) -> u64 {
        self.offset_unchecked(j + 1) - self.offset_unchecked(j)
    }

    pub fn sizes(&self) -> Vec<u64> {
        (0..self.num_partitions as usize).map(|j| self.size(j)).collect()
    }
}

/// All hashes sorted by `(hi, lo)`; partition `j` occupies `bounds[j]..bounds[j + 1]`.
#[derive(Clone, Debug)]
pub struct PartitionedKeys {
    hashes: Vec<MasterHash>,
    bounds: Vec<usize>,
}

impl PartitionedKeys {
    pub fn num_partitions(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn partition(&self, j: usize) -> &[MasterHash] {
        &self.hashes[self.bounds[j]..self.bounds[j + 1]]
    }

    pub fn len(&self) -> usize {
        self.hashes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hashes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[MasterHash]> {
        (0..self.num_partitions()).map(move |j| self.partition(j))
    }
}

/// Distributes `hashes` over `max(1, round(n/P))` partitions.
///
/// Partitions come out sorted by full master hash, so the result does not
/// depend on input order.
pub fn partition(mut hashes: Vec<MasterHash>, partition_size: f64) -> Result<(PartitionedKeys, PartitionLayout)> {
    if hashes.is_empty() {
        return Err(Error::InvalidConfig("cannot partition an empty key set".into()));
    }
    if partition_size.is_nan() || partition_size < 1.0 {
        return Err(Error::InvalidConfig(format!("partition size {partition_size} must be at least 1")));
    }
    let n = hashes.len();
    let k = partition_count(n, partition_size);
    if k > n as u64 {
        return Err(Error::InvalidConfig(format!("{k} partitions for {n} keys")));
    }
    hashes.par_sort_unstable();

    // partition index is monotone in hi, so boundaries follow from one scan
    let mut bounds = Vec::with_capacity(k as usize + 1);
    bounds.push(0);
    let mut pos = 0;
    for j in 1..k {
        while pos < n && reduce(hashes[pos].hi, k) < j {
            pos += 1;
        }
        bounds.push(pos);
    }
    bounds.push(n);

    let sizes: Vec<u64> = bounds.windows(2).map(|w| (w[1] - w[0]) as u64).collect();
    let layout = PartitionLayout::from_sizes(&sizes);
    Ok((PartitionedKeys { hashes, bounds }, layout))
}
