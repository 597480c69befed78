use crate::bits::{bit_length, BitVec, PackedArray};

use super::select::SelectIndex;

/// Golomb-Rice coding with parameter `b`: the low `b` bits of every value go
/// into a fixed-width array, the high part `v >> b` is written in unary as
/// that many zeros followed by a one. Access uses one select on the unary part.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RiceVector {
    b: u32,
    lows: PackedArray,
    highs: BitVec,
    select: SelectIndex,
}

#[inline]
fn high_part(v: u64, b: u32) -> u64 {
    v.checked_shr(b).unwrap_or(0)
}

/// Encoded size of `values` under parameter `b`, excluding the select samples.
pub fn rice_size(values: &[u64], b: u32) -> u128 {
    values.iter().map(|&v| b as u128 + high_part(v, b) as u128 + 1).sum()
}

/// The `b` minimizing the encoded size, ties broken toward smaller `b`.
pub fn rice_parameter(values: &[u64]) -> u32 {
    let max_b = values.iter().copied().max().map_or(0, bit_length);
    let mut best = (rice_size(values, 0), 0);
    for b in 1..=max_b {
        let size = rice_size(values, b);
        if size < best.0 {
            best = (size, b);
        }
    }
    best.1
}

impl RiceVector {
    pub fn encode(values: &[u64], b: u32) -> Self {
        assert!(b <= 64);
        let low_mask = if b == 64 { u64::MAX } else { (1u64 << b) - 1 };
        let mut lows = PackedArray::new(b);
        let mut highs = BitVec::new();
        for &v in values {
            lows.push(v & low_mask);
            highs.push_zeros(high_part(v, b) as usize);
            highs.push(true);
        }
        let select = SelectIndex::new(&highs);
        Self { b, lows, highs, select }
    }

    /// Encodes with the optimal parameter.
    pub fn encode_optimal(values: &[u64]) -> Self {
        Self::encode(values, rice_parameter(values))
    }

    pub fn from_parts(b: u32, lows: PackedArray, highs: BitVec, select: SelectIndex) -> Self {
        Self { b, lows, highs, select }
    }

    pub fn parameter(&self) -> u32 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.lows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lows.is_empty()
    }

    pub fn lows(&self) -> &PackedArray {
        &self.lows
    }

    pub fn highs(&self) -> &BitVec {
        &self.highs
    }

    pub fn select(&self) -> &SelectIndex {
        &self.select
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        let start = if i == 0 { 0 } else { self.select.select1(&self.highs, i - 1) + 1 };
        let end = self.highs.next_one(start).expect("corrupt unary part");
        let high = (end - start) as u64;
        let low = self.lows.get(i);
        if self.b == 64 {
            low
        } else {
            (high << self.b) | low
        }
    }

    /// Payload size: lows, unary part, and stored select samples.
    pub fn payload_bits(&self) -> usize {
        self.lows.bits().len()
            + self.highs.len()
            + self.select.samples().len() * SelectIndex::sample_width(self.highs.len()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parameter_choice() {
        assert_eq!(rice_parameter(&[]), 0);
        assert_eq!(rice_parameter(&[0, 0, 0, 0]), 0);
        // b = 0 and b = 1 both cost 10 bits
        assert_eq!(rice_size(&[0, 1, 2, 3], 0), 10);
        assert_eq!(rice_size(&[0, 1, 2, 3], 1), 10);
        assert_eq!(rice_parameter(&[0, 1, 2, 3]), 0);
        assert_eq!(rice_parameter(&[1000, 1100, 900]), 9);
    }

    #[test]
    fn parameter_is_exhaustively_optimal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let scale = rng.random_range(1..1u64 << 20);
            let values: Vec<u64> = (0..rng.random_range(1..300)).map(|_| rng.random_range(0..scale)).collect();
            let b = rice_parameter(&values);
            let best = rice_size(&values, b);
            for other in 0..=64 {
                assert!(best <= rice_size(&values, other));
            }
        }
    }

    #[test]
    fn hand_layout() {
        let r = RiceVector::encode(&[0, 1, 2, 3], 1);
        let lows: Vec<u64> = (0..4).map(|i| r.lows().get(i)).collect();
        assert_eq!(lows, vec![0, 1, 0, 1]);
        let highs: String = (0..r.highs().len()).map(|i| if r.highs().get(i) { '1' } else { '0' }).collect();
        assert_eq!(highs, "110101");

        let z = RiceVector::encode(&[0], 0);
        assert_eq!(z.highs().len(), 1);
        assert!(z.highs().get(0));
        assert_eq!(z.lows().bits().len(), 0);
        assert_eq!(z.get(0), 0);
    }

    #[test]
    fn extreme_parameters() {
        let values = [u64::MAX, 0, 12345];
        let r = RiceVector::encode(&values, 64);
        assert!(values.iter().enumerate().all(|(i, &v)| r.get(i) == v));
        let r = RiceVector::encode(&[3, 0, 7, 1], 0);
        assert_eq!((0..4).map(|i| r.get(i)).collect::<Vec<_>>(), vec![3, 0, 7, 1]);
    }

    #[test]
    fn geometric_round_trip() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Geometric};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let geo = Geometric::new(0.002).unwrap();
        let values: Vec<u64> = (0..100_000).map(|_| geo.sample(&mut rng)).collect();
        let r = RiceVector::encode_optimal(&values);
        assert!(values.iter().enumerate().all(|(i, &v)| r.get(i) == v));
    }

    proptest! {
        #[test]
        fn round_trip(values in prop::collection::vec(0u64..5000, 0..3000), b in 0u32..14) {
            let r = RiceVector::encode(&values, b);
            for (i, &v) in values.iter().enumerate() {
                prop_assert_eq!(r.get(i), v);
            }
        }
    }
}
