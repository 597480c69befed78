use crate::bits::{bit_length, PackedArray};

/// Fixed-width encoding sized by the largest value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompactVector {
    values: PackedArray,
}

impl CompactVector {
    pub fn encode(values: &[u64]) -> Self {
        let width = values.iter().copied().max().map_or(0, bit_length);
        Self { values: PackedArray::from_values(values, width) }
    }

    pub fn from_packed(values: PackedArray) -> Self {
        Self { values }
    }

    pub fn width(&self) -> u32 {
        self.values.width()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn packed(&self) -> &PackedArray {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        self.values.get(i)
    }

    pub fn payload_bits(&self) -> usize {
        self.values.bits().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_zero_has_no_payload() {
        let c = CompactVector::encode(&[0, 0, 0]);
        assert_eq!(c.width(), 0);
        assert_eq!(c.payload_bits(), 0);
        assert_eq!(c.get(2), 0);
    }

    #[test]
    fn hand_layout() {
        let c = CompactVector::encode(&[5, 2, 7]);
        assert_eq!(c.width(), 3);
        let bits = c.packed().bits();
        let got: Vec<bool> = (0..9).map(|i| bits.get(i)).collect();
        // 5 = 101, 2 = 010, 7 = 111, each field LSB first
        let want = [true, false, true, false, true, false, true, true, true];
        assert_eq!(got, want);
    }

    proptest! {
        #[test]
        fn round_trip(values in prop::collection::vec(any::<u64>().prop_map(|v| v >> 20), 0..2000)) {
            let c = CompactVector::encode(&values);
            for (i, &v) in values.iter().enumerate() {
                prop_assert_eq!(c.get(i), v);
            }
        }
    }

    #[test]
    fn round_trip_large() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let values: Vec<u64> = (0..100_000).map(|_| rng.random_range(0..1u64 << 37)).collect();
        let c = CompactVector::encode(&values);
        assert!(values.iter().enumerate().all(|(i, &v)| c.get(i) == v));
    }
}
