use crate::bits::{bit_length, BitVec};

/// One sample every this many set bits.
pub const SAMPLE_RATE: usize = 1024;

/// Sampled select-1 index: `samples[k]` is the position of the `(k·1024)`-th set bit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SelectIndex {
    samples: Vec<u64>,
}

impl SelectIndex {
    pub fn new(bits: &BitVec) -> Self {
        let mut samples = Vec::new();
        let mut rank = 0usize;
        for (w, &word) in bits.words().iter().enumerate() {
            let ones = word.count_ones() as usize;
            // first sampled rank that falls into this word
            let mut next = rank.div_ceil(SAMPLE_RATE) * SAMPLE_RATE;
            while next < rank + ones {
                samples.push((w * 64 + select_in_word(word, (next - rank) as u32) as usize) as u64);
                next += SAMPLE_RATE;
            }
            rank += ones;
        }
        Self { samples }
    }

    pub fn from_samples(samples: Vec<u64>) -> Self {
        Self { samples }
    }

    pub fn samples(&self) -> &[u64] {
        &self.samples
    }

    /// Number of samples needed for `ones` set bits.
    pub fn sample_count(ones: usize) -> usize {
        ones.div_ceil(SAMPLE_RATE)
    }

    /// Bit width of one stored sample in a vector of `len` bits.
    pub fn sample_width(len: usize) -> u32 {
        bit_length(len as u64)
    }

    /// Position of the set bit with 0-based rank `rank`. The rank must exist.
    #[inline]
    pub fn select1(&self, bits: &BitVec, rank: usize) -> usize {
        let start = self.samples[rank / SAMPLE_RATE] as usize;
        let mut left = (rank % SAMPLE_RATE) as u32;
        let words = bits.words();
        let mut w = start / 64;
        let mut word = words[w] & (u64::MAX << (start % 64));
        loop {
            let ones = word.count_ones();
            if left < ones {
                return w * 64 + select_in_word(word, left) as usize;
            }
            left -= ones;
            w += 1;
            word = words[w];
        }
    }
}

/// Position of the set bit of rank `k` inside `word`.
#[inline]
pub fn select_in_word(mut word: u64, k: u32) -> u32 {
    for _ in 0..k {
        word &= word - 1;
    }
    word.trailing_zeros()
}
