//! Key collections and the random string corpus used by benchmarks.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh3::xxh3_128;

/// Shortest and longest generated key.
pub const MIN_KEY_LEN: usize = 10;
pub const MAX_KEY_LEN: usize = 50;

/// Anything that can hand out its keys by index.
pub trait KeySet: Sync {
    fn len(&self) -> usize;
    fn key(&self, i: usize) -> &[u8];

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<K: AsRef<[u8]> + Sync> KeySet for [K] {
    fn len(&self) -> usize {
        <[K]>::len(self)
    }

    fn key(&self, i: usize) -> &[u8] {
        self[i].as_ref()
    }
}

impl<K: AsRef<[u8]> + Sync> KeySet for Vec<K> {
    fn len(&self) -> usize {
        Vec::len(self)
    }

    fn key(&self, i: usize) -> &[u8] {
        self[i].as_ref()
    }
}

/// Keys stored back to back in one buffer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyCorpus {
    data: Vec<u8>,
    ends: Vec<usize>,
}

impl KeyCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &[u8]) {
        self.data.extend_from_slice(key);
        self.ends.push(self.data.len());
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn get(&self, i: usize) -> &[u8] {
        let start = if i == 0 { 0 } else { self.ends[i - 1] };
        &self.data[start..self.ends[i]]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        (0..self.ends.len()).map(move |i| self.get(i))
    }

    /// One key per line. Generated keys never contain newlines.
    pub fn write_lines<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for k in self.iter() {
            out.write_all(k)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn read_lines<R: BufRead>(input: R) -> std::io::Result<Self> {
        let mut c = Self::new();
        for line in input.split(b'\n') {
            let mut line = line?;
            if line.last() == Some(&b'\r') {
                line.pop();
            }
            c.push(&line);
        }
        Ok(c)
    }
}

impl KeySet for KeyCorpus {
    fn len(&self) -> usize {
        KeyCorpus::len(self)
    }

    fn key(&self, i: usize) -> &[u8] {
        self.get(i)
    }
}

impl<'a> FromIterator<&'a [u8]> for KeyCorpus {
    fn from_iter<I: IntoIterator<Item = &'a [u8]>>(iter: I) -> Self {
        let mut c = Self::new();
        for k in iter {
            c.push(k);
        }
        c
    }
}

/// `n` distinct printable ASCII strings with lengths uniform in `[10, 50]`.
///
/// Deterministic in `seed`. A string equal to an earlier one is drawn again.
pub fn gen_keys(n: usize, seed: u64) -> KeyCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<u128> = HashSet::with_capacity(n);
    let mut corpus = KeyCorpus { data: Vec::with_capacity(n * 30), ends: Vec::with_capacity(n) };
    let mut buf = Vec::with_capacity(MAX_KEY_LEN);
    while corpus.len() < n {
        let len = rng.random_range(MIN_KEY_LEN..=MAX_KEY_LEN);
        buf.clear();
        buf.extend((0..len).map(|_| rng.random_range(0x20u8..=0x7e)));
        // equal fingerprints are treated as duplicates, which only costs a redraw
        if seen.insert(xxh3_128(&buf)) {
            corpus.push(&buf);
        }
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(gen_keys(5, 1), gen_keys(5, 1));
        assert_ne!(gen_keys(5, 1), gen_keys(5, 2));
    }

    #[test]
    fn contract() {
        let keys = gen_keys(200_000, 7);
        assert_eq!(keys.len(), 200_000);
        let mut distinct = HashSet::new();
        for k in keys.iter() {
            assert!((MIN_KEY_LEN..=MAX_KEY_LEN).contains(&k.len()));
            assert!(k.iter().all(|c| (0x20..=0x7e).contains(c)));
            assert!(distinct.insert(k.to_vec()));
        }
    }

    #[test]
    fn length_histogram_is_uniform() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        let keys = gen_keys(200_000, 3);
        let mut counts = [0f64; MAX_KEY_LEN - MIN_KEY_LEN + 1];
        for k in keys.iter() {
            counts[k.len() - MIN_KEY_LEN] += 1.0;
        }
        let expected = keys.len() as f64 / counts.len() as f64;
        let stat: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        let bound = ChiSquared::new((counts.len() - 1) as f64).unwrap().inverse_cdf(0.99);
        assert!(stat < bound, "chi-square {stat} >= {bound}");
    }

    #[test]
    fn lines_round_trip() {
        let keys = gen_keys(1000, 4);
        let mut buf = Vec::new();
        keys.write_lines(&mut buf).unwrap();
        assert_eq!(KeyCorpus::read_lines(&buf[..]).unwrap(), keys);
    }
}
