//! Low-level bit storage shared by the encoders, the partition layout and the
//! serializer. All fields are LSB-first and packed into little-endian `u64` words.

/// Number of bits needed to represent `v` (0 for `v = 0`).
#[inline]
pub fn bit_length(v: u64) -> u32 {
    64 - v.leading_zeros()
}

#[inline]
fn mask(width: u32) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Reads `width` bits starting at bit `pos`.
#[inline]
pub fn read_bits(words: &[u64], pos: usize, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    let w = pos / 64;
    let o = (pos % 64) as u32;
    let lo = words[w] >> o;
    if o + width <= 64 {
        lo & mask(width)
    } else {
        (lo | (words[w + 1] << (64 - o))) & mask(width)
    }
}

/// Growable bit vector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self { words: Vec::with_capacity(bits.div_ceil(64)), len: 0 }
    }

    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn push(&mut self, bit: bool) {
        self.push_bits(bit as u64, 1);
    }

    /// Appends the low `width` bits of `value`.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        if width == 0 {
            return;
        }
        let value = value & mask(width);
        let o = (self.len % 64) as u32;
        if o == 0 {
            self.words.push(value);
        } else {
            *self.words.last_mut().unwrap() |= value << o;
            if o + width > 64 {
                self.words.push(value >> (64 - o));
            }
        }
        self.len += width as usize;
    }

    /// Appends `count` zero bits.
    pub fn push_zeros(&mut self, mut count: usize) {
        while count > 0 {
            let step = count.min(64);
            self.push_bits(0, step as u32);
            count -= step;
        }
    }

    #[inline]
    pub fn read(&self, pos: usize, width: u32) -> u64 {
        debug_assert!(pos + width as usize <= self.len);
        read_bits(&self.words, pos, width)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Copies `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        debug_assert!(start + len <= self.len);
        let mut out = BitVec::with_capacity(len);
        let mut pos = start;
        let end = start + len;
        while pos < end {
            let take = (end - pos).min(64) as u32;
            out.push_bits(self.read(pos, take), take);
            pos += take as usize;
        }
        out
    }

    /// Position of the next set bit at or after `from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut w = from / 64;
        let mut word = self.words[w] & (u64::MAX << (from % 64));
        loop {
            if word != 0 {
                let p = w * 64 + word.trailing_zeros() as usize;
                return (p < self.len).then_some(p);
            }
            w += 1;
            if w >= self.words.len() {
                return None;
            }
            word = self.words[w];
        }
    }

    /// Position of the next clear bit at or after `from`.
    pub fn next_zero(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut w = from / 64;
        let mut word = !self.words[w] & (u64::MAX << (from % 64));
        loop {
            if word != 0 {
                let p = w * 64 + word.trailing_zeros() as usize;
                return (p < self.len).then_some(p);
            }
            w += 1;
            if w >= self.words.len() {
                return None;
            }
            word = !self.words[w];
        }
    }
}

/// Fixed-width packed array of unsigned integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PackedArray {
    bits: BitVec,
    width: u32,
    len: usize,
}

impl PackedArray {
    pub fn new(width: u32) -> Self {
        assert!(width <= 64);
        Self { bits: BitVec::new(), width, len: 0 }
    }

    pub fn from_values(values: &[u64], width: u32) -> Self {
        let mut a = Self::new(width);
        a.bits = BitVec::with_capacity(values.len() * width as usize);
        for &v in values {
            debug_assert!(bit_length(v) <= width);
            a.push(v);
        }
        a
    }

    /// Interprets `bits` as `len` fields of `width` bits.
    pub fn from_bits(bits: BitVec, width: u32, len: usize) -> Self {
        assert_eq!(bits.len(), len * width as usize);
        Self { bits, width, len }
    }

    pub fn push(&mut self, v: u64) {
        self.bits.push_bits(v, self.width);
        self.len += 1;
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        read_bits(self.bits.words(), i * self.width as usize, self.width)
    }
}

/// Fixed-width two's complement array of signed integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignedArray {
    inner: PackedArray,
}

impl SignedArray {
    /// Width is `bit_length(max |v|) + 1`.
    pub fn from_values(values: &[i64]) -> Self {
        let max_abs = values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        let width = (bit_length(max_abs) + 1).min(64);
        let mut inner = PackedArray::new(width);
        for &v in values {
            inner.push(v as u64);
        }
        Self { inner }
    }

    pub fn from_packed(inner: PackedArray) -> Self {
        Self { inner }
    }

    pub fn width(&self) -> u32 {
        self.inner.width()
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn packed(&self) -> &PackedArray {
        &self.inner
    }

    #[inline]
    pub fn get(&self, i: usize) -> i64 {
        let w = self.inner.width();
        let raw = self.inner.get(i);
        let shift = 64 - w;
        ((raw << shift) as i64) >> shift
    }
}
