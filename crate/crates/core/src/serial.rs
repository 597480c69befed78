//! Little-endian byte writer and bounds-checked reader.

use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Default)]
pub struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.buf
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.bytes(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.bytes(&v.to_le_bytes());
    }

    /// Writes the bits LSB-first, zero padded to a whole byte.
    pub fn bits(&mut self, bits: &BitVec) {
        let nbytes = bits.len().div_ceil(8);
        let mut written = 0;
        for w in bits.words() {
            for b in w.to_le_bytes() {
                if written == nbytes {
                    return;
                }
                self.buf.push(b);
                written += 1;
            }
        }
    }
}

pub struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> &'a [u8] {
        &self.buf[self.pos..]
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Format(format!("truncated input at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// Reads `len` bits written by [`ByteWriter::bits`]; padding must be zero.
    pub fn bits(&mut self, len: usize) -> Result<BitVec> {
        let bytes = self.take(len.div_ceil(8))?;
        let bits = bits_from_bytes(bytes, len);
        if !len.is_multiple_of(8) && bytes[bytes.len() - 1] >> (len % 8) != 0 {
            return Err(Error::Format("non-zero padding bits".into()));
        }
        Ok(bits)
    }
}

/// First `len` bits of `bytes`, LSB-first.
pub fn bits_from_bytes(bytes: &[u8], len: usize) -> BitVec {
    let mut bits = BitVec::with_capacity(len);
    let mut left = len;
    for chunk in bytes.chunks(8) {
        if left == 0 {
            break;
        }
        let mut w = [0u8; 8];
        w[..chunk.len()].copy_from_slice(chunk);
        let take = left.min(64);
        bits.push_bits(u64::from_le_bytes(w), take as u32);
        left -= take;
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_round_trip() {
        let mut w = ByteWriter::new();
        w.u8(7);
        w.u32(0xdead_beef);
        w.u64(u64::MAX - 3);
        w.f64(-0.125);
        let buf = w.into_inner();
        assert_eq!(buf.len(), 21);
        let mut r = ByteReader::new(&buf);
        assert_eq!(r.u8().unwrap(), 7);
        assert_eq!(r.u32().unwrap(), 0xdead_beef);
        assert_eq!(r.u64().unwrap(), u64::MAX - 3);
        assert_eq!(r.f64().unwrap(), -0.125);
        assert!(r.u8().is_err());
    }

    #[test]
    fn bits_are_padded_and_checked() {
        let mut b = BitVec::new();
        b.push_bits(0b101, 3);
        b.push_bits(0x1ff, 9);
        let mut w = ByteWriter::new();
        w.bits(&b);
        let buf = w.into_inner();
        assert_eq!(buf.len(), 2);
        assert_eq!(ByteReader::new(&buf).bits(12).unwrap(), b);
        let mut dirty = buf.clone();
        dirty[1] |= 0x80;
        assert!(ByteReader::new(&dirty).bits(12).is_err());
    }
}
