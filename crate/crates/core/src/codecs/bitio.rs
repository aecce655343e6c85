//! MSB-first bit packing shared by the LZW, Huffman and arithmetic coders.

use crate::error::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    nbits: u32,
    written: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append the low `width` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u32, width: u32) {
        debug_assert!(width <= 32);
        debug_assert!(width == 32 || value >> width == 0);
        self.acc = (self.acc << width) | u64::from(value);
        self.nbits += width;
        self.written += u64::from(width);
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.bytes.push((self.acc >> self.nbits) as u8);
        }
        self.acc &= (1u64 << self.nbits) - 1;
    }

    pub fn write_bit(&mut self, bit: bool) {
        self.write_bits(u32::from(bit), 1);
    }

    /// Number of bits written so far, excluding padding.
    pub fn bit_len(&self) -> u64 {
        self.written
    }

    /// Flush, zero-padding the final partial octet.
    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.bytes.push((self.acc << (8 - self.nbits)) as u8);
        }
        self.bytes
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    acc: u64,
    nbits: u32,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader {
            bytes,
            pos: 0,
            acc: 0,
            nbits: 0,
        }
    }

    fn refill(&mut self, want: u32) {
        while self.nbits < want && self.pos < self.bytes.len() {
            self.acc = (self.acc << 8) | u64::from(self.bytes[self.pos]);
            self.pos += 1;
            self.nbits += 8;
        }
    }

    /// Read `width` bits; fails with `CorruptStream` if the input runs out.
    pub fn read_bits(&mut self, width: u32) -> Result<u32> {
        debug_assert!(width <= 32);
        self.refill(width);
        if self.nbits < width {
            return Err(Error::corrupt("bit reader underrun"));
        }
        self.nbits -= width;
        let value = (self.acc >> self.nbits) as u32 & mask(width);
        self.acc &= (1u64 << self.nbits) - 1;
        Ok(value)
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        Ok(self.read_bits(1)? == 1)
    }

    /// Read one bit, yielding 0 once the input is exhausted. Arithmetic
    /// decoders read a few bits past the end of the encoder's flush.
    pub fn read_bit_or_zero(&mut self) -> u32 {
        self.refill(1);
        if self.nbits == 0 {
            return 0;
        }
        self.nbits -= 1;
        let bit = (self.acc >> self.nbits) as u32 & 1;
        self.acc &= (1u64 << self.nbits) - 1;
        bit
    }

    pub fn bits_remaining(&self) -> u64 {
        (self.bytes.len() - self.pos) as u64 * 8 + u64::from(self.nbits)
    }
}

fn mask(width: u32) -> u32 {
    if width == 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}
