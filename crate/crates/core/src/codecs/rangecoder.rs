//! Binary adaptive range coder in the LZMA style: 11-bit probabilities,
//! 32-bit range, carry propagation through a cached output octet.

use crate::error::{Error, Result};

const PROB_BITS: u32 = 11;
const PROB_ONE: u16 = 1 << PROB_BITS;
const MOVE_BITS: u32 = 5;
const TOP: u32 = 1 << 24;

/// Probability that the next bit is 0, scaled to `2^11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prob(u16);

impl Default for Prob {
    fn default() -> Self {
        Prob(PROB_ONE / 2)
    }
}

impl Prob {
    fn bound(self, range: u32) -> u32 {
        (range >> PROB_BITS) * u32::from(self.0)
    }

    fn update(&mut self, bit: bool) {
        if bit {
            self.0 -= self.0 >> MOVE_BITS;
        } else {
            self.0 += (PROB_ONE - self.0) >> MOVE_BITS;
        }
    }
}

#[derive(Debug)]
pub struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    /// The very first shifted octet is always zero and is not written.
    primed: bool,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        RangeEncoder {
            low: 0,
            range: u32::MAX,
            cache: 0,
            cache_size: 1,
            primed: false,
            out: Vec::new(),
        }
    }

    fn put(&mut self, byte: u8) {
        if self.primed {
            self.out.push(byte);
        } else {
            debug_assert_eq!(byte, 0);
            self.primed = true;
        }
    }

    fn shift_low(&mut self) {
        if self.low < 0xFF00_0000 || self.low >= 1 << 32 {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            loop {
                self.put(byte.wrapping_add(carry));
                byte = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    pub fn encode_bit(&mut self, prob: &mut Prob, bit: bool) {
        let bound = prob.bound(self.range);
        if bit {
            self.low += u64::from(bound);
            self.range -= bound;
        } else {
            self.range = bound;
        }
        prob.update(bit);
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    /// Bits with fixed probability 1/2.
    pub fn encode_direct(&mut self, value: u32, count: u32) {
        for i in (0..count).rev() {
            self.range >>= 1;
            if (value >> i) & 1 == 1 {
                self.low += u64::from(self.range);
            }
            while self.range < TOP {
                self.range <<= 8;
                self.shift_low();
            }
        }
    }

    pub fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

#[derive(Debug)]
pub struct RangeDecoder<'a> {
    code: u32,
    range: u32,
    input: &'a [u8],
    pos: usize,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(input: &'a [u8]) -> Result<Self> {
        if input.len() < 4 {
            return Err(Error::corrupt("range coder stream shorter than 4 octets"));
        }
        let code = u32::from_be_bytes(input[..4].try_into().unwrap());
        Ok(RangeDecoder {
            code,
            range: u32::MAX,
            input,
            pos: 4,
        })
    }

    fn next_byte(&mut self) -> Result<u8> {
        let b = *self
            .input
            .get(self.pos)
            .ok_or_else(|| Error::corrupt("range coder underrun"))?;
        self.pos += 1;
        Ok(b)
    }

    fn normalize(&mut self) -> Result<()> {
        while self.range < TOP {
            self.range <<= 8;
            self.code = (self.code << 8) | u32::from(self.next_byte()?);
        }
        Ok(())
    }

    pub fn decode_bit(&mut self, prob: &mut Prob) -> Result<bool> {
        let bound = prob.bound(self.range);
        let bit = if self.code < bound {
            self.range = bound;
            false
        } else {
            self.code -= bound;
            self.range -= bound;
            true
        };
        prob.update(bit);
        self.normalize()?;
        Ok(bit)
    }

    pub fn decode_direct(&mut self, count: u32) -> Result<u32> {
        let mut value = 0;
        for _ in 0..count {
            self.range >>= 1;
            let bit = self.code >= self.range;
            if bit {
                self.code -= self.range;
            }
            value = (value << 1) | u32::from(bit);
            self.normalize()?;
        }
        Ok(value)
    }
}

/// `2^bits` probabilities addressed as a binary tree, most significant bit
/// first.
#[derive(Debug, Clone)]
pub struct BitTree {
    bits: u32,
    probs: Vec<Prob>,
}

impl BitTree {
    pub fn new(bits: u32) -> Self {
        BitTree {
            bits,
            probs: vec![Prob::default(); 1 << bits],
        }
    }

    pub fn encode(&mut self, rc: &mut RangeEncoder, value: u32) {
        let mut node = 1usize;
        for i in (0..self.bits).rev() {
            let bit = (value >> i) & 1 == 1;
            rc.encode_bit(&mut self.probs[node], bit);
            node = (node << 1) | usize::from(bit);
        }
    }

    pub fn decode(&mut self, rc: &mut RangeDecoder<'_>) -> Result<u32> {
        let mut node = 1usize;
        for _ in 0..self.bits {
            let bit = rc.decode_bit(&mut self.probs[node])?;
            node = (node << 1) | usize::from(bit);
        }
        Ok(node as u32 - (1 << self.bits))
    }
}
