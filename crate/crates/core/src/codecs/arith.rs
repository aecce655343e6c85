//! Multi-symbol arithmetic coder with 32-bit integer registers.
//!
//! The coder keeps an inclusive interval `[low, high]` of 32-bit code values.
//! Each symbol narrows it to the sub-range matching the symbol's cumulative
//! frequency slice; settled leading bits are shifted out, and straddles of
//! the midpoint are deferred as pending (underflow) bits.
//!
//! Shared by the order-0 coder ([`super::ac`]), the PPM coder and the BWT
//! back end.

use super::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};

const CODE_BITS: u32 = 32;
const TOP: u64 = (1 << CODE_BITS) - 1;
const HALF: u64 = 1 << (CODE_BITS - 1);
const QUARTER: u64 = 1 << (CODE_BITS - 2);
const THREE_QUARTERS: u64 = HALF + QUARTER;

/// Largest frequency total the coder accepts. Every symbol must keep a
/// non-empty slice of the smallest normalized interval (`QUARTER + 1`).
pub const MAX_TOTAL: u32 = 1 << 24;

const OVERRUN_LIMIT: u64 = 2 * CODE_BITS as u64;

/// Narrow the inclusive interval `[low, high]` to the slice
/// `[cum_low, cum_high) / total`.
pub fn narrow(low: u64, high: u64, cum_low: u32, cum_high: u32, total: u32) -> (u64, u64) {
    debug_assert!(cum_low < cum_high && cum_high <= total && total <= MAX_TOTAL);
    let range = high - low + 1;
    let new_high = low + range * u64::from(cum_high) / u64::from(total) - 1;
    let new_low = low + range * u64::from(cum_low) / u64::from(total);
    (new_low, new_high)
}

#[derive(Debug, Default)]
pub struct ArithEncoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitWriter,
}

impl ArithEncoder {
    pub fn new() -> Self {
        ArithEncoder {
            low: 0,
            high: TOP,
            pending: 0,
            out: BitWriter::new(),
        }
    }

    fn emit(&mut self, bit: bool) {
        self.out.write_bit(bit);
        while self.pending > 0 {
            self.out.write_bit(!bit);
            self.pending -= 1;
        }
    }

    pub fn encode(&mut self, cum_low: u32, cum_high: u32, total: u32) {
        (self.low, self.high) = narrow(self.low, self.high, cum_low, cum_high, total);
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    /// Bits emitted so far (pending bits excluded).
    pub fn bit_len(&self) -> u64 {
        self.out.bit_len()
    }

    pub fn finish(mut self) -> Vec<u8> {
        // Two more bits pin a value inside the final interval; the decoder
        // reads zeros past the end of the stream.
        self.pending += 1;
        let bit = self.low >= QUARTER;
        self.emit(bit);
        self.out.finish()
    }
}

#[derive(Debug)]
pub struct ArithDecoder<'a> {
    low: u64,
    high: u64,
    value: u64,
    input: BitReader<'a>,
    overrun: u64,
}

impl<'a> ArithDecoder<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        let mut input = BitReader::new(bytes);
        let mut value = 0u64;
        for _ in 0..CODE_BITS {
            value = (value << 1) | u64::from(input.read_bit_or_zero());
        }
        ArithDecoder {
            low: 0,
            high: TOP,
            value,
            input,
            overrun: 0,
        }
    }

    /// Cumulative frequency the next symbol falls on, in `0..total`.
    pub fn target(&self, total: u32) -> Result<u32> {
        let range = self.high - self.low + 1;
        let offset = self.value.checked_sub(self.low).filter(|&o| o < range);
        let Some(offset) = offset else {
            return Err(Error::corrupt("arithmetic decoder left its interval"));
        };
        let t = ((offset + 1) * u64::from(total) - 1) / range;
        Ok(t as u32)
    }

    /// Consume the symbol whose slice was located with [`Self::target`].
    pub fn consume(&mut self, cum_low: u32, cum_high: u32, total: u32) {
        (self.low, self.high) = narrow(self.low, self.high, cum_low, cum_high, total);
        loop {
            if self.high < HALF {
                // nothing to subtract
            } else if self.low >= HALF {
                self.low -= HALF;
                self.high -= HALF;
                self.value -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.low -= QUARTER;
                self.high -= QUARTER;
                self.value -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | self.next_bit();
        }
    }

    /// Fail once the decoder has read far past the end of its input, which
    /// only happens on streams that never reach their end symbol.
    pub fn check_overrun(&self) -> Result<()> {
        if self.overrun > OVERRUN_LIMIT {
            return Err(Error::corrupt("arithmetic stream ended without end symbol"));
        }
        Ok(())
    }

    fn next_bit(&mut self) -> u64 {
        if self.input.bits_remaining() == 0 {
            self.overrun += 1;
        }
        u64::from(self.input.read_bit_or_zero())
    }
}

/// Adaptive frequency table over `0..n` symbols.
///
/// Every symbol starts at count 1 and gains `increment` each time it is
/// coded; when the total passes `limit` all counts are halved (floor 1).
#[derive(Debug, Clone)]
pub struct AdaptiveModel {
    freqs: Vec<u32>,
    total: u32,
    increment: u32,
    limit: u32,
}

impl AdaptiveModel {
    pub const DEFAULT_INCREMENT: u32 = 32;
    pub const DEFAULT_LIMIT: u32 = 1 << 16;

    pub fn new(symbols: usize) -> Self {
        Self::with_params(symbols, Self::DEFAULT_INCREMENT, Self::DEFAULT_LIMIT)
    }

    pub fn with_params(symbols: usize, increment: u32, limit: u32) -> Self {
        assert!(symbols > 0 && limit <= MAX_TOTAL);
        AdaptiveModel {
            freqs: vec![1; symbols],
            total: symbols as u32,
            increment,
            limit,
        }
    }

    /// A model with fixed counts that never adapts.
    pub fn fixed(freqs: Vec<u32>) -> Self {
        let total = freqs.iter().sum();
        AdaptiveModel {
            freqs,
            total,
            increment: 0,
            limit: MAX_TOTAL,
        }
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn freq(&self, symbol: usize) -> u32 {
        self.freqs[symbol]
    }

    fn slice(&self, symbol: usize) -> (u32, u32) {
        let low: u32 = self.freqs[..symbol].iter().sum();
        (low, low + self.freqs[symbol])
    }

    fn update(&mut self, symbol: usize) {
        if self.increment == 0 {
            return;
        }
        self.freqs[symbol] += self.increment;
        self.total += self.increment;
        if self.total > self.limit {
            self.total = 0;
            for f in &mut self.freqs {
                *f = (*f / 2).max(1);
                self.total += *f;
            }
        }
    }

    pub fn encode(&mut self, enc: &mut ArithEncoder, symbol: usize) {
        let (lo, hi) = self.slice(symbol);
        enc.encode(lo, hi, self.total);
        self.update(symbol);
    }

    pub fn decode(&mut self, dec: &mut ArithDecoder<'_>) -> Result<usize> {
        dec.check_overrun()?;
        let target = dec.target(self.total)?;
        let mut low = 0u32;
        for (symbol, &f) in self.freqs.iter().enumerate() {
            if target < low + f {
                dec.consume(low, low + f, self.total);
                self.update(symbol);
                return Ok(symbol);
            }
            low += f;
        }
        Err(Error::corrupt("arithmetic target beyond model total"))
    }
}
