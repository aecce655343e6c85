//! Variable-width LZW.
//!
//! Codes 0..=255 are the single octets. Code `i` of the output (counting from
//! zero) is written with the smallest width, at least 9 bits, that can hold
//! every code the decoder might see at that point. Once the dictionary holds
//! `2^max_code_bits` entries it is frozen and used as is.

use std::collections::HashMap;

use super::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};

const FIRST_FREE: u32 = 256;
const MIN_WIDTH: u32 = 9;

/// Width used for the `index`-th emitted code.
///
/// Before reading code `index` the decoder holds `256 + index - 1` entries
/// and may additionally see the code that is still being defined, so the
/// largest legal value is `256 + index - 1`.
pub fn code_width(index: usize, max_code_bits: u32) -> u32 {
    let capacity = 1u64 << max_code_bits;
    let largest = (u64::from(FIRST_FREE) + index as u64).min(capacity) - 1;
    let needed = 64 - largest.leading_zeros();
    needed.clamp(MIN_WIDTH, max_code_bits)
}

pub fn lzw_encode(input: &[u8], max_code_bits: u32) -> Vec<u32> {
    assert!((9..=16).contains(&max_code_bits));
    let capacity = 1u32 << max_code_bits;
    let mut dict: HashMap<(u32, u8), u32> = HashMap::new();
    let mut next = FIRST_FREE;
    let mut codes = Vec::new();

    let Some((&first, rest)) = input.split_first() else {
        return codes;
    };
    let mut current = u32::from(first);
    for &byte in rest {
        if let Some(&code) = dict.get(&(current, byte)) {
            current = code;
            continue;
        }
        codes.push(current);
        if next < capacity {
            dict.insert((current, byte), next);
            next += 1;
        }
        current = u32::from(byte);
    }
    codes.push(current);
    codes
}

pub fn lzw_decode(codes: &[u32], max_code_bits: u32) -> Result<Vec<u8>> {
    let mut decoder = Decoder::new(max_code_bits);
    let mut out = Vec::new();
    for &code in codes {
        decoder.push(code, &mut out)?;
    }
    Ok(out)
}

/// Streaming decoder state. Entries are stored as (prefix code, last octet)
/// and expanded on demand.
struct Decoder {
    prefix: Vec<u32>,
    suffix: Vec<u8>,
    first: Vec<u8>,
    capacity: u32,
    previous: Option<u32>,
    scratch: Vec<u8>,
}

impl Decoder {
    fn new(max_code_bits: u32) -> Self {
        assert!((9..=16).contains(&max_code_bits));
        Decoder {
            prefix: (0..FIRST_FREE).collect(),
            suffix: (0..=255).collect(),
            first: (0..=255).collect(),
            capacity: 1 << max_code_bits,
            previous: None,
            scratch: Vec::new(),
        }
    }

    fn next_free(&self) -> u32 {
        self.prefix.len() as u32
    }

    fn expand(&mut self, mut code: u32, out: &mut Vec<u8>) {
        self.scratch.clear();
        while code >= FIRST_FREE {
            self.scratch.push(self.suffix[code as usize]);
            code = self.prefix[code as usize];
        }
        self.scratch.push(code as u8);
        out.extend(self.scratch.iter().rev());
    }

    fn push(&mut self, code: u32, out: &mut Vec<u8>) -> Result<()> {
        let next = self.next_free();
        let Some(previous) = self.previous else {
            if code >= FIRST_FREE {
                return Err(Error::corrupt(format!(
                    "first LZW code {code} is not a literal"
                )));
            }
            out.push(code as u8);
            self.previous = Some(code);
            return Ok(());
        };
        let pending = next < self.capacity;
        let first = if code < next {
            self.first[code as usize]
        } else if code == next && pending {
            // The code being defined right now: previous + previous[0].
            self.first[previous as usize]
        } else {
            return Err(Error::corrupt(format!(
                "LZW code {code} beyond next free slot {next}"
            )));
        };
        if pending {
            self.prefix.push(previous);
            self.suffix.push(first);
            self.first.push(self.first[previous as usize]);
        }
        self.expand(code, out);
        self.previous = Some(code);
        Ok(())
    }
}

/// Codes packed MSB-first with [`code_width`] widths.
pub fn compress(input: &[u8], max_code_bits: u32) -> Vec<u8> {
    let mut w = BitWriter::new();
    for (i, code) in lzw_encode(input, max_code_bits).into_iter().enumerate() {
        w.write_bits(code, code_width(i, max_code_bits));
    }
    w.finish()
}

/// Unpack and decode until `original_len` octets have been produced.
pub fn decompress(payload: &[u8], max_code_bits: u32, original_len: usize) -> Result<Vec<u8>> {
    let mut reader = BitReader::new(payload);
    let mut decoder = Decoder::new(max_code_bits);
    let mut out = Vec::with_capacity(original_len);
    let mut index = 0;
    while out.len() < original_len {
        let code = reader.read_bits(code_width(index, max_code_bits))?;
        decoder.push(code, &mut out)?;
        index += 1;
    }
    if out.len() != original_len {
        return Err(Error::corrupt("LZW output overshoots declared length"));
    }
    Ok(out)
}
