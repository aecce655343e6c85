//! Block-sorting compression: Burrows-Wheeler transform, move-to-front,
//! zero-run coding, then adaptive arithmetic coding.
//!
//! The transform uses the index variant (no sentinel): the block is stored
//! as the last column of its sorted rotations plus the row of the original
//! string. Equal rotations keep their original order.

use super::arith::{AdaptiveModel, ArithDecoder, ArithEncoder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwtBlock {
    pub data: Vec<u8>,
    pub primary_index: u32,
}

/// Sorted order of all rotations of `block`, ties broken by start position.
///
/// Prefix doubling over cyclic ranks: after round `r` rotations are ordered
/// by their first `2^r` octets.
fn sorted_rotations(block: &[u8]) -> Vec<usize> {
    let n = block.len();
    let mut order: Vec<usize> = (0..n).collect();
    if n == 0 {
        return order;
    }
    let mut rank: Vec<u32> = block.iter().map(|&b| u32::from(b)).collect();
    order.sort_by_key(|&i| rank[i]);
    let mut next = vec![0u32; n];
    let mut width = 1;
    loop {
        // Stable sort keeps equal keys in start-position order.
        let key = |i: usize| (rank[i], rank[(i + width) % n]);
        order.sort_by_key(|&i| (key(i), i));
        next[order[0]] = 0;
        for w in 1..n {
            let bump = u32::from(key(order[w]) != key(order[w - 1]));
            next[order[w]] = next[order[w - 1]] + bump;
        }
        std::mem::swap(&mut rank, &mut next);
        if rank[order[n - 1]] as usize == n - 1 || width >= n {
            break;
        }
        width *= 2;
    }
    order
}

pub fn bwt_forward(block: &[u8]) -> BwtBlock {
    let n = block.len();
    let order = sorted_rotations(block);
    let data = order.iter().map(|&i| block[(i + n - 1) % n]).collect();
    let primary_index = order.iter().position(|&i| i == 0).unwrap_or(0) as u32;
    BwtBlock {
        data,
        primary_index,
    }
}

pub fn bwt_inverse(block: &BwtBlock) -> Result<Vec<u8>> {
    let last = &block.data;
    let n = last.len();
    let primary = block.primary_index as usize;
    if n == 0 {
        return if primary == 0 {
            Ok(Vec::new())
        } else {
            Err(Error::corrupt("BWT primary index on empty block"))
        };
    }
    if primary >= n {
        return Err(Error::corrupt(format!(
            "BWT primary index {primary} out of range for {n} octets"
        )));
    }
    let mut starts = [0usize; 256];
    for &b in last {
        starts[b as usize] += 1;
    }
    let mut sum = 0;
    for s in starts.iter_mut() {
        let count = *s;
        *s = sum;
        sum += count;
    }
    // last-to-first mapping
    let mut lf = vec![0usize; n];
    for (row, &b) in last.iter().enumerate() {
        lf[row] = starts[b as usize];
        starts[b as usize] += 1;
    }
    let mut out = vec![0u8; n];
    let mut row = primary;
    for slot in out.iter_mut().rev() {
        *slot = last[row];
        row = lf[row];
    }
    Ok(out)
}

pub fn mtf_encode(input: &[u8]) -> Vec<u8> {
    let mut list: Vec<u8> = (0..=255).collect();
    input
        .iter()
        .map(|&b| {
            let pos = list.iter().position(|&x| x == b).unwrap();
            list.remove(pos);
            list.insert(0, b);
            pos as u8
        })
        .collect()
}

pub fn mtf_decode(input: &[u8]) -> Vec<u8> {
    let mut list: Vec<u8> = (0..=255).collect();
    input
        .iter()
        .map(|&i| {
            let b = list.remove(i as usize);
            list.insert(0, b);
            b
        })
        .collect()
}

/// Zero-run token alphabet: two run digits followed by the shifted nonzero
/// MTF values.
pub const RUN_A: u16 = 0;
pub const RUN_B: u16 = 1;
/// Number of distinct RLE0 tokens (`RUN_A`, `RUN_B`, and 1..=255 shifted).
pub const RLE0_SYMBOLS: usize = 257;

/// Runs of zeros become bijective base-2 numerals over {RUN_A = 1,
/// RUN_B = 2}, least significant digit first; a nonzero value `v` becomes
/// token `v + 1`.
pub fn rle0_encode(input: &[u8]) -> Vec<u16> {
    let mut out = Vec::with_capacity(input.len());
    let mut run = 0usize;
    let flush = |run: &mut usize, out: &mut Vec<u16>| {
        while *run > 0 {
            if *run % 2 == 1 {
                out.push(RUN_A);
                *run = (*run - 1) / 2;
            } else {
                out.push(RUN_B);
                *run = (*run - 2) / 2;
            }
        }
    };
    for &v in input {
        if v == 0 {
            run += 1;
        } else {
            flush(&mut run, &mut out);
            out.push(u16::from(v) + 1);
        }
    }
    flush(&mut run, &mut out);
    out
}

pub fn rle0_decode(tokens: &[u16]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut run = 0usize;
    let mut digit = 1usize;
    for &t in tokens {
        match t {
            RUN_A | RUN_B => {
                let weight = if t == RUN_A { 1 } else { 2 };
                run = digit
                    .checked_mul(weight)
                    .and_then(|d| run.checked_add(d))
                    .filter(|&r| r <= u32::MAX as usize)
                    .ok_or_else(|| Error::corrupt("zero run too long"))?;
                digit = digit.saturating_mul(2);
            }
            2..=256 => {
                out.resize(out.len() + run, 0);
                run = 0;
                digit = 1;
                out.push((t - 1) as u8);
            }
            _ => return Err(Error::corrupt(format!("invalid RLE0 token {t}"))),
        }
    }
    out.resize(out.len() + run, 0);
    Ok(out)
}

const EOS: usize = RLE0_SYMBOLS;

fn encode_tokens(tokens: &[u16]) -> Vec<u8> {
    let mut model = AdaptiveModel::new(RLE0_SYMBOLS + 1);
    let mut enc = ArithEncoder::new();
    for &t in tokens {
        model.encode(&mut enc, t as usize);
    }
    model.encode(&mut enc, EOS);
    enc.finish()
}

fn decode_tokens(stream: &[u8]) -> Result<Vec<u16>> {
    let mut model = AdaptiveModel::new(RLE0_SYMBOLS + 1);
    let mut dec = ArithDecoder::new(stream);
    let mut tokens = Vec::new();
    loop {
        match model.decode(&mut dec)? {
            EOS => return Ok(tokens),
            t => tokens.push(t as u16),
        }
    }
}

/// Each block is written as `block_len | primary_index | stream_len | stream`,
/// the three lengths as big-endian u32.
pub fn compress(input: &[u8], block_size: usize) -> Vec<u8> {
    let mut out = Vec::new();
    for chunk in input.chunks(block_size) {
        let block = bwt_forward(chunk);
        let stream = encode_tokens(&rle0_encode(&mtf_encode(&block.data)));
        out.extend_from_slice(&(chunk.len() as u32).to_be_bytes());
        out.extend_from_slice(&block.primary_index.to_be_bytes());
        out.extend_from_slice(&(stream.len() as u32).to_be_bytes());
        out.extend(stream);
    }
    out
}

pub fn decompress(payload: &[u8], block_size: usize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut rest = payload;
    while !rest.is_empty() {
        let field = |bytes: &[u8], at: usize| -> Result<usize> {
            bytes
                .get(at..at + 4)
                .map(|b| u32::from_be_bytes(b.try_into().unwrap()) as usize)
                .ok_or_else(|| Error::corrupt("BWT block header truncated"))
        };
        let block_len = field(rest, 0)?;
        let primary_index = field(rest, 4)? as u32;
        let stream_len = field(rest, 8)?;
        if block_len == 0 || block_len > block_size {
            return Err(Error::corrupt(format!(
                "BWT block length {block_len} outside 1..={block_size}"
            )));
        }
        let stream = rest
            .get(12..12 + stream_len)
            .ok_or_else(|| Error::corrupt("BWT block stream truncated"))?;
        let mtf = rle0_decode(&decode_tokens(stream)?)?;
        if mtf.len() != block_len {
            return Err(Error::corrupt("BWT block decodes to wrong length"));
        }
        let block = BwtBlock {
            data: mtf_decode(&mtf),
            primary_index,
        };
        out.extend(bwt_inverse(&block)?);
        rest = &rest[12 + stream_len..];
    }
    Ok(out)
}
