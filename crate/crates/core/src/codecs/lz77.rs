//! Greedy LZ77 parsing over a sliding window.

use super::CodecConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LzToken {
    Literal(u8),
    /// Copy `length` octets starting `offset` octets back. `offset < length`
    /// is legal and repeats the overlapping tail.
    Match { offset: u32, length: u32 },
}

impl LzToken {
    pub fn is_literal(&self) -> bool {
        matches!(self, LzToken::Literal(_))
    }
}

const HASH_BITS: u32 = 16;
const NIL: u32 = u32::MAX;

fn hash3(bytes: &[u8]) -> usize {
    let v = u32::from(bytes[0]) | u32::from(bytes[1]) << 8 | u32::from(bytes[2]) << 16;
    (v.wrapping_mul(0x9E37_79B1) >> (32 - HASH_BITS)) as usize
}

/// Hash chains over 3-octet prefixes. Every earlier position whose prefix
/// hashes alike is reachable, so walking a chain to the window edge finds
/// the true longest match.
struct MatchFinder {
    head: Vec<u32>,
    prev: Vec<u32>,
}

impl MatchFinder {
    fn new(len: usize) -> Self {
        MatchFinder {
            head: vec![NIL; 1 << HASH_BITS],
            prev: vec![NIL; len],
        }
    }

    fn insert(&mut self, input: &[u8], pos: usize) {
        if pos + 3 <= input.len() {
            let h = hash3(&input[pos..]);
            self.prev[pos] = self.head[h];
            self.head[h] = pos as u32;
        }
    }

    /// Longest match for `pos`, preferring the nearest on equal length.
    fn longest(&self, input: &[u8], pos: usize, cfg: &CodecConfig) -> (usize, usize) {
        let max_len = cfg.lz_max_match().min(input.len() - pos);
        let mut best = (0, 0);
        if max_len < 3 {
            return self.short_match(input, pos, max_len, cfg);
        }
        let mut cand = self.head[hash3(&input[pos..])];
        while cand != NIL {
            let c = cand as usize;
            let offset = pos - c;
            if offset > cfg.lz_window() {
                break;
            }
            let len = common_prefix(input, c, pos, max_len);
            if len > best.1 {
                best = (offset, len);
                if len == max_len {
                    break;
                }
            }
            cand = self.prev[c];
        }
        if best.1 < 3 {
            // Hash chains only index 3-octet prefixes; two-octet matches
            // (allowed when lz_min_match is 2) need a direct scan.
            return self.short_match(input, pos, max_len, cfg);
        }
        best
    }

    fn short_match(&self, input: &[u8], pos: usize, max_len: usize, cfg: &CodecConfig) -> (usize, usize) {
        if cfg.lz_min_match() > 2 || max_len < 2 {
            return (0, 0);
        }
        let lowest = pos.saturating_sub(cfg.lz_window());
        (lowest..pos)
            .rev()
            .find(|&c| input[c] == input[pos] && input[c + 1] == input[pos + 1])
            .map_or((0, 0), |c| (pos - c, 2))
    }
}

fn common_prefix(input: &[u8], a: usize, b: usize, max_len: usize) -> usize {
    (0..max_len)
        .take_while(|&k| input[a + k] == input[b + k])
        .count()
}

pub fn lz77_parse(input: &[u8], cfg: &CodecConfig) -> Vec<LzToken> {
    let mut finder = MatchFinder::new(input.len());
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < input.len() {
        let (offset, len) = finder.longest(input, pos, cfg);
        if len >= cfg.lz_min_match() {
            tokens.push(LzToken::Match {
                offset: offset as u32,
                length: len as u32,
            });
            for p in pos..pos + len {
                finder.insert(input, p);
            }
            pos += len;
        } else {
            tokens.push(LzToken::Literal(input[pos]));
            finder.insert(input, pos);
            pos += 1;
        }
    }
    tokens
}

/// Replay a token into `out`, checking it against what has been decoded.
pub fn apply_token(token: LzToken, out: &mut Vec<u8>) -> Result<()> {
    match token {
        LzToken::Literal(b) => out.push(b),
        LzToken::Match { offset, length } => {
            let offset = offset as usize;
            if offset == 0 || offset > out.len() {
                return Err(Error::corrupt(format!(
                    "match offset {offset} reaches before the start of output ({})",
                    out.len()
                )));
            }
            let start = out.len() - offset;
            for k in 0..length as usize {
                out.push(out[start + k]);
            }
        }
    }
    Ok(())
}

pub fn lz77_unparse(tokens: &[LzToken]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for &t in tokens {
        apply_token(t, &mut out)?;
    }
    Ok(out)
}
