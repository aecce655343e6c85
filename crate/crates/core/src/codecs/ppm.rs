//! Order-k PPM with method C escapes and full exclusion.
//!
//! Each symbol is coded in the longest context (up to `k` preceding octets)
//! where it has been seen before. On the way down every context that does not
//! hold the symbol codes an escape, whose count equals the number of distinct
//! symbols the context has seen; symbols offered by a longer context are
//! excluded from the shorter ones. After coding, only the context where the
//! symbol was found and the longer ones are updated (update exclusion).
//! Below order 0 sits a uniform model over
//! the 256 octets plus an end-of-stream symbol. Probabilities drive the
//! shared arithmetic coder.

use std::collections::HashMap;

use super::arith::{ArithDecoder, ArithEncoder};
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 8;
const EOS: u16 = 256;
/// Rescale a context once its total (symbols + escape) passes this.
const COUNT_LIMIT: u32 = 1 << 16;

/// Symbol counts seen in one context.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextStats {
    entries: Vec<(u8, u32)>,
}

impl ContextStats {
    pub fn count(&self, symbol: u8) -> u32 {
        self.entries
            .iter()
            .find(|(s, _)| *s == symbol)
            .map_or(0, |&(_, c)| c)
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> u32 {
        self.entries.iter().map(|&(_, c)| c).sum()
    }

    fn increment(&mut self, symbol: u8) {
        match self.entries.iter_mut().find(|(s, _)| *s == symbol) {
            Some((_, c)) => *c += 1,
            None => self.entries.push((symbol, 1)),
        }
        if self.total() + self.distinct() as u32 > COUNT_LIMIT {
            for (_, c) in &mut self.entries {
                *c = (*c / 2).max(1);
            }
        }
    }
}

/// Context key: the order and the last `order` octets packed big-endian.
type ContextKey = (u8, u64);

/// Per-context statistics for orders `0..=order`.
#[derive(Debug, Clone)]
pub struct ContextModel {
    order: usize,
    contexts: HashMap<ContextKey, ContextStats>,
}

/// Coding probabilities for one context after exclusions.
struct Slate {
    /// (symbol, count) pairs still eligible, in insertion order.
    candidates: Vec<(u8, u32)>,
    escape: u32,
}

impl Slate {
    fn total(&self) -> u32 {
        self.candidates.iter().map(|&(_, c)| c).sum::<u32>() + self.escape
    }
}

impl ContextModel {
    pub fn new(order: usize) -> Self {
        assert!(order <= MAX_ORDER);
        ContextModel {
            order,
            contexts: HashMap::new(),
        }
    }

    fn key(history: &[u8], order: usize) -> ContextKey {
        let tail = &history[history.len() - order..];
        let packed = tail.iter().fold(0u64, |acc, &b| (acc << 8) | u64::from(b));
        (order as u8, packed)
    }

    /// Statistics for the context formed by the last `order` octets of
    /// `history`, if that context has occurred.
    pub fn stats(&self, history: &[u8], order: usize) -> Option<&ContextStats> {
        if order > history.len() || order > self.order {
            return None;
        }
        self.contexts.get(&Self::key(history, order))
    }

    /// Record `symbol` as following `history` in every order.
    pub fn update(&mut self, history: &[u8], symbol: u8) {
        self.update_from(history, symbol, 0);
    }

    /// Record `symbol` in orders `lowest..=order` only.
    fn update_from(&mut self, history: &[u8], symbol: u8, lowest: usize) {
        let top = self.order.min(history.len());
        for order in lowest..=top {
            self.contexts
                .entry(Self::key(history, order))
                .or_default()
                .increment(symbol);
        }
    }

    fn slate(&self, history: &[u8], order: usize, excluded: &[bool; 256]) -> Option<Slate> {
        let stats = self.stats(history, order)?;
        let candidates: Vec<(u8, u32)> = stats
            .entries
            .iter()
            .copied()
            .filter(|&(s, _)| !excluded[s as usize])
            .collect();
        if candidates.is_empty() {
            return None;
        }
        Some(Slate {
            candidates,
            escape: stats.distinct() as u32,
        })
    }

    fn top_order(&self, history: &[u8]) -> usize {
        self.order.min(history.len())
    }
}

/// Slice of `target` in the uniform fallback model, skipping excluded octets.
fn uniform_slice(target: u16, excluded: &[bool; 256]) -> (u32, u32, u32) {
    let below = (0..target)
        .filter(|&s| s == EOS || !excluded[s as usize])
        .count() as u32;
    let total = 1 + excluded.iter().filter(|&&e| !e).count() as u32;
    (below, below + 1, total)
}

fn encode_symbol(
    model: &ContextModel,
    history: &[u8],
    symbol: u16,
    enc: &mut ArithEncoder,
) -> usize {
    let mut excluded = [false; 256];
    for order in (0..=model.top_order(history)).rev() {
        let Some(slate) = model.slate(history, order, &excluded) else {
            continue;
        };
        let total = slate.total();
        let mut low = 0;
        for &(s, c) in &slate.candidates {
            if u16::from(s) == symbol {
                enc.encode(low, low + c, total);
                return order;
            }
            low += c;
        }
        enc.encode(low, low + slate.escape, total);
        for &(s, _) in &slate.candidates {
            excluded[s as usize] = true;
        }
    }
    let (lo, hi, total) = uniform_slice(symbol, &excluded);
    enc.encode(lo, hi, total);
    0
}

fn decode_symbol(model: &ContextModel, history: &[u8], dec: &mut ArithDecoder<'_>) -> Result<(u16, usize)> {
    dec.check_overrun()?;
    let mut excluded = [false; 256];
    for order in (0..=model.top_order(history)).rev() {
        let Some(slate) = model.slate(history, order, &excluded) else {
            continue;
        };
        let total = slate.total();
        let target = dec.target(total)?;
        let mut low = 0;
        for &(s, c) in &slate.candidates {
            if target < low + c {
                dec.consume(low, low + c, total);
                return Ok((u16::from(s), order));
            }
            low += c;
        }
        if target >= total {
            return Err(Error::corrupt("PPM target beyond context total"));
        }
        dec.consume(low, total, total);
        for &(s, _) in &slate.candidates {
            excluded[s as usize] = true;
        }
    }
    let total = 1 + excluded.iter().filter(|&&e| !e).count() as u32;
    let target = dec.target(total)?;
    let symbol = (0..256u16)
        .filter(|&s| !excluded[s as usize])
        .chain([EOS])
        .nth(target as usize)
        .ok_or_else(|| Error::corrupt("PPM uniform target out of range"))?;
    dec.consume(target, target + 1, total);
    Ok((symbol, 0))
}

pub fn ppm_encode(input: &[u8], order: usize) -> Vec<u8> {
    let mut model = ContextModel::new(order);
    let mut enc = ArithEncoder::new();
    for (i, &b) in input.iter().enumerate() {
        let history = &input[..i];
        let found = encode_symbol(&model, history, u16::from(b), &mut enc);
        model.update_from(history, b, found);
    }
    encode_symbol(&model, input, EOS, &mut enc);
    enc.finish()
}

pub fn ppm_decode(payload: &[u8], order: usize) -> Result<Vec<u8>> {
    let mut model = ContextModel::new(order);
    let mut dec = ArithDecoder::new(payload);
    let mut out = Vec::new();
    loop {
        let (symbol, found) = decode_symbol(&model, &out, &mut dec)?;
        if symbol == EOS {
            return Ok(out);
        }
        let b = symbol as u8;
        model.update_from(&out, b, found);
        out.push(b);
    }
}
