//! Static Huffman coding with a frequency header.
//!
//! The tree is grown from a forest of single-leaf trees by repeatedly joining
//! the two lightest roots. Weight ties go to the tree holding the smallest
//! octet, which makes the code lengths reproducible. Code words are then
//! assigned canonically from the lengths, so the receiver only needs the
//! symbol counts to rebuild the exact table.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};

/// A node of the merge forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanNode {
    pub weight: u64,
    /// Present on leaves only.
    pub symbol: Option<u8>,
    pub children: Option<Box<(HuffmanNode, HuffmanNode)>>,
}

impl HuffmanNode {
    fn leaf(symbol: u8, weight: u64) -> Self {
        HuffmanNode {
            weight,
            symbol: Some(symbol),
            children: None,
        }
    }

    fn join(left: HuffmanNode, right: HuffmanNode) -> Self {
        HuffmanNode {
            weight: left.weight + right.weight,
            symbol: None,
            children: Some(Box::new((left, right))),
        }
    }

    fn assign_depths(&self, depth: u8, lengths: &mut [u8; 256]) {
        match (&self.children, self.symbol) {
            (Some(pair), _) => {
                pair.0.assign_depths(depth + 1, lengths);
                pair.1.assign_depths(depth + 1, lengths);
            }
            (None, Some(sym)) => lengths[sym as usize] = depth.max(1),
            (None, None) => unreachable!("leaf without symbol"),
        }
    }
}

/// Build the merge tree for `freqs` (zero counts are ignored).
pub fn build_huffman_tree(freqs: &BTreeMap<u8, u64>) -> Result<HuffmanNode> {
    // Heap key: (weight, smallest octet in the tree, insertion id).
    let mut heap = BinaryHeap::new();
    let mut nodes: Vec<Option<HuffmanNode>> = Vec::new();
    for (&sym, &count) in freqs.iter().filter(|(_, &c)| c > 0) {
        heap.push(Reverse((count, sym, nodes.len())));
        nodes.push(Some(HuffmanNode::leaf(sym, count)));
    }
    while heap.len() > 1 {
        let Reverse((w1, m1, i1)) = heap.pop().unwrap();
        let Reverse((w2, m2, i2)) = heap.pop().unwrap();
        let left = nodes[i1].take().unwrap();
        let right = nodes[i2].take().unwrap();
        heap.push(Reverse((w1 + w2, m1.min(m2), nodes.len())));
        nodes.push(Some(HuffmanNode::join(left, right)));
    }
    let Reverse((_, _, root)) = heap.pop().ok_or(Error::EmptyAlphabet)?;
    Ok(nodes[root].take().unwrap())
}

/// Canonical prefix code: octet → (code word, length in bits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTable {
    lengths: [u8; 256],
    codes: [u64; 256],
}

impl HuffmanTable {
    fn from_lengths(lengths: [u8; 256]) -> Self {
        let mut order: Vec<u8> = (0..=255u8).filter(|&s| lengths[s as usize] > 0).collect();
        order.sort_by_key(|&s| (lengths[s as usize], s));
        let mut codes = [0u64; 256];
        let mut code = 0u64;
        let mut prev_len = 0u8;
        for (i, &sym) in order.iter().enumerate() {
            let len = lengths[sym as usize];
            if i > 0 {
                code = (code + 1) << (len - prev_len);
            }
            codes[sym as usize] = code;
            prev_len = len;
        }
        HuffmanTable { lengths, codes }
    }

    /// Code length of `symbol`, or 0 if it is not in the alphabet.
    pub fn len(&self, symbol: u8) -> u8 {
        self.lengths[symbol as usize]
    }

    pub fn code(&self, symbol: u8) -> Option<(u64, u8)> {
        let len = self.lengths[symbol as usize];
        (len > 0).then_some((self.codes[symbol as usize], len))
    }

    /// The code word as a string of '0'/'1'.
    pub fn bit_string(&self, symbol: u8) -> Option<String> {
        self.code(symbol)
            .map(|(code, len)| format!("{code:0width$b}", width = len as usize))
    }

    pub fn symbols(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(|&s| self.lengths[s as usize] > 0)
    }

    fn write(&self, symbol: u8, w: &mut BitWriter) {
        let (code, len) = self.code(symbol).expect("symbol in table");
        let len = u32::from(len);
        if len > 32 {
            w.write_bits((code >> 32) as u32, len - 32);
            w.write_bits(code as u32, 32);
        } else {
            w.write_bits(code as u32, len);
        }
    }
}

pub fn build_huffman_table(freqs: &BTreeMap<u8, u64>) -> Result<HuffmanTable> {
    let root = build_huffman_tree(freqs)?;
    let mut lengths = [0u8; 256];
    root.assign_depths(0, &mut lengths);
    Ok(HuffmanTable::from_lengths(lengths))
}

fn count_symbols(input: &[u8]) -> BTreeMap<u8, u64> {
    let mut counts = [0u64; 256];
    for &b in input {
        counts[b as usize] += 1;
    }
    (0..=255u8)
        .filter(|&s| counts[s as usize] > 0)
        .map(|s| (s, counts[s as usize]))
        .collect()
}

/// Header (`n` BE16, then `n` × (octet, count BE32)) followed by the packed
/// code bits, zero-padded to a whole octet.
pub fn huffman_encode(input: &[u8]) -> Vec<u8> {
    let freqs = count_symbols(input);
    let mut out = Vec::with_capacity(2 + 5 * freqs.len() + input.len());
    out.extend_from_slice(&(freqs.len() as u16).to_be_bytes());
    for (&sym, &count) in &freqs {
        out.push(sym);
        let count = u32::try_from(count).expect("input shorter than 2^32");
        out.extend_from_slice(&count.to_be_bytes());
    }
    if freqs.is_empty() {
        return out;
    }
    let table = build_huffman_table(&freqs).expect("non-empty alphabet");
    let mut w = BitWriter::new();
    for &b in input {
        table.write(b, &mut w);
    }
    out.extend(w.finish());
    out
}

/// Canonical decoding tables: symbols sorted by (length, octet) and the
/// number of codes of each length.
struct CanonicalDecoder {
    sorted: Vec<u8>,
    per_length: Vec<u64>,
}

impl CanonicalDecoder {
    fn new(table: &HuffmanTable) -> Self {
        let mut sorted: Vec<u8> = table.symbols().collect();
        sorted.sort_by_key(|&s| (table.len(s), s));
        let max_len = sorted.iter().map(|&s| table.len(s)).max().unwrap_or(0) as usize;
        let mut per_length = vec![0u64; max_len + 1];
        for &s in &sorted {
            per_length[table.len(s) as usize] += 1;
        }
        CanonicalDecoder { sorted, per_length }
    }

    fn decode(&self, r: &mut BitReader<'_>) -> Result<u8> {
        let mut code = 0u64;
        let mut first = 0u64;
        let mut index = 0u64;
        for &count in &self.per_length[1..] {
            code |= u64::from(r.read_bits(1)?);
            if code >= first && code - first < count {
                return Ok(self.sorted[(index + code - first) as usize]);
            }
            index += count;
            first = (first + count) << 1;
            code <<= 1;
        }
        Err(Error::corrupt("bit pattern is not a Huffman code word"))
    }
}

pub fn huffman_decode(payload: &[u8]) -> Result<Vec<u8>> {
    let truncated = || Error::corrupt("Huffman header truncated");
    let n = u16::from_be_bytes(payload.get(..2).ok_or_else(truncated)?.try_into().unwrap());
    let header_len = 2 + 5 * n as usize;
    let entries = payload.get(2..header_len).ok_or_else(truncated)?;
    let mut freqs = BTreeMap::new();
    let mut total = 0u64;
    for entry in entries.chunks_exact(5) {
        let count = u64::from(u32::from_be_bytes(entry[1..5].try_into().unwrap()));
        if count == 0 || freqs.insert(entry[0], count).is_some() {
            return Err(Error::corrupt("invalid Huffman header entry"));
        }
        total += count;
    }
    if freqs.is_empty() {
        return Ok(Vec::new());
    }
    let table = build_huffman_table(&freqs)?;
    let decoder = CanonicalDecoder::new(&table);
    let mut r = BitReader::new(&payload[header_len..]);
    let mut out = Vec::with_capacity(total as usize);
    for _ in 0..total {
        out.push(decoder.decode(&mut r)?);
    }
    Ok(out)
}
