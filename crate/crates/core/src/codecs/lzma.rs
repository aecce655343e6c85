//! LZ77 tokens entropy-coded with an adaptive binary range coder.
//!
//! Borrows the LZMA recipe without its container format: every probability
//! is selected by a small state machine over the kinds of the two preceding
//! tokens, and a match that reuses the previous offset is flagged
//! instead of re-sending the distance. Output is not readable by 7-zip or xz.

use super::lz77::{apply_token, lz77_parse, LzToken};
use super::rangecoder::{BitTree, Prob, RangeDecoder, RangeEncoder};
use super::CodecConfig;
use crate::error::{Error, Result};

const STATES: usize = 4;
const LEN_LOW_BITS: u32 = 3;
const LEN_MID_BITS: u32 = 3;
const LEN_HIGH_BITS: u32 = 8;
/// Largest `length - lz_min_match` the length coder can express.
pub const MAX_LEN_SPAN: usize =
    (1 << LEN_LOW_BITS) + (1 << LEN_MID_BITS) + (1 << LEN_HIGH_BITS) - 1;
const SLOT_BITS: u32 = 6;
const LEN_STATES: usize = 4;
const ALIGN_BITS: u32 = 4;
const FIRST_DIRECT_SLOT: u32 = 14;

/// Kinds of the last two tokens: bit 0 = previous was a match, bit 1 = the
/// one before it was.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct State(usize);

impl State {
    fn after(self, was_match: bool) -> State {
        State(((self.0 << 1) & 0b10) | usize::from(was_match))
    }

    fn previous_was_match(self) -> usize {
        self.0 & 1
    }
}

#[derive(Debug, Clone)]
struct LengthCoder {
    choice: [Prob; 2],
    choice2: [Prob; 2],
    low: Vec<BitTree>,
    mid: Vec<BitTree>,
    high: BitTree,
}

impl LengthCoder {
    fn new() -> Self {
        LengthCoder {
            choice: Default::default(),
            choice2: Default::default(),
            low: vec![BitTree::new(LEN_LOW_BITS); 2],
            mid: vec![BitTree::new(LEN_MID_BITS); 2],
            high: BitTree::new(LEN_HIGH_BITS),
        }
    }

    fn encode(&mut self, rc: &mut RangeEncoder, span: u32, ctx: usize) {
        const LOW: u32 = 1 << LEN_LOW_BITS;
        const MID: u32 = 1 << LEN_MID_BITS;
        if span < LOW {
            rc.encode_bit(&mut self.choice[ctx], false);
            self.low[ctx].encode(rc, span);
        } else if span < LOW + MID {
            rc.encode_bit(&mut self.choice[ctx], true);
            rc.encode_bit(&mut self.choice2[ctx], false);
            self.mid[ctx].encode(rc, span - LOW);
        } else {
            rc.encode_bit(&mut self.choice[ctx], true);
            rc.encode_bit(&mut self.choice2[ctx], true);
            self.high.encode(rc, span - LOW - MID);
        }
    }

    fn decode(&mut self, rc: &mut RangeDecoder<'_>, ctx: usize) -> Result<u32> {
        const LOW: u32 = 1 << LEN_LOW_BITS;
        const MID: u32 = 1 << LEN_MID_BITS;
        if !rc.decode_bit(&mut self.choice[ctx])? {
            return self.low[ctx].decode(rc);
        }
        if !rc.decode_bit(&mut self.choice2[ctx])? {
            return Ok(LOW + self.mid[ctx].decode(rc)?);
        }
        Ok(LOW + MID + self.high.decode(rc)?)
    }
}

fn distance_slot(dist: u32) -> u32 {
    if dist < 4 {
        return dist;
    }
    let msb = 31 - dist.leading_zeros();
    2 * msb + ((dist >> (msb - 1)) & 1)
}

/// All adaptive probabilities of the coder.
#[derive(Debug, Clone)]
struct Model {
    is_match: [Prob; STATES],
    is_rep: [Prob; STATES],
    literal: Vec<BitTree>,
    lengths: LengthCoder,
    rep_lengths: LengthCoder,
    slots: Vec<BitTree>,
    /// One tree per slot below `FIRST_DIRECT_SLOT` for its extra bits.
    slot_extra: Vec<BitTree>,
    align: BitTree,
}

impl Model {
    fn new() -> Self {
        Model {
            is_match: Default::default(),
            is_rep: Default::default(),
            literal: vec![BitTree::new(8); 2],
            lengths: LengthCoder::new(),
            rep_lengths: LengthCoder::new(),
            slots: vec![BitTree::new(SLOT_BITS); LEN_STATES],
            slot_extra: (0..FIRST_DIRECT_SLOT)
                .map(|slot| BitTree::new((slot / 2).saturating_sub(1)))
                .collect(),
            align: BitTree::new(ALIGN_BITS),
        }
    }

    fn literal_tree(&mut self, state: State) -> &mut BitTree {
        &mut self.literal[state.previous_was_match()]
    }

    fn encode_distance(&mut self, rc: &mut RangeEncoder, dist: u32, span: u32) {
        let len_state = (span as usize).min(LEN_STATES - 1);
        let slot = distance_slot(dist);
        self.slots[len_state].encode(rc, slot);
        if slot < 4 {
            return;
        }
        let extra_bits = slot / 2 - 1;
        let base = (2 | (slot & 1)) << extra_bits;
        let extra = dist - base;
        if slot < FIRST_DIRECT_SLOT {
            self.slot_extra[slot as usize].encode(rc, extra);
        } else {
            rc.encode_direct(extra >> ALIGN_BITS, extra_bits - ALIGN_BITS);
            self.align.encode(rc, extra & ((1 << ALIGN_BITS) - 1));
        }
    }

    fn decode_distance(&mut self, rc: &mut RangeDecoder<'_>, span: u32) -> Result<u32> {
        let len_state = (span as usize).min(LEN_STATES - 1);
        let slot = self.slots[len_state].decode(rc)?;
        if slot < 4 {
            return Ok(slot);
        }
        let extra_bits = slot / 2 - 1;
        let base = (2u32 | (slot & 1)) << extra_bits;
        let extra = if slot < FIRST_DIRECT_SLOT {
            self.slot_extra[slot as usize].decode(rc)?
        } else {
            let high = rc.decode_direct(extra_bits - ALIGN_BITS)?;
            (high << ALIGN_BITS) | self.align.decode(rc)?
        };
        Ok(base + extra)
    }
}

pub fn lzma_encode(input: &[u8], cfg: &CodecConfig) -> Vec<u8> {
    if input.is_empty() {
        return Vec::new();
    }
    let min = cfg.lz_min_match() as u32;
    let mut model = Model::new();
    let mut rc = RangeEncoder::new();
    let mut state = State::default();
    let mut last_offset = 0u32;
    for token in lz77_parse(input, cfg) {
        match token {
            LzToken::Literal(b) => {
                rc.encode_bit(&mut model.is_match[state.0], false);
                model.literal_tree(state).encode(&mut rc, u32::from(b));
            }
            LzToken::Match { offset, length } => {
                rc.encode_bit(&mut model.is_match[state.0], true);
                let span = length - min;
                let rep = offset == last_offset;
                rc.encode_bit(&mut model.is_rep[state.0], rep);
                let ctx = state.previous_was_match();
                if rep {
                    model.rep_lengths.encode(&mut rc, span, ctx);
                } else {
                    model.lengths.encode(&mut rc, span, ctx);
                    model.encode_distance(&mut rc, offset - 1, span);
                }
                last_offset = offset;
            }
        }
        state = state.after(!token.is_literal());
    }
    rc.finish()
}

pub fn lzma_decode(payload: &[u8], cfg: &CodecConfig, original_len: usize) -> Result<Vec<u8>> {
    if original_len == 0 {
        return if payload.is_empty() {
            Ok(Vec::new())
        } else {
            Err(Error::corrupt("LZMA payload present for empty output"))
        };
    }
    let min = cfg.lz_min_match() as u32;
    let mut model = Model::new();
    let mut rc = RangeDecoder::new(payload)?;
    let mut state = State::default();
    let mut last_offset = 0u32;
    let mut out = Vec::with_capacity(original_len);
    while out.len() < original_len {
        let token = if !rc.decode_bit(&mut model.is_match[state.0])? {
            LzToken::Literal(model.literal_tree(state).decode(&mut rc)? as u8)
        } else {
            let rep = rc.decode_bit(&mut model.is_rep[state.0])?;
            let ctx = state.previous_was_match();
            let offset = if rep {
                let span = model.rep_lengths.decode(&mut rc, ctx)?;
                (last_offset, span)
            } else {
                let span = model.lengths.decode(&mut rc, ctx)?;
                (model.decode_distance(&mut rc, span)? + 1, span)
            };
            let (offset, span) = offset;
            last_offset = offset;
            LzToken::Match {
                offset,
                length: span + min,
            }
        };
        if let LzToken::Match { length, .. } = token {
            if out.len() + length as usize > original_len {
                return Err(Error::corrupt("LZMA match runs past declared length"));
            }
        }
        apply_token(token, &mut out)?;
        state = state.after(!token.is_literal());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(input: &[u8], cfg: &CodecConfig) -> Vec<u8> {
        let payload = lzma_encode(input, cfg);
        assert_eq!(lzma_decode(&payload, cfg, input.len()).unwrap(), input);
        payload
    }

    #[test]
    fn slots_cover_their_ranges() {
        assert_eq!(distance_slot(0), 0);
        assert_eq!(distance_slot(3), 3);
        assert_eq!(distance_slot(4), 4);
        assert_eq!(distance_slot(6), 5);
        assert_eq!(distance_slot(8), 6);
        assert_eq!(distance_slot((1 << 24) - 1), 47);
    }

    #[test]
    fn empty_is_header_only() {
        let cfg = CodecConfig::default();
        assert!(round_trip(b"", &cfg).is_empty());
    }

    /// Size of the tokens written with fixed-width fields: a kind flag, then
    /// either the octet or an offset wide enough for the window plus a
    /// length field wide enough for the match span.
    fn fixed_width_bits(tokens: &[LzToken], cfg: &CodecConfig) -> usize {
        let offset_bits = (usize::BITS - (cfg.lz_window() - 1).leading_zeros()) as usize;
        let span = cfg.lz_max_match() - cfg.lz_min_match();
        let length_bits = (usize::BITS - span.leading_zeros()) as usize;
        tokens
            .iter()
            .map(|t| match t {
                LzToken::Literal(_) => 1 + 8,
                LzToken::Match { .. } => 1 + offset_bits + length_bits,
            })
            .sum()
    }

    #[test]
    fn beats_fixed_width_token_serialization() {
        let cfg = CodecConfig::default();
        for input in [
            b"abcabcabc".repeat(100),
            b"it was the best of times, it was the worst of times".repeat(20),
        ] {
            let tokens = lz77_parse(&input, &cfg);
            let payload = round_trip(&input, &cfg);
            let oracle = fixed_width_bits(&tokens, &cfg);
            assert!(payload.len() * 8 < oracle, "{} vs {oracle}", payload.len() * 8);
        }
    }

    #[test]
    fn long_distances_and_lengths() {
        let cfg = CodecConfig::default();
        let mut input: Vec<u8> = (0..40_000u32).map(|i| (i.wrapping_mul(2654435761) >> 11) as u8).collect();
        let copy = input[100..5000].to_vec();
        input.extend(copy);
        input.extend(std::iter::repeat_n(9, 2000));
        round_trip(&input, &cfg);
    }

    #[test]
    fn alternate_match_ranges() {
        let cfg = CodecConfig::default().with_lz_match_range(2, 273).unwrap();
        round_trip(&b"xyxyzzxyzxy".repeat(30), &cfg);
        let cfg = CodecConfig::default().with_lz_match_range(16, 287).unwrap();
        round_trip(&[1u8; 5000], &cfg);
    }

    #[test]
    fn truncated_stream_is_corrupt() {
        let cfg = CodecConfig::default();
        let input = b"the cat sat on the mat with the hat".repeat(4);
        let payload = lzma_encode(&input, &cfg);
        let err = lzma_decode(&payload[..payload.len() / 2], &cfg, input.len());
        assert!(matches!(err, Err(Error::CorruptStream(_))));
    }
}
