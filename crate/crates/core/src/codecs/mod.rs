//! The six lossless compressors and the self-describing container that
//! carries their output.
//!
//! Every codec is reachable through [`compress`] / [`decompress`]; the
//! per-algorithm entry points are public as well so they can be tested and
//! benchmarked in isolation.

pub mod ac;
pub mod arith;
pub mod bitio;
pub mod bwt;
pub mod huffman;
pub mod lz77;
pub mod lzma;
pub mod lzw;
pub mod ppm;
pub mod rangecoder;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Identifies the algorithm used to produce a [`CompressedBlob`].
///
/// The discriminant is the wire value of the algorithm octet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum AlgorithmId {
    /// Pass-through; the uncompressed baseline.
    None = 0,
    Lzw = 1,
    Lzma = 2,
    Huffman = 3,
    Ppm = 4,
    Ac = 5,
    Bwt = 6,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 7] = [
        AlgorithmId::None,
        AlgorithmId::Lzw,
        AlgorithmId::Lzma,
        AlgorithmId::Huffman,
        AlgorithmId::Ppm,
        AlgorithmId::Ac,
        AlgorithmId::Bwt,
    ];

    /// The six actual compressors, without the pass-through baseline.
    pub const CODECS: [AlgorithmId; 6] = [
        AlgorithmId::Lzw,
        AlgorithmId::Lzma,
        AlgorithmId::Huffman,
        AlgorithmId::Ppm,
        AlgorithmId::Ac,
        AlgorithmId::Bwt,
    ];

    pub fn to_octet(self) -> u8 {
        self as u8
    }

    pub fn from_octet(octet: u8) -> Result<Self> {
        Self::ALL
            .get(octet as usize)
            .copied()
            .ok_or(Error::UnknownAlgorithm(octet))
    }

    /// Lower-case name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::None => "none",
            AlgorithmId::Lzw => "lzw",
            AlgorithmId::Lzma => "lzma",
            AlgorithmId::Huffman => "huffman",
            AlgorithmId::Ppm => "ppm",
            AlgorithmId::Ac => "ac",
            AlgorithmId::Bwt => "bwt",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .iter()
            .copied()
            .find(|a| a.name() == lower)
            .ok_or_else(|| format!("unknown algorithm '{s}'"))
    }
}

/// Codec tunables. Not serialized into blobs: sender and receiver must agree
/// on any non-default value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    lzw_max_code_bits: u32,
    ppm_order: usize,
    bwt_block_size: usize,
    lz_window: usize,
    lz_min_match: usize,
    lz_max_match: usize,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            lzw_max_code_bits: 14,
            ppm_order: 3,
            bwt_block_size: 65536,
            lz_window: 32768,
            lz_min_match: 3,
            lz_max_match: 273,
        }
    }
}

impl CodecConfig {
    pub const LZW_BITS: std::ops::RangeInclusive<u32> = 9..=16;
    pub const PPM_ORDERS: std::ops::RangeInclusive<usize> = 0..=8;
    pub const MAX_LZ_WINDOW: usize = 1 << 24;
    pub const LZ_MIN_MATCHES: std::ops::RangeInclusive<usize> = 2..=16;

    pub fn new(
        lzw_max_code_bits: u32,
        ppm_order: usize,
        bwt_block_size: usize,
        lz_window: usize,
        lz_min_match: usize,
        lz_max_match: usize,
    ) -> Result<Self> {
        if !Self::LZW_BITS.contains(&lzw_max_code_bits) {
            return Err(Error::InvalidConfig(format!(
                "lzw_max_code_bits {lzw_max_code_bits} not in 9..=16"
            )));
        }
        if !Self::PPM_ORDERS.contains(&ppm_order) {
            return Err(Error::InvalidConfig(format!(
                "ppm_order {ppm_order} not in 0..=8"
            )));
        }
        if bwt_block_size == 0 || bwt_block_size > u32::MAX as usize {
            return Err(Error::InvalidConfig(format!(
                "bwt_block_size {bwt_block_size} must be in 1..=2^32-1"
            )));
        }
        if lz_window == 0 || lz_window > Self::MAX_LZ_WINDOW {
            return Err(Error::InvalidConfig(format!(
                "lz_window {lz_window} must be in 1..=2^24"
            )));
        }
        if !Self::LZ_MIN_MATCHES.contains(&lz_min_match) {
            return Err(Error::InvalidConfig(format!(
                "lz_min_match {lz_min_match} not in 2..=16"
            )));
        }
        if lz_max_match < lz_min_match || lz_max_match - lz_min_match > lzma::MAX_LEN_SPAN {
            return Err(Error::InvalidConfig(format!(
                "lz_max_match {lz_max_match} must be in lz_min_match..=lz_min_match+{}",
                lzma::MAX_LEN_SPAN
            )));
        }
        Ok(CodecConfig {
            lzw_max_code_bits,
            ppm_order,
            bwt_block_size,
            lz_window,
            lz_min_match,
            lz_max_match,
        })
    }

    pub fn with_lzw_max_code_bits(self, bits: u32) -> Result<Self> {
        Self::new(
            bits,
            self.ppm_order,
            self.bwt_block_size,
            self.lz_window,
            self.lz_min_match,
            self.lz_max_match,
        )
    }

    pub fn with_ppm_order(self, order: usize) -> Result<Self> {
        Self::new(
            self.lzw_max_code_bits,
            order,
            self.bwt_block_size,
            self.lz_window,
            self.lz_min_match,
            self.lz_max_match,
        )
    }

    pub fn with_bwt_block_size(self, size: usize) -> Result<Self> {
        Self::new(
            self.lzw_max_code_bits,
            self.ppm_order,
            size,
            self.lz_window,
            self.lz_min_match,
            self.lz_max_match,
        )
    }

    pub fn with_lz_window(self, window: usize) -> Result<Self> {
        Self::new(
            self.lzw_max_code_bits,
            self.ppm_order,
            self.bwt_block_size,
            window,
            self.lz_min_match,
            self.lz_max_match,
        )
    }

    pub fn with_lz_match_range(self, min: usize, max: usize) -> Result<Self> {
        Self::new(
            self.lzw_max_code_bits,
            self.ppm_order,
            self.bwt_block_size,
            self.lz_window,
            min,
            max,
        )
    }

    pub fn lzw_max_code_bits(&self) -> u32 {
        self.lzw_max_code_bits
    }

    pub fn ppm_order(&self) -> usize {
        self.ppm_order
    }

    pub fn bwt_block_size(&self) -> usize {
        self.bwt_block_size
    }

    pub fn lz_window(&self) -> usize {
        self.lz_window
    }

    pub fn lz_min_match(&self) -> usize {
        self.lz_min_match
    }

    pub fn lz_max_match(&self) -> usize {
        self.lz_max_match
    }
}

/// Container written on the wire:
/// `"CVT1" | algorithm octet | original_len (u32 BE) | payload`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedBlob {
    pub algorithm: AlgorithmId,
    pub original_len: u32,
    pub payload: Vec<u8>,
}

impl CompressedBlob {
    pub const MAGIC: [u8; 4] = *b"CVT1";
    pub const HEADER_LEN: usize = 9;

    pub fn serialized_len(&self) -> usize {
        Self::HEADER_LEN + self.payload.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.serialized_len());
        out.extend_from_slice(&Self::MAGIC);
        out.push(self.algorithm.to_octet());
        out.extend_from_slice(&self.original_len.to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 || bytes[..4] != Self::MAGIC {
            return Err(Error::BadMagic(bytes[..bytes.len().min(4)].to_vec()));
        }
        if bytes.len() < Self::HEADER_LEN {
            return Err(Error::corrupt(format!(
                "blob header truncated at {} octets",
                bytes.len()
            )));
        }
        let algorithm = AlgorithmId::from_octet(bytes[4])?;
        let original_len = u32::from_be_bytes([bytes[5], bytes[6], bytes[7], bytes[8]]);
        Ok(CompressedBlob {
            algorithm,
            original_len,
            payload: bytes[Self::HEADER_LEN..].to_vec(),
        })
    }
}

/// Compress `input` with `alg`. Pure and deterministic for fixed arguments.
///
/// Panics if `input` is 4 GiB or larger, which the container cannot describe.
pub fn compress(input: &[u8], alg: AlgorithmId, cfg: &CodecConfig) -> CompressedBlob {
    let original_len =
        u32::try_from(input.len()).expect("input must be shorter than 2^32 octets");
    let payload = match alg {
        AlgorithmId::None => input.to_vec(),
        AlgorithmId::Lzw => lzw::compress(input, cfg.lzw_max_code_bits),
        AlgorithmId::Lzma => lzma::lzma_encode(input, cfg),
        AlgorithmId::Huffman => huffman::huffman_encode(input),
        AlgorithmId::Ppm => ppm::ppm_encode(input, cfg.ppm_order),
        AlgorithmId::Ac => ac::ac_encode(input),
        AlgorithmId::Bwt => bwt::compress(input, cfg.bwt_block_size),
    };
    CompressedBlob {
        algorithm: alg,
        original_len,
        payload,
    }
}

/// Invert [`compress`]. `cfg` must equal the configuration used to compress.
pub fn decompress(blob: &CompressedBlob, cfg: &CodecConfig) -> Result<Vec<u8>> {
    let expected = blob.original_len as usize;
    let payload = &blob.payload;
    let out = match blob.algorithm {
        AlgorithmId::None => payload.clone(),
        AlgorithmId::Lzw => lzw::decompress(payload, cfg.lzw_max_code_bits, expected)?,
        AlgorithmId::Lzma => lzma::lzma_decode(payload, cfg, expected)?,
        AlgorithmId::Huffman => huffman::huffman_decode(payload)?,
        AlgorithmId::Ppm => ppm::ppm_decode(payload, cfg.ppm_order)?,
        AlgorithmId::Ac => ac::ac_decode(payload)?,
        AlgorithmId::Bwt => bwt::decompress(payload, cfg.bwt_block_size)?,
    };
    if out.len() != expected {
        return Err(Error::corrupt(format!(
            "decoded {} octets, header declares {expected}",
            out.len()
        )));
    }
    Ok(out)
}

/// Parse a serialized blob and decompress it.
pub fn decompress_bytes(bytes: &[u8], cfg: &CodecConfig) -> Result<Vec<u8>> {
    decompress(&CompressedBlob::from_bytes(bytes)?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_octets_are_bijective() {
        for (i, alg) in AlgorithmId::ALL.iter().enumerate() {
            assert_eq!(alg.to_octet() as usize, i);
            assert_eq!(AlgorithmId::from_octet(i as u8).unwrap(), *alg);
            assert_eq!(alg.name().parse::<AlgorithmId>().unwrap(), *alg);
        }
        assert!(matches!(
            AlgorithmId::from_octet(7),
            Err(Error::UnknownAlgorithm(7))
        ));
    }

    #[test]
    fn config_ranges_are_enforced() {
        let cfg = CodecConfig::default();
        assert_eq!(cfg.lzw_max_code_bits(), 14);
        assert_eq!(cfg.ppm_order(), 3);
        assert!(cfg.with_lzw_max_code_bits(8).is_err());
        assert!(cfg.with_lzw_max_code_bits(17).is_err());
        assert!(cfg.with_lzw_max_code_bits(9).is_ok());
        assert!(cfg.with_ppm_order(9).is_err());
        assert!(cfg.with_ppm_order(0).is_ok());
        assert!(cfg.with_bwt_block_size(0).is_err());
        assert!(cfg.with_lz_window(0).is_err());
        assert!(cfg.with_lz_match_range(3, 2).is_err());
        assert!(cfg.with_lz_match_range(3, 274).is_ok());
        assert!(cfg.with_lz_match_range(3, 275).is_err());
    }

    #[test]
    fn empty_none_blob_is_header_only() {
        let blob = compress(b"", AlgorithmId::None, &CodecConfig::default());
        assert_eq!(blob.original_len, 0);
        assert!(blob.payload.is_empty());
        assert_eq!(blob.to_bytes(), b"CVT1\x00\x00\x00\x00\x00");
    }

    #[test]
    fn none_payload_is_verbatim() {
        let data = b"\x00\xffsome bytes";
        let blob = compress(data, AlgorithmId::None, &CodecConfig::default());
        assert_eq!(blob.payload, data);
    }

    #[test]
    fn hello_round_trips_through_huffman() {
        let cfg = CodecConfig::default();
        let blob = compress(b"hello", AlgorithmId::Huffman, &cfg);
        let bytes = blob.to_bytes();
        assert_eq!(decompress_bytes(&bytes, &cfg).unwrap(), b"hello");
    }

    #[test]
    fn bad_magic_is_rejected() {
        let err = decompress_bytes(b"XXXX\x00\x00\x00\x00\x00", &CodecConfig::default());
        assert!(matches!(err, Err(Error::BadMagic(_))));
        assert!(matches!(
            CompressedBlob::from_bytes(b"CV"),
            Err(Error::BadMagic(_))
        ));
    }

    #[test]
    fn unknown_algorithm_and_short_header() {
        assert!(matches!(
            CompressedBlob::from_bytes(b"CVT1\x09\x00\x00\x00\x00"),
            Err(Error::UnknownAlgorithm(9))
        ));
        assert!(matches!(
            CompressedBlob::from_bytes(b"CVT1\x01\x00"),
            Err(Error::CorruptStream(_))
        ));
    }

    #[test]
    fn length_mismatch_is_corrupt() {
        let cfg = CodecConfig::default();
        let mut blob = compress(b"abc", AlgorithmId::None, &cfg);
        blob.original_len = 4;
        assert!(matches!(decompress(&blob, &cfg), Err(Error::CorruptStream(_))));
    }

    #[test]
    fn all_codecs_round_trip_small_inputs() {
        let cfg = CodecConfig::default();
        let inputs: [&[u8]; 5] = [b"", b"a", b"hello", b"abracadabra abracadabra", &[0u8; 300]];
        for alg in AlgorithmId::ALL {
            for input in inputs {
                let blob = compress(input, alg, &cfg);
                let back = decompress_bytes(&blob.to_bytes(), &cfg).unwrap();
                assert_eq!(back, input, "{alg} failed on {input:?}");
            }
        }
    }
}
