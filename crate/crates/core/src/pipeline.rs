//! Voice payload → extended ASCII → compressed blob → SMS bundle, and back.

use crate::codecs::{compress, decompress, AlgorithmId, CodecConfig, CompressedBlob};
use crate::error::{Error, Result};
use crate::sms::{reassemble, segment, SmsSegment};

/// An encoded voice clip, handled as opaque octets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VoicePayload {
    pub bytes: Vec<u8>,
    pub source_label: String,
}

impl VoicePayload {
    pub fn new(bytes: Vec<u8>, source_label: impl Into<String>) -> Self {
        VoicePayload {
            bytes,
            source_label: source_label.into(),
        }
    }
}

/// Text whose characters are all in the 0..=255 range (Latin-1).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExtAsciiText(String);

impl ExtAsciiText {
    /// Validate that every character of `text` is below U+0100.
    pub fn from_text(text: &str) -> Result<Self> {
        match text.chars().find(|&c| u32::from(c) > 0xFF) {
            Some(c) => Err(Error::NonExtAsciiCodePoint(u32::from(c))),
            None => Ok(ExtAsciiText(text.to_owned())),
        }
    }

    /// Build from raw code points, rejecting anything outside 0..=255.
    pub fn from_code_points(points: &[u32]) -> Result<Self> {
        points
            .iter()
            .map(|&p| {
                u8::try_from(p)
                    .map(char::from)
                    .map_err(|_| Error::NonExtAsciiCodePoint(p))
            })
            .collect::<Result<String>>()
            .map(ExtAsciiText)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn code_points(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.chars().map(u32::from)
    }

    /// Number of characters (not UTF-8 octets).
    pub fn char_count(&self) -> usize {
        self.0.chars().count()
    }
}

pub fn bytes_to_ext_ascii(bytes: &[u8]) -> ExtAsciiText {
    ExtAsciiText(bytes.iter().map(|&b| char::from(b)).collect())
}

pub fn ext_ascii_to_bytes(text: &ExtAsciiText) -> Result<Vec<u8>> {
    text.code_points()
        .map(|p| u8::try_from(p).map_err(|_| Error::NonExtAsciiCodePoint(p)))
        .collect()
}

/// The segments of one message plus the algorithm that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmsBundle {
    pub reference: u8,
    pub segments: Vec<SmsSegment>,
    pub algorithm: AlgorithmId,
}

pub fn encode_message(
    voice: &VoicePayload,
    alg: AlgorithmId,
    cfg: &CodecConfig,
    reference: u8,
) -> Result<SmsBundle> {
    // The character view is length-preserving, so the blob octets are the
    // SMS characters.
    let text = bytes_to_ext_ascii(&voice.bytes);
    let bytes = ext_ascii_to_bytes(&text)?;
    let blob = compress(&bytes, alg, cfg);
    Ok(SmsBundle {
        reference,
        segments: segment(&blob.to_bytes(), reference)?,
        algorithm: alg,
    })
}

pub fn decode_message(bundle: &SmsBundle, cfg: &CodecConfig) -> Result<VoicePayload> {
    if bundle.segments.iter().any(|s| s.reference() != bundle.reference) {
        return Err(Error::MixedReference);
    }
    let blob_bytes = reassemble(&bundle.segments).map_err(|e| match e {
        Error::DuplicateConflict { seq } => {
            Error::corrupt(format!("segment {seq} arrived twice with different bodies"))
        }
        other => other,
    })?;
    let blob = CompressedBlob::from_bytes(&blob_bytes)?;
    if blob.algorithm != bundle.algorithm {
        return Err(Error::corrupt(format!(
            "bundle says {} but blob was made with {}",
            bundle.algorithm, blob.algorithm
        )));
    }
    let text = bytes_to_ext_ascii(&decompress(&blob, cfg)?);
    Ok(VoicePayload::new(
        ext_ascii_to_bytes(&text)?,
        format!("sms ref {}", bundle.reference),
    ))
}
