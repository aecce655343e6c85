use std::io;

use thiserror::Error;

/// Errors raised anywhere in the voicepack library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad magic: expected \"CVT1\", found {0:02x?}")]
    BadMagic(Vec<u8>),

    #[error("unknown algorithm id {0}")]
    UnknownAlgorithm(u8),

    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    #[error("cannot build a prefix code over an empty alphabet")]
    EmptyAlphabet,

    #[error("invalid codec config: {0}")]
    InvalidConfig(String),

    #[error("code point {0} is outside the extended ASCII range")]
    NonExtAsciiCodePoint(u32),

    #[error("missing segment(s) {0:?}")]
    MissingSegment(Vec<u8>),

    #[error("segments belong to different messages")]
    MixedReference,

    #[error("segment {seq} received twice with different bodies")]
    DuplicateConflict { seq: u8 },

    #[error("payload of {len} octets needs {count} segments (max 255)")]
    TooManySegments { len: usize, count: usize },

    #[error("invalid segment: {0}")]
    InvalidSegment(String),

    #[error("malformed segment file {path}: {reason}")]
    MalformedSegmentFile { path: String, reason: String },

    #[error("compressed size is zero")]
    ZeroCompressedSize,

    #[error("nothing to report: record list is empty")]
    EmptyRecords,

    #[error("corpus manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn corrupt(msg: impl Into<String>) -> Self {
        Error::CorruptStream(msg.into())
    }

    /// True for errors caused by the content of received or stored data
    /// rather than by how the library was called.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::BadMagic(_)
                | Error::UnknownAlgorithm(_)
                | Error::CorruptStream(_)
                | Error::MissingSegment(_)
                | Error::MixedReference
                | Error::DuplicateConflict { .. }
                | Error::MalformedSegmentFile { .. }
                | Error::InvalidSegment(_)
        )
    }

    /// Variant name, for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::BadMagic(_) => "BadMagic",
            Error::UnknownAlgorithm(_) => "UnknownAlgorithm",
            Error::CorruptStream(_) => "CorruptStream",
            Error::EmptyAlphabet => "EmptyAlphabet",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NonExtAsciiCodePoint(_) => "NonExtAsciiCodePoint",
            Error::MissingSegment(_) => "MissingSegment",
            Error::MixedReference => "MixedReference",
            Error::DuplicateConflict { .. } => "DuplicateConflict",
            Error::TooManySegments { .. } => "TooManySegments",
            Error::InvalidSegment(_) => "InvalidSegment",
            Error::MalformedSegmentFile { .. } => "MalformedSegmentFile",
            Error::ZeroCompressedSize => "ZeroCompressedSize",
            Error::EmptyRecords => "EmptyRecords",
            Error::Manifest(_) => "Manifest",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
