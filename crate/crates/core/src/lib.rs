//! Voice-over-SMS toolkit.
//!
//! A voice clip is treated as opaque octets, mapped one-to-one onto extended
//! ASCII characters, compressed with one of six lossless codecs, wrapped in a
//! small self-describing container and split into concatenated SMS segments.
//! The [`bench`] module replays a fixed sentence corpus through every codec
//! and reports character and SMS counts.

pub mod bench;
pub mod codecs;
pub mod error;
pub mod pipeline;
pub mod sms;

pub use codecs::{compress, decompress, AlgorithmId, CodecConfig, CompressedBlob};
pub use error::{Error, Result};
