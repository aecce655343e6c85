//! Concatenated-SMS segmentation, reassembly and a directory-pair transport.
//!
//! Payloads travel as 8-bit binary SMS. A message that fits one SMS carries
//! up to 140 octets; longer messages are split into parts that each spend 6
//! octets on a user-data header (`05 00 03 ref total seq`), leaving 134.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// User-data capacity of a single SMS in octets.
pub const SINGLE_SMS_CAPACITY: usize = 140;
/// Concatenation UDH: length 05, IEI 00, IE length 03, then ref/total/seq.
pub const UDH_LEN: usize = 6;
/// Body capacity of each part of a concatenated message.
pub const MULTIPART_CAPACITY: usize = SINGLE_SMS_CAPACITY - UDH_LEN;
pub const MAX_SEGMENTS: usize = 255;
const UDH_PREFIX: [u8; 3] = [0x05, 0x00, 0x03];

/// Number of SMS needed for `payload_len` octets. An empty message still
/// takes one SMS.
pub fn sms_count(payload_len: usize) -> usize {
    if payload_len <= SINGLE_SMS_CAPACITY {
        1
    } else {
        payload_len.div_ceil(MULTIPART_CAPACITY)
    }
}

fn body_capacity(total: u8) -> usize {
    if total == 1 {
        SINGLE_SMS_CAPACITY
    } else {
        MULTIPART_CAPACITY
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmsSegment {
    reference: u8,
    total: u8,
    seq: u8,
    body: Vec<u8>,
}

impl SmsSegment {
    pub fn new(reference: u8, total: u8, seq: u8, body: Vec<u8>) -> Result<Self> {
        if total == 0 || seq == 0 || seq > total {
            return Err(Error::InvalidSegment(format!(
                "sequence {seq} of {total} is out of range"
            )));
        }
        if body.len() > body_capacity(total) {
            return Err(Error::InvalidSegment(format!(
                "body of {} octets exceeds {} for a {total}-part message",
                body.len(),
                body_capacity(total)
            )));
        }
        if body.is_empty() && total > 1 {
            return Err(Error::InvalidSegment(
                "only a single-part message may have an empty body".into(),
            ));
        }
        Ok(SmsSegment {
            reference,
            total,
            seq,
            body,
        })
    }

    pub fn reference(&self) -> u8 {
        self.reference
    }

    pub fn total(&self) -> u8 {
        self.total
    }

    pub fn seq(&self) -> u8 {
        self.seq
    }

    pub fn body(&self) -> &[u8] {
        &self.body
    }

    /// UDH followed by the body, as stored in a segment file.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(UDH_LEN + self.body.len());
        out.extend_from_slice(&UDH_PREFIX);
        out.extend_from_slice(&[self.reference, self.total, self.seq]);
        out.extend_from_slice(&self.body);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < UDH_LEN || bytes[..3] != UDH_PREFIX {
            return Err(Error::InvalidSegment("missing concatenation header".into()));
        }
        Self::new(bytes[3], bytes[4], bytes[5], bytes[UDH_LEN..].to_vec())
    }

    /// `<ref>_<seq>_of_<total>.sms`, each number as three decimal digits.
    pub fn file_name(&self) -> String {
        format!("{:03}_{:03}_of_{:03}.sms", self.reference, self.seq, self.total)
    }
}

/// Split `payload` into SMS parts under message reference `reference`.
pub fn segment(payload: &[u8], reference: u8) -> Result<Vec<SmsSegment>> {
    let count = sms_count(payload.len());
    if count > MAX_SEGMENTS {
        return Err(Error::TooManySegments {
            len: payload.len(),
            count,
        });
    }
    let total = count as u8;
    if payload.is_empty() {
        return Ok(vec![SmsSegment::new(reference, 1, 1, Vec::new())?]);
    }
    payload
        .chunks(body_capacity(total))
        .enumerate()
        .map(|(i, body)| SmsSegment::new(reference, total, i as u8 + 1, body.to_vec()))
        .collect()
}

/// Order segments by sequence number, dropping identical duplicates.
/// Shared `(reference, total)` is required.
pub fn sort_segments(segments: &[SmsSegment]) -> Result<Vec<SmsSegment>> {
    let Some(first) = segments.first() else {
        return Ok(Vec::new());
    };
    let mut by_seq: BTreeMap<u8, &SmsSegment> = BTreeMap::new();
    for s in segments {
        if s.reference != first.reference || s.total != first.total {
            return Err(Error::MixedReference);
        }
        if let Some(existing) = by_seq.insert(s.seq, s) {
            if existing.body != s.body {
                return Err(Error::DuplicateConflict { seq: s.seq });
            }
        }
    }
    Ok(by_seq.into_values().cloned().collect())
}

/// Inverse of [`segment`]; arrival order does not matter.
pub fn reassemble(segments: &[SmsSegment]) -> Result<Vec<u8>> {
    let sorted = sort_segments(segments)?;
    let Some(first) = sorted.first() else {
        return Err(Error::MissingSegment(Vec::new()));
    };
    let missing: Vec<u8> = (1..=first.total)
        .filter(|seq| sorted.binary_search_by_key(seq, |s| s.seq).is_err())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingSegment(missing));
    }
    let capacity = body_capacity(first.total);
    let mut out = Vec::with_capacity(sorted.len() * capacity);
    for s in &sorted {
        if s.seq < first.total && s.body.len() != capacity {
            return Err(Error::InvalidSegment(format!(
                "part {} of {} carries {} octets, expected {capacity}",
                s.seq,
                first.total,
                s.body.len()
            )));
        }
        out.extend_from_slice(&s.body);
    }
    Ok(out)
}

/// Directory pair standing in for the radio link: senders write to
/// `root/outbox`, receivers read from `root/inbox`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportDir {
    root: PathBuf,
}

impl TransportDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        TransportDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn outbox(&self) -> PathBuf {
        self.root.join("outbox")
    }

    pub fn inbox(&self) -> PathBuf {
        self.root.join("inbox")
    }

    /// Create both directories if needed.
    pub fn ensure(&self) -> Result<()> {
        fs::create_dir_all(self.outbox())?;
        fs::create_dir_all(self.inbox())?;
        Ok(())
    }

    /// Move every segment file from the outbox to the inbox.
    pub fn loopback(&self) -> Result<usize> {
        self.ensure()?;
        let mut moved = 0;
        for entry in fs::read_dir(self.outbox())? {
            let entry = entry?;
            let name = entry.file_name();
            if parse_file_name(&name.to_string_lossy()).is_some() {
                fs::rename(entry.path(), self.inbox().join(&name))?;
                moved += 1;
            }
        }
        Ok(moved)
    }
}

/// Write one segment file into the outbox. Rewriting identical content is a
/// no-op; different content under the same name is a conflict.
pub fn outbox_write(segment: &SmsSegment, dir: &TransportDir) -> Result<PathBuf> {
    let path = dir.outbox().join(segment.file_name());
    let bytes = segment.to_bytes();
    let mut tmp = tempfile::NamedTempFile::new_in(dir.outbox())?;
    tmp.write_all(&bytes)?;
    tmp.as_file().sync_all()?;
    match tmp.persist_noclobber(&path) {
        Ok(_) => Ok(path),
        Err(e) if e.error.kind() == io::ErrorKind::AlreadyExists => {
            if fs::read(&path)? == bytes {
                Ok(path)
            } else {
                Err(Error::DuplicateConflict { seq: segment.seq })
            }
        }
        Err(e) => Err(e.error.into()),
    }
}

/// `(reference, seq, total)` from a segment file name.
fn parse_file_name(name: &str) -> Option<(u8, u8, u8)> {
    let stem = name.strip_suffix(".sms")?;
    let mut parts = stem.split('_');
    let (r, s, of, t) = (parts.next()?, parts.next()?, parts.next()?, parts.next()?);
    if parts.next().is_some() || of != "of" {
        return None;
    }
    let num = |p: &str| {
        (p.len() == 3 && p.bytes().all(|b| b.is_ascii_digit()))
            .then(|| p.parse::<u8>().ok())
            .flatten()
    };
    Some((num(r)?, num(s)?, num(t)?))
}

/// Read every inbox file addressed to `reference`, in sequence order.
/// Duplicates with identical bodies collapse into one segment.
pub fn inbox_collect(dir: &TransportDir, reference: u8) -> Result<Vec<SmsSegment>> {
    let mut segments = Vec::new();
    let inbox = dir.inbox();
    if !inbox.exists() {
        return Ok(segments);
    }
    let mut entries: Vec<_> = fs::read_dir(&inbox)?.collect::<io::Result<_>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some((r, seq, total)) = parse_file_name(&name) else {
            continue;
        };
        if r != reference {
            continue;
        }
        let path = entry.path();
        let malformed = |reason: String| Error::MalformedSegmentFile {
            path: path.display().to_string(),
            reason,
        };
        let bytes = fs::read(&path)?;
        let seg = SmsSegment::from_bytes(&bytes).map_err(|e| malformed(e.to_string()))?;
        if (seg.reference, seg.seq, seg.total) != (r, seq, total) {
            return Err(malformed(format!(
                "header says {:03}_{:03}_of_{:03}",
                seg.reference, seg.seq, seg.total
            )));
        }
        if seg.seq < seg.total && seg.body.len() != body_capacity(seg.total) {
            return Err(malformed(format!(
                "non-final part carries {} octets, expected {}",
                seg.body.len(),
                body_capacity(seg.total)
            )));
        }
        segments.push(seg);
    }
    sort_segments(&segments)
}
