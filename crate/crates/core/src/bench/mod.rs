//! Compression benchmark over the sentence corpus.

pub mod corpus;
pub mod report;
mod svg;

use std::time::Instant;

use rayon::prelude::*;

use crate::codecs::{compress, AlgorithmId, CodecConfig, CompressedBlob};
use crate::error::{Error, Result};
use crate::sms::sms_count;

pub use corpus::{generate_corpus, load_manifest, CorpusItem, CorpusSpec, SentenceId};
pub use report::emit_report;

/// One (sentence, trial, algorithm) measurement. Character counts are
/// serialized blob lengths, header included.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub sentence_id: SentenceId,
    pub trial: u32,
    pub algorithm: AlgorithmId,
    pub original_chars: usize,
    pub compressed_chars: usize,
    pub ratio: f64,
    pub sms_count: usize,
    pub encode_micros: u64,
}

/// `original / compressed`; higher means fewer SMS.
pub fn compression_ratio(original: usize, compressed: usize) -> Result<f64> {
    if compressed == 0 {
        return Err(Error::ZeroCompressedSize);
    }
    Ok(original as f64 / compressed as f64)
}

fn measure(item: &CorpusItem, alg: AlgorithmId, cfg: &CodecConfig) -> Result<BenchmarkRecord> {
    let bytes = &item.payload.bytes;
    let original_chars = CompressedBlob::HEADER_LEN + bytes.len();
    let start = Instant::now();
    let blob = compress(bytes, alg, cfg);
    let encode_micros = start.elapsed().as_micros() as u64;
    let compressed_chars = blob.serialized_len();
    Ok(BenchmarkRecord {
        sentence_id: item.sentence_id,
        trial: item.trial,
        algorithm: alg,
        original_chars,
        compressed_chars,
        ratio: compression_ratio(original_chars, compressed_chars)?,
        sms_count: sms_count(compressed_chars),
        encode_micros,
    })
}

/// Measure every item under every algorithm in `algs`, plus the
/// pass-through baseline if it is not listed. Records come back ordered by
/// item, then by algorithm.
pub fn run_benchmark(
    corpus: &[CorpusItem],
    algs: &[AlgorithmId],
    cfg: &CodecConfig,
) -> Result<Vec<BenchmarkRecord>> {
    if corpus.is_empty() {
        return Err(Error::Manifest("benchmark corpus is empty".into()));
    }
    let mut algs = algs.to_vec();
    if !algs.contains(&AlgorithmId::None) {
        algs.insert(0, AlgorithmId::None);
    }
    algs.sort();
    algs.dedup();
    let jobs: Vec<(&CorpusItem, AlgorithmId)> = corpus
        .iter()
        .flat_map(|item| algs.iter().map(move |&a| (item, a)))
        .collect();
    jobs.into_par_iter()
        .map(|(item, alg)| measure(item, alg, cfg))
        .collect()
}

/// Per-(sentence, algorithm) means over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub sentence_id: SentenceId,
    pub algorithm: AlgorithmId,
    pub trials: usize,
    pub mean_original_chars: f64,
    pub mean_compressed_chars: f64,
    pub mean_ratio: f64,
    pub mean_sms_count: f64,
}

pub fn summarize(records: &[BenchmarkRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(SentenceId, AlgorithmId)> =
        records.iter().map(|r| (r.sentence_id, r.algorithm)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(sentence_id, algorithm)| {
            let rows: Vec<&BenchmarkRecord> = records
                .iter()
                .filter(|r| r.sentence_id == sentence_id && r.algorithm == algorithm)
                .collect();
            let n = rows.len() as f64;
            let mean = |f: &dyn Fn(&BenchmarkRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            SummaryRow {
                sentence_id,
                algorithm,
                trials: rows.len(),
                mean_original_chars: mean(&|r| r.original_chars as f64),
                mean_compressed_chars: mean(&|r| r.compressed_chars as f64),
                mean_ratio: mean(&|r| r.ratio),
                mean_sms_count: mean(&|r| r.sms_count as f64),
            }
        })
        .collect()
}
