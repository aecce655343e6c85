//! CSV tables and grouped-bar SVG charts for a benchmark run.

use std::fs;
use std::path::{Path, PathBuf};

use super::svg::{grouped_bar_chart, Series};
use super::{summarize, BenchmarkRecord, SentenceId};
use crate::codecs::AlgorithmId;
use crate::error::{Error, Result};

pub const RESULTS_HEADER: [&str; 8] = [
    "sentence_id",
    "trial",
    "algorithm",
    "original_chars",
    "compressed_chars",
    "ratio",
    "sms_count",
    "encode_micros",
];

/// Sentence families plotted together, one chart each.
const FAMILIES: [[u8; 3]; 3] = [[1, 2, 3], [4, 5, 6], [7, 8, 9]];

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Manifest(format!("{other:?}")),
    }
}

/// Render `results.csv` in memory.
pub fn results_csv(records: &[BenchmarkRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER).map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.sentence_id.to_string(),
            r.trial.to_string(),
            r.algorithm.name().to_string(),
            r.original_chars.to_string(),
            r.compressed_chars.to_string(),
            format!("{:.4}", r.ratio),
            r.sms_count.to_string(),
            r.encode_micros.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn summary_csv(records: &[BenchmarkRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "sentence_id",
        "algorithm",
        "trials",
        "mean_original_chars",
        "mean_compressed_chars",
        "mean_ratio",
        "mean_sms_count",
    ])
    .map_err(csv_error)?;
    for row in summarize(records) {
        w.write_record([
            row.sentence_id.to_string(),
            row.algorithm.name().to_string(),
            row.trials.to_string(),
            format!("{:.2}", row.mean_original_chars),
            format!("{:.2}", row.mean_compressed_chars),
            format!("{:.4}", row.mean_ratio),
            format!("{:.2}", row.mean_sms_count),
        ])
        .map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn series_label(alg: AlgorithmId) -> String {
    match alg {
        AlgorithmId::None => "uncompressed".to_string(),
        other => other.name().to_uppercase(),
    }
}

/// One chart for a sentence family: tests numbered consecutively through
/// the family's sentences and trials, one bar per algorithm.
fn family_chart(
    records: &[BenchmarkRecord],
    family: [u8; 3],
    metric: fn(&BenchmarkRecord) -> f64,
    title: &str,
    y_label: &str,
) -> Option<String> {
    let mut tests: Vec<(SentenceId, u32)> = records
        .iter()
        .filter(|r| family.contains(&r.sentence_id.number()))
        .map(|r| (r.sentence_id, r.trial))
        .collect();
    tests.sort();
    tests.dedup();
    if tests.is_empty() {
        return None;
    }
    let mut algs: Vec<AlgorithmId> = records.iter().map(|r| r.algorithm).collect();
    algs.sort();
    algs.dedup();
    let series: Vec<Series> = algs
        .iter()
        .map(|&alg| Series {
            label: series_label(alg),
            values: tests
                .iter()
                .map(|&(s, t)| {
                    records
                        .iter()
                        .find(|r| r.sentence_id == s && r.trial == t && r.algorithm == alg)
                        .map_or(0.0, metric)
                })
                .collect(),
        })
        .collect();
    let x_labels: Vec<String> = (1..=tests.len()).map(|i| i.to_string()).collect();
    Some(grouped_bar_chart(title, "test", y_label, &x_labels, &series))
}

/// Write `results.csv`, `summary.csv` and the six charts into `out_dir`.
/// Returns the paths written.
pub fn emit_report(records: &[BenchmarkRecord], out_dir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    put("results.csv", &results_csv(records)?)?;
    put("summary.csv", &summary_csv(records)?)?;
    type Metric = fn(&BenchmarkRecord) -> f64;
    let metrics: [(&str, &str, Metric); 2] = [
        ("chars", "number of characters", |r| r.compressed_chars as f64),
        ("sms", "number of SMS", |r| r.sms_count as f64),
    ];
    for (prefix, y_label, metric) in metrics {
        for family in FAMILIES {
            let range = format!("S{}-S{}", family[0], family[2]);
            let title = format!("{y_label} per algorithm, {range}");
            if let Some(svg) = family_chart(records, family, metric, &title, y_label) {
                put(&format!("{prefix}_{range}.svg"), svg.as_bytes())?;
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{generate_corpus, run_benchmark, CorpusSpec};
    use crate::codecs::CodecConfig;

    fn small_run() -> Vec<BenchmarkRecord> {
        let corpus = generate_corpus(&CorpusSpec::default()).unwrap();
        let picked: Vec<_> = corpus.into_iter().filter(|i| i.trial <= 2).collect();
        run_benchmark(&picked, &AlgorithmId::ALL, &CodecConfig::default()).unwrap()
    }

    #[test]
    fn writes_tables_and_six_charts() {
        let records = small_run();
        let tmp = tempfile::tempdir().unwrap();
        let files = emit_report(&records, tmp.path()).unwrap();
        assert_eq!(files.len(), 8);
        let results = fs::read_to_string(tmp.path().join("results.csv")).unwrap();
        let mut lines = results.lines();
        assert_eq!(lines.next().unwrap(), RESULTS_HEADER.join(","));
        assert_eq!(lines.count(), records.len());
        for name in [
            "chars_S1-S3.svg",
            "chars_S4-S6.svg",
            "chars_S7-S9.svg",
            "sms_S1-S3.svg",
            "sms_S4-S6.svg",
            "sms_S7-S9.svg",
        ] {
            let svg = fs::read_to_string(tmp.path().join(name)).unwrap();
            assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
            assert!(!svg.contains("href"));
        }
    }

    #[test]
    fn ratio_has_four_decimals() {
        let records = small_run();
        let csv = String::from_utf8(results_csv(&records[..3]).unwrap()).unwrap();
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[5], "1.0000");
        assert_eq!(row[2], "none");
    }

    #[test]
    fn empty_records_write_nothing() {
        let tmp = tempfile::tempdir().unwrap();
        let out = tmp.path().join("report");
        assert!(matches!(emit_report(&[], &out), Err(Error::EmptyRecords)));
        assert!(!out.exists());
    }
}
