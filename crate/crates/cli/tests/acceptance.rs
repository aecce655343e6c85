//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voicepack::bench::{generate_corpus, run_benchmark, summarize, BenchmarkRecord, CorpusSpec, SentenceId};
use voicepack::codecs::ac::ac_encode;
use voicepack::codecs::bwt::{bwt_forward, bwt_inverse, BwtBlock};
use voicepack::codecs::huffman::build_huffman_table;
use voicepack::sms::{reassemble, segment, sms_count, MAX_SEGMENTS, MULTIPART_CAPACITY};
use voicepack::{compress, decompress, AlgorithmId, CodecConfig};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    if ok {
        Ok(detail.into())
    } else {
        Err(detail.into())
    }
}

// ---------------------------------------------------------------- 1

/// Payload of the given length drawn from one of several sources, from
/// incompressible noise to long runs.
fn mixed_payload(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    match rng.gen_range(0..6) {
        0 => {
            let mut v = vec![0u8; len];
            rng.fill_bytes(&mut v);
            v
        }
        1 => {
            let k = rng.gen_range(1..=8u8);
            (0..len).map(|_| b'a' + rng.gen_range(0..k)).collect()
        }
        2 => {
            let mut v = Vec::with_capacity(len);
            while v.len() < len {
                let b: u8 = rng.gen();
                let run = rng.gen_range(1..200);
                v.extend(std::iter::repeat_n(b, run));
            }
            v.truncate(len);
            v
        }
        3 => {
            let words = ["voice ", "over ", "sms ", "frame ", "the ", "quick ", "brown "];
            let mut v = Vec::with_capacity(len);
            while v.len() < len {
                v.extend_from_slice(words.choose(rng).unwrap().as_bytes());
            }
            v.truncate(len);
            v
        }
        4 => {
            let mut frame = vec![0u8; rng.gen_range(1..64)];
            rng.fill_bytes(&mut frame);
            let mut v: Vec<u8> = frame.iter().copied().cycle().take(len).collect();
            for _ in 0..len / 50 {
                let at = rng.gen_range(0..len);
                v[at] = rng.gen();
            }
            v
        }
        _ => {
            // Skewed: geometric-ish over the whole octet range.
            (0..len)
                .map(|_| (rng.gen::<f64>().ln() * -24.0).min(255.0) as u8)
                .collect()
        }
    }
}

fn round_trip_suite() -> Outcome {
    let cfg = CodecConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let payloads: Vec<Vec<u8>> = (0..1000)
        .map(|i| {
            let len = match i {
                0 => 0,
                1 => 10_000,
                _ => rng.gen_range(0..=10_000),
            };
            mixed_payload(&mut rng, len)
        })
        .collect();
    let start = Instant::now();
    let failures: Vec<String> = std::thread::scope(|scope| {
        let handles: Vec<_> = AlgorithmId::ALL
            .iter()
            .map(|&alg| {
                let (cfg, payloads) = (&cfg, &payloads);
                scope.spawn(move || {
                    payloads
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| decompress(&compress(p, alg, cfg), cfg).ok().as_ref() != Some(*p))
                        .map(|(i, p)| format!("{alg} payload #{i} ({} octets)", p.len()))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    let elapsed = start.elapsed();
    if !failures.is_empty() {
        return Err(format!("{} failures, first: {}", failures.len(), failures[0]));
    }
    check(
        elapsed < Duration::from_secs(60),
        format!("7000 round trips exact in {:.1} s", elapsed.as_secs_f64()),
    )
}

// ---------------------------------------------------------------- 2-4

struct Means {
    chars: BTreeMap<(SentenceId, AlgorithmId), f64>,
    sms: BTreeMap<(SentenceId, AlgorithmId), f64>,
    ratio: BTreeMap<(SentenceId, AlgorithmId), f64>,
}

fn means(records: &[BenchmarkRecord]) -> Means {
    let mut m = Means {
        chars: BTreeMap::new(),
        sms: BTreeMap::new(),
        ratio: BTreeMap::new(),
    };
    for row in summarize(records) {
        let key = (row.sentence_id, row.algorithm);
        m.chars.insert(key, row.mean_compressed_chars);
        m.sms.insert(key, row.mean_sms_count);
        m.ratio.insert(key, row.mean_ratio);
    }
    m
}

fn ppm_wins(m: &Means) -> Outcome {
    let others: Vec<AlgorithmId> = AlgorithmId::CODECS
        .into_iter()
        .filter(|&a| a != AlgorithmId::Ppm)
        .collect();
    let mut strict_wins = 0;
    let mut sms_losses = Vec::new();
    let mut lines = Vec::new();
    for s in SentenceId::all() {
        let ppm_chars = m.chars[&(s, AlgorithmId::Ppm)];
        let ppm_sms = m.sms[&(s, AlgorithmId::Ppm)];
        let (best_other, best_chars) = others
            .iter()
            .map(|&a| (a, m.chars[&(s, a)]))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if ppm_chars < best_chars {
            strict_wins += 1;
        }
        for &a in &others {
            if ppm_sms > m.sms[&(s, a)] {
                sms_losses.push(format!("{s}: ppm {ppm_sms:.1} > {a} {:.1} sms", m.sms[&(s, a)]));
            }
        }
        lines.push(format!("{s} ppm {ppm_chars:.1} vs {best_other} {best_chars:.1}"));
    }
    let detail = format!(
        "ppm strictly smallest on {strict_wins}/9 [{}]; sms losses: {}",
        lines.join(", "),
        if sms_losses.is_empty() { "none".to_string() } else { sms_losses.join(", ") }
    );
    check(strict_wins >= 7 && sms_losses.is_empty(), detail)
}

fn baseline_dominance(records: &[BenchmarkRecord]) -> Outcome {
    let repetitive = [2, 3, 5, 6, 8, 9];
    let baseline: BTreeMap<(SentenceId, u32), usize> = records
        .iter()
        .filter(|r| r.algorithm == AlgorithmId::None)
        .map(|r| ((r.sentence_id, r.trial), r.sms_count))
        .collect();
    let mut checked = 0;
    let violations: Vec<String> = records
        .iter()
        .filter(|r| r.algorithm != AlgorithmId::None && repetitive.contains(&r.sentence_id.number()))
        .inspect(|_| checked += 1)
        .filter(|r| r.sms_count > baseline[&(r.sentence_id, r.trial)])
        .map(|r| format!("{} t{} {}", r.sentence_id, r.trial, r.algorithm))
        .collect();
    check(
        violations.is_empty(),
        format!("{checked} records checked, violations: {violations:?}"),
    )
}

fn repetition_monotonicity(m: &Means) -> Outcome {
    let mut violations = Vec::new();
    for alg in AlgorithmId::CODECS {
        let strict = !matches!(alg, AlgorithmId::Huffman | AlgorithmId::Ac);
        for family in [[1, 2, 3], [4, 5, 6], [7, 8, 9]] {
            let ratios: Vec<f64> = family
                .iter()
                .map(|&n| m.ratio[&(SentenceId::new(n).unwrap(), alg)])
                .collect();
            for w in ratios.windows(2) {
                let ok = if strict { w[1] > w[0] } else { w[1] >= w[0] };
                if !ok {
                    violations.push(format!("{alg} S{}..S{}: {ratios:.3?}", family[0], family[2]));
                    break;
                }
            }
        }
    }
    check(violations.is_empty(), format!("18 families checked, violations: {violations:?}"))
}

// ---------------------------------------------------------------- 5

/// Minimum total cost over every possible sequence of pairwise merges; the
/// cost of a merge is the combined weight, which sums to the weighted path
/// length of the resulting tree.
fn brute_min_cost(weights: &[u64]) -> u64 {
    if weights.len() <= 1 {
        return 0;
    }
    let mut best = u64::MAX;
    for i in 0..weights.len() {
        for j in i + 1..weights.len() {
            let mut rest: Vec<u64> = weights
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .map(|(_, &w)| w)
                .collect();
            let merged = weights[i] + weights[j];
            rest.push(merged);
            best = best.min(merged + brute_min_cost(&rest));
        }
    }
    best
}

fn huffman_optimality() -> Outcome {
    let mut tables = 0;
    let mut mismatches = Vec::new();
    for n in 1..=5u32 {
        for idx in 0..6u32.pow(n) {
            let counts: Vec<u64> = (0..n).map(|k| u64::from(idx / 6u32.pow(k) % 6 + 1)).collect();
            // Spread the symbols over the octet range.
            let freqs: BTreeMap<u8, u64> = counts
                .iter()
                .enumerate()
                .map(|(k, &c)| ((k * 61 % 256) as u8, c))
                .collect();
            let table = build_huffman_table(&freqs).map_err(|e| e.to_string())?;
            let weighted: u64 = freqs.iter().map(|(&s, &c)| c * u64::from(table.len(s))).sum();
            // A lone symbol still needs a one-bit code word.
            let oracle = if n == 1 { counts[0] } else { brute_min_cost(&counts) };
            if weighted != oracle {
                mismatches.push(format!("{counts:?}: {weighted} vs {oracle}"));
            }
            tables += 1;
        }
    }
    check(
        mismatches.is_empty(),
        format!("{tables} tables, mismatches: {}", mismatches.len()),
    )
}

// ---------------------------------------------------------------- 6

fn rotation_oracle(s: &[u8]) -> (Vec<u8>, u32) {
    let n = s.len();
    if n == 0 {
        return (Vec::new(), 0);
    }
    let rot = |i: usize| -> Vec<u8> { s[i..].iter().chain(&s[..i]).copied().collect() };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (rot(i), i));
    let last = order.iter().map(|&i| s[(i + n - 1) % n]).collect();
    let primary = order.iter().position(|&i| i == 0).unwrap() as u32;
    (last, primary)
}

fn bwt_oracle() -> Outcome {
    let banana = bwt_forward(b"banana");
    if (banana.data.as_slice(), banana.primary_index) != (&b"nnbaaa"[..], 3) {
        return Err(format!("banana gave {:?}", banana));
    }
    let mut checked = 0;
    for len in 0..=8u32 {
        for idx in 0..3u32.pow(len) {
            let s: Vec<u8> = (0..len).map(|k| b'a' + (idx / 3u32.pow(k) % 3) as u8).collect();
            let (last, primary) = rotation_oracle(&s);
            let got = bwt_forward(&s);
            if got.data != last || got.primary_index != primary {
                return Err(format!("forward {:?}: {:?} vs ({:?}, {primary})", s, got, last));
            }
            let back = bwt_inverse(&BwtBlock { data: last, primary_index: primary })
                .map_err(|e| format!("inverse {s:?}: {e}"))?;
            if back != s {
                return Err(format!("inverse {s:?} gave {back:?}"));
            }
            checked += 1;
        }
    }
    check(true, format!("{checked} strings + banana fixture"))
}

// ---------------------------------------------------------------- 7

fn ac_efficiency() -> Outcome {
    let h0 = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
    let bound = 1000.0 * h0 + 0.1 * 1000.0 + 64.0;
    let mut worst = 0usize;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input: Vec<u8> = (0..1000).map(|_| if rng.gen_bool(0.9) { b'a' } else { b'b' }).collect();
        let bits = ac_encode(&input).len() * 8;
        worst = worst.max(bits);
        if bits as f64 > bound {
            return Err(format!("seed {seed}: {bits} bits > {bound:.1}"));
        }
    }
    check(true, format!("worst {worst} bits <= {bound:.1} over 20 seeds"))
}

// ---------------------------------------------------------------- 8

fn segmentation() -> Outcome {
    for (len, want) in [(0, 1), (1, 1), (140, 1), (141, 2), (268, 2), (269, 3), (1340, 10), (34170, 255)] {
        if sms_count(len) != want {
            return Err(format!("sms_count({len}) = {}, want {want}", sms_count(len)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..200 {
        let len = rng.gen_range(0..=MAX_SEGMENTS * MULTIPART_CAPACITY);
        let mut payload = vec![0u8; len];
        rng.fill_bytes(&mut payload);
        let mut parts = segment(&payload, rng.gen()).map_err(|e| e.to_string())?;
        if parts.len() != sms_count(len) {
            return Err(format!("payload {i}: {} parts for {len} octets", parts.len()));
        }
        parts.shuffle(&mut rng);
        if reassemble(&parts).map_err(|e| e.to_string())? != payload {
            return Err(format!("payload {i} ({len} octets) changed"));
        }
    }
    check(true, "8 fixtures exact; 200 shuffled payloads reassembled")
}

// ---------------------------------------------------------------- 9-10

fn voicepack(args: &[&str], dir: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_voicepack"))
        .args(args)
        .current_dir(dir)
        .env_remove("VOICEPACK_ROOT")
        .output()
        .map_err(|e| e.to_string())?;
    match out.status.code() {
        Some(0) => Ok(()),
        code => Err(format!(
            "`{}` exited {code:?}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        )),
    }
}

fn cli_loopback() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    // A voice-like 50 KB clip: synthetic corpus payloads back to back.
    let clip: Vec<u8> = generate_corpus(&CorpusSpec::default())
        .map_err(|e| e.to_string())?
        .iter()
        .flat_map(|item| item.payload.bytes.clone())
        .take(50_000)
        .collect();
    fs::write(dir.join("clip.amr"), &clip).map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    for (i, alg) in AlgorithmId::ALL.iter().enumerate() {
        let run = || -> Result<(), String> {
            let root = format!("root_{alg}");
            let reference = (i + 1).to_string();
            let blob = format!("{alg}.cvt");
            let got_blob = format!("{alg}.got.cvt");
            let got = format!("{alg}.out");
            voicepack(&["compress", "--alg", alg.name(), "--in", "clip.amr", "--out", &blob], dir)?;
            voicepack(&["send", "--in", &blob, "--ref", &reference, "--root", &root], dir)?;
            let outbox = dir.join(&root).join("outbox");
            let inbox = dir.join(&root).join("inbox");
            fs::create_dir_all(&inbox).map_err(|e| e.to_string())?;
            for entry in fs::read_dir(&outbox).map_err(|e| e.to_string())? {
                let path = entry.map_err(|e| e.to_string())?.path();
                fs::rename(&path, inbox.join(path.file_name().unwrap())).map_err(|e| e.to_string())?;
            }
            voicepack(&["receive", "--ref", &reference, "--root", &root, "--out", &got_blob], dir)?;
            voicepack(&["decompress", "--in", &got_blob, "--out", &got], dir)?;
            let back = fs::read(dir.join(&got)).map_err(|e| e.to_string())?;
            if back != clip {
                return Err(format!("{alg}: output differs from input"));
            }
            Ok(())
        };
        if let Err(e) = run() {
            failures.push(e);
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "50000-octet clip restored exactly under all 7 algorithms".to_string()
        } else {
            format!("{} of 7 failed: {}", failures.len(), failures.join("; "))
        },
    )
}

/// results.csv without its last (timing) column.
fn without_timing(csv: &str) -> String {
    csv.lines()
        .map(|line| line.rsplit_once(',').map_or(line, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    voicepack(&["bench", "--seed", "42", "--out", "run_a"], dir)?;
    voicepack(&["bench", "--seed", "42", "--out", "run_b"], dir)?;
    let read = |run: &str| fs::read_to_string(dir.join(run).join("results.csv")).map_err(|e| e.to_string());
    let (a, b) = (without_timing(&read("run_a")?), without_timing(&read("run_b")?));
    check(
        a == b && a.lines().count() == 1 + 90 * 7,
        format!("{} rows identical apart from encode_micros", a.lines().count() - 1),
    )
}

fn main() {
    let corpus = generate_corpus(&CorpusSpec::default()).expect("corpus");
    let records = run_benchmark(&corpus, &AlgorithmId::CODECS, &CodecConfig::default()).expect("bench");
    let m = means(&records);

    let criteria: Vec<Criterion> = vec![
        ("round-trip suite", Box::new(round_trip_suite)),
        ("ppm wins", Box::new(|| ppm_wins(&m))),
        ("baseline dominance", Box::new(|| baseline_dominance(&records))),
        ("repetition monotonicity", Box::new(|| repetition_monotonicity(&m))),
        ("huffman optimality", Box::new(huffman_optimality)),
        ("bwt oracle", Box::new(bwt_oracle)),
        ("arithmetic coder efficiency", Box::new(ac_efficiency)),
        ("segmentation", Box::new(segmentation)),
        ("cli loopback", Box::new(cli_loopback)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
