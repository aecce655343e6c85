//! The nine-sentence test corpus and its synthetic voice payloads.
//!
//! Real AMR recordings are replaced by a deterministic stand-in: every word
//! maps to one 32-octet frame pattern (an AMR 12.2 kbit/s frame is 32 octets
//! including its header octet), held for `frames_per_word` frames. Each frame
//! gets a few perturbed octets drawn from a per-trial stream, so repeated
//! clauses are close to, but never exactly, copies of each other.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pipeline::VoicePayload;

/// Frame-type octet of a 12.2 kbit/s AMR frame.
const AMR_122_HEADER: u8 = 0x3C;
pub const TRIALS_PER_SENTENCE: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SentenceId(u8);

impl SentenceId {
    pub fn new(n: u8) -> Result<Self> {
        if (1..=9).contains(&n) {
            Ok(SentenceId(n))
        } else {
            Err(Error::Manifest(format!("sentence id S{n} outside S1..S9")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = SentenceId> {
        (1..=9).map(SentenceId)
    }

    pub fn info(self) -> &'static SentenceInfo {
        &SENTENCES[self.0 as usize - 1]
    }
}

impl fmt::Display for SentenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

impl FromStr for SentenceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .trim()
            .strip_prefix(['S', 's'])
            .and_then(|d| d.parse::<u8>().ok())
            .ok_or_else(|| Error::Manifest(format!("bad sentence id '{s}'")))?;
        SentenceId::new(n)
    }
}

/// Sentence metadata as tabulated for the test set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentenceInfo {
    pub clause: &'static str,
    pub repetitions_within: u8,
    /// Word and letter counts exactly as published. S3 lists 32 words although
    /// three copies of S1 hold 24; the figure is kept verbatim.
    pub word_count: u32,
    pub letter_count: u32,
}

impl SentenceInfo {
    pub fn text(&self) -> String {
        vec![self.clause; self.repetitions_within as usize].join(" , ")
    }

    /// Words actually spoken, punctuation removed.
    pub fn spoken_words(&self) -> Vec<&'static str> {
        let words: Vec<&str> = self.clause.split_whitespace().collect();
        (0..self.repetitions_within)
            .flat_map(|_| words.iter().copied())
            .collect()
    }
}

const QUICK: &str = "Quick brown fox jumps over the lazy dog";
const CLIP: &str = "This is a audio clip";
const HELLO: &str = "Hello world";

pub const SENTENCES: [SentenceInfo; 9] = [
    SentenceInfo { clause: QUICK, repetitions_within: 1, word_count: 8, letter_count: 32 },
    SentenceInfo { clause: QUICK, repetitions_within: 2, word_count: 16, letter_count: 64 },
    SentenceInfo { clause: QUICK, repetitions_within: 3, word_count: 32, letter_count: 96 },
    SentenceInfo { clause: CLIP, repetitions_within: 1, word_count: 5, letter_count: 16 },
    SentenceInfo { clause: CLIP, repetitions_within: 2, word_count: 10, letter_count: 32 },
    SentenceInfo { clause: CLIP, repetitions_within: 3, word_count: 15, letter_count: 48 },
    SentenceInfo { clause: HELLO, repetitions_within: 1, word_count: 2, letter_count: 10 },
    SentenceInfo { clause: HELLO, repetitions_within: 2, word_count: 4, letter_count: 20 },
    SentenceInfo { clause: HELLO, repetitions_within: 3, word_count: 6, letter_count: 30 },
];

/// Parameters of the synthetic payload generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSpec {
    pub seed: u64,
    pub bytes_per_frame: usize,
    pub frames_per_word: usize,
    pub noise_octets_per_frame: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 42,
            bytes_per_frame: 32,
            frames_per_word: 15,
            noise_octets_per_frame: 2,
        }
    }
}

impl CorpusSpec {
    pub fn with_seed(seed: u64) -> Self {
        CorpusSpec {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.bytes_per_frame < 2 || self.frames_per_word == 0 || self.noise_octets_per_frame == 0
        {
            return Err(Error::InvalidConfig(format!(
                "corpus parameters must be positive (frame of at least 2 octets): {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusItem {
    pub sentence_id: SentenceId,
    pub text: String,
    pub repetitions_within: u8,
    pub trial: u32,
    pub payload: VoicePayload,
    pub word_count: u32,
    pub letter_count: u32,
}

impl CorpusItem {
    fn new(sentence_id: SentenceId, trial: u32, payload: VoicePayload) -> Self {
        let info = sentence_id.info();
        CorpusItem {
            sentence_id,
            text: info.text(),
            repetitions_within: info.repetitions_within,
            trial,
            payload,
            word_count: info.word_count,
            letter_count: info.letter_count,
        }
    }
}

/// 64-bit FNV-1a, used to derive a stable per-word seed.
fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Octet with a bell-shaped distribution around 126: the sum of four
/// uniform nibbles, offset by 96.
fn speech_octet(rng: &mut impl Rng) -> u8 {
    96 + (0..4).map(|_| rng.gen_range(0u8..16)).sum::<u8>()
}

/// Deterministic frame pattern for `word`, independent of seed and trial.
pub fn word_frame(word: &str, bytes_per_frame: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(word));
    let mut frame = Vec::with_capacity(bytes_per_frame);
    frame.push(AMR_122_HEADER);
    frame.extend((1..bytes_per_frame).map(|_| speech_octet(&mut rng)));
    frame
}

/// Synthetic payload for one (sentence, trial) under `spec`.
pub fn synthesize(sentence: SentenceId, trial: u32, spec: &CorpusSpec) -> Vec<u8> {
    let info = sentence.info();
    let stream = splitmix(spec.seed ^ splitmix(u64::from(trial)));
    let mut noise = ChaCha8Rng::seed_from_u64(stream);
    let mut out = Vec::new();
    for word in info.spoken_words() {
        let pattern = word_frame(word, spec.bytes_per_frame);
        for _ in 0..spec.frames_per_word {
            let mut frame = pattern.clone();
            for _ in 0..spec.noise_octets_per_frame {
                let at = noise.gen_range(1..frame.len());
                frame[at] = speech_octet(&mut noise);
            }
            out.extend(frame);
        }
    }
    out
}

/// All 90 items: nine sentences, ten trials each.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<CorpusItem>> {
    spec.validate()?;
    let mut items = Vec::with_capacity(9 * TRIALS_PER_SENTENCE as usize);
    for sentence in SentenceId::all() {
        for trial in 1..=TRIALS_PER_SENTENCE {
            let bytes = synthesize(sentence, trial, spec);
            let label = format!("{sentence} trial {trial} (synthetic, seed {})", spec.seed);
            items.push(CorpusItem::new(sentence, trial, VoicePayload::new(bytes, label)));
        }
    }
    Ok(items)
}

/// Load real payload files listed in a `sentence_id,trial,path` manifest.
/// Relative paths are resolved against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<CorpusItem>> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Manifest(e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Manifest(e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["sentence_id", "trial", "path"] {
        return Err(Error::Manifest(format!(
            "expected header sentence_id,trial,path, found {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut items = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Manifest(e.to_string()))?;
        let sentence: SentenceId = record[0].parse()?;
        let trial: u32 = record[1]
            .parse()
            .map_err(|_| Error::Manifest(format!("row {}: bad trial '{}'", line + 2, &record[1])))?;
        let mut file = PathBuf::from(&record[2]);
        if file.is_relative() {
            file = base.join(file);
        }
        let bytes = std::fs::read(&file)?;
        let payload = VoicePayload::new(bytes, file.display().to_string());
        items.push(CorpusItem::new(sentence, trial, payload));
    }
    if items.is_empty() {
        return Err(Error::Manifest("manifest lists no payloads".into()));
    }
    Ok(items)
}

/// Write the synthetic corpus as payload files plus a manifest that
/// [`load_manifest`] can read back.
pub fn write_corpus(items: &[CorpusItem], dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let manifest = dir.join("manifest.csv");
    let mut w = csv::Writer::from_path(&manifest).map_err(|e| Error::Manifest(e.to_string()))?;
    w.write_record(["sentence_id", "trial", "path"])
        .map_err(|e| Error::Manifest(e.to_string()))?;
    for item in items {
        let name = format!("{}_t{:02}.bin", item.sentence_id, item.trial);
        std::fs::write(dir.join(&name), &item.payload.bytes)?;
        w.write_record([item.sentence_id.to_string(), item.trial.to_string(), name])
            .map_err(|e| Error::Manifest(e.to_string()))?;
    }
    w.flush()?;
    Ok(manifest)
}
