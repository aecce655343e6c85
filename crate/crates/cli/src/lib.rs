//! Command-line front end: argument parsing and dispatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::ffi::OsString;

use clap::{Args, Parser, Subcommand};
use voicepack::bench::corpus::write_corpus;
use voicepack::bench::{emit_report, generate_corpus, load_manifest, run_benchmark, CorpusSpec};
use voicepack::sms::{inbox_collect, outbox_write, reassemble, segment, TransportDir};
use voicepack::{compress, decompress, AlgorithmId, CodecConfig, CompressedBlob, Error};

/// Compress voice clips and move them around as concatenated SMS segments.
#[derive(Debug, Parser)]
#[command(name = "voicepack", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a file into a CVT1 blob.
    Compress {
        /// Codec to use.
        #[arg(long, default_value = "ppm")]
        alg: AlgorithmId,
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        io: InOut,
    },
    /// Restore the original file from a CVT1 blob (codec read from the header).
    Decompress {
        #[command(flatten)]
        tuning: Tuning,
        #[command(flatten)]
        io: InOut,
    },
    /// Split a file into SMS segments and drop them in <root>/outbox.
    Send {
        /// File to send, usually a blob made by `compress`.
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        /// Concatenation reference shared by all parts (0-255).
        #[arg(long = "ref", value_name = "N")]
        reference: u8,
        #[command(flatten)]
        transport: Transport,
    },
    /// Collect the segments for one reference from <root>/inbox and rebuild the file.
    Receive {
        /// Concatenation reference to collect (0-255).
        #[arg(long = "ref", value_name = "N")]
        reference: u8,
        /// Where to write the reassembled file.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        #[command(flatten)]
        transport: Transport,
    },
    /// Run every codec over the sentence corpus and write CSV and SVG reports.
    Bench {
        /// Corpus seed (ignored with --manifest).
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Use payload files listed in a sentence_id,trial,path CSV instead of
        /// the synthetic corpus.
        #[arg(long, value_name = "PATH")]
        manifest: Option<PathBuf>,
        /// Report directory.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Write the synthetic corpus payloads and a manifest.csv.
    Corpus {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Tuning {
    /// Largest LZW code width in bits (9-16).
    #[arg(long, value_name = "N")]
    lzw_bits: Option<u32>,
    /// PPM context order (0-8).
    #[arg(long, value_name = "K")]
    ppm_order: Option<usize>,
}

impl Tuning {
    fn config(&self) -> voicepack::Result<CodecConfig> {
        let mut cfg = CodecConfig::default();
        if let Some(bits) = self.lzw_bits {
            cfg = cfg.with_lzw_max_code_bits(bits)?;
        }
        if let Some(order) = self.ppm_order {
            cfg = cfg.with_ppm_order(order)?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct InOut {
    /// Input file.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Transport {
    /// Transport root holding outbox/ and inbox/.
    #[arg(long, env = "VOICEPACK_ROOT", value_name = "DIR")]
    root: PathBuf,
}

fn read(path: &Path) -> voicepack::Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_output(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> voicepack::Result<()> {
    match path {
        Some(path) => fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn run(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> voicepack::Result<()> {
    match command {
        Command::Compress { alg, tuning, io } => {
            let cfg = tuning.config()?;
            let blob = compress(&read(&io.input)?, alg, &cfg);
            write_output(io.out.as_deref(), &blob.to_bytes(), stdout)
        }
        Command::Decompress { tuning, io } => {
            let cfg = tuning.config()?;
            let blob = CompressedBlob::from_bytes(&read(&io.input)?)?;
            write_output(io.out.as_deref(), &decompress(&blob, &cfg)?, stdout)
        }
        Command::Send { input, reference, transport } => {
            let dir = TransportDir::new(transport.root);
            dir.ensure()?;
            let parts = segment(&read(&input)?, reference)?;
            for part in &parts {
                outbox_write(part, &dir)?;
            }
            writeln!(stderr, "queued {} segment(s) with ref {reference}", parts.len())?;
            Ok(())
        }
        Command::Receive { reference, out, transport } => {
            let dir = TransportDir::new(transport.root);
            let parts = inbox_collect(&dir, reference)?;
            fs::write(out, reassemble(&parts)?)?;
            Ok(())
        }
        Command::Bench { seed, manifest, out, tuning } => {
            let cfg = tuning.config()?;
            let corpus = match manifest {
                Some(path) => load_manifest(&path)?,
                None => generate_corpus(&CorpusSpec::with_seed(seed))?,
            };
            let records = run_benchmark(&corpus, &AlgorithmId::CODECS, &cfg)?;
            let files = emit_report(&records, &out)?;
            writeln!(stderr, "wrote {} report file(s) to {}", files.len(), out.display())?;
            Ok(())
        }
        Command::Corpus { seed, out } => {
            let items = generate_corpus(&CorpusSpec::with_seed(seed))?;
            let manifest = write_corpus(&items, &out)?;
            writeln!(stderr, "wrote {} payloads and {}", items.len(), manifest.display())?;
            Ok(())
        }
    }
}

/// Exit status for a failed command: 2 when the data itself is bad, 1 for
/// everything else.
pub fn exit_code(error: &Error) -> u8 {
    if error.is_data_error() {
        2
    } else {
        1
    }
}

/// Parse `args` (program name first) and run the command. Returns the exit
/// status: 0 on success, 1 on usage and other errors, 2 on data errors.
pub fn dispatch<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                1
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match run(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.name());
            exit_code(&e)
        }
    }
}
