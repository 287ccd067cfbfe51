//! Command-line front end: input ingestion, output files, verify mode and
//! the synthetic read generator.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{self, EngineConfig, Footprint, RunSummary};
use crate::error::{Error, Result};
use crate::model::{Alphabet, CollectionBuilder, SequenceCollection};
use crate::oracle;
use crate::segio::{segment_path, LcpWidth, Stream, DEFAULT_BUFFER_BYTES};

pub const DEFAULT_VERIFY_CAP: usize = 1_000_000;

/// Bytes per integer in the `.gsa` output.
pub const GSA_WIDTH: usize = 4;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum InputFormat {
    Fasta,
    Fastq,
    /// One string per line.
    Lines,
    /// Chosen from the file extension.
    #[default]
    Auto,
}

impl InputFormat {
    /// Resolves `Auto` for `path`.
    pub fn resolve(self, path: &Path) -> Result<InputFormat> {
        if self != InputFormat::Auto {
            return Ok(self);
        }
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "fa" | "fasta" | "fna" => Ok(InputFormat::Fasta),
            "fq" | "fastq" => Ok(InputFormat::Fastq),
            "txt" => Ok(InputFormat::Lines),
            _ => Err(Error::InvalidConfig(format!(
                "cannot infer input format of {}; pass --format",
                path.display()
            ))),
        }
    }
}

/// Parameters of a synthetic collection: `seed,m,len,sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSpec {
    pub seed: u64,
    pub m: usize,
    pub len: usize,
    pub sigma: usize,
}

impl FromStr for SynthSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::InvalidConfig(format!("--synth expects seed,m,len,sigma, got {s:?}"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let seed = parts[0].parse().map_err(|_| bad())?;
        let field = |i: usize| parts[i].parse::<usize>().map_err(|_| bad());
        let spec = SynthSpec {
            seed,
            m: field(1)?,
            len: field(2)?,
            sigma: field(3)?,
        };
        if spec.m == 0 || spec.len == 0 {
            return Err(Error::InvalidConfig("synthetic m and len must be at least 1".into()));
        }
        spec.alphabet()?;
        Ok(spec)
    }
}

impl SynthSpec {
    /// `ACGT` prefixes for sigma up to 4, `ACGNT` for 5, letters beyond.
    pub fn alphabet(&self) -> Result<Alphabet> {
        match self.sigma {
            1..=4 => Alphabet::new(&b"ACGT"[..self.sigma]),
            5 => Ok(Alphabet::dna()),
            6..=26 => Alphabet::new(&b"ABCDEFGHIJKLMNOPQRSTUVWXYZ"[..self.sigma]),
            s => Err(Error::InvalidConfig(format!("synthetic sigma {s} outside 1..=26"))),
        }
    }
}

/// Writes the synthetic collection as a line file. Same spec, same bytes.
pub fn synth(spec: &SynthSpec, path: &Path) -> Result<()> {
    let alphabet = spec.alphabet()?;
    let symbols = alphabet.symbols();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::with_capacity(DEFAULT_BUFFER_BYTES, file);
    let mut line = vec![b'\n'; spec.len + 1];
    for _ in 0..spec.m {
        for b in &mut line[..spec.len] {
            *b = symbols[rng.gen_range(0..symbols.len())];
        }
        out.write_all(&line).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads every input in order into one collection.
pub fn ingest(paths: &[PathBuf], format: InputFormat, alphabet: &Alphabet) -> Result<SequenceCollection> {
    let mut builder = CollectionBuilder::new(alphabet.clone());
    let mut buf = Vec::new();
    for path in paths {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        match format.resolve(path)? {
            InputFormat::Fasta => ingest_fasta(file, path, &mut builder, &mut buf)?,
            InputFormat::Fastq => ingest_fastq(file, path, &mut builder, &mut buf)?,
            _ => ingest_lines(file, path, &mut builder, &mut buf)?,
        }
    }
    builder.finish()
}

fn push_upper(builder: &mut CollectionBuilder, buf: &mut Vec<u8>, seq: &[u8]) -> Result<()> {
    buf.clear();
    buf.extend(seq.iter().map(u8::to_ascii_uppercase));
    builder.push(buf)
}

fn ingest_fasta<R: Read>(
    input: R,
    path: &Path,
    builder: &mut CollectionBuilder,
    buf: &mut Vec<u8>,
) -> Result<()> {
    use seq_io::fasta::{Error as FastaError, Reader};
    let mut reader = Reader::with_capacity(input, DEFAULT_BUFFER_BYTES);
    while let Some(rec) = reader.next() {
        let rec = rec.map_err(|e| match e {
            FastaError::Io(e) => Error::io(path, e),
            FastaError::InvalidStart { line, .. } => Error::Parse {
                path: path.to_path_buf(),
                line,
                message: "expected '>' at start of record".into(),
            },
            other => Error::Parse {
                path: path.to_path_buf(),
                line: 0,
                message: other.to_string(),
            },
        })?;
        push_upper(builder, buf, &rec.full_seq())?;
    }
    Ok(())
}

fn ingest_fastq<R: Read>(
    input: R,
    path: &Path,
    builder: &mut CollectionBuilder,
    buf: &mut Vec<u8>,
) -> Result<()> {
    use seq_io::fastq::{Error as FastqError, Reader, Record};
    let mut reader = Reader::with_capacity(input, DEFAULT_BUFFER_BYTES);
    while let Some(rec) = reader.next() {
        let rec = rec.map_err(|e| {
            let line = match &e {
                FastqError::UnequalLengths { pos, .. }
                | FastqError::InvalidStart { pos, .. }
                | FastqError::InvalidSep { pos, .. }
                | FastqError::UnexpectedEnd { pos } => pos.line as usize,
                FastqError::Io(_) | FastqError::BufferLimit => 0,
            };
            match e {
                FastqError::Io(e) => Error::io(path, e),
                other => Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: other.to_string(),
                },
            }
        })?;
        push_upper(builder, buf, rec.seq())?;
    }
    Ok(())
}

fn ingest_lines<R: Read>(
    input: R,
    path: &Path,
    builder: &mut CollectionBuilder,
    buf: &mut Vec<u8>,
) -> Result<()> {
    let mut reader = BufReader::with_capacity(DEFAULT_BUFFER_BYTES, input);
    let mut line = Vec::new();
    let mut line_no = 0;
    let mut blank_at = None;
    loop {
        line.clear();
        if reader.read_until(b'\n', &mut line).map_err(|e| Error::io(path, e))? == 0 {
            return Ok(());
        }
        line_no += 1;
        let text = line.strip_suffix(b"\n").unwrap_or(&line);
        let text = text.strip_suffix(b"\r").unwrap_or(text);
        if text.is_empty() {
            blank_at.get_or_insert(line_no);
            continue;
        }
        let parse_error = |line: usize, message: &str| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: message.to_owned(),
        };
        if let Some(blank) = blank_at {
            return Err(parse_error(blank, "empty line"));
        }
        if text.iter().any(u8::is_ascii_whitespace) {
            return Err(parse_error(line_no, "whitespace inside a sequence"));
        }
        push_upper(builder, buf, text)?;
    }
}

/// Text manifest written next to the outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub sigma: usize,
    pub alphabet: String,
    pub lcp_width: usize,
    pub gsa_width: Option<usize>,
    pub iterations: usize,
    pub elapsed_seconds: f64,
    /// Engine time per input base, markers excluded.
    pub us_per_base: f64,
    pub peak_footprint: Footprint,
    pub inputs: Vec<String>,
}

pub fn output_path(prefix: &Path, ext: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

/// Writes `<prefix>.bwt`, `.lcp`, optional `.gsa` and `.json` from the
/// final generation of `summary`.
pub fn emit_outputs(
    summary: &RunSummary,
    alphabet: &Alphabet,
    prefix: &Path,
    inputs: &[String],
) -> Result<Manifest> {
    let meta = &summary.meta;

    let bwt_path = output_path(prefix, "bwt");
    let mut bwt = BufWriter::with_capacity(
        DEFAULT_BUFFER_BYTES,
        File::create(&bwt_path).map_err(|e| Error::io(&bwt_path, e))?,
    );
    let mut table = [b'?'; 256];
    for code in 0..=alphabet.sigma() {
        table[code] = alphabet.decode(crate::model::SymbolCode(code as u8)).unwrap_or(b'?');
    }
    let mut chunk = Vec::with_capacity(DEFAULT_BUFFER_BYTES);
    for h in 0..=meta.sigma {
        let src = segment_path(summary.dir(), meta.iteration, Stream::Symbols, h);
        let mut input = File::open(&src).map_err(|e| Error::io(&src, e))?;
        loop {
            chunk.resize(DEFAULT_BUFFER_BYTES, 0);
            let n = input.read(&mut chunk).map_err(|e| Error::io(&src, e))?;
            if n == 0 {
                break;
            }
            chunk.truncate(n);
            chunk.iter_mut().for_each(|b| *b = table[*b as usize]);
            bwt.write_all(&chunk).map_err(|e| Error::io(&bwt_path, e))?;
        }
    }
    bwt.flush().map_err(|e| Error::io(&bwt_path, e))?;

    concat_stream(summary, Stream::Lcp, &output_path(prefix, "lcp"))?;
    if meta.gsa {
        concat_stream(summary, Stream::Gsa, &output_path(prefix, "gsa"))?;
    }

    let n = summary.total_len;
    let bases = (n - summary.m).max(1);
    let elapsed = summary.elapsed.as_secs_f64();
    let manifest = Manifest {
        m: summary.m,
        n,
        k: summary.max_len,
        sigma: alphabet.sigma(),
        alphabet: String::from_utf8_lossy(alphabet.symbols()).into_owned(),
        lcp_width: meta.lcp_width.bytes(),
        gsa_width: meta.gsa.then_some(GSA_WIDTH),
        iterations: summary.max_len + 1,
        elapsed_seconds: elapsed,
        us_per_base: elapsed * 1e6 / bases as f64,
        peak_footprint: summary.peak_footprint,
        inputs: inputs.to_vec(),
    };
    let json_path = output_path(prefix, "json");
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::InconsistentState(format!("manifest serialization: {e}")))?;
    text.push('\n');
    std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok(manifest)
}

fn concat_stream(summary: &RunSummary, stream: Stream, dest: &Path) -> Result<()> {
    let mut out = BufWriter::with_capacity(
        DEFAULT_BUFFER_BYTES,
        File::create(dest).map_err(|e| Error::io(dest, e))?,
    );
    for h in 0..=summary.meta.sigma {
        let src = segment_path(summary.dir(), summary.meta.iteration, stream, h);
        let mut input = File::open(&src).map_err(|e| Error::io(&src, e))?;
        io::copy(&mut input, &mut out).map_err(|e| Error::io(dest, e))?;
    }
    out.flush().map_err(|e| Error::io(dest, e))
}

/// Comparison of one output file against the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileCheck {
    pub path: PathBuf,
    /// Index of the first differing element, if any.
    pub divergence: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub files: Vec<FileCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.files.iter().all(|f| f.divergence.is_none())
    }
}

/// Recomputes the outputs with the oracle and byte-compares them with the
/// files under `prefix`. The `.gsa` file is checked when present.
pub fn verify_outputs(c: &SequenceCollection, prefix: &Path, lcp_width: LcpWidth) -> Result<VerifyReport> {
    let expected = oracle::build(c);
    let alphabet = c.alphabet();

    let bwt: Vec<u8> = expected.bwt.iter().map(|&s| alphabet.decode(s).unwrap_or(b'?')).collect();
    let mut lcp = Vec::with_capacity(expected.lcp.len() * lcp_width.bytes());
    for &v in &expected.lcp {
        lcp.extend_from_slice(&v.to_le_bytes()[..lcp_width.bytes()]);
    }
    let mut files = vec![
        check_file(&output_path(prefix, "bwt"), &bwt, 1)?,
        check_file(&output_path(prefix, "lcp"), &lcp, lcp_width.bytes())?,
    ];
    let gsa_path = output_path(prefix, "gsa");
    if gsa_path.exists() {
        let mut gsa = Vec::with_capacity(expected.gsa.len() * 2 * GSA_WIDTH);
        for e in &expected.gsa {
            gsa.extend_from_slice(&e.pos.to_le_bytes());
            gsa.extend_from_slice(&e.seq.to_le_bytes());
        }
        files.push(check_file(&gsa_path, &gsa, 2 * GSA_WIDTH)?);
    }
    Ok(VerifyReport { files })
}

fn check_file(path: &Path, expected: &[u8], width: usize) -> Result<FileCheck> {
    let actual = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let first = actual.iter().zip(expected).position(|(a, b)| a != b);
    let divergence = match first {
        Some(i) => Some(i / width),
        None if actual.len() != expected.len() => Some(actual.len().min(expected.len()) / width),
        None => None,
    };
    Ok(FileCheck {
        path: path.to_path_buf(),
        divergence,
    })
}

/// Everything one invocation needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub format: InputFormat,
    pub output_prefix: PathBuf,
    pub tmp_dir: PathBuf,
    /// `None` means the DNA alphabet, or the synthetic alphabet with `synth`.
    pub alphabet: Option<String>,
    pub lcp_width: LcpWidth,
    pub emit_gsa: bool,
    pub verify: bool,
    pub verify_cap: usize,
    pub synth: Option<SynthSpec>,
    pub parallel: bool,
    pub buffer_bytes: usize,
}

impl RunConfig {
    pub fn new(output_prefix: impl Into<PathBuf>) -> Self {
        RunConfig {
            inputs: Vec::new(),
            format: InputFormat::Auto,
            output_prefix: output_prefix.into(),
            tmp_dir: std::env::temp_dir(),
            alphabet: None,
            lcp_width: LcpWidth::default(),
            emit_gsa: false,
            verify: false,
            verify_cap: DEFAULT_VERIFY_CAP,
            synth: None,
            parallel: false,
            buffer_bytes: DEFAULT_BUFFER_BYTES,
        }
    }

    fn resolve_alphabet(&self) -> Result<Alphabet> {
        match (&self.alphabet, &self.synth) {
            (Some(spec), _) => Alphabet::parse(spec),
            (None, Some(s)) => s.alphabet(),
            (None, None) => Ok(Alphabet::dna()),
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub manifest: Manifest,
    pub verify: Option<VerifyReport>,
}

/// Generates (if asked), ingests, builds, writes outputs and verifies.
pub fn execute(config: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let alphabet = config.resolve_alphabet()?;
    let mut inputs = config.inputs.clone();
    if let Some(spec) = &config.synth {
        let path = output_path(&config.output_prefix, "synth.txt");
        synth(spec, &path)?;
        inputs.push(path);
    }
    if inputs.is_empty() {
        return Err(Error::InvalidConfig("no input: pass --input or --synth".into()));
    }
    let format = if config.synth.is_some() && config.inputs.is_empty() {
        InputFormat::Lines
    } else {
        config.format
    };
    for path in &inputs {
        format.resolve(path)?;
    }
    let c = ingest(&inputs, format, &alphabet)?;
    if config.verify && c.total_len() > config.verify_cap {
        return Err(Error::CapExceeded {
            n: c.total_len(),
            cap: config.verify_cap,
        });
    }

    let engine_config = EngineConfig {
        tmp_dir: config.tmp_dir.clone(),
        lcp_width: config.lcp_width,
        emit_gsa: config.emit_gsa,
        buffer_bytes: config.buffer_bytes,
        parallel: config.parallel,
        probe: None,
    };
    let summary = engine::run(&c, &engine_config, &mut ())?;
    let names: Vec<String> = inputs.iter().map(|p| p.display().to_string()).collect();
    let mut manifest = emit_outputs(&summary, &alphabet, &config.output_prefix, &names)?;
    drop(summary);
    manifest.elapsed_seconds = start.elapsed().as_secs_f64();

    let verify = if config.verify {
        Some(verify_outputs(&c, &config.output_prefix, config.lcp_width)?)
    } else {
        None
    };
    Ok(Outcome { manifest, verify })
}

/// Exit code for an error: usage problems are 1, data problems 2.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_)
        | Error::InvalidAlphabet(_)
        | Error::CapExceeded { .. }
        | Error::WidthTooSmall { .. } => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn parse_width(s: &str) -> std::result::Result<LcpWidth, String> {
    s.parse::<usize>()
        .ok()
        .and_then(|b| LcpWidth::from_bytes(b).ok())
        .ok_or_else(|| format!("expected 1, 2 or 4, got {s:?}"))
}

fn parse_synth(s: &str) -> std::result::Result<SynthSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Build the BWT and LCP array of a string collection with sequential scans.
#[derive(Debug, Parser)]
#[command(name = "bwtlcp", version)]
pub struct Args {
    /// Input file; repeat for several, processed in order.
    #[arg(long, short = 'i')]
    pub input: Vec<PathBuf>,

    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,

    /// Outputs are written to <prefix>.bwt, .lcp, .gsa and .json.
    #[arg(long, short = 'o')]
    pub output_prefix: PathBuf,

    /// Parent directory for scratch segment files.
    #[arg(long)]
    pub tmp_dir: Option<PathBuf>,

    /// Bytes per LCP value: 1, 2 or 4.
    #[arg(long, default_value = "4", value_parser = parse_width)]
    pub lcp_width: LcpWidth,

    #[arg(long)]
    pub emit_gsa: bool,

    /// Cross-check the outputs against a naive in-memory construction.
    #[arg(long)]
    pub verify: bool,

    /// Largest N (symbols plus markers) accepted by --verify.
    #[arg(long, default_value_t = DEFAULT_VERIFY_CAP)]
    pub verify_cap: usize,

    /// Generate a random collection: seed,m,len,sigma.
    #[arg(long, value_parser = parse_synth)]
    pub synth: Option<SynthSpec>,

    /// `dna` (ACGNT) or an explicit list of symbols.
    #[arg(long)]
    pub alphabet: Option<String>,

    /// Merge segments on separate threads.
    #[arg(long)]
    pub parallel: bool,

    /// Buffer size per open segment file.
    #[arg(long, default_value_t = DEFAULT_BUFFER_BYTES)]
    pub buffer_bytes: usize,
}

impl Args {
    pub fn into_config(self) -> RunConfig {
        RunConfig {
            inputs: self.input,
            format: self.format,
            output_prefix: self.output_prefix,
            tmp_dir: self.tmp_dir.unwrap_or_else(std::env::temp_dir),
            alphabet: self.alphabet,
            lcp_width: self.lcp_width,
            emit_gsa: self.emit_gsa,
            verify: self.verify,
            verify_cap: self.verify_cap,
            synth: self.synth,
            parallel: self.parallel,
            buffer_bytes: self.buffer_bytes.max(1),
        }
    }
}

/// Parses `args`, runs, reports, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&args.into_config()) {
        Ok(outcome) => {
            let m = &outcome.manifest;
            eprintln!(
                "m={} N={} K={} sigma={} elapsed={:.3}s us/base={:.4}",
                m.m, m.n, m.k, m.sigma, m.elapsed_seconds, m.us_per_base
            );
            match outcome.verify {
                Some(report) if !report.passed() => {
                    for f in report.files.iter() {
                        if let Some(i) = f.divergence {
                            println!("verify FAIL {} first divergent index {i}", f.path.display());
                        }
                    }
                    EXIT_MISMATCH
                }
                Some(_) => {
                    println!("verify PASS");
                    EXIT_OK
                }
                None => EXIT_OK,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn auto_format_by_extension() {
        let f = InputFormat::Auto;
        assert_eq!(f.resolve(Path::new("a.fa")).unwrap(), InputFormat::Fasta);
        assert_eq!(f.resolve(Path::new("a.FASTA")).unwrap(), InputFormat::Fasta);
        assert_eq!(f.resolve(Path::new("a.fq")).unwrap(), InputFormat::Fastq);
        assert_eq!(f.resolve(Path::new("a.txt")).unwrap(), InputFormat::Lines);
        assert!(matches!(f.resolve(Path::new("a.bin")), Err(Error::InvalidConfig(_))));
        assert_eq!(InputFormat::Lines.resolve(Path::new("a.bin")).unwrap(), InputFormat::Lines);
    }

    #[test]
    fn fasta_two_records() {
        let d = tempfile::tempdir().unwrap();
        let p = write(d.path(), "r.fa", ">r1\nACACTGTACC\nAAC\n>r2 desc\nGAACAGAAAGCTC\n");
        let c = ingest(&[p], InputFormat::Auto, &Alphabet::dna()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.text(0), "ACACTGTACCAAC");
        assert_eq!(c.text(1), "GAACAGAAAGCTC");
    }

    #[test]
    fn fastq_lowercase_accepted() {
        let d = tempfile::tempdir().unwrap();
        let p = write(d.path(), "r.fq", "@r1\nacgt\n+\nIIII\n");
        let c = ingest(&[p], InputFormat::Auto, &Alphabet::dna()).unwrap();
        assert_eq!(c.text(0), "ACGT");
    }

    #[test]
    fn fastq_truncated_record_has_line() {
        let d = tempfile::tempdir().unwrap();
        let p = write(d.path(), "r.fq", "@r1\nACGT\n+\nIIII\n@r2\nAC\n+\nI\n");
        match ingest(&[p], InputFormat::Auto, &Alphabet::dna()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn line_file_rejects_space_and_blank() {
        let d = tempfile::tempdir().unwrap();
        let p = write(d.path(), "a.txt", "ACGT\nAC GT\n");
        match ingest(&[p], InputFormat::Auto, &Alphabet::dna()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let p = write(d.path(), "b.txt", "ACGT\n\nGT\n");
        match ingest(&[p], InputFormat::Auto, &Alphabet::dna()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let p = write(d.path(), "c.txt", "ACGT\r\nGT\n\n");
        let c = ingest(&[p], InputFormat::Auto, &Alphabet::dna()).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn foreign_symbol_passes_through() {
        let d = tempfile::tempdir().unwrap();
        let p = write(d.path(), "a.txt", "ACGT\nACXT\n");
        assert!(matches!(
            ingest(&[p], InputFormat::Auto, &Alphabet::dna()),
            Err(Error::ForeignSymbol { index: 1, offset: 2, .. })
        ));
    }

    #[test]
    fn synth_spec_parsing() {
        let s: SynthSpec = "1,4,5,4".parse().unwrap();
        assert_eq!(s, SynthSpec { seed: 1, m: 4, len: 5, sigma: 4 });
        assert!("1,4,5".parse::<SynthSpec>().is_err());
        assert!("1,0,5,4".parse::<SynthSpec>().is_err());
        assert!("1,4,5,27".parse::<SynthSpec>().is_err());
        assert_eq!(s.alphabet().unwrap().symbols(), b"ACGT");
        let s6: SynthSpec = "1,4,5,6".parse().unwrap();
        assert_eq!(s6.alphabet().unwrap().symbols(), b"ABCDEF");
    }

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(exit_code(&Error::CapExceeded { n: 2, cap: 1 }), EXIT_USAGE);
        assert_eq!(exit_code(&Error::InvalidAlphabet("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::EmptyCollection), EXIT_DATA);
        assert_eq!(exit_code(&Error::EmptyString { index: 0 }), EXIT_DATA);
    }
}
