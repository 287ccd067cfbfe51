//! Segment files for one iteration ("generation") of the construction.
//!
//! Generation `j` consists of `sigma + 1` segments. Segment `h` is stored as
//! up to three flat files written strictly sequentially:
//!
//! * `gen<j>.B.<h>` one byte per symbol code (`0` is the end marker),
//! * `gen<j>.L.<h>` fixed-width little-endian LCP values,
//! * `gen<j>.G.<h>` optional `(pos, seq)` pairs, two little-endian `u32`s.
//!
//! A generation becomes visible to readers only once its `gen<j>.meta`
//! manifest is written by [`GenerationWriter::seal`]. Readers are forward-only
//! cursors; there is no random access.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::model::{GsaEntry, LcpValue, SymbolCode};

pub const DEFAULT_BUFFER_BYTES: usize = 1 << 20;

const GSA_RECORD_BYTES: usize = 8;

/// Byte width of stored LCP values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(into = "usize")]
pub enum LcpWidth {
    One,
    Two,
    #[default]
    Four,
}

impl From<LcpWidth> for usize {
    fn from(w: LcpWidth) -> usize {
        w.bytes()
    }
}

impl LcpWidth {
    pub fn from_bytes(bytes: usize) -> Result<Self> {
        match bytes {
            1 => Ok(LcpWidth::One),
            2 => Ok(LcpWidth::Two),
            4 => Ok(LcpWidth::Four),
            other => Err(Error::InvalidConfig(format!(
                "lcp width must be 1, 2 or 4 bytes, got {other}"
            ))),
        }
    }

    pub fn bytes(self) -> usize {
        match self {
            LcpWidth::One => 1,
            LcpWidth::Two => 2,
            LcpWidth::Four => 4,
        }
    }

    pub fn max_value(self) -> u64 {
        (1u64 << (8 * self.bytes())) - 1
    }

    /// Fails unless every LCP of a collection whose longest string has
    /// `max_len` symbols fits.
    pub fn check(self, max_len: usize) -> Result<()> {
        if (max_len as u64) > self.max_value() {
            return Err(Error::WidthTooSmall {
                width: self.bytes(),
                max_len,
            });
        }
        Ok(())
    }

    /// Narrowest width that holds `max_len`.
    pub fn narrowest(max_len: usize) -> Self {
        [LcpWidth::One, LcpWidth::Two, LcpWidth::Four]
            .into_iter()
            .find(|w| w.check(max_len).is_ok())
            .unwrap_or(LcpWidth::Four)
    }

    #[inline]
    pub(crate) fn encode(self, value: LcpValue, out: &mut [u8; 4]) -> &[u8] {
        *out = value.to_le_bytes();
        &out[..self.bytes()]
    }

    #[inline]
    pub(crate) fn decode(self, bytes: &[u8]) -> LcpValue {
        let mut buf = [0u8; 4];
        buf[..bytes.len()].copy_from_slice(bytes);
        LcpValue::from_le_bytes(buf)
    }
}

/// One element of `B_j(h)` paired with its `L_j(h)` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentRecord {
    pub symbol: SymbolCode,
    pub lcp: LcpValue,
}

impl SegmentRecord {
    pub fn new(symbol: SymbolCode, lcp: LcpValue) -> Self {
        SegmentRecord { symbol, lcp }
    }
}

/// Which file of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stream {
    Symbols,
    Lcp,
    Gsa,
}

impl Stream {
    fn tag(self) -> &'static str {
        match self {
            Stream::Symbols => "B",
            Stream::Lcp => "L",
            Stream::Gsa => "G",
        }
    }
}

pub fn segment_path(dir: &Path, iteration: usize, stream: Stream, segment: usize) -> PathBuf {
    dir.join(format!("gen{iteration}.{}.{segment}", stream.tag()))
}

pub fn meta_path(dir: &Path, iteration: usize) -> PathBuf {
    dir.join(format!("gen{iteration}.meta"))
}

/// Layout shared by every generation of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentFormat {
    pub sigma: usize,
    pub lcp_width: LcpWidth,
    pub gsa: bool,
    pub buffer_bytes: usize,
}

impl SegmentFormat {
    pub fn new(sigma: usize, lcp_width: LcpWidth) -> Self {
        SegmentFormat {
            sigma,
            lcp_width,
            gsa: false,
            buffer_bytes: DEFAULT_BUFFER_BYTES,
        }
    }

    pub fn with_gsa(mut self, gsa: bool) -> Self {
        self.gsa = gsa;
        self
    }

    pub fn with_buffer(mut self, bytes: usize) -> Self {
        self.buffer_bytes = bytes.max(64);
        self
    }

    pub fn segments(&self) -> usize {
        self.sigma + 1
    }
}

/// Contents of `gen<j>.meta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationMeta {
    pub iteration: usize,
    pub sigma: usize,
    pub lcp_width: LcpWidth,
    pub gsa: bool,
    pub lengths: Vec<u64>,
}

impl GenerationMeta {
    pub fn total_len(&self) -> u64 {
        self.lengths.iter().sum()
    }

    fn to_text(&self) -> String {
        let lengths: Vec<String> = self.lengths.iter().map(u64::to_string).collect();
        format!(
            "iteration {}\nsigma {}\nlcp_width {}\ngsa {}\nlengths {}\n",
            self.iteration,
            self.sigma,
            self.lcp_width.bytes(),
            self.gsa as u8,
            lengths.join(" ")
        )
    }

    fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |line: usize, message: &str| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: message.to_owned(),
        };
        let mut iteration = None;
        let mut sigma = None;
        let mut lcp_width = None;
        let mut gsa = None;
        let mut lengths = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let mut parts = line.split_whitespace();
            let Some(key) = parts.next() else { continue };
            let number = |parts: &mut std::str::SplitWhitespace| -> Result<u64> {
                parts
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| bad(line_no, "expected a decimal value"))
            };
            match key {
                "iteration" => iteration = Some(number(&mut parts)? as usize),
                "sigma" => sigma = Some(number(&mut parts)? as usize),
                "lcp_width" => lcp_width = Some(LcpWidth::from_bytes(number(&mut parts)? as usize)?),
                "gsa" => gsa = Some(number(&mut parts)? != 0),
                "lengths" => {
                    lengths = Some(
                        parts
                            .map(|v| v.parse::<u64>().map_err(|_| bad(line_no, "bad length")))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                _ => return Err(bad(line_no, "unknown key")),
            }
        }
        let meta = GenerationMeta {
            iteration: iteration.ok_or_else(|| bad(0, "missing iteration"))?,
            sigma: sigma.ok_or_else(|| bad(0, "missing sigma"))?,
            lcp_width: lcp_width.ok_or_else(|| bad(0, "missing lcp_width"))?,
            gsa: gsa.ok_or_else(|| bad(0, "missing gsa"))?,
            lengths: lengths.ok_or_else(|| bad(0, "missing lengths"))?,
        };
        if meta.lengths.len() != meta.sigma + 1 {
            return Err(bad(0, "lengths do not cover sigma + 1 segments"));
        }
        Ok(meta)
    }
}

fn create(path: PathBuf, buffer: usize) -> Result<(BufWriter<File>, PathBuf)> {
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok((BufWriter::with_capacity(buffer, file), path))
}

/// Append-only writer for one segment.
#[derive(Debug)]
pub struct SegmentWriter {
    segment: usize,
    symbols: (BufWriter<File>, PathBuf),
    lcps: (BufWriter<File>, PathBuf),
    gsa: Option<(BufWriter<File>, PathBuf)>,
    width: LcpWidth,
    len: u64,
}

impl SegmentWriter {
    fn open(dir: &Path, iteration: usize, segment: usize, format: &SegmentFormat) -> Result<Self> {
        let buffer = format.buffer_bytes;
        Ok(SegmentWriter {
            segment,
            symbols: create(segment_path(dir, iteration, Stream::Symbols, segment), buffer)?,
            lcps: create(segment_path(dir, iteration, Stream::Lcp, segment), buffer)?,
            gsa: if format.gsa {
                Some(create(segment_path(dir, iteration, Stream::Gsa, segment), buffer)?)
            } else {
                None
            },
            width: format.lcp_width,
            len: 0,
        })
    }

    pub fn segment(&self) -> usize {
        self.segment
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn has_gsa(&self) -> bool {
        self.gsa.is_some()
    }

    #[inline]
    pub fn push(&mut self, rec: SegmentRecord) -> Result<()> {
        debug_assert!(u64::from(rec.lcp) <= self.width.max_value());
        let (w, path) = &mut self.symbols;
        w.write_all(&[rec.symbol.0]).map_err(|e| Error::io(&*path, e))?;
        let mut buf = [0u8; 4];
        let (w, path) = &mut self.lcps;
        w.write_all(self.width.encode(rec.lcp, &mut buf))
            .map_err(|e| Error::io(&*path, e))?;
        self.len += 1;
        Ok(())
    }

    /// Pushes a record and, when the generation carries one, its suffix name.
    #[inline]
    pub fn push_with_gsa(&mut self, rec: SegmentRecord, entry: GsaEntry) -> Result<()> {
        if let Some((w, path)) = &mut self.gsa {
            let mut buf = [0u8; GSA_RECORD_BYTES];
            buf[..4].copy_from_slice(&entry.pos.to_le_bytes());
            buf[4..].copy_from_slice(&entry.seq.to_le_bytes());
            w.write_all(&buf).map_err(|e| Error::io(&*path, e))?;
        }
        self.push(rec)
    }

    fn finish(mut self) -> Result<u64> {
        for (w, path) in [Some(&mut self.symbols), Some(&mut self.lcps), self.gsa.as_mut()]
            .into_iter()
            .flatten()
        {
            w.flush().map_err(|e| Error::io(&*path, e))?;
        }
        Ok(self.len)
    }
}

/// Writer for all segments of generation `j`.
#[derive(Debug)]
pub struct GenerationWriter {
    dir: PathBuf,
    iteration: usize,
    format: SegmentFormat,
    segments: Vec<SegmentWriter>,
}

/// Creates the `2(sigma + 1)` (or `3(sigma + 1)` with suffix names) empty
/// segment files of generation `iteration`.
pub fn open_generation_writer(
    dir: &Path,
    iteration: usize,
    format: &SegmentFormat,
    max_len: usize,
) -> Result<GenerationWriter> {
    format.lcp_width.check(max_len)?;
    let segments = (0..format.segments())
        .map(|h| SegmentWriter::open(dir, iteration, h, format))
        .collect::<Result<Vec<_>>>()?;
    Ok(GenerationWriter {
        dir: dir.to_path_buf(),
        iteration,
        format: *format,
        segments,
    })
}

impl GenerationWriter {
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn format(&self) -> &SegmentFormat {
        &self.format
    }

    pub fn append(&mut self, segment: usize, rec: SegmentRecord) -> Result<()> {
        self.segment_mut(segment)?.push(rec)
    }

    pub fn append_with_gsa(&mut self, segment: usize, rec: SegmentRecord, entry: GsaEntry) -> Result<()> {
        self.segment_mut(segment)?.push_with_gsa(rec, entry)
    }

    pub fn segment_mut(&mut self, segment: usize) -> Result<&mut SegmentWriter> {
        let n = self.segments.len();
        self.segments
            .get_mut(segment)
            .ok_or(Error::PositionOutOfRange {
                position: segment,
                len: n,
            })
    }

    pub fn segments_mut(&mut self) -> &mut [SegmentWriter] {
        &mut self.segments
    }

    /// Flushes every segment and publishes the manifest.
    pub fn seal(self) -> Result<GenerationMeta> {
        let lengths = self
            .segments
            .into_iter()
            .map(SegmentWriter::finish)
            .collect::<Result<Vec<_>>>()?;
        let meta = GenerationMeta {
            iteration: self.iteration,
            sigma: self.format.sigma,
            lcp_width: self.format.lcp_width,
            gsa: self.format.gsa,
            lengths,
        };
        let path = meta_path(&self.dir, self.iteration);
        let tmp = path.with_extension("meta.tmp");
        fs::write(&tmp, meta.to_text()).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(meta)
    }
}

/// Something a cursor did, as seen by an [`AccessLog`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AccessEvent {
    Open {
        iteration: usize,
        stream: Stream,
        segment: usize,
    },
    /// Element offsets (1-based) fetched by one cursor over its lifetime.
    Pass {
        iteration: usize,
        stream: Stream,
        segment: usize,
        offsets: Vec<u64>,
    },
    /// Generations present on disk at a checkpoint.
    OnDisk {
        after_iteration: usize,
        generations: Vec<usize>,
    },
}

/// Shared record of segment accesses, for instrumented runs.
#[derive(Debug, Clone, Default)]
pub struct AccessLog(Arc<Mutex<Vec<AccessEvent>>>);

impl AccessLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, event: AccessEvent) {
        self.0.lock().expect("access log poisoned").push(event);
    }

    pub fn events(&self) -> Vec<AccessEvent> {
        self.0.lock().expect("access log poisoned").clone()
    }
}

struct Probe {
    log: AccessLog,
    iteration: usize,
    stream: Stream,
    segment: usize,
    offsets: Vec<u64>,
}

impl Drop for Probe {
    fn drop(&mut self) {
        self.log.record(AccessEvent::Pass {
            iteration: self.iteration,
            stream: self.stream,
            segment: self.segment,
            offsets: std::mem::take(&mut self.offsets),
        });
    }
}

/// Forward-only cursor over fixed-width elements of one file.
struct Cursor {
    reader: BufReader<File>,
    path: PathBuf,
    width: usize,
    len: u64,
    position: u64,
    probe: Option<Probe>,
}

impl Cursor {
    #[inline]
    fn remaining(&self) -> u64 {
        self.len - self.position
    }

    #[inline]
    fn note(&mut self, count: u64) {
        if let Some(p) = &mut self.probe {
            p.offsets.extend(self.position + 1..=self.position + count);
        }
        self.position += count;
    }

    /// Next element's raw bytes, copied into `out[..width]`.
    #[inline]
    fn next_into(&mut self, out: &mut [u8]) -> Result<bool> {
        if self.position == self.len {
            return Ok(false);
        }
        let w = self.width;
        let buf = self.reader.fill_buf().map_err(|e| Error::io(&self.path, e))?;
        if buf.len() >= w {
            out[..w].copy_from_slice(&buf[..w]);
            self.reader.consume(w);
        } else {
            self.reader
                .read_exact(&mut out[..w])
                .map_err(|e| Error::io(&self.path, e))?;
        }
        self.note(1);
        Ok(true)
    }

    /// Passes the next `count` elements' bytes to `sink` in chunks.
    fn drain(&mut self, count: u64, mut sink: impl FnMut(&[u8]) -> Result<()>) -> Result<()> {
        if count > self.remaining() {
            return Err(Error::InconsistentState(format!(
                "{}: need {count} more elements, {} remain",
                self.path.display(),
                self.remaining()
            )));
        }
        let mut bytes = count as usize * self.width;
        let mut carry: Vec<u8> = Vec::new();
        while bytes > 0 {
            let buf = self.reader.fill_buf().map_err(|e| Error::io(&self.path, e))?;
            if buf.is_empty() {
                return Err(Error::io(
                    &self.path,
                    std::io::Error::new(std::io::ErrorKind::UnexpectedEof, "segment truncated"),
                ));
            }
            let take = buf.len().min(bytes);
            // keep element boundaries intact for the sink
            let whole = if carry.is_empty() {
                take - take % self.width
            } else {
                0
            };
            if whole > 0 {
                sink(&buf[..whole])?;
                self.reader.consume(whole);
                bytes -= whole;
            } else {
                let need = self.width - carry.len();
                let n = need.min(take);
                carry.extend_from_slice(&buf[..n]);
                self.reader.consume(n);
                bytes -= n;
                if carry.len() == self.width {
                    sink(&carry)?;
                    carry.clear();
                }
            }
        }
        self.note(count);
        Ok(())
    }
}

/// Cursor over `B_j(h)`.
pub struct SymbolCursor(Cursor);

impl SymbolCursor {
    #[inline]
    pub fn next_symbol(&mut self) -> Result<Option<SymbolCode>> {
        let mut b = [0u8; 1];
        Ok(self.0.next_into(&mut b)?.then_some(SymbolCode(b[0])))
    }

    /// Elements consumed so far; the 1-based offset of the last one fetched.
    pub fn position(&self) -> u64 {
        self.0.position
    }

    pub fn len(&self) -> u64 {
        self.0.len
    }

    pub fn is_empty(&self) -> bool {
        self.0.len == 0
    }

    /// Consumes `count` symbols, adding each to `counts[code]`.
    pub fn advance_counting(&mut self, count: u64, counts: &mut [u64]) -> Result<()> {
        self.0.drain(count, |chunk| {
            for &b in chunk {
                counts[b as usize] += 1;
            }
            Ok(())
        })
    }

    pub fn count_rest(&mut self, counts: &mut [u64]) -> Result<()> {
        let rest = self.0.remaining();
        self.advance_counting(rest, counts)
    }
}

impl Iterator for SymbolCursor {
    type Item = Result<SymbolCode>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_symbol().transpose()
    }
}

/// Cursor over `L_j(h)`.
pub struct LcpCursor {
    inner: Cursor,
    width: LcpWidth,
}

impl LcpCursor {
    #[inline]
    pub fn next_lcp(&mut self) -> Result<Option<LcpValue>> {
        let mut b = [0u8; 4];
        let w = self.width.bytes();
        Ok(self.inner.next_into(&mut b)?.then(|| self.width.decode(&b[..w])))
    }
}

impl Iterator for LcpCursor {
    type Item = Result<LcpValue>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_lcp().transpose()
    }
}

/// Cursor over the optional suffix-name stream.
pub struct GsaCursor(Cursor);

impl GsaCursor {
    #[inline]
    pub fn next_entry(&mut self) -> Result<Option<GsaEntry>> {
        let mut b = [0u8; GSA_RECORD_BYTES];
        Ok(self.0.next_into(&mut b)?.then(|| decode_gsa(&b)))
    }
}

fn decode_gsa(b: &[u8]) -> GsaEntry {
    GsaEntry::new(
        u32::from_le_bytes(b[..4].try_into().expect("4 bytes")),
        u32::from_le_bytes(b[4..8].try_into().expect("4 bytes")),
    )
}

impl Iterator for GsaCursor {
    type Item = Result<GsaEntry>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_entry().transpose()
    }
}

/// Synchronised cursors over the symbol, LCP and (optional) suffix-name
/// files of one segment.
pub struct RecordCursor {
    symbols: SymbolCursor,
    lcps: LcpCursor,
    gsa: Option<GsaCursor>,
}

impl RecordCursor {
    #[inline]
    pub fn next_record(&mut self) -> Result<Option<(SegmentRecord, Option<GsaEntry>)>> {
        let Some(symbol) = self.symbols.next_symbol()? else {
            return Ok(None);
        };
        let lcp = self
            .lcps
            .next_lcp()?
            .ok_or_else(|| Error::InconsistentState("lcp stream shorter than symbols".into()))?;
        let entry = match &mut self.gsa {
            Some(g) => Some(
                g.next_entry()?
                    .ok_or_else(|| Error::InconsistentState("gsa stream shorter than symbols".into()))?,
            ),
            None => None,
        };
        Ok(Some((SegmentRecord::new(symbol, lcp), entry)))
    }

    pub fn position(&self) -> u64 {
        self.symbols.position()
    }

    pub fn remaining(&self) -> u64 {
        self.symbols.0.remaining()
    }

    /// Copies every remaining record verbatim into `out`.
    pub fn copy_rest(&mut self, out: &mut SegmentWriter) -> Result<()> {
        let rest = self.remaining();
        if out.width != self.lcps.width {
            // widths differ: re-encode element by element
            while let Some((rec, entry)) = self.next_record()? {
                match entry {
                    Some(e) => out.push_with_gsa(rec, e)?,
                    None => out.push(rec)?,
                }
            }
            return Ok(());
        }
        let (w, path) = &mut out.symbols;
        self.symbols
            .0
            .drain(rest, |chunk| w.write_all(chunk).map_err(|e| Error::io(&*path, e)))?;
        let (w, path) = &mut out.lcps;
        self.lcps
            .inner
            .drain(rest, |chunk| w.write_all(chunk).map_err(|e| Error::io(&*path, e)))?;
        match (&mut self.gsa, &mut out.gsa) {
            (Some(src), Some((w, path))) => src
                .0
                .drain(rest, |chunk| w.write_all(chunk).map_err(|e| Error::io(&*path, e)))?,
            (None, None) => {}
            _ => {
                return Err(Error::InconsistentState(
                    "suffix-name stream present on only one side of a copy".into(),
                ))
            }
        }
        out.len += rest;
        Ok(())
    }
}

/// Read access to a sealed generation.
#[derive(Clone)]
pub struct GenerationReader {
    dir: PathBuf,
    meta: GenerationMeta,
    buffer_bytes: usize,
    probe: Option<AccessLog>,
}

impl std::fmt::Debug for GenerationReader {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GenerationReader")
            .field("dir", &self.dir)
            .field("meta", &self.meta)
            .finish()
    }
}

/// Opens a sealed generation; fails with `MissingGeneration` before
/// [`GenerationWriter::seal`] has run.
pub fn open_generation_reader(dir: &Path, iteration: usize) -> Result<GenerationReader> {
    let path = meta_path(dir, iteration);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingGeneration {
                iteration,
                dir: dir.to_path_buf(),
            })
        }
        Err(e) => return Err(Error::io(&path, e)),
    };
    let meta = GenerationMeta::parse(&text, &path)?;
    if meta.iteration != iteration {
        return Err(Error::InconsistentState(format!(
            "{} describes iteration {}",
            path.display(),
            meta.iteration
        )));
    }
    Ok(GenerationReader {
        dir: dir.to_path_buf(),
        meta,
        buffer_bytes: DEFAULT_BUFFER_BYTES,
        probe: None,
    })
}

impl GenerationReader {
    pub fn with_probe(mut self, log: AccessLog) -> Self {
        self.probe = Some(log);
        self
    }

    pub fn with_buffer(mut self, bytes: usize) -> Self {
        self.buffer_bytes = bytes.max(64);
        self
    }

    pub fn meta(&self) -> &GenerationMeta {
        &self.meta
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn segment_len(&self, segment: usize) -> u64 {
        self.meta.lengths[segment]
    }

    fn cursor(&self, stream: Stream, segment: usize, width: usize) -> Result<Cursor> {
        if segment > self.meta.sigma {
            return Err(Error::PositionOutOfRange {
                position: segment,
                len: self.meta.sigma + 1,
            });
        }
        let path = segment_path(&self.dir, self.meta.iteration, stream, segment);
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let probe = self.probe.as_ref().map(|log| {
            log.record(AccessEvent::Open {
                iteration: self.meta.iteration,
                stream,
                segment,
            });
            Probe {
                log: log.clone(),
                iteration: self.meta.iteration,
                stream,
                segment,
                offsets: Vec::new(),
            }
        });
        Ok(Cursor {
            reader: BufReader::with_capacity(self.buffer_bytes, file),
            path,
            width,
            len: self.meta.lengths[segment],
            position: 0,
            probe,
        })
    }

    pub fn symbols(&self, segment: usize) -> Result<SymbolCursor> {
        Ok(SymbolCursor(self.cursor(Stream::Symbols, segment, 1)?))
    }

    pub fn lcps(&self, segment: usize) -> Result<LcpCursor> {
        let width = self.meta.lcp_width;
        Ok(LcpCursor {
            inner: self.cursor(Stream::Lcp, segment, width.bytes())?,
            width,
        })
    }

    pub fn gsa(&self, segment: usize) -> Result<GsaCursor> {
        if !self.meta.gsa {
            return Err(Error::InvalidConfig(format!(
                "generation {} has no suffix-name stream",
                self.meta.iteration
            )));
        }
        Ok(GsaCursor(self.cursor(Stream::Gsa, segment, GSA_RECORD_BYTES)?))
    }

    pub fn records(&self, segment: usize) -> Result<RecordCursor> {
        Ok(RecordCursor {
            symbols: self.symbols(segment)?,
            lcps: self.lcps(segment)?,
            gsa: if self.meta.gsa { Some(self.gsa(segment)?) } else { None },
        })
    }

    /// Materializes one segment. Intended for tests and small inputs.
    pub fn read_segment(&self, segment: usize) -> Result<(Vec<SymbolCode>, Vec<LcpValue>)> {
        let symbols = self.symbols(segment)?.collect::<Result<Vec<_>>>()?;
        let lcps = self.lcps(segment)?.collect::<Result<Vec<_>>>()?;
        Ok((symbols, lcps))
    }

    pub fn read_gsa_segment(&self, segment: usize) -> Result<Vec<GsaEntry>> {
        self.gsa(segment)?.collect()
    }
}

/// Deletes generation `iteration - 1`. A no-op at iteration 0.
pub fn swap_generations(dir: &Path, iteration: usize) -> Result<()> {
    if iteration == 0 {
        return Ok(());
    }
    let prefix = format!("gen{}.", iteration - 1);
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry.file_name().to_string_lossy().starts_with(&prefix) {
            let path = entry.path();
            fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

/// Iterations that have at least one file in `dir`.
pub fn generations_on_disk(dir: &Path) -> Result<BTreeSet<usize>> {
    let mut found = BTreeSet::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(j) = name
            .strip_prefix("gen")
            .and_then(|rest| rest.split('.').next())
            .and_then(|j| j.parse().ok())
        {
            found.insert(j);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dir() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn writer_creates_all_segment_files() {
        let d = dir();
        let w = open_generation_writer(d.path(), 0, &SegmentFormat::new(4, LcpWidth::One), 13).unwrap();
        let files = fs::read_dir(d.path()).unwrap().count();
        assert_eq!(files, 10);
        let meta = w.seal().unwrap();
        assert_eq!(meta.lengths, vec![0; 5]);
    }

    #[test]
    fn width_checks() {
        let d = dir();
        assert!(open_generation_writer(d.path(), 1, &SegmentFormat::new(4, LcpWidth::Four), 13).is_ok());
        let err = open_generation_writer(d.path(), 1, &SegmentFormat::new(4, LcpWidth::One), 300).unwrap_err();
        assert!(matches!(err, Error::WidthTooSmall { width: 1, max_len: 300 }));
        assert!(LcpWidth::One.check(255).is_ok());
        assert_eq!(LcpWidth::narrowest(256), LcpWidth::Two);
    }

    #[test]
    fn append_and_read_back() {
        let d = dir();
        let mut w = open_generation_writer(d.path(), 13, &SegmentFormat::new(4, LcpWidth::Four), 13).unwrap();
        let c = SymbolCode(2);
        w.append(0, SegmentRecord::new(c, 0)).unwrap();
        w.append(0, SegmentRecord::new(c, 0)).unwrap();
        w.seal().unwrap();
        let r = open_generation_reader(d.path(), 13).unwrap();
        assert_eq!(r.read_segment(0).unwrap(), (vec![c, c], vec![0, 0]));
        assert_eq!(r.meta().lengths, vec![2, 0, 0, 0, 0]);
    }

    #[test]
    fn unsealed_generation_is_invisible() {
        let d = dir();
        let mut w = open_generation_writer(d.path(), 3, &SegmentFormat::new(2, LcpWidth::Four), 100).unwrap();
        for i in 0..1_000_000u32 {
            w.append(1, SegmentRecord::new(SymbolCode(1), i % 100)).unwrap();
        }
        assert!(matches!(
            open_generation_reader(d.path(), 3),
            Err(Error::MissingGeneration { iteration: 3, .. })
        ));
        w.seal().unwrap();
        let r = open_generation_reader(d.path(), 3).unwrap();
        assert_eq!(r.segment_len(1), 1_000_000);
    }

    #[test]
    fn empty_segment_ends_immediately() {
        let d = dir();
        open_generation_writer(d.path(), 0, &SegmentFormat::new(3, LcpWidth::Two), 10)
            .unwrap()
            .seal()
            .unwrap();
        let r = open_generation_reader(d.path(), 0).unwrap();
        assert!(r.symbols(2).unwrap().next_symbol().unwrap().is_none());
        assert!(r.records(2).unwrap().next_record().unwrap().is_none());
    }

    #[test]
    fn two_passes_over_one_generation() {
        let d = dir();
        let mut w = open_generation_writer(d.path(), 1, &SegmentFormat::new(2, LcpWidth::One), 10).unwrap();
        for (s, l) in [(1u8, 0u32), (2, 1), (1, 3)] {
            w.append(1, SegmentRecord::new(SymbolCode(s), l)).unwrap();
        }
        w.seal().unwrap();
        let log = AccessLog::new();
        let r = open_generation_reader(d.path(), 1).unwrap().with_probe(log.clone());
        let mut counts = [0u64; 3];
        r.symbols(1).unwrap().count_rest(&mut counts).unwrap();
        assert_eq!(counts, [0, 2, 1]);
        let (b, l) = r.read_segment(1).unwrap();
        assert_eq!(b, vec![SymbolCode(1), SymbolCode(2), SymbolCode(1)]);
        assert_eq!(l, vec![0, 1, 3]);
        let opens = log
            .events()
            .iter()
            .filter(|e| matches!(e, AccessEvent::Open { stream: Stream::Symbols, .. }))
            .count();
        assert_eq!(opens, 2);
        for e in log.events() {
            if let AccessEvent::Pass { offsets, .. } = e {
                assert!(offsets.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn swap_keeps_only_latest() {
        let d = dir();
        let f = SegmentFormat::new(1, LcpWidth::One);
        for j in 0..=5 {
            open_generation_writer(d.path(), j, &f, 5).unwrap().seal().unwrap();
            swap_generations(d.path(), j).unwrap();
            assert_eq!(generations_on_disk(d.path()).unwrap(), BTreeSet::from([j]));
        }
    }

    #[test]
    fn swap_at_zero_is_noop() {
        let d = dir();
        open_generation_writer(d.path(), 0, &SegmentFormat::new(1, LcpWidth::One), 5)
            .unwrap()
            .seal()
            .unwrap();
        swap_generations(d.path(), 0).unwrap();
        assert!(open_generation_reader(d.path(), 0).is_ok());
    }

    #[test]
    fn swap_does_not_touch_longer_prefixes() {
        let d = dir();
        let f = SegmentFormat::new(1, LcpWidth::One);
        open_generation_writer(d.path(), 12, &f, 5).unwrap().seal().unwrap();
        open_generation_writer(d.path(), 2, &f, 5).unwrap().seal().unwrap();
        swap_generations(d.path(), 2).unwrap();
        assert_eq!(generations_on_disk(d.path()).unwrap(), BTreeSet::from([2, 12]));
    }

    #[test]
    fn copy_rest_with_small_buffers() {
        let d = dir();
        let f = SegmentFormat::new(2, LcpWidth::Four).with_gsa(true).with_buffer(64);
        let mut w = open_generation_writer(d.path(), 0, &f, 1000).unwrap();
        for i in 0..500u32 {
            w.append_with_gsa(1, SegmentRecord::new(SymbolCode((i % 3) as u8), i), GsaEntry::new(i, i * 2))
                .unwrap();
        }
        w.seal().unwrap();
        let r = open_generation_reader(d.path(), 0).unwrap().with_buffer(67);
        let mut out = open_generation_writer(d.path(), 1, &f, 1000).unwrap();
        let mut cur = r.records(1).unwrap();
        for _ in 0..7 {
            let (rec, e) = cur.next_record().unwrap().unwrap();
            out.append_with_gsa(1, rec, e.unwrap()).unwrap();
        }
        cur.copy_rest(out.segment_mut(1).unwrap()).unwrap();
        out.seal().unwrap();
        let r1 = open_generation_reader(d.path(), 1).unwrap();
        assert_eq!(r1.read_segment(1).unwrap(), r.read_segment(1).unwrap());
        assert_eq!(r1.read_gsa_segment(1).unwrap(), r.read_gsa_segment(1).unwrap());
    }

    proptest! {
        #[test]
        fn write_then_read_round_trips(
            width in prop_oneof![Just(LcpWidth::One), Just(LcpWidth::Two), Just(LcpWidth::Four)],
            recs in proptest::collection::vec((0u8..6, any::<u32>(), 0usize..6), 0..300),
        ) {
            let d = dir();
            let max = width.max_value().min(u32::MAX as u64) as u32;
            let f = SegmentFormat::new(5, width).with_gsa(true).with_buffer(100);
            let mut w = open_generation_writer(d.path(), 7, &f, 0).unwrap();
            let mut expected = vec![(Vec::new(), Vec::new(), Vec::new()); 6];
            for (i, &(s, l, h)) in recs.iter().enumerate() {
                let l = l % (max as u64 + 1).min(u32::MAX as u64) as u32;
                let e = GsaEntry::new(i as u32, l);
                w.append_with_gsa(h, SegmentRecord::new(SymbolCode(s), l), e).unwrap();
                expected[h].0.push(SymbolCode(s));
                expected[h].1.push(l);
                expected[h].2.push(e);
            }
            w.seal().unwrap();
            let r = open_generation_reader(d.path(), 7).unwrap();
            for (h, (b, l, g)) in expected.into_iter().enumerate() {
                prop_assert_eq!(r.read_segment(h).unwrap(), (b, l));
                prop_assert_eq!(r.read_gsa_segment(h).unwrap(), g);
            }
        }
    }
}
