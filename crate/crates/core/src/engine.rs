//! Column-wise construction of the BWT and LCP array.
//!
//! Iteration `j` inserts, for every string still being processed, the suffix
//! of length `j + 1` (its `j`-suffix, end marker included) into the partial
//! generalized suffix array. Only the per-sequence arrays in
//! [`IterationArrays`] live in memory; the partial BWT/LCP is streamed from
//! generation `j - 1` to generation `j` through [`crate::segio`].
//!
//! Each iteration runs three steps:
//!
//! 1. [`phase1_positions`]: one scan of `B_{j-1}` turns each sequence's
//!    previous position into its new segment and position by counting
//!    symbol occurrences (LF mapping without rank structures).
//! 2. [`sort_arrays`]: order slots by `(segment, position, sequence)`.
//! 3. [`phase2_merge`]: one scan of `B_{j-1}`/`L_{j-1}` per segment that
//!    interleaves the new symbols, patches the LCP values around them, and
//!    tracks the open current/successive intervals that yield the LCP values
//!    needed by the next iteration.
//!
//! Strings of different lengths are supported: string `i` inserts its whole
//! text (preceded by the end marker) at iteration `|w_i|` and then leaves the
//! arrays.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{GsaEntry, LcpValue, SequenceCollection, SymbolCode};
use crate::segio::{
    generations_on_disk, open_generation_reader, open_generation_writer, swap_generations, AccessEvent,
    AccessLog, GenerationMeta, GenerationReader, GenerationWriter, LcpWidth, RecordCursor, SegmentFormat,
    SegmentRecord, SegmentWriter, DEFAULT_BUFFER_BYTES,
};

#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Parent directory for the run's scratch directory.
    pub tmp_dir: PathBuf,
    pub lcp_width: LcpWidth,
    pub emit_gsa: bool,
    /// Buffer size per open segment file.
    pub buffer_bytes: usize,
    /// Merge the segments of an iteration on separate threads.
    pub parallel: bool,
    pub probe: Option<AccessLog>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            tmp_dir: std::env::temp_dir(),
            lcp_width: LcpWidth::default(),
            emit_gsa: false,
            buffer_bytes: DEFAULT_BUFFER_BYTES,
            parallel: false,
            probe: None,
        }
    }
}

impl EngineConfig {
    fn format(&self, sigma: usize) -> SegmentFormat {
        SegmentFormat::new(sigma, self.lcp_width)
            .with_gsa(self.emit_gsa)
            .with_buffer(self.buffer_bytes)
    }
}

/// Per-sequence state of one live string.
///
/// `segment` and `pos` locate the symbol inserted for this string in the
/// current generation (1-based within the segment). `lcp_prev` and
/// `lcp_next` are the LCP values of the *next* suffix of this string with
/// its predecessor and successor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub seq: u32,
    pub segment: u8,
    pub pos: u64,
    pub lcp_prev: LcpValue,
    pub lcp_next: LcpValue,
}

/// The in-memory arrays carried between iterations.
///
/// `slots` holds five of them (sequence, segment, position, predecessor LCP,
/// successor LCP) for each live string; `pending` holds the symbol each
/// sequence inserts next, indexed by sequence.
#[derive(Debug, Clone)]
pub struct IterationArrays {
    slots: Vec<Slot>,
    pending: Vec<SymbolCode>,
}

/// Memory accounting for the live arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct Footprint {
    /// Allocated elements of the largest per-sequence array.
    pub array_elements: usize,
    /// Number of per-sequence arrays.
    pub arrays: usize,
    /// Cells of the occurrence table.
    pub table_cells: usize,
    /// Cells of the interval tracker.
    pub tracker_cells: usize,
    /// Bytes for all of the above, excluding I/O buffers.
    pub bytes: usize,
}

impl Footprint {
    fn max(self, other: Footprint) -> Footprint {
        if other.bytes > self.bytes {
            other
        } else {
            self
        }
    }
}

impl IterationArrays {
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn pending(&self) -> &[SymbolCode] {
        &self.pending
    }

    pub fn live_count(&self) -> usize {
        self.slots.len()
    }

    pub fn is_sorted(&self) -> bool {
        self.slots
            .windows(2)
            .all(|w| (w[0].segment, w[0].pos, w[0].seq) < (w[1].segment, w[1].pos, w[1].seq))
    }

    /// Accounting hook: the live arrays plus the fixed-size tables an
    /// iteration over an alphabet of `sigma` symbols uses.
    pub fn footprint(&self, sigma: usize) -> Footprint {
        let sigma1 = sigma + 1;
        let table_cells = sigma1 * sigma1;
        let tracker_cells = 2 * sigma1;
        Footprint {
            array_elements: self.slots.capacity().max(self.pending.capacity()),
            arrays: 6,
            table_cells,
            tracker_cells,
            bytes: self.slots.capacity() * std::mem::size_of::<Slot>()
                + self.pending.capacity() * std::mem::size_of::<SymbolCode>()
                + table_cells * std::mem::size_of::<u64>()
                + tracker_cells * IntervalTracker::CELL_BYTES,
        }
    }

    /// Drops strings whose whole text has been inserted by `iteration`.
    fn retire(&mut self, iteration: usize, c: &SequenceCollection) {
        self.slots.retain(|s| c.seq_len(s.seq as usize) > iteration);
    }
}

/// Per-segment symbol counts of generation `j - 1`: `[v][z]` is the number of
/// `c_z` in `B_{j-1}(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceTable {
    sigma1: usize,
    counts: Vec<u64>,
}

impl OccurrenceTable {
    pub fn new(sigma: usize) -> Self {
        let sigma1 = sigma + 1;
        OccurrenceTable {
            sigma1,
            counts: vec![0; sigma1 * sigma1],
        }
    }

    pub fn get(&self, segment: usize, symbol: usize) -> u64 {
        self.counts[segment * self.sigma1 + symbol]
    }

    pub fn row(&self, segment: usize) -> &[u64] {
        &self.counts[segment * self.sigma1..(segment + 1) * self.sigma1]
    }

    fn row_mut(&mut self, segment: usize) -> &mut [u64] {
        &mut self.counts[segment * self.sigma1..(segment + 1) * self.sigma1]
    }

    /// Occurrences of `symbol` in all segments before `segment`.
    pub fn preceding(&self, segment: usize, symbol: usize) -> u64 {
        (0..segment).map(|v| self.get(v, symbol)).sum()
    }
}

/// Running minima of the open current (LCI) and successive (LSI) intervals
/// of one segment, one cell of each kind per symbol.
#[derive(Debug)]
struct IntervalTracker {
    /// Minimum LCP since the last occurrence of each symbol.
    lci_min: Vec<LcpValue>,
    lci_seen: Vec<bool>,
    /// Minimum LCP since the insertion that opened each symbol's LSI.
    lsi_min: Vec<LcpValue>,
    lsi_owner: Vec<u32>,
    open_successors: usize,
}

const NO_OWNER: u32 = u32::MAX;

impl IntervalTracker {
    const CELL_BYTES: usize =
        std::mem::size_of::<LcpValue>() + std::mem::size_of::<bool>() + std::mem::size_of::<u32>();

    fn new(sigma1: usize) -> Self {
        IntervalTracker {
            lci_min: vec![LcpValue::MAX; sigma1],
            lci_seen: vec![false; sigma1],
            lsi_min: vec![LcpValue::MAX; sigma1],
            lsi_owner: vec![NO_OWNER; sigma1],
            open_successors: 0,
        }
    }

    /// Accounts for a record written with `lcp` and symbol `symbol`. Closes
    /// the symbol's pending successive interval, if any.
    #[inline]
    fn observe(&mut self, symbol: SymbolCode, lcp: LcpValue, slots: &mut [Slot]) {
        for m in self.lci_min.iter_mut() {
            *m = (*m).min(lcp);
        }
        for m in self.lsi_min.iter_mut() {
            *m = (*m).min(lcp);
        }
        let x = symbol.index();
        let owner = std::mem::replace(&mut self.lsi_owner[x], NO_OWNER);
        if owner != NO_OWNER {
            slots[owner as usize].lcp_next = self.lsi_min[x] + 1;
            self.open_successors -= 1;
        }
    }

    /// Closes the current interval ending at an inserted `symbol` and
    /// returns the LCP the extended suffix has with its predecessor.
    #[inline]
    fn close_current(&self, symbol: SymbolCode) -> LcpValue {
        let x = symbol.index();
        if self.lci_seen[x] {
            self.lci_min[x] + 1
        } else {
            1
        }
    }

    #[inline]
    fn open_successor(&mut self, symbol: SymbolCode, owner: usize) {
        let x = symbol.index();
        debug_assert_eq!(self.lsi_owner[x], NO_OWNER);
        self.lsi_owner[x] = owner as u32;
        self.lsi_min[x] = LcpValue::MAX;
        self.open_successors += 1;
    }

    /// Starts a new current interval after an occurrence of `symbol`.
    #[inline]
    fn mark_seen(&mut self, symbol: SymbolCode) {
        let x = symbol.index();
        self.lci_seen[x] = true;
        self.lci_min[x] = LcpValue::MAX;
    }

    /// Successive intervals still open at the end of the segment have no
    /// closing occurrence.
    fn finish(self, slots: &mut [Slot]) {
        for owner in self.lsi_owner {
            if owner != NO_OWNER {
                slots[owner as usize].lcp_next = 1;
            }
        }
    }
}

/// Writes generation 0 and returns the initial arrays.
///
/// `B_0(0)` holds the last symbol of every string in input order and
/// `L_0(0)` is all zeros; every other segment is empty.
pub fn init_iteration0(c: &SequenceCollection, writer: &mut GenerationWriter) -> Result<IterationArrays> {
    let m = c.len();
    let mut slots = Vec::with_capacity(m);
    let mut pending = Vec::with_capacity(m);
    for (i, s) in c.iter().enumerate() {
        let last = *s.last().expect("validated strings are non-empty");
        writer.append_with_gsa(0, SegmentRecord::new(last, 0), GsaEntry::new(s.len() as u32, i as u32))?;
        pending.push(last);
        slots.push(Slot {
            seq: i as u32,
            segment: 0,
            pos: i as u64 + 1,
            lcp_prev: 1,
            lcp_next: 1,
        });
    }
    Ok(IterationArrays { slots, pending })
}

/// Phase 1 of iteration `j`: computes each live string's destination segment
/// and position in generation `j` from its position in generation `j - 1`,
/// then loads the symbols to insert.
///
/// `arrays` must be sorted by `(segment, pos)`; the scan over `B_{j-1}` is a
/// single forward pass.
pub fn phase1_positions(
    arrays: &mut IterationArrays,
    reader: &GenerationReader,
    iteration: usize,
    c: &SequenceCollection,
) -> Result<OccurrenceTable> {
    let sigma = reader.meta().sigma;
    let mut table = OccurrenceTable::new(sigma);
    let IterationArrays { slots, pending } = arrays;
    let mut next = 0;
    for v in 0..=sigma {
        if next == slots.len() {
            break;
        }
        let mut cursor = reader.symbols(v)?;
        let mut counts = vec![0u64; sigma + 1];
        while let Some(slot) = slots.get_mut(next).filter(|s| s.segment as usize == v) {
            let t = slot.pos;
            if t <= cursor.position() || t > cursor.len() {
                return Err(Error::InconsistentState(format!(
                    "iteration {iteration}: position {t} of sequence {} invalid in segment {v} \
                     (length {}, scanned {})",
                    slot.seq,
                    cursor.len(),
                    cursor.position()
                )));
            }
            cursor.advance_counting(t - 1 - cursor.position(), &mut counts)?;
            let symbol = cursor.next_symbol()?.expect("position checked against length");
            counts[symbol.index()] += 1;
            let expected = pending[slot.seq as usize];
            if symbol != expected || symbol.is_marker() {
                return Err(Error::InconsistentState(format!(
                    "iteration {iteration}: sequence {} expected symbol {} at {v}:{t}, found {}",
                    slot.seq, expected.0, symbol.0
                )));
            }
            let z = symbol.index();
            slot.pos = table.preceding(v, z) + counts[z];
            slot.segment = symbol.0;
            next += 1;
        }
        cursor.count_rest(&mut counts)?;
        table.row_mut(v).copy_from_slice(&counts);
    }
    if next != slots.len() {
        return Err(Error::InconsistentState(format!(
            "iteration {iteration}: {} slots not in segment order",
            slots.len() - next
        )));
    }
    for slot in slots.iter() {
        let s = c.seq(slot.seq as usize);
        pending[slot.seq as usize] = if s.len() > iteration {
            s[s.len() - iteration - 1]
        } else {
            SymbolCode::MARKER
        };
    }
    Ok(table)
}

/// Co-sorts the arrays by `(segment, pos, seq)`.
pub fn sort_arrays(arrays: &mut IterationArrays) {
    arrays
        .slots
        .sort_unstable_by_key(|s| (s.segment, s.pos, s.seq));
}

/// Phase 2 of iteration `j`: merges generation `j - 1` with the new symbols
/// into generation `j` and fills in the predecessor/successor LCP values the
/// next iteration needs.
pub fn phase2_merge(
    arrays: &mut IterationArrays,
    reader: &GenerationReader,
    writer: &mut GenerationWriter,
    iteration: usize,
    c: &SequenceCollection,
    parallel: bool,
) -> Result<()> {
    let IterationArrays { slots, pending } = arrays;
    let pending: &[SymbolCode] = pending;
    let sigma = reader.meta().sigma;
    if writer.segments_mut().len() != sigma + 1 {
        return Err(Error::InconsistentState("writer and reader disagree on sigma".into()));
    }

    // Partition the sorted slots by destination segment.
    let mut parts: Vec<&mut [Slot]> = Vec::with_capacity(sigma + 1);
    let mut rest: &mut [Slot] = slots;
    for h in 0..=sigma {
        let n = rest.iter().take_while(|s| s.segment as usize == h).count();
        let (head, tail) = rest.split_at_mut(n);
        parts.push(head);
        rest = tail;
    }
    if !rest.is_empty() {
        return Err(Error::InconsistentState("slots are not sorted by segment".into()));
    }

    let tasks = parts.into_iter().zip(writer.segments_mut().iter_mut());
    if parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = tasks
                .map(|(part, out)| {
                    scope.spawn(move || {
                        let src = reader.records(out.segment())?;
                        merge_segment(part, pending, src, out, iteration, c, sigma)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("segment merge panicked"))
                .collect::<Result<Vec<()>>>()
        })?;
    } else {
        for (part, out) in tasks {
            let src = reader.records(out.segment())?;
            merge_segment(part, pending, src, out, iteration, c, sigma)?;
        }
    }
    Ok(())
}

/// Merges one segment. `slots` are the insertions into this segment, sorted
/// by position.
fn merge_segment(
    slots: &mut [Slot],
    pending: &[SymbolCode],
    mut src: RecordCursor,
    out: &mut SegmentWriter,
    iteration: usize,
    c: &SequenceCollection,
    sigma: usize,
) -> Result<()> {
    let mut tracker = IntervalTracker::new(sigma + 1);
    let with_gsa = out.has_gsa();
    let mut written: u64 = 0;
    let mut next = 0;
    // successor LCP owed to the record right after an insertion
    let mut carry: Option<LcpValue> = None;

    loop {
        if let Some(slot) = slots.get(next).copied().filter(|s| s.pos == written + 1) {
            let seq = slot.seq as usize;
            let symbol = pending[seq];
            let lcp = if slot.pos == 1 { 0 } else { slot.lcp_prev };
            let rec = SegmentRecord::new(symbol, lcp);
            if with_gsa {
                let pos = (c.seq_len(seq) - iteration) as u32;
                out.push_with_gsa(rec, GsaEntry::new(pos, slot.seq))?;
            } else {
                out.push(rec)?;
            }
            written += 1;
            carry = Some(slot.lcp_next);

            tracker.observe(symbol, lcp, slots);
            slots[next].lcp_prev = tracker.close_current(symbol);
            tracker.open_successor(symbol, next);
            tracker.mark_seen(symbol);
            next += 1;
            continue;
        }

        if next == slots.len() && carry.is_none() && tracker.open_successors == 0 {
            src.copy_rest(out)?;
            break;
        }

        match src.next_record()? {
            Some((mut rec, entry)) => {
                if let Some(v) = carry.take() {
                    rec.lcp = v;
                }
                match entry {
                    Some(e) => out.push_with_gsa(rec, e)?,
                    None => out.push(rec)?,
                }
                written += 1;
                tracker.observe(rec.symbol, rec.lcp, slots);
                tracker.mark_seen(rec.symbol);
            }
            None => {
                if let Some(slot) = slots.get(next) {
                    return Err(Error::InconsistentState(format!(
                        "iteration {iteration}: insertion at {} beyond segment {} end {}",
                        slot.pos,
                        out.segment(),
                        written + 1
                    )));
                }
                break;
            }
        }
    }
    tracker.finish(slots);
    Ok(())
}

/// Called after every sealed generation, before the previous one is removed.
pub trait IterationObserver {
    fn after_iteration(
        &mut self,
        iteration: usize,
        generation: &GenerationReader,
        arrays: &IterationArrays,
    ) -> Result<()>;
}

impl IterationObserver for () {
    fn after_iteration(&mut self, _: usize, _: &GenerationReader, _: &IterationArrays) -> Result<()> {
        Ok(())
    }
}

impl<F> IterationObserver for F
where
    F: FnMut(usize, &GenerationReader, &IterationArrays) -> Result<()>,
{
    fn after_iteration(
        &mut self,
        iteration: usize,
        generation: &GenerationReader,
        arrays: &IterationArrays,
    ) -> Result<()> {
        self(iteration, generation, arrays)
    }
}

/// Outcome of [`run`]. The final generation stays on disk until this is
/// dropped.
#[derive(Debug)]
pub struct RunSummary {
    workdir: tempfile::TempDir,
    pub meta: GenerationMeta,
    pub m: usize,
    pub total_len: usize,
    pub max_len: usize,
    pub peak_footprint: Footprint,
    pub elapsed: Duration,
}

/// Final BWT, LCP and optional suffix array, materialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BwtLcp {
    pub bwt: Vec<SymbolCode>,
    pub lcp: Vec<LcpValue>,
    pub gsa: Option<Vec<GsaEntry>>,
}

impl RunSummary {
    pub fn dir(&self) -> &Path {
        self.workdir.path()
    }

    /// Reader over the final generation; its segments concatenated in order
    /// are the BWT, LCP and suffix-array streams.
    pub fn reader(&self) -> Result<GenerationReader> {
        open_generation_reader(self.dir(), self.meta.iteration)
    }

    pub fn to_vecs(&self) -> Result<BwtLcp> {
        let reader = self.reader()?;
        let mut out = BwtLcp {
            bwt: Vec::with_capacity(self.total_len),
            lcp: Vec::with_capacity(self.total_len),
            gsa: self.meta.gsa.then(|| Vec::with_capacity(self.total_len)),
        };
        for h in 0..=self.meta.sigma {
            let (b, l) = reader.read_segment(h)?;
            out.bwt.extend(b);
            out.lcp.extend(l);
            if let Some(g) = &mut out.gsa {
                g.extend(reader.read_gsa_segment(h)?);
            }
        }
        Ok(out)
    }
}

fn record_disk(probe: &Option<AccessLog>, dir: &Path, iteration: usize) -> Result<()> {
    if let Some(log) = probe {
        log.record(AccessEvent::OnDisk {
            after_iteration: iteration,
            generations: generations_on_disk(dir)?.into_iter().collect(),
        });
    }
    Ok(())
}

/// Runs every iteration over `c` and leaves the final generation on disk.
pub fn run(
    c: &SequenceCollection,
    config: &EngineConfig,
    observer: &mut dyn IterationObserver,
) -> Result<RunSummary> {
    let start = Instant::now();
    let sigma = c.alphabet().sigma();
    let max_len = c.max_len();
    let format = config.format(sigma);
    format.lcp_width.check(max_len)?;

    let workdir = tempfile::Builder::new()
        .prefix("bwtlcp-")
        .tempdir_in(&config.tmp_dir)
        .map_err(|e| Error::io(&config.tmp_dir, e))?;
    let dir = workdir.path().to_path_buf();

    let mut writer = open_generation_writer(&dir, 0, &format, max_len)?;
    let mut arrays = init_iteration0(c, &mut writer)?;
    let mut meta = writer.seal()?;
    let mut peak = arrays.footprint(sigma);
    record_disk(&config.probe, &dir, 0)?;
    observer.after_iteration(0, &open_generation_reader(&dir, 0)?, &arrays)?;

    for j in 1..=max_len {
        let mut reader = open_generation_reader(&dir, j - 1)?.with_buffer(config.buffer_bytes);
        if let Some(log) = &config.probe {
            reader = reader.with_probe(log.clone());
        }
        phase1_positions(&mut arrays, &reader, j, c)?;
        sort_arrays(&mut arrays);

        let mut writer = open_generation_writer(&dir, j, &format, max_len)?;
        phase2_merge(&mut arrays, &reader, &mut writer, j, c, config.parallel)?;
        drop(reader);
        meta = writer.seal()?;
        peak = peak.max(arrays.footprint(sigma));

        record_disk(&config.probe, &dir, j)?;
        observer.after_iteration(j, &open_generation_reader(&dir, j)?, &arrays)?;
        swap_generations(&dir, j)?;
        arrays.retire(j, c);
    }
    record_disk(&config.probe, &dir, max_len)?;

    Ok(RunSummary {
        workdir,
        meta,
        m: c.len(),
        total_len: c.total_len(),
        max_len,
        peak_footprint: peak,
        elapsed: start.elapsed(),
    })
}

/// Builds BWT, LCP and (optionally) the suffix array in a scratch directory
/// and returns them in memory.
pub fn build(c: &SequenceCollection, emit_gsa: bool) -> Result<BwtLcp> {
    let config = EngineConfig {
        lcp_width: LcpWidth::narrowest(c.max_len()),
        emit_gsa,
        ..EngineConfig::default()
    };
    run(c, &config, &mut ())?.to_vecs()
}
