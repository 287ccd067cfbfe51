//! Naive in-memory reference: generalized suffix array by comparison sort,
//! BWT and LCP read off directly, plus the current/successive interval
//! queries over a single segment.
//!
//! Nothing here shares code with the engine; it exists to be obviously
//! correct, not fast.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{GsaEntry, LcpValue, SequenceCollection, SymbolCode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub gsa: Vec<GsaEntry>,
    pub bwt: Vec<SymbolCode>,
    pub lcp: Vec<LcpValue>,
}

/// Runs all three oracle constructions.
pub fn build(c: &SequenceCollection) -> OracleResult {
    let gsa = build_gsa(c);
    let bwt = gsa_to_bwt(c, &gsa);
    let lcp = gsa_to_lcp(c, &gsa);
    OracleResult { gsa, bwt, lcp }
}

/// Compares two suffixes; end markers sort below every symbol and among
/// themselves by sequence index.
pub fn compare_suffixes(c: &SequenceCollection, a: GsaEntry, b: GsaEntry) -> Ordering {
    let sa = &c.seq(a.seq as usize)[a.pos as usize..];
    let sb = &c.seq(b.seq as usize)[b.pos as usize..];
    let common = common_prefix(sa, sb);
    match (sa.get(common), sb.get(common)) {
        (Some(x), Some(y)) => x.cmp(y),
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (None, None) => a.seq.cmp(&b.seq),
    }
}

fn common_prefix(a: &[SymbolCode], b: &[SymbolCode]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub fn build_gsa(c: &SequenceCollection) -> Vec<GsaEntry> {
    let mut gsa: Vec<GsaEntry> = (0..c.len())
        .flat_map(|seq| (0..=c.seq_len(seq)).map(move |pos| GsaEntry::new(pos as u32, seq as u32)))
        .collect();
    gsa.sort_by(|&a, &b| compare_suffixes(c, a, b));
    gsa
}

/// Symbol circularly preceding each suffix; the marker precedes offset 0.
pub fn gsa_to_bwt(c: &SequenceCollection, gsa: &[GsaEntry]) -> Vec<SymbolCode> {
    gsa.iter()
        .map(|e| match e.pos {
            0 => SymbolCode::MARKER,
            p => c.seq(e.seq as usize)[p as usize - 1],
        })
        .collect()
}

/// LCP of each suffix with its predecessor; markers never match.
pub fn gsa_to_lcp(c: &SequenceCollection, gsa: &[GsaEntry]) -> Vec<LcpValue> {
    let mut lcp = Vec::with_capacity(gsa.len());
    if gsa.is_empty() {
        return lcp;
    }
    lcp.push(0);
    for w in gsa.windows(2) {
        let a = &c.seq(w[0].seq as usize)[w[0].pos as usize..];
        let b = &c.seq(w[1].seq as usize)[w[1].pos as usize..];
        lcp.push(common_prefix(a, b) as LcpValue);
    }
    lcp
}

/// Result of an interval query at 1-based position `r` of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interval {
    /// The half-open range `(start, end]` and the minimum LCP over it.
    Range {
        start: usize,
        end: usize,
        min: LcpValue,
    },
    /// No other occurrence of the symbol on that side; carries `lseg[r]`.
    Degenerate { value: LcpValue },
}

impl Interval {
    /// LCP value the interval implies for the extended suffix: `min + 1`, or
    /// 1 when there is no occurrence to compare with.
    pub fn extended_lcp(self) -> LcpValue {
        match self {
            Interval::Range { min, .. } => min + 1,
            Interval::Degenerate { .. } => 1,
        }
    }
}

fn check_position(bseg: &[SymbolCode], lseg: &[LcpValue], r: usize) -> Result<()> {
    if bseg.len() != lseg.len() {
        return Err(Error::InconsistentState(format!(
            "segment lengths differ: {} symbols, {} lcp values",
            bseg.len(),
            lseg.len()
        )));
    }
    if r == 0 || r > bseg.len() {
        return Err(Error::PositionOutOfRange {
            position: r,
            len: bseg.len(),
        });
    }
    Ok(())
}

fn range_min(lseg: &[LcpValue], start: usize, end: usize) -> LcpValue {
    // (start, end] in 1-based terms is lseg[start..end] 0-based.
    lseg[start..end].iter().copied().min().expect("non-empty range")
}

/// Current interval: from the previous occurrence of `x` before `r`.
pub fn lci(bseg: &[SymbolCode], lseg: &[LcpValue], x: SymbolCode, r: usize) -> Result<Interval> {
    check_position(bseg, lseg, r)?;
    match bseg[..r - 1].iter().rposition(|&b| b == x) {
        Some(i) => {
            let start = i + 1;
            Ok(Interval::Range {
                start,
                end: r,
                min: range_min(lseg, start, r),
            })
        }
        None => Ok(Interval::Degenerate { value: lseg[r - 1] }),
    }
}

/// Successive interval: up to the next occurrence of `x` after `r`.
pub fn lsi(bseg: &[SymbolCode], lseg: &[LcpValue], x: SymbolCode, r: usize) -> Result<Interval> {
    check_position(bseg, lseg, r)?;
    match bseg[r..].iter().position(|&b| b == x) {
        Some(i) => {
            let end = r + i + 1;
            Ok(Interval::Range {
                start: r,
                end,
                min: range_min(lseg, r, end),
            })
        }
        None => Ok(Interval::Degenerate { value: lseg[r - 1] }),
    }
}

/// Number of `x` in `bseg[1..=r]`.
pub fn rank(bseg: &[SymbolCode], x: SymbolCode, r: usize) -> usize {
    bseg[..r].iter().filter(|&&b| b == x).count()
}

/// 1-based position of the `p`-th occurrence of `x`, if any.
pub fn select(bseg: &[SymbolCode], p: usize, x: SymbolCode) -> Option<usize> {
    if p == 0 {
        return None;
    }
    bseg.iter()
        .enumerate()
        .filter(|(_, &b)| b == x)
        .nth(p - 1)
        .map(|(i, _)| i + 1)
}
