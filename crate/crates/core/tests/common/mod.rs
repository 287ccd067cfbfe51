#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use bwtlcp::cli::SynthSpec;
use bwtlcp::engine::{IterationArrays, IterationObserver, Slot};
use bwtlcp::oracle;
use bwtlcp::segio::{open_generation_reader, AccessEvent, GenerationReader, Stream};
use bwtlcp::{validate_collection, Alphabet, BwtLcp, GsaEntry, LcpValue, SequenceCollection, SymbolCode};
use rand::Rng;

pub const GOLDEN: [&str; 2] = ["ACACTGTACCAAC", "GAACAGAAAGCTC"];

pub fn golden() -> SequenceCollection {
    validate_collection(&GOLDEN, &Alphabet::parse("ACGT").unwrap()).unwrap()
}

pub fn alphabet(sigma: usize) -> Alphabet {
    SynthSpec {
        seed: 0,
        m: 1,
        len: 1,
        sigma,
    }
    .alphabet()
    .unwrap()
}

/// Mixed-length random collection over the first `sigma` symbols.
pub fn random_collection(
    rng: &mut impl Rng,
    m: std::ops::RangeInclusive<usize>,
    len: std::ops::RangeInclusive<usize>,
    sigma: usize,
) -> SequenceCollection {
    let a = alphabet(sigma);
    let count = rng.gen_range(m);
    let raw: Vec<Vec<u8>> = (0..count)
        .map(|_| {
            let l = rng.gen_range(len.clone());
            (0..l).map(|_| a.symbols()[rng.gen_range(0..sigma)]).collect()
        })
        .collect();
    validate_collection(&raw, &a).unwrap()
}

pub type Segments = Vec<(Vec<SymbolCode>, Vec<LcpValue>)>;

pub fn read_segments(gen: &GenerationReader) -> Segments {
    (0..=gen.meta().sigma).map(|h| gen.read_segment(h).unwrap()).collect()
}

/// First m entries zero and every entry bounded by the shorter adjacent
/// suffix (symbols only).
pub fn check_final_bounds(c: &SequenceCollection, out: &BwtLcp) -> Result<(), String> {
    let gsa = match &out.gsa {
        Some(g) => g.clone(),
        None => oracle::build_gsa(c),
    };
    let m = c.len();
    if let Some(i) = out.lcp[..m].iter().position(|&v| v != 0) {
        return Err(format!("lcp[{i}] = {} among the first m", out.lcp[i]));
    }
    let suffix_len = |e: GsaEntry| c.seq_len(e.seq as usize) - e.pos as usize;
    for i in 1..out.lcp.len() {
        let bound = suffix_len(gsa[i - 1]).min(suffix_len(gsa[i]));
        if out.lcp[i] as usize > bound {
            return Err(format!("lcp[{i}] = {} exceeds {bound}", out.lcp[i]));
        }
    }
    Ok(())
}

/// Partial arrays after iteration `j`, from the oracle: every suffix of
/// length at most `j + 1`, markers included, split by first symbol.
pub fn expected_generation(c: &SequenceCollection, j: usize) -> (Segments, Vec<Vec<GsaEntry>>) {
    let sigma = c.alphabet().sigma();
    let mut entries: Vec<GsaEntry> = (0..c.len())
        .flat_map(|seq| {
            let l = c.seq_len(seq);
            (l.saturating_sub(j)..=l).map(move |pos| GsaEntry::new(pos as u32, seq as u32))
        })
        .collect();
    entries.sort_by(|&a, &b| oracle::compare_suffixes(c, a, b));
    let mut gsa = vec![Vec::new(); sigma + 1];
    for e in entries {
        let s = c.seq(e.seq as usize);
        let h = s.get(e.pos as usize).map_or(0, |x| x.index());
        gsa[h].push(e);
    }
    let segs = gsa
        .iter()
        .map(|g| (oracle::gsa_to_bwt(c, g), oracle::gsa_to_lcp(c, g)))
        .collect();
    (segs, gsa)
}

/// Checks every iteration of a run against the oracle: partial arrays,
/// interval values carried to the next iteration, how they are applied,
/// and that untouched records are copied through.
pub struct InvariantChecker<'a> {
    c: &'a SequenceCollection,
    prev: Vec<Option<Slot>>,
    pub prefix: bool,
    pub tracker_values: usize,
    pub failures: Vec<String>,
}

impl<'a> InvariantChecker<'a> {
    pub fn new(c: &'a SequenceCollection) -> Self {
        InvariantChecker {
            c,
            prev: vec![None; c.len()],
            prefix: true,
            tracker_values: 0,
            failures: Vec::new(),
        }
    }

    fn fail(&mut self, j: usize, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(format!("iteration {j}: {msg}"));
        }
    }

    fn check(&mut self, j: usize, gen: &GenerationReader, arrays: &IterationArrays) {
        let c = self.c;
        let segs = read_segments(gen);

        if self.prefix {
            let (expected, gsa) = expected_generation(c, j);
            for (h, (got, want)) in segs.iter().zip(&expected).enumerate() {
                if got != want {
                    self.fail(j, format!("segment {h}: got {got:?}, want {want:?}"));
                }
            }
            if gen.meta().gsa {
                for (h, want) in gsa.iter().enumerate() {
                    let got = gen.read_gsa_segment(h).unwrap();
                    if &got != want {
                        self.fail(j, format!("gsa segment {h}: got {got:?}, want {want:?}"));
                    }
                }
            }
        }

        if !arrays.is_sorted() {
            self.fail(j, "slots not sorted".into());
        }
        let inserted: HashSet<(u8, u64)> = arrays.slots().iter().map(|s| (s.segment, s.pos)).collect();

        for s in arrays.slots() {
            let seq = s.seq as usize;
            let l = c.seq_len(seq);
            let (bseg, lseg) = &segs[s.segment as usize];
            let r = s.pos as usize;
            let want = if j == l {
                SymbolCode::MARKER
            } else {
                c.seq(seq)[l - j - 1]
            };
            if bseg.get(r.wrapping_sub(1)) != Some(&want) {
                self.fail(j, format!("seq {seq}: slot ({}, {r}) does not hold its symbol", s.segment));
                continue;
            }

            if j >= 1 {
                if let Some(p) = self.prev[seq] {
                    let c_val = if r == 1 { 0 } else { p.lcp_prev };
                    if lseg[r - 1] != c_val {
                        self.fail(j, format!("seq {seq}: inserted lcp {} != {c_val}", lseg[r - 1]));
                    }
                    if r < lseg.len() && !inserted.contains(&(s.segment, s.pos + 1)) && lseg[r] != p.lcp_next {
                        self.fail(j, format!("seq {seq}: successor lcp {} != {}", lseg[r], p.lcp_next));
                    }
                } else {
                    self.fail(j, format!("seq {seq}: no carried values"));
                }
            }

            if l > j {
                let lci = oracle::lci(bseg, lseg, want, r).unwrap().extended_lcp();
                let lsi = oracle::lsi(bseg, lseg, want, r).unwrap().extended_lcp();
                if (s.lcp_prev, s.lcp_next) != (lci, lsi) {
                    self.fail(
                        j,
                        format!(
                            "seq {seq}: carried ({}, {}) != intervals ({lci}, {lsi})",
                            s.lcp_prev, s.lcp_next
                        ),
                    );
                }
                self.tracker_values += 2;
            }
        }

        if j >= 1 {
            let prev = read_segments(&open_generation_reader(gen.dir(), j - 1).unwrap());
            for (h, ((b, l), (pb, pl))) in segs.iter().zip(&prev).enumerate() {
                let mut kept_b = Vec::with_capacity(pb.len());
                let mut kept_l = Vec::with_capacity(pl.len());
                for i in 0..b.len() {
                    let pos = i as u64 + 1;
                    if inserted.contains(&(h as u8, pos)) {
                        continue;
                    }
                    kept_b.push(b[i]);
                    let after = i > 0 && inserted.contains(&(h as u8, pos - 1));
                    kept_l.push(if after { None } else { Some(l[i]) });
                }
                let copied = kept_l.iter().zip(pl).all(|(k, &v)| k.map_or(true, |k| k == v));
                if &kept_b != pb || kept_l.len() != pl.len() || !copied {
                    self.fail(j, format!("segment {h}: records not copied through"));
                }
            }
        }

        self.prev.iter_mut().for_each(|p| *p = None);
        for s in arrays.slots() {
            self.prev[s.seq as usize] = Some(*s);
        }
    }
}

impl IterationObserver for InvariantChecker<'_> {
    fn after_iteration(
        &mut self,
        iteration: usize,
        generation: &GenerationReader,
        arrays: &IterationArrays,
    ) -> bwtlcp::Result<()> {
        self.check(iteration, generation, arrays);
        Ok(())
    }
}

/// Streaming contract over a probe log: per generation read, each segment
/// stream opened at most twice with strictly increasing offsets per pass,
/// and at most two generations on disk at any checkpoint.
pub fn check_access_log(events: &[AccessEvent], max_len: usize) -> Result<(), String> {
    let mut opens: BTreeMap<(usize, Stream, usize), usize> = BTreeMap::new();
    let mut passes = 0;
    let mut checkpoints = 0;
    for e in events {
        match e {
            AccessEvent::Open {
                iteration,
                stream,
                segment,
            } => {
                let n = opens.entry((*iteration, *stream, *segment)).or_default();
                *n += 1;
                if *n > 2 {
                    return Err(format!("generation {iteration} {stream:?}({segment}) opened {n} times"));
                }
            }
            AccessEvent::Pass {
                iteration,
                stream,
                segment,
                offsets,
            } => {
                passes += 1;
                if let Some(w) = offsets.windows(2).find(|w| w[0] >= w[1]) {
                    return Err(format!(
                        "generation {iteration} {stream:?}({segment}) read {} after {}",
                        w[1], w[0]
                    ));
                }
            }
            AccessEvent::OnDisk {
                after_iteration,
                generations,
            } => {
                checkpoints += 1;
                if generations.len() > 2 {
                    return Err(format!("after iteration {after_iteration}: generations {generations:?}"));
                }
            }
        }
    }
    if let Some(g) = opens.keys().map(|k| k.0).find(|&g| g >= max_len) {
        return Err(format!("generation {g} read although it is final"));
    }
    if passes == 0 || checkpoints == 0 {
        return Err("probe recorded nothing".into());
    }
    Ok(())
}
