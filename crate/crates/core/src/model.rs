//! Domain vocabulary: alphabets, symbol codes, sequence collections and
//! suffix names.
//!
//! Strings are stored encoded: code `0` is the end marker and codes
//! `1..=sigma` are the alphabet symbols in increasing order. The end marker
//! itself is never stored; the suffix starting at `pos == len` is the marker
//! alone.

use std::fmt;

use crate::error::{Error, Result};

/// Length of a longest common prefix.
pub type LcpValue = u32;

/// Byte used when rendering the end marker as text.
pub const MARKER_CHAR: u8 = b'$';

/// Order-preserving integer code of a symbol; `0` is the end marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct SymbolCode(pub u8);

impl SymbolCode {
    pub const MARKER: SymbolCode = SymbolCode(0);

    #[inline]
    pub fn is_marker(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered alphabet `c_1 < c_2 < ... < c_sigma`, excluding the end marker.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    codes: [u8; 256],
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Alphabet")
            .field(&String::from_utf8_lossy(&self.symbols))
            .finish()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::dna()
    }
}

impl Alphabet {
    /// Builds an alphabet from strictly increasing symbol bytes.
    pub fn new(symbols: &[u8]) -> Result<Self> {
        if symbols.is_empty() || symbols.len() > 255 {
            return Err(Error::InvalidAlphabet(format!(
                "size {} outside 1..=255",
                symbols.len()
            )));
        }
        if let Some(w) = symbols.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidAlphabet(format!(
                "symbols not strictly increasing at {:?}",
                String::from_utf8_lossy(w)
            )));
        }
        if let Some(&b) = symbols
            .iter()
            .find(|&&b| b == MARKER_CHAR || b.is_ascii_whitespace() || b.is_ascii_lowercase())
        {
            return Err(Error::InvalidAlphabet(format!(
                "symbol {:?} is reserved",
                b as char
            )));
        }
        let mut codes = [0u8; 256];
        for (i, &b) in symbols.iter().enumerate() {
            codes[b as usize] = (i + 1) as u8;
        }
        Ok(Alphabet {
            symbols: symbols.to_vec(),
            codes,
        })
    }

    /// The default nucleotide alphabet `A < C < G < N < T`.
    pub fn dna() -> Self {
        Alphabet::new(b"ACGNT").expect("static alphabet")
    }

    /// Parses `dna` or an explicit list of symbols (sorted and deduplicated).
    pub fn parse(spec: &str) -> Result<Self> {
        if spec.eq_ignore_ascii_case("dna") {
            return Ok(Alphabet::dna());
        }
        let mut symbols: Vec<u8> = spec.bytes().map(|b| b.to_ascii_uppercase()).collect();
        symbols.sort_unstable();
        symbols.dedup();
        Alphabet::new(&symbols)
    }

    pub fn sigma(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    #[inline]
    pub fn encode(&self, byte: u8) -> Option<SymbolCode> {
        match self.codes[byte as usize] {
            0 => None,
            c => Some(SymbolCode(c)),
        }
    }

    /// Renders a code as a byte, the marker as `$`.
    #[inline]
    pub fn decode(&self, code: SymbolCode) -> Option<u8> {
        if code.is_marker() {
            Some(MARKER_CHAR)
        } else {
            self.symbols.get(code.index() - 1).copied()
        }
    }

    pub fn render(&self, codes: impl IntoIterator<Item = SymbolCode>) -> String {
        codes
            .into_iter()
            .map(|c| self.decode(c).unwrap_or(b'?') as char)
            .collect()
    }
}

/// One suffix of the collection: offset `pos` in sequence `seq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GsaEntry {
    pub pos: u32,
    pub seq: u32,
}

impl GsaEntry {
    pub fn new(pos: u32, seq: u32) -> Self {
        GsaEntry { pos, seq }
    }
}

/// Validated, encoded string collection. Input order is preserved because it
/// fixes the relative order of the end markers.
#[derive(Debug, Clone)]
pub struct SequenceCollection {
    alphabet: Alphabet,
    data: Vec<u8>,
    offsets: Vec<usize>,
    max_len: usize,
}

impl SequenceCollection {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of strings, `m`.
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length of the longest string, `K`.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Total length including one end marker per string, `N`.
    pub fn total_len(&self) -> usize {
        self.data.len() + self.len()
    }

    /// Encoded symbols of string `i`, without its end marker.
    #[inline]
    pub fn seq(&self, i: usize) -> &[SymbolCode] {
        let bytes = &self.data[self.offsets[i]..self.offsets[i + 1]];
        // SAFETY: SymbolCode is repr(transparent) over u8.
        unsafe { std::slice::from_raw_parts(bytes.as_ptr().cast(), bytes.len()) }
    }

    #[inline]
    pub fn seq_len(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[SymbolCode]> + '_ {
        (0..self.len()).map(move |i| self.seq(i))
    }

    /// Decoded text of string `i`.
    pub fn text(&self, i: usize) -> String {
        self.alphabet.render(self.seq(i).iter().copied())
    }
}

/// Validates raw strings against `alphabet`, preserving their order.
pub fn validate_collection<S: AsRef<[u8]>>(
    raw: &[S],
    alphabet: &Alphabet,
) -> Result<SequenceCollection> {
    let mut builder = CollectionBuilder::new(alphabet.clone());
    for s in raw {
        builder.push(s.as_ref())?;
    }
    builder.finish()
}

/// Incremental form of [`validate_collection`] for streamed inputs.
#[derive(Debug)]
pub struct CollectionBuilder {
    alphabet: Alphabet,
    data: Vec<u8>,
    offsets: Vec<usize>,
    max_len: usize,
}

impl CollectionBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        CollectionBuilder {
            alphabet,
            data: Vec::new(),
            offsets: vec![0],
            max_len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push(&mut self, s: &[u8]) -> Result<()> {
        let index = self.len();
        if s.is_empty() {
            return Err(Error::EmptyString { index });
        }
        if s.len() >= u32::MAX as usize {
            return Err(Error::CollectionTooLarge(format!(
                "string {index} has length {}",
                s.len()
            )));
        }
        self.data.reserve(s.len());
        for (offset, &b) in s.iter().enumerate() {
            match self.alphabet.encode(b) {
                Some(code) => self.data.push(code.0),
                None => {
                    self.data.truncate(self.offsets[index]);
                    return Err(Error::ForeignSymbol {
                        index,
                        offset,
                        symbol: b as char,
                    });
                }
            }
        }
        self.offsets.push(self.data.len());
        self.max_len = self.max_len.max(s.len());
        Ok(())
    }

    pub fn finish(self) -> Result<SequenceCollection> {
        if self.is_empty() {
            return Err(Error::EmptyCollection);
        }
        if self.len() >= u32::MAX as usize {
            return Err(Error::CollectionTooLarge(format!("{} strings", self.len())));
        }
        Ok(SequenceCollection {
            alphabet: self.alphabet,
            data: self.data,
            offsets: self.offsets,
            max_len: self.max_len,
        })
    }
}
