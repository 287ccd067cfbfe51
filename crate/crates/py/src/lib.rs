//! Python bindings for `bwtlcp`.

use std::path::PathBuf;

use bwtlcp::cli::{self, SynthSpec};
use bwtlcp::engine::{run, EngineConfig};
use bwtlcp::oracle::{self, Interval as RsInterval};
use bwtlcp::segio::LcpWidth;
use bwtlcp::{Error, GsaEntry, SymbolCode};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io { .. } => PyIOError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Alphabet", frozen, from_py_object)]
#[derive(Clone)]
struct Alphabet(bwtlcp::Alphabet);

#[pymethods]
impl Alphabet {
    #[new]
    #[pyo3(signature = (spec = "dna"))]
    fn new(spec: &str) -> PyResult<Self> {
        bwtlcp::Alphabet::parse(spec).map(Alphabet).map_err(to_py)
    }

    #[getter]
    fn sigma(&self) -> usize {
        self.0.sigma()
    }

    #[getter]
    fn symbols(&self) -> String {
        String::from_utf8_lossy(self.0.symbols()).into_owned()
    }

    fn __repr__(&self) -> String {
        format!("Alphabet({:?})", self.symbols())
    }
}

#[pyclass(name = "SequenceCollection", frozen)]
struct SequenceCollection(bwtlcp::SequenceCollection);

#[pymethods]
impl SequenceCollection {
    #[new]
    #[pyo3(signature = (strings, alphabet = None))]
    fn new(strings: Vec<String>, alphabet: Option<Alphabet>) -> PyResult<Self> {
        let alphabet = alphabet.map_or_else(bwtlcp::Alphabet::dna, |a| a.0);
        let upper: Vec<String> = strings.iter().map(|s| s.to_ascii_uppercase()).collect();
        bwtlcp::validate_collection(&upper, &alphabet)
            .map(SequenceCollection)
            .map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn max_len(&self) -> usize {
        self.0.max_len()
    }

    #[getter]
    fn total_len(&self) -> usize {
        self.0.total_len()
    }

    #[getter]
    fn alphabet(&self) -> Alphabet {
        Alphabet(self.0.alphabet().clone())
    }

    fn text(&self, index: usize) -> PyResult<String> {
        if index >= self.0.len() {
            return Err(PyValueError::new_err(format!("no string {index}")));
        }
        Ok(self.0.text(index))
    }
}

/// Final BWT (with `$` for the end marker), LCP array and optional suffix
/// array as `(pos, seq)` pairs.
#[pyclass(name = "BwtLcp", frozen, get_all)]
struct BwtLcp {
    bwt: String,
    lcp: Vec<u32>,
    gsa: Option<Vec<(u32, u32)>>,
}

#[pymethods]
impl BwtLcp {
    fn __repr__(&self) -> String {
        format!("BwtLcp(bwt={:?}, lcp={:?})", self.bwt, self.lcp)
    }
}

fn pairs(gsa: &[GsaEntry]) -> Vec<(u32, u32)> {
    gsa.iter().map(|e| (e.pos, e.seq)).collect()
}

/// Builds BWT and LCP with the external-memory engine.
#[pyfunction]
#[pyo3(signature = (collection, emit_gsa = false, lcp_width = None, tmp_dir = None, parallel = false))]
fn build(
    py: Python<'_>,
    collection: &SequenceCollection,
    emit_gsa: bool,
    lcp_width: Option<usize>,
    tmp_dir: Option<PathBuf>,
    parallel: bool,
) -> PyResult<BwtLcp> {
    let c = &collection.0;
    let lcp_width = match lcp_width {
        Some(w) => LcpWidth::from_bytes(w).map_err(to_py)?,
        None => LcpWidth::narrowest(c.max_len()),
    };
    let config = EngineConfig {
        tmp_dir: tmp_dir.unwrap_or_else(std::env::temp_dir),
        lcp_width,
        emit_gsa,
        parallel,
        ..EngineConfig::default()
    };
    let out = py
        .detach(|| run(c, &config, &mut ()).and_then(|s| s.to_vecs()))
        .map_err(to_py)?;
    Ok(BwtLcp {
        bwt: c.alphabet().render(out.bwt),
        lcp: out.lcp,
        gsa: out.gsa.as_deref().map(pairs),
    })
}

/// Naive in-memory reference construction.
#[pyfunction]
fn oracle_build(collection: &SequenceCollection) -> BwtLcp {
    let c = &collection.0;
    let out = oracle::build(c);
    BwtLcp {
        bwt: c.alphabet().render(out.bwt),
        lcp: out.lcp,
        gsa: Some(pairs(&out.gsa)),
    }
}

#[pyclass(name = "Interval", frozen, get_all)]
struct Interval {
    degenerate: bool,
    start: Option<usize>,
    end: Option<usize>,
    min: Option<u32>,
    extended_lcp: u32,
}

impl From<RsInterval> for Interval {
    fn from(i: RsInterval) -> Self {
        let extended_lcp = i.extended_lcp();
        match i {
            RsInterval::Range { start, end, min } => Interval {
                degenerate: false,
                start: Some(start),
                end: Some(end),
                min: Some(min),
                extended_lcp,
            },
            RsInterval::Degenerate { .. } => Interval {
                degenerate: true,
                start: None,
                end: None,
                min: None,
                extended_lcp,
            },
        }
    }
}

fn encode_segment(alphabet: &Alphabet, bseg: &str, x: char) -> PyResult<(Vec<SymbolCode>, SymbolCode)> {
    let code = |b: u8| match b {
        b'$' => Ok(SymbolCode::MARKER),
        b => alphabet
            .0
            .encode(b.to_ascii_uppercase())
            .ok_or_else(|| PyValueError::new_err(format!("symbol {:?} not in alphabet", b as char))),
    };
    let codes = bseg.bytes().map(code).collect::<PyResult<Vec<_>>>()?;
    let x = u8::try_from(x).map_err(|_| PyValueError::new_err("symbol must be ASCII"))?;
    Ok((codes, code(x)?))
}

/// Current interval of `x` ending at 1-based position `r` of a segment.
#[pyfunction]
fn lci(alphabet: &Alphabet, bseg: &str, lseg: Vec<u32>, x: char, r: usize) -> PyResult<Interval> {
    let (b, x) = encode_segment(alphabet, bseg, x)?;
    oracle::lci(&b, &lseg, x, r).map(Interval::from).map_err(to_py)
}

/// Successive interval of `x` starting at 1-based position `r`.
#[pyfunction]
fn lsi(alphabet: &Alphabet, bseg: &str, lseg: Vec<u32>, x: char, r: usize) -> PyResult<Interval> {
    let (b, x) = encode_segment(alphabet, bseg, x)?;
    oracle::lsi(&b, &lseg, x, r).map(Interval::from).map_err(to_py)
}

/// Writes a seeded random line file of `m` strings of length `length`.
#[pyfunction]
fn synth(seed: u64, m: usize, length: usize, sigma: usize, path: PathBuf) -> PyResult<()> {
    let spec: SynthSpec = format!("{seed},{m},{length},{sigma}").parse().map_err(to_py)?;
    cli::synth(&spec, &path).map_err(to_py)
}

/// Runs the command-line front end with `args` and returns its exit code.
#[pyfunction]
fn main(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("bwtlcp".to_owned()).chain(args).collect();
    py.detach(|| cli::main_with_args(argv))
}

#[pymodule]
#[pyo3(name = "bwtlcp")]
fn bwtlcp_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Alphabet>()?;
    m.add_class::<SequenceCollection>()?;
    m.add_class::<BwtLcp>()?;
    m.add_class::<Interval>()?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_build, m)?)?;
    m.add_function(wrap_pyfunction!(lci, m)?)?;
    m.add_function(wrap_pyfunction!(lsi, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(main, m)?)?;
    Ok(())
}
