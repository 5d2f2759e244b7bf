//! Python bindings for the block compression toolkit.
//!
//! Exposes the source model, codec construction, and compiled pipelines
//! as an importable `qbc_py` module, so experiments can be scripted from
//! Python without shelling out to the CLI:
//!
//!     import qbc_py
//!     src = qbc_py.Source([(0.9, (1, 0), (0, 0)), (0.1, (0, 0), (1, 0))])
//!     codec = qbc_py.Codec.optimal(src, 4, 3)
//!     pipe = qbc_py.Pipeline.compile(src, codec)
//!     print(pipe.exact_fidelity(src))

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qbc::codec::{self, BlockCodec};
use qbc::pipeline::{self, make_quantum_compression_circuit, Synthesis};
use qbc::qsim::DEFAULT_QUBIT_CAP;
use qbc::source::{von_neumann_entropy, PureQubitState, QubitSource};
use qbc::Error;

/// Bad arguments become ValueError; resource limits become RuntimeError.
fn to_py(e: Error) -> PyErr {
    match e {
        Error::Usage(_) | Error::Input(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_synthesis(text: &str) -> PyResult<Synthesis> {
    text.parse().map_err(to_py)
}

/// (probability, (re0, im0), (re1, im1)): one emitted state and its weight.
type SourceEntry = (f64, (f64, f64), (f64, f64));

/// An i.i.d. qubit source: a finite set of pure states with probabilities.
#[pyclass]
struct Source {
    inner: QubitSource,
}

#[pymethods]
impl Source {
    #[new]
    fn new(entries: Vec<SourceEntry>) -> PyResult<Self> {
        let entries = entries
            .into_iter()
            .map(|(p, a0, a1)| {
                let state = PureQubitState::new(
                    Complex64::new(a0.0, a0.1),
                    Complex64::new(a1.0, a1.1),
                )?;
                Ok((p, state))
            })
            .collect::<Result<Vec<_>, Error>>()
            .map_err(to_py)?;
        Ok(Self {
            inner: QubitSource::new(entries).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: QubitSource::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Von Neumann entropy of the per-symbol density matrix, in bits.
    fn entropy_bits(&self) -> f64 {
        von_neumann_entropy(&self.inner.density_matrix())
    }

    /// Density matrix eigenvalues, largest first.
    fn eigenvalues(&self) -> (f64, f64) {
        self.inner.density_matrix().eigenvalues()
    }

    fn __repr__(&self) -> String {
        format!("Source({} entries)", self.inner.entries().len())
    }
}

/// A classical block codec: encode n-bit blocks to m-bit codes and back.
#[pyclass]
struct Codec {
    inner: BlockCodec,
}

#[pymethods]
impl Codec {
    /// The probability-ranked codec for a source's eigenbasis at (n, m).
    #[staticmethod]
    fn optimal(source: &Source, n: u32, m: u32) -> PyResult<Self> {
        let q = source.inner.density_matrix().eigenvalues();
        Ok(Self {
            inner: BlockCodec::optimal_ranked(q, n, m).map_err(to_py)?,
        })
    }

    /// The enumerative codec keeping blocks of weight at most wmax.
    #[staticmethod]
    fn enumerative(n: u32, wmax: u32) -> PyResult<Self> {
        Ok(Self {
            inner: BlockCodec::enumerative(n, wmax).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: BlockCodec::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    fn encode(&self, x: u64) -> u64 {
        self.inner.encode(x)
    }

    fn decode(&self, c: u64) -> u64 {
        self.inner.decode(c)
    }

    /// True when decode(encode(x)) == x.
    fn is_lossless(&self, x: u64) -> bool {
        self.inner.is_lossless(x)
    }

    /// Probability that a block drawn in the source's eigenbasis is lossy.
    fn failure_probability(&self, source: &Source) -> PyResult<f64> {
        let q = source.inner.density_matrix().eigenvalues();
        codec::failure_probability(&self.inner, q).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Codec(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

/// A compiled compression pipeline: per-qubit rotation plus a reversible
/// encoder/decoder pair over input, code, and work registers.
#[pyclass]
struct Pipeline {
    inner: pipeline::CompressionPipeline,
}

#[pymethods]
impl Pipeline {
    /// Compile a codec against a source. synthesis is "table", "bennett",
    /// or "pebbled:M,K".
    #[staticmethod]
    #[pyo3(signature = (source, codec, synthesis = "table"))]
    fn compile(source: &Source, codec: &Codec, synthesis: &str) -> PyResult<Self> {
        let synthesis = parse_synthesis(synthesis)?;
        Ok(Self {
            inner: make_quantum_compression_circuit(
                &source.inner,
                &codec.inner,
                synthesis,
                DEFAULT_QUBIT_CAP,
            )
            .map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m
    }

    /// Total qubit count including work space.
    #[getter]
    fn width(&self) -> u32 {
        self.inner.width()
    }

    /// The measured circuit in the text format the CLI compiles to.
    fn circuit_text(&self) -> String {
        self.inner.full_circuit().to_text()
    }

    /// Gate and ancilla accounting as a JSON string.
    fn resources_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner.resource_report()).unwrap_or_default()
    }

    /// Exact expected fidelity of decompress(compress(block)).
    fn exact_fidelity(&self, source: &Source) -> PyResult<f64> {
        Ok(self.inner.exact_fidelity(&source.inner).map_err(to_py)?.fidelity)
    }

    /// Full exact-mode experiment report as a JSON string.
    fn exact_report_json(&self, source: &Source) -> PyResult<String> {
        let report = self.inner.exact_fidelity(&source.inner).map_err(to_py)?;
        serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Monte Carlo fidelity over seeded measurement trials.
    fn mc_fidelity(&self, source: &Source, trials: u64, seed: u64) -> PyResult<f64> {
        Ok(self
            .inner
            .mc_fidelity(&source.inner, trials, seed)
            .map_err(to_py)?
            .fidelity)
    }

    fn __repr__(&self) -> String {
        format!(
            "Pipeline(n={}, m={}, width={})",
            self.inner.n,
            self.inner.m,
            self.inner.width()
        )
    }
}

/// Smallest code length whose ranked codec keeps the lossy mass under delta.
#[pyfunction]
fn choose_code_length(source: &Source, n: u32, delta: f64) -> PyResult<u32> {
    let q = source.inner.density_matrix().eigenvalues();
    codec::choose_code_length(q, n, delta).map_err(to_py)
}

/// One experiment per block length; returns a JSON array of reports.
#[pyfunction]
#[pyo3(signature = (source, n_list, delta, synthesis = "table", seed = 0))]
fn sweep_json(
    source: &Source,
    n_list: Vec<u32>,
    delta: f64,
    synthesis: &str,
    seed: u64,
) -> PyResult<String> {
    let synthesis = parse_synthesis(synthesis)?;
    let reports = pipeline::sweep(
        &source.inner,
        &n_list,
        delta,
        synthesis,
        DEFAULT_QUBIT_CAP,
        seed,
    )
    .map_err(to_py)?;
    serde_json::to_string(&reports).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn qbc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Source>()?;
    m.add_class::<Codec>()?;
    m.add_class::<Pipeline>()?;
    m.add_function(wrap_pyfunction!(choose_code_length, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_json, m)?)?;
    Ok(())
}
