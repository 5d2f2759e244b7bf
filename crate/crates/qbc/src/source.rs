//! The i.i.d. qubit source: a mixture of single-qubit pure states, its
//! density matrix, eigendecomposition, entropies, and seeded sampling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Absolute tolerance for probabilities and norms supplied by the caller.
pub const TOL_INPUT: f64 = 1e-12;
/// Absolute tolerance after chains of floating arithmetic.
pub const TOL_ARITH: f64 = 1e-9;

/// A normalized single-qubit pure state (a0, a1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureQubitState {
    pub amp: [Complex64; 2],
}

impl PureQubitState {
    /// Strict constructor: |a0|^2 + |a1|^2 must be 1 within 1e-12.
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm2 = a0.norm_sqr() + a1.norm_sqr();
        if (norm2 - 1.0).abs() > 32.0 * TOL_INPUT {
            return Err(Error::Input(format!(
                "state amplitudes have squared norm {norm2}, expected 1"
            )));
        }
        Ok(PureQubitState { amp: [a0, a1] })
    }

    /// Lenient constructor used by the file parser: norm deviations up to
    /// 1e-6 are normalized away, anything larger is rejected.
    pub fn normalized(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Input(format!(
                "state amplitudes have norm {norm}, more than 1e-6 from 1"
            )));
        }
        Ok(PureQubitState {
            amp: [a0 / norm, a1 / norm],
        })
    }

    pub fn ket0() -> Self {
        PureQubitState {
            amp: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    pub fn ket1() -> Self {
        PureQubitState {
            amp: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn ket_plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureQubitState { amp: [h, h] }
    }

    /// Index of the dominant amplitude if this is a computational basis state
    /// within 1e-12, else None.
    pub fn basis_index(&self) -> Option<u8> {
        if self.amp[1].norm_sqr() <= TOL_INPUT {
            Some(0)
        } else if self.amp[0].norm_sqr() <= TOL_INPUT {
            Some(1)
        } else {
            None
        }
    }
}

/// Mixture of pure states with probabilities that sum to 1.
#[derive(Debug, Clone)]
pub struct QubitSource {
    entries: Vec<(f64, PureQubitState)>,
}

impl QubitSource {
    pub fn new(entries: Vec<(f64, PureQubitState)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Input("source has no entries".into()));
        }
        let mut sum = 0.0;
        for (i, (p, _)) in entries.iter().enumerate() {
            if *p < 0.0 || !p.is_finite() {
                return Err(Error::Input(format!(
                    "source entry {i}: probability {p} is not a probability"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 32.0 * TOL_INPUT {
            return Err(Error::Input(format!(
                "source probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(QubitSource { entries })
    }

    pub fn entries(&self) -> &[(f64, PureQubitState)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The average outer product sum_i p_i |a_i><a_i|.
    pub fn density_matrix(&self) -> DensityMatrix {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (p, s) in &self.entries {
            for (r, row) in m.iter_mut().enumerate() {
                for (c, cell) in row.iter_mut().enumerate() {
                    *cell += s.amp[r] * s.amp[c].conj() * *p;
                }
            }
        }
        DensityMatrix { m }
    }

    /// Draw `length` entry indices, i.i.d. by the entry probabilities.
    pub fn sample_sequence(&self, length: usize, seed: u64) -> Vec<usize> {
        let mut rng = SeededRng::new(seed);
        self.sample_sequence_with(length, &mut rng)
    }

    pub fn sample_sequence_with(&self, length: usize, rng: &mut SeededRng) -> Vec<usize> {
        (0..length).map(|_| self.sample_one(rng)).collect()
    }

    fn sample_one(&self, rng: &mut SeededRng) -> usize {
        let u = rng.next_f64();
        let mut acc = 0.0;
        for (i, (p, _)) in self.entries.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // Float shortfall at u ~ 1: fall back to the last entry.
        self.entries.len() - 1
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SourceFile = serde_json::from_str(text)
            .map_err(|e| Error::Input(format!("source file: {e}")))?;
        if file.states.is_empty() {
            return Err(Error::Input("source file: \"states\" is empty".into()));
        }
        let mut entries = Vec::with_capacity(file.states.len());
        for (i, st) in file.states.iter().enumerate() {
            let a0 = Complex64::new(st.amp[0][0], st.amp[0][1]);
            let a1 = Complex64::new(st.amp[1][0], st.amp[1][1]);
            let state = PureQubitState::normalized(a0, a1)
                .map_err(|e| Error::Input(format!("source file: states[{i}].amp: {e}")))?;
            entries.push((st.p, state));
        }
        QubitSource::new(entries).map_err(|e| Error::Input(format!("source file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let file = SourceFile {
            states: self
                .entries
                .iter()
                .map(|(p, s)| StateEntry {
                    p: *p,
                    amp: [
                        [s.amp[0].re, s.amp[0].im],
                        [s.amp[1].re, s.amp[1].im],
                    ],
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("source serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct SourceFile {
    states: Vec<StateEntry>,
}

#[derive(Serialize, Deserialize)]
struct StateEntry {
    p: f64,
    amp: [[f64; 2]; 2],
}

/// 2x2 Hermitian trace-1 positive matrix.
#[derive(Debug, Clone, Copy)]
pub struct DensityMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl DensityMatrix {
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let rho = DensityMatrix { m };
        rho.validate()?;
        Ok(rho)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.m;
        if m[0][0].im.abs() > 32.0 * TOL_INPUT || m[1][1].im.abs() > 32.0 * TOL_INPUT {
            return Err(Error::Input("density matrix diagonal is not real".into()));
        }
        if (m[0][1] - m[1][0].conj()).norm() > 32.0 * TOL_INPUT {
            return Err(Error::Input("density matrix is not Hermitian".into()));
        }
        let tr = m[0][0].re + m[1][1].re;
        if (tr - 1.0).abs() > 32.0 * TOL_INPUT {
            return Err(Error::Input(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let (_, q1) = self.eigenvalues();
        if q1 < -32.0 * TOL_INPUT {
            return Err(Error::Input(format!(
                "density matrix has negative eigenvalue {q1}"
            )));
        }
        Ok(())
    }

    /// Eigenvalues (descending) from the characteristic quadratic.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b2 = self.m[0][1].norm_sqr();
        let s = ((a - d) * (a - d) + 4.0 * b2).sqrt();
        let t = a + d;
        ((t + s) / 2.0, (t - s) / 2.0)
    }

    /// Deterministic eigendecomposition: eigenvalues descending, column j of
    /// the returned unitary is the eigenvector of eigenvalue j, each vector
    /// phased so its first nonzero component is real positive. A diagonal
    /// matrix gets the identity (or the swap when q1 dominates), so the
    /// degenerate case is stable.
    pub fn eigendecompose(&self) -> EigenBasis {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = self.m[0][1];
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);

        if b.norm() <= 1e-13 {
            // Treat as diagonal. Identity when the (0,0) entry dominates or
            // ties, otherwise the swap permutation.
            return if a >= d {
                EigenBasis {
                    eigenvalues: (a, d),
                    rotation: [[one, zero], [zero, one]],
                }
            } else {
                EigenBasis {
                    eigenvalues: (d, a),
                    rotation: [[zero, one], [one, zero]],
                }
            };
        }

        let (q0, q1) = self.eigenvalues();
        // (rho - q I) v = 0 is solved by v = (b, q - a) for either eigenvalue;
        // b != 0 here so the first component is nonzero and fixes the phase.
        let col = |q: f64| -> [Complex64; 2] {
            let v0 = b;
            let v1 = Complex64::new(q - a, 0.0);
            let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
            let phase = v0.conj() / v0.norm();
            [v0 * phase / norm, v1 * phase / norm]
        };
        let c0 = col(q0);
        let c1 = col(q1);
        EigenBasis {
            eigenvalues: (q0, q1),
            rotation: [[c0[0], c1[0]], [c0[1], c1[1]]],
        }
    }
}

/// Result of eigendecomposing a density matrix: descending eigenvalues and
/// the unitary whose columns are the matching eigenvectors.
#[derive(Debug, Clone, Copy)]
pub struct EigenBasis {
    pub eigenvalues: (f64, f64),
    pub rotation: [[Complex64; 2]; 2],
}

impl EigenBasis {
    /// R diag(q) R^dagger, for reconstruction checks.
    pub fn recompose(&self) -> [[Complex64; 2]; 2] {
        let r = &self.rotation;
        let (q0, q1) = self.eigenvalues;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = r[i][0] * q0 * r[j][0].conj() + r[i][1] * q1 * r[j][1].conj();
            }
        }
        out
    }
}

/// -sum p log2 p with the 0 log 0 = 0 convention; no input validation.
pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Shannon entropy in bits of a probability distribution.
pub fn shannon_entropy(dist: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        if p < 0.0 || !p.is_finite() {
            return Err(Error::Input(format!(
                "distribution entry {i} is {p}, expected a probability"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > TOL_ARITH {
        return Err(Error::Input(format!(
            "distribution sums to {sum}, expected 1"
        )));
    }
    Ok(entropy_bits(dist))
}

/// Von Neumann entropy in bits: Shannon entropy of the eigenvalues.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let (q0, q1) = rho.eigenvalues();
    entropy_bits(&[q0.max(0.0), q1.max(0.0)])
}
