//! Dense statevector simulator.
//!
//! Index convention is little-endian throughout: qubit i is bit i of the
//! amplitude index. X-family gates are applied as amplitude swaps over the
//! matched control pattern, enumerating only the free bits, so an MCX with
//! many controls touches exactly the pairs it permutes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::revcomp::circuit::{Gate, ReversibleCircuit};
use crate::rng::SeededRng;
use crate::source::PureQubitState;

/// Default ceiling on simulated qubits; 2^24 amplitudes = 256 MiB.
pub const DEFAULT_QUBIT_CAP: u32 = 24;

const NORM_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct StateVector {
    width: u32,
    amps: Vec<Complex64>,
}

/// Outcome of reading a subset of qubits, bit j of the record = qubit
/// `qubits[j]`.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub qubits: Vec<u32>,
    pub outcome: Vec<bool>,
    pub probability: f64,
}

impl MeasurementRecord {
    pub fn outcome_u64(&self) -> u64 {
        self.outcome
            .iter()
            .enumerate()
            .fold(0, |acc, (j, b)| acc | (*b as u64) << j)
    }
}

pub fn check_capacity(width: u32, cap: u32) -> Result<()> {
    if width > cap {
        return Err(Error::Capacity(format!(
            "{width} qubits exceeds the simulator cap of {cap}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// |0...0⟩ on `width` qubits. Width 0 is the scalar state with one
    /// amplitude.
    pub fn new_zero(width: u32, cap: u32) -> Result<Self> {
        check_capacity(width, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << width];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { width, amps })
    }

    pub fn from_amplitudes(width: u32, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << width {
            return Err(Error::Input(format!(
                "{} amplitudes for width {width}",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Input(format!(
                "state norm² = {norm}, more than {NORM_TOL} from 1"
            )));
        }
        Ok(StateVector { width, amps })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Tensor product of independent qubit states on qubits 0..k, padded
    /// with |0⟩ on `extra_zero_qubits` above them.
    pub fn prepare_product(
        states: &[PureQubitState],
        extra_zero_qubits: u32,
        cap: u32,
    ) -> Result<Self> {
        let n = states.len() as u32;
        let width = n + extra_zero_qubits;
        check_capacity(width, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << width];
        for idx in 0..1u64 << n {
            let mut a = Complex64::new(1.0, 0.0);
            for (j, s) in states.iter().enumerate() {
                a *= s.amp[(idx >> j & 1) as usize];
            }
            amps[idx as usize] = a;
        }
        Ok(StateVector { width, amps })
    }

    /// Same state on `extra` additional qubits above the current ones, all
    /// initialized to |0⟩.
    pub fn extend_with_zeros(&self, extra: u32, cap: u32) -> Result<StateVector> {
        let width = self.width + extra;
        check_capacity(width, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << width];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        Ok(StateVector { width, amps })
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        if gate.max_qubit() >= self.width {
            return Err(Error::Input(format!(
                "gate touches qubit {} on a {}-qubit state",
                gate.max_qubit(),
                self.width
            )));
        }
        match gate {
            Gate::X { target } => self.flip(&[], *target),
            Gate::Cx { control, target } => self.flip(&[(*control, true)], *target),
            Gate::Ccx { c1, c2, target } => self.flip(&[(*c1, true), (*c2, true)], *target),
            Gate::Mcx { controls, target } => self.flip(controls, *target),
            Gate::U1 { qubit, matrix } => self.rotate(*qubit, matrix)?,
        }
        Ok(())
    }

    /// Swap amplitude pairs (pattern, pattern | target) for every index
    /// matching the control pattern, walking submasks of the free bits.
    fn flip(&mut self, controls: &[(u32, bool)], target: u32) {
        let tbit = 1u64 << target;
        let mut fixed = tbit;
        let mut base = 0u64;
        for (q, pol) in controls {
            fixed |= 1 << q;
            if *pol {
                base |= 1 << q;
            }
        }
        let free = !fixed & ((1u64 << self.width) - 1);
        let mut s = 0u64;
        loop {
            let i0 = (base | s) as usize;
            self.amps.swap(i0, i0 | tbit as usize);
            if s == free {
                break;
            }
            s = s.wrapping_sub(free) & free;
        }
    }

    fn rotate(&mut self, qubit: u32, matrix: &[[Complex64; 2]; 2]) -> Result<()> {
        check_unitary(matrix)?;
        let tbit = 1u64 << qubit;
        let free = !tbit & ((1u64 << self.width) - 1);
        let mut s = 0u64;
        loop {
            let i0 = s as usize;
            let i1 = (s | tbit) as usize;
            let (a, b) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = matrix[0][0] * a + matrix[0][1] * b;
            self.amps[i1] = matrix[1][0] * a + matrix[1][1] * b;
            if s == free {
                break;
            }
            s = s.wrapping_sub(free) & free;
        }
        Ok(())
    }

    /// Run every gate of the circuit in order. Measure lines are data for
    /// explicit measurement, never applied here.
    pub fn apply_circuit(&mut self, circuit: &ReversibleCircuit) -> Result<()> {
        if circuit.width != self.width {
            return Err(Error::Input(format!(
                "circuit width {} does not match state width {}",
                circuit.width, self.width
            )));
        }
        circuit.validate()?;
        for g in &circuit.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Marginal distribution over the listed qubits; entry k is the
    /// probability of outcome k with bit j of k read from `qubits[j]`.
    pub fn outcome_distribution(&self, qubits: &[u32]) -> Result<Vec<f64>> {
        self.check_subset(qubits)?;
        let mut dist = vec![0.0f64; 1usize << qubits.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut k = 0usize;
            for (j, q) in qubits.iter().enumerate() {
                k |= (idx >> q & 1) << j;
            }
            dist[k] += p;
        }
        Ok(dist)
    }

    /// Sample the subset per Born rule and project the state onto the
    /// observed outcome, renormalized. Deterministic for a given rng state.
    pub fn measure_subset(
        &mut self,
        qubits: &[u32],
        rng: &mut SeededRng,
    ) -> Result<MeasurementRecord> {
        let dist = self.outcome_distribution(qubits)?;
        let r = rng.next_f64();
        let mut acc = 0.0;
        let mut picked = dist.len() - 1;
        for (k, p) in dist.iter().enumerate() {
            if *p == 0.0 {
                continue;
            }
            acc += p;
            if r < acc {
                picked = k;
                break;
            }
        }
        let probability = dist[picked];
        self.project(qubits, picked as u64, probability);
        Ok(MeasurementRecord {
            qubits: qubits.to_vec(),
            outcome: (0..qubits.len()).map(|j| picked >> j & 1 == 1).collect(),
            probability,
        })
    }

    fn project(&mut self, qubits: &[u32], outcome: u64, probability: f64) {
        let scale = 1.0 / probability.sqrt();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            let matches = qubits
                .iter()
                .enumerate()
                .all(|(j, q)| (idx >> q & 1) as u64 == outcome >> j & 1);
            if matches {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Restrict to the contiguous qubit range [keep_lo, keep_lo+keep_len)
    /// with every other qubit pinned to the bit listed for it in `fixed`.
    /// Returns the probability mass on that slice and the renormalized
    /// reduced state.
    pub fn extract_slice(
        &self,
        keep_lo: u32,
        keep_len: u32,
        fixed: &[(u32, bool)],
    ) -> Result<(f64, StateVector)> {
        if keep_lo + keep_len > self.width {
            return Err(Error::Input(format!(
                "slice [{keep_lo}, {}) outside width {}",
                keep_lo + keep_len,
                self.width
            )));
        }
        let mut covered = vec![false; self.width as usize];
        for q in keep_lo..keep_lo + keep_len {
            covered[q as usize] = true;
        }
        let mut fixed_bits = 0u64;
        for (q, b) in fixed {
            if *q >= self.width || covered[*q as usize] {
                return Err(Error::Input(format!(
                    "fixed qubit {q} is out of range or inside the kept slice"
                )));
            }
            covered[*q as usize] = true;
            if *b {
                fixed_bits |= 1 << q;
            }
        }
        if covered.iter().any(|c| !c) {
            return Err(Error::Input(
                "every qubit outside the kept slice needs a fixed value".into(),
            ));
        }
        let mut sub = vec![Complex64::new(0.0, 0.0); 1usize << keep_len];
        let mut mass = 0.0f64;
        for (k, slot) in sub.iter_mut().enumerate() {
            let idx = fixed_bits | (k as u64) << keep_lo;
            let a = self.amps[idx as usize];
            *slot = a;
            mass += a.norm_sqr();
        }
        if mass <= 0.0 {
            return Err(Error::Input(
                "no probability mass on the requested slice".into(),
            ));
        }
        let scale = 1.0 / mass.sqrt();
        for a in sub.iter_mut() {
            *a *= scale;
        }
        Ok((
            mass,
            StateVector {
                width: keep_len,
                amps: sub,
            },
        ))
    }

    fn check_subset(&self, qubits: &[u32]) -> Result<()> {
        for (i, q) in qubits.iter().enumerate() {
            if *q >= self.width {
                return Err(Error::Input(format!(
                    "qubit {q} outside width {}",
                    self.width
                )));
            }
            if qubits[..i].contains(q) {
                return Err(Error::Input(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }
}

/// ⟨a|b⟩ over equal widths.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.width != b.width {
        return Err(Error::Input(format!(
            "overlap of widths {} and {}",
            a.width, b.width
        )));
    }
    Ok(a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

fn check_unitary(m: &[[Complex64; 2]; 2]) -> Result<()> {
    // Largest entry of U†U - I.
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let mut v = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
            if i == j {
                v -= Complex64::new(1.0, 0.0);
            }
            worst = worst.max(v.norm());
        }
    }
    if worst > UNITARY_TOL {
        return Err(Error::Input(format!(
            "u1 matrix is not unitary (deviation {worst:.3e})"
        )));
    }
    Ok(())
}
