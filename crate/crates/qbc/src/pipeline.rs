//! End-to-end compression: compile a block codec into a quantum circuit,
//! then run compress/measure/decompress experiments against a qubit source.
//!
//! The compiled circuit rotates each input qubit into the source eigenbasis,
//! runs the reversible encoder followed by the reversible decoder (which
//! disentangles the input register on losslessly coded strings), and measures
//! the input register. The code register carries the compressed state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::codec::{self, BlockCodec};
use crate::error::{Error, Result};
use crate::qsim::{check_capacity, StateVector};
use crate::revcomp::circuit::{dagger, Gate, ReversibleCircuit};
use crate::revcomp::enumerative::staged_from_table;
use crate::revcomp::pebble::{pebble_schedule, scheduled_gates, PebbleSchedule};
use crate::revcomp::resources::{resource_report, resource_report_scheduled, ResourceReport};
use crate::revcomp::synth::{
    bennett_compile, bennett_drev, bool_circuit_from_table, compose_disentangled,
    synthesize_crev_from_table, synthesize_drev_from_table,
};
use crate::rng::SeededRng;
use crate::source::{von_neumann_entropy, PureQubitState, QubitSource};

/// Ceiling on k^n * 2^n for exact fidelity enumeration.
const EXACT_BUDGET: u64 = 1 << 22;
/// Ceiling on 2^n * gate count for the all-classical exact route.
const CLASSICAL_BUDGET: u64 = 500_000_000;
/// Trial count used when a sweep falls back to sampling.
const SWEEP_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Synthesis {
    Table,
    Bennett,
    Pebbled { chunks: u32, levels: u32 },
}

impl std::str::FromStr for Synthesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Synthesis::Table),
            "bennett" => Ok(Synthesis::Bennett),
            _ => {
                let params = s.strip_prefix("pebbled:").ok_or_else(|| {
                    Error::Usage(format!(
                        "unknown synthesis '{s}' (expected table, bennett, or pebbled:M,K)"
                    ))
                })?;
                let (m, k) = params.split_once(',').ok_or_else(|| {
                    Error::Usage(format!("pebbled synthesis needs two numbers, got '{params}'"))
                })?;
                let parse = |t: &str| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Usage(format!("bad pebble parameter '{t}'")))
                };
                Ok(Synthesis::Pebbled {
                    chunks: parse(m)?,
                    levels: parse(k)?,
                })
            }
        }
    }
}

impl std::fmt::Display for Synthesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Synthesis::Table => write!(f, "table"),
            Synthesis::Bennett => write!(f, "bennett"),
            Synthesis::Pebbled { chunks, levels } => write!(f, "pebbled:{chunks},{levels}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompressionPipeline {
    pub n: u32,
    pub m: u32,
    /// Per-qubit rotation W applied at the compressor input; W maps the
    /// dominant source eigenvector to |0⟩.
    pub rotation: [[Complex64; 2]; 2],
    /// Encoder then decoder over registers input/code(/work); no u1 gates.
    pub forward: ReversibleCircuit,
    pub codec: BlockCodec,
    pub cap: u32,
    schedule: Option<PebbleSchedule>,
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub garbage_outcome: Vec<bool>,
    pub outcome_probability: f64,
    pub fidelity_contribution: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FidelityMode {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "monte-carlo")]
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n: u32,
    pub m: u32,
    pub rate: f64,
    pub entropy_bits: f64,
    pub fidelity: f64,
    pub fidelity_mode: FidelityMode,
    pub trials: Option<u64>,
    pub garbage_zero_probability: f64,
    pub resource: ResourceReport,
}

/// Compile a codec against a source: synthesize the reversible encoder and
/// decoder, compose them, and take the per-qubit rotation from the source
/// density matrix eigenbasis.
pub fn make_quantum_compression_circuit(
    source: &QubitSource,
    codec: &BlockCodec,
    synthesis: Synthesis,
    cap: u32,
) -> Result<CompressionPipeline> {
    let n = codec.n();
    let m = codec.m();
    let (crev, drev, schedule) = match synthesis {
        Synthesis::Table => (
            synthesize_crev_from_table(codec.encode_table(), n, m)?,
            synthesize_drev_from_table(codec.decode_table(), n, m)?,
            None,
        ),
        Synthesis::Bennett => {
            let enc = bool_circuit_from_table(codec.encode_table(), n, m)?;
            let dec = bool_circuit_from_table(codec.decode_table(), m, n)?;
            (bennett_compile(&enc, m)?, bennett_drev(&dec, n, m)?, None)
        }
        Synthesis::Pebbled { chunks, levels } => {
            let (crev, schedule) = pebbled_crev(codec, chunks, levels)?;
            let dec = bool_circuit_from_table(codec.decode_table(), m, n)?;
            (crev, bennett_drev(&dec, n, m)?, Some(schedule))
        }
    };
    let forward = compose_disentangled(&crev, &drev)?;
    let eig = source.density_matrix().eigendecompose();
    Ok(CompressionPipeline {
        n,
        m,
        rotation: dagger(&eig.rotation),
        forward,
        codec: codec.clone(),
        cap,
        schedule,
    })
}

/// Pebble-game encoder: the encode table is split into segment stages, the
/// generated schedule is replayed into checkpoint slots, the final slot's
/// code half is copied out, and the whole core is run backwards so every
/// work qubit ends at zero.
fn pebbled_crev(
    codec: &BlockCodec,
    chunks: u32,
    levels: u32,
) -> Result<(ReversibleCircuit, PebbleSchedule)> {
    let n = codec.n();
    let m = codec.m();
    let schedule = pebble_schedule(chunks, levels)?;
    let stages = staged_from_table(codec.encode_table(), n, m, schedule.num_segments)?;
    let s_live = n + m;
    let pool = stages.iter().map(|s| s.gates.len() as u32).max().unwrap_or(0);
    let num_slots = schedule.max_pebbles();
    // Layout: input, code, m zero wires standing in for the initial
    // accumulator, the shared in-stage work pool, then the checkpoint slots.
    let acc_base = n + m;
    let pool_base = acc_base + m;
    let slots_base = pool_base + pool;
    let width = slots_base + num_slots * s_live;
    let chk0: Vec<u32> = (0..n).chain(acc_base..acc_base + m).collect();
    let (core, final_slot) =
        scheduled_gates(&stages, &schedule, &chk0, slots_base, num_slots, pool_base)?;
    let final_base = slots_base + final_slot * s_live;
    let mut gates = core.clone();
    for j in 0..m {
        gates.push(Gate::Cx {
            control: final_base + n + j,
            target: n + j,
        });
    }
    // All core gates are self-inverse amplitude permutations.
    gates.extend(core.iter().rev().cloned());
    let mut c = ReversibleCircuit::new(width);
    c.add_register("input", 0, n);
    c.add_register("code", n, m);
    if width > n + m {
        c.add_register("work", n + m, width - n - m);
    }
    c.gates = gates;
    c.validate()?;
    Ok((c, schedule))
}

impl CompressionPipeline {
    pub fn width(&self) -> u32 {
        self.forward.width
    }

    pub fn schedule(&self) -> Option<&PebbleSchedule> {
        self.schedule.as_ref()
    }

    /// The self-contained circuit: rotation u1 lines, the forward gates, and
    /// a trailing measurement of the input register.
    pub fn full_circuit(&self) -> ReversibleCircuit {
        let mut c = ReversibleCircuit::new(self.forward.width);
        c.registers = self.forward.registers.clone();
        for q in 0..self.n {
            c.push(Gate::U1 {
                qubit: q,
                matrix: self.rotation,
            });
        }
        c.gates.extend(self.forward.gates.iter().cloned());
        c.measure = (0..self.n).collect();
        c
    }

    pub fn resource_report(&self) -> ResourceReport {
        let full = self.full_circuit();
        match &self.schedule {
            Some(s) => resource_report_scheduled(&full, s),
            None => resource_report(&full),
        }
    }

    /// Rotate, run forward, measure the input register, and return the code
    /// register state with the measurement record.
    pub fn compress(
        &self,
        input: &StateVector,
        rng: &mut SeededRng,
    ) -> Result<(StateVector, TrialResult)> {
        if input.width() != self.n {
            return Err(Error::Input(format!(
                "input block has {} qubits, pipeline expects {}",
                input.width(),
                self.n
            )));
        }
        let mut full = input.extend_with_zeros(self.forward.width - self.n, self.cap)?;
        for q in 0..self.n {
            full.apply_gate(&Gate::U1 {
                qubit: q,
                matrix: self.rotation,
            })?;
        }
        full.apply_circuit(&self.forward)?;
        let garbage: Vec<u32> = (0..self.n).collect();
        let rec = full.measure_subset(&garbage, rng)?;
        let (mass, code_state) =
            extract_code_at(&full, self.n, self.m, self.forward.width, rec.outcome_u64())?;
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::Input(format!(
                "work register stayed entangled after measurement (slice mass {mass})"
            )));
        }
        Ok((
            code_state,
            TrialResult {
                garbage_outcome: rec.outcome,
                outcome_probability: rec.probability,
                fidelity_contribution: 0.0,
            },
        ))
    }

    /// Prepare (0^n, code, 0^work), run the circuit backwards, undo the
    /// rotation, and return the input register.
    pub fn decompress(&self, code_state: &StateVector) -> Result<StateVector> {
        let full = self.decompress_full(code_state)?;
        let low = 1usize << self.n;
        let (best, best_mass) = full
            .amplitudes()
            .chunks(low)
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best_mass < 1.0 - 1e-9 {
            return Err(Error::Input(format!(
                "code state does not decompress to a definite block (best branch mass {best_mass})"
            )));
        }
        let fixed: Vec<(u32, bool)> = (self.n..self.forward.width)
            .map(|q| (q, best >> (q - self.n) & 1 == 1))
            .collect();
        let (_, state) = full.extract_slice(0, self.n, &fixed)?;
        Ok(state)
    }

    fn decompress_full(&self, code_state: &StateVector) -> Result<StateVector> {
        if code_state.width() != self.m {
            return Err(Error::Input(format!(
                "code state has {} qubits, pipeline expects {}",
                code_state.width(),
                self.m
            )));
        }
        check_capacity(self.forward.width, self.cap)?;
        let mut full = embed_code(code_state, self.n, self.forward.width)?;
        full.apply_circuit(&self.forward.reverse())?;
        let w_dag = dagger(&self.rotation);
        for q in 0..self.n {
            full.apply_gate(&Gate::U1 {
                qubit: q,
                matrix: w_dag,
            })?;
        }
        Ok(full)
    }

    /// Expected squared overlap between the emitted block and its
    /// decompressed reconstruction, enumerated over every source sequence and
    /// every measurement branch.
    pub fn exact_fidelity(&self, source: &QubitSource) -> Result<ExperimentReport> {
        let (fidelity, gz) = self.exact_values(source)?;
        Ok(self.report(source, fidelity, FidelityMode::Exact, None, gz))
    }

    fn exact_values(&self, source: &QubitSource) -> Result<(f64, f64)> {
        let full = self.full_circuit();
        if let Some(marginal) = aligned_marginal(&full, source) {
            let gates = 2 * full.gates.len() as u64 + 2;
            if cost_product(1u64 << self.n, gates) <= CLASSICAL_BUDGET {
                return classical_exact(&full, self.n, self.m, marginal);
            }
            // Too many gates to walk per string: score the codec tables
            // directly, which agrees with the circuit by the synthesis
            // contract.
            return self.table_exact(marginal);
        }
        circuit_exact_fidelity(&full, source, self.cap)
    }

    fn table_exact(&self, q1: f64) -> Result<(f64, f64)> {
        let mut lossless_mass = 0.0;
        for x in 0..1u64 << self.n {
            let pr = string_probability(x, self.n, q1);
            if pr > 0.0 && self.codec.is_lossless(x) {
                lossless_mass += pr;
            }
        }
        Ok((lossless_mass, lossless_mass))
    }

    /// Sampled fidelity: draw a block, compress with a sampled measurement,
    /// decompress, and average the squared overlap. Deterministic per seed;
    /// trial t uses its own stream so trials are order-independent.
    pub fn mc_fidelity(
        &self,
        source: &QubitSource,
        trials: u64,
        seed: u64,
    ) -> Result<ExperimentReport> {
        let full = self.full_circuit();
        let (fidelity, gz) = circuit_mc_fidelity(&full, source, trials, seed, self.cap)?;
        Ok(self.report(source, fidelity, FidelityMode::MonteCarlo, Some(trials), gz))
    }

    fn report(
        &self,
        source: &QubitSource,
        fidelity: f64,
        fidelity_mode: FidelityMode,
        trials: Option<u64>,
        garbage_zero_probability: f64,
    ) -> ExperimentReport {
        ExperimentReport {
            n: self.n,
            m: self.m,
            rate: self.m as f64 / self.n as f64,
            entropy_bits: von_neumann_entropy(&source.density_matrix()),
            fidelity,
            fidelity_mode,
            trials,
            garbage_zero_probability,
            resource: self.resource_report(),
        }
    }
}

/// One report per block length: the code length comes from the atypicality
/// budget, exact fidelity when affordable, sampled otherwise.
pub fn sweep(
    source: &QubitSource,
    n_list: &[u32],
    delta: f64,
    synthesis: Synthesis,
    cap: u32,
    seed: u64,
) -> Result<Vec<ExperimentReport>> {
    if n_list.is_empty() {
        return Err(Error::Usage("sweep needs at least one block length".into()));
    }
    let q = source.density_matrix().eigenvalues();
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let m = codec::choose_code_length(q, n, delta)?;
        let block_codec = BlockCodec::optimal_ranked(q, n, m)?;
        let pipe = make_quantum_compression_circuit(source, &block_codec, synthesis, cap)?;
        let report = match pipe.exact_fidelity(source) {
            Err(Error::Budget(_)) => pipe.mc_fidelity(source, SWEEP_TRIALS, seed)?,
            other => other?,
        };
        out.push(report);
    }
    Ok(out)
}

/// Register layout of a compiled circuit: input at 0, code right above it
/// (absent means a zero-length code).
pub fn circuit_layout(circuit: &ReversibleCircuit) -> Result<(u32, u32)> {
    let input = circuit
        .register("input")
        .ok_or_else(|| Error::Input("circuit has no input register".into()))?;
    if input.start != 0 {
        return Err(Error::Input("input register must start at qubit 0".into()));
    }
    let n = input.len;
    let m = match circuit.register("code") {
        Some(code) => {
            if code.start != n {
                return Err(Error::Input(
                    "code register must sit directly above the input register".into(),
                ));
            }
            code.len
        }
        None => 0,
    };
    Ok((n, m))
}

/// Exact fidelity and garbage-zero probability for a self-contained circuit
/// file (rotations inline as u1 gates, trailing measure block).
pub fn circuit_exact_fidelity(
    circuit: &ReversibleCircuit,
    source: &QubitSource,
    cap: u32,
) -> Result<(f64, f64)> {
    let (n, m) = circuit_layout(circuit)?;
    if let Some(q1) = aligned_marginal(circuit, source) {
        let gates = 2 * circuit.gates.len() as u64 + 2;
        if cost_product(1u64 << n, gates) <= CLASSICAL_BUDGET {
            return classical_exact(circuit, n, m, q1);
        }
        return Err(Error::Budget(format!(
            "classical enumeration over {} strings x {gates} gates exceeds the budget; \
             use Monte Carlo mode",
            1u64 << n
        )));
    }
    let k = source.entries().len() as u64;
    let sequences = k
        .checked_pow(n)
        .filter(|s| cost_product(*s, 1 << n) <= EXACT_BUDGET);
    let Some(sequences) = sequences else {
        return Err(Error::Budget(format!(
            "exact enumeration of {k}^{n} source sequences exceeds the budget; \
             use Monte Carlo mode"
        )));
    };
    check_capacity(circuit.width, cap)?;
    let entries = source.entries();
    let reversed = circuit.reverse();
    let mut fidelity = 0.0;
    let mut gz = 0.0;
    for seq in 0..sequences {
        let mut pr = 1.0;
        let mut rem = seq;
        let mut states = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let pick = (rem % k) as usize;
            rem /= k;
            pr *= entries[pick].0;
            states.push(entries[pick].1);
        }
        if pr == 0.0 {
            continue;
        }
        let (f_seq, gz_seq) = exact_sequence_branches(circuit, &reversed, n, m, &states, cap)?;
        fidelity += pr * f_seq;
        gz += pr * gz_seq;
    }
    Ok((fidelity, gz))
}

/// All measurement branches of one emitted block: run forward, weight each
/// garbage outcome by its probability, decompress its code slice, and sum
/// squared overlaps against the emitted block.
fn exact_sequence_branches(
    circuit: &ReversibleCircuit,
    reversed: &ReversibleCircuit,
    n: u32,
    m: u32,
    states: &[PureQubitState],
    cap: u32,
) -> Result<(f64, f64)> {
    let width = circuit.width;
    let block = StateVector::prepare_product(states, 0, cap)?;
    let mut full = block.extend_with_zeros(width - n, cap)?;
    full.apply_circuit(circuit)?;
    let garbage: Vec<u32> = (0..n).collect();
    let dist = full.outcome_distribution(&garbage)?;
    let mut f = 0.0;
    for (g, pg) in dist.iter().enumerate() {
        if *pg < 1e-15 {
            continue;
        }
        // Mass below the branch probability means some weight sits on a
        // nonzero work pattern; that weight is unrecoverable and counts 0.
        let Ok((mass, code_state)) = extract_code_at(&full, n, m, width, g as u64) else {
            continue;
        };
        let mut back = embed_code(&code_state, n, width)?;
        back.apply_circuit(reversed)?;
        f += mass * block_overlap_sq(&block, &back);
    }
    Ok((f, dist[0]))
}

/// Sampled fidelity for a self-contained circuit file.
pub fn circuit_mc_fidelity(
    circuit: &ReversibleCircuit,
    source: &QubitSource,
    trials: u64,
    seed: u64,
    cap: u32,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::Input("at least one trial is required".into()));
    }
    let (n, m) = circuit_layout(circuit)?;
    check_capacity(circuit.width, cap)?;
    let width = circuit.width;
    let entries = source.entries();
    let reversed = circuit.reverse();
    let garbage: Vec<u32> = (0..n).collect();
    let mut f_sum = 0.0;
    let mut gz_count = 0u64;
    for t in 0..trials {
        let mut rng = SeededRng::with_stream(seed, t);
        let picks = source.sample_sequence_with(n as usize, &mut rng);
        let states: Vec<PureQubitState> = picks.iter().map(|&i| entries[i].1).collect();
        let block = StateVector::prepare_product(&states, 0, cap)?;
        let mut full = block.extend_with_zeros(width - n, cap)?;
        full.apply_circuit(circuit)?;
        let rec = full.measure_subset(&garbage, &mut rng)?;
        if rec.outcome_u64() == 0 {
            gz_count += 1;
        }
        let Ok((mass, code_state)) = extract_code_at(&full, n, m, width, rec.outcome_u64()) else {
            continue;
        };
        let mut back = embed_code(&code_state, n, width)?;
        back.apply_circuit(&reversed)?;
        f_sum += mass * block_overlap_sq(&block, &back);
    }
    Ok((f_sum / trials as f64, gz_count as f64 / trials as f64))
}

/// Walk every basis string classically: forward for the garbage outcome,
/// backward from the code bits for the reconstruction.
fn classical_exact(circuit: &ReversibleCircuit, n: u32, m: u32, q1: f64) -> Result<(f64, f64)> {
    let stripped = strip_trivial_rotations(circuit);
    let reversed = stripped.reverse();
    let width = circuit.width as usize;
    let mut fidelity = 0.0;
    let mut gz = 0.0;
    for x in 0..1u64 << n {
        let pr = string_probability(x, n, q1);
        if pr == 0.0 {
            continue;
        }
        let mut bits = vec![false; width];
        for q in 0..n {
            bits[q as usize] = x >> q & 1 == 1;
        }
        let out = stripped.classical_simulate(&bits)?;
        if out[..n as usize].iter().all(|b| !b) {
            gz += pr;
        }
        let mut back_bits = vec![false; width];
        back_bits[n as usize..(n + m) as usize]
            .copy_from_slice(&out[n as usize..(n + m) as usize]);
        let back = reversed.classical_simulate(&back_bits)?;
        let y = back[..n as usize]
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, b)| acc | (*b as u64) << j);
        if y == x {
            fidelity += pr;
        }
    }
    Ok((fidelity, gz))
}

/// The all-classical route applies when the source emits only basis states
/// and every rotation in the circuit is the identity; returns the marginal
/// probability of emitting |1⟩.
fn aligned_marginal(circuit: &ReversibleCircuit, source: &QubitSource) -> Option<f64> {
    let trivial = circuit.gates.iter().all(|g| match g {
        Gate::U1 { matrix, .. } => is_identity(matrix),
        _ => true,
    });
    if !trivial {
        return None;
    }
    let mut q1 = 0.0;
    for (p, s) in source.entries() {
        match s.basis_index() {
            Some(1) => q1 += p,
            Some(_) => {}
            None => return None,
        }
    }
    Some(q1)
}

fn strip_trivial_rotations(circuit: &ReversibleCircuit) -> ReversibleCircuit {
    let mut c = ReversibleCircuit::new(circuit.width);
    c.registers = circuit.registers.clone();
    c.gates = circuit
        .gates
        .iter()
        .filter(|g| !matches!(g, Gate::U1 { .. }))
        .cloned()
        .collect();
    c
}

fn is_identity(m: &[[Complex64; 2]; 2]) -> bool {
    (m[0][0] - 1.0).norm() < 1e-12
        && (m[1][1] - 1.0).norm() < 1e-12
        && m[0][1].norm() < 1e-12
        && m[1][0].norm() < 1e-12
}

fn string_probability(x: u64, n: u32, q1: f64) -> f64 {
    let ones = (x & ((1u64 << n) - 1)).count_ones();
    q1.powi(ones as i32) * (1.0 - q1).powi((n - ones) as i32)
}

fn cost_product(a: u64, b: u64) -> u64 {
    a.saturating_mul(b)
}

/// Code register slice at a fixed garbage outcome with the work register at
/// zero: (probability mass, renormalized m-qubit state).
fn extract_code_at(
    full: &StateVector,
    n: u32,
    m: u32,
    width: u32,
    garbage: u64,
) -> Result<(f64, StateVector)> {
    let mut fixed: Vec<(u32, bool)> = (0..n).map(|q| (q, garbage >> q & 1 == 1)).collect();
    fixed.extend((n + m..width).map(|q| (q, false)));
    full.extract_slice(n, m, &fixed)
}

/// (0^n, code, 0^work) as a full-width state.
fn embed_code(code_state: &StateVector, n: u32, width: u32) -> Result<StateVector> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << width];
    for (k, a) in code_state.amplitudes().iter().enumerate() {
        amps[k << n] = *a;
    }
    StateVector::from_amplitudes(width, amps)
}

/// <block|rho'|block> where rho' is the reduction of `full` onto its lowest
/// block.width() qubits.
fn block_overlap_sq(block: &StateVector, full: &StateVector) -> f64 {
    let low = 1usize << block.width();
    full.amplitudes()
        .chunks(low)
        .map(|chunk| {
            let amp: Complex64 = block
                .amplitudes()
                .iter()
                .zip(chunk)
                .map(|(b, a)| b.conj() * a)
                .sum();
            amp.norm_sqr()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::DEFAULT_QUBIT_CAP;

    const CAP: u32 = DEFAULT_QUBIT_CAP;

    fn hadamard_source() -> QubitSource {
        QubitSource::new(vec![(1.0, PureQubitState::ket_plus())]).unwrap()
    }

    fn diagonal_source(q1: f64) -> QubitSource {
        QubitSource::new(vec![
            (1.0 - q1, PureQubitState::ket0()),
            (q1, PureQubitState::ket1()),
        ])
        .unwrap()
    }

    fn mixed_source() -> QubitSource {
        QubitSource::new(vec![
            (0.5, PureQubitState::ket0()),
            (0.5, PureQubitState::ket_plus()),
        ])
        .unwrap()
    }

    fn identity_matrix() -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ]
    }

    fn pipeline(
        source: &QubitSource,
        q: (f64, f64),
        n: u32,
        m: u32,
        synthesis: Synthesis,
    ) -> CompressionPipeline {
        let codec = BlockCodec::optimal_ranked(q, n, m).unwrap();
        make_quantum_compression_circuit(source, &codec, synthesis, CAP).unwrap()
    }

    #[test]
    fn synthesis_strings_round_trip() {
        for s in ["table", "bennett", "pebbled:2,3"] {
            let parsed: Synthesis = s.parse().unwrap();
            assert_eq!(parsed.to_string(), s);
        }
        assert!("pebbled".parse::<Synthesis>().is_err());
        assert!("pebbled:2".parse::<Synthesis>().is_err());
        assert!("toffoli".parse::<Synthesis>().is_err());
    }

    #[test]
    fn hadamard_rotation_is_hadamard() {
        let pipe = pipeline(&hadamard_source(), (1.0, 0.0), 2, 0, Synthesis::Table);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pipe.rotation[0][0].re - r).abs() < 1e-12);
        assert!((pipe.rotation[0][1].re - r).abs() < 1e-12);
        assert!((pipe.rotation[1][0].re - r).abs() < 1e-12);
        assert!((pipe.rotation[1][1].re + r).abs() < 1e-12);
    }

    #[test]
    fn diagonal_source_rotation_is_identity() {
        let pipe = pipeline(&diagonal_source(0.1), (0.9, 0.1), 2, 1, Synthesis::Table);
        assert!(is_identity(&pipe.rotation));
    }

    #[test]
    fn hadamard_exact_fidelity_is_one() {
        for n in [2u32, 4] {
            let pipe = pipeline(&hadamard_source(), (1.0, 0.0), n, 0, Synthesis::Table);
            let report = pipe.exact_fidelity(&hadamard_source()).unwrap();
            assert!((report.fidelity - 1.0).abs() < 1e-9, "n={n}");
            assert!((report.garbage_zero_probability - 1.0).abs() < 1e-9);
            assert_eq!(report.rate, 0.0);
            assert!(report.entropy_bits.abs() < 1e-12);
        }
    }

    #[test]
    fn forced_identity_rotation_collapses_fidelity() {
        let mut pipe = pipeline(&hadamard_source(), (1.0, 0.0), 3, 0, Synthesis::Table);
        pipe.rotation = identity_matrix();
        let report = pipe.exact_fidelity(&hadamard_source()).unwrap();
        assert!((report.fidelity - 0.125).abs() < 1e-9);
    }

    #[test]
    fn diagonal_fidelity_matches_lossless_mass() {
        let source = diagonal_source(0.1);
        let pipe = pipeline(&source, (0.9, 0.1), 2, 1, Synthesis::Table);
        let report = pipe.exact_fidelity(&source).unwrap();
        assert!((report.fidelity - 0.90).abs() < 1e-9);
        assert!((report.garbage_zero_probability - 0.90).abs() < 1e-9);
        let expected =
            1.0 - codec::failure_probability(&pipe.codec, (0.9, 0.1)).unwrap();
        assert!((report.fidelity - expected).abs() < 1e-9);
    }

    #[test]
    fn identity_codec_round_trips_any_source() {
        let codec = BlockCodec::identity(2).unwrap();
        let source = mixed_source();
        let pipe =
            make_quantum_compression_circuit(&source, &codec, Synthesis::Table, CAP).unwrap();
        let report = pipe.exact_fidelity(&source).unwrap();
        assert!((report.fidelity - 1.0).abs() < 1e-9);
        assert!((report.garbage_zero_probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn compress_on_lossless_basis_string() {
        let source = diagonal_source(0.1);
        let pipe = pipeline(&source, (0.9, 0.1), 2, 1, Synthesis::Table);
        // x=01 ranks inside the 1-bit code table for q1=0.1.
        let x = 1u64;
        assert!(pipe.codec.is_lossless(x));
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[x as usize] = Complex64::new(1.0, 0.0);
        let block = StateVector::from_amplitudes(2, amps).unwrap();
        let mut rng = SeededRng::new(3);
        let (code_state, trial) = pipe.compress(&block, &mut rng).unwrap();
        assert!(trial.garbage_outcome.iter().all(|b| !b));
        assert!((trial.outcome_probability - 1.0).abs() < 1e-9);
        let c = pipe.codec.encode(x) as usize;
        assert!((code_state.amplitudes()[c].norm() - 1.0).abs() < 1e-9);
        let back = pipe.decompress(&code_state).unwrap();
        assert!((back.amplitudes()[x as usize].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn compress_on_lossy_basis_string_flags_garbage() {
        let source = diagonal_source(0.1);
        let pipe = pipeline(&source, (0.9, 0.1), 2, 1, Synthesis::Table);
        let x = 3u64;
        assert!(!pipe.codec.is_lossless(x));
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[x as usize] = Complex64::new(1.0, 0.0);
        let block = StateVector::from_amplitudes(2, amps).unwrap();
        let mut rng = SeededRng::new(3);
        let (_, trial) = pipe.compress(&block, &mut rng).unwrap();
        let g = trial
            .garbage_outcome
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, b)| acc | (*b as u64) << j);
        let expected = x ^ pipe.codec.decode(pipe.codec.encode(x));
        assert_eq!(g, expected);
        assert_ne!(g, 0);
        assert!((trial.outcome_probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mc_agrees_with_exact_and_is_seed_stable() {
        let source = diagonal_source(0.1);
        let pipe = pipeline(&source, (0.9, 0.1), 2, 1, Synthesis::Table);
        let exact = pipe.exact_fidelity(&source).unwrap();
        let trials = 4000u64;
        let mc = pipe.mc_fidelity(&source, trials, 11).unwrap();
        let sigma = (exact.fidelity * (1.0 - exact.fidelity) / trials as f64).sqrt();
        assert!((mc.fidelity - exact.fidelity).abs() < 4.0 * sigma);
        assert_eq!(mc.trials, Some(trials));
        let again = pipe.mc_fidelity(&source, trials, 11).unwrap();
        assert_eq!(
            serde_json::to_string(&mc).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn synthesis_paths_agree_classically() {
        let q = (0.8, 0.2);
        let n = 4u32;
        let m = 2u32;
        let codec = BlockCodec::optimal_ranked(q, n, m).unwrap();
        let source = diagonal_source(0.2);
        let pipes: Vec<CompressionPipeline> = [
            Synthesis::Table,
            Synthesis::Bennett,
            Synthesis::Pebbled {
                chunks: 2,
                levels: 2,
            },
        ]
        .into_iter()
        .map(|s| make_quantum_compression_circuit(&source, &codec, s, CAP).unwrap())
        .collect();
        for x in 0..1u64 << n {
            for a in 0..1u64 << m {
                let mut outs = Vec::new();
                for pipe in &pipes {
                    let width = pipe.forward.width as usize;
                    let mut bits = vec![false; width];
                    for q in 0..n {
                        bits[q as usize] = x >> q & 1 == 1;
                    }
                    for q in 0..m {
                        bits[(n + q) as usize] = a >> q & 1 == 1;
                    }
                    let out = pipe.forward.classical_simulate(&bits).unwrap();
                    let visible: Vec<bool> = out[..(n + m) as usize].to_vec();
                    assert!(out[(n + m) as usize..].iter().all(|b| !b), "work left set");
                    outs.push(visible);
                }
                assert_eq!(outs[0], outs[1], "bennett differs at x={x} a={a}");
                assert_eq!(outs[0], outs[2], "pebbled differs at x={x} a={a}");
            }
        }
    }

    #[test]
    fn pebbled_pipeline_reports_schedule_stats() {
        let q = (0.8, 0.2);
        let codec = BlockCodec::optimal_ranked(q, 4, 2).unwrap();
        let source = diagonal_source(0.2);
        let pipe = make_quantum_compression_circuit(
            &source,
            &codec,
            Synthesis::Pebbled {
                chunks: 2,
                levels: 2,
            },
            CAP,
        )
        .unwrap();
        let report = pipe.resource_report();
        assert_eq!(report.max_pebbles, Some(3));
        assert_eq!(report.segment_evaluations, Some(9));
    }

    #[test]
    fn rotation_covariance_single_case() {
        let base = mixed_source();
        // Rotate both source states by the same unitary.
        let c = Complex64::new(0.6, 0.0);
        let s = Complex64::new(0.0, 0.8);
        let rotate = |st: &PureQubitState| {
            PureQubitState::new(
                c * st.amp[0] + s * st.amp[1],
                -s.conj() * st.amp[0] + c * st.amp[1],
            )
            .unwrap()
        };
        let rotated = QubitSource::new(
            base.entries()
                .iter()
                .map(|(p, st)| (*p, rotate(st)))
                .collect(),
        )
        .unwrap();
        let n = 3u32;
        let m = 2u32;
        let q = base.density_matrix().eigenvalues();
        let qr = rotated.density_matrix().eigenvalues();
        assert!((q.0 - qr.0).abs() < 1e-12);
        let f_base = pipeline(&base, q, n, m, Synthesis::Table)
            .exact_fidelity(&base)
            .unwrap()
            .fidelity;
        let f_rot = pipeline(&rotated, qr, n, m, Synthesis::Table)
            .exact_fidelity(&rotated)
            .unwrap()
            .fidelity;
        assert!((f_base - f_rot).abs() < 1e-9, "{f_base} vs {f_rot}");
    }

    #[test]
    fn exact_budget_overflow_directs_to_sampling() {
        let source = mixed_source();
        let pipe = pipeline(&source, (0.85, 0.15), 12, 6, Synthesis::Table);
        match pipe.exact_fidelity(&source) {
            Err(Error::Budget(_)) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn sweep_rows_and_empty_list() {
        let source = hadamard_source();
        let rows = sweep(&source, &[2, 3], 0.1, Synthesis::Table, CAP, 0).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert_eq!(row.m, 0);
            assert_eq!(row.rate, 0.0);
            assert!((row.fidelity - 1.0).abs() < 1e-9);
        }
        assert!(matches!(
            sweep(&source, &[], 0.1, Synthesis::Table, CAP, 0),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn full_circuit_text_round_trips() {
        let source = diagonal_source(0.1);
        let pipe = pipeline(&source, (0.9, 0.1), 2, 1, Synthesis::Table);
        let full = pipe.full_circuit();
        assert_eq!(full.measure, vec![0, 1]);
        let u1_count = full
            .gates
            .iter()
            .filter(|g| matches!(g, Gate::U1 { .. }))
            .count();
        assert_eq!(u1_count, 2);
        let text = full.to_text();
        let parsed = ReversibleCircuit::from_text(&text).unwrap();
        assert_eq!(parsed.width, full.width);
        assert_eq!(parsed.gates.len(), full.gates.len());
        assert_eq!(parsed.measure, full.measure);
        let (n, m) = circuit_layout(&parsed).unwrap();
        assert_eq!((n, m), (2, 1));
    }

    #[test]
    fn report_serializes_with_expected_fields() {
        let source = diagonal_source(0.1);
        let pipe = pipeline(&source, (0.9, 0.1), 2, 1, Synthesis::Table);
        let report = pipe.exact_fidelity(&source).unwrap();
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&report).unwrap())
            .unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["m"], 1);
        assert_eq!(v["fidelity_mode"], "exact");
        assert!(v["trials"].is_null());
        assert!(v["resource"]["width"].is_u64());
        assert!(v["resource"]["gates"].is_object());
    }

    #[test]
    fn compress_rejects_wrong_width() {
        let source = diagonal_source(0.1);
        let pipe = pipeline(&source, (0.9, 0.1), 2, 1, Synthesis::Table);
        let block = StateVector::new_zero(3, CAP).unwrap();
        let mut rng = SeededRng::new(0);
        assert!(pipe.compress(&block, &mut rng).is_err());
    }

    #[test]
    fn nonorthogonal_exact_fidelity_beats_garbage_zero() {
        let source = mixed_source();
        let q = source.density_matrix().eigenvalues();
        let m = codec::choose_code_length(q, 4, 0.1).unwrap();
        let pipe = pipeline(&source, q, 4, m, Synthesis::Table);
        let report = pipe.exact_fidelity(&source).unwrap();
        assert!(report.fidelity > 0.5 && report.fidelity <= 1.0 + 1e-9);
        assert!(report.garbage_zero_probability > 0.0);
        assert!(report.garbage_zero_probability <= 1.0 + 1e-9);
    }
}
