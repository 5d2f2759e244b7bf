//! Synthesis of reversible compressor/decompressor circuits.
//!
//! Two routes produce the same functional behavior:
//! * direct truth-table synthesis, one multi-controlled X per
//!   (input pattern, output bit) pair, no work qubits;
//! * compute-copy-uncompute compilation of a classical gate netlist,
//!   one work qubit per gate, all work qubits restored to 0.
//!
//! Layout convention shared with the pipeline: input = [0, n),
//! code = [n, n+m), work = [n+m, width).

use crate::error::{Error, Result};
use crate::revcomp::bool_circuit::{BoolCircuit, BoolOp, WireRef};
use crate::revcomp::circuit::{controlled_x, Control, Gate, ReversibleCircuit};

/// Forward compressor C_rev(I, A) = (I, A XOR C(I)) from an encode table.
/// One gate per (pattern, set output bit); exponential in n, fine at desk
/// scale where the table itself is already materialized.
pub fn synthesize_crev_from_table(encode: &[u32], n: u32, m: u32) -> Result<ReversibleCircuit> {
    check_table(encode, n, m, "encode")?;
    let mut c = ReversibleCircuit::new(n + m);
    c.add_register("input", 0, n);
    c.add_register("code", n, m);
    for (x, cx) in encode.iter().enumerate() {
        for j in 0..m {
            if cx >> j & 1 == 1 {
                c.push(controlled_x(pattern_controls(x as u32, n, 0), n + j));
            }
        }
    }
    c.validate()?;
    Ok(c)
}

/// Decompressor D_rev(A, C) = (A XOR D(C), C) from a decode table: controls
/// read the code register, targets write the input register.
pub fn synthesize_drev_from_table(decode: &[u32], n: u32, m: u32) -> Result<ReversibleCircuit> {
    check_table(decode, m, n, "decode")?;
    let mut c = ReversibleCircuit::new(n + m);
    c.add_register("input", 0, n);
    c.add_register("code", n, m);
    for (w, dw) in decode.iter().enumerate() {
        for j in 0..n {
            if dw >> j & 1 == 1 {
                c.push(controlled_x(pattern_controls(w as u32, m, n), j));
            }
        }
    }
    c.validate()?;
    Ok(c)
}

fn check_table(table: &[u32], n_in: u32, n_out: u32, what: &str) -> Result<()> {
    // Width 0 is the single-entry table of an empty register.
    if n_in > 24 {
        return Err(Error::Capacity(format!(
            "{what} table input width {n_in} exceeds 24"
        )));
    }
    if table.len() != 1usize << n_in {
        return Err(Error::Input(format!(
            "{what} table has {} entries, expected {}",
            table.len(),
            1usize << n_in
        )));
    }
    if let Some(v) = table.iter().find(|v| n_out < 32 && **v >> n_out != 0) {
        return Err(Error::Input(format!(
            "{what} table value {v} does not fit in {n_out} bits"
        )));
    }
    Ok(())
}

/// Controls matching the full bit pattern of `x` on qubits
/// `[base, base + n_bits)`.
fn pattern_controls(x: u32, n_bits: u32, base: u32) -> Vec<Control> {
    (0..n_bits).map(|i| (base + i, x >> i & 1 == 1)).collect()
}

/// Compute-copy-uncompute gate block for `circuit`, with the circuit's
/// inputs read from `input_qubits`, outputs XORed onto `output_qubits`,
/// and one scratch qubit per gate at `work_base` upward. The block is an
/// involution and leaves every scratch qubit as it found it.
pub(crate) fn bennett_block(
    circuit: &BoolCircuit,
    input_qubits: &[u32],
    output_qubits: &[u32],
    work_base: u32,
) -> Result<Vec<Gate>> {
    circuit.validate()?;
    if input_qubits.len() != circuit.n_inputs as usize {
        return Err(Error::Input(format!(
            "{} input qubits for a circuit with {} inputs",
            input_qubits.len(),
            circuit.n_inputs
        )));
    }
    if output_qubits.len() != circuit.outputs.len() {
        return Err(Error::Input(format!(
            "{} output qubits for a circuit with {} outputs",
            output_qubits.len(),
            circuit.outputs.len()
        )));
    }
    let qubit_of = |w: u32| -> u32 {
        if w < circuit.n_inputs {
            input_qubits[w as usize]
        } else {
            work_base + (w - circuit.n_inputs)
        }
    };

    let mut compute: Vec<Gate> = Vec::new();
    for (gi, g) in circuit.gates.iter().enumerate() {
        let w = work_base + gi as u32;
        let (ql, qr) = (qubit_of(g.lhs.wire), qubit_of(g.rhs.wire));
        if ql == qr && matches!(g.op, BoolOp::And | BoolOp::Or) {
            // Degenerate two-legged gate on one wire: the result is either
            // a copy of the operand or a constant.
            let same_pol = g.lhs.negated == g.rhs.negated;
            match (g.op, same_pol) {
                (BoolOp::And, true) | (BoolOp::Or, true) => {
                    compute.push(controlled_x(vec![(ql, !g.lhs.negated)], w));
                }
                (BoolOp::And, false) => {} // p AND NOT p = 0
                (BoolOp::Or, false) => compute.push(Gate::X { target: w }),
                (BoolOp::Xor, _) => unreachable!(),
            }
            continue;
        }
        match g.op {
            BoolOp::And => {
                compute.push(controlled_x(
                    vec![(ql, !g.lhs.negated), (qr, !g.rhs.negated)],
                    w,
                ));
            }
            BoolOp::Or => {
                // p OR q = NOT(NOT p AND NOT q): preset 1, clear when both
                // operands are 0.
                compute.push(Gate::X { target: w });
                compute.push(controlled_x(
                    vec![(ql, g.lhs.negated), (qr, g.rhs.negated)],
                    w,
                ));
            }
            BoolOp::Xor => {
                compute.push(Gate::Cx {
                    control: ql,
                    target: w,
                });
                compute.push(Gate::Cx {
                    control: qr,
                    target: w,
                });
                if g.lhs.negated != g.rhs.negated {
                    compute.push(Gate::X { target: w });
                }
            }
        }
    }

    let mut gates = compute.clone();
    for (j, o) in circuit.outputs.iter().enumerate() {
        gates.push(controlled_x(
            vec![(qubit_of(o.wire), !o.negated)],
            output_qubits[j],
        ));
    }
    gates.extend(compute.into_iter().rev());
    Ok(gates)
}

/// Bennett-compile a classical netlist into C_rev form on the canonical
/// layout. `m_out` is the code register width and must match the netlist's
/// output count. Gate count is exactly 2*G_compute + m_out.
pub fn bennett_compile(circuit: &BoolCircuit, m_out: u32) -> Result<ReversibleCircuit> {
    if m_out as usize != circuit.outputs.len() {
        return Err(Error::Input(format!(
            "m_out = {m_out} but the netlist has {} outputs",
            circuit.outputs.len()
        )));
    }
    let n = circuit.n_inputs;
    let work = circuit.gates.len() as u32;
    let input_qubits: Vec<u32> = (0..n).collect();
    let output_qubits: Vec<u32> = (n..n + m_out).collect();
    let gates = bennett_block(circuit, &input_qubits, &output_qubits, n + m_out)?;
    let mut c = ReversibleCircuit::new(n + m_out + work);
    c.add_register("input", 0, n);
    c.add_register("code", n, m_out);
    c.add_register("work", n + m_out, work);
    c.gates = gates;
    c.validate()?;
    Ok(c)
}

/// Bennett-compile a decode netlist (m code bits in, n data bits out) into
/// D_rev form: code register is read, input register receives the XOR.
pub fn bennett_drev(decode_circuit: &BoolCircuit, n: u32, m: u32) -> Result<ReversibleCircuit> {
    if decode_circuit.n_inputs != m || decode_circuit.outputs.len() != n as usize {
        return Err(Error::Input(format!(
            "decode netlist is {} -> {}, expected {m} -> {n}",
            decode_circuit.n_inputs,
            decode_circuit.outputs.len()
        )));
    }
    let work = decode_circuit.gates.len() as u32;
    let code_qubits: Vec<u32> = (n..n + m).collect();
    let data_qubits: Vec<u32> = (0..n).collect();
    let gates = bennett_block(decode_circuit, &code_qubits, &data_qubits, n + m)?;
    let mut c = ReversibleCircuit::new(n + m + work);
    c.add_register("input", 0, n);
    c.add_register("code", n, m);
    c.add_register("work", n + m, work);
    c.gates = gates;
    c.validate()?;
    Ok(c)
}

/// Chain a compressor and a decompressor over shared input/code registers.
/// On (x, 0) the composite leaves (x XOR D(C(x)), C(x)): all zeros in the
/// input register exactly when the codec round-trips x. Work ranges may
/// overlap freely; each part restores its own work to 0.
pub fn compose_disentangled(
    crev: &ReversibleCircuit,
    drev: &ReversibleCircuit,
) -> Result<ReversibleCircuit> {
    let (ci, cc) = registers_of(crev, "compressor")?;
    let (di, dc) = registers_of(drev, "decompressor")?;
    if ci != di || cc != dc {
        return Err(Error::Input(format!(
            "register mismatch: compressor input/code = {}/{}, decompressor = {}/{}",
            ci, cc, di, dc
        )));
    }
    let width = crev.width.max(drev.width);
    let mut c = ReversibleCircuit::new(width);
    c.add_register("input", 0, ci);
    c.add_register("code", ci, cc);
    if width > ci + cc {
        c.add_register("work", ci + cc, width - ci - cc);
    }
    c.gates.extend(crev.gates.iter().cloned());
    c.gates.extend(drev.gates.iter().cloned());
    debug_assert_eq!(c.gates.len(), crev.gates.len() + drev.gates.len());
    c.validate()?;
    Ok(c)
}

fn registers_of(c: &ReversibleCircuit, role: &str) -> Result<(u32, u32)> {
    let input = c
        .register("input")
        .ok_or_else(|| Error::Input(format!("{role} has no input register")))?;
    let code = c
        .register("code")
        .ok_or_else(|| Error::Input(format!("{role} has no code register")))?;
    if input.start != 0 || code.start != input.len {
        return Err(Error::Input(format!(
            "{role} registers are not laid out as input then code"
        )));
    }
    Ok((input.len, code.len))
}

/// Netlist form of a truth table: each output bit is the XOR of its
/// minterm AND-chains. Minterms are disjoint, so XOR coincides with OR.
pub fn bool_circuit_from_table(table: &[u32], n_in: u32, n_out: u32) -> Result<BoolCircuit> {
    check_table(table, n_in, n_out, "truth")?;
    let mut c = BoolCircuit::new(n_in);
    let mut zero: Option<WireRef> = None;
    let mut outputs = Vec::with_capacity(n_out as usize);
    for j in 0..n_out {
        let mut minterms: Vec<WireRef> = Vec::new();
        for (x, v) in table.iter().enumerate() {
            if v >> j & 1 == 0 {
                continue;
            }
            let lit = |i: u32| WireRef {
                wire: i,
                negated: x as u32 >> i & 1 == 0,
            };
            let mut acc = lit(0);
            for i in 1..n_in {
                acc = c.and(acc, lit(i));
            }
            minterms.push(acc);
        }
        let out = match minterms.len() {
            0 => *zero.get_or_insert_with(|| c.constant_zero()),
            1 => minterms[0],
            _ => {
                let mut acc = minterms[0];
                for t in &minterms[1..] {
                    acc = c.xor(acc, *t);
                }
                acc
            }
        };
        outputs.push(out);
    }
    c.set_outputs(outputs);
    Ok(c)
}

/// Apply a qubit relabeling to a gate. `map[q]` is the new index of `q`.
pub(crate) fn remap_gate(g: &Gate, map: &[u32]) -> Gate {
    let f = |q: u32| map[q as usize];
    match g {
        Gate::X { target } => Gate::X { target: f(*target) },
        Gate::Cx { control, target } => Gate::Cx {
            control: f(*control),
            target: f(*target),
        },
        Gate::Ccx { c1, c2, target } => Gate::Ccx {
            c1: f(*c1),
            c2: f(*c2),
            target: f(*target),
        },
        Gate::Mcx { controls, target } => Gate::Mcx {
            controls: controls.iter().map(|(q, p)| (f(*q), *p)).collect(),
            target: f(*target),
        },
        Gate::U1 { qubit, matrix } => Gate::U1 {
            qubit: f(*qubit),
            matrix: *matrix,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::BlockCodec;
    use crate::rng::SeededRng;

    /// Split a composite basis word into register values.
    fn fields(word: u64, n: u32, m: u32) -> (u64, u64, u64) {
        let x = word & ((1 << n) - 1);
        let a = word >> n & ((1 << m) - 1);
        let w = word >> (n + m);
        (x, a, w)
    }

    /// Defining equation over every (I, A) basis state, work starting and
    /// ending at zero.
    fn assert_crev_equation(c: &crate::revcomp::circuit::ReversibleCircuit, encode: &[u32], n: u32, m: u32) {
        for word in 0..1u64 << (n + m) {
            let (x, a, _) = fields(word, n, m);
            let out = c.classical_simulate_u64(word).unwrap();
            let (ox, oa, ow) = fields(out, n, m);
            assert_eq!(ox, x, "input register preserved");
            assert_eq!(oa, a ^ encode[x as usize] as u64, "code XOR rule");
            assert_eq!(ow, 0, "work returns to zero");
        }
    }

    fn assert_drev_equation(c: &crate::revcomp::circuit::ReversibleCircuit, decode: &[u32], n: u32, m: u32) {
        for word in 0..1u64 << (n + m) {
            let (a, cw, _) = fields(word, n, m);
            let out = c.classical_simulate_u64(word).unwrap();
            let (oa, oc, ow) = fields(out, n, m);
            assert_eq!(oa, a ^ decode[cw as usize] as u64);
            assert_eq!(oc, cw, "code register preserved");
            assert_eq!(ow, 0, "work returns to zero");
        }
    }

    #[test]
    fn table_crev_identity_is_single_cx() {
        let c = synthesize_crev_from_table(&[0, 1], 1, 1).unwrap();
        assert_eq!(c.gates.len(), 1);
        assert_eq!(
            c.gates[0],
            Gate::Cx {
                control: 0,
                target: 1
            }
        );
        assert_crev_equation(&c, &[0, 1], 1, 1);
    }

    #[test]
    fn table_crev_zero_map_is_empty() {
        let c = synthesize_crev_from_table(&[0, 0, 0, 0], 2, 1).unwrap();
        assert!(c.gates.is_empty());
    }

    #[test]
    fn table_crev_biased_two_bit_codec() {
        // encode: 00->0, 01->1, 10->0, 11->0; only x=01 sets the code bit.
        let c = synthesize_crev_from_table(&[0, 1, 0, 0], 2, 1).unwrap();
        assert_eq!(c.gates.len(), 1);
        match &c.gates[0] {
            Gate::Mcx { controls, target } => {
                assert_eq!(controls.as_slice(), &[(0, true), (1, false)]);
                assert_eq!(*target, 2);
            }
            g => panic!("expected a pattern-matched MCX, got {g:?}"),
        }
        assert_crev_equation(&c, &[0, 1, 0, 0], 2, 1);
    }

    #[test]
    fn table_drev_equation_holds() {
        let decode = [0b00u32, 0b01];
        let c = synthesize_drev_from_table(&decode, 2, 1).unwrap();
        assert_drev_equation(&c, &decode, 2, 1);
    }

    #[test]
    fn table_rejects_bad_shapes() {
        assert!(synthesize_crev_from_table(&[0, 1, 0], 2, 1).is_err());
        assert!(synthesize_crev_from_table(&[0, 2], 1, 1).is_err());
        assert!(matches!(
            synthesize_crev_from_table(&[0], 25, 1),
            Err(crate::error::Error::Capacity(_))
        ));
        // A width-0 table is the single entry of an empty register.
        let c = synthesize_drev_from_table(&[0], 2, 0).unwrap();
        assert!(c.gates.is_empty());
    }

    #[test]
    fn bennett_single_and_restores_work() {
        let mut b = BoolCircuit::new(2);
        let out = b.and(WireRef::pos(0), WireRef::pos(1));
        b.set_outputs(vec![out]);
        let c = bennett_compile(&b, 1).unwrap();
        assert_eq!(c.width, 4);
        assert_eq!(c.gates.len(), 3); // CCX, CX copy, CCX
        assert_crev_equation(&c, &[0, 0, 0, 1], 2, 1);
    }

    #[test]
    fn bennett_passthrough_is_copies_only() {
        let mut b = BoolCircuit::new(2);
        b.set_outputs(vec![WireRef::pos(0), WireRef::pos(1)]);
        let c = bennett_compile(&b, 2).unwrap();
        assert_eq!(c.gates.len(), 2);
        assert!(c
            .gates
            .iter()
            .all(|g| matches!(g, Gate::Cx { .. })));
        assert_crev_equation(&c, &[0b00, 0b01, 0b10, 0b11], 2, 2);
    }

    #[test]
    fn bennett_single_xor_is_parity_into_ancilla() {
        let mut b = BoolCircuit::new(2);
        let out = b.xor(WireRef::pos(0), WireRef::pos(1));
        b.set_outputs(vec![out]);
        let c = bennett_compile(&b, 1).unwrap();
        assert_eq!(c.gates.len(), 5); // CX CX, copy, CX CX
        assert_crev_equation(&c, &[0, 1, 1, 0], 2, 1);
    }

    #[test]
    fn bennett_or_uses_polarity_rewrite() {
        let mut b = BoolCircuit::new(2);
        let out = b.or(WireRef::pos(0), WireRef::pos(1));
        b.set_outputs(vec![out]);
        let c = bennett_compile(&b, 1).unwrap();
        assert_crev_equation(&c, &[0, 1, 1, 1], 2, 1);
    }

    #[test]
    fn bennett_negated_legs_and_outputs() {
        // NOR with a negated output ref on top: out = NOT(a OR b).
        let mut b = BoolCircuit::new(2);
        let or = b.or(WireRef::pos(0), WireRef::pos(1));
        b.set_outputs(vec![or.invert()]);
        let c = bennett_compile(&b, 1).unwrap();
        assert_crev_equation(&c, &[1, 0, 0, 0], 2, 1);

        // AND of two negated legs = NOR as well.
        let mut b = BoolCircuit::new(2);
        let nor = b.and(WireRef::neg(0), WireRef::neg(1));
        b.set_outputs(vec![nor]);
        let c = bennett_compile(&b, 1).unwrap();
        assert_crev_equation(&c, &[1, 0, 0, 0], 2, 1);
    }

    #[test]
    fn bennett_degenerate_single_wire_gates() {
        // AND(a, NOT a) = 0, OR(a, NOT a) = 1, AND(a, a) = a.
        let mut b = BoolCircuit::new(1);
        let z = b.push_gate(BoolOp::And, WireRef::pos(0), WireRef::neg(0));
        let o = b.push_gate(BoolOp::Or, WireRef::pos(0), WireRef::neg(0));
        let s = b.push_gate(BoolOp::And, WireRef::pos(0), WireRef::pos(0));
        b.set_outputs(vec![WireRef::pos(z), WireRef::pos(o), WireRef::pos(s)]);
        let c = bennett_compile(&b, 3).unwrap();
        assert_crev_equation(&c, &[0b010, 0b110], 1, 3);
    }

    #[test]
    fn bennett_gate_count_formula() {
        let mut rng = SeededRng::new(23);
        for _ in 0..25 {
            let n = 2 + rng.next_below(3) as u32;
            let b = random_bool_circuit(n, 6, &mut rng);
            let m_out = b.outputs.len() as u32;
            let c = bennett_compile(&b, m_out).unwrap();
            let compute: usize = (c.gates.len() - m_out as usize) / 2;
            assert_eq!(c.gates.len(), 2 * compute + m_out as usize);
            // Work restored and equation satisfied on every basis state.
            let mut table = vec![0u32; 1 << n];
            for x in 0..1u64 << n {
                table[x as usize] = b.eval(x) as u32;
            }
            assert_crev_equation(&c, &table, n, m_out);
        }
    }

    fn random_bool_circuit(n: u32, max_gates: u64, rng: &mut SeededRng) -> BoolCircuit {
        let mut b = BoolCircuit::new(n);
        let gates = 1 + rng.next_below(max_gates);
        for _ in 0..gates {
            let pick = |b: &BoolCircuit, rng: &mut SeededRng| WireRef {
                wire: rng.next_below(b.wire_count() as u64) as u32,
                negated: rng.next_u64() & 1 == 1,
            };
            let lhs = pick(&b, rng);
            let rhs = pick(&b, rng);
            match rng.next_below(3) {
                0 => b.push_gate(BoolOp::And, lhs, rhs),
                1 => b.push_gate(BoolOp::Or, lhs, rhs),
                _ => b.push_gate(BoolOp::Xor, lhs, rhs),
            };
        }
        let n_out = 1 + rng.next_below(3) as usize;
        let outs = (0..n_out)
            .map(|_| WireRef {
                wire: rng.next_below(b.wire_count() as u64) as u32,
                negated: rng.next_u64() & 1 == 1,
            })
            .collect();
        b.set_outputs(outs);
        b
    }

    #[test]
    fn bool_circuit_from_table_matches_table() {
        let mut rng = SeededRng::new(31);
        for _ in 0..20 {
            let n = 1 + rng.next_below(4) as u32;
            let m = 1 + rng.next_below(3) as u32;
            let table: Vec<u32> = (0..1u64 << n)
                .map(|_| rng.next_below(1 << m) as u32)
                .collect();
            let b = bool_circuit_from_table(&table, n, m).unwrap();
            b.validate().unwrap();
            for x in 0..1u64 << n {
                assert_eq!(b.eval(x), table[x as usize] as u64, "n={n} m={m} x={x}");
            }
        }
    }

    #[test]
    fn bennett_of_table_netlist_matches_direct_table_synthesis() {
        let mut rng = SeededRng::new(37);
        for _ in 0..10 {
            let n = 2 + rng.next_below(2) as u32;
            let m = 1 + rng.next_below(2) as u32;
            let table: Vec<u32> = (0..1u64 << n)
                .map(|_| rng.next_below(1 << m) as u32)
                .collect();
            let direct = synthesize_crev_from_table(&table, n, m).unwrap();
            let netlist = bool_circuit_from_table(&table, n, m).unwrap();
            let bennett = bennett_compile(&netlist, m).unwrap();
            for word in 0..1u64 << (n + m) {
                let d = direct.classical_simulate_u64(word).unwrap();
                let b = bennett.classical_simulate_u64(word).unwrap();
                assert_eq!(b & ((1 << (n + m)) - 1), d, "word={word}");
            }
        }
    }

    #[test]
    fn bennett_drev_equation_holds() {
        let decode = [0b00u32, 0b01, 0b11, 0b10];
        let netlist = bool_circuit_from_table(&decode, 2, 2).unwrap();
        let c = bennett_drev(&netlist, 2, 2).unwrap();
        assert_drev_equation(&c, &decode, 2, 2);
    }

    #[test]
    fn compose_identity_swaps_value_into_code() {
        let crev = synthesize_crev_from_table(&[0, 1], 1, 1).unwrap();
        let drev = synthesize_drev_from_table(&[0, 1], 1, 1).unwrap();
        let c = compose_disentangled(&crev, &drev).unwrap();
        assert_eq!(c.gates.len(), crev.gates.len() + drev.gates.len());
        // (x, 0) -> (0, x): value moved to the code register.
        assert_eq!(c.classical_simulate_u64(0b00).unwrap(), 0b00);
        assert_eq!(c.classical_simulate_u64(0b01).unwrap(), 0b10);
    }

    #[test]
    fn compose_biased_codec_truth_table() {
        let codec = BlockCodec::optimal_ranked((0.9, 0.1), 2, 1).unwrap();
        let crev = synthesize_crev_from_table(codec.encode_table(), 2, 1).unwrap();
        let drev = synthesize_drev_from_table(codec.decode_table(), 2, 1).unwrap();
        let c = compose_disentangled(&crev, &drev).unwrap();
        // Lossless inputs disentangle to zeros; 11 is lossy with garbage 11.
        assert_eq!(c.classical_simulate_u64(0b000).unwrap(), 0b000);
        assert_eq!(c.classical_simulate_u64(0b001).unwrap(), 0b100);
        assert_eq!(c.classical_simulate_u64(0b011).unwrap(), 0b011);
    }

    #[test]
    fn compose_rejects_register_mismatch() {
        let crev = synthesize_crev_from_table(&[0, 1], 1, 1).unwrap();
        let drev = synthesize_drev_from_table(&[0, 1, 2, 3], 2, 2).unwrap();
        assert!(compose_disentangled(&crev, &drev).is_err());
    }

    #[test]
    fn compose_lossless_inputs_disentangle_for_random_codecs() {
        let mut rng = SeededRng::new(41);
        for _ in 0..10 {
            let n = 2 + rng.next_below(3) as u32;
            let m = 1 + rng.next_below(n as u64 - 1) as u32;
            let q1 = 0.05 + 0.4 * rng.next_f64();
            let codec = BlockCodec::optimal_ranked((1.0 - q1, q1), n, m).unwrap();
            let crev = synthesize_crev_from_table(codec.encode_table(), n, m).unwrap();
            let drev = synthesize_drev_from_table(codec.decode_table(), n, m).unwrap();
            let c = compose_disentangled(&crev, &drev).unwrap();
            for x in 0..1u64 << n {
                let out = c.classical_simulate_u64(x).unwrap();
                let enc = codec.encode_table()[x as usize] as u64;
                let dec = codec.decode_table()[enc as usize] as u64;
                assert_eq!(out, (x ^ dec) | enc << n);
            }
        }
    }
}
