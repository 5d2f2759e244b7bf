//! Classical combinational circuits over {AND, OR, XOR} with negation
//! carried as polarity flags on wire references. Each gate defines one fresh
//! wire, numbered densely after the inputs, so the netlist is topologically
//! ordered by construction.

use crate::error::{Error, Result};

/// Reference to a wire, possibly negated at the point of use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WireRef {
    pub wire: u32,
    pub negated: bool,
}

impl WireRef {
    pub fn pos(wire: u32) -> Self {
        WireRef {
            wire,
            negated: false,
        }
    }

    pub fn neg(wire: u32) -> Self {
        WireRef {
            wire,
            negated: true,
        }
    }

    pub fn invert(self) -> Self {
        WireRef {
            wire: self.wire,
            negated: !self.negated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Xor,
}

/// One two-input gate; its output is the fresh wire `n_inputs + index`.
#[derive(Debug, Clone, Copy)]
pub struct BoolGate {
    pub op: BoolOp,
    pub lhs: WireRef,
    pub rhs: WireRef,
    pub out: u32,
}

#[derive(Debug, Clone)]
pub struct BoolCircuit {
    pub n_inputs: u32,
    pub gates: Vec<BoolGate>,
    pub outputs: Vec<WireRef>,
}

impl BoolCircuit {
    pub fn new(n_inputs: u32) -> Self {
        BoolCircuit {
            n_inputs,
            gates: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Total wires: inputs plus one per gate.
    pub fn wire_count(&self) -> u32 {
        self.n_inputs + self.gates.len() as u32
    }

    /// Append a gate; returns the fresh output wire id.
    pub fn push_gate(&mut self, op: BoolOp, lhs: WireRef, rhs: WireRef) -> u32 {
        let out = self.wire_count();
        debug_assert!(lhs.wire < out && rhs.wire < out);
        self.gates.push(BoolGate { op, lhs, rhs, out });
        out
    }

    pub fn and(&mut self, lhs: WireRef, rhs: WireRef) -> WireRef {
        WireRef::pos(self.push_gate(BoolOp::And, lhs, rhs))
    }

    pub fn or(&mut self, lhs: WireRef, rhs: WireRef) -> WireRef {
        WireRef::pos(self.push_gate(BoolOp::Or, lhs, rhs))
    }

    pub fn xor(&mut self, lhs: WireRef, rhs: WireRef) -> WireRef {
        WireRef::pos(self.push_gate(BoolOp::Xor, lhs, rhs))
    }

    /// A wire that is constantly 0 (x XOR x on input 0); needs one input.
    pub fn constant_zero(&mut self) -> WireRef {
        debug_assert!(self.n_inputs >= 1);
        let w0 = WireRef::pos(0);
        self.xor(w0, w0)
    }

    pub fn set_outputs(&mut self, outputs: Vec<WireRef>) {
        self.outputs = outputs;
    }

    /// Check topological order, fresh dense output ids, and resolvable
    /// output references.
    pub fn validate(&self) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            let expected = self.n_inputs + i as u32;
            if g.out != expected {
                return Err(Error::Input(format!(
                    "gate {i}: output wire {} is not the fresh wire {expected}",
                    g.out
                )));
            }
            if g.lhs.wire >= expected || g.rhs.wire >= expected {
                return Err(Error::Input(format!(
                    "gate {i}: reads a wire at or past its own output"
                )));
            }
        }
        for (j, o) in self.outputs.iter().enumerate() {
            if o.wire >= self.wire_count() {
                return Err(Error::Input(format!(
                    "output {j}: wire {} does not exist",
                    o.wire
                )));
            }
        }
        Ok(())
    }

    /// Reference evaluation; bit j of the result is output j.
    pub fn eval(&self, input: u64) -> u64 {
        debug_assert!(self.n_inputs <= 64 && self.outputs.len() <= 64);
        let mut wires = vec![false; self.wire_count() as usize];
        for i in 0..self.n_inputs {
            wires[i as usize] = input >> i & 1 == 1;
        }
        let read = |wires: &[bool], r: WireRef| wires[r.wire as usize] ^ r.negated;
        for g in &self.gates {
            let a = read(&wires, g.lhs);
            let b = read(&wires, g.rhs);
            wires[g.out as usize] = match g.op {
                BoolOp::And => a && b,
                BoolOp::Or => a || b,
                BoolOp::Xor => a ^ b,
            };
        }
        let mut out = 0u64;
        for (j, o) in self.outputs.iter().enumerate() {
            if read(&wires, *o) {
                out |= 1 << j;
            }
        }
        out
    }
}

/// Inline a chain of stages into one circuit: stage i+1's inputs are stage
/// i's outputs. All stages must have matching arity (outputs of one feed the
/// inputs of the next); the result has the first stage's inputs and the last
/// stage's outputs.
pub fn concat_stages(stages: &[BoolCircuit]) -> Result<BoolCircuit> {
    let first = stages
        .first()
        .ok_or_else(|| Error::Input("no stages to concatenate".into()))?;
    let mut out = BoolCircuit::new(first.n_inputs);
    // Current bindings: what each stage-local input wire means in `out`.
    let mut bound: Vec<WireRef> = (0..first.n_inputs).map(WireRef::pos).collect();
    for (si, stage) in stages.iter().enumerate() {
        stage.validate()?;
        if stage.n_inputs as usize != bound.len() {
            return Err(Error::Input(format!(
                "stage {si}: takes {} inputs but the previous stage yields {}",
                stage.n_inputs,
                bound.len()
            )));
        }
        // Map stage-local wires to refs in `out`, folding polarity through.
        let mut local: Vec<WireRef> = bound.clone();
        let resolve = |local: &[WireRef], r: WireRef| -> WireRef {
            let base = local[r.wire as usize];
            if r.negated {
                base.invert()
            } else {
                base
            }
        };
        for g in &stage.gates {
            let lhs = resolve(&local, g.lhs);
            let rhs = resolve(&local, g.rhs);
            let w = out.push_gate(g.op, lhs, rhs);
            local.push(WireRef::pos(w));
        }
        bound = stage
            .outputs
            .iter()
            .map(|o| resolve(&local, *o))
            .collect();
    }
    out.set_outputs(bound);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_single_gates() {
        let mut c = BoolCircuit::new(2);
        let a = WireRef::pos(0);
        let b = WireRef::pos(1);
        let and = c.and(a, b);
        let or = c.or(a, b);
        let xor = c.xor(a, b);
        c.set_outputs(vec![and, or, xor]);
        c.validate().unwrap();
        assert_eq!(c.eval(0b00), 0b000);
        assert_eq!(c.eval(0b01), 0b110);
        assert_eq!(c.eval(0b10), 0b110);
        assert_eq!(c.eval(0b11), 0b011);
    }

    #[test]
    fn polarity_flags_negate_at_use() {
        let mut c = BoolCircuit::new(2);
        let nand = c.and(WireRef::neg(0), WireRef::neg(1));
        c.set_outputs(vec![nand, WireRef::neg(0)]);
        assert_eq!(c.eval(0b00), 0b11);
        assert_eq!(c.eval(0b01), 0b00);
        assert_eq!(c.eval(0b10), 0b10);
    }

    #[test]
    fn constant_zero_and_one() {
        let mut c = BoolCircuit::new(1);
        let zero = c.constant_zero();
        c.set_outputs(vec![zero, zero.invert()]);
        assert_eq!(c.eval(0), 0b10);
        assert_eq!(c.eval(1), 0b10);
    }

    #[test]
    fn validate_rejects_forward_reference() {
        let mut c = BoolCircuit::new(1);
        c.gates.push(BoolGate {
            op: BoolOp::And,
            lhs: WireRef::pos(0),
            rhs: WireRef::pos(5),
            out: 1,
        });
        assert!(c.validate().is_err());
    }

    #[test]
    fn validate_rejects_stale_out_id() {
        let mut c = BoolCircuit::new(1);
        c.gates.push(BoolGate {
            op: BoolOp::Xor,
            lhs: WireRef::pos(0),
            rhs: WireRef::pos(0),
            out: 7,
        });
        assert!(c.validate().is_err());
    }

    #[test]
    fn concat_chains_stages() {
        // Stage: one-bit NOT, as a passthrough with a negated output.
        let mut stage = BoolCircuit::new(1);
        stage.set_outputs(vec![WireRef::neg(0)]);
        let chain = concat_stages(&[stage.clone(), stage.clone(), stage.clone()]).unwrap();
        assert_eq!(chain.eval(0), 1);
        assert_eq!(chain.eval(1), 0);

        let chain = concat_stages(&[stage.clone(), stage]).unwrap();
        assert_eq!(chain.eval(0), 0);
        assert_eq!(chain.eval(1), 1);
    }

    #[test]
    fn concat_respects_gate_stages() {
        // Stage A: (a, b) -> (a XOR b, b); stage B: (x, y) -> (x AND y, y).
        let mut a = BoolCircuit::new(2);
        let x = a.xor(WireRef::pos(0), WireRef::pos(1));
        a.set_outputs(vec![x, WireRef::pos(1)]);
        let mut b = BoolCircuit::new(2);
        let y = b.and(WireRef::pos(0), WireRef::pos(1));
        b.set_outputs(vec![y, WireRef::pos(1)]);
        let chain = concat_stages(&[a, b]).unwrap();
        for bits in 0..4u64 {
            let (p, q) = (bits & 1, bits >> 1 & 1);
            let expect = ((p ^ q) & q) | (q << 1);
            assert_eq!(chain.eval(bits), expect, "bits={bits:02b}");
        }
    }

    #[test]
    fn concat_rejects_arity_mismatch() {
        let mut a = BoolCircuit::new(2);
        a.set_outputs(vec![WireRef::pos(0)]);
        let b = BoolCircuit::new(2);
        assert!(concat_stages(&[a, b]).is_err());
    }
}
