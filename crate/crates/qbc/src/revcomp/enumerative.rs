//! Structured netlists for the enumerative codec and staged decompositions
//! of encoder tables.
//!
//! The encoder scans the block from bit 0 upward, carrying a weight counter
//! and a rank accumulator. When the (t+1)-th set bit appears at position k,
//! the rank of the final codeword grows by a constant that depends only on
//! (k, t), so the whole scan is a cascade of conditioned constant adders;
//! gate count stays polynomial in n where the table route is exponential.

use crate::codec::{enumerative_code_bits, Binomials};
use crate::error::{Error, Result};
use crate::revcomp::bool_circuit::{BoolCircuit, WireRef};

/// Wires with a known-constant-zero shortcut; `None` folds away gates.
type OptWire = Option<WireRef>;

fn fxor(c: &mut BoolCircuit, a: OptWire, b: OptWire) -> OptWire {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(p), Some(q)) if p.wire == q.wire => {
            if p.negated == q.negated {
                None
            } else {
                // p XOR NOT p = 1, materialized as a negated zero wire.
                let zero = c.constant_zero();
                Some(zero.invert())
            }
        }
        (Some(p), Some(q)) => Some(c.xor(p, q)),
    }
}

fn fand(c: &mut BoolCircuit, a: OptWire, b: OptWire) -> OptWire {
    match (a, b) {
        (None, _) | (_, None) => None,
        (Some(p), Some(q)) if p.wire == q.wire => {
            if p.negated == q.negated {
                Some(p)
            } else {
                None
            }
        }
        (Some(p), Some(q)) => Some(c.and(p, q)),
    }
}

/// regs += delta when `enable` is 1, dropping any carry out of the top.
/// Ripple carry with constant-folding: bits where delta is 0 cost at most
/// two gates, bits where it is 1 at most four.
fn add_constant_if(c: &mut BoolCircuit, regs: &mut [OptWire], delta: u64, enable: WireRef) {
    let mut carry: OptWire = None;
    for (i, slot) in regs.iter_mut().enumerate() {
        let a = *slot;
        let b: OptWire = if delta >> i & 1 == 1 {
            Some(enable)
        } else {
            None
        };
        let ab = fxor(c, a, b);
        let sum = fxor(c, ab, carry);
        let t1 = fand(c, a, b);
        let t2 = fand(c, carry, ab);
        carry = fxor(c, t1, t2);
        *slot = sum;
    }
}

/// counter == value as a wire, folded to a constant where possible.
enum Cond {
    True,
    False,
    Wire(WireRef),
}

fn eq_const(c: &mut BoolCircuit, bits: &[OptWire], value: u32) -> Cond {
    let mut acc: OptWire = None;
    let mut any = false;
    for (i, bit) in bits.iter().enumerate() {
        let want = value >> i & 1 == 1;
        match bit {
            None => {
                if want {
                    return Cond::False;
                }
            }
            Some(r) => {
                let lit = if want { *r } else { r.invert() };
                acc = if any {
                    fand(c, acc, Some(lit))
                } else {
                    Some(lit)
                };
                any = true;
                if acc.is_none() {
                    return Cond::False;
                }
            }
        }
    }
    match acc {
        Some(w) => Cond::Wire(w),
        None => Cond::True,
    }
}

/// Running scan state: rank accumulator and weight counter.
struct Scan {
    n: u32,
    wmax: u32,
    acc: Vec<OptWire>,
    counter: Vec<OptWire>,
    bin: Binomials,
}

impl Scan {
    fn new(n: u32, wmax: u32, m: u32, acc: Vec<OptWire>, counter: Vec<OptWire>) -> Self {
        debug_assert_eq!(acc.len(), m as usize);
        debug_assert_eq!(counter.len(), counter_bits(n) as usize);
        Scan {
            n,
            wmax,
            acc,
            counter,
            bin: Binomials::new(n),
        }
    }

    /// Consume block bit k. Events fire before the counter sees the bit, so
    /// the comparator reads the weight among bits 0..k.
    fn step(&mut self, c: &mut BoolCircuit, k: u32, xk: WireRef) {
        for t in 0..self.wmax.min(k + 1) {
            let enable = match eq_const(c, &self.counter, t) {
                Cond::False => continue,
                Cond::True => xk,
                Cond::Wire(w) => match fand(c, Some(w), Some(xk)) {
                    Some(e) => e,
                    None => continue,
                },
            };
            // Seeing the (t+1)-th one at position k raises the final weight
            // class offset by C(n,t) and the in-class rank by C(k,t+1).
            let delta = self.bin.get(self.n, t) + self.bin.get(k, t + 1);
            add_constant_if(c, &mut self.acc, delta as u64, enable);
        }
        let mut counter = std::mem::take(&mut self.counter);
        add_constant_if(c, &mut counter, 1, xk);
        self.counter = counter;
    }

    /// Zero the accumulator unless the final weight is typical.
    fn mask_atypical(&mut self, c: &mut BoolCircuit) {
        if self.wmax >= self.n {
            return; // every block is typical
        }
        let mut mask: OptWire = None;
        for t in 0..=self.wmax {
            match eq_const(c, &self.counter, t) {
                Cond::True => return,
                Cond::False => continue,
                Cond::Wire(w) => {
                    mask = match mask {
                        None => Some(w),
                        Some(prev) => Some(c.or(prev, w)),
                    };
                }
            }
        }
        for slot in self.acc.iter_mut() {
            *slot = fand(c, *slot, mask);
        }
    }
}

/// Bits needed for a weight counter that reaches n.
fn counter_bits(n: u32) -> u32 {
    32 - n.leading_zeros()
}

fn check_params(n: u32, wmax: u32) -> Result<()> {
    if !(1..=16).contains(&n) {
        return Err(Error::Capacity(format!(
            "enumerative netlist block length {n} outside 1..=16"
        )));
    }
    if wmax > n {
        return Err(Error::Input(format!("wmax {wmax} exceeds block length {n}")));
    }
    Ok(())
}

fn materialize(c: &mut BoolCircuit, slots: &[OptWire], zero: &mut OptWire) -> Vec<WireRef> {
    slots
        .iter()
        .map(|s| s.unwrap_or_else(|| *zero.get_or_insert_with(|| c.constant_zero())))
        .collect()
}

/// Netlist computing the enumerative codeword of an n-bit block: typical
/// blocks (weight <= wmax) map to their codec rank, atypical blocks to 0.
pub fn enumerative_encoder_bool_circuit(n: u32, wmax: u32) -> Result<BoolCircuit> {
    check_params(n, wmax)?;
    let m = enumerative_code_bits(n, wmax)?;
    let mut c = BoolCircuit::new(n);
    if m == 0 {
        return Ok(c);
    }
    let mut scan = Scan::new(
        n,
        wmax,
        m,
        vec![None; m as usize],
        vec![None; counter_bits(n) as usize],
    );
    for k in 0..n {
        scan.step(&mut c, k, WireRef::pos(k));
    }
    scan.mask_atypical(&mut c);
    let mut zero = None;
    let outputs = materialize(&mut c, &scan.acc, &mut zero);
    c.set_outputs(outputs);
    Ok(c)
}

/// The same scan cut into `num_stages` equal-width stages for pebbling.
/// Live state is (block, accumulator, counter); every stage maps it to
/// itself, and the last stage folds in the atypicality mask.
pub fn enumerative_encoder_stages(
    n: u32,
    wmax: u32,
    num_stages: u32,
) -> Result<Vec<BoolCircuit>> {
    check_params(n, wmax)?;
    if num_stages < 1 || num_stages > n {
        return Err(Error::Input(format!(
            "stage count {num_stages} outside 1..={n}"
        )));
    }
    let m = enumerative_code_bits(n, wmax)?;
    let b = counter_bits(n);
    let s_live = n + m + b;
    let mut stages = Vec::with_capacity(num_stages as usize);
    for s in 0..num_stages {
        let lo = s * n / num_stages;
        let hi = (s + 1) * n / num_stages;
        let mut c = BoolCircuit::new(s_live);
        let acc: Vec<OptWire> = (0..m).map(|i| Some(WireRef::pos(n + i))).collect();
        let counter: Vec<OptWire> = (0..b).map(|i| Some(WireRef::pos(n + m + i))).collect();
        let mut scan = Scan::new(n, wmax, m, acc, counter);
        for k in lo..hi {
            scan.step(&mut c, k, WireRef::pos(k));
        }
        if s + 1 == num_stages {
            scan.mask_atypical(&mut c);
        }
        let mut zero = None;
        let mut outputs: Vec<WireRef> = (0..n).map(WireRef::pos).collect();
        outputs.extend(materialize(&mut c, &scan.acc, &mut zero));
        outputs.extend(materialize(&mut c, &scan.counter, &mut zero));
        c.set_outputs(outputs);
        stages.push(c);
    }
    Ok(stages)
}

/// Cut an encode table into stages over live state (block, accumulator):
/// stage s XORs in the code values of its slice of input patterns. The
/// stage chain composes to acc XOR C(block), matching the monolithic
/// synthesis.
pub fn staged_from_table(
    table: &[u32],
    n: u32,
    m: u32,
    num_stages: u32,
) -> Result<Vec<BoolCircuit>> {
    if !(1..=16).contains(&n) {
        return Err(Error::Capacity(format!(
            "staged table block length {n} outside 1..=16"
        )));
    }
    if table.len() != 1usize << n {
        return Err(Error::Input(format!(
            "table has {} entries, expected {}",
            table.len(),
            1usize << n
        )));
    }
    if m < 32 {
        if let Some(v) = table.iter().find(|v| **v >> m != 0) {
            return Err(Error::Input(format!(
                "table value {v} does not fit in {m} bits"
            )));
        }
    }
    if num_stages < 1 || num_stages as usize > table.len() {
        return Err(Error::Input(format!(
            "stage count {num_stages} outside 1..={}",
            table.len()
        )));
    }
    let s_live = n + m;
    let mut stages = Vec::with_capacity(num_stages as usize);
    let len = table.len() as u64;
    for s in 0..num_stages as u64 {
        let lo = s * len / num_stages as u64;
        let hi = (s + 1) * len / num_stages as u64;
        let mut c = BoolCircuit::new(s_live);
        let mut acc: Vec<WireRef> = (0..m).map(|i| WireRef::pos(n + i)).collect();
        for x in lo..hi {
            let v = table[x as usize];
            if v == 0 {
                continue;
            }
            let lit = |i: u32| WireRef {
                wire: i,
                negated: x >> i & 1 == 0,
            };
            let mut hit = lit(0);
            for i in 1..n {
                hit = c.and(hit, lit(i));
            }
            for (j, slot) in acc.iter_mut().enumerate() {
                if v >> j & 1 == 1 {
                    *slot = c.xor(*slot, hit);
                }
            }
        }
        let mut outputs: Vec<WireRef> = (0..n).map(WireRef::pos).collect();
        outputs.extend(acc);
        c.set_outputs(outputs);
        stages.push(c);
    }
    Ok(stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::BlockCodec;
    use crate::revcomp::bool_circuit::concat_stages;

    #[test]
    fn weight_one_block_rank() {
        let c = enumerative_encoder_bool_circuit(4, 1).unwrap();
        assert_eq!(c.eval(0b1000), 4);
        assert_eq!(c.eval(0b0001), 1);
        assert_eq!(c.eval(0b0000), 0);
        assert_eq!(c.eval(0b0011), 0, "atypical blocks map to zero");
    }

    #[test]
    fn full_weight_range_is_a_bijection() {
        let c = enumerative_encoder_bool_circuit(3, 3).unwrap();
        let mut seen = [false; 8];
        for x in 0..8u64 {
            let v = c.eval(x) as usize;
            assert!(!seen[v], "duplicate codeword {v}");
            seen[v] = true;
        }
    }

    #[test]
    fn matches_codec_tables_across_params() {
        for n in 1..=8u32 {
            for wmax in 0..=n {
                let codec = BlockCodec::enumerative(n, wmax).unwrap();
                let c = enumerative_encoder_bool_circuit(n, wmax).unwrap();
                c.validate().unwrap();
                assert_eq!(c.outputs.len() as u32, codec.m(), "n={n} wmax={wmax}");
                for x in 0..1u64 << n {
                    assert_eq!(
                        c.eval(x),
                        codec.encode(x),
                        "n={n} wmax={wmax} x={x:0n$b}",
                        n = n as usize
                    );
                }
            }
        }
    }

    #[test]
    fn gate_count_stays_polynomial() {
        // The table route grows like 2^n; the scan must not.
        let c = enumerative_encoder_bool_circuit(16, 4).unwrap();
        assert!(
            c.gates.len() < 4000,
            "scan netlist has {} gates",
            c.gates.len()
        );
    }

    #[test]
    fn rejects_out_of_range_params() {
        assert!(enumerative_encoder_bool_circuit(0, 0).is_err());
        assert!(enumerative_encoder_bool_circuit(17, 1).is_err());
        assert!(enumerative_encoder_bool_circuit(4, 5).is_err());
    }

    fn stage_chain_code(stages: &[BoolCircuit], n: u32, m: u32, x: u64) -> u64 {
        let chain = concat_stages(stages).unwrap();
        chain.eval(x) >> n & ((1 << m) - 1)
    }

    #[test]
    fn stages_compose_to_the_monolith() {
        let n = 6;
        for wmax in [1u32, 2] {
            let codec = BlockCodec::enumerative(n, wmax).unwrap();
            let m = codec.m();
            for num_stages in [1u32, 2, 3, 6] {
                let stages = enumerative_encoder_stages(n, wmax, num_stages).unwrap();
                assert_eq!(stages.len(), num_stages as usize);
                for x in 0..1u64 << n {
                    assert_eq!(
                        stage_chain_code(&stages, n, m, x),
                        codec.encode(x),
                        "wmax={wmax} stages={num_stages} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn stage_widths_are_uniform() {
        let stages = enumerative_encoder_stages(6, 2, 3).unwrap();
        let s = stages[0].n_inputs;
        for st in &stages {
            assert_eq!(st.n_inputs, s);
            assert_eq!(st.outputs.len() as u32, s);
            st.validate().unwrap();
        }
    }

    #[test]
    fn stage_count_bounds() {
        assert!(enumerative_encoder_stages(4, 1, 0).is_err());
        assert!(enumerative_encoder_stages(4, 1, 5).is_err());
        assert!(enumerative_encoder_stages(4, 1, 4).is_ok());
    }

    #[test]
    fn staged_table_composes_to_the_table() {
        let mut rng = crate::rng::SeededRng::new(47);
        for _ in 0..10 {
            let n = 2 + rng.next_below(3) as u32;
            let m = 1 + rng.next_below(3) as u32;
            let table: Vec<u32> = (0..1u64 << n)
                .map(|_| rng.next_below(1 << m) as u32)
                .collect();
            for num_stages in [1u32, 2, 4] {
                let stages = staged_from_table(&table, n, m, num_stages).unwrap();
                for x in 0..1u64 << n {
                    assert_eq!(
                        stage_chain_code(&stages, n, m, x),
                        table[x as usize] as u64,
                        "n={n} m={m} stages={num_stages} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn staged_table_threads_acc_by_xor() {
        // A nonzero starting accumulator must XOR through, not overwrite.
        let table = [0b01u32, 0b10, 0b11, 0b00];
        let stages = staged_from_table(&table, 2, 2, 2).unwrap();
        let chain = concat_stages(&stages).unwrap();
        for x in 0..4u64 {
            for a in 0..4u64 {
                let out = chain.eval(x | a << 2);
                assert_eq!(out >> 2 & 0b11, a ^ table[x as usize] as u64);
                assert_eq!(out & 0b11, x);
            }
        }
    }
}
