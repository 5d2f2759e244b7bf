//! Reversible circuits: X-family gates with typed control polarity plus
//! single-qubit unitaries, named qubit registers, and the `qbc-circuit v1`
//! text format.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::revcomp::resources::GateHistogram;

/// Control polarity: `true` fires on |1⟩, `false` on |0⟩.
pub type Control = (u32, bool);

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X { target: u32 },
    Cx { control: u32, target: u32 },
    Ccx { c1: u32, c2: u32, target: u32 },
    Mcx { controls: Vec<Control>, target: u32 },
    U1 { qubit: u32, matrix: [[Complex64; 2]; 2] },
}

/// Multi-controlled X in its cheapest named form: plain X for no controls,
/// CX/CCX when all controls are positive, MCX otherwise.
pub fn controlled_x(controls: Vec<Control>, target: u32) -> Gate {
    match controls.as_slice() {
        [] => Gate::X { target },
        [(c, true)] => Gate::Cx {
            control: *c,
            target,
        },
        [(c1, true), (c2, true)] => Gate::Ccx {
            c1: *c1,
            c2: *c2,
            target,
        },
        _ => Gate::Mcx { controls, target },
    }
}

impl Gate {
    /// Highest qubit index touched.
    pub fn max_qubit(&self) -> u32 {
        match self {
            Gate::X { target } => *target,
            Gate::Cx { control, target } => (*control).max(*target),
            Gate::Ccx { c1, c2, target } => (*c1).max(*c2).max(*target),
            Gate::Mcx { controls, target } => controls
                .iter()
                .map(|(q, _)| *q)
                .fold(*target, u32::max),
            Gate::U1 { qubit, .. } => *qubit,
        }
    }
}

/// Contiguous qubit range `[start, start + len)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub start: u32,
    pub len: u32,
}

impl Register {
    pub fn new(name: &str, start: u32, len: u32) -> Self {
        Register {
            name: name.to_string(),
            start,
            len,
        }
    }

    pub fn end(&self) -> u32 {
        self.start + self.len
    }

    pub fn qubits(&self) -> impl Iterator<Item = u32> {
        self.start..self.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversibleCircuit {
    pub width: u32,
    pub gates: Vec<Gate>,
    pub registers: Vec<Register>,
    /// Qubits read out at the end, in listed order. Not applied by
    /// simulation helpers; measurement is an explicit operation.
    pub measure: Vec<u32>,
}

impl ReversibleCircuit {
    pub fn new(width: u32) -> Self {
        ReversibleCircuit {
            width,
            gates: Vec::new(),
            registers: Vec::new(),
            measure: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn add_register(&mut self, name: &str, start: u32, len: u32) {
        self.registers.push(Register::new(name, start, len));
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            if g.max_qubit() >= self.width {
                return Err(Error::Input(format!(
                    "gate {i}: qubit {} outside width {}",
                    g.max_qubit(),
                    self.width
                )));
            }
            let distinct = match g {
                Gate::X { .. } | Gate::U1 { .. } => true,
                Gate::Cx { control, target } => control != target,
                Gate::Ccx { c1, c2, target } => c1 != c2 && c1 != target && c2 != target,
                Gate::Mcx { controls, target } => {
                    let mut seen: Vec<u32> = controls.iter().map(|(q, _)| *q).collect();
                    seen.sort_unstable();
                    seen.windows(2).all(|w| w[0] != w[1])
                        && controls.iter().all(|(q, _)| q != target)
                }
            };
            if !distinct {
                return Err(Error::Input(format!(
                    "gate {i}: control and target qubits must be distinct"
                )));
            }
        }
        for r in &self.registers {
            if r.end() > self.width {
                return Err(Error::Input(format!(
                    "register {}: range [{}, {}] outside width {}",
                    r.name,
                    r.start,
                    r.end() - 1,
                    self.width
                )));
            }
        }
        for a in 0..self.registers.len() {
            for b in a + 1..self.registers.len() {
                let (ra, rb) = (&self.registers[a], &self.registers[b]);
                if ra.start < rb.end() && rb.start < ra.end() {
                    return Err(Error::Input(format!(
                        "registers {} and {} overlap",
                        ra.name, rb.name
                    )));
                }
            }
        }
        for q in &self.measure {
            if *q >= self.width {
                return Err(Error::Input(format!(
                    "measure qubit {q} outside width {}",
                    self.width
                )));
            }
        }
        Ok(())
    }

    /// Gate order reversed; the X family is self-inverse, U1 becomes its
    /// conjugate transpose. Measurement has no inverse, so the result
    /// carries no measure list.
    pub fn reverse(&self) -> ReversibleCircuit {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(|g| match g {
                Gate::U1 { qubit, matrix } => Gate::U1 {
                    qubit: *qubit,
                    matrix: dagger(matrix),
                },
                other => other.clone(),
            })
            .collect();
        ReversibleCircuit {
            width: self.width,
            gates,
            registers: self.registers.clone(),
            measure: Vec::new(),
        }
    }

    /// Apply each gate as a classical bit operation. U1 gates have no
    /// classical meaning and are rejected.
    pub fn classical_simulate(&self, bits: &[bool]) -> Result<Vec<bool>> {
        if bits.len() != self.width as usize {
            return Err(Error::Input(format!(
                "assignment has {} bits, circuit width is {}",
                bits.len(),
                self.width
            )));
        }
        let mut v = bits.to_vec();
        for (i, g) in self.gates.iter().enumerate() {
            match g {
                Gate::X { target } => v[*target as usize] ^= true,
                Gate::Cx { control, target } => {
                    if v[*control as usize] {
                        v[*target as usize] ^= true;
                    }
                }
                Gate::Ccx { c1, c2, target } => {
                    if v[*c1 as usize] && v[*c2 as usize] {
                        v[*target as usize] ^= true;
                    }
                }
                Gate::Mcx { controls, target } => {
                    if controls.iter().all(|(q, pol)| v[*q as usize] == *pol) {
                        v[*target as usize] ^= true;
                    }
                }
                Gate::U1 { .. } => {
                    return Err(Error::Input(format!(
                        "gate {i}: u1 is not a classical gate"
                    )));
                }
            }
        }
        Ok(v)
    }

    /// `classical_simulate` for widths up to 64, bit i of the word = qubit i.
    pub fn classical_simulate_u64(&self, input: u64) -> Result<u64> {
        debug_assert!(self.width <= 64);
        let bits: Vec<bool> = (0..self.width).map(|i| input >> i & 1 == 1).collect();
        let out = self.classical_simulate(&bits)?;
        Ok(out
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, b)| acc | (*b as u64) << i))
    }

    pub fn gate_histogram(&self) -> GateHistogram {
        let mut h = GateHistogram::default();
        for g in &self.gates {
            match g {
                Gate::X { .. } => h.x += 1,
                Gate::Cx { .. } => h.cx += 1,
                Gate::Ccx { .. } => h.ccx += 1,
                Gate::Mcx { .. } => h.mcx += 1,
                Gate::U1 { .. } => h.u1 += 1,
            }
        }
        h
    }

    /// Serialize to the `qbc-circuit v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("qbc-circuit v1\n");
        out.push_str(&format!("qubits {}\n", self.width));
        for r in &self.registers {
            if r.len == 0 {
                continue;
            }
            out.push_str(&format!("reg {} {} {}\n", r.name, r.start, r.end() - 1));
        }
        for g in &self.gates {
            match g {
                Gate::X { target } => out.push_str(&format!("x {target}\n")),
                Gate::Cx { control, target } => {
                    out.push_str(&format!("cx {control} {target}\n"))
                }
                Gate::Ccx { c1, c2, target } => {
                    out.push_str(&format!("ccx {c1} {c2} {target}\n"))
                }
                Gate::Mcx { controls, target } => {
                    out.push_str("mcx");
                    for (q, pol) in controls {
                        out.push_str(&format!(" {}{}", if *pol { '+' } else { '-' }, q));
                    }
                    out.push_str(&format!(" ; {target}\n"));
                }
                Gate::U1 { qubit, matrix } => {
                    out.push_str(&format!("u1 {qubit}"));
                    for row in matrix {
                        for z in row {
                            out.push_str(&format!(" {} {}", z.re, z.im));
                        }
                    }
                    out.push('\n');
                }
            }
        }
        if !self.measure.is_empty() {
            out.push_str("measure");
            for q in &self.measure {
                out.push_str(&format!(" {q}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parse the `qbc-circuit v1` text format. Errors carry 1-based line
    /// numbers. `reg` lines must precede gates; `measure` lines are only
    /// legal as a trailing block.
    pub fn from_text(text: &str) -> Result<ReversibleCircuit> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::Input("empty circuit file".into()))?;
        if header != "qbc-circuit v1" {
            return Err(Error::Input(format!(
                "line {ln}: expected header 'qbc-circuit v1'"
            )));
        }

        let (ln, qline) = lines
            .next()
            .ok_or_else(|| Error::Input("missing 'qubits' line".into()))?;
        let width = match qline.strip_prefix("qubits ") {
            Some(rest) => parse_u32(rest.trim(), ln, "qubit count")?,
            None => {
                return Err(Error::Input(format!(
                    "line {ln}: expected 'qubits N'"
                )))
            }
        };

        let mut circuit = ReversibleCircuit::new(width);
        let mut seen_gate = false;
        let mut seen_measure = false;
        for (ln, line) in lines {
            let mut tok = line.split_ascii_whitespace();
            let word = tok.next().unwrap();
            let rest: Vec<&str> = tok.collect();
            if seen_measure && word != "measure" {
                return Err(Error::Input(format!(
                    "line {ln}: '{word}' after a measure line; measure must be the trailing block"
                )));
            }
            match word {
                "reg" => {
                    if seen_gate {
                        return Err(Error::Input(format!(
                            "line {ln}: reg after the first gate"
                        )));
                    }
                    if rest.len() != 3 {
                        return Err(Error::Input(format!(
                            "line {ln}: expected 'reg NAME lo hi'"
                        )));
                    }
                    let lo = parse_u32(rest[1], ln, "register lo")?;
                    let hi = parse_u32(rest[2], ln, "register hi")?;
                    if hi < lo {
                        return Err(Error::Input(format!(
                            "line {ln}: register range {lo}..{hi} is backwards"
                        )));
                    }
                    circuit.add_register(rest[0], lo, hi - lo + 1);
                }
                "x" => {
                    seen_gate = true;
                    let [t] = expect_args::<1>(&rest, ln, "x T")?;
                    circuit.push(Gate::X { target: t });
                }
                "cx" => {
                    seen_gate = true;
                    let [c, t] = expect_args::<2>(&rest, ln, "cx C T")?;
                    circuit.push(Gate::Cx {
                        control: c,
                        target: t,
                    });
                }
                "ccx" => {
                    seen_gate = true;
                    let [c1, c2, t] = expect_args::<3>(&rest, ln, "ccx C1 C2 T")?;
                    circuit.push(Gate::Ccx { c1, c2, target: t });
                }
                "mcx" => {
                    seen_gate = true;
                    let sep = rest.iter().position(|s| *s == ";").ok_or_else(|| {
                        Error::Input(format!("line {ln}: mcx line has no ';' separator"))
                    })?;
                    if sep == 0 || sep + 2 != rest.len() {
                        return Err(Error::Input(format!(
                            "line {ln}: expected 'mcx +C -C ... ; T'"
                        )));
                    }
                    let mut controls = Vec::with_capacity(sep);
                    for c in &rest[..sep] {
                        let (pol, digits) = match c.as_bytes().first() {
                            Some(b'+') => (true, &c[1..]),
                            Some(b'-') => (false, &c[1..]),
                            _ => {
                                return Err(Error::Input(format!(
                                    "line {ln}: mcx control '{c}' lacks a +/- polarity prefix"
                                )))
                            }
                        };
                        controls.push((parse_u32(digits, ln, "mcx control")?, pol));
                    }
                    let target = parse_u32(rest[sep + 1], ln, "mcx target")?;
                    circuit.push(Gate::Mcx { controls, target });
                }
                "u1" => {
                    seen_gate = true;
                    if rest.len() != 9 {
                        return Err(Error::Input(format!(
                            "line {ln}: u1 takes a qubit and 8 matrix components, got {} fields",
                            rest.len()
                        )));
                    }
                    let qubit = parse_u32(rest[0], ln, "u1 qubit")?;
                    let mut f = [0.0f64; 8];
                    for (i, s) in rest[1..].iter().enumerate() {
                        f[i] = s.parse::<f64>().map_err(|_| {
                            Error::Input(format!("line {ln}: bad matrix component '{s}'"))
                        })?;
                    }
                    let matrix = [
                        [Complex64::new(f[0], f[1]), Complex64::new(f[2], f[3])],
                        [Complex64::new(f[4], f[5]), Complex64::new(f[6], f[7])],
                    ];
                    circuit.push(Gate::U1 { qubit, matrix });
                }
                "measure" => {
                    seen_measure = true;
                    if rest.is_empty() {
                        return Err(Error::Input(format!(
                            "line {ln}: measure line lists no qubits"
                        )));
                    }
                    for q in &rest {
                        circuit.measure.push(parse_u32(q, ln, "measure qubit")?);
                    }
                }
                other => {
                    return Err(Error::Input(format!(
                        "line {ln}: unknown directive '{other}'"
                    )));
                }
            }
        }
        circuit.validate()?;
        Ok(circuit)
    }
}

pub(crate) fn dagger(m: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

fn parse_u32(s: &str, ln: usize, what: &str) -> Result<u32> {
    s.parse::<u32>()
        .map_err(|_| Error::Input(format!("line {ln}: bad {what} '{s}'")))
}

fn expect_args<const N: usize>(rest: &[&str], ln: usize, shape: &str) -> Result<[u32; N]> {
    if rest.len() != N {
        return Err(Error::Input(format!("line {ln}: expected '{shape}'")));
    }
    let mut out = [0u32; N];
    for (i, s) in rest.iter().enumerate() {
        out[i] = parse_u32(s, ln, "qubit")?;
    }
    Ok(out)
}
