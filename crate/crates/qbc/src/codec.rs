//! Classical fixed-length block codecs: total encode {0,1}^n -> {0,1}^m and
//! decode {0,1}^m -> {0,1}^n maps with quantified failure probability.
//!
//! Two families are provided. The probability-ranked codec codes the 2^m most
//! probable strings of a product Bernoulli law and is failure-optimal at its
//! rate. The enumerative codec codes all strings up to a weight bound through
//! a weight-class offset plus combinatorial rank, which has a compact circuit
//! realization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest n for table-backed codecs (2^n-entry tables).
pub const MAX_TABLE_N: u32 = 24;
/// Largest n for streaming (table-free) rate computations.
pub const MAX_STREAM_N: u32 = 127;

/// Exact binomial coefficients by Pascal's triangle; rows 0..=n_max.
/// n_max = 127 keeps every entry and every row prefix sum inside u128.
pub(crate) struct Binomials {
    rows: Vec<Vec<u128>>,
}

impl Binomials {
    pub(crate) fn new(n_max: u32) -> Self {
        assert!(n_max <= MAX_STREAM_N);
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max as usize {
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        Binomials { rows }
    }

    pub(crate) fn get(&self, n: u32, k: u32) -> u128 {
        if k > n {
            0
        } else {
            self.rows[n as usize][k as usize]
        }
    }
}

/// All n-bit strings of Hamming weight w in ascending numeric order
/// (Gosper's hack).
pub struct WeightStrings {
    cur: u64,
    n: u32,
    w: u32,
    done: bool,
}

impl WeightStrings {
    pub fn new(n: u32, w: u32) -> Self {
        assert!(w <= n && n < 64);
        WeightStrings {
            cur: if w == 0 { 0 } else { (1u64 << w) - 1 },
            n,
            w,
            done: false,
        }
    }
}

impl Iterator for WeightStrings {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        let x = self.cur;
        if self.w == 0 || self.w == self.n {
            self.done = true;
            return Some(x);
        }
        let c = x & x.wrapping_neg();
        let r = x + c;
        let nxt = (((x ^ r) >> 2) / c) | r;
        if nxt >= (1u64 << self.n) {
            self.done = true;
        } else {
            self.cur = nxt;
        }
        Some(x)
    }
}

fn validate_q(q: (f64, f64)) -> Result<()> {
    let (q0, q1) = q;
    if !(q0.is_finite() && q1.is_finite()) || q0 < 0.0 || q1 < 0.0 {
        return Err(Error::Input(format!(
            "bit probabilities ({q0}, {q1}) must be nonnegative"
        )));
    }
    if (q0 + q1 - 1.0).abs() > 1e-9 {
        return Err(Error::Input(format!(
            "bit probabilities ({q0}, {q1}) must sum to 1"
        )));
    }
    Ok(())
}

/// Per-weight string probability q0^(n-w) * q1^w for w = 0..=n.
fn weight_probs(q: (f64, f64), n: u32) -> Vec<f64> {
    (0..=n)
        .map(|w| q.0.powi((n - w) as i32) * q.1.powi(w as i32))
        .collect()
}

/// Weight classes ordered by descending string probability; classes whose
/// probabilities are exactly equal are merged into one group, because the
/// rank order inside such a group is global numeric order, not class order.
fn weight_groups(q: (f64, f64), n: u32) -> Vec<Vec<u32>> {
    let pw = weight_probs(q, n);
    let mut ws: Vec<u32> = (0..=n).collect();
    ws.sort_by(|&a, &b| {
        pw[b as usize]
            .partial_cmp(&pw[a as usize])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut groups: Vec<Vec<u32>> = Vec::new();
    for w in ws {
        match groups.last_mut() {
            Some(g) if pw[g[0] as usize] == pw[w as usize] => g.push(w),
            _ => groups.push(vec![w]),
        }
    }
    groups
}

/// Which concrete codec family a table was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum CodecKind {
    /// Probability-ranked: carries the Bernoulli parameter it was built for.
    OptimalRanked { q1: f64 },
    Enumerative { wmax: u32 },
    Identity,
    ExplicitTable,
}

/// A total fixed-length block codec, table-backed.
#[derive(Debug, Clone)]
pub struct BlockCodec {
    n: u32,
    m: u32,
    kind: CodecKind,
    encode: Vec<u32>,
    decode: Vec<u32>,
}

impl BlockCodec {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn kind(&self) -> &CodecKind {
        &self.kind
    }

    pub fn encode(&self, x: u64) -> u64 {
        self.encode[x as usize] as u64
    }

    pub fn decode(&self, c: u64) -> u64 {
        self.decode[c as usize] as u64
    }

    pub fn encode_table(&self) -> &[u32] {
        &self.encode
    }

    pub fn decode_table(&self) -> &[u32] {
        &self.decode
    }

    /// Does x survive the round trip?
    pub fn is_lossless(&self, x: u64) -> bool {
        self.decode(self.encode(x)) == x
    }

    pub fn lossless_count(&self) -> u64 {
        (0..1u64 << self.n).filter(|&x| self.is_lossless(x)).count() as u64
    }

    fn check_dims(n: u32, m: u32) -> Result<()> {
        if n < 1 {
            return Err(Error::Input("block length n must be at least 1".into()));
        }
        if m > n {
            return Err(Error::Input(format!(
                "code length m={m} exceeds block length n={n}"
            )));
        }
        if n > MAX_TABLE_N {
            return Err(Error::Capacity(format!(
                "n={n} exceeds the table bound {MAX_TABLE_N}"
            )));
        }
        Ok(())
    }

    /// The identity-rate codec: m = n, encode and decode both the identity.
    pub fn identity(n: u32) -> Result<Self> {
        Self::check_dims(n, n)?;
        let table: Vec<u32> = (0..1u32 << n).collect();
        Ok(BlockCodec {
            n,
            m: n,
            kind: CodecKind::Identity,
            encode: table.clone(),
            decode: table,
        })
    }

    /// Explicit tables; encode must be total on {0,1}^n with m-bit values,
    /// decode total on {0,1}^m with n-bit values.
    pub fn from_tables(n: u32, m: u32, encode: Vec<u32>, decode: Vec<u32>) -> Result<Self> {
        Self::check_dims(n, m)?;
        if encode.len() != 1usize << n {
            return Err(Error::Input(format!(
                "encode table has {} entries, expected {}",
                encode.len(),
                1usize << n
            )));
        }
        if decode.len() != 1usize << m {
            return Err(Error::Input(format!(
                "decode table has {} entries, expected {}",
                decode.len(),
                1usize << m
            )));
        }
        if let Some((x, &c)) = encode.iter().enumerate().find(|(_, &c)| c as u64 >= 1u64 << m) {
            return Err(Error::Input(format!(
                "encode[{x}] = {c} does not fit in {m} bits"
            )));
        }
        if let Some((c, &x)) = decode.iter().enumerate().find(|(_, &x)| x as u64 >= 1u64 << n) {
            return Err(Error::Input(format!(
                "decode[{c}] = {x} does not fit in {n} bits"
            )));
        }
        Ok(BlockCodec {
            n,
            m,
            kind: CodecKind::ExplicitTable,
            encode,
            decode,
        })
    }

    /// Probability-ranked codec: the 2^m most probable strings under the
    /// product Bernoulli(q1) law are coded injectively in rank order
    /// (descending probability, ties broken by ascending numeric value);
    /// everything else encodes to codeword 0.
    pub fn optimal_ranked(q: (f64, f64), n: u32, m: u32) -> Result<Self> {
        Self::check_dims(n, m)?;
        validate_q(q)?;
        let size = 1u64 << n;
        let cap = 1u64 << m;
        let mut encode = vec![0u32; size as usize];
        let mut decode = vec![0u32; cap as usize];
        let mut rank = 0u64;
        'fill: for group in weight_groups(q, n) {
            if group.len() == 1 {
                for x in WeightStrings::new(n, group[0]) {
                    if rank == cap {
                        break 'fill;
                    }
                    encode[x as usize] = rank as u32;
                    decode[rank as usize] = x as u32;
                    rank += 1;
                }
            } else {
                // Equal-probability weights interleave: a single ascending
                // scan realizes the numeric tie-break across the whole group.
                let mut in_group = [false; 65];
                for &w in &group {
                    in_group[w as usize] = true;
                }
                for x in 0..size {
                    if in_group[x.count_ones() as usize] {
                        if rank == cap {
                            break 'fill;
                        }
                        encode[x as usize] = rank as u32;
                        decode[rank as usize] = x as u32;
                        rank += 1;
                    }
                }
            }
        }
        Ok(BlockCodec {
            n,
            m,
            kind: CodecKind::OptimalRanked { q1: q.1 },
            encode,
            decode,
        })
    }

    /// Enumerative codec covering all strings of weight <= wmax.
    pub fn enumerative(n: u32, wmax: u32) -> Result<Self> {
        if wmax > n {
            return Err(Error::Input(format!("wmax={wmax} exceeds n={n}")));
        }
        Self::check_dims(n, enumerative_code_bits(n, wmax)?)?;
        let m = enumerative_code_bits(n, wmax)?;
        let encode: Vec<u32> = (0..1u64 << n)
            .map(|x| enumerative_encode_stream(n, wmax, x).unwrap() as u32)
            .collect();
        let decode: Vec<u32> = (0..1u64 << m)
            .map(|c| enumerative_decode_stream(n, wmax, c).unwrap() as u32)
            .collect();
        Ok(BlockCodec {
            n,
            m,
            kind: CodecKind::Enumerative { wmax },
            encode,
            decode,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodecFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("codec file: {e}")))?;
        match file {
            CodecFile::ExplicitTable { n, m, encode, decode } => {
                Self::from_tables(n, m, encode, decode)
            }
            CodecFile::Optimal { q1, n, m } => {
                if !(0.0..=1.0).contains(&q1) {
                    return Err(Error::Input(format!(
                        "codec file: q1={q1} is not a probability"
                    )));
                }
                Self::optimal_ranked((1.0 - q1, q1), n, m)
            }
            CodecFile::Enumerative { n, wmax } => Self::enumerative(n, wmax),
            CodecFile::Identity { n } => Self::identity(n),
        }
    }

    pub fn to_json(&self) -> String {
        let file = match &self.kind {
            CodecKind::OptimalRanked { q1 } => CodecFile::Optimal {
                q1: *q1,
                n: self.n,
                m: self.m,
            },
            CodecKind::Enumerative { wmax } => CodecFile::Enumerative {
                n: self.n,
                wmax: *wmax,
            },
            CodecKind::Identity => CodecFile::Identity { n: self.n },
            CodecKind::ExplicitTable => CodecFile::ExplicitTable {
                n: self.n,
                m: self.m,
                encode: self.encode.clone(),
                decode: self.decode.clone(),
            },
        };
        serde_json::to_string(&file).expect("codec serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum CodecFile {
    #[serde(rename = "explicit-table")]
    ExplicitTable {
        n: u32,
        m: u32,
        encode: Vec<u32>,
        decode: Vec<u32>,
    },
    #[serde(rename = "optimal")]
    Optimal { q1: f64, n: u32, m: u32 },
    #[serde(rename = "enumerative")]
    Enumerative { n: u32, wmax: u32 },
    #[serde(rename = "identity")]
    Identity { n: u32 },
}

/// Code length of the enumerative codec: ceil(log2 of the typical-set size).
pub fn enumerative_code_bits(n: u32, wmax: u32) -> Result<u32> {
    if wmax > n || n > 63 {
        return Err(Error::Input(format!(
            "enumerative parameters n={n}, wmax={wmax} out of range (wmax <= n <= 63)"
        )));
    }
    let b = Binomials::new(n);
    let total: u128 = (0..=wmax).map(|w| b.get(n, w)).sum();
    let mut m = 0;
    while (1u128 << m) < total {
        m += 1;
    }
    Ok(m)
}

/// Table-free enumerative encode: weight-class offset plus combinatorial
/// rank; atypical strings (weight > wmax) go to codeword 0.
pub fn enumerative_encode_stream(n: u32, wmax: u32, x: u64) -> Result<u64> {
    if wmax > n || n > 63 {
        return Err(Error::Input(format!(
            "enumerative parameters n={n}, wmax={wmax} out of range (wmax <= n <= 63)"
        )));
    }
    if x >= 1u64 << n {
        return Err(Error::Input(format!("input {x} does not fit in {n} bits")));
    }
    let w = x.count_ones();
    if w > wmax {
        return Ok(0);
    }
    let b = Binomials::new(n);
    let offset: u128 = (0..w).map(|v| b.get(n, v)).sum();
    // Combinatorial number system: the j-th one (ascending positions) at
    // position c_j contributes C(c_j, j).
    let mut rank: u128 = 0;
    let mut j = 0u32;
    for pos in 0..n {
        if x >> pos & 1 == 1 {
            j += 1;
            rank += b.get(pos, j);
        }
    }
    Ok((offset + rank) as u64)
}

/// Inverse of `enumerative_encode_stream` on valid codewords; codewords
/// beyond the typical-set size decode to the all-zero string.
pub fn enumerative_decode_stream(n: u32, wmax: u32, c: u64) -> Result<u64> {
    if wmax > n || n > 63 {
        return Err(Error::Input(format!(
            "enumerative parameters n={n}, wmax={wmax} out of range (wmax <= n <= 63)"
        )));
    }
    let b = Binomials::new(n);
    let mut c = c as u128;
    let mut w = 0u32;
    loop {
        if w > wmax {
            return Ok(0); // past the typical set
        }
        let class = b.get(n, w);
        if c < class {
            break;
        }
        c -= class;
        w += 1;
    }
    // Unrank c within the weight-w class.
    let mut x = 0u64;
    let mut hi = n;
    for j in (1..=w).rev() {
        let mut pos = hi - 1;
        while b.get(pos, j) > c {
            pos -= 1;
        }
        x |= 1u64 << pos;
        c -= b.get(pos, j);
        hi = pos;
    }
    Ok(x)
}

/// Probability mass of the strings the codec loses, under the product
/// Bernoulli(q1) law.
pub fn failure_probability(codec: &BlockCodec, q: (f64, f64)) -> Result<f64> {
    validate_q(q)?;
    let pw = weight_probs(q, codec.n());
    let mut failed = 0.0;
    for x in 0..1u64 << codec.n() {
        if !codec.is_lossless(x) {
            failed += pw[x.count_ones() as usize];
        }
    }
    Ok(failed)
}

/// Smallest m whose probability-ranked codec fails with probability at most
/// delta. Streaming (no tables), so n can go well past the table bound.
pub fn choose_code_length(q: (f64, f64), n: u32, delta: f64) -> Result<u32> {
    validate_q(q)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Input(format!("delta={delta} is not a probability")));
    }
    if n < 1 {
        return Err(Error::Input("block length n must be at least 1".into()));
    }
    if n > MAX_STREAM_N {
        return Err(Error::Capacity(format!(
            "n={n} exceeds the enumeration bound {MAX_STREAM_N}"
        )));
    }
    let b = Binomials::new(n);
    let pw = weight_probs(q, n);
    let groups = weight_groups(q, n);
    for m in 0..=n {
        let mut remaining: u128 = 1u128 << m;
        let mut covered = 0.0f64;
        for group in &groups {
            let count: u128 = group.iter().map(|&w| b.get(n, w)).sum();
            let p = pw[group[0] as usize];
            if count <= remaining {
                covered += count as f64 * p;
                remaining -= count;
            } else {
                // Partial group: the taken strings share the group's
                // probability, so only the count matters.
                covered += remaining as f64 * p;
                break;
            }
        }
        // Absolute slack so knife-edge cases (failure mathematically equal
        // to delta) do not flip on the last float ulp.
        if 1.0 - covered <= delta + 1e-12 {
            return Ok(m);
        }
    }
    Ok(n)
}
