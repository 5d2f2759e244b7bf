//! Reversible pebble game over a linear chain of circuit segments.
//!
//! A pebble on segment i means segment i's checkpoint is materialized in a
//! qubit slot. Placing or removing pebble i needs the predecessor's
//! checkpoint (or the circuit input for i = 1). The recursive schedule
//! trades recomputation for slots: fan-in m and depth k cover m^k segments
//! with k(m-1)+1 slots and (2m-1)^k segment evaluations.

use crate::error::{Error, Result};
use crate::revcomp::bool_circuit::BoolCircuit;
use crate::revcomp::circuit::{Gate, ReversibleCircuit};
use crate::revcomp::synth::{bennett_block, remap_gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Evaluate segment i (1-based) into a fresh slot.
    Place(u32),
    /// Uncompute segment i, freeing its slot.
    Remove(u32),
}

impl Move {
    pub fn segment(&self) -> u32 {
        match self {
            Move::Place(i) | Move::Remove(i) => *i,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PebbleSchedule {
    pub num_segments: u32,
    pub moves: Vec<Move>,
    /// (fan-in m, depth k) for generated schedules.
    pub params: (u32, u32),
}

impl PebbleSchedule {
    /// Total moves: every place and every remove evaluates one segment.
    pub fn place_moves(&self) -> u64 {
        self.moves.len() as u64
    }

    /// Peak number of simultaneous pebbles over the walk.
    pub fn max_pebbles(&self) -> u32 {
        let mut on = vec![false; self.num_segments as usize + 1];
        let mut live = 0u32;
        let mut peak = 0u32;
        for mv in &self.moves {
            let i = mv.segment() as usize;
            if i == 0 || i > self.num_segments as usize {
                continue;
            }
            match mv {
                Move::Place(_) if !on[i] => {
                    on[i] = true;
                    live += 1;
                    peak = peak.max(live);
                }
                Move::Remove(_) if on[i] => {
                    on[i] = false;
                    live -= 1;
                }
                _ => {}
            }
        }
        peak
    }
}

/// The recursive space-time trade-off schedule for m^k segments.
pub fn pebble_schedule(m: u32, k: u32) -> Result<PebbleSchedule> {
    if m < 2 || k < 1 {
        return Err(Error::Input(format!(
            "pebble schedule needs fan-in >= 2 and depth >= 1, got ({m}, {k})"
        )));
    }
    let segments = (m as u64).checked_pow(k).filter(|s| *s <= 1 << 20);
    let num_segments = match segments {
        Some(s) => s as u32,
        None => {
            return Err(Error::Capacity(format!(
                "{m}^{k} segments exceeds the 2^20 schedule bound"
            )))
        }
    };
    // The move list has (2m-1)^k entries; refuse sizes that cannot be
    // materialized even when the segment count itself is in range.
    if (2 * m as u64 - 1).checked_pow(k).filter(|t| *t <= 1 << 24).is_none() {
        return Err(Error::Capacity(format!(
            "{}^{k} moves exceeds the 2^24 schedule bound",
            2 * m - 1
        )));
    }
    let mut moves = Vec::new();
    advance(m, k, 0, &mut moves);
    Ok(PebbleSchedule {
        num_segments,
        moves,
        params: (m, k),
    })
}

/// Starting from a checkpoint at `base` (0 = circuit input), pebble
/// `base + m^k` and clear everything in between.
fn advance(m: u32, k: u32, base: u32, moves: &mut Vec<Move>) {
    if k == 0 {
        moves.push(Move::Place(base + 1));
        return;
    }
    let chunk = m.pow(k - 1);
    let mark = moves.len();
    for c in 0..m {
        advance(m, k - 1, base + c * chunk, moves);
    }
    // Clear the interior checkpoints, highest first so each keeps its
    // predecessor until its own uncomputation runs. Uncomputing chunk c is
    // the chunk's own move list reversed with place/remove swapped; chunk
    // boundaries within the recorded range are found by replaying lengths.
    let mut spans = Vec::with_capacity(m as usize);
    let mut pos = mark;
    for _ in 0..m {
        let len = advance_len(m, k - 1);
        spans.push(pos..pos + len);
        pos += len;
    }
    for c in (0..m as usize - 1).rev() {
        let undo: Vec<Move> = moves[spans[c].clone()]
            .iter()
            .rev()
            .map(|mv| match mv {
                Move::Place(i) => Move::Remove(*i),
                Move::Remove(i) => Move::Place(*i),
            })
            .collect();
        moves.extend(undo);
    }
}

fn advance_len(m: u32, k: u32) -> usize {
    (2 * m as usize - 1).pow(k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleViolation {
    /// Index into the move list; None for end-state violations.
    pub move_index: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.move_index {
            Some(i) => write!(f, "move {i}: {}", self.message),
            None => write!(f, "end state: {}", self.message),
        }
    }
}

/// Check the game rules; an empty list means the schedule is legal and
/// finishes with exactly one pebble, on the last segment.
pub fn validate_schedule(schedule: &PebbleSchedule) -> Vec<ScheduleViolation> {
    let t = schedule.num_segments as usize;
    let mut on = vec![false; t + 1];
    let mut violations = Vec::new();
    for (idx, mv) in schedule.moves.iter().enumerate() {
        let i = mv.segment() as usize;
        if i == 0 || i > t {
            violations.push(ScheduleViolation {
                move_index: Some(idx),
                message: format!("segment {i} outside 1..={t}"),
            });
            continue;
        }
        if i > 1 && !on[i - 1] {
            violations.push(ScheduleViolation {
                move_index: Some(idx),
                message: format!("segment {} carries no pebble", i - 1),
            });
        }
        match mv {
            Move::Place(_) => {
                if on[i] {
                    violations.push(ScheduleViolation {
                        move_index: Some(idx),
                        message: format!("segment {i} is already pebbled"),
                    });
                }
                on[i] = true;
            }
            Move::Remove(_) => {
                if !on[i] {
                    violations.push(ScheduleViolation {
                        move_index: Some(idx),
                        message: format!("segment {i} carries no pebble to remove"),
                    });
                }
                on[i] = false;
            }
        }
    }
    let want: Vec<usize> = (1..=t).filter(|i| on[*i]).collect();
    if want != [t] {
        violations.push(ScheduleViolation {
            move_index: None,
            message: format!(
                "final pebbles on {want:?}, expected only the last segment [{t}]"
            ),
        });
    }
    violations
}

/// Walk a schedule, emitting one Bennett block per move. `chk0` names the
/// qubits holding checkpoint 0; slots live at `slots_base + j*s_live`;
/// scratch for the blocks starts at `work_base`. Returns the gates and the
/// slot index where the final checkpoint lands.
pub(crate) fn scheduled_gates(
    stages: &[BoolCircuit],
    schedule: &PebbleSchedule,
    chk0: &[u32],
    slots_base: u32,
    num_slots: u32,
    work_base: u32,
) -> Result<(Vec<Gate>, u32)> {
    let s_live = chk0.len() as u32;
    let slot_qubits = |slot: u32| -> Vec<u32> {
        let base = slots_base + slot * s_live;
        (base..base + s_live).collect()
    };
    let mut slot_of = vec![u32::MAX; schedule.num_segments as usize + 1];
    let mut free: Vec<bool> = vec![true; num_slots as usize];
    let mut gates = Vec::new();
    for mv in &schedule.moves {
        let i = mv.segment();
        let stage = &stages[i as usize - 1];
        let source: Vec<u32> = if i == 1 {
            chk0.to_vec()
        } else {
            slot_qubits(slot_of[i as usize - 1])
        };
        match mv {
            Move::Place(_) => {
                let slot = free
                    .iter()
                    .position(|f| *f)
                    .ok_or_else(|| Error::Capacity("pebble slots exhausted".into()))?
                    as u32;
                free[slot as usize] = false;
                slot_of[i as usize] = slot;
                gates.extend(bennett_block(
                    stage,
                    &source,
                    &slot_qubits(slot),
                    work_base,
                )?);
            }
            Move::Remove(_) => {
                // The block is an involution: re-emitting it against the
                // current slot assignment cancels the earlier placement by
                // value, even if the predecessor has moved slots since.
                let slot = slot_of[i as usize];
                let mut undo = bennett_block(stage, &source, &slot_qubits(slot), work_base)?;
                undo.reverse();
                gates.extend(undo);
                free[slot as usize] = true;
                slot_of[i as usize] = u32::MAX;
            }
        }
    }
    Ok((gates, slot_of[schedule.num_segments as usize]))
}

/// Compile a chain of equal-width stages under a pebble schedule. Stage i
/// maps checkpoint i-1 to checkpoint i; all stages share one scratch pool.
/// Layout: input = [0, s), scratch and intermediate slots, output = the
/// top s qubits. Work and intermediate slots end at zero.
pub fn pebbled_compile(
    stages: &[BoolCircuit],
    schedule: &PebbleSchedule,
) -> Result<ReversibleCircuit> {
    if stages.len() != schedule.num_segments as usize {
        return Err(Error::Input(format!(
            "{} stages but the schedule covers {} segments",
            stages.len(),
            schedule.num_segments
        )));
    }
    let violations = validate_schedule(schedule);
    if let Some(v) = violations.first() {
        return Err(Error::Input(format!("invalid schedule: {v}")));
    }
    let s_live = stages[0].n_inputs;
    for (i, st) in stages.iter().enumerate() {
        st.validate()?;
        if st.n_inputs != s_live || st.outputs.len() as u32 != s_live {
            return Err(Error::Input(format!(
                "stage {i} is {} -> {}, expected uniform width {s_live}",
                st.n_inputs,
                st.outputs.len()
            )));
        }
    }
    let num_slots = schedule.max_pebbles();
    let pool = stages.iter().map(|s| s.gates.len()).max().unwrap_or(0) as u32;
    let slots_base = s_live + pool;
    let width = s_live + pool + num_slots * s_live;
    let chk0: Vec<u32> = (0..s_live).collect();
    let (gates, final_slot) =
        scheduled_gates(stages, schedule, &chk0, slots_base, num_slots, s_live)?;

    // Relabel so the output checkpoint occupies the top slot, making the
    // register map contiguous: input, work, output.
    let mut map: Vec<u32> = (0..width).collect();
    if final_slot != num_slots - 1 {
        for off in 0..s_live {
            let a = (slots_base + final_slot * s_live + off) as usize;
            let b = (slots_base + (num_slots - 1) * s_live + off) as usize;
            map.swap(a, b);
        }
    }
    let mut c = ReversibleCircuit::new(width);
    c.gates = gates.iter().map(|g| remap_gate(g, &map)).collect();
    c.add_register("input", 0, s_live);
    if width > 2 * s_live {
        c.add_register("work", s_live, width - 2 * s_live);
    }
    c.add_register("output", width - s_live, s_live);
    c.validate()?;
    Ok(c)
}
