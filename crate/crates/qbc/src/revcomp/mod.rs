//! Reversible compilation: classical netlists, reversible circuits and
//! their text format, truth-table and compute-copy-uncompute synthesis,
//! disentangling composition, and pebble-game scheduling.

pub mod bool_circuit;
pub mod circuit;
pub mod enumerative;
pub mod pebble;
pub mod resources;
pub mod synth;

pub use bool_circuit::{concat_stages, BoolCircuit, BoolGate, BoolOp, WireRef};
pub use circuit::{controlled_x, Control, Gate, Register, ReversibleCircuit};
pub use enumerative::{
    enumerative_encoder_bool_circuit, enumerative_encoder_stages, staged_from_table,
};
pub use pebble::{
    pebble_schedule, pebbled_compile, validate_schedule, Move, PebbleSchedule,
    ScheduleViolation,
};
pub use resources::{resource_report, resource_report_scheduled, GateHistogram, ResourceReport};
pub use synth::{
    bennett_compile, bennett_drev, bool_circuit_from_table, compose_disentangled,
    synthesize_crev_from_table, synthesize_drev_from_table,
};
