//! Exact resource accounting for compiled circuits and pebble schedules.

use serde::{Deserialize, Serialize};

use crate::revcomp::circuit::ReversibleCircuit;
use crate::revcomp::pebble::PebbleSchedule;

/// Gate counts by kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateHistogram {
    pub x: u64,
    pub cx: u64,
    pub ccx: u64,
    pub mcx: u64,
    pub u1: u64,
}

impl GateHistogram {
    pub fn total(&self) -> u64 {
        self.x + self.cx + self.ccx + self.mcx + self.u1
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResourceReport {
    pub width: u32,
    pub gates: GateHistogram,
    /// Qubits beyond the input and code registers.
    pub ancilla_count: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_pebbles: Option<u32>,
    /// Stage evaluations including recomputation, when a schedule is known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub segment_evaluations: Option<u64>,
}

/// Accounting for a circuit alone; schedule-derived fields stay empty.
pub fn resource_report(circuit: &ReversibleCircuit) -> ResourceReport {
    let named: u32 = ["input", "code"]
        .iter()
        .filter_map(|n| circuit.register(n))
        .map(|r| r.len)
        .sum();
    ResourceReport {
        width: circuit.width,
        gates: circuit.gate_histogram(),
        ancilla_count: circuit.width - named,
        max_pebbles: None,
        segment_evaluations: None,
    }
}

/// Accounting for a scheduled compilation.
pub fn resource_report_scheduled(
    circuit: &ReversibleCircuit,
    schedule: &PebbleSchedule,
) -> ResourceReport {
    let mut report = resource_report(circuit);
    report.max_pebbles = Some(schedule.max_pebbles());
    report.segment_evaluations = Some(schedule.place_moves());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revcomp::circuit::Gate;

    #[test]
    fn cx_only_histogram() {
        let mut c = ReversibleCircuit::new(3);
        for _ in 0..5 {
            c.push(Gate::Cx {
                control: 0,
                target: 1,
            });
        }
        let r = resource_report(&c);
        assert_eq!(r.gates.cx, 5);
        assert_eq!(r.gates.total(), 5);
        assert_eq!(r.width, 3);
    }

    #[test]
    fn ancilla_is_width_minus_named_registers() {
        let mut c = ReversibleCircuit::new(9);
        c.add_register("input", 0, 4);
        c.add_register("code", 4, 2);
        c.add_register("work", 6, 3);
        assert_eq!(resource_report(&c).ancilla_count, 3);
    }

    #[test]
    fn report_json_omits_unset_schedule_fields() {
        let c = ReversibleCircuit::new(2);
        let j = serde_json::to_string(&resource_report(&c)).unwrap();
        assert!(!j.contains("max_pebbles"), "{j}");
        assert!(j.contains("\"ancilla_count\":2"), "{j}");
    }
}
