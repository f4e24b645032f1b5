use std::collections::BTreeMap;

use serde::Serialize;

use super::{Circuit, Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitStats {
    pub num_qubits: usize,
    pub total_gates: usize,
    /// Layers of an as-soon-as-possible schedule in which each gate occupies
    /// every qubit it touches.
    pub depth: usize,
    /// Gate counts keyed by kind. Controlled gates carry a `c` prefix, or
    /// `c<k>` for `k >= 2` controls: `cx`, `c3ry`.
    pub counts: BTreeMap<String, usize>,
    pub max_controls: usize,
}

fn count_key(gate: &Gate) -> String {
    let label = gate.kind().label();
    match (gate.kind(), gate.controls().len()) {
        (GateKind::CSwap, _) | (_, 0) => label.to_string(),
        (_, 1) => format!("c{label}"),
        (_, k) => format!("c{k}{label}"),
    }
}

pub fn depth_and_counts(circuit: &Circuit) -> CircuitStats {
    let mut frontier = vec![0usize; circuit.num_qubits()];
    let mut counts = BTreeMap::new();
    let mut depth = 0;
    let mut max_controls = 0;
    for gate in circuit.gates() {
        let layer = gate.qubits().map(|q| frontier[q]).max().unwrap_or(0) + 1;
        for q in gate.qubits() {
            frontier[q] = layer;
        }
        depth = depth.max(layer);
        max_controls = max_controls.max(gate.controls().len());
        *counts.entry(count_key(gate)).or_insert(0) += 1;
    }
    CircuitStats {
        num_qubits: circuit.num_qubits(),
        total_gates: circuit.len(),
        depth,
        counts,
        max_controls,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Control, Metadata};

    #[test]
    fn layers_and_keys() {
        let mut c = Circuit::new(3, Metadata::new("t"));
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::h(1)).unwrap();
        c.push(Gate::cnot(0, 2)).unwrap();
        c.push(Gate::ry(0.1, 1).with_controls(vec![Control::negative(0), Control::positive(2)]))
            .unwrap();
        c.push(Gate::cswap(0, 1, 2)).unwrap();
        let s = depth_and_counts(&c);
        assert_eq!(s.depth, 4);
        assert_eq!(s.total_gates, 5);
        assert_eq!(s.max_controls, 2);
        assert_eq!(s.counts["h"], 2);
        assert_eq!(s.counts["cx"], 1);
        assert_eq!(s.counts["c2ry"], 1);
        assert_eq!(s.counts["cswap"], 1);
        assert_eq!(
            depth_and_counts(&Circuit::new(2, Metadata::default())).depth,
            0
        );
    }
}
