use std::fmt::Write;

use super::{Circuit, Gate, GateKind, Polarity};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QasmOptions {
    /// Replace `negctrl` modifiers by `x` gates around a positively controlled
    /// gate, for consumers that do not accept `negctrl`.
    pub x_conjugation: bool,
}

/// OpenQASM 3 text for `circuit`. `q[k]` is qubit `q_k`, so bit `k` of a
/// basis index is the state of `q[k]`. Angles use the shortest decimal form
/// that parses back to the same `f64`.
pub fn export_qasm(circuit: &Circuit, options: QasmOptions) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 3.0;\ninclude \"stdgates.inc\";\n");
    out.push_str("// little endian: bit k of a basis index is q[k]\n");
    let _ = writeln!(out, "qubit[{}] q;", circuit.num_qubits());
    for gate in circuit.gates() {
        write_gate(&mut out, gate, options);
    }
    out
}

fn write_gate(out: &mut String, gate: &Gate, options: QasmOptions) {
    let negated: Vec<usize> = if options.x_conjugation {
        gate.controls()
            .iter()
            .filter(|c| c.polarity == Polarity::Negative)
            .map(|c| c.qubit)
            .collect()
    } else {
        Vec::new()
    };
    for q in &negated {
        let _ = writeln!(out, "x q[{q}];");
    }

    let base = match gate.kind() {
        GateKind::Ry(theta) => format!("ry({theta})"),
        GateKind::H => "h".into(),
        GateKind::X => "x".into(),
        GateKind::Swap => "swap".into(),
        GateKind::CSwap => "cswap".into(),
    };
    let modifier_controls = if gate.kind() == GateKind::CSwap {
        &[][..]
    } else {
        gate.controls()
    };

    let mut line = String::new();
    let mut k = 0;
    while k < modifier_controls.len() {
        let pol = if options.x_conjugation {
            Polarity::Positive
        } else {
            modifier_controls[k].polarity
        };
        let mut run = 1;
        while k + run < modifier_controls.len()
            && (options.x_conjugation || modifier_controls[k + run].polarity == pol)
        {
            run += 1;
        }
        let name = match pol {
            Polarity::Positive => "ctrl",
            Polarity::Negative => "negctrl",
        };
        if run == 1 {
            let _ = write!(line, "{name} @ ");
        } else {
            let _ = write!(line, "{name}({run}) @ ");
        }
        k += run;
    }
    line.push_str(&base);
    let operands: Vec<String> = gate
        .controls()
        .iter()
        .map(|c| c.qubit)
        .chain(gate.targets().iter().copied())
        .map(|q| format!("q[{q}]"))
        .collect();
    let _ = writeln!(out, "{line} {};", operands.join(", "));

    for q in &negated {
        let _ = writeln!(out, "x q[{q}];");
    }
}
