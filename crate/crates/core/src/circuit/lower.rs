use super::{Circuit, Control, Gate, GateKind, Polarity};
use crate::{Error, Result};

/// Rewrites a circuit into uncontrolled `RY`, `H` and `X`, `CNOT` and
/// `CSWAP`.
///
/// Consecutive rotations of one target conditioned on the same control set
/// form a uniformly controlled rotation, which is expanded along a Gray code
/// into `2^k` single-qubit rotations and `2^k` CNOTs. A rotation standing
/// alone has its negative controls conjugated by `X` first, as do negatively
/// controlled CNOTs. `SWAP` becomes three CNOTs.
pub fn lower_to_basis(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.num_qubits(), circuit.metadata.clone());
    let gates = circuit.gates();
    let mut start = 0;
    while start < gates.len() {
        let gate = &gates[start];
        match gate.kind() {
            GateKind::Ry(_) if !gate.controls().is_empty() => {
                let key = control_set(gate);
                let mut end = start + 1;
                while end < gates.len()
                    && matches!(gates[end].kind(), GateKind::Ry(_))
                    && gates[end].target() == gate.target()
                    && control_set(&gates[end]) == key
                {
                    end += 1;
                }
                if end - start == 1 {
                    // A lone rotation: flip its negative controls so that it
                    // fires on the all-ones pattern.
                    let negatives: Vec<usize> = gate
                        .controls()
                        .iter()
                        .filter(|c| !c.polarity.bit())
                        .map(|c| c.qubit)
                        .collect();
                    let GateKind::Ry(theta) = gate.kind() else {
                        unreachable!()
                    };
                    let mut alpha = vec![0.0; 1 << key.len()];
                    *alpha.last_mut().expect("nonempty") = theta;
                    for &q in &negatives {
                        out.push_unchecked(Gate::x(q));
                    }
                    emit_multiplexor(&mut out, gate.target(), &key, &alpha);
                    for &q in &negatives {
                        out.push_unchecked(Gate::x(q));
                    }
                } else {
                    let alpha = multiplexor_angles(&gates[start..end], &key);
                    emit_multiplexor(&mut out, gate.target(), &key, &alpha);
                }
                start = end;
                continue;
            }
            GateKind::Ry(_) | GateKind::CSwap => out.push_unchecked(gate.clone()),
            GateKind::H if gate.controls().is_empty() => out.push_unchecked(gate.clone()),
            GateKind::X => match gate.controls() {
                [] => out.push_unchecked(gate.clone()),
                [c] if c.polarity == Polarity::Positive => out.push_unchecked(gate.clone()),
                [c] => {
                    out.push_unchecked(Gate::x(c.qubit));
                    out.push_unchecked(Gate::cnot(c.qubit, gate.target()));
                    out.push_unchecked(Gate::x(c.qubit));
                }
                _ => {
                    return Err(Error::UnsupportedGate(format!(
                        "x with {} controls",
                        gate.controls().len()
                    )));
                }
            },
            GateKind::Swap => {
                let (a, b) = (gate.targets()[0], gate.targets()[1]);
                out.push_unchecked(Gate::cnot(a, b));
                out.push_unchecked(Gate::cnot(b, a));
                out.push_unchecked(Gate::cnot(a, b));
            }
            _ => {
                return Err(Error::UnsupportedGate(format!(
                    "controlled {}",
                    gate.kind().label()
                )));
            }
        }
        start += 1;
    }
    Ok(out)
}

fn control_set(gate: &Gate) -> Vec<usize> {
    let mut qs: Vec<usize> = gate.controls().iter().map(|c| c.qubit).collect();
    qs.sort_unstable();
    qs
}

/// Rotation angle applied for each pattern `s` of the sorted control qubits,
/// bit `j` of `s` being the state of `controls[j]`.
fn multiplexor_angles(run: &[Gate], controls: &[usize]) -> Vec<f64> {
    let mut alpha = vec![0.0; 1 << controls.len()];
    for gate in run {
        let GateKind::Ry(theta) = gate.kind() else {
            unreachable!("runs only hold rotations")
        };
        let pattern = gate.controls().iter().fold(0usize, |acc, c: &Control| {
            let j = controls
                .binary_search(&c.qubit)
                .expect("control sets match");
            acc | (c.polarity.bit() as usize) << j
        });
        alpha[pattern] += theta;
    }
    alpha
}

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

fn emit_multiplexor(out: &mut Circuit, target: usize, controls: &[usize], alpha: &[f64]) {
    let k = controls.len();
    let size = 1usize << k;
    let scale = 1.0 / size as f64;
    for i in 0..size {
        let g = gray(i);
        let theta: f64 = alpha
            .iter()
            .enumerate()
            .map(|(s, a)| {
                if (s & g).count_ones().is_multiple_of(2) {
                    *a
                } else {
                    -*a
                }
            })
            .sum::<f64>()
            * scale;
        if theta != 0.0 {
            out.push_unchecked(Gate::ry(theta, target));
        }
        let flip = (g ^ gray((i + 1) % size)).trailing_zeros() as usize;
        out.push_unchecked(Gate::cnot(controls[flip], target));
    }
}
