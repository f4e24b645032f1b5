use super::{Circuit, Control, Gate, Metadata, Polarity};
use crate::angles::AngleTable;
use crate::{Error, Result};

/// Controls selecting basis pattern `i` on qubits `q_0..q_{k-1}`.
pub(crate) fn pattern_controls(i: usize, k: usize) -> Vec<Control> {
    (0..k)
        .map(|j| Control {
            qubit: j,
            polarity: Polarity::from_bit(i >> j & 1 == 1),
        })
        .collect()
}

/// Sequential circuit: for `k = 0..n`, qubit `q_k` receives `2^k` rotations
/// by `theta_{n,n-k}(i)`, each conditioned on `q_0..q_{k-1}` holding `i`.
pub fn build_upsampling_circuit(table: &AngleTable) -> Circuit {
    let n = table.n() as usize;
    let mut metadata = Metadata::new("upsampling");
    metadata.grid = table.grid().copied();
    let mut circuit = Circuit::new(n, metadata);
    for k in 0..n {
        let level = table.level((n - k) as u32);
        for (i, &theta) in level.iter().enumerate() {
            circuit.push_unchecked(Gate::ry(theta, k).with_controls(pattern_controls(i, k)));
        }
    }
    circuit
}

/// Discrete preparation on `n` qubits: Hadamards on `q_0..q_{n-2}`, then one
/// rotation of `q_{n-1}` per basis pattern of the lower register.
pub fn build_discrete_circuit(thetas: &[f64], n: u32) -> Result<Circuit> {
    if !(2..=crate::grid::MAX_QUBITS).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "discrete circuit needs 2..={} qubits, got {n}",
            crate::grid::MAX_QUBITS
        )));
    }
    let n = n as usize;
    let lower = n - 1;
    if thetas.len() != 1 << lower {
        return Err(Error::Mismatch(format!(
            "{n} qubits take {} angles, got {}",
            1usize << lower,
            thetas.len()
        )));
    }
    if let Some(bad) = thetas.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "angle {bad} is not finite"
        )));
    }
    let mut circuit = Circuit::new(n, Metadata::new("discrete"));
    for q in 0..lower {
        circuit.push_unchecked(Gate::h(q));
    }
    for (i, &theta) in thetas.iter().enumerate() {
        circuit.push_unchecked(Gate::ry(theta, lower).with_controls(pattern_controls(i, lower)));
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angles::{build_angle_table, discrete_angle_table, discrete_theta};
    use crate::circuit::GateKind;
    use crate::dist::{make_binomial, DistributionSpec};
    use crate::grid::SamplingGrid;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn upsampling_structure() {
        let spec = DistributionSpec::gaussian(0.0, 1.0).unwrap();
        let grid = SamplingGrid::new(4, 12.0, 0.0, 0.0).unwrap();
        let table = build_angle_table(&spec, &grid, 1e-14).unwrap();
        let c = build_upsampling_circuit(&table);
        assert_eq!(c.num_qubits(), 4);
        assert_eq!(c.len(), 15);
        let mut idx = 0;
        for k in 0..4 {
            for i in 0..(1usize << k) {
                let g = &c.gates()[idx];
                assert_eq!(g.target(), k);
                assert_eq!(g.kind(), GateKind::Ry(table.theta(4 - k as u32, i)));
                assert_eq!(g.controls(), pattern_controls(i, k).as_slice());
                idx += 1;
            }
        }
        assert_eq!(c.metadata.grid, Some(grid));
    }

    #[test]
    fn discrete_structure() {
        let probs = make_binomial(3, 0.5).unwrap();
        let thetas = discrete_theta(&probs);
        let c = build_discrete_circuit(&thetas, 3).unwrap();
        let kinds: Vec<_> = c.gates().iter().map(|g| g.kind().label()).collect();
        assert_eq!(kinds, ["h", "h", "ry", "ry", "ry", "ry"]);
        assert!(c.gates()[..2].iter().all(|g| g.controls().is_empty()));
        assert!(c.gates()[2..]
            .iter()
            .all(|g| g.target() == 2 && g.controls().len() == 2));
        assert!(build_discrete_circuit(&thetas, 2).is_err());
        assert!(build_discrete_circuit(&thetas[..1], 1).is_err());
        let table = discrete_angle_table(&probs).unwrap();
        assert!(table.level(2).iter().all(|&t| t == FRAC_PI_2));
    }
}
