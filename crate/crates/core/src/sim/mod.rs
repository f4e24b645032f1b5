//! Dense statevector simulation, the two amplitude oracles, and the
//! verification report comparing them.

mod report;

pub use report::{verify, Record, VerificationReport, VerifyOptions};

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::angles::{compute_delta_x, AngleTable};
use crate::circuit::{Circuit, Gate, GateKind};
use crate::dist::DistributionSpec;
use crate::grid::{SamplingGrid, MAX_QUBITS};
use crate::{Error, Result};

/// Environment variable lowering the simulator's qubit limit.
pub const BUDGET_ENV: &str = "QPREP_MAX_QUBITS";

/// Tolerance on `sum |amp|^2 = 1` for oracle and simulated states.
pub const NORM_TOL: f64 = 1e-12;

/// Smallest branch probability [`postselect`] will renormalize.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-15;

/// Largest register the simulator accepts: 24, or less if `QPREP_MAX_QUBITS`
/// says so.
pub fn qubit_budget() -> usize {
    budget_from(std::env::var(BUDGET_ENV).ok().as_deref())
}

fn budget_from(setting: Option<&str>) -> usize {
    let cap = MAX_QUBITS as usize;
    setting
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(cap, |v| v.min(cap))
}

fn check_budget(num_qubits: usize) -> Result<()> {
    let limit = qubit_budget();
    if num_qubits > limit {
        return Err(Error::QubitBudget {
            requested: num_qubits,
            limit,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_budget(num_qubits)?;
        let len = 1usize << num_qubits;
        if index >= len {
            return Err(Error::IndexOutOfRange {
                index,
                bits: num_qubits as u32,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest `|Im amp|`; zero for circuits made of RY, H, X and swaps.
    pub fn max_imag(&self) -> f64 {
        self.amps.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::Mismatch(format!(
                "{}-qubit circuit applied to a {}-qubit state",
                circuit.num_qubits(),
                self.num_qubits
            )));
        }
        for gate in circuit.gates() {
            self.apply_gate(gate)?;
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let mut fixed = 0usize;
        let mut pattern = 0usize;
        for c in gate.controls() {
            fixed |= 1 << c.qubit;
            if c.polarity.bit() {
                pattern |= 1 << c.qubit;
            }
        }
        let t0 = 1usize << gate.targets()[0];
        match gate.kind() {
            GateKind::Ry(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                self.for_pairs(fixed | t0, pattern, t0, |a0, a1| {
                    (c * a0 - s * a1, s * a0 + c * a1)
                });
            }
            GateKind::H => self.for_pairs(fixed | t0, pattern, t0, |a0, a1| {
                ((a0 + a1) * FRAC_1_SQRT_2, (a0 - a1) * FRAC_1_SQRT_2)
            }),
            GateKind::X => self.for_pairs(fixed | t0, pattern, t0, |a0, a1| (a1, a0)),
            GateKind::Swap | GateKind::CSwap => {
                let t1 = 1usize << gate.targets()[1];
                // Pairs |..1..0..> <-> |..0..1..> on the two targets.
                self.for_pairs(fixed | t0 | t1, pattern | t0, t0 | t1, |a, b| (b, a));
            }
        }
        Ok(())
    }

    /// Visits every index whose bits under `fixed` equal `pattern`, pairing it
    /// with the index obtained by flipping `flip`.
    fn for_pairs<F>(&mut self, fixed: usize, pattern: usize, flip: usize, op: F)
    where
        F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
    {
        let free = (self.amps.len() - 1) & !fixed;
        let mut sub = 0usize;
        loop {
            let i = pattern | sub;
            let j = i ^ flip;
            let (a, b) = op(self.amps[i], self.amps[j]);
            self.amps[i] = a;
            self.amps[j] = b;
            if sub == free {
                break;
            }
            sub = ((sub | !free).wrapping_add(1)) & free;
        }
    }
}

/// Runs `circuit` on `|0...0>`.
pub fn simulate(circuit: &Circuit) -> Result<StateVector> {
    let mut state = StateVector::zero(circuit.num_qubits())?;
    state.apply_circuit(circuit)?;
    Ok(state)
}

/// Distribution over the listed qubits; bit `j` of an outcome is the state of
/// `qubits[j]`.
pub fn marginal(state: &StateVector, qubits: &[usize]) -> Result<Vec<f64>> {
    for (k, &q) in qubits.iter().enumerate() {
        if q >= state.num_qubits() || qubits[..k].contains(&q) {
            return Err(Error::InvalidParameter(format!(
                "marginal qubit list {qubits:?} is not a set of distinct qubits below {}",
                state.num_qubits()
            )));
        }
    }
    let mut out = vec![0.0; 1 << qubits.len()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let outcome = qubits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &q)| acc | (i >> q & 1) << j);
        out[outcome] += a.norm_sqr();
    }
    Ok(out)
}

/// Distribution of the other qubits, in their original order, given that
/// `qubit` was measured as `bit`.
pub fn postselect(state: &StateVector, qubit: usize, bit: u8) -> Result<Vec<f64>> {
    if qubit >= state.num_qubits() || bit > 1 {
        return Err(Error::InvalidParameter(format!(
            "cannot post-select qubit {qubit} = {bit} on {} qubits",
            state.num_qubits()
        )));
    }
    let low = (1usize << qubit) - 1;
    let mut out = vec![0.0; 1 << (state.num_qubits() - 1)];
    for (i, a) in state.amplitudes().iter().enumerate() {
        if (i >> qubit & 1) as u8 == bit {
            out[(i & low) | (i >> (qubit + 1)) << qubit] += a.norm_sqr();
        }
    }
    let total: f64 = out.iter().sum();
    if total <= MIN_BRANCH_PROBABILITY {
        return Err(Error::ZeroProbabilityBranch { probability: total });
    }
    out.iter_mut().for_each(|p| *p /= total);
    Ok(out)
}

/// Product formula for the amplitudes prepared by the sequential circuit:
/// `amp(i) = prod_m cos(-pi/2 * bit_{n-m}(i) + theta_{n,m}(i mod 2^(n-m)) / 2)`.
pub fn oracle_amplitudes(table: &AngleTable) -> Vec<f64> {
    let n = table.n();
    // Build level by level: after qubits q_0..q_{k-1}, amps has 2^k entries.
    let mut amps = vec![1.0];
    for k in 0..n {
        let level = table.level(n - k);
        let mut next = vec![0.0; amps.len() * 2];
        for (i, &a) in amps.iter().enumerate() {
            let (s, c) = (level[i] / 2.0).sin_cos();
            next[i] = a * c;
            next[i + amps.len()] = a * s;
        }
        amps = next;
    }
    amps
}

/// `xi(x_i) = sqrt(dx_n * S(x_i, w))`, the normalized wrapped density.
pub fn oracle_xi(spec: &DistributionSpec, grid: &SamplingGrid, tol: f64) -> Result<Vec<f64>> {
    let dx_norm = compute_delta_x(spec, grid, tol)?;
    let xi = (0..grid.len())
        .map(|i| {
            let s = spec.periodic_sum(grid.x(i), grid.window(), tol)?;
            Ok((dx_norm * s).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let sum: f64 = xi.iter().map(|v| v * v).sum();
    if (sum - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization { sum });
    }
    Ok(xi)
}

/// `(1/2) sum |p_i - q_i|`.
pub fn tvd(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Mismatch(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[cfg(test)]
mod tests;
