use serde::Serialize;

use super::{marginal, oracle_amplitudes, oracle_xi, simulate, tvd};
use crate::angles::build_angle_table;
use crate::circuit::{depth_and_counts, Circuit, CircuitStats};
use crate::dist::Target;
use crate::grid::SamplingGrid;
use crate::{Error, Result, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Relative tolerance for periodic sums.
    pub tol: f64,
    /// Bound on the total variation distance between circuit and oracle.
    pub max_tvd: f64,
    /// Bound on elementwise errors for continuous targets: probabilities,
    /// and amplitudes when the circuit acts on the logical register alone.
    pub max_abs_err: f64,
    /// Bound on elementwise errors of post-selected discrete distributions.
    pub discrete_abs_err: f64,
    /// Qubits carrying the prepared register, `q_0..q_{n-1}` when absent.
    pub output_register: Option<Vec<usize>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_tvd: 1e-10,
            max_abs_err: 1e-10,
            discrete_abs_err: 1e-12,
            output_register: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub index: usize,
    pub x: f64,
    pub prob_circuit: f64,
    pub prob_oracle: f64,
    /// `P(x_i) dx_n` for densities; the target probability for discrete ones.
    pub pdf_delta: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub target: serde_json::Value,
    pub n: u32,
    pub tvd: f64,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    /// `sum |xi_i^2 - P(x_i) dx_n|`: how far wrapping moves the exact state
    /// away from naive sampling of the density.
    pub wrap_error_estimate: f64,
    /// `sum |prob_i - P(x_i) dx_n|`.
    pub sampling_l1: f64,
    /// Largest gap between the product-formula and wrapped-density oracles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_gap: Option<f64>,
    /// Largest gap between simulated amplitudes and the wrapped-density
    /// oracle; only defined when the circuit has no extra qubits.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude_err: Option<f64>,
    /// For discrete targets, the largest error of the `q_{n-1} = 1` branch
    /// against `(1 - P(k)) / (2^(n-1) - 1)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complement_max_err: Option<f64>,
    pub max_imag: f64,
    pub stats: CircuitStats,
    pub passed: bool,
    pub failures: Vec<String>,
    pub records: Vec<Record>,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Per-index records with header `index,x,prob_circuit,prob_oracle,pdf_delta,abs_err`.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for record in &self.records {
            writer.serialize(record)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::InvalidParameter(format!("csv buffer: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn max_abs_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Simulates `circuit` and compares it with the oracles for `target`.
/// Continuous targets need the sampling `grid`.
pub fn verify(
    target: &Target,
    grid: Option<&SamplingGrid>,
    circuit: &Circuit,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    let n = match (target, grid) {
        (Target::Continuous(_), None) => {
            return Err(Error::InvalidParameter(
                "verifying a density needs its sampling grid".into(),
            ));
        }
        (Target::Continuous(_), Some(g)) => g.n(),
        (Target::Discrete(p), _) => p.num_qubits(),
    };
    let register: Vec<usize> = match &options.output_register {
        Some(r) => r.clone(),
        None => (0..n as usize).collect(),
    };
    if register.len() != n as usize {
        return Err(Error::Mismatch(format!(
            "output register has {} qubits, target needs {n}",
            register.len()
        )));
    }
    let state = simulate(circuit)?;
    let probs = marginal(&state, &register)?;
    let logical_only = circuit.num_qubits() == n as usize;
    let mut failures = Vec::new();

    let (xs, prob_circuit, prob_oracle, pdf_delta, oracle_gap, amplitude_err, complement) =
        match target {
            Target::Continuous(spec) => {
                let grid = grid.expect("checked above");
                let xi = oracle_xi(spec, grid, options.tol)?;
                let table = build_angle_table(spec, grid, options.tol)?;
                let product = oracle_amplitudes(&table);
                let dx = table.delta_x_norm().expect("continuous tables carry dx");
                let xs = grid.xs();
                let pdf_delta: Vec<f64> = xs.iter().map(|&x| spec.pdf_at(x) * dx).collect();
                let oracle_gap = max_abs_gap(&xi, &product);
                if oracle_gap > options.max_abs_err {
                    failures.push(format!(
                        "oracle gap {oracle_gap:e} exceeds {:e}",
                        options.max_abs_err
                    ));
                }
                let amplitude_err = logical_only.then(|| {
                    state
                        .amplitudes()
                        .iter()
                        .zip(&xi)
                        .map(|(a, x)| (a - x).norm())
                        .fold(0.0, f64::max)
                });
                if let Some(err) = amplitude_err.filter(|e| *e > options.max_abs_err) {
                    failures.push(format!(
                        "amplitude error {err:e} exceeds {:e}",
                        options.max_abs_err
                    ));
                }
                let oracle: Vec<f64> = xi.iter().map(|v| v * v).collect();
                (
                    xs,
                    probs,
                    oracle,
                    pdf_delta,
                    Some(oracle_gap),
                    amplitude_err,
                    None,
                )
            }
            Target::Discrete(spec) => {
                let low = n as usize - 1;
                let p = spec.probs().to_vec();
                let lower: Vec<usize> = (0..1usize << low).collect();
                let selected = postselect_top(&probs, 0)?;
                let rest = (1usize << low) as f64 - 1.0;
                let complement_err = if rest > 0.0 {
                    postselect_top(&probs, 1).ok().map(|c| {
                        let expected: Vec<f64> = p.iter().map(|v| (1.0 - v) / rest).collect();
                        max_abs_gap(&c, &expected)
                    })
                } else {
                    None
                };
                if let Some(err) = complement_err.filter(|e| *e > options.discrete_abs_err) {
                    failures.push(format!(
                        "complement branch error {err:e} exceeds {:e}",
                        options.discrete_abs_err
                    ));
                }
                let xs = lower.iter().map(|&k| k as f64).collect();
                (xs, selected, p.clone(), p, None, None, complement_err)
            }
        };

    let records: Vec<Record> = (0..prob_oracle.len())
        .map(|i| Record {
            index: i,
            x: xs[i],
            prob_circuit: prob_circuit[i],
            prob_oracle: prob_oracle[i],
            pdf_delta: pdf_delta[i],
            abs_err: (prob_circuit[i] - prob_oracle[i]).abs(),
        })
        .collect();
    let tvd = tvd(&prob_circuit, &prob_oracle)?;
    let max_abs_err = records.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    let max_rel_err = records
        .iter()
        .filter(|r| r.prob_oracle > 0.0)
        .map(|r| r.abs_err / r.prob_oracle)
        .fold(0.0, f64::max);
    let wrap_error_estimate = records
        .iter()
        .map(|r| (r.prob_oracle - r.pdf_delta).abs())
        .sum();
    let sampling_l1 = records
        .iter()
        .map(|r| (r.prob_circuit - r.pdf_delta).abs())
        .sum();
    let max_imag = state.max_imag();

    if tvd > options.max_tvd {
        failures.push(format!("tvd {tvd:e} exceeds {:e}", options.max_tvd));
    }
    let abs_bound = match target {
        Target::Continuous(_) => options.max_abs_err,
        Target::Discrete(_) => options.discrete_abs_err,
    };
    if max_abs_err > abs_bound {
        failures.push(format!(
            "max abs error {max_abs_err:e} exceeds {abs_bound:e}"
        ));
    }
    if max_imag > 1e-14 {
        failures.push(format!("imaginary amplitude {max_imag:e}"));
    }

    Ok(VerificationReport {
        target: target.to_json_value(),
        n,
        tvd,
        max_abs_err,
        max_rel_err,
        wrap_error_estimate,
        sampling_l1,
        oracle_gap,
        amplitude_err,
        complement_max_err: complement,
        max_imag,
        stats: depth_and_counts(circuit),
        passed: failures.is_empty(),
        failures,
        records,
    })
}

/// Conditions a distribution on its most significant bit.
fn postselect_top(probs: &[f64], bit: usize) -> Result<Vec<f64>> {
    let half = probs.len() / 2;
    let branch = &probs[bit * half..(bit + 1) * half];
    let total: f64 = branch.iter().sum();
    if total <= super::MIN_BRANCH_PROBABILITY {
        return Err(Error::ZeroProbabilityBranch { probability: total });
    }
    Ok(branch.iter().map(|p| p / total).collect())
}
