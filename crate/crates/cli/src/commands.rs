use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use qprep_core::angles::{build_angle_table, discrete_angle_table, discrete_theta, AngleTable};
use qprep_core::circuit::{
    build_discrete_circuit, build_upsampling_circuit, depth_and_counts, export_qasm,
    lower_to_basis, Circuit,
};
use qprep_core::dist::Target;
use qprep_core::forking::{
    fork_depth_report, fork_transform_with, forked_circuit_json, layout_from_json, ForkOptions,
    ForkingLayout,
};
use qprep_core::grid::SamplingGrid;
use qprep_core::sim::{marginal, qubit_budget, simulate, verify, VerifyOptions};

use crate::config::{Plan, ValidationError};

/// Raised when verification ran but a tolerance was not met.
#[derive(Debug)]
pub struct ToleranceFailure(pub String);

impl std::fmt::Display for ToleranceFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ToleranceFailure {}

struct Built {
    circuit: Circuit,
    table: AngleTable,
    layout: Option<ForkingLayout>,
    grid: Option<SamplingGrid>,
}

fn build(
    plan: &Plan,
    n: u32,
    grid: Option<SamplingGrid>,
    for_simulation: bool,
) -> anyhow::Result<Built> {
    let table = match (&plan.target, &grid) {
        (Target::Continuous(spec), Some(g)) => build_angle_table(spec, g, plan.tol)?,
        (Target::Discrete(p), _) => discrete_angle_table(p)?,
        (Target::Continuous(_), None) => unreachable!("densities always have a grid"),
    };
    let (mut circuit, mut layout) = if plan.fork {
        let options = ForkOptions {
            control_qubit: plan.control_qubit,
            verification: for_simulation,
        };
        let (c, l) = fork_transform_with(&table, options)?;
        (c, Some(l))
    } else {
        let c = match &plan.target {
            Target::Continuous(_) => build_upsampling_circuit(&table),
            Target::Discrete(p) => build_discrete_circuit(&discrete_theta(p), n)?,
        };
        (c, None)
    };
    if let Some(path) = &plan.circuit {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        circuit = Circuit::from_json(&text)?;
        layout = layout_from_json(&text)?;
        if layout.as_ref().is_some_and(|l| l.n() != n) {
            return Err(ValidationError(format!("circuit layout is not for {n} qubits")).into());
        }
    } else {
        circuit.metadata.distribution = Some(plan.target.to_json_value());
    }
    if plan.lower {
        circuit = lower_to_basis(&circuit)?;
    }
    Ok(Built {
        circuit,
        table,
        layout,
        grid,
    })
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn circuit_json(built: &Built) -> anyhow::Result<String> {
    Ok(match &built.layout {
        Some(layout) => forked_circuit_json(&built.circuit, layout)?,
        None => built.circuit.to_json()?,
    })
}

fn check_budget(qubits: usize) -> anyhow::Result<()> {
    let limit = qubit_budget();
    if qubits > limit {
        return Err(qprep_core::Error::QubitBudget {
            requested: qubits,
            limit,
        }
        .into());
    }
    Ok(())
}

fn single(plan: &Plan, for_simulation: bool) -> anyhow::Result<Built> {
    let n = plan.n()?;
    if for_simulation && !plan.fork {
        check_budget(n as usize)?;
    }
    let grid = plan.grid(n, n)?;
    build(plan, n, grid, for_simulation)
}

pub fn synth(plan: &Plan) -> anyhow::Result<()> {
    let built = single(plan, false)?;
    let out = &plan.outputs;
    if let Some(path) = &out.json {
        write(path, &circuit_json(&built)?)?;
    }
    if let Some(path) = &out.qasm {
        write(path, &export_qasm(&built.circuit, plan.qasm))?;
    }
    if let Some(path) = &out.angles {
        write(path, &built.table.to_json()?)?;
    }
    if out.json.is_none() && out.qasm.is_none() && out.angles.is_none() {
        println!("{}", circuit_json(&built)?);
    }
    Ok(())
}

pub fn fork(plan: &Plan) -> anyhow::Result<()> {
    let plan = Plan {
        fork: true,
        ..plan.clone()
    };
    let built = single(&plan, false)?;
    let layout = built.layout.as_ref().expect("forked");
    if let Some(path) = &plan.outputs.json {
        write(path, &circuit_json(&built)?)?;
    }
    if let Some(path) = &plan.outputs.qasm {
        write(path, &export_qasm(&built.circuit, plan.qasm))?;
    }
    if let Some(path) = &plan.outputs.angles {
        write(path, &built.table.to_json()?)?;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&fork_depth_report(&built.circuit, layout))?
    );
    Ok(())
}

#[derive(Serialize)]
struct ProbabilityRow {
    index: usize,
    x: f64,
    probability: f64,
}

#[derive(Serialize)]
struct SimulationOutput {
    num_qubits: usize,
    register: Vec<usize>,
    probabilities: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<f64>>,
}

pub fn simulate_cmd(plan: &Plan) -> anyhow::Result<()> {
    let built = single(plan, true)?;
    let state = simulate(&built.circuit)?;
    let n = plan.n()? as usize;
    let register = match &built.layout {
        Some(l) => l.output_register().to_vec(),
        None => (0..n).collect(),
    };
    let probabilities = marginal(&state, &register)?;
    let amplitudes = (built.circuit.num_qubits() == n)
        .then(|| state.amplitudes().iter().map(|a| a.re).collect());
    let output = SimulationOutput {
        num_qubits: built.circuit.num_qubits(),
        register,
        probabilities,
        amplitudes,
    };
    let json = serde_json::to_string_pretty(&output)?;
    if let Some(path) = &plan.outputs.json {
        write(path, &json)?;
    }
    if let Some(path) = &plan.outputs.csv {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        for (index, &probability) in output.probabilities.iter().enumerate() {
            let x = built.grid.map_or(index as f64, |g| g.x(index));
            w.serialize(ProbabilityRow {
                index,
                x,
                probability,
            })?;
        }
        w.flush()?;
    }
    if plan.outputs.json.is_none() && plan.outputs.csv.is_none() {
        println!("{json}");
    }
    Ok(())
}

fn verify_options(plan: &Plan, built: &Built) -> VerifyOptions {
    VerifyOptions {
        tol: plan.tol,
        output_register: built.layout.as_ref().map(|l| l.output_register().to_vec()),
        ..VerifyOptions::default()
    }
}

pub fn verify_cmd(plan: &Plan) -> anyhow::Result<()> {
    let built = single(plan, true)?;
    let report = verify(
        &plan.target,
        built.grid.as_ref(),
        &built.circuit,
        &verify_options(plan, &built),
    )?;
    if let Some(path) = &plan.outputs.json {
        write(path, &report.to_json()?)?;
    }
    if let Some(path) = &plan.outputs.csv {
        write(path, &report.to_csv()?)?;
    }
    println!(
        "{} n={} tvd={:.3e} max_abs_err={:.3e} wrap_error_estimate={:.3e} depth={}",
        if report.passed { "PASS" } else { "FAIL" },
        report.n,
        report.tvd,
        report.max_abs_err,
        report.wrap_error_estimate,
        report.stats.depth
    );
    if report.passed {
        Ok(())
    } else {
        Err(ToleranceFailure(report.failures.join("; ")).into())
    }
}

#[derive(Serialize)]
struct SweepRow {
    n: u32,
    delta_x: f64,
    f_nyquist: f64,
    delta_x_norm: f64,
    tvd: f64,
    wrap_error: f64,
    gates: usize,
    depth: usize,
    passed: bool,
}

pub fn sweep(plan: &Plan) -> anyhow::Result<()> {
    if matches!(plan.target, Target::Discrete(_)) {
        return Err(
            ValidationError("sweep needs a density, not discrete probabilities".into()).into(),
        );
    }
    let Some((n_min, n_max)) = plan.n_range else {
        return Err(ValidationError("sweep needs --n-min and --n-max".into()).into());
    };
    if plan.fork {
        return Err(
            ValidationError("sweep runs the sequential circuit; drop --fork".into()).into(),
        );
    }
    check_budget(n_max as usize)?;
    // Fix the window across sizes.
    let mut rows = Vec::new();
    let first = plan.grid(n_max, n_max)?.expect("density");
    let fixed = Plan {
        window: crate::config::Window::Width(first.window()),
        ..plan.clone()
    };
    for n in n_min..=n_max {
        let grid = fixed.grid(n, n_max)?;
        let built = build(&fixed, n, grid, true)?;
        let report = verify(
            &fixed.target,
            grid.as_ref(),
            &built.circuit,
            &verify_options(&fixed, &built),
        )?;
        let grid = grid.expect("density");
        rows.push(SweepRow {
            n,
            delta_x: grid.delta_x(),
            f_nyquist: grid.f_nyquist(),
            delta_x_norm: built.table.delta_x_norm().expect("density"),
            tvd: report.tvd,
            wrap_error: report.wrap_error_estimate,
            gates: depth_and_counts(&built.circuit).total_gates,
            depth: report.stats.depth,
            passed: report.passed,
        });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
    match &plan.outputs.csv {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &plan.outputs.json {
        write(path, &serde_json::to_string_pretty(&rows)?)?;
    }
    match rows.iter().find(|r| !r.passed) {
        Some(r) => Err(ToleranceFailure(format!("verification failed at n={}", r.n)).into()),
        None => Ok(()),
    }
}
