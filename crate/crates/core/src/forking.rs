//! Binary-tree ("forking") form of the sequential circuit.
//!
//! Every angle of the table gets its own qubit. Tree nodes use heap order
//! (root 1, children `2h` and `2h + 1`) and node `h` lives on physical qubit
//! `h - 1`. Level `l` of the tree holds the `2^l` candidate states of `q_l`;
//! the node reached by the path `b_0 .. b_{l-1}` (left on 0, right on 1) is
//! rotated by `theta_{n,n-l}(i)` with `i = sum_j b_j 2^j`. All rotations act
//! on distinct qubits, so they form a single layer.
//!
//! Routing then runs bottom up. Once both subtrees of node `h` have moved
//! their selected path onto their left edges, `h` swaps the right subtree's
//! left edge into the left subtree's left edge whenever it holds `|1>`. At
//! the end the left edge of the whole tree, qubits `0, 1, 3, 7, ...`, carries
//! `q_0, q_1, ..., q_{n-1}`. Only the measured distribution of that register
//! is promised: the remaining tree qubits stay entangled with it.

use serde::{Deserialize, Serialize};

use crate::angles::AngleTable;
use crate::circuit::{depth_and_counts, Circuit, Control, Gate, GateKind, Metadata};
use crate::sim::qubit_budget;
use crate::{Error, Result};

/// Largest register synthesized in forked form.
pub const MAX_FORK_QUBITS: u32 = 12;

/// Largest register for which a forked circuit is meant to be simulated.
pub const MAX_VERIFY_QUBITS: u32 = 4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ForkOptions {
    /// Add a qubit, set to `|1>`, that controls every rotation.
    pub control_qubit: bool,
    /// Refuse sizes that cannot be simulated afterwards.
    pub verification: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLayout")]
pub struct ForkingLayout {
    n: u32,
    d: usize,
    /// `node_map[h - 1]` is the physical qubit of heap node `h`.
    node_map: Vec<usize>,
    output_register: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    control_qubit: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    n: u32,
    d: usize,
    node_map: Vec<usize>,
    output_register: Vec<usize>,
    #[serde(default)]
    control_qubit: Option<usize>,
}

impl TryFrom<RawLayout> for ForkingLayout {
    type Error = Error;

    fn try_from(raw: RawLayout) -> Result<Self> {
        if !(1..=MAX_FORK_QUBITS).contains(&raw.n) || raw.d != (1usize << raw.n) - 1 {
            return Err(Error::InvalidParameter(format!(
                "layout with n={} needs d = 2^n - 1, got d={}",
                raw.n, raw.d
            )));
        }
        let mut seen = vec![false; raw.d];
        for &q in &raw.node_map {
            if q >= raw.d || std::mem::replace(&mut seen[q], true) {
                return Err(Error::InvalidParameter(
                    "node_map is not a bijection onto 0..d".into(),
                ));
            }
        }
        if raw.node_map.len() != raw.d {
            return Err(Error::InvalidParameter(
                "node_map must list d qubits".into(),
            ));
        }
        let mut out = raw.output_register.clone();
        out.sort_unstable();
        out.dedup();
        if raw.output_register.len() != raw.n as usize
            || out.len() != raw.n as usize
            || out.iter().any(|&q| q >= raw.d)
        {
            return Err(Error::InvalidParameter(
                "output_register must hold n distinct tree qubits".into(),
            ));
        }
        if raw.control_qubit.is_some_and(|c| c != raw.d) {
            return Err(Error::InvalidParameter(
                "the control qubit sits at index d".into(),
            ));
        }
        Ok(Self {
            n: raw.n,
            d: raw.d,
            node_map: raw.node_map,
            output_register: raw.output_register,
            control_qubit: raw.control_qubit,
        })
    }
}

impl ForkingLayout {
    fn heap(n: u32, control_qubit: bool) -> Self {
        let d = (1usize << n) - 1;
        Self {
            n,
            d,
            node_map: (0..d).collect(),
            output_register: (0..n).map(|l| (1usize << l) - 1).collect(),
            control_qubit: control_qubit.then_some(d),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of tree qubits, `2^n - 1`.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn node_map(&self) -> &[usize] {
        &self.node_map
    }

    /// Physical qubit of heap node `h >= 1`.
    pub fn node(&self, h: usize) -> usize {
        self.node_map[h - 1]
    }

    /// Qubits holding `q_0, ..., q_{n-1}` after routing.
    pub fn output_register(&self) -> &[usize] {
        &self.output_register
    }

    pub fn control_qubit(&self) -> Option<usize> {
        self.control_qubit
    }

    pub fn total_qubits(&self) -> usize {
        self.d + usize::from(self.control_qubit.is_some())
    }
}

/// Reverses the low `bits` bits of `p`.
fn bit_reverse(p: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        p.reverse_bits() >> (usize::BITS - bits)
    }
}

pub fn fork_transform(table: &AngleTable) -> Result<(Circuit, ForkingLayout)> {
    fork_transform_with(table, ForkOptions::default())
}

pub fn fork_transform_with(
    table: &AngleTable,
    options: ForkOptions,
) -> Result<(Circuit, ForkingLayout)> {
    let n = table.n();
    if options.verification {
        let total = (1usize << n) - 1 + usize::from(options.control_qubit);
        let limit = qubit_budget();
        if n > MAX_VERIFY_QUBITS || total > limit {
            return Err(Error::QubitBudget {
                requested: total,
                limit: limit.min((1 << MAX_VERIFY_QUBITS) - 1 + usize::from(options.control_qubit)),
            });
        }
    } else if n > MAX_FORK_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "forked synthesis supports up to {MAX_FORK_QUBITS} qubits, got {n}"
        )));
    }

    let layout = ForkingLayout::heap(n, options.control_qubit);
    let mut metadata = Metadata::new("forking");
    metadata.grid = table.grid().copied();
    let mut circuit = Circuit::new(layout.total_qubits(), metadata);

    let controls = match layout.control_qubit {
        Some(c) => {
            circuit.push_unchecked(Gate::x(c));
            vec![Control::positive(c)]
        }
        None => Vec::new(),
    };
    for l in 0..n {
        let level = table.level(n - l);
        for p in 0..1usize << l {
            let h = (1usize << l) + p;
            let theta = level[bit_reverse(p, l)];
            circuit.push_unchecked(Gate::ry(theta, layout.node(h)).with_controls(controls.clone()));
        }
    }

    for l in (0..n.saturating_sub(1)).rev() {
        for h in 1usize << l..2usize << l {
            let (mut left, mut right) = (2 * h, 2 * h + 1);
            while right <= layout.d {
                circuit.push_unchecked(Gate::cswap(
                    layout.node(h),
                    layout.node(left),
                    layout.node(right),
                ));
                left *= 2;
                right *= 2;
            }
        }
    }
    Ok((circuit, layout))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForkDepthReport {
    pub n: u32,
    pub total_qubits: usize,
    pub depth: usize,
    pub rotation_depth: usize,
    pub cswap_count: usize,
    /// The `d - 1` controlled swaps quoted for this construction in the
    /// literature, for comparison with `cswap_count`.
    pub reference_cswap_count: usize,
    pub depth_over_n2: f64,
}

pub fn fork_depth_report(circuit: &Circuit, layout: &ForkingLayout) -> ForkDepthReport {
    let stats = depth_and_counts(circuit);
    let mut rotations = Circuit::new(circuit.num_qubits(), Metadata::default());
    for gate in circuit.gates() {
        if matches!(gate.kind(), GateKind::Ry(_)) {
            rotations.push_unchecked(gate.clone());
        }
    }
    let n = layout.n();
    ForkDepthReport {
        n,
        total_qubits: circuit.num_qubits(),
        depth: stats.depth,
        rotation_depth: depth_and_counts(&rotations).depth,
        cswap_count: stats.counts.get("cswap").copied().unwrap_or(0),
        reference_cswap_count: layout.d() - 1,
        depth_over_n2: stats.depth as f64 / f64::from(n * n),
    }
}

/// Circuit JSON with the layout stored under `"layout"`.
pub fn forked_circuit_json(circuit: &Circuit, layout: &ForkingLayout) -> Result<String> {
    circuit.to_json_with_layout(serde_json::to_value(layout)?)
}

/// Reads the layout stored next to a circuit, if any.
pub fn layout_from_json(text: &str) -> Result<Option<ForkingLayout>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("layout") {
        Some(layout) => Ok(Some(serde_json::from_value(layout.clone())?)),
        None => Ok(None),
    }
}
