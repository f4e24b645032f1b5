//! Gate-level circuit representation, the sequential and discrete builders,
//! lowering to a small basis, QASM export, and depth/count metrics.
//!
//! Gates are listed in execution order and applied left to right to the
//! all-zeros state. Controls carry a polarity: a positive control fires on
//! `|1>`, a negative one on `|0>`.

mod build;
mod lower;
mod metrics;
mod qasm;

pub use build::{build_discrete_circuit, build_upsampling_circuit};
pub use lower::lower_to_basis;
pub use metrics::{depth_and_counts, CircuitStats};
pub use qasm::{export_qasm, QasmOptions};

use serde::{Deserialize, Serialize};

use crate::grid::SamplingGrid;
use crate::{Error, Result};

/// Version tag of the circuit JSON schema.
pub const CIRCUIT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-", alias = "\u{2212}")]
    Negative,
}

impl Polarity {
    /// Polarity that fires when the control bit equals `bit`.
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Self::Positive
        } else {
            Self::Negative
        }
    }

    pub fn bit(self) -> bool {
        matches!(self, Self::Positive)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Control {
    #[serde(rename = "q")]
    pub qubit: usize,
    #[serde(rename = "pol")]
    pub polarity: Polarity,
}

impl Control {
    pub fn positive(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    /// `RY(theta) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]`.
    Ry(f64),
    H,
    X,
    Swap,
    CSwap,
}

impl GateKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Ry(_) => "ry",
            Self::H => "h",
            Self::X => "x",
            Self::Swap => "swap",
            Self::CSwap => "cswap",
        }
    }

    fn arity(&self) -> usize {
        match self {
            Self::Ry(_) | Self::H | Self::X => 1,
            Self::Swap | Self::CSwap => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    controls: Vec<Control>,
}

impl Gate {
    pub fn ry(theta: f64, target: usize) -> Self {
        Self::single(GateKind::Ry(theta), target)
    }

    pub fn h(target: usize) -> Self {
        Self::single(GateKind::H, target)
    }

    pub fn x(target: usize) -> Self {
        Self::single(GateKind::X, target)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::x(target).with_controls(vec![Control::positive(control)])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::Swap,
            targets: vec![a, b],
            controls: Vec::new(),
        }
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::CSwap,
            targets: vec![a, b],
            controls: vec![Control::positive(control)],
        }
    }

    fn single(kind: GateKind, target: usize) -> Self {
        Self {
            kind,
            targets: vec![target],
            controls: Vec::new(),
        }
    }

    pub fn with_controls(mut self, controls: Vec<Control>) -> Self {
        self.controls = controls;
        self
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// The single target of a one-qubit gate.
    pub fn target(&self) -> usize {
        self.targets[0]
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    /// Targets followed by control qubits.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets
            .iter()
            .copied()
            .chain(self.controls.iter().map(|c| c.qubit))
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::MalformedGate(format!(
                "{} takes {} target(s), got {}",
                self.kind.label(),
                self.kind.arity(),
                self.targets.len()
            )));
        }
        match self.kind {
            GateKind::Ry(theta) if !theta.is_finite() => {
                return Err(Error::MalformedGate(format!(
                    "ry angle {theta} is not finite"
                )));
            }
            GateKind::Swap if !self.controls.is_empty() => {
                return Err(Error::MalformedGate(
                    "swap carries no controls; use cswap".into(),
                ));
            }
            GateKind::CSwap
                if self.controls.len() != 1 || self.controls[0].polarity != Polarity::Positive =>
            {
                return Err(Error::MalformedGate(
                    "cswap needs exactly one positive control".into(),
                ));
            }
            _ => {}
        }
        let mut seen = 0u128;
        let mut seen_large = Vec::new();
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::MalformedGate(format!(
                    "{} touches qubit {q} of a {num_qubits}-qubit circuit",
                    self.kind.label()
                )));
            }
            let repeated = if q < 128 {
                let bit = 1u128 << q;
                let hit = seen & bit != 0;
                seen |= bit;
                hit
            } else {
                let hit = seen_large.contains(&q);
                seen_large.push(q);
                hit
            };
            if repeated {
                return Err(Error::MalformedGate(format!(
                    "{} uses qubit {q} more than once",
                    self.kind.label()
                )));
            }
        }
        Ok(())
    }
}

/// Where a circuit came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub builder: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distribution: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<SamplingGrid>,
    #[serde(default)]
    pub generator: String,
}

impl Metadata {
    pub fn new(builder: &str) -> Self {
        Self {
            builder: builder.to_string(),
            distribution: None,
            grid: None,
            generator: concat!("qprep ", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    pub metadata: Metadata,
}

impl Circuit {
    pub fn new(num_qubits: usize, metadata: Metadata) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            metadata,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends gates produced by a builder that already guarantees validity.
    pub(crate) fn push_unchecked(&mut self, gate: Gate) {
        debug_assert!(gate.validate(self.num_qubits).is_ok(), "{gate:?}");
        self.gates.push(gate);
    }

    fn document(&self, layout: Option<serde_json::Value>) -> CircuitDocument {
        CircuitDocument {
            version: CIRCUIT_SCHEMA_VERSION,
            num_qubits: self.num_qubits,
            gates: self.gates.iter().map(GateRecord::from).collect(),
            metadata: Some(self.metadata.clone()),
            layout,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.document(None)).expect("circuit documents always serialize")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.document(None))?)
    }

    /// Pretty JSON with an extra `layout` entry after the gates.
    pub(crate) fn to_json_with_layout(&self, layout: serde_json::Value) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.document(Some(layout)))?)
    }

    /// Parses the versioned circuit schema. A `layout` entry written next to
    /// forked circuits is accepted and ignored here.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CircuitDocument = serde_json::from_str(text)?;
        if doc.version != CIRCUIT_SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported circuit schema version {}",
                doc.version
            )));
        }
        let mut circuit = Circuit::new(doc.num_qubits, doc.metadata.unwrap_or_default());
        for record in doc.gates {
            circuit.push(Gate::try_from(record)?)?;
        }
        Ok(circuit)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDocument {
    version: u32,
    num_qubits: usize,
    gates: Vec<GateRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    metadata: Option<Metadata>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    layout: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum KindTag {
    Ry,
    H,
    X,
    Swap,
    Cswap,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateRecord {
    kind: KindTag,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    target: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    targets: Option<Vec<usize>>,
    #[serde(default)]
    controls: Vec<Control>,
}

impl From<&Gate> for GateRecord {
    fn from(gate: &Gate) -> Self {
        let (kind, angle) = match gate.kind {
            GateKind::Ry(theta) => (KindTag::Ry, Some(theta)),
            GateKind::H => (KindTag::H, None),
            GateKind::X => (KindTag::X, None),
            GateKind::Swap => (KindTag::Swap, None),
            GateKind::CSwap => (KindTag::Cswap, None),
        };
        let (target, targets) = if gate.targets.len() == 1 {
            (Some(gate.targets[0]), None)
        } else {
            (None, Some(gate.targets.clone()))
        };
        Self {
            kind,
            angle,
            target,
            targets,
            controls: gate.controls.clone(),
        }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = Error;

    fn try_from(record: GateRecord) -> Result<Self> {
        let kind = match (record.kind, record.angle) {
            (KindTag::Ry, Some(theta)) => GateKind::Ry(theta),
            (KindTag::Ry, None) => {
                return Err(Error::MalformedGate("ry gate without an angle".into()));
            }
            (_, Some(_)) => {
                return Err(Error::MalformedGate("only ry gates carry an angle".into()));
            }
            (KindTag::H, None) => GateKind::H,
            (KindTag::X, None) => GateKind::X,
            (KindTag::Swap, None) => GateKind::Swap,
            (KindTag::Cswap, None) => GateKind::CSwap,
        };
        let targets = match (record.target, record.targets) {
            (Some(t), None) => vec![t],
            (None, Some(ts)) => ts,
            _ => {
                return Err(Error::MalformedGate(
                    "gate needs exactly one of `target` or `targets`".into(),
                ));
            }
        };
        Ok(Gate {
            kind,
            targets,
            controls: record.controls,
        })
    }
}
