//! Run configuration: flags, an optional JSON config file, and the validated
//! plan both resolve to.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::Context;
use clap::Args;
use serde::Deserialize;

use qprep_core::circuit::QasmOptions;
use qprep_core::dist::Target;
use qprep_core::grid::{zeta_from_seed, SamplingGrid};
use qprep_core::DEFAULT_TOL;

/// Raised for inputs rejected before any computation.
#[derive(Debug)]
pub struct ValidationError(pub String);

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

macro_rules! invalid {
    ($($arg:tt)*) => {
        return Err(ValidationError(format!($($arg)*)).into())
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Width(f64),
    Auto,
}

impl<'de> Deserialize<'de> for Window {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Width(f64),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Width(w) => Ok(Self::Width(w)),
            Raw::Name(s) if s == "auto" => Ok(Self::Auto),
            Raw::Name(s) => Err(serde::de::Error::custom(format!(
                "window must be a number or \"auto\", got {s:?}"
            ))),
        }
    }
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        s.parse::<f64>()
            .map(Self::Width)
            .map_err(|_| format!("expected a width or \"auto\", got {s:?}"))
    }
}

/// Settings shared by every subcommand. Flags win over `--config` entries.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with any of the settings below, using their long names
    /// (underscores for dashes).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Distribution as inline JSON or a path to a JSON file.
    #[arg(long, value_name = "JSON|FILE")]
    pub dist: Option<String>,

    /// Check or simulate this circuit JSON instead of building one.
    #[arg(long, value_name = "FILE")]
    pub circuit: Option<PathBuf>,

    /// Register size; implied by the probability count for discrete targets.
    #[arg(long, short = 'n')]
    pub qubits: Option<u32>,

    /// Window width, or "auto" for the distribution's default.
    #[arg(long)]
    pub window: Option<Window>,

    /// Window shift, 0 <= zeta < 2^(1-n). Overrides --zeta-seed.
    #[arg(long)]
    pub zeta: Option<f64>,

    /// Seed for a random window shift; 0 means no shift.
    #[arg(long)]
    pub zeta_seed: Option<u64>,

    /// Window center; defaults to the distribution's mode.
    #[arg(long)]
    pub center: Option<f64>,

    /// Relative tolerance of the periodic sums.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Rewrite the circuit into the binary-tree form.
    #[arg(long)]
    pub fork: bool,

    /// With --fork, add a control qubit gating every rotation.
    #[arg(long)]
    pub control_qubit: bool,

    /// Lower to RY, H, X, CNOT and CSWAP.
    #[arg(long)]
    pub lower: bool,

    /// In QASM output, realize negative controls with X gates instead of negctrl.
    #[arg(long)]
    pub x_conjugation: bool,

    #[arg(long, value_name = "PATH")]
    pub qasm: Option<PathBuf>,

    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,

    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,

    /// Write the angle table as JSON.
    #[arg(long, value_name = "PATH")]
    pub angles: Option<PathBuf>,

    /// First register size of a sweep.
    #[arg(long)]
    pub n_min: Option<u32>,

    /// Last register size of a sweep.
    #[arg(long)]
    pub n_max: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    dist: Option<serde_json::Value>,
    circuit: Option<PathBuf>,
    qubits: Option<u32>,
    window: Option<Window>,
    zeta: Option<f64>,
    zeta_seed: Option<u64>,
    center: Option<f64>,
    tol: Option<f64>,
    #[serde(default)]
    fork: bool,
    #[serde(default)]
    control_qubit: bool,
    #[serde(default)]
    lower: bool,
    #[serde(default)]
    x_conjugation: bool,
    qasm: Option<PathBuf>,
    json: Option<PathBuf>,
    csv: Option<PathBuf>,
    angles: Option<PathBuf>,
    n_min: Option<u32>,
    n_max: Option<u32>,
}

#[derive(Debug, Clone, Default)]
pub struct Outputs {
    pub qasm: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub angles: Option<PathBuf>,
}

/// Everything a command needs, checked up front.
#[derive(Debug, Clone)]
pub struct Plan {
    pub target: Target,
    pub circuit: Option<PathBuf>,
    pub qubits: Option<u32>,
    pub window: Window,
    pub zeta: Option<f64>,
    pub zeta_seed: u64,
    pub center: Option<f64>,
    pub tol: f64,
    pub fork: bool,
    pub control_qubit: bool,
    pub lower: bool,
    pub qasm: QasmOptions,
    pub outputs: Outputs,
    pub n_range: Option<(u32, u32)>,
}

fn read_dist(text: &str) -> anyhow::Result<Target> {
    let json = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).with_context(|| format!("reading distribution {text}"))?
    };
    Target::from_json(&json).map_err(|e| ValidationError(format!("distribution: {e}")).into())
}

fn load_config(path: &Path) -> anyhow::Result<RunConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| ValidationError(format!("config {}: {e}", path.display())).into())
}

impl Plan {
    pub fn from_args(args: &RunArgs) -> anyhow::Result<Self> {
        let file = match &args.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        let target = match (&args.dist, &file.dist) {
            (Some(text), _) => read_dist(text)?,
            (None, Some(serde_json::Value::String(path))) => read_dist(path)?,
            (None, Some(value)) => read_dist(&value.to_string())?,
            (None, None) => invalid!("a distribution is required (--dist)"),
        };
        let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol <= 1e-2) {
            invalid!("tol must lie in (0, 1e-2], got {tol}");
        }
        let window = args.window.or(file.window).unwrap_or(Window::Auto);
        if let Window::Width(w) = window {
            if !(w.is_finite() && w > 0.0) {
                invalid!("window must be positive, got {w}");
            }
        }
        let n_range = match (args.n_min.or(file.n_min), args.n_max.or(file.n_max)) {
            (None, None) => None,
            (Some(a), Some(b)) if 1 <= a && a <= b => Some((a, b)),
            (a, b) => invalid!("sweep range needs 1 <= n-min <= n-max, got {a:?}..{b:?}"),
        };
        Ok(Self {
            target,
            circuit: args.circuit.clone().or(file.circuit),
            qubits: args.qubits.or(file.qubits),
            window,
            zeta: args.zeta.or(file.zeta),
            zeta_seed: args.zeta_seed.or(file.zeta_seed).unwrap_or(0),
            center: args.center.or(file.center),
            tol,
            fork: args.fork || file.fork,
            control_qubit: args.control_qubit || file.control_qubit,
            lower: args.lower || file.lower,
            qasm: QasmOptions {
                x_conjugation: args.x_conjugation || file.x_conjugation,
            },
            outputs: Outputs {
                qasm: args.qasm.clone().or(file.qasm),
                json: args.json.clone().or(file.json),
                csv: args.csv.clone().or(file.csv),
                angles: args.angles.clone().or(file.angles),
            },
            n_range,
        })
    }

    /// Register size of a single run.
    pub fn n(&self) -> anyhow::Result<u32> {
        match (&self.target, self.qubits) {
            (Target::Discrete(p), Some(n)) if n != p.num_qubits() => invalid!(
                "{} probabilities prepare on {} qubits, --qubits says {n}",
                p.len(),
                p.num_qubits()
            ),
            (Target::Discrete(p), _) if p.num_qubits() < 2 => {
                invalid!("discrete targets need at least two probabilities")
            }
            (Target::Discrete(p), _) => Ok(p.num_qubits()),
            (Target::Continuous(_), Some(n)) => Ok(n),
            (Target::Continuous(_), None) => invalid!("--qubits is required for densities"),
        }
    }

    /// Sampling grid for a density on `n` qubits. The seeded shift is drawn
    /// for `seed_n` qubits so a sweep can share it across sizes.
    pub fn grid(&self, n: u32, seed_n: u32) -> anyhow::Result<Option<SamplingGrid>> {
        let Target::Continuous(spec) = &self.target else {
            return Ok(None);
        };
        let w = match self.window {
            Window::Width(w) => w,
            Window::Auto => spec.default_window(n)?.width,
        };
        let zeta = self
            .zeta
            .unwrap_or_else(|| zeta_from_seed(self.zeta_seed, seed_n));
        let center = self.center.unwrap_or_else(|| spec.mode());
        SamplingGrid::new(n, w, zeta, center)
            .map(Some)
            .map_err(|e| ValidationError(e.to_string()).into())
    }
}
