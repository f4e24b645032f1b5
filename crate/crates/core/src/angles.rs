//! Rotation angles of the upsampling circuit.
//!
//! Level `m` (1-based) of an `n`-qubit table controls qubit `q_{n-m}` and holds
//! `2^(n-m)` angles, one per value `i` of the lower `n-m` qubits:
//!
//! ```text
//! cos^2(theta_{n,m}(i) / 2) = S(x(i), w / 2^(m-1)) / S(x(i), w / 2^m)
//! ```
//!
//! where `S` is the periodic image sum and `x(i)` the `n`-qubit grid map. The
//! numerator is the weight of the branch `q_{n-m} = 0` and the denominator the
//! weight of both branches, so level `n` (a single angle) prepares `q_0` and
//! level 1 prepares the most significant qubit.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteSpec, DistributionSpec};
use crate::grid::SamplingGrid;
use crate::{Error, Result};

/// Denominator sums below this are treated as carrying no probability.
pub const DEAD_ZONE_FLOOR: f64 = 1e-300;
/// Largest excursion of a branch ratio outside `[0, 1]` accepted as rounding.
pub const RATIO_SLACK: f64 = 1e-9;

/// Angles `theta_{n,m}(i)` for `m = 1..=n` and `i < 2^(n-m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAngleTable")]
pub struct AngleTable {
    n: u32,
    delta_x_norm: Option<f64>,
    theta: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    dead_zone: Vec<DeadZoneEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    grid: Option<SamplingGrid>,
}

/// An angle whose branch weight vanished; its value is fixed at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeadZoneEntry {
    pub m: u32,
    pub i: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAngleTable {
    n: u32,
    delta_x_norm: Option<f64>,
    theta: Vec<Vec<f64>>,
    #[serde(default)]
    dead_zone: Vec<DeadZoneEntry>,
    #[serde(default)]
    grid: Option<SamplingGrid>,
}

impl TryFrom<RawAngleTable> for AngleTable {
    type Error = Error;

    fn try_from(raw: RawAngleTable) -> Result<Self> {
        let mut table = Self::from_levels(raw.n, raw.theta)?;
        table.delta_x_norm = raw.delta_x_norm;
        table.dead_zone = raw.dead_zone;
        table.grid = raw.grid;
        Ok(table)
    }
}

impl AngleTable {
    /// Builds a table from explicit levels; `levels[m-1]` must have
    /// `2^(n-m)` angles in `[0, pi]`.
    pub fn from_levels(n: u32, levels: Vec<Vec<f64>>) -> Result<Self> {
        if !(1..=crate::grid::MAX_QUBITS).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "angle table size must lie in 1..={}, got {n}",
                crate::grid::MAX_QUBITS
            )));
        }
        if levels.len() != n as usize {
            return Err(Error::Mismatch(format!(
                "{n}-qubit table needs {n} levels, got {}",
                levels.len()
            )));
        }
        for (idx, level) in levels.iter().enumerate() {
            let m = idx as u32 + 1;
            let expected = 1usize << (n - m);
            if level.len() != expected {
                return Err(Error::Mismatch(format!(
                    "level m={m} needs {expected} angles, got {}",
                    level.len()
                )));
            }
            if let Some(bad) = level
                .iter()
                .find(|t| !(t.is_finite() && (0.0..=std::f64::consts::PI).contains(*t)))
            {
                return Err(Error::InvalidParameter(format!(
                    "angle {bad} at level m={m} outside [0, pi]"
                )));
            }
        }
        Ok(Self {
            n,
            delta_x_norm: None,
            theta: levels,
            dead_zone: Vec::new(),
            grid: None,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// All levels, `levels()[m-1]` being level `m`.
    pub fn levels(&self) -> &[Vec<f64>] {
        &self.theta
    }

    pub fn level(&self, m: u32) -> &[f64] {
        &self.theta[m as usize - 1]
    }

    #[inline]
    pub fn theta(&self, m: u32, i: usize) -> f64 {
        self.theta[m as usize - 1][i]
    }

    /// Normalization `delta x_n`; absent for tables built from discrete
    /// probabilities.
    pub fn delta_x_norm(&self) -> Option<f64> {
        self.delta_x_norm
    }

    pub fn grid(&self) -> Option<&SamplingGrid> {
        self.grid.as_ref()
    }

    pub fn dead_zone(&self) -> &[DeadZoneEntry] {
        &self.dead_zone
    }

    pub fn total_angles(&self) -> usize {
        self.theta.iter().map(Vec::len).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `delta x_n = 1 / S(x_o, w / 2^n)`.
pub fn compute_delta_x(spec: &DistributionSpec, grid: &SamplingGrid, tol: f64) -> Result<f64> {
    let total = spec.periodic_sum(grid.x_origin(), grid.delta_x(), tol)?;
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "periodic sum over the grid is {total}; the window misses the density"
        )));
    }
    Ok(1.0 / total)
}

pub fn compute_theta(
    spec: &DistributionSpec,
    grid: &SamplingGrid,
    m: u32,
    i: usize,
    tol: f64,
) -> Result<f64> {
    let n = grid.n();
    if !(1..=n).contains(&m) {
        return Err(Error::InvalidParameter(format!(
            "level m must lie in 1..={n}, got {m}"
        )));
    }
    if i >= 1 << (n - m) {
        return Err(Error::IndexOutOfRange {
            index: i,
            bits: n - m,
        });
    }
    theta_entry(spec, grid, m, i, tol).map(|(theta, _)| theta)
}

/// Returns the angle and whether it fell in the dead zone.
fn theta_entry(
    spec: &DistributionSpec,
    grid: &SamplingGrid,
    m: u32,
    i: usize,
    tol: f64,
) -> Result<(f64, bool)> {
    let x = grid.x(i);
    let period = grid.window() / (1u64 << m) as f64;
    let both = spec.periodic_sum(x, period, tol)?;
    if both < DEAD_ZONE_FLOOR {
        return Ok((0.0, true));
    }
    let zero_branch = spec.periodic_sum(x, 2.0 * period, tol)?;
    Ok((angle_from_ratio(zero_branch / both, m, i)?, false))
}

/// `2 arccos sqrt(ratio)`, clamping rounding-level excursions.
fn angle_from_ratio(ratio: f64, m: u32, i: usize) -> Result<f64> {
    if !ratio.is_finite() || !(-RATIO_SLACK..=1.0 + RATIO_SLACK).contains(&ratio) {
        return Err(Error::RatioOutOfRange { ratio, m, i });
    }
    Ok(2.0 * ratio.clamp(0.0, 1.0).sqrt().acos())
}

/// Full table for a continuous density. Entries are computed independently
/// (in parallel), so the result does not depend on the thread count.
pub fn build_angle_table(
    spec: &DistributionSpec,
    grid: &SamplingGrid,
    tol: f64,
) -> Result<AngleTable> {
    let n = grid.n();
    let delta_x_norm = compute_delta_x(spec, grid, tol)?;
    let mut theta = Vec::with_capacity(n as usize);
    let mut dead_zone = Vec::new();
    for m in 1..=n {
        let entries = (0..1usize << (n - m))
            .into_par_iter()
            .map(|i| theta_entry(spec, grid, m, i, tol))
            .collect::<Result<Vec<_>>>()?;
        dead_zone.extend(
            entries
                .iter()
                .enumerate()
                .filter(|(_, (_, dead))| *dead)
                .map(|(i, _)| DeadZoneEntry { m, i }),
        );
        theta.push(entries.into_iter().map(|(t, _)| t).collect());
    }
    Ok(AngleTable {
        n,
        delta_x_norm: Some(delta_x_norm),
        theta,
        dead_zone,
        grid: Some(*grid),
    })
}

/// `theta(i) = 2 arccos sqrt(P(i))` for each discrete probability.
pub fn discrete_theta(probs: &DiscreteSpec) -> Vec<f64> {
    probs
        .probs()
        .iter()
        .map(|p| 2.0 * p.clamp(0.0, 1.0).sqrt().acos())
        .collect()
}

/// Angle table of the discrete construction on `n = log2(len) + 1` qubits:
/// level 1 carries `discrete_theta`, every other level is `pi/2`.
pub fn discrete_angle_table(probs: &DiscreteSpec) -> Result<AngleTable> {
    let n = probs.num_qubits();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "discrete preparation needs at least two probabilities".into(),
        ));
    }
    let mut levels = vec![discrete_theta(probs)];
    levels.extend((2..=n).map(|m| vec![FRAC_PI_2; 1 << (n - m)]));
    AngleTable::from_levels(n, levels)
}

/// Evaluates the continuous angle formula against the density that places
/// mass `P(k) / 2^(n-1)` at `x(k)` and `(1 - P(k)) / 2^(n-1)` at
/// `x(2^(n-1) + k)`, with each point mass smoothed into a Gaussian of width
/// `eps`. The grid has `w = 1`, `zeta = 0` and is centered at 0, so `eps` is
/// measured in window widths. As `eps -> 0` the result tends to
/// `2 arccos sqrt(P(i))` for `m = 1` and `pi/2` for `m > 1`.
pub fn discrete_theta_numeric(
    probs: &DiscreteSpec,
    n: u32,
    m: u32,
    i: usize,
    eps: f64,
) -> Result<f64> {
    if n < 2 || n != probs.num_qubits() {
        return Err(Error::Mismatch(format!(
            "{} probabilities need n = {}, got n = {n}",
            probs.len(),
            probs.num_qubits()
        )));
    }
    if !(1..=n).contains(&m) {
        return Err(Error::InvalidParameter(format!(
            "level m must lie in 1..={n}, got {m}"
        )));
    }
    let half = 1usize << (n - 1);
    if i >= half {
        return Err(Error::IndexOutOfRange {
            index: i,
            bits: n - 1,
        });
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !(1.0 / eps).is_finite() {
        return Err(Error::SmoothingUnderflow { eps });
    }

    let grid = SamplingGrid::new(n, 1.0, 0.0, 0.0)?;
    let scale = 1.0 / half as f64;
    let mut components = Vec::with_capacity(2 * half);
    for (k, &p) in probs.probs().iter().enumerate() {
        components.push((grid.x(k), p * scale));
        components.push((grid.x(half + k), (1.0 - p) * scale));
    }
    components.retain(|&(_, weight)| weight > 0.0);

    let smoothed_sum = |x: f64, period: f64| -> Result<f64> {
        components.iter().try_fold(0.0, |acc, &(center, weight)| {
            let delta = DistributionSpec::Gaussian {
                mu: center,
                sigma: eps,
            };
            Ok(acc + weight * delta.periodic_sum(x, period, crate::DEFAULT_TOL)?)
        })
    };

    let x = grid.x(i);
    let period = 1.0 / (1u64 << m) as f64;
    let both = smoothed_sum(x, period)?;
    if !(both.is_finite() && both > 0.0) {
        return Err(Error::SmoothingUnderflow { eps });
    }
    let zero_branch = smoothed_sum(x, 2.0 * period)?;
    angle_from_ratio(zero_branch / both, m, i)
}
