//! Probability densities on the real line, discrete probability vectors, and
//! periodic image sums `S(x, p) = sum_j P(x + j p)`.
//!
//! Every angle in the preparation circuit is a ratio of two periodic sums, so
//! the summation here is the numerical foundation of the whole crate. Sums are
//! expanded symmetrically around the image of `x` closest to the mode and
//! stop once the neglected tails are bounded below `tol` relative to the
//! accumulated value:
//!
//! * light tails (Gaussian, Laplace) use the integral bound
//!   `sum_{j>J} P(y_J + j p) <= SF(y_J) / p`, which holds because the density
//!   is monotone beyond the mode;
//! * power-law tails (Cauchy, Student's t) would need ~`1/tol` shells under
//!   that bound, so the tail is added as an Euler-Maclaurin correction and the
//!   stopping rule is applied to the first neglected correction term.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::{beta::beta_reg, erf::erfc, gamma::ln_gamma};

use crate::{Error, Result};

/// Minimum number of shells `j = ±1, ±2, ...` examined before stopping.
const MIN_SHELLS: usize = 3;
/// Hard cap on `|j|`.
pub const MAX_SHELLS: usize = 1_000_000;
/// Distance from the mode, in scale units, beyond which power-law tails are
/// treated as asymptotic for the Euler-Maclaurin error estimate.
const HEAVY_ASYMPTOTIC_U: f64 = 20.0;

/// A continuous density with support on the whole real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawDistribution")]
pub enum DistributionSpec {
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    Laplace {
        mu: f64,
        b: f64,
    },
    Cauchy {
        x0: f64,
        gamma: f64,
    },
    /// Standard Student's t with `nu` degrees of freedom.
    StudentT {
        nu: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDistribution {
    Gaussian { mu: f64, sigma: f64 },
    Laplace { mu: f64, b: f64 },
    Cauchy { x0: f64, gamma: f64 },
    StudentT { nu: f64 },
}

impl TryFrom<RawDistribution> for DistributionSpec {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Gaussian { mu, sigma } => Self::gaussian(mu, sigma),
            RawDistribution::Laplace { mu, b } => Self::laplace(mu, b),
            RawDistribution::Cauchy { x0, gamma } => Self::cauchy(x0, gamma),
            RawDistribution::StudentT { nu } => Self::student_t(nu),
        }
    }
}

/// Width of the sampling window suggested for a density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowChoice {
    pub width: f64,
    /// Set for power-law tails, where the images of neighbouring periods are
    /// never negligible and the single-image approximation holds only loosely.
    pub loose_tail: bool,
}

impl DistributionSpec {
    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        let spec = Self::Gaussian { mu, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn laplace(mu: f64, b: f64) -> Result<Self> {
        let spec = Self::Laplace { mu, b };
        spec.validate()?;
        Ok(spec)
    }

    pub fn cauchy(x0: f64, gamma: f64) -> Result<Self> {
        let spec = Self::Cauchy { x0, gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn student_t(nu: f64) -> Result<Self> {
        let spec = Self::StudentT { nu };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (location, scale, name) = match *self {
            Self::Gaussian { mu, sigma } => (mu, sigma, "sigma"),
            Self::Laplace { mu, b } => (mu, b, "b"),
            Self::Cauchy { x0, gamma } => (x0, gamma, "gamma"),
            Self::StudentT { nu } => (0.0, nu, "nu"),
        };
        if !location.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "location must be finite, got {location}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive and finite, got {scale}"
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian { .. } => "gaussian",
            Self::Laplace { .. } => "laplace",
            Self::Cauchy { .. } => "cauchy",
            Self::StudentT { .. } => "student_t",
        }
    }

    /// Location of the maximum of the density.
    pub fn mode(&self) -> f64 {
        match *self {
            Self::Gaussian { mu, .. } | Self::Laplace { mu, .. } => mu,
            Self::Cauchy { x0, .. } => x0,
            Self::StudentT { .. } => 0.0,
        }
    }

    /// Natural width unit of the density (`sigma`, `b`, `gamma`, or 1).
    pub fn scale(&self) -> f64 {
        match *self {
            Self::Gaussian { sigma, .. } => sigma,
            Self::Laplace { b, .. } => b,
            Self::Cauchy { gamma, .. } => gamma,
            Self::StudentT { .. } => 1.0,
        }
    }

    pub fn has_power_law_tail(&self) -> bool {
        matches!(self, Self::Cauchy { .. } | Self::StudentT { .. })
    }

    pub fn pdf_at(&self, x: f64) -> f64 {
        self.prepared().pdf(x)
    }

    /// `sum_j P(x + j * period)`, truncated so that the neglected tail stays
    /// below `tol` relative to the returned value.
    pub fn periodic_sum(&self, x: f64, period: f64, tol: f64) -> Result<f64> {
        check_sum_args(x, period, tol)?;
        self.prepared().periodic_sum(x, period, tol)
    }

    /// Window width: 12 scale units for exponential tails, 40 for power-law
    /// tails (flagged as loose).
    pub fn default_window(&self, n: u32) -> Result<WindowChoice> {
        if n < 1 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let (factor, loose_tail) = if self.has_power_law_tail() {
            (40.0, true)
        } else {
            (12.0, false)
        };
        Ok(WindowChoice {
            width: factor * self.scale(),
            loose_tail,
        })
    }

    fn prepared(&self) -> Prepared {
        match *self {
            Self::Gaussian { mu, sigma } => Prepared {
                mode: mu,
                scale: sigma,
                norm: 1.0 / (sigma * (2.0 * PI).sqrt()),
                shape: Shape::Gaussian,
            },
            Self::Laplace { mu, b } => Prepared {
                mode: mu,
                scale: b,
                norm: 0.5 / b,
                shape: Shape::Laplace,
            },
            Self::Cauchy { x0, gamma } => Prepared {
                mode: x0,
                scale: gamma,
                norm: 1.0 / (PI * gamma),
                shape: Shape::Cauchy,
            },
            Self::StudentT { nu } => Prepared {
                mode: 0.0,
                scale: 1.0,
                norm: (ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu)).exp() / (nu * PI).sqrt(),
                shape: Shape::StudentT { nu },
            },
        }
    }
}

fn check_sum_args(x: f64, period: f64, tol: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "x must be finite, got {x}"
        )));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "period must be positive, got {period}"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {tol}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Gaussian,
    Laplace,
    Cauchy,
    StudentT { nu: f64 },
}

/// A symmetric unimodal density with its normalization constant evaluated
/// once. All tail quantities take `u = |y - mode| / scale >= 0`.
#[derive(Debug, Clone, Copy)]
struct Prepared {
    mode: f64,
    scale: f64,
    norm: f64,
    shape: Shape,
}

impl Prepared {
    fn pdf(&self, x: f64) -> f64 {
        self.density(((x - self.mode) / self.scale).abs())
    }

    fn density(&self, u: f64) -> f64 {
        let profile = match self.shape {
            Shape::Gaussian => (-0.5 * u * u).exp(),
            Shape::Laplace => (-u).exp(),
            Shape::Cauchy => 1.0 / (1.0 + u * u),
            Shape::StudentT { nu } => (-0.5 * (nu + 1.0) * (u * u / nu).ln_1p()).exp(),
        };
        self.norm * profile
    }

    /// Probability mass beyond `mode + u * scale`.
    fn survival(&self, u: f64) -> f64 {
        match self.shape {
            Shape::Gaussian => 0.5 * erfc(u / std::f64::consts::SQRT_2),
            Shape::Laplace => 0.5 * (-u).exp(),
            Shape::Cauchy => 1.0_f64.atan2(u) / PI,
            Shape::StudentT { nu } => 0.5 * beta_reg(0.5 * nu, 0.5, nu / (nu + u * u)),
        }
    }

    /// Derivative `dP/dy` at `mode + u * scale` (non-positive).
    fn slope(&self, u: f64) -> f64 {
        let d = match self.shape {
            Shape::Gaussian => -u * (-0.5 * u * u).exp(),
            Shape::Laplace => -(-u).exp(),
            Shape::Cauchy => -2.0 * u / (1.0 + u * u).powi(2),
            Shape::StudentT { nu } => {
                -(nu + 1.0) / nu * u * (-0.5 * (nu + 3.0) * (u * u / nu).ln_1p()).exp()
            }
        };
        self.norm * d / self.scale
    }

    /// Exponent `a` of the asymptotic decay `P ~ u^{-a}`.
    fn tail_exponent(&self) -> Option<f64> {
        match self.shape {
            Shape::Cauchy => Some(2.0),
            Shape::StudentT { nu } => Some(nu + 1.0),
            Shape::Gaussian | Shape::Laplace => None,
        }
    }

    /// Euler-Maclaurin estimate of `sum_{j>J} P(y_J + j p)` where `y_J` sits
    /// `u` scale units beyond the mode.
    fn tail_estimate(&self, u: f64, period: f64) -> f64 {
        self.survival(u) / period - 0.5 * self.density(u) - period * self.slope(u) / 12.0
    }

    /// Magnitude of the first neglected Euler-Maclaurin term,
    /// `p^3 |P'''| / 720`, from the power-law asymptote.
    fn tail_estimate_error(&self, u: f64, period: f64, exponent: f64) -> f64 {
        let dist = u * self.scale;
        let third = exponent * (exponent + 1.0) * (exponent + 2.0) * self.density(u) / dist.powi(3);
        period.powi(3) * third / 720.0
    }

    fn periodic_sum(&self, x: f64, period: f64, tol: f64) -> Result<f64> {
        // Start from the image closest to the mode so shells decrease outward.
        let shift = ((x - self.mode) / period).round();
        let x0 = x - shift * period;
        let heavy = self.tail_exponent();

        let mut acc = CompensatedSum::new(self.pdf(x0));
        let mut bound = f64::INFINITY;
        for j in 1..=MAX_SHELLS {
            let offset = j as f64 * period;
            let right = x0 + offset;
            let left = x0 - offset;
            acc.add(self.pdf(right));
            acc.add(self.pdf(left));
            if j < MIN_SHELLS {
                continue;
            }
            let u_right = (right - self.mode) / self.scale;
            let u_left = (self.mode - left) / self.scale;
            let total = acc.value();
            match heavy {
                None => {
                    bound = (self.survival(u_right) + self.survival(u_left)) / period;
                    if bound <= tol * total {
                        return Ok(total);
                    }
                }
                Some(exponent) => {
                    if u_right.min(u_left) < HEAVY_ASYMPTOTIC_U {
                        continue;
                    }
                    bound = self.tail_estimate_error(u_right, period, exponent)
                        + self.tail_estimate_error(u_left, period, exponent);
                    if bound <= tol * total {
                        acc.add(self.tail_estimate(u_right, period));
                        acc.add(self.tail_estimate(u_left, period));
                        return Ok(acc.value());
                    }
                }
            }
        }
        Err(Error::Truncation {
            shells: MAX_SHELLS,
            achieved_bound: bound,
            accumulated: acc.value(),
        })
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn new(first: f64) -> Self {
        Self {
            sum: first,
            compensation: 0.0,
        }
    }

    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Normalization tolerance for discrete probability vectors.
pub const DISCRETE_SUM_TOL: f64 = 1e-12;

/// Discrete probabilities over `2^(n-1)` outcomes, prepared on `n` qubits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSpec {
    probs: Vec<f64>,
}

impl DiscreteSpec {
    /// Validates `probs` and zero-pads it at the high-index end to the next
    /// power of two.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter(
                "probability vector is empty".into(),
            ));
        }
        if let Some((k, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && (0.0..=1.0).contains(*p)))
        {
            return Err(Error::InvalidParameter(format!(
                "probability {k} is {p}, outside [0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > DISCRETE_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        probs.resize(probs.len().next_power_of_two(), 0.0);
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Register size `n` with `len == 2^(n-1)`.
    pub fn num_qubits(&self) -> u32 {
        self.probs.len().trailing_zeros() + 1
    }
}

/// Binomial probabilities `C(l, k) p^k (1-p)^(l-k)` for `k = 0..=l`,
/// zero-padded to a power of two.
pub fn make_binomial(l: u32, p: f64) -> Result<DiscreteSpec> {
    if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
        return Err(Error::InvalidParameter(format!(
            "binomial p must lie in [0, 1], got {p}"
        )));
    }
    let q = 1.0 - p;
    let raw: Vec<f64> = if l <= 1000 {
        // Exact integer coefficients while they fit; C(1000, 500) ~ 2.7e299.
        let mut coeff = 1.0_f64;
        (0..=l)
            .map(|k| {
                if k > 0 {
                    coeff = coeff * f64::from(l - k + 1) / f64::from(k);
                }
                coeff * p.powi(k as i32) * q.powi((l - k) as i32)
            })
            .collect()
    } else {
        let lf = f64::from(l);
        (0..=l)
            .map(|k| {
                let kf = f64::from(k);
                let log_p = if k == 0 { 0.0 } else { kf * p.ln() };
                let log_q = if k == l { 0.0 } else { (lf - kf) * q.ln() };
                (ln_gamma(lf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(lf - kf + 1.0) + log_p + log_q)
                    .exp()
            })
            .collect()
    };
    // Removes accumulated rounding; exact-dyadic cases divide by exactly 1.
    let total: f64 = raw.iter().sum();
    let probs = raw.into_iter().map(|v| v / total).collect();
    DiscreteSpec::new(probs)
}

/// A distribution named in a run configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Continuous(DistributionSpec),
    Discrete(DiscreteSpec),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawTarget {
    Gaussian { mu: f64, sigma: f64 },
    Laplace { mu: f64, b: f64 },
    Cauchy { x0: f64, gamma: f64 },
    StudentT { nu: f64 },
    Discrete { probs: Vec<f64> },
    Binomial { l: u32, p: f64 },
}

impl Target {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawTarget = serde_json::from_str(text)?;
        Ok(match raw {
            RawTarget::Gaussian { mu, sigma } => {
                Self::Continuous(DistributionSpec::gaussian(mu, sigma)?)
            }
            RawTarget::Laplace { mu, b } => Self::Continuous(DistributionSpec::laplace(mu, b)?),
            RawTarget::Cauchy { x0, gamma } => {
                Self::Continuous(DistributionSpec::cauchy(x0, gamma)?)
            }
            RawTarget::StudentT { nu } => Self::Continuous(DistributionSpec::student_t(nu)?),
            RawTarget::Discrete { probs } => Self::Discrete(DiscreteSpec::new(probs)?),
            RawTarget::Binomial { l, p } => Self::Discrete(make_binomial(l, p)?),
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            Self::Continuous(spec) => serde_json::to_value(spec),
            Self::Discrete(spec) => serde_json::to_value(RawTarget::Discrete {
                probs: spec.probs.clone(),
            }),
        }
        .expect("distribution specs always serialize")
    }
}

/// Lognormal relabeling of Gaussian-domain samples: `y = e^x` with widths
/// `dy = e^x dx`.
pub fn map_lognormal_support(grid_xs: &[f64], delta_x: f64) -> (Vec<f64>, Vec<f64>) {
    grid_xs
        .iter()
        .map(|&x| {
            let y = x.exp();
            (y, y * delta_x)
        })
        .unzip()
}
