//! Sampling window and the integer-to-real map `x(i) = x_o + dx * i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest register this crate will size a grid or statevector for.
pub const MAX_QUBITS: u32 = 24;

/// `2^n` equally spaced samples covering a window of width `w` around the
/// mode `x_bar`, shifted by the sub-grid offset `zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    n: u32,
    w: f64,
    zeta: f64,
    x_bar: f64,
    x_o: f64,
    delta_x: f64,
    f_nyquist: f64,
}

impl SamplingGrid {
    pub fn new(n: u32, w: f64, zeta: f64, x_bar: f64) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "qubit count must lie in 1..={MAX_QUBITS}, got {n}"
            )));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "window width must be positive, got {w}"
            )));
        }
        let zeta_max = zeta_upper_bound(n);
        if !(zeta.is_finite() && (0.0..zeta_max).contains(&zeta)) {
            return Err(Error::InvalidParameter(format!(
                "zeta must satisfy 0 <= zeta < {zeta_max}, got {zeta}"
            )));
        }
        if !x_bar.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "window center must be finite, got {x_bar}"
            )));
        }
        let delta_x = w / (1u64 << n) as f64;
        Ok(Self {
            n,
            w,
            zeta,
            x_bar,
            x_o: x_bar + w * (zeta - 1.0) / 2.0,
            delta_x,
            f_nyquist: 1.0 / (2.0 * delta_x),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn window(&self) -> f64 {
        self.w
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn x_bar(&self) -> f64 {
        self.x_bar
    }

    pub fn x_origin(&self) -> f64 {
        self.x_o
    }

    /// Sampling interval `w / 2^n`.
    pub fn delta_x(&self) -> f64 {
        self.delta_x
    }

    pub fn f_nyquist(&self) -> f64 {
        self.f_nyquist
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_to_x(&self, i: usize) -> Result<f64> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                bits: self.n,
            });
        }
        Ok(self.x(i))
    }

    /// Unchecked variant of [`index_to_x`](Self::index_to_x).
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_o + self.delta_x * i as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }
}

/// Exclusive upper bound `1 / 2^(n-1)` on the window shift.
pub fn zeta_upper_bound(n: u32) -> f64 {
    1.0 / (1u64 << (n.max(1) - 1)) as f64
}

/// Reproducible window shift: seed 0 maps to 0, any other seed draws
/// uniformly from `[0, 1/2^(n-1))`.
pub fn zeta_from_seed(seed: u64, n: u32) -> f64 {
    if seed == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.gen_range(0.0..zeta_upper_bound(n))
}

/// Little-endian bits of `i`; entry `m` is the state of qubit `q_m`.
pub fn bit_decompose(i: usize, n: u32) -> Result<Vec<u8>> {
    if n as usize >= usize::BITS as usize || i >> n != 0 {
        return Err(Error::IndexOutOfRange { index: i, bits: n });
    }
    Ok((0..n).map(|m| ((i >> m) & 1) as u8).collect())
}
