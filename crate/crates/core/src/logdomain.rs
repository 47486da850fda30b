//! Log-domain complex numbers and deterministic reductions.
//!
//! Series terms such as `(K/4π)^K` overflow `f64` long before the weights of
//! interest are reached, so every term is carried as `(ln|z|, arg z)` and sums
//! are formed by shifting with the largest log-magnitude first.
//!
//! Reductions use a fixed tree: the input is cut into blocks of
//! [`BLOCK_SIZE`] terms, each block is summed pairwise, and the block sums are
//! combined pairwise in block order. The tree depends only on the input
//! length, so single- and multi-threaded evaluation agree bit for bit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Number of terms per leaf block of the reduction tree.
pub const BLOCK_SIZE: usize = 1024;

/// A complex number stored as natural-log magnitude and phase in `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_mag: f64,
    pub phase: f64,
}

fn wrap_phase(phase: f64) -> f64 {
    if phase > -PI && phase <= PI {
        return phase;
    }
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

#[allow(clippy::should_implement_trait)]
impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_mag: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        log_mag: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        Self {
            log_mag,
            phase: wrap_phase(phase),
        }
    }

    /// Positive real number `exp(log_mag)`.
    pub fn from_log_real(log_mag: f64) -> Self {
        Self { log_mag, phase: 0.0 }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::new(0.0, 0.0) {
            return Self::ZERO;
        }
        Self::new(z.norm().ln(), z.arg())
    }

    pub fn to_complex(self) -> Complex64 {
        if self.log_mag == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn abs(&self) -> f64 {
        self.log_mag.exp()
    }

    pub fn conj(self) -> Self {
        Self::new(self.log_mag, -self.phase)
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_mag + other.log_mag, self.phase + other.phase)
    }

    pub fn div(self, other: Self) -> Self {
        Self::new(self.log_mag - other.log_mag, self.phase - other.phase)
    }

    /// Integer power; the exponent may be negative.
    pub fn powi(self, exponent: i64) -> Self {
        if self.is_zero() {
            return if exponent == 0 { Self::ONE } else { Self::ZERO };
        }
        let e = exponent as f64;
        Self::new(self.log_mag * e, self.phase * e)
    }

    /// Multiply by `exp(shift)` without touching the phase.
    pub fn scale_log(self, shift: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::new(self.log_mag + shift, self.phase)
    }

    /// Value of `self / exp(shift)` as an ordinary complex number.
    pub fn shifted(self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((self.log_mag - shift).exp(), self.phase)
    }
}

/// Pairwise (cascade) summation of a slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        len => {
            let mid = len / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        2 => values[0] + values[1],
        len => {
            let mid = len / 2;
            pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
        }
    }
}

fn max_log(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

/// `ln Σ exp(x_i)` with a global max shift and the fixed blocked tree.
pub fn log_sum_exp(log_terms: &[f64]) -> f64 {
    let shift = max_log(log_terms.iter().copied());
    if shift == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if shift == f64::INFINITY {
        return f64::INFINITY;
    }
    let blocks: Vec<f64> = log_terms
        .par_chunks(BLOCK_SIZE)
        .map(|chunk| {
            let scaled: Vec<f64> = chunk.iter().map(|&x| (x - shift).exp()).collect();
            pairwise_sum(&scaled)
        })
        .collect();
    shift + pairwise_sum(&blocks).ln()
}

/// Sum of log-domain complex terms, returned in the log domain.
pub fn log_sum_exp_complex(terms: &[LogComplex]) -> LogComplex {
    let shift = max_log(terms.iter().map(|t| t.log_mag));
    if shift == f64::NEG_INFINITY {
        return LogComplex::ZERO;
    }
    let total = sum_shifted(terms, shift);
    LogComplex::from_complex(total).scale_log(shift)
}

/// `Σ terms / exp(shift)` reduced with the fixed blocked tree.
pub fn sum_shifted(terms: &[LogComplex], shift: f64) -> Complex64 {
    let blocks: Vec<Complex64> = terms
        .par_chunks(BLOCK_SIZE)
        .map(|chunk| {
            let scaled: Vec<Complex64> = chunk.iter().map(|t| t.shifted(shift)).collect();
            pairwise_sum_complex(&scaled)
        })
        .collect();
    pairwise_sum_complex(&blocks)
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln sinh(x)` for `x > 0`, stable for large arguments.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln cosh(x)`, stable for large `|x|`.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
}
