//! Independent reference computations.
//!
//! - [`exact_count_tables`] and [`exact_count_graphs`]: big-integer dynamic
//!   programs over canonicalized residual states.
//! - [`charfn_quadrature_table`]: `P{S = s}` by trapezoidal quadrature of the
//!   characteristic function over the torus, for dimension at most 3.
//! - [`mc_gaussian_moments`]: Monte Carlo estimates of κ³ and κ⁴ from
//!   direct polynomial evaluation at Gaussian samples.

mod graphs;
mod mc;
mod quadrature;
mod tables;

use std::f64::consts::LN_2;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use graphs::{erdos_gallai, exact_count_graphs};
pub use mc::{mc_gaussian_moments, MCEstimate};
pub use quadrature::{charfn_quadrature_table, QuadratureResult};
pub use tables::exact_count_tables;

/// Cap on the number of memoized states per exact count. Transitions between
/// states are capped at [`Budget::max_transitions`] so that instances with
/// few states but very wide steps also fail fast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_states: usize,
}

impl Budget {
    pub const TRANSITIONS_PER_STATE: usize = 10;

    pub fn max_transitions(&self) -> usize {
        self.max_states.saturating_mul(Self::TRANSITIONS_PER_STATE)
    }

    pub(crate) fn exceeded(&self) -> crate::error::Error {
        crate::error::Error::BudgetExceeded {
            cap: self.max_states,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_states: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactCount {
    pub value: BigUint,
    /// `ln(value)`, `-inf` for a zero count.
    pub ln_value: f64,
    pub description: String,
    /// Peak number of memoized states.
    pub states: usize,
}

impl ExactCount {
    pub(crate) fn new(value: BigUint, description: String, states: usize) -> Self {
        let ln_value = ln_biguint(&value);
        Self {
            value,
            ln_value,
            description,
            states,
        }
    }
}

/// Natural log of a big integer, accurate to f64 rounding.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * LN_2
}

/// Binomial coefficient as a big integer.
pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
