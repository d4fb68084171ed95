//! Point probability of the margin vector by quadrature of its
//! characteristic function.
//!
//! Under the fitted geometric model every table with margins `s` has the same
//! probability `e^{-I}`, so `#tables = P{S = s} · e^{I}`. The point
//! probability is a Fourier coefficient over the torus `[0, 2π)^d`; the
//! periodic trapezoid rule on an `N^d` grid returns it up to aliasing of
//! mass from `s + N·Z^d`, which vanishes geometrically in `N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxent::{GeometricFit, MarginSpec};

/// Dimensions above this make the `N^d` grid impractical.
pub const MAX_DIM: usize = 3;
pub const MIN_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    /// `ln P{S = s}` from the real part of the quadrature sum.
    pub ln_probability: f64,
    /// Imaginary part of the quadrature sum, zero up to rounding.
    pub imaginary: f64,
}

impl QuadratureResult {
    /// `ln #tables = ln P{S = s} + I`.
    pub fn ln_count(&self, entropy: f64) -> f64 {
        self.ln_probability + entropy
    }
}

/// Trapezoidal quadrature of `P{S = s}` for a fitted table model with
/// integer margins. Coordinates are the row angles and all column angles but
/// the last, which is fixed at zero.
pub fn charfn_quadrature_table(
    spec: &MarginSpec,
    fit: &GeometricFit,
    grid: usize,
) -> Result<QuadratureResult> {
    let (m, n) = (spec.m(), spec.n());
    let d = m + n - 1;
    if d > MAX_DIM {
        return Err(Error::DimensionTooLarge(d));
    }
    if grid < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid must be at least {MIN_GRID}")));
    }
    if !spec.is_integral() {
        return Err(Error::NonIntegerInstance("quadrature needs integer margins".into()));
    }
    if fit.m() != m || fit.n() != n {
        return Err(Error::InvalidArgument("fit does not match margins".into()));
    }
    let step = std::f64::consts::TAU / grid as f64;
    let roots: Vec<Complex64> = (0..grid).map(|t| Complex64::from_polar(1.0, step * t as f64)).collect();
    // per-cell characteristic function 1 / (1 - μ(e^{iθ} - 1)) on the grid
    let cell_cf: Vec<Vec<Complex64>> = fit
        .mu
        .iter()
        .map(|&mu| roots.iter().map(|z| 1.0 / (1.0 - mu * (z - 1.0))).collect())
        .collect();
    let cell = |j: usize, k: usize| &cell_cf[j + k * m]; // column-major storage
    let margins: Vec<usize> = spec
        .rows()
        .iter()
        .chain(&spec.cols()[..n - 1])
        .map(|&x| x.round() as usize % grid)
        .collect();

    let mut idx = vec![0usize; d];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut term = Complex64::new(1.0, 0.0);
        for j in 0..m {
            for k in 0..n {
                let w = if k + 1 < n { idx[m + k] } else { 0 };
                term *= cell(j, k)[(idx[j] + w) % grid];
            }
        }
        let phase = idx.iter().zip(&margins).map(|(a, s)| a * s).sum::<usize>() % grid;
        total += term * roots[phase].conj();

        let mut pos = 0;
        loop {
            if pos == d {
                let scale = (grid as f64).powi(d as i32);
                let p = total / scale;
                return Ok(QuadratureResult {
                    ln_probability: p.re.ln(),
                    imaginary: p.im,
                });
            }
            idx[pos] += 1;
            if idx[pos] < grid {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
