//! Monte Carlo estimates of κ³ and κ⁴ by sampling `t ~ N(0, V⁻¹)` and
//! evaluating the cubic and quartic forms directly, bypassing the pairwise
//! covariance sums.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cholesky;
use crate::moments::{CovarianceModel, EdgeCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub kappa3_hat: f64,
    pub kappa4_hat: f64,
    /// Standard errors of the sample means.
    pub se3: f64,
    pub se4: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Default)]
struct Welford {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.n < 2.0 {
            return f64::INFINITY;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

/// `κ̂³ = mean (Σ b_e t_e³)²` and `κ̂⁴ = mean Σ a_e t_e⁴` over `samples`
/// draws of `t = L⁻ᵀ z`, where `V = LLᵀ` and `z` is standard normal.
/// Deterministic for a given seed.
pub fn mc_gaussian_moments(
    model: &CovarianceModel,
    coeffs: &EdgeCoefficients,
    samples: usize,
    seed: u64,
) -> Result<MCEstimate> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    if coeffs.len() != model.incidence.len() {
        return Err(Error::InvalidArgument("coefficients do not match the model".into()));
    }
    let chol = cholesky(&model.matrix)?;
    let lt = chol.l().transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k3 = Welford::default();
    let mut k4 = Welford::default();
    let mut z = DVector::<f64>::zeros(model.dim);
    for _ in 0..samples {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let t = lt
            .solve_upper_triangular(&z)
            .ok_or(Error::NotPositiveDefinite)?;
        let t = t.as_slice();
        let mut cubic = 0.0;
        let mut quartic = 0.0;
        for ((inc, b), a) in model.incidence.iter().zip(&coeffs.cubic).zip(&coeffs.quartic) {
            let te = inc.value(t);
            let te2 = te * te;
            cubic += b * te2 * te;
            quartic += a * te2 * te2;
        }
        k3.push(cubic * cubic);
        k4.push(quartic);
    }
    Ok(MCEstimate {
        kappa3_hat: k3.mean,
        kappa4_hat: k4.mean,
        se3: k3.std_error(),
        se4: k4.std_error(),
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxent::{fit_graph, DegreeSpec, SolverOptions};
    use crate::moments::{build_graph_covariance, summarize};

    fn regular(n: usize, d: f64) -> (CovarianceModel, EdgeCoefficients) {
        let spec = DegreeSpec::new(vec![d; n]).unwrap();
        let fit = fit_graph(&spec, &SolverOptions::default()).unwrap();
        (
            build_graph_covariance(&fit).unwrap(),
            EdgeCoefficients::from_graph_fit(&fit),
        )
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let (model, coeffs) = regular(6, 2.0);
        let a = mc_gaussian_moments(&model, &coeffs, 2000, 7).unwrap();
        let b = mc_gaussian_moments(&model, &coeffs, 2000, 7).unwrap();
        assert_eq!(a, b);
        let c = mc_gaussian_moments(&model, &coeffs, 2000, 8).unwrap();
        assert_ne!(a.kappa3_hat, c.kappa3_hat);
    }

    #[test]
    fn symmetric_edges_have_no_skew() {
        // d = (n-1)/2 puts every edge probability at one half
        let (model, coeffs) = regular(7, 3.0);
        let est = mc_gaussian_moments(&model, &coeffs, 5000, 1).unwrap();
        assert!(est.kappa3_hat.abs() < 1e-20);
    }

    #[test]
    fn cubic_graphs_agree_with_pair_sums() {
        let (model, coeffs) = regular(8, 3.0);
        let exact = summarize(&model, &coeffs).unwrap();
        let est = mc_gaussian_moments(&model, &coeffs, 100_000, 2024).unwrap();
        assert!((est.kappa3_hat - exact.kappa3).abs() < 4.0 * est.se3);
        assert!((est.kappa4_hat - exact.kappa4).abs() < 4.0 * est.se4);
        // far from the misprinted closed form value
        assert!((est.kappa3_hat - 0.026420).abs() > 50.0 * est.se3);
    }

    #[test]
    fn standard_error_shrinks_with_samples() {
        let (model, coeffs) = regular(8, 3.0);
        let small = mc_gaussian_moments(&model, &coeffs, 20_000, 3).unwrap();
        let large = mc_gaussian_moments(&model, &coeffs, 40_000, 3).unwrap();
        let ratio = large.se3 / small.se3;
        assert!((0.6..=0.85).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let (model, mut coeffs) = regular(6, 2.0);
        coeffs.cubic.pop();
        coeffs.quartic.pop();
        coeffs.variance.pop();
        assert!(mc_gaussian_moments(&model, &coeffs, 100, 0).is_err());
    }
}
