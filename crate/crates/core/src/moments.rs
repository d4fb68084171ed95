//! Second, third and fourth cumulants of the margin vector under the
//! maximum-entropy distribution, and their Gaussian summaries.
//!
//! Every cell (table) or edge (graph) `e` contributes a linear form
//! `t_e = t_first + t_second` of the dual coordinates. With per-cell
//! cumulant coefficients `λ_e`, `b_e`, `a_e`:
//!
//! ```text
//! K²(t) = Σ λ_e t_e² = t'Vt,   K³(t) = Σ b_e t_e³,   K⁴(t) = Σ a_e t_e⁴
//! ```
//!
//! With `t ~ N(0, V⁻¹)` and `C(e, f) = E t_e t_f`, Isserlis' theorem gives
//! `E t_e³ t_f³ = 9 C(e,e) C(f,f) C(e,f) + 6 C(e,f)³` and `E t_e⁴ = 3 C(e,e)²`,
//! so `κ³ = E (K³)²` and `κ⁴ = E K⁴` reduce to sums over cell pairs.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inverse_spd, log_det_spd, pairwise_sum};
use crate::maxent::{BernoulliFit, GeometricFit};

/// Per-cell cumulant coefficients: variance `λ`, third cumulant `b`,
/// fourth cumulant `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCoefficients {
    pub variance: Vec<f64>,
    pub cubic: Vec<f64>,
    pub quartic: Vec<f64>,
}

impl EdgeCoefficients {
    /// Cells in row-major order, matching [`build_table_covariance`].
    pub fn from_table_fit(fit: &GeometricFit) -> Self {
        let mut out = Self::with_capacity(fit.m() * fit.n());
        for j in 0..fit.m() {
            for k in 0..fit.n() {
                out.push(geometric_cumulants(fit.mu[(j, k)]));
            }
        }
        out
    }

    /// Edges `(i, j)`, `i < j`, in lexicographic order, matching
    /// [`build_graph_covariance`].
    pub fn from_graph_fit(fit: &BernoulliFit) -> Self {
        let n = fit.n();
        let mut out = Self::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(bernoulli_cumulants(fit.mu[(i, j)]));
            }
        }
        out
    }

    fn with_capacity(len: usize) -> Self {
        Self {
            variance: Vec::with_capacity(len),
            cubic: Vec::with_capacity(len),
            quartic: Vec::with_capacity(len),
        }
    }

    fn push(&mut self, (lam, b, a): (f64, f64, f64)) {
        self.variance.push(lam);
        self.cubic.push(b);
        self.quartic.push(a);
    }

    pub fn len(&self) -> usize {
        self.variance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variance.is_empty()
    }
}

/// `(λ, b, a)` of a geometric variable with mean `mu`.
pub fn geometric_cumulants(mu: f64) -> (f64, f64, f64) {
    let lam = mu * (1.0 + mu);
    (lam, lam * (1.0 + 2.0 * mu), lam * (1.0 + 6.0 * lam))
}

/// `(λ, b, a)` of a Bernoulli variable with mean `mu`.
pub fn bernoulli_cumulants(mu: f64) -> (f64, f64, f64) {
    let lam = mu * (1.0 - mu);
    (lam, lam * (1.0 - 2.0 * mu), lam * (1.0 - 6.0 * lam))
}

/// Coordinates whose sum forms the linear form of one cell or edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incidence {
    pub first: usize,
    pub second: Option<usize>,
}

impl Incidence {
    pub fn value(&self, t: &[f64]) -> f64 {
        t[self.first] + self.second.map_or(0.0, |s| t[s])
    }

    fn coords(&self) -> impl Iterator<Item = usize> {
        std::iter::once(self.first).chain(self.second)
    }
}

/// Covariance `V` of the margin vector together with the cell incidence.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceModel {
    pub dim: usize,
    pub matrix: DMatrix<f64>,
    pub incidence: Vec<Incidence>,
}

impl CovarianceModel {
    /// Accumulate `V = Σ λ_e x_e x_e'` where `x_e` is the incidence vector of `e`.
    pub fn from_parts(dim: usize, incidence: Vec<Incidence>, variance: &[f64]) -> Self {
        let mut matrix = DMatrix::zeros(dim, dim);
        for (inc, lam) in incidence.iter().zip(variance) {
            for a in inc.coords() {
                for b in inc.coords() {
                    matrix[(a, b)] += lam;
                }
            }
        }
        Self {
            dim,
            matrix,
            incidence,
        }
    }

    pub fn quadratic_form(&self, t: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(t);
        v.dot(&(&self.matrix * &v))
    }
}

/// Coordinates `v_1..v_m, w_1..w_{n−1}`; cell `(j, k)` maps to `v_j + w_k`
/// with `w_n ≡ 0`.
pub fn table_incidence(m: usize, n: usize) -> Vec<Incidence> {
    let mut out = Vec::with_capacity(m * n);
    for j in 0..m {
        for k in 0..n {
            out.push(Incidence {
                first: j,
                second: (k + 1 < n).then_some(m + k),
            });
        }
    }
    out
}

/// Edge `(i, j)` maps to `t_i + t_j`.
pub fn graph_incidence(n: usize) -> Vec<Incidence> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(Incidence {
                first: i,
                second: Some(j),
            });
        }
    }
    out
}

pub fn build_table_covariance(fit: &GeometricFit) -> CovarianceModel {
    let (m, n) = (fit.m(), fit.n());
    let coeffs = EdgeCoefficients::from_table_fit(fit);
    CovarianceModel::from_parts(m + n - 1, table_incidence(m, n), &coeffs.variance)
}

pub fn build_graph_covariance(fit: &BernoulliFit) -> Result<CovarianceModel> {
    let n = fit.n();
    if n < 3 {
        return Err(Error::SingularCovariance(n));
    }
    let coeffs = EdgeCoefficients::from_graph_fit(fit);
    Ok(CovarianceModel::from_parts(
        n,
        graph_incidence(n),
        &coeffs.variance,
    ))
}

/// `ln det V` by Cholesky factorization.
pub fn log_det(model: &CovarianceModel) -> Result<f64> {
    log_det_spd(&model.matrix)
}

/// Gaussian covariances `C(e, f) = E t_e t_f` under `t ~ N(0, V⁻¹)`.
#[derive(Debug, Clone)]
pub struct PairCovariance {
    inverse: DMatrix<f64>,
    incidence: Vec<Incidence>,
    sigma2: Vec<f64>,
}

impl PairCovariance {
    pub fn get(&self, e: usize, f: usize) -> f64 {
        // fixed evaluation order keeps the result exactly symmetric
        let (e, f) = (e.min(f), e.max(f));
        let (x, y) = (self.incidence[e], self.incidence[f]);
        let mut total = 0.0;
        for a in x.coords() {
            for b in y.coords() {
                total += self.inverse[(a, b)];
            }
        }
        total
    }

    /// `C(e, e)` for every cell.
    pub fn sigma2(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn len(&self) -> usize {
        self.incidence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.incidence.is_empty()
    }
}

pub fn edge_pair_covariances(model: &CovarianceModel) -> Result<PairCovariance> {
    let inverse = inverse_spd(&model.matrix)?;
    let mut cov = PairCovariance {
        inverse,
        incidence: model.incidence.clone(),
        sigma2: Vec::new(),
    };
    cov.sigma2 = (0..cov.len()).map(|e| cov.get(e, e)).collect();
    if cov.sigma2.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(cov)
}

/// `κ³ = Σ_{e,f} b_e b_f [9 σ_e² σ_f² C(e,f) + 6 C(e,f)³]`.
///
/// Rows are summed pairwise, then the row totals pairwise, so the result
/// is bit-reproducible.
pub fn kappa3(coeffs: &EdgeCoefficients, cov: &PairCovariance) -> f64 {
    let len = coeffs.len();
    let s2 = cov.sigma2();
    let mut row = vec![0.0; len];
    let mut totals = Vec::with_capacity(len);
    for e in 0..len {
        let be = coeffs.cubic[e];
        if be == 0.0 {
            totals.push(0.0);
            continue;
        }
        for (f, slot) in row.iter_mut().enumerate() {
            let c = cov.get(e, f);
            *slot = coeffs.cubic[f] * (9.0 * s2[e] * s2[f] * c + 6.0 * c * c * c);
        }
        totals.push(be * pairwise_sum(&row));
    }
    pairwise_sum(&totals)
}

/// `κ⁴ = 3 Σ_e a_e σ_e⁴`.
pub fn kappa4(coeffs: &EdgeCoefficients, cov: &PairCovariance) -> f64 {
    let terms: Vec<f64> = coeffs
        .quartic
        .iter()
        .zip(cov.sigma2())
        .map(|(a, s)| a * s * s)
        .collect();
    3.0 * pairwise_sum(&terms)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantSummary {
    pub dim: usize,
    pub log_det_v: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub edge_sigma2: Vec<f64>,
}

/// Log-determinant, κ³ and κ⁴ of a covariance model through the general
/// dense path.
pub fn summarize(model: &CovarianceModel, coeffs: &EdgeCoefficients) -> Result<CumulantSummary> {
    let log_det_v = log_det(model)?;
    let cov = edge_pair_covariances(model)?;
    Ok(CumulantSummary {
        dim: model.dim,
        log_det_v,
        kappa3: kappa3(coeffs, &cov),
        kappa4: kappa4(coeffs, &cov),
        edge_sigma2: cov.sigma2().to_vec(),
    })
}

// ---------------------------------------------------------------------------
// closed forms

/// Equal row sums `nμ` and equal column sums `mμ`: every cell has mean `μ`.
pub fn closed_form_equal_margins(m: usize, n: usize, mu: f64) -> CumulantSummary {
    let (mf, nf) = (m as f64, n as f64);
    let d = m + n - 1;
    let df = d as f64;
    let s2 = mu * (1.0 + mu);
    let scale = mf * nf * s2;
    let kappa3 = 3.0 * (5.0 * df * df - 4.0 * (mf - 1.0) * (nf - 1.0)) * (1.0 + 4.0 * s2) / scale;
    let kappa4 = 3.0 * df * df * (1.0 + 6.0 * s2) / scale;
    let log_det_v = df * s2.ln() + (nf - 1.0) * mf.ln() + (mf - 1.0) * nf.ln();
    CumulantSummary {
        dim: d,
        log_det_v,
        kappa3,
        kappa4,
        edge_sigma2: vec![df / scale; m * n],
    }
}

/// Closed forms for the `d`-regular graph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularGraphClosedForm {
    pub mu: f64,
    pub v: f64,
    /// Determinant, κ³ and κ⁴ as exact functions of `n` and `v`.
    pub summary: CumulantSummary,
    /// `6[(1−4v)²/v][4(n−2)²+1]/[n(n−1)]` as printed in the literature;
    /// does not agree with the Wick sum.
    pub printed_kappa3: f64,
    /// `6(1/v − 1)(n−2)/(n−1)` as printed in the literature.
    pub printed_kappa4: f64,
}

pub fn closed_form_regular_graph(n: usize, d: f64) -> Result<RegularGraphClosedForm> {
    if n < 3 {
        return Err(Error::SingularCovariance(n));
    }
    let nf = n as f64;
    if !(d > 0.0 && d < nf - 1.0) {
        return Err(Error::InvalidDegrees(format!(
            "regular degree {d} must lie strictly inside (0, {})",
            n - 1
        )));
    }
    let mu = d / (nf - 1.0);
    let v = mu * (1.0 - mu);
    let log_det_v = 2f64.ln() + (nf - 1.0).ln() + (nf - 1.0) * (nf - 2.0).ln() + nf * v.ln();

    // C(e,e) = 2s(n−2), C(share) = s(n−3), C(disjoint) = −2s, s = 1/((n−1)(n−2)v)
    let cube_sum = 8.0 * (nf - 2.0).powi(2) + 2.0 * (nf - 3.0).powi(3) - 4.0 * (nf - 3.0);
    let kappa3 = nf * (1.0 - 4.0 * v) / ((nf - 1.0) * v)
        * (18.0 + 3.0 * cube_sum / ((nf - 1.0) * (nf - 2.0).powi(2)));
    let kappa4 = 6.0 * nf * (1.0 - 6.0 * v) / ((nf - 1.0) * v);

    let printed_kappa3 =
        6.0 * (1.0 - 4.0 * v).powi(2) / v * (4.0 * (nf - 2.0).powi(2) + 1.0) / (nf * (nf - 1.0));
    let printed_kappa4 = 6.0 * (1.0 / v - 1.0) * (nf - 2.0) / (nf - 1.0);

    Ok(RegularGraphClosedForm {
        mu,
        v,
        summary: CumulantSummary {
            dim: n,
            log_det_v,
            kappa3,
            kappa4,
            edge_sigma2: vec![2.0 / ((nf - 1.0) * v); n * (n - 1) / 2],
        },
        printed_kappa3,
        printed_kappa4,
    })
}

/// `E (t_i + t_j)(t_r + t_s)` for the regular graph with edge variance `v`.
pub fn regular_graph_edge_covariance(n: usize, v: f64, e: (usize, usize), f: (usize, usize)) -> f64 {
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let nf = n as f64;
    let (i, j) = e;
    let (r, s) = f;
    (-2.0 / (nf - 1.0) + delta(i, r) + delta(i, s) + delta(j, r) + delta(j, s)) / ((nf - 2.0) * v)
}

/// `ln |V|` for `n1` vertices of one class and `n2` of another, with edge
/// variances `v11`, `v12`, `v22` within and across classes.
pub fn two_class_log_det(n1: usize, n2: usize, v11: f64, v12: f64, v22: f64) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let first = (a - 2.0) * v11 + b * v12;
    let second = (b - 2.0) * v22 + a * v12;
    let tail = ((2.0 * a - 2.0) * v11 + b * v12) * ((2.0 * b - 2.0) * v22 + a * v12)
        - a * b * v12 * v12;
    (a - 1.0) * first.ln() + (b - 1.0) * second.ln() + tail.ln()
}
