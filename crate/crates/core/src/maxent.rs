//! Maximum-entropy product distributions matching prescribed margins.
//!
//! Tables: independent geometric cells with `ln(1 + 1/μ_jk) = α_j + β_k`.
//! Graphs: independent Bernoulli edges with `logit(μ_ij) = α_i + α_j`.
//!
//! Both fits minimize the strictly convex dual potential by damped Newton
//! with backtracking, dropping to a coordinate sweep when the line search
//! makes no progress.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pairwise_sum, solve_spd};

/// Dual parameters beyond this magnitude are treated as divergent.
pub const ALPHA_CAP: f64 = 40.0;
const MU_FLOOR: f64 = 1e-12;
const MU_CEIL_TABLE: f64 = 1e12;
const INTEGER_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Absolute tolerance on the maximum margin residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

/// Row and column sums of a table instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginSpec {
    rows: Vec<f64>,
    cols: Vec<f64>,
}

impl MarginSpec {
    pub fn new(rows: Vec<f64>, cols: Vec<f64>) -> Result<Self> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::InfeasibleMargins("rows and cols must be non-empty".into()));
        }
        if let Some(x) = rows.iter().chain(&cols).find(|x| !(**x > 0.0) || !x.is_finite()) {
            return Err(Error::InfeasibleMargins(format!(
                "margins must be finite and positive, got {x}"
            )));
        }
        let row_total: f64 = rows.iter().sum();
        let col_total: f64 = cols.iter().sum();
        if (row_total - col_total).abs() > 1e-9 * row_total {
            return Err(Error::InfeasibleMargins(format!(
                "row total {row_total} differs from column total {col_total}"
            )));
        }
        Ok(Self { rows, cols })
    }

    /// `m` rows each summing to `n·mean`, `n` columns each summing to `m·mean`.
    pub fn equal(m: usize, n: usize, mean: f64) -> Result<Self> {
        Self::new(vec![n as f64 * mean; m], vec![m as f64 * mean; n])
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn cols(&self) -> &[f64] {
        &self.cols
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn total(&self) -> f64 {
        self.rows.iter().sum()
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.rows.iter().chain(&self.cols).all(|x| is_integer(*x))
    }
}

/// Target degrees of a graph instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeSpec {
    degrees: Vec<f64>,
}

impl DegreeSpec {
    pub fn new(degrees: Vec<f64>) -> Result<Self> {
        let n = degrees.len();
        if n < 3 {
            return Err(Error::InvalidDegrees(format!(
                "need at least 3 vertices, got {n}"
            )));
        }
        let top = (n - 1) as f64;
        if let Some(x) = degrees
            .iter()
            .find(|x| !x.is_finite() || **x < 0.0 || **x > top)
        {
            return Err(Error::InvalidDegrees(format!(
                "degree {x} outside [0, {top}]"
            )));
        }
        Ok(Self { degrees })
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_integral(&self) -> bool {
        self.degrees.iter().all(|x| is_integer(*x))
    }

    /// Degree sum, when every degree is an integer.
    pub fn integer_sum(&self) -> Option<u64> {
        self.is_integral()
            .then(|| self.degrees.iter().map(|x| x.round() as u64).sum())
    }

    /// Degrees of the complementary graph, `n − 1 − d_i`.
    pub fn complement(&self) -> Self {
        let top = (self.n() - 1) as f64;
        Self {
            degrees: self.degrees.iter().map(|d| top - d).collect(),
        }
    }
}

pub(crate) fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() <= INTEGER_EPS * x.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricFit {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// `m × n` cell expectations.
    pub mu: DMatrix<f64>,
    /// Entropy `I(P)` in nats.
    pub entropy: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl GeometricFit {
    pub fn m(&self) -> usize {
        self.mu.nrows()
    }

    pub fn n(&self) -> usize {
        self.mu.ncols()
    }
}

/// Result of removing isolated vertices and peeling vertices adjacent to
/// every other remaining vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Peeling {
    /// Original indices of the surviving vertices.
    pub core: Vec<usize>,
    /// Residual degrees of the surviving vertices.
    pub core_degrees: Vec<f64>,
    pub removed_isolated: usize,
    pub peeled_full: usize,
}

/// Iteratively drop degree-0 vertices and peel degree-(n−1) vertices.
///
/// Each removal fixes a row of the adjacency matrix, so the count of graphs
/// factors exactly through the core. Fails with `MaxEntBoundary` when a
/// residual degree leaves `[0, n_core − 1]`.
pub fn peel_degrees(degrees: &[f64]) -> Result<Peeling> {
    let mut alive: Vec<usize> = (0..degrees.len()).collect();
    let mut deg = degrees.to_vec();
    let mut removed_isolated = 0;
    let mut peeled_full = 0;
    loop {
        let n_alive = alive.len();
        if n_alive == 0 {
            break;
        }
        let top = (n_alive - 1) as f64;
        if let Some(&v) = alive
            .iter()
            .find(|&&v| deg[v] < -INTEGER_EPS || deg[v] > top + INTEGER_EPS)
        {
            return Err(Error::MaxEntBoundary(format!(
                "vertex {v} needs residual degree {} among {} remaining vertices",
                deg[v], n_alive
            )));
        }
        if let Some(pos) = alive.iter().position(|&v| deg[v].abs() <= INTEGER_EPS) {
            alive.remove(pos);
            removed_isolated += 1;
            continue;
        }
        if let Some(pos) = alive
            .iter()
            .position(|&v| (deg[v] - top).abs() <= INTEGER_EPS)
        {
            alive.remove(pos);
            for &u in &alive {
                deg[u] -= 1.0;
            }
            peeled_full += 1;
            continue;
        }
        break;
    }
    let core_degrees = alive.iter().map(|&v| deg[v]).collect();
    Ok(Peeling {
        core: alive,
        core_degrees,
        removed_isolated,
        peeled_full,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliFit {
    /// Dual parameters of the core vertices.
    pub alpha: Vec<f64>,
    /// Symmetric core edge expectations with zero diagonal.
    pub mu: DMatrix<f64>,
    pub entropy: f64,
    pub iterations: usize,
    pub residual: f64,
    pub peeling: Peeling,
}

impl BernoulliFit {
    /// Number of core vertices (the covariance dimension).
    pub fn n(&self) -> usize {
        self.mu.nrows()
    }
}

// ---------------------------------------------------------------------------
// tables

fn table_mu(alpha: &[f64], beta: &[f64]) -> Option<DMatrix<f64>> {
    let mut mu = DMatrix::zeros(alpha.len(), beta.len());
    for (j, a) in alpha.iter().enumerate() {
        for (k, b) in beta.iter().enumerate() {
            let s = a + b;
            if !(s > 0.0) {
                return None;
            }
            mu[(j, k)] = 1.0 / s.exp_m1();
        }
    }
    Some(mu)
}

fn table_residual(spec: &MarginSpec, mu: &DMatrix<f64>) -> f64 {
    let rows = (0..spec.m()).map(|j| (spec.rows[j] - mu.row(j).sum()).abs());
    let cols = (0..spec.n()).map(|k| (spec.cols[k] - mu.column(k).sum()).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

/// Dual potential `Σ −ln(1 − e^{−s}) + α·r + β·c`; `None` off the domain.
fn table_potential(spec: &MarginSpec, alpha: &[f64], beta: &[f64]) -> Option<f64> {
    let mut cells = Vec::with_capacity(alpha.len() * beta.len());
    for a in alpha {
        for b in beta {
            let s = a + b;
            if !(s > 0.0) {
                return None;
            }
            cells.push(-(-(-s).exp_m1()).ln());
        }
    }
    let lin: f64 = alpha.iter().zip(&spec.rows).map(|(a, r)| a * r).sum::<f64>()
        + beta.iter().zip(&spec.cols).map(|(b, c)| b * c).sum::<f64>();
    Some(pairwise_sum(&cells) + lin)
}

fn check_table_bounds(mu: &DMatrix<f64>, alpha: &[f64], beta: &[f64]) -> Result<()> {
    if alpha.iter().chain(beta).any(|x| x.abs() > ALPHA_CAP) {
        return Err(Error::MaxEntBoundary("|dual parameter| exceeds cap".into()));
    }
    if let Some(x) = mu.iter().find(|x| !(**x >= MU_FLOOR && **x <= MU_CEIL_TABLE)) {
        return Err(Error::MaxEntBoundary(format!("cell expectation {x} out of range")));
    }
    Ok(())
}

/// Solve `Σ_k 1/expm1(a + other_k) = target` for `a` on `a > −min(other)`.
fn solve_table_coordinate(other: &[f64], target: f64, start: f64, tol: f64) -> f64 {
    let lo_bound = -other.iter().cloned().fold(f64::INFINITY, f64::min);
    let eval = |a: f64| -> (f64, f64) {
        let mut value = -target;
        let mut slope = 0.0;
        for o in other {
            let mu = 1.0 / (a + o).exp_m1();
            value += mu;
            slope -= mu * (1.0 + mu);
        }
        (value, slope)
    };
    let mut lo = lo_bound;
    let mut hi = lo_bound + 1.0;
    while eval(hi).0 > 0.0 {
        lo = hi;
        hi = lo_bound + 2.0 * (hi - lo_bound);
    }
    let mut a = if start > lo && start < hi { start } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let (value, slope) = eval(a);
        if value.abs() <= 0.1 * tol {
            break;
        }
        if value > 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        let newton = a - value / slope;
        a = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * a.abs().max(1.0) {
            break;
        }
    }
    a
}

fn regauge(alpha: &mut [f64], beta: &mut [f64]) {
    let shift = beta.iter().sum::<f64>() / beta.len() as f64;
    beta.iter_mut().for_each(|b| *b -= shift);
    alpha.iter_mut().for_each(|a| *a += shift);
}

/// Fit the geometric maximum-entropy table model to `spec`.
pub fn fit_table(spec: &MarginSpec, opts: &SolverOptions) -> Result<GeometricFit> {
    let (m, n) = (spec.m(), spec.n());
    let start = (1.0 + (m * n) as f64 / spec.total()).ln() / 2.0;
    let mut alpha = vec![start; m];
    let mut beta = vec![start; n];
    let dim = m + n - 1;

    let mut iterations = 0;
    loop {
        let mu = table_mu(&alpha, &beta)
            .ok_or_else(|| Error::MaxEntBoundary("left the dual domain".into()))?;
        check_table_bounds(&mu, &alpha, &beta)?;
        let residual = table_residual(spec, &mu);
        if residual <= opts.tol {
            let entropy = entropy_table_mu(&mu);
            return Ok(GeometricFit {
                alpha,
                beta,
                mu,
                entropy,
                iterations,
                residual,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual,
            });
        }
        iterations += 1;

        // reduced coordinates: all α, β_0..β_{n−2}; β_{n−1} held fixed
        let mut grad = DVector::zeros(dim);
        let mut hess = DMatrix::zeros(dim, dim);
        for j in 0..m {
            grad[j] = spec.rows[j] - mu.row(j).sum();
        }
        for k in 0..n - 1 {
            grad[m + k] = spec.cols[k] - mu.column(k).sum();
        }
        for j in 0..m {
            for k in 0..n {
                let lam = mu[(j, k)] * (1.0 + mu[(j, k)]);
                hess[(j, j)] += lam;
                if k < n - 1 {
                    hess[(m + k, m + k)] += lam;
                    hess[(j, m + k)] = lam;
                    hess[(m + k, j)] = lam;
                }
            }
        }
        let accepted = match solve_spd(&hess, &grad) {
            Ok(step) => {
                let direction: Vec<f64> = step.iter().map(|x| -x).collect();
                let slope = grad.dot(&DVector::from_column_slice(&direction));
                line_search(
                    |t| {
                        let mut a = alpha.clone();
                        let mut b = beta.clone();
                        for j in 0..m {
                            a[j] += t * direction[j];
                        }
                        for k in 0..n - 1 {
                            b[k] += t * direction[m + k];
                        }
                        let f = table_potential(spec, &a, &b)?;
                        let res = table_residual(spec, &table_mu(&a, &b)?);
                        Some((f, res, (a, b)))
                    },
                    table_potential(spec, &alpha, &beta).unwrap_or(f64::INFINITY),
                    residual,
                    slope,
                )
            }
            Err(_) => None,
        };
        match accepted {
            Some((a, b)) => {
                alpha = a;
                beta = b;
            }
            None => {
                for j in 0..m {
                    alpha[j] = solve_table_coordinate(&beta, spec.rows[j], alpha[j], opts.tol);
                }
                for k in 0..n {
                    beta[k] = solve_table_coordinate(&alpha, spec.cols[k], beta[k], opts.tol);
                }
            }
        }
        regauge(&mut alpha, &mut beta);
    }
}

/// Backtracking on the dual potential. In the rounding regime, where the
/// potential no longer resolves the decrease, a residual decrease is accepted.
fn line_search<T>(
    mut trial: impl FnMut(f64) -> Option<(f64, f64, T)>,
    potential: f64,
    residual: f64,
    slope: f64,
) -> Option<T> {
    if !(slope < 0.0) {
        return None;
    }
    let mut t = 1.0;
    for _ in 0..60 {
        if let Some((f, res, point)) = trial(t) {
            if f.is_finite() {
                let armijo = f <= potential + 1e-4 * t * slope;
                let flat = (f - potential).abs() <= 1e-12 * potential.abs().max(1.0);
                if armijo || (flat && res < residual) {
                    return Some(point);
                }
            }
        }
        t *= 0.5;
    }
    None
}

fn entropy_table_mu(mu: &DMatrix<f64>) -> f64 {
    let terms: Vec<f64> = mu.iter().map(|&x| geometric_entropy(x)).collect();
    pairwise_sum(&terms)
}

/// Entropy of a geometric variable with mean `mu`, in nats.
pub fn geometric_entropy(mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    (1.0 + mu) * mu.ln_1p() - mu * mu.ln()
}

/// Entropy of a Bernoulli variable with mean `p`, in nats.
pub fn bernoulli_entropy(p: f64) -> f64 {
    let plogp = |x: f64| if x <= 0.0 { 0.0 } else { x * x.ln() };
    -(plogp(p) + plogp(1.0 - p))
}

/// `I(P) = Σ_{jk} (1+μ)ln(1+μ) − μ ln μ`.
pub fn entropy_table(fit: &GeometricFit) -> f64 {
    entropy_table_mu(&fit.mu)
}

/// `I(P) = −Σ_{i<j} (1−μ)ln(1−μ) + μ ln μ`.
pub fn entropy_graph(fit: &BernoulliFit) -> f64 {
    entropy_graph_mu(&fit.mu)
}

fn entropy_graph_mu(mu: &DMatrix<f64>) -> f64 {
    let n = mu.nrows();
    let mut terms = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            terms.push(bernoulli_entropy(mu[(i, j)]));
        }
    }
    pairwise_sum(&terms)
}

// ---------------------------------------------------------------------------
// graphs

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// An edge probability within `100 · tol` of 0 or 1 cannot be told apart
/// from a forced edge by the residual test: the degrees sit on the boundary
/// of the degree polytope and no interior maximizer exists.
fn check_graph_resolution(mu: &DMatrix<f64>, tol: f64) -> Result<()> {
    let floor = 100.0 * tol;
    let n = mu.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let p = mu[(i, j)];
            if p < floor || p > 1.0 - floor {
                return Err(Error::MaxEntBoundary(format!(
                    "edge ({i}, {j}) expectation {p:e} is unresolved at tolerance {tol:e}"
                )));
            }
        }
    }
    Ok(())
}

fn graph_mu(alpha: &[f64]) -> DMatrix<f64> {
    let n = alpha.len();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            logistic(alpha[i] + alpha[j])
        }
    })
}

fn graph_residual(degrees: &[f64], mu: &DMatrix<f64>) -> f64 {
    degrees
        .iter()
        .enumerate()
        .map(|(i, d)| (mu.row(i).sum() - d).abs())
        .fold(0.0, f64::max)
}

fn graph_potential(degrees: &[f64], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut terms = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            terms.push(softplus(alpha[i] + alpha[j]));
        }
    }
    pairwise_sum(&terms) - alpha.iter().zip(degrees).map(|(a, d)| a * d).sum::<f64>()
}

fn check_graph_bounds(mu: &DMatrix<f64>, alpha: &[f64]) -> Result<()> {
    if let Some(a) = alpha.iter().find(|a| a.abs() > ALPHA_CAP) {
        return Err(Error::MaxEntBoundary(format!(
            "dual parameter {a} exceeds cap {ALPHA_CAP}"
        )));
    }
    let n = mu.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let p = mu[(i, j)];
            if !(p >= MU_FLOOR && p <= 1.0 - MU_FLOOR) {
                return Err(Error::MaxEntBoundary(format!(
                    "edge ({i}, {j}) expectation {p} at the boundary"
                )));
            }
        }
    }
    Ok(())
}

/// Solve `Σ_{j≠i} logistic(a + α_j) = target` for `a`.
fn solve_graph_coordinate(alpha: &[f64], i: usize, target: f64, tol: f64) -> f64 {
    let eval = |a: f64| -> (f64, f64) {
        let mut value = -target;
        let mut slope = 0.0;
        for (j, aj) in alpha.iter().enumerate() {
            if j != i {
                let p = logistic(a + aj);
                value += p;
                slope += p * (1.0 - p);
            }
        }
        (value, slope)
    };
    let (mut lo, mut hi) = (-2.0 * ALPHA_CAP, 2.0 * ALPHA_CAP);
    let mut a = alpha[i].clamp(lo, hi);
    for _ in 0..200 {
        let (value, slope) = eval(a);
        if value.abs() <= 0.1 * tol {
            break;
        }
        if value < 0.0 {
            lo = a;
        } else {
            hi = a;
        }
        let newton = a - value / slope;
        a = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 {
            break;
        }
    }
    a
}

/// Fit the Bernoulli maximum-entropy graph model to the peeled core of `spec`.
pub fn fit_graph(spec: &DegreeSpec, opts: &SolverOptions) -> Result<BernoulliFit> {
    let peeling = peel_degrees(spec.degrees())?;
    let degrees = peeling.core_degrees.clone();
    let n = degrees.len();
    if n == 0 {
        return Ok(BernoulliFit {
            alpha: Vec::new(),
            mu: DMatrix::zeros(0, 0),
            entropy: 0.0,
            iterations: 0,
            residual: 0.0,
            peeling,
        });
    }
    if n < 3 {
        return Err(Error::SingularCovariance(n));
    }
    let top = (n - 1) as f64;
    let mut alpha: Vec<f64> = degrees
        .iter()
        .map(|d| {
            let p = d / top;
            0.5 * (p / (1.0 - p)).ln()
        })
        .collect();

    let mut iterations = 0;
    loop {
        let mu = graph_mu(&alpha);
        check_graph_bounds(&mu, &alpha)?;
        let residual = graph_residual(&degrees, &mu);
        if residual <= opts.tol {
            check_graph_resolution(&mu, opts.tol)?;
            let entropy = entropy_graph_mu(&mu);
            return Ok(BernoulliFit {
                alpha,
                mu,
                entropy,
                iterations,
                residual,
                peeling,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual,
            });
        }
        iterations += 1;

        let grad = DVector::from_fn(n, |i, _| mu.row(i).sum() - degrees[i]);
        let hess = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (0..n)
                    .filter(|&k| k != i)
                    .map(|k| mu[(i, k)] * (1.0 - mu[(i, k)]))
                    .sum()
            } else {
                mu[(i, j)] * (1.0 - mu[(i, j)])
            }
        });
        let accepted = match solve_spd(&hess, &grad) {
            Ok(step) => {
                let direction: Vec<f64> = step.iter().map(|x| -x).collect();
                let slope = grad.dot(&DVector::from_column_slice(&direction));
                line_search(
                    |t| {
                        let a: Vec<f64> =
                            alpha.iter().zip(&direction).map(|(a, d)| a + t * d).collect();
                        let f = graph_potential(&degrees, &a);
                        let res = graph_residual(&degrees, &graph_mu(&a));
                        Some((f, res, a))
                    },
                    graph_potential(&degrees, &alpha),
                    residual,
                    slope,
                )
            }
            Err(_) => None,
        };
        match accepted {
            Some(a) => alpha = a,
            None => {
                for i in 0..n {
                    alpha[i] = solve_graph_coordinate(&alpha, i, degrees[i], opts.tol);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    fn table(rows: &[f64], cols: &[f64]) -> GeometricFit {
        fit_table(&MarginSpec::new(rows.to_vec(), cols.to_vec()).unwrap(), &opts()).unwrap()
    }

    #[test]
    fn symmetric_two_by_two_is_uniform() {
        let fit = table(&[2.0, 2.0], &[2.0, 2.0]);
        for x in fit.mu.iter() {
            assert!((x - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn equal_columns_give_column_constant_cells() {
        let fit = table(&[3.0, 1.0], &[2.0, 2.0]);
        for k in 0..2 {
            assert!((fit.mu[(0, k)] - 1.5).abs() < 1e-10);
            assert!((fit.mu[(1, k)] - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn mismatched_totals_are_infeasible() {
        let err = MarginSpec::new(vec![1.0, 2.0], vec![2.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::InfeasibleMargins(_)));
        assert!(matches!(
            MarginSpec::new(vec![0.0, 2.0], vec![1.0, 1.0]),
            Err(Error::InfeasibleMargins(_))
        ));
    }

    #[test]
    fn table_fit_satisfies_its_invariants() {
        let spec = MarginSpec::new(vec![7.0, 3.5, 12.0, 1.5], vec![4.0, 9.0, 11.0]).unwrap();
        let fit = fit_table(&spec, &opts()).unwrap();
        assert!(fit.residual <= 1e-10);
        let mean_beta = fit.beta.iter().sum::<f64>() / 3.0;
        assert!(mean_beta.abs() < 1e-12);
        for j in 0..4 {
            for k in 0..3 {
                let s = fit.alpha[j] + fit.beta[k];
                let back = (1.0 / fit.mu[(j, k)]).ln_1p();
                assert!((back - s).abs() <= 1e-12 * s.abs().max(1.0));
            }
        }
        assert!((fit.entropy - entropy_table(&fit)).abs() == 0.0);
    }

    #[test]
    fn skewed_table_converges() {
        let spec = MarginSpec::new(vec![800.0, 1.0, 1.0], vec![700.0, 100.0, 2.0]).unwrap();
        let fit = fit_table(&spec, &opts()).unwrap();
        assert!(fit.residual <= 1e-10);
    }

    #[test]
    fn coordinate_solver_finds_root() {
        let other = [0.3, 0.1, 1.2];
        let a = solve_table_coordinate(&other, 5.0, 0.0, 1e-12);
        let total: f64 = other.iter().map(|o| 1.0 / (a + o).exp_m1()).sum();
        assert!((total - 5.0).abs() < 1e-11);
    }

    #[test]
    fn single_cell_entropy() {
        assert!((geometric_entropy(1.0) - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!(geometric_entropy(1e-300) < 1e-290);
        let fit = table(&[2.0, 2.0], &[2.0, 2.0]);
        assert!((entropy_table(&fit) - 8.0 * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn regular_graph_fit() {
        let spec = DegreeSpec::new(vec![3.0; 8]).unwrap();
        let fit = fit_graph(&spec, &opts()).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert!((fit.mu[(i, j)] - 3.0 / 7.0).abs() < 1e-12);
                }
            }
        }
        let by_edge = 28.0 * bernoulli_entropy(3.0 / 7.0);
        assert!((fit.entropy - by_edge).abs() < 1e-12);
    }

    #[test]
    fn boundary_sequence_is_rejected() {
        // vertex 3 must join every other vertex; vertices 1, 2, 4 have no room left
        for d in [vec![2.0, 1.0, 1.0, 3.0, 1.0], vec![2.0, 3.0, 3.0, 1.0, 3.0]] {
            let err = fit_graph(&DegreeSpec::new(d).unwrap(), &opts()).unwrap_err();
            assert!(matches!(err, Error::MaxEntBoundary(_)));
        }
    }

    #[test]
    fn two_class_cross_probability_is_half() {
        let spec = DegreeSpec::new([vec![4.0; 4], vec![3.0; 4]].concat()).unwrap();
        let fit = fit_graph(&spec, &opts()).unwrap();
        let half_ln2 = 0.5 * 2f64.ln();
        for i in 0..8 {
            let expect = if i < 4 { half_ln2 } else { -half_ln2 };
            assert!((fit.alpha[i] - expect).abs() < 1e-10);
        }
        for i in 0..4 {
            for j in 4..8 {
                assert!((fit.mu[(i, j)] - 0.5).abs() < 1e-10);
            }
        }
        for i in 0..8 {
            for j in i + 1..8 {
                let logit = (fit.mu[(i, j)] / (1.0 - fit.mu[(i, j)])).ln();
                assert!((logit - fit.alpha[i] - fit.alpha[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn peeling_exposes_contradiction() {
        let spec = DegreeSpec::new(vec![3.0, 3.0, 3.0, 0.0]).unwrap();
        assert!(matches!(
            fit_graph(&spec, &opts()),
            Err(Error::MaxEntBoundary(_))
        ));
    }

    #[test]
    fn forced_sequences_peel_to_empty_core() {
        let fit = fit_graph(&DegreeSpec::new(vec![3.0; 4]).unwrap(), &opts()).unwrap();
        assert_eq!(fit.n(), 0);
        assert_eq!(fit.peeling.peeled_full + fit.peeling.removed_isolated, 4);
        let path = fit_graph(&DegreeSpec::new(vec![2.0, 1.0, 1.0]).unwrap(), &opts()).unwrap();
        assert_eq!(path.n(), 0);
    }

    #[test]
    fn peeling_keeps_interior_core() {
        let p = peel_degrees(&[4.0, 0.0, 3.0, 3.0, 3.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.removed_isolated, 1);
        assert_eq!(p.core, vec![0, 2, 3, 4, 5, 6]);
        assert_eq!(p.core_degrees, vec![4.0, 3.0, 3.0, 3.0, 2.0, 3.0]);
        let q = peel_degrees(&[5.0, 2.0, 2.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(q.peeled_full, 1);
        assert_eq!(q.core_degrees, vec![1.0, 1.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn infeasible_interior_sequence_diverges() {
        // two degree-4 vertices need at least six edges into four degree-1 vertices
        let spec = DegreeSpec::new(vec![4.0, 4.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let err = fit_graph(&spec, &opts()).unwrap_err();
        assert!(matches!(err, Error::MaxEntBoundary(_)), "{err:?}");
    }

    #[test]
    fn bernoulli_entropy_limits() {
        assert!((bernoulli_entropy(0.5) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(bernoulli_entropy(0.0), 0.0);
        assert_eq!(bernoulli_entropy(1.0), 0.0);
        assert!(bernoulli_entropy(1e-15) < 1e-12);
        let half = DMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 0.5 });
        assert!((entropy_graph_mu(&half) - 6.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degree_spec_validation() {
        assert!(DegreeSpec::new(vec![1.0, 1.0]).is_err());
        assert!(DegreeSpec::new(vec![1.0, 1.0, 3.0]).is_err());
        assert_eq!(DegreeSpec::new(vec![1.0, 1.0, 1.0]).unwrap().integer_sum(), Some(3));
        assert_eq!(DegreeSpec::new(vec![1.5, 1.0, 1.0]).unwrap().integer_sum(), None);
    }
}
