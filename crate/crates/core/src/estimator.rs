//! Gaussian and Edgeworth log-count estimates.
//!
//! ```text
//! ln Q̂_gauss = ln Δ + I(P) − (d/2) ln 2π − ½ ln |V|
//! ln Q̂_edgeworth = ln Q̂_gauss − κ³/72 + κ⁴/24
//! ```
//!
//! `Δ` is the determinant of the lattice of attainable margin vectors: 1 for
//! tables and 2 for degree sequences, whose sum is always even. All values
//! are kept in natural-log space; counts are never materialized.

use std::f64::consts::{LN_10, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxent::{
    fit_graph, fit_table, geometric_entropy, BernoulliFit, DegreeSpec, GeometricFit, MarginSpec,
    SolverOptions,
};
use crate::moments::{
    build_graph_covariance, build_table_covariance, closed_form_equal_margins, summarize,
    CumulantSummary, EdgeCoefficients,
};

/// Heuristic thresholds for [`validity_diagnostics_table`] and
/// [`validity_diagnostics_graph`].
pub mod thresholds {
    pub const ASPECT_RATIO: f64 = 3.0;
    pub const MARGIN_SPREAD: f64 = 3.0;
    pub const ENTRY_BOUND_RATIO: f64 = 1.05;
    pub const TABLE_MU_MIN: f64 = 0.05;
    pub const TABLE_MU_MAX: f64 = 20.0;
    pub const GRAPH_MU_MIN: f64 = 0.05;
    pub const GRAPH_MU_MAX: f64 = 0.95;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Table,
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    AspectRatio,
    MarginSpread,
    EntryBound,
    CellRange,
    NonInteger,
    Peeled,
    ForcedSequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// Threshold-based warnings carry no guarantee either way.
    pub heuristic: bool,
    pub message: String,
}

impl Diagnostic {
    fn heuristic(kind: DiagnosticKind, message: String) -> Self {
        Self {
            kind,
            heuristic: true,
            message,
        }
    }

    fn exact(kind: DiagnosticKind, message: String) -> Self {
        Self {
            kind,
            heuristic: false,
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub model: ModelKind,
    pub dim: usize,
    pub entropy: f64,
    pub log_det_v: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub lattice_log_det: f64,
    pub ln_gauss: f64,
    pub ln_edgeworth: f64,
    pub log10_gauss: f64,
    pub log10_edgeworth: f64,
    pub diagnostics: Vec<Diagnostic>,
}

impl CountReport {
    fn assemble(
        model: ModelKind,
        entropy: f64,
        summary: &CumulantSummary,
        lattice_log_det: f64,
        diagnostics: Vec<Diagnostic>,
    ) -> Self {
        let dim = summary.dim;
        let ln_gauss =
            lattice_log_det + entropy - (dim as f64 / 2.0) * (2.0 * PI).ln() - summary.log_det_v / 2.0;
        let ln_edgeworth = ln_gauss - summary.kappa3 / 72.0 + summary.kappa4 / 24.0;
        Self {
            model,
            dim,
            entropy,
            log_det_v: summary.log_det_v,
            kappa3: summary.kappa3,
            kappa4: summary.kappa4,
            lattice_log_det,
            ln_gauss,
            ln_edgeworth,
            log10_gauss: ln_gauss / LN_10,
            log10_edgeworth: ln_edgeworth / LN_10,
            diagnostics,
        }
    }

    pub fn has_warning(&self, kind: DiagnosticKind) -> bool {
        self.diagnostics.iter().any(|d| d.kind == kind)
    }
}

/// Maximum-entropy Edgeworth estimate for tables with the given margins.
pub fn estimate_table(spec: &MarginSpec, opts: &SolverOptions) -> Result<CountReport> {
    let fit = fit_table(spec, opts)?;
    let model = build_table_covariance(&fit);
    let summary = summarize(&model, &EdgeCoefficients::from_table_fit(&fit))?;
    let diagnostics = validity_diagnostics_table(spec, &fit);
    Ok(CountReport::assemble(
        ModelKind::Table,
        fit.entropy,
        &summary,
        0.0,
        diagnostics,
    ))
}

/// Closed-form estimate for `m × n` tables whose cells all have mean `mu`
/// (row sums `nμ`, column sums `mμ`).
pub fn estimate_equal_margins(m: usize, n: usize, mu: f64) -> Result<CountReport> {
    let spec = MarginSpec::equal(m, n, mu)?;
    let summary = closed_form_equal_margins(m, n, mu);
    let entropy = (m * n) as f64 * geometric_entropy(mu);
    let fit = GeometricFit {
        alpha: Vec::new(),
        beta: Vec::new(),
        mu: nalgebra::DMatrix::from_element(m, n, mu),
        entropy,
        iterations: 0,
        residual: 0.0,
    };
    let diagnostics = validity_diagnostics_table(&spec, &fit);
    Ok(CountReport::assemble(
        ModelKind::Table,
        entropy,
        &summary,
        0.0,
        diagnostics,
    ))
}

/// Maximum-entropy Edgeworth estimate for labeled graphs with the given
/// degrees. An odd integer degree sum yields [`Error::OddDegreeSum`]: the
/// count is exactly zero.
pub fn estimate_graph(spec: &DegreeSpec, opts: &SolverOptions) -> Result<CountReport> {
    if let Some(sum) = spec.integer_sum() {
        if sum % 2 == 1 {
            return Err(Error::OddDegreeSum(sum));
        }
    }
    let fit = fit_graph(spec, opts)?;
    let mut diagnostics = validity_diagnostics_graph(spec, &fit);
    if fit.n() == 0 {
        diagnostics.push(Diagnostic::exact(
            DiagnosticKind::ForcedSequence,
            "every edge is forced; exactly one graph".into(),
        ));
        let summary = CumulantSummary {
            dim: 0,
            log_det_v: 0.0,
            kappa3: 0.0,
            kappa4: 0.0,
            edge_sigma2: Vec::new(),
        };
        return Ok(CountReport::assemble(
            ModelKind::Graph,
            0.0,
            &summary,
            0.0,
            diagnostics,
        ));
    }
    let model = build_graph_covariance(&fit)?;
    let summary = summarize(&model, &EdgeCoefficients::from_graph_fit(&fit))?;
    Ok(CountReport::assemble(
        ModelKind::Graph,
        fit.entropy,
        &summary,
        LN_2,
        diagnostics,
    ))
}

/// The Gaussian baseline without the Edgeworth factor.
pub fn gaussian_only(report: &CountReport) -> f64 {
    report.ln_gauss
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Heuristic checks that the instance is in the regime where the
/// approximation is known to be accurate.
pub fn validity_diagnostics_table(spec: &MarginSpec, fit: &GeometricFit) -> Vec<Diagnostic> {
    use thresholds::*;
    let mut out = Vec::new();
    let (m, n) = (spec.m() as f64, spec.n() as f64);
    let aspect = (m / n).max(n / m);
    if aspect > ASPECT_RATIO {
        out.push(Diagnostic::heuristic(
            DiagnosticKind::AspectRatio,
            format!("aspect ratio {aspect:.3} exceeds {ASPECT_RATIO} (heuristic); the Edgeworth terms in m/n can be badly off"),
        ));
    }
    let all: Vec<f64> = spec.rows().iter().chain(spec.cols()).cloned().collect();
    let margin_spread = spread(&all);
    if margin_spread > MARGIN_SPREAD {
        out.push(Diagnostic::heuristic(
            DiagnosticKind::MarginSpread,
            format!("max/min margin ratio {margin_spread:.3} exceeds {MARGIN_SPREAD} (heuristic)"),
        ));
    }
    let max_r = spec.rows().iter().cloned().fold(0.0, f64::max);
    let max_c = spec.cols().iter().cloned().fold(0.0, f64::max);
    let bound = (1.0 + n / max_r) * (1.0 + m / max_c) / (1.0 + m * n / spec.total());
    if bound < ENTRY_BOUND_RATIO {
        out.push(Diagnostic::heuristic(
            DiagnosticKind::EntryBound,
            format!("entry-bound ratio {bound:.4} below {ENTRY_BOUND_RATIO} (heuristic); cell means may be badly unbalanced"),
        ));
    }
    let (lo, hi) = fit
        .mu
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if lo < TABLE_MU_MIN || hi > TABLE_MU_MAX {
        out.push(Diagnostic::heuristic(
            DiagnosticKind::CellRange,
            format!("cell means span [{lo:.4}, {hi:.4}], outside [{TABLE_MU_MIN}, {TABLE_MU_MAX}] (heuristic)"),
        ));
    }
    if !spec.is_integral() {
        out.push(Diagnostic::exact(
            DiagnosticKind::NonInteger,
            "non-integer margins: the estimate has no exact-count interpretation".into(),
        ));
    }
    out
}

pub fn validity_diagnostics_graph(spec: &DegreeSpec, fit: &BernoulliFit) -> Vec<Diagnostic> {
    use thresholds::*;
    let mut out = Vec::new();
    let peel = &fit.peeling;
    if peel.removed_isolated + peel.peeled_full > 0 {
        out.push(Diagnostic::exact(
            DiagnosticKind::Peeled,
            format!(
                "removed {} isolated and {} full-degree vertices; estimating the {}-vertex core",
                peel.removed_isolated,
                peel.peeled_full,
                fit.n()
            ),
        ));
    }
    if fit.n() >= 3 {
        let degree_spread = spread(&peel.core_degrees);
        if degree_spread > MARGIN_SPREAD {
            out.push(Diagnostic::heuristic(
                DiagnosticKind::MarginSpread,
                format!("max/min degree ratio {degree_spread:.3} exceeds {MARGIN_SPREAD} (heuristic)"),
            ));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..fit.n() {
            for j in i + 1..fit.n() {
                lo = lo.min(fit.mu[(i, j)]);
                hi = hi.max(fit.mu[(i, j)]);
            }
        }
        if lo < GRAPH_MU_MIN || hi > GRAPH_MU_MAX {
            out.push(Diagnostic::heuristic(
                DiagnosticKind::CellRange,
                format!("edge probabilities span [{lo:.4}, {hi:.4}], outside [{GRAPH_MU_MIN}, {GRAPH_MU_MAX}] (heuristic)"),
            ));
        }
    }
    if !spec.is_integral() {
        out.push(Diagnostic::exact(
            DiagnosticKind::NonInteger,
            "non-integer degrees: the estimate has no exact-count interpretation".into(),
        ));
    }
    out
}
