use entropy_count::maxent::{fit_graph, fit_table, DegreeSpec, MarginSpec, SolverOptions};
use entropy_count::moments::{
    build_graph_covariance, build_table_covariance, summarize, EdgeCoefficients,
};
use entropy_count::oracle::{exact_count_graphs, exact_count_tables, Budget};
use entropy_count::{estimate_graph, estimate_table};
use proptest::prelude::*;

/// Margins of a random matrix with positive entries, so every margin is positive.
fn table_margins() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..5, 2usize..5).prop_flat_map(|(m, n)| {
        prop::collection::vec(1u32..6, m * n).prop_map(move |cells| {
            let rows = (0..m).map(|j| (0..n).map(|k| cells[j * n + k] as f64).sum()).collect();
            let cols = (0..n).map(|k| (0..m).map(|j| cells[j * n + k] as f64).sum()).collect();
            (rows, cols)
        })
    })
}

/// Degree sequence of a random graph with no isolated or universal vertex.
/// Some of these still lie on the boundary of the degree polytope.
fn graph_degrees() -> impl Strategy<Value = Vec<f64>> {
    (5usize..9).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_filter_map("boundary", move |bits| {
            let mut deg = vec![0.0; n];
            let mut b = bits.iter();
            for i in 0..n {
                for j in i + 1..n {
                    if *b.next().unwrap() {
                        deg[i] += 1.0;
                        deg[j] += 1.0;
                    }
                }
            }
            let interior = deg.iter().all(|&d| d >= 1.0 && d <= (n - 2) as f64);
            interior.then_some(deg)
        })
    })
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn table_estimate_is_transpose_invariant((rows, cols) in table_margins()) {
        let a = estimate_table(&MarginSpec::new(rows.clone(), cols.clone()).unwrap(), &opts()).unwrap();
        let b = estimate_table(&MarginSpec::new(cols, rows).unwrap(), &opts()).unwrap();
        prop_assert!((a.ln_edgeworth - b.ln_edgeworth).abs() <= 1e-9 * a.ln_edgeworth.abs().max(1.0));
        prop_assert!((a.ln_gauss - b.ln_gauss).abs() <= 1e-9 * a.ln_gauss.abs().max(1.0));
    }

    #[test]
    fn table_estimate_is_permutation_invariant((rows, cols) in table_margins(), shift in 0usize..4) {
        let mut p_rows = rows.clone();
        p_rows.rotate_left(shift % rows.len());
        let mut p_cols = cols.clone();
        p_cols.reverse();
        let a = estimate_table(&MarginSpec::new(rows, cols).unwrap(), &opts()).unwrap();
        let b = estimate_table(&MarginSpec::new(p_rows, p_cols).unwrap(), &opts()).unwrap();
        prop_assert!((a.ln_edgeworth - b.ln_edgeworth).abs() <= 1e-9 * a.ln_edgeworth.abs().max(1.0));
    }

    #[test]
    fn table_fit_reproduces_margins((rows, cols) in table_margins()) {
        let spec = MarginSpec::new(rows.clone(), cols.clone()).unwrap();
        let fit = fit_table(&spec, &opts()).unwrap();
        for (j, r) in rows.iter().enumerate() {
            prop_assert!((fit.mu.row(j).sum() - r).abs() <= 1e-8 * r.max(1.0));
        }
        for (k, c) in cols.iter().enumerate() {
            prop_assert!((fit.mu.column(k).sum() - c).abs() <= 1e-8 * c.max(1.0));
        }
        // cell means depend only on α_j + β_k, whatever gauge the solver lands in
        for j in 0..spec.m() {
            for k in 0..spec.n() {
                let expect = 1.0 / (fit.alpha[j] + fit.beta[k]).exp_m1();
                prop_assert!((fit.mu[(j, k)] - expect).abs() <= 1e-12 * expect.max(1.0));
            }
        }
    }

    #[test]
    fn graph_estimate_is_complement_invariant(deg in graph_degrees()) {
        let spec = DegreeSpec::new(deg).unwrap();
        let a = estimate_graph(&spec, &opts());
        let b = estimate_graph(&spec.complement(), &opts());
        // boundary sequences are rejected on both sides
        prop_assert_eq!(a.is_ok(), b.is_ok());
        prop_assume!(a.is_ok());
        let (a, b) = (a.unwrap(), b.unwrap());
        prop_assert!((a.ln_edgeworth - b.ln_edgeworth).abs() <= 1e-9 * a.ln_edgeworth.abs().max(1.0));
        prop_assert!((a.entropy - b.entropy).abs() <= 1e-9 * a.entropy.abs().max(1.0));
    }

    #[test]
    fn kappa3_is_nonnegative_for_tables((rows, cols) in table_margins()) {
        let fit = fit_table(&MarginSpec::new(rows, cols).unwrap(), &opts()).unwrap();
        let s = summarize(&build_table_covariance(&fit), &EdgeCoefficients::from_table_fit(&fit)).unwrap();
        prop_assert!(s.kappa3 >= 0.0);
    }

    #[test]
    fn kappa3_is_nonnegative_for_graphs(deg in graph_degrees()) {
        let fit = fit_graph(&DegreeSpec::new(deg).unwrap(), &opts());
        prop_assume!(fit.is_ok());
        let fit = fit.unwrap();
        let s = summarize(&build_graph_covariance(&fit).unwrap(), &EdgeCoefficients::from_graph_fit(&fit)).unwrap();
        prop_assert!(s.kappa3 >= 0.0);
    }

    #[test]
    fn quadratic_form_matches_cell_sum(
        (rows, cols) in table_margins(),
        t in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let fit = fit_table(&MarginSpec::new(rows, cols).unwrap(), &opts()).unwrap();
        let model = build_table_covariance(&fit);
        let coeffs = EdgeCoefficients::from_table_fit(&fit);
        let t = &t[..model.dim];
        let direct: f64 = model
            .incidence
            .iter()
            .zip(&coeffs.variance)
            .map(|(inc, lam)| lam * inc.value(t).powi(2))
            .sum();
        let q = model.quadratic_form(t);
        prop_assert!((q - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn exact_table_count_is_symmetric(
        rows in prop::collection::vec(0u64..5, 2..4),
        shift in 0usize..3,
    ) {
        let total: u64 = rows.iter().sum();
        let cols = vec![total / 2, total - total / 2];
        let mut p_rows = rows.clone();
        p_rows.rotate_left(shift % rows.len());
        let budget = Budget::default();
        let a = exact_count_tables(&rows, &cols, &budget).unwrap().value;
        let b = exact_count_tables(&cols, &p_rows, &budget).unwrap().value;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn exact_graph_count_is_complement_symmetric(deg in graph_degrees()) {
        let n = deg.len() as u64;
        let d: Vec<u64> = deg.iter().map(|&x| x as u64).collect();
        let c: Vec<u64> = d.iter().map(|&x| n - 1 - x).collect();
        let budget = Budget::default();
        prop_assert_eq!(
            exact_count_graphs(&d, &budget).unwrap().value,
            exact_count_graphs(&c, &budget).unwrap().value
        );
    }
}
