//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured evidence (visible under `--nocapture`).
//!
//! Reference values are frozen from 25-digit arbitrary-precision
//! evaluations of the displayed formulas and independent quadratures.

use rcm_core::{
    bfs_components, build_graph, build_graph_fast, classify_regime, components, degree_pmf,
    fit_tail_exponent, integral_closed_form, mixing_pmf_oracle, quadrature_integral,
    run_degree_study, run_finite_size_contrast, run_theta_scan, sample_cloud, sample_palm_cloud,
    theta_csv, Boundary, BoxDomain, Budget, ModelParams, QuadratureSpec, Regime,
};
use rcm_core::{degree_csv, rng};
use std::time::Instant;

const MASTER_SEED: u64 = 42;

/// Infinite-volume mean palm degree at (d=1, nu=lambda=1, alpha=2,
/// tau=3): 2 sqrt(pi) (tau/(tau-1/2))^2.
const MEAN_DEGREE_REF: f64 = 5.104_667_090_607_886;

fn base_params() -> ModelParams {
    ModelParams::new(1, 1.0, 1.0, 2.0, 3.0).unwrap()
}

fn random_valid_tuple(seed: u64, index: u64) -> Option<(ModelParams, f64)> {
    let u = |j: u64| rng::uniform_at(seed, rng::stream::SYNTHETIC, index, j);
    let d = 1 + (u(0) * 3.0) as u32;
    let params = ModelParams::new(
        d,
        0.1 + 9.9 * u(1),
        0.1 + 9.9 * u(2),
        0.1 + 9.9 * u(3),
        0.1 + 9.9 * u(4),
    )
    .expect("fields positive by construction");
    if !params.finite_degree() {
        return None;
    }
    Some((params, 1.0 + 9.0 * u(5)))
}

#[test]
fn criterion_1_closed_form_vs_quadrature_oracle() {
    let started = Instant::now();
    let spec = QuadratureSpec::default();
    let mut tested = 0u32;
    let mut worst = 0.0f64;
    let mut index = 0u64;
    while tested < 50 {
        index += 1;
        let Some((params, w)) = random_valid_tuple(MASTER_SEED, index) else {
            continue;
        };
        tested += 1;
        let closed = integral_closed_form(&params, w).unwrap();
        let numeric = quadrature_integral(&params, w, &spec).unwrap_or_else(|e| {
            panic!("oracle failed on {params:?} (w = {w}): {e}")
        });
        let rel = ((numeric - closed) / closed).abs();
        assert!(
            rel <= 1e-8,
            "tuple {params:?} w={w}: closed {closed} vs quadrature {numeric} (rel {rel:e})"
        );
        worst = worst.max(rel);
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "runtime budget exceeded: {elapsed:.1} s");
    println!(
        "criterion 1 PASS: closed form vs quadrature, 50 tuples, max rel {worst:.2e}, {elapsed:.2} s"
    );
}

#[test]
fn criterion_2_dual_route_pmf() {
    let started = Instant::now();
    let spec = QuadratureSpec::default();
    let params = base_params();
    let mut worst = 0.0f64;
    for k in 0..=50u32 {
        let gamma_route = degree_pmf(&params, k).unwrap();
        let mixture_route = mixing_pmf_oracle(&params, k, &spec).unwrap();
        let diff = (gamma_route - mixture_route).abs();
        assert!(
            diff <= 1e-8,
            "k = {k}: {gamma_route} vs {mixture_route} (abs {diff:e})"
        );
        worst = worst.max(diff);
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime budget exceeded: {elapsed:.1} s");
    println!(
        "criterion 2 PASS: pmf dual-route agreement k = 0..50, max abs {worst:.2e}, {elapsed:.2} s"
    );
}

#[test]
fn criterion_3_degree_study_mean() {
    let params = base_params();
    let study =
        run_degree_study(&params, 200.0, 10_000, MASTER_SEED, &Budget::default()).unwrap();
    let diff = (study.sample_mean - MEAN_DEGREE_REF).abs();
    let bracket = 3.0 * study.sample_stderr;
    assert!(
        diff < bracket,
        "sample mean {} vs {MEAN_DEGREE_REF} (|diff| {diff:.4} >= 3 SE {bracket:.4})",
        study.sample_mean
    );
    println!(
        "criterion 3 PASS: degree-study mean {:.4} within 3 SE ({:.4}) of {MEAN_DEGREE_REF:.7}",
        study.sample_mean, bracket
    );
}

#[test]
fn criterion_4_tail_exponent_bracket() {
    let params = base_params();
    let study =
        run_degree_study(&params, 500.0, 100_000, MASTER_SEED, &Budget::default()).unwrap();
    let fit = fit_tail_exponent(&study).unwrap();
    assert!(
        (5.1..=6.9).contains(&fit.exponent),
        "fitted exponent {} outside [5.1, 6.9] (window [{}, {}])",
        fit.exponent,
        fit.n_min,
        fit.n_max
    );
    println!(
        "criterion 4 PASS: tail exponent {:.3} (se {:.3}, window [{}, {}]) in [5.1, 6.9], target 6",
        fit.exponent, fit.stderr, fit.n_min, fit.n_max
    );
}

#[test]
fn criterion_5_exact_coupling_monotonicity() {
    let params = ModelParams::new(2, 1.0, 1.0, 3.0, 3.0).unwrap();
    let domain = BoxDomain::new(2, 12.0, Boundary::Free).unwrap();
    let grid = [0.02, 0.05, 0.1, 0.2, 0.4, 0.8, 1.5, 3.0, 6.0, 12.0];
    for replica in 0..100u64 {
        let seed = rng::derive_seed(MASTER_SEED, rng::stream::REPLICA, replica);
        let cloud = sample_palm_cloud(&params, &domain, seed).unwrap();
        let mut previous_edges: Option<std::collections::HashSet<(usize, usize)>> = None;
        let mut previous_span = false;
        let mut previous_size = 0usize;
        for lambda in grid {
            let graph = build_graph(&params.with_lambda(lambda), &cloud, seed).unwrap();
            let edges: std::collections::HashSet<_> = graph.edges.iter().copied().collect();
            if let Some(prev) = &previous_edges {
                assert!(
                    prev.is_subset(&edges),
                    "replica {replica}: edge set shrank when lambda grew to {lambda}"
                );
            }
            let stats = components(&graph, &cloud);
            let span = stats.spanning.unwrap();
            let size = stats.origin_cluster_size.unwrap();
            assert!(
                span || !previous_span,
                "replica {replica}: spanning indicator dropped at lambda {lambda}"
            );
            assert!(
                size >= previous_size,
                "replica {replica}: origin cluster shrank at lambda {lambda}"
            );
            previous_edges = Some(edges);
            previous_span = span;
            previous_size = size;
        }
    }
    println!(
        "criterion 5 PASS: exact edge-set inclusion and spanning monotonicity, 100 replicas x 10-point grid, zero exceptions"
    );
}

#[test]
fn criterion_6_regime_truth_table() {
    use Regime::*;
    // Hand-built table covering all five labels across dimensions,
    // including the tau*alpha = 2d boundary.
    let table: [(u32, f64, f64, Regime); 12] = [
        (1, 2.0, 3.0, LambdaCPositiveFinite), // tau*alpha = 6 > 2, alpha in (1,2]
        (1, 1.5, 1.0, LambdaCZero),           // tau*alpha = 1.5 in (d, 2d)
        (1, 3.0, 1.0, LambdaCInfinite),       // min{3, 3} > 2
        (1, 2.0, 1.0, BoundaryFiniteUnknownPositivity), // tau*alpha = 2 = 2d
        (1, 1.2, 5.0, LambdaCPositiveFinite), // tau*alpha = 6, alpha in (1,2]
        (1, 4.0, 0.3, LambdaCZero),           // tau*alpha = 1.2 in (d, 2d)
        (1, 0.9, 9.0, InfiniteDegree),        // alpha <= d
        (2, 3.0, 1.0, LambdaCZero),           // tau*alpha = 3 < 4
        (2, 3.0, 3.0, LambdaCPositiveFinite), // tau*alpha = 9 > 4
        (2, 4.0, 1.0, BoundaryFiniteUnknownPositivity), // tau*alpha = 4 = 2d
        (2, 1.5, 4.0, InfiniteDegree),        // alpha <= d
        (3, 4.0, 0.5, InfiniteDegree),        // tau*alpha = 2 <= d
    ];
    for (d, alpha, tau, want) in table {
        let params = ModelParams::new(d, 1.0, 1.0, alpha, tau).unwrap();
        let got = classify_regime(&params);
        assert_eq!(got, want, "d={d} alpha={alpha} tau={tau}");
    }
    println!("criterion 6 PASS: regime classifier matches the 12-tuple truth table (all five labels)");
}

#[test]
fn criterion_7_union_find_vs_bfs() {
    let started = Instant::now();
    let params = base_params();
    let domain = BoxDomain::new(1, 120.0, Boundary::Torus).unwrap();
    for case in 0..500u64 {
        let seed = rng::derive_seed(MASTER_SEED, rng::stream::SYNTHETIC, case);
        let cloud = sample_cloud(&params, &domain, seed).unwrap();
        // Mean count 120; anything near the 200 cap would be a 7-sigma draw.
        assert!(cloud.len() <= 200, "case {case}: n = {} exceeds 200", cloud.len());
        let lambda = 0.2 + 3.0 * rng::uniform_at(seed, rng::stream::SYNTHETIC, case, 9);
        let graph = build_graph(&params.with_lambda(lambda), &cloud, seed).unwrap();
        let labels = bfs_components(&graph.edges, graph.n);
        // Identical partitions: same-component relation must agree.
        let mut dsf = graph.dsf.clone();
        let mut root_to_label = std::collections::HashMap::new();
        for id in 0..graph.n {
            let root = dsf.find(id);
            let label = labels[id];
            let seen = root_to_label.insert(root, label);
            assert!(
                seen.is_none() || seen == Some(label),
                "case {case}: union-find root split across BFS labels"
            );
        }
        let distinct_roots = root_to_label.len();
        let distinct_labels: std::collections::HashSet<_> = labels.iter().collect();
        assert_eq!(distinct_roots, distinct_labels.len(), "case {case}");
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "runtime budget exceeded: {elapsed:.1} s");
    println!("criterion 7 PASS: union-find equals BFS partitions on 500 random graphs, {elapsed:.2} s");
}

#[test]
fn criterion_8_finite_size_regime_signatures() {
    // (i) d = 2, tau*alpha = 3 < 2d: spanning frequency nondecreasing
    //     from L = 32 to L = 64 at small fixed lambda.
    let zero_regime = ModelParams::new(2, 1.0, 0.004, 3.0, 1.0).unwrap();
    assert_eq!(classify_regime(&zero_regime), Regime::LambdaCZero);
    let grow = run_finite_size_contrast(
        &zero_regime,
        0.004,
        &[32.0, 64.0],
        200,
        MASTER_SEED,
        1e-7,
        &Budget::default(),
    )
    .unwrap();
    let (f_small, f_large) = (grow.rows[0].spanning_freq, grow.rows[1].spanning_freq);
    let joint = (grow.rows[0].stderr.powi(2) + grow.rows[1].stderr.powi(2)).sqrt();
    assert!(
        f_large >= f_small - 2.0 * joint,
        "lambda_c = 0 signature violated: f(64) = {f_large} < f(32) = {f_small} - 2 x {joint}"
    );

    // (ii) d = 1, min(alpha, tau*alpha) > 2: spanning frequency
    //      nonincreasing from L = 256 to L = 1024 at fixed lambda.
    let infinite_regime = ModelParams::new(1, 1.0, 5.0, 3.0, 2.0).unwrap();
    assert_eq!(classify_regime(&infinite_regime), Regime::LambdaCInfinite);
    let shrink = run_finite_size_contrast(
        &infinite_regime,
        5.0,
        &[256.0, 1024.0],
        400,
        MASTER_SEED,
        1e-7,
        &Budget::default(),
    )
    .unwrap();
    let (g_small, g_large) = (shrink.rows[0].spanning_freq, shrink.rows[1].spanning_freq);
    let joint2 = (shrink.rows[0].stderr.powi(2) + shrink.rows[1].stderr.powi(2)).sqrt();
    assert!(
        g_large <= g_small + 2.0 * joint2,
        "lambda_c = inf signature violated: f(1024) = {g_large} > f(256) = {g_small} + 2 x {joint2}"
    );
    println!(
        "criterion 8 PASS: (i) f(32) = {f_small:.3} -> f(64) = {f_large:.3} nondecreasing; \
         (ii) f(256) = {g_small:.3} -> f(1024) = {g_large:.3} nonincreasing (2-joint-SE checks)"
    );
}

#[test]
fn criterion_9_determinism_across_worker_counts() {
    let params = base_params();
    let theta_params = ModelParams::new(2, 1.0, 1.0, 3.0, 3.0).unwrap();
    let grid = [0.1, 0.5, 2.0];
    let run_all = |threads: usize| -> (String, String, String, String) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let study =
                run_degree_study(&params, 80.0, 2_000, MASTER_SEED, &Budget::default()).unwrap();
            let scan = run_theta_scan(
                &theta_params,
                &grid,
                10.0,
                100,
                MASTER_SEED,
                1e-9,
                &Budget::default(),
            )
            .unwrap();
            (
                degree_csv(&study),
                serde_json::to_string(&study).unwrap(),
                theta_csv(&scan),
                serde_json::to_string(&scan).unwrap(),
            )
        })
    };
    let single = run_all(1);
    let multi = run_all(4);
    let again = run_all(4);
    assert_eq!(single, multi, "worker count changed CSV/JSON bytes");
    assert_eq!(multi, again, "re-run with same config changed bytes");
    println!(
        "criterion 9 PASS: degree and theta CSV/JSON byte-identical for 1, 4, 4 workers"
    );
}
