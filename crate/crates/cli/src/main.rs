//! `rcm`: command-line surface for the random-connection model
//! simulator. Subcommands wrap the experiment drivers and print or write
//! CSV plus a JSON run summary with full provenance.

mod config;

use clap::{Parser, Subcommand};
use config::RunConfig;
use rcm_core::{
    bfs_components, build_graph, components, degree_csv, fit_tail_exponent, fss_csv,
    integral_closed_form, mixing_pmf_oracle, quadrature_integral, run_degree_study,
    run_finite_size_contrast, run_theta_scan, sample_cloud_with_budget, site_bond_renormalization,
    sitebond_csv, theta_csv, AnalyticReport, BoxDomain, Budget, QuadratureSpec,
};
use rcm_core::{degree_pmf, sample_palm_cloud_with_budget, ModelParams};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "rcm",
    about = "Heterogeneous Poisson random-connection model: simulation and analytics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key = value configuration file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; all randomness derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSV and JSON artifacts (must exist).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker thread count (default: one per logical CPU).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Dimension d >= 1.
    #[arg(long, global = true)]
    d: Option<u32>,

    /// Poisson intensity nu > 0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    nu: Option<f64>,

    /// Connection scale lambda > 0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,

    /// Distance-decay exponent alpha > 0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Pareto tail exponent tau > 0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau: Option<f64>,

    /// Box side L > 0.
    #[arg(long, global = true, allow_negative_numbers = true)]
    side: Option<f64>,

    /// Boundary mode: torus | free (informational; each experiment uses
    /// the geometry its estimand requires).
    #[arg(long, global = true)]
    boundary: Option<String>,

    /// Monte Carlo replica count.
    #[arg(long, global = true)]
    replicas: Option<u64>,

    /// Pair-pruning cutoff in [0, 1); 0 = exact mode.
    #[arg(long, global = true, allow_negative_numbers = true)]
    epsilon: Option<f64>,

    /// Ascending comma-separated lambda grid for `theta`.
    #[arg(long = "lambda-grid", global = true)]
    lambda_grid: Option<String>,

    /// Ascending comma-separated box sides for `fss`.
    #[arg(long, global = true)]
    sides: Option<String>,

    /// Renormalization cube side n for `sitebond`.
    #[arg(long = "cube-side", global = true, allow_negative_numbers = true)]
    cube_side: Option<f64>,

    /// Lattice extent per axis for `sitebond`.
    #[arg(long = "grid-extent", global = true)]
    grid_extent: Option<u32>,

    /// Cube adjacency for `sitebond`: face | moore.
    #[arg(long, global = true)]
    adjacency: Option<String>,

    /// Largest degree k tabulated by `analytic`.
    #[arg(long, global = true)]
    kmax: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the closed-form report (volumes, tail constant, mean
    /// degree, regime, pmf) as JSON on standard output.
    Analytic,
    /// Palm-degree Monte Carlo study against the analytic pmf.
    Degree,
    /// Coupled spanning-frequency scan over a lambda grid.
    Theta,
    /// Spanning frequency across box sides at fixed lambda.
    Fss,
    /// Site-bond renormalization demonstrator on a finite lattice.
    Sitebond,
    /// Run the oracle cross-check suite and report pass/fail lines.
    Validate,
}

enum AppError {
    Core(rcm_core::Error),
    Io(std::io::Error),
}

impl From<rcm_core::Error> for AppError {
    fn from(e: rcm_core::Error) -> Self {
        AppError::Core(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

impl AppError {
    /// Distinct exit codes: 2 validation, 3 regime refusal, 4 capacity,
    /// 5 I/O, 6 numerical non-convergence.
    fn kind_and_code(&self) -> (&'static str, i32) {
        use rcm_core::Error::*;
        match self {
            AppError::Io(_) => ("io", 5),
            AppError::Core(e) => match e {
                DivergentRegime { .. } | RegimeRefusal { .. } => ("regime-refusal", 3),
                Capacity { .. } => ("capacity", 4),
                NonConvergence { .. } => ("non-convergence", 6),
                _ => ("validation", 2),
            },
        }
    }

    fn message(&self) -> String {
        match self {
            AppError::Core(e) => e.to_string(),
            AppError::Io(e) => e.to_string(),
        }
    }
}

/// JSON run summary embedding the effective configuration, so every
/// artifact can be reproduced bit-exactly from its own provenance.
#[derive(Serialize)]
struct RunSummary<T: Serialize> {
    command: String,
    run_id: String,
    seed: u64,
    effective_config: BTreeMap<String, String>,
    outputs: Vec<String>,
    result: T,
    /// Wall-clock duration; the only field that varies between
    /// bit-identical reruns.
    wall_time_seconds: f64,
}

fn run_id(command: &str, echo: &BTreeMap<String, String>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(command.as_bytes());
    for (k, v) in echo {
        hasher.update(b"\n");
        hasher.update(k.as_bytes());
        hasher.update(b"=");
        hasher.update(v.as_bytes());
    }
    let digest = hasher.finalize();
    digest[..6].iter().map(|b| format!("{b:02x}")).collect()
}

fn out_dir(config: &RunConfig) -> Result<&Path, AppError> {
    match &config.out {
        Some(path) => Ok(Path::new(path)),
        None => Err(AppError::Core(rcm_core::Error::InvalidConfig {
            reason: "this command writes files; pass --out DIR (or `out = DIR` in the config)"
                .into(),
        })),
    }
}

fn write_artifacts<T: Serialize>(
    command: &str,
    config: &RunConfig,
    csv_name: &str,
    csv: &str,
    result: T,
    started: std::time::Instant,
) -> Result<(), AppError> {
    let dir = out_dir(config)?;
    let echo = config.echo();
    let csv_path = dir.join(csv_name);
    let summary_path = dir.join(format!("{command}_run.json"));
    let summary = RunSummary {
        command: command.to_string(),
        run_id: run_id(command, &echo),
        seed: config.seed,
        effective_config: echo,
        outputs: vec![
            csv_path.display().to_string(),
            summary_path.display().to_string(),
        ],
        result,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    std::fs::write(&csv_path, csv)?;
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    std::fs::write(&summary_path, json)?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", summary_path.display());
    Ok(())
}

fn effective_config(cli: &Cli) -> Result<RunConfig, AppError> {
    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        config.load(path)?;
    }
    // Flags override file values.
    macro_rules! set_flag {
        ($field:ident, $key:literal) => {
            if let Some(v) = &cli.$field {
                config.set($key, &v.to_string())?;
            }
        };
    }
    set_flag!(d, "d");
    set_flag!(nu, "nu");
    set_flag!(lambda, "lambda");
    set_flag!(alpha, "alpha");
    set_flag!(tau, "tau");
    set_flag!(side, "side");
    set_flag!(boundary, "boundary");
    set_flag!(replicas, "replicas");
    set_flag!(seed, "seed");
    set_flag!(workers, "workers");
    set_flag!(epsilon, "epsilon");
    set_flag!(lambda_grid, "lambda_grid");
    set_flag!(sides, "sides");
    set_flag!(cube_side, "cube_side");
    set_flag!(grid_extent, "grid_extent");
    set_flag!(adjacency, "adjacency");
    set_flag!(kmax, "kmax");
    if let Some(out) = &cli.out {
        config.set("out", &out.display().to_string())?;
    }
    Ok(config)
}

fn cmd_analytic(config: &RunConfig) -> Result<(), AppError> {
    let params = config.params()?;
    let report = AnalyticReport::new(&params, config.kmax)?;
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    print!("{json}");
    Ok(())
}

fn cmd_degree(config: &RunConfig, budget: &Budget) -> Result<(), AppError> {
    let started = std::time::Instant::now();
    let params = config.params()?;
    let study = run_degree_study(&params, config.side, config.replicas, config.seed, budget)?;
    let csv = degree_csv(&study);

    #[derive(Serialize)]
    struct DegreeOutcome {
        study: rcm_core::DegreeStudyResult,
        #[serde(skip_serializing_if = "Option::is_none")]
        tail_fit: Option<rcm_core::TailFitResult>,
    }
    // A thin tail is normal at small scale; the fit is attached only
    // when the pre-registered window exists.
    let tail_fit = fit_tail_exponent(&study).ok();
    write_artifacts(
        "degree",
        config,
        "degree_histogram.csv",
        &csv,
        DegreeOutcome { study, tail_fit },
        started,
    )
}

fn cmd_theta(config: &RunConfig, budget: &Budget) -> Result<(), AppError> {
    let started = std::time::Instant::now();
    let params = config.params()?;
    let scan = run_theta_scan(
        &params,
        &config.lambda_grid,
        config.side,
        config.replicas,
        config.seed,
        config.epsilon,
        budget,
    )?;
    let csv = theta_csv(&scan);
    write_artifacts("theta", config, "theta_scan.csv", &csv, scan, started)
}

fn cmd_fss(config: &RunConfig, budget: &Budget) -> Result<(), AppError> {
    let started = std::time::Instant::now();
    let params = config.params()?;
    let report = run_finite_size_contrast(
        &params,
        config.lambda,
        &config.sides,
        config.replicas,
        config.seed,
        config.epsilon,
        budget,
    )?;
    let csv = fss_csv(&report);
    write_artifacts("fss", config, "finite_size.csv", &csv, report, started)
}

fn cmd_sitebond(config: &RunConfig, budget: &Budget) -> Result<(), AppError> {
    let started = std::time::Instant::now();
    let params = config.params()?;
    let report = site_bond_renormalization(
        &params,
        config.cube_side,
        config.grid_extent,
        config.replicas,
        config.seed,
        config.adjacency,
        budget,
    )?;
    let csv = sitebond_csv(&report);
    write_artifacts("sitebond", config, "site_bond.csv", &csv, report, started)
}

/// Oracle cross-check suite: closed forms against quadrature, the two
/// pmf routes against each other, union-find against breadth-first
/// search, and the exact lambda coupling.
fn cmd_validate(config: &RunConfig, budget: &Budget) -> Result<bool, AppError> {
    let spec = QuadratureSpec::default();
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    // Closed-form integral vs radial quadrature on random valid tuples.
    let mut worst = 0.0f64;
    let mut tested = 0;
    let mut i = 0u64;
    while tested < 15 {
        i += 1;
        let u = |j: u64| rcm_core::rng::uniform_at(config.seed, rcm_core::rng::stream::SYNTHETIC, i, j);
        let d = 1 + (u(0) * 3.0) as u32;
        let p = ModelParams::new(
            d,
            0.1 + 9.9 * u(1),
            0.1 + 9.9 * u(2),
            0.1 + 9.9 * u(3),
            0.1 + 9.9 * u(4),
        )
        .expect("positive fields");
        if !p.finite_degree() || p.tau - p.beta() < 0.05 {
            continue;
        }
        tested += 1;
        let w = 1.0 + 9.0 * u(5);
        let numeric = quadrature_integral(&p, w, &spec)?;
        let closed = integral_closed_form(&p, w)?;
        worst = worst.max(((numeric - closed) / closed).abs());
    }
    check(
        "integral closed form vs quadrature",
        worst < 1e-8,
        format!("max relative deviation {worst:.3e} over {tested} tuples"),
    );

    // Dual-route pmf agreement at the reference tuple.
    let p = ModelParams::new(1, 1.0, 1.0, 2.0, 3.0).expect("valid");
    let mut worst_abs = 0.0f64;
    for k in 0..=20 {
        let a = degree_pmf(&p, k)?;
        let b = mixing_pmf_oracle(&p, k, &spec)?;
        worst_abs = worst_abs.max((a - b).abs());
    }
    check(
        "degree pmf vs mixture oracle",
        worst_abs < 1e-8,
        format!("max absolute deviation {worst_abs:.3e} for k = 0..20"),
    );

    // Union-find vs BFS on random graphs.
    let domain = BoxDomain::new(1, 40.0, rcm_core::Boundary::Torus)?;
    let mut partitions_match = true;
    for seed in 0..100u64 {
        let cloud = sample_cloud_with_budget(&p, &domain, seed, budget)?;
        let graph = build_graph(&p, &cloud, seed)?;
        let labels = bfs_components(&graph.edges, graph.n);
        let mut dsf = graph.dsf.clone();
        for (a, b) in (0..graph.n).flat_map(|x| (x + 1..graph.n).map(move |y| (x, y))) {
            let same_uf = dsf.find(a) == dsf.find(b);
            if same_uf != (labels[a] == labels[b]) {
                partitions_match = false;
            }
        }
    }
    check(
        "union-find vs BFS partitions",
        partitions_match,
        "100 random graphs".into(),
    );

    // Exact lambda coupling.
    let mut coupled = true;
    let free = BoxDomain::new(1, 40.0, rcm_core::Boundary::Free)?;
    for seed in 0..20u64 {
        let cloud = sample_palm_cloud_with_budget(&p, &free, seed, budget)?;
        let mut previous: Option<std::collections::HashSet<(usize, usize)>> = None;
        for lambda in [0.2, 0.5, 1.0, 2.0, 4.0] {
            let g = build_graph(&p.with_lambda(lambda), &cloud, seed)?;
            let edges: std::collections::HashSet<_> = g.edges.iter().copied().collect();
            if let Some(prev) = &previous {
                if !prev.is_subset(&edges) {
                    coupled = false;
                }
            }
            let _ = components(&g, &cloud);
            previous = Some(edges);
        }
    }
    check(
        "monotone lambda coupling",
        coupled,
        "20 replicas x 5 scales".into(),
    );

    Ok(all_ok)
}

fn dispatch(cli: &Cli) -> Result<i32, AppError> {
    let config = effective_config(cli)?;
    config.params()?; // validate before any work
    if let Some(workers) = config.workers {
        // Ignore the error if a pool already exists (repeated dispatch
        // in tests); worker count only affects scheduling, not results.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    let budget = Budget::from_env();
    match cli.command {
        Command::Analytic => cmd_analytic(&config).map(|_| 0),
        Command::Degree => cmd_degree(&config, &budget).map(|_| 0),
        Command::Theta => cmd_theta(&config, &budget).map(|_| 0),
        Command::Fss => cmd_fss(&config, &budget).map(|_| 0),
        Command::Sitebond => cmd_sitebond(&config, &budget).map(|_| 0),
        Command::Validate => cmd_validate(&config, &budget).map(|ok| if ok { 0 } else { 1 }),
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            let (kind, code) = err.kind_and_code();
            let payload = serde_json::json!({
                "error": {
                    "kind": kind,
                    "message": err.message(),
                    "exit_code": code,
                }
            });
            eprintln!("{payload}");
            std::process::exit(code);
        }
    }
}
