//! Monte Carlo drivers confronting simulation with the closed-form
//! degree laws and the percolation-regime predictions: degree-law
//! verification, tail-exponent fitting, coupled theta scans, finite-size
//! contrasts and the site-bond renormalization demonstrator.
//!
//! Replicas are independent jobs keyed by (seed, replica index);
//! aggregation is associative over the replica-ordered results, so any
//! worker count produces identical output.

use crate::analytic::{classify_regime, degree_pmf, mean_degree, Regime};
use crate::budget::Budget;
use crate::cloud::{sample_palm_cloud_with_budget, BoxDomain, Boundary};
use crate::error::{Error, Result};
use crate::graph::{build_graph_fast_with_budget, components, palm_degree, DisjointSet};
use crate::params::ModelParams;
use crate::rng::{self, derive_seed, stream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Outcome of a palm-degree study: empirical histogram against the
/// analytic pmf.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeStudyResult {
    pub params: ModelParams,
    pub side: f64,
    pub replicas: u64,
    pub seed: u64,
    /// `histogram[k]` = number of replicas whose palm particle had
    /// degree `k`; the counts sum to `replicas`.
    pub histogram: Vec<u64>,
    /// Analytic pmf tabulated over the same range.
    pub analytic_pmf: Vec<f64>,
    /// Total-variation distance between the empirical law and the
    /// analytic one (analytic mass beyond the observed range included).
    pub tv_distance: f64,
    pub sample_mean: f64,
    pub sample_stderr: f64,
    pub theory_mean: f64,
}

/// Run `replicas` palm clouds on a torus of the given side and collect
/// the palm particle's degree. Refuses the infinite-degree regime, where
/// a finite box would silently mask the divergence.
pub fn run_degree_study(
    params: &ModelParams,
    side: f64,
    replicas: u64,
    seed: u64,
    budget: &Budget,
) -> Result<DegreeStudyResult> {
    params.validate()?;
    if classify_regime(params) == Regime::InfiniteDegree {
        return Err(Error::RegimeRefusal {
            reason: format!(
                "min(alpha, tau*alpha) = {} <= d = {}: degrees are infinite and a \
                 finite box would mask that; the degree study refuses to run",
                params.min_exponent(),
                params.d
            ),
        });
    }
    if replicas < 2 {
        return Err(Error::InvalidConfig {
            reason: "degree study needs at least 2 replicas".into(),
        });
    }
    let domain = BoxDomain::new(params.d, side, Boundary::Torus)?;
    let degrees: Vec<u32> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed_r = derive_seed(seed, stream::REPLICA, r);
            let cloud = sample_palm_cloud_with_budget(params, &domain, seed_r, budget)?;
            palm_degree(params, &cloud, seed_r)
        })
        .collect::<Result<Vec<u32>>>()?;

    let max_degree = degrees.iter().copied().max().unwrap_or(0) as usize;
    let mut histogram = vec![0u64; max_degree + 1];
    for &d in &degrees {
        histogram[d as usize] += 1;
    }
    let analytic_pmf: Vec<f64> = (0..=max_degree as u32)
        .map(|k| degree_pmf(params, k))
        .collect::<Result<_>>()?;

    let n = replicas as f64;
    let mut tv = 0.0;
    let mut pmf_mass = 0.0;
    for (count, p) in histogram.iter().zip(&analytic_pmf) {
        tv += (*count as f64 / n - p).abs();
        pmf_mass += p;
    }
    let tv_distance = 0.5 * (tv + (1.0 - pmf_mass).max(0.0));

    let sample_mean = degrees.iter().map(|&d| d as f64).sum::<f64>() / n;
    let variance = degrees
        .iter()
        .map(|&d| (d as f64 - sample_mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    Ok(DegreeStudyResult {
        params: *params,
        side,
        replicas,
        seed,
        histogram,
        analytic_pmf,
        tv_distance,
        sample_mean,
        sample_stderr: (variance / n).sqrt(),
        theory_mean: mean_degree(params)?,
    })
}

/// Degree histogram CSV: `k,count,empirical_p,analytic_p`.
pub fn degree_csv(study: &DegreeStudyResult) -> String {
    let mut out = String::from("k,count,empirical_p,analytic_p\n");
    let n = study.replicas as f64;
    for (k, (count, p)) in study.histogram.iter().zip(&study.analytic_pmf).enumerate() {
        out.push_str(&format!("{k},{count},{},{}\n", *count as f64 / n, p));
    }
    out
}

/// Least-squares tail-exponent fit over the pre-registered window.
#[derive(Debug, Clone, Serialize)]
pub struct TailFitResult {
    /// Fitted (positive) exponent of the survival power law.
    pub exponent: f64,
    pub stderr: f64,
    /// Window: the empirical 90th percentile ...
    pub n_min: u32,
    /// ... up to the largest degree with at least 30 exceedances.
    pub n_max: u32,
    /// The predicted exponent `tau * alpha / d`.
    pub target: f64,
}

/// Fit the log empirical survival against log degree over the window
/// `[n_min, n_max]` fixed a priori: `n_min` is the empirical 90th
/// percentile and `n_max` the largest degree with >= 30 exceedances.
pub fn fit_tail_exponent(study: &DegreeStudyResult) -> Result<TailFitResult> {
    let r_total = study.replicas;
    // exceed[n] = number of samples with degree strictly above n.
    let mut exceed = vec![0u64; study.histogram.len() + 1];
    for n in (0..study.histogram.len()).rev() {
        exceed[n] = exceed[n + 1] + study.histogram[n];
    }
    // exceed[n] currently counts degree >= n; shift to strict.
    let strict = |n: usize| -> u64 {
        if n + 1 < exceed.len() {
            exceed[n + 1]
        } else {
            0
        }
    };

    let n_min = (0..study.histogram.len())
        .find(|&n| strict(n) * 10 <= r_total)
        .unwrap_or(0)
        .max(1);
    if strict(n_min) < 100 {
        return Err(Error::InsufficientTail {
            reason: format!(
                "only {} samples above the 90th percentile n_min = {n_min}; need >= 100",
                strict(n_min)
            ),
        });
    }
    let n_max = (n_min..study.histogram.len())
        .rev()
        .find(|&n| strict(n) >= 30)
        .ok_or_else(|| Error::InsufficientTail {
            reason: "no degree with >= 30 exceedances above n_min".into(),
        })?;
    if n_max < n_min + 2 {
        return Err(Error::InsufficientTail {
            reason: format!("fit window [{n_min}, {n_max}] has fewer than 3 points"),
        });
    }

    let points: Vec<(f64, f64)> = (n_min..=n_max)
        .map(|n| {
            (
                (n as f64).ln(),
                (strict(n) as f64 / r_total as f64).ln(),
            )
        })
        .collect();
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let residual_var: f64 = points
        .iter()
        .map(|p| (p.1 - mean_y - slope * (p.0 - mean_x)).powi(2))
        .sum::<f64>()
        / (m - 2.0);
    Ok(TailFitResult {
        exponent: -slope,
        stderr: (residual_var / sxx).sqrt(),
        n_min: n_min as u32,
        n_max: n_max as u32,
        target: study.params.tail_exponent(),
    })
}

/// Coupled scan of the spanning frequency over an ascending lambda grid.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaScanResult {
    pub params: ModelParams,
    pub lambda_grid: Vec<f64>,
    pub side: f64,
    pub replicas: u64,
    pub seed: u64,
    pub epsilon: f64,
    pub spanning_freq: Vec<f64>,
    pub origin_cluster_mean: Vec<f64>,
    /// Exact coupling consequence: per replica the spanning indicator is
    /// nondecreasing along the grid. Reported, and always true, because
    /// all graphs of a replica share their pair uniforms.
    pub monotone: bool,
}

/// For each replica: one cloud and one set of pair uniforms, the graph
/// rebuilt per lambda with those shared uniforms (exact coupling), the
/// spanning indicator and origin-cluster size recorded per grid point.
pub fn run_theta_scan(
    params: &ModelParams,
    lambda_grid: &[f64],
    side: f64,
    replicas: u64,
    seed: u64,
    epsilon: f64,
    budget: &Budget,
) -> Result<ThetaScanResult> {
    params.validate()?;
    if lambda_grid.is_empty() {
        return Err(Error::InvalidConfig {
            reason: "lambda grid is empty".into(),
        });
    }
    if lambda_grid.windows(2).any(|w| w[0] >= w[1]) || lambda_grid[0] <= 0.0 {
        return Err(Error::InvalidConfig {
            reason: "lambda grid must be positive and strictly ascending".into(),
        });
    }
    let domain = BoxDomain::new(params.d, side, Boundary::Free)?;
    let per_replica: Vec<(Vec<bool>, Vec<usize>, bool)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let seed_r = derive_seed(seed, stream::REPLICA, r);
            let cloud = sample_palm_cloud_with_budget(params, &domain, seed_r, budget)?;
            let mut spans = Vec::with_capacity(lambda_grid.len());
            let mut sizes = Vec::with_capacity(lambda_grid.len());
            for &lambda in lambda_grid {
                let graph = build_graph_fast_with_budget(
                    &params.with_lambda(lambda),
                    &cloud,
                    seed_r,
                    epsilon,
                    budget,
                )?;
                let stats = components(&graph, &cloud);
                spans.push(stats.spanning.unwrap_or(false));
                sizes.push(stats.origin_cluster_size.unwrap_or(0));
            }
            let monotone = spans.windows(2).all(|w| w[0] <= w[1]);
            Ok((spans, sizes, monotone))
        })
        .collect::<Result<_>>()?;

    let n = replicas as f64;
    let mut spanning_freq = vec![0.0; lambda_grid.len()];
    let mut origin_cluster_mean = vec![0.0; lambda_grid.len()];
    let mut monotone = true;
    for (spans, sizes, mono) in &per_replica {
        for (i, &s) in spans.iter().enumerate() {
            spanning_freq[i] += if s { 1.0 } else { 0.0 };
        }
        for (i, &size) in sizes.iter().enumerate() {
            origin_cluster_mean[i] += size as f64;
        }
        monotone &= mono;
    }
    for v in spanning_freq.iter_mut().chain(origin_cluster_mean.iter_mut()) {
        *v /= n;
    }
    Ok(ThetaScanResult {
        params: *params,
        lambda_grid: lambda_grid.to_vec(),
        side,
        replicas,
        seed,
        epsilon,
        spanning_freq,
        origin_cluster_mean,
        monotone,
    })
}

/// Theta scan CSV: `lambda,spanning_freq,origin_cluster_mean,replicas`.
pub fn theta_csv(scan: &ThetaScanResult) -> String {
    let mut out = String::from("lambda,spanning_freq,origin_cluster_mean,replicas\n");
    for (i, lambda) in scan.lambda_grid.iter().enumerate() {
        out.push_str(&format!(
            "{lambda},{},{},{}\n",
            scan.spanning_freq[i], scan.origin_cluster_mean[i], scan.replicas
        ));
    }
    out
}

/// Direction of the spanning-frequency trend across box sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrendDirection {
    Increasing,
    Decreasing,
    Flat,
}

#[derive(Debug, Clone, Serialize)]
pub struct FssRow {
    pub side: f64,
    pub spanning_freq: f64,
    pub stderr: f64,
}

/// Spanning frequency versus box side at fixed lambda.
#[derive(Debug, Clone, Serialize)]
pub struct FiniteSizeReport {
    pub params: ModelParams,
    pub lambda: f64,
    pub replicas: u64,
    pub seed: u64,
    pub epsilon: f64,
    pub rows: Vec<FssRow>,
    /// Trend between the smallest and largest side, called Flat when the
    /// difference stays within two joint standard errors.
    pub trend: TrendDirection,
}

pub fn run_finite_size_contrast(
    params: &ModelParams,
    lambda: f64,
    sides: &[f64],
    replicas: u64,
    seed: u64,
    epsilon: f64,
    budget: &Budget,
) -> Result<FiniteSizeReport> {
    params.validate()?;
    if sides.len() < 2 {
        return Err(Error::InvalidConfig {
            reason: "finite-size trend needs at least two box sides".into(),
        });
    }
    if sides.windows(2).any(|w| w[0] >= w[1]) || sides[0] <= 0.0 {
        return Err(Error::InvalidConfig {
            reason: "box sides must be positive and strictly ascending".into(),
        });
    }
    let scan_params = params.with_lambda(lambda);
    let mut rows = Vec::with_capacity(sides.len());
    for (si, &side) in sides.iter().enumerate() {
        let domain = BoxDomain::new(params.d, side, Boundary::Free)?;
        let side_seed = derive_seed(seed, stream::SIDE, si as u64);
        let spans: Vec<bool> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let seed_r = derive_seed(side_seed, stream::REPLICA, r);
                let cloud =
                    sample_palm_cloud_with_budget(&scan_params, &domain, seed_r, budget)?;
                let graph = build_graph_fast_with_budget(
                    &scan_params, &cloud, seed_r, epsilon, budget,
                )?;
                Ok(components(&graph, &cloud).spanning.unwrap_or(false))
            })
            .collect::<Result<_>>()?;
        let n = replicas as f64;
        let freq = spans.iter().filter(|&&s| s).count() as f64 / n;
        rows.push(FssRow {
            side,
            spanning_freq: freq,
            stderr: (freq * (1.0 - freq) / n).sqrt(),
        });
    }
    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    let joint = (first.stderr.powi(2) + last.stderr.powi(2)).sqrt();
    let diff = last.spanning_freq - first.spanning_freq;
    let trend = if diff > 2.0 * joint {
        TrendDirection::Increasing
    } else if diff < -2.0 * joint {
        TrendDirection::Decreasing
    } else {
        TrendDirection::Flat
    };
    Ok(FiniteSizeReport {
        params: *params,
        lambda,
        replicas,
        seed,
        epsilon,
        rows,
        trend,
    })
}

/// Finite-size CSV: `L,lambda,spanning_freq,stderr`.
pub fn fss_csv(report: &FiniteSizeReport) -> String {
    let mut out = String::from("L,lambda,spanning_freq,stderr\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.side, report.lambda, row.spanning_freq, row.stderr
        ));
    }
    out
}

/// Which cubes count as neighbors in the renormalization, fixing the
/// maximal inter-particle distance `r`: face-adjacent cubes give
/// `r = n sqrt(d+3)`, full Moore adjacency `r = n sqrt(4d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjacency {
    Face,
    Moore,
}

impl std::fmt::Display for Adjacency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Adjacency::Face => "face",
            Adjacency::Moore => "moore",
        })
    }
}

impl std::str::FromStr for Adjacency {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "face" => Ok(Adjacency::Face),
            "moore" => Ok(Adjacency::Moore),
            other => Err(Error::InvalidParameter {
                field: "adjacency",
                reason: format!("expected `face` or `moore`, got `{other}`"),
            }),
        }
    }
}

/// Site-bond renormalization outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SiteBondReport {
    pub params: ModelParams,
    pub cube_side: f64,
    pub grid_extent: u32,
    pub replicas: u64,
    pub seed: u64,
    pub adjacency: Adjacency,
    /// `1 - exp(-nu n^d)`: probability a cube holds at least one particle.
    pub p_site: f64,
    /// Maximal distance between particles of neighboring cubes.
    pub r_distance: f64,
    /// `1 - exp(-lambda r^-alpha)`: lower bound on the connection
    /// probability between particles of good neighboring cubes.
    pub p_bond: f64,
    pub spanning_freq: f64,
}

/// Coarse-grain space into cubes of side `n` and simulate the induced
/// site-bond percolation model on a finite `grid_extent^d` lattice: sites
/// open independently with `p_site`, bonds between open nearest neighbors
/// with `p_bond`. Reports the frequency of a cluster spanning the first
/// axis.
pub fn site_bond_renormalization(
    params: &ModelParams,
    cube_side: f64,
    grid_extent: u32,
    replicas: u64,
    seed: u64,
    adjacency: Adjacency,
    budget: &Budget,
) -> Result<SiteBondReport> {
    params.validate()?;
    if !(cube_side.is_finite() && cube_side > 0.0) {
        return Err(Error::InvalidParameter {
            field: "cube_side",
            reason: format!("must be positive, got {cube_side}"),
        });
    }
    if grid_extent == 0 {
        return Err(Error::InvalidParameter {
            field: "grid_extent",
            reason: "lattice extent must be >= 1".into(),
        });
    }
    let d = params.d as usize;
    let sites = (grid_extent as u64)
        .checked_pow(d as u32)
        .filter(|&s| s <= budget.max_particles)
        .ok_or(Error::Capacity {
            what: "lattice site count",
            requested: u64::MAX,
            budget: budget.max_particles,
        })?;

    let p_site = -(-params.nu * cube_side.powi(d as i32)).exp_m1();
    let r_distance = match adjacency {
        Adjacency::Face => cube_side * (d as f64 + 3.0).sqrt(),
        Adjacency::Moore => cube_side * (4.0 * d as f64).sqrt(),
    };
    let p_bond = -(-params.lambda * r_distance.powf(-params.alpha)).exp_m1();

    let g = grid_extent as usize;
    // Row-major strides, axis 0 outermost: face `x_0 = const` is a
    // contiguous block, which the spanning check uses.
    let mut strides = vec![1usize; d];
    for axis in (0..d.saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * g;
    }
    let face_stride = strides[0];

    let spans: Vec<bool> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let open: Vec<bool> = (0..sites)
                .map(|s| rng::uniform_at(seed, stream::SITE, rep, s) < p_site)
                .collect();
            let mut dsf = DisjointSet::new(sites as usize);
            for s in 0..sites as usize {
                if !open[s] {
                    continue;
                }
                for (axis, stride) in strides.iter().enumerate() {
                    let coord = (s / stride) % g;
                    if coord + 1 >= g {
                        continue;
                    }
                    let t = s + stride;
                    if !open[t] {
                        continue;
                    }
                    let bond_key = (s * d + axis) as u64;
                    if rng::uniform_at(seed, stream::BOND, rep, bond_key) < p_bond {
                        dsf.union(s, t);
                    }
                }
            }
            // Roots reaching the x_0 = 0 face, then intersect with the
            // x_0 = g-1 face.
            let mut low_roots = std::collections::HashSet::new();
            for s in 0..face_stride {
                if open[s] {
                    low_roots.insert(dsf.find(s));
                }
            }
            let base = (g - 1) * face_stride;
            let spanning = (base..base + face_stride)
                .any(|s| open[s] && low_roots.contains(&dsf.find(s)));
            Ok(spanning)
        })
        .collect::<Result<_>>()?;

    let spanning_freq = spans.iter().filter(|&&s| s).count() as f64 / replicas as f64;
    Ok(SiteBondReport {
        params: *params,
        cube_side,
        grid_extent,
        replicas,
        seed,
        adjacency,
        p_site,
        r_distance,
        p_bond,
        spanning_freq,
    })
}

/// Site-bond CSV: `n,grid_extent,p_site,p_bond,spanning_freq,replicas`.
pub fn sitebond_csv(report: &SiteBondReport) -> String {
    format!(
        "n,grid_extent,p_site,p_bond,spanning_freq,replicas\n{},{},{},{},{},{}\n",
        report.cube_side,
        report.grid_extent,
        report.p_site,
        report.p_bond,
        report.spanning_freq,
        report.replicas
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams::new(1, 1.0, 1.0, 2.0, 3.0).unwrap()
    }

    #[test]
    fn degree_study_refuses_infinite_regime() {
        let p = ModelParams::new(2, 1.0, 1.0, 1.5, 4.0).unwrap();
        let err = run_degree_study(&p, 50.0, 100, 1, &Budget::default());
        assert!(matches!(err, Err(Error::RegimeRefusal { .. })));
    }

    #[test]
    fn degree_study_mean_and_histogram() {
        let p = base();
        let study = run_degree_study(&p, 100.0, 2_000, 11, &Budget::default()).unwrap();
        assert_eq!(study.histogram.iter().sum::<u64>(), study.replicas);
        assert_eq!(study.histogram.len(), study.analytic_pmf.len());
        assert!(study.tv_distance >= 0.0 && study.tv_distance <= 1.0);
        // Sample mean near the closed form (3 SE plus a small allowance
        // for the torus truncation bias at L = 100).
        let slack = 3.0 * study.sample_stderr + 0.1;
        assert!(
            (study.sample_mean - study.theory_mean).abs() < slack,
            "mean {} vs {}",
            study.sample_mean,
            study.theory_mean
        );
        let csv = degree_csv(&study);
        assert!(csv.starts_with("k,count,empirical_p,analytic_p\n"));
        assert_eq!(csv.lines().count(), study.histogram.len() + 1);
    }

    #[test]
    fn degree_study_lambda_scaling() {
        // At d/alpha = 1/2, scaling lambda by 4 doubles the mean degree.
        let p = base();
        let a = run_degree_study(&p, 150.0, 3_000, 5, &Budget::default()).unwrap();
        let b =
            run_degree_study(&p.with_lambda(4.0), 150.0, 3_000, 5, &Budget::default()).unwrap();
        let ratio = b.sample_mean / a.sample_mean;
        let se = 2.0 * (b.sample_stderr / b.sample_mean + a.sample_stderr / a.sample_mean);
        assert!((ratio - 2.0).abs() < 3.0 * se + 0.05, "ratio {ratio}");
    }

    #[test]
    fn degree_study_is_deterministic() {
        let p = base();
        let a = run_degree_study(&p, 60.0, 200, 3, &Budget::default()).unwrap();
        let b = run_degree_study(&p, 60.0, 200, 3, &Budget::default()).unwrap();
        assert_eq!(degree_csv(&a), degree_csv(&b));
    }

    #[test]
    fn tail_fit_recovers_synthetic_power_law() {
        // Degrees built from a scaled Pareto(1, 6) variable: survival of
        // round(30 X) at integer n >= 30 is ((n + 1/2)/30)^-6, a pure
        // power law up to the half-integer offset.
        let replicas = 1_000_000u64;
        let mut histogram = vec![0u64; 2000];
        for i in 0..replicas {
            let u = rng::uniform_at(17, stream::SYNTHETIC, i, 0);
            let x = (1.0 - u).powf(-1.0 / 6.0);
            let k = (30.0 * x).round() as usize;
            if k < histogram.len() {
                histogram[k] += 1;
            }
        }
        let p = base();
        let study = DegreeStudyResult {
            params: p,
            side: 0.0,
            replicas,
            seed: 17,
            analytic_pmf: vec![0.0; histogram.len()],
            histogram,
            tv_distance: 0.0,
            sample_mean: 0.0,
            sample_stderr: 0.0,
            theory_mean: 0.0,
        };
        let fit = fit_tail_exponent(&study).unwrap();
        assert!(
            (fit.exponent - 6.0).abs() < 0.3,
            "exponent {} (window [{}, {}])",
            fit.exponent,
            fit.n_min,
            fit.n_max
        );
        assert!(fit.n_min >= 1 && fit.n_max > fit.n_min);
    }

    #[test]
    fn tail_fit_insufficient_data() {
        let p = base();
        let study = DegreeStudyResult {
            params: p,
            side: 0.0,
            replicas: 50,
            seed: 0,
            histogram: vec![10, 20, 15, 5],
            analytic_pmf: vec![0.0; 4],
            tv_distance: 0.0,
            sample_mean: 0.0,
            sample_stderr: 0.0,
            theory_mean: 0.0,
        };
        assert!(matches!(
            fit_tail_exponent(&study),
            Err(Error::InsufficientTail { .. })
        ));
    }

    #[test]
    fn theta_scan_is_coupled_and_monotone() {
        let p = ModelParams::new(2, 1.0, 1.0, 3.0, 3.0).unwrap();
        let grid = [0.05, 0.2, 0.8, 3.0];
        let scan =
            run_theta_scan(&p, &grid, 12.0, 60, 21, 1e-9, &Budget::default()).unwrap();
        assert!(scan.monotone, "coupled spanning indicator must be monotone");
        for w in scan.spanning_freq.windows(2) {
            assert!(w[0] <= w[1] + 1e-12, "aggregate frequency not monotone: {w:?}");
        }
        let csv = theta_csv(&scan);
        assert_eq!(csv.lines().count(), grid.len() + 1);
    }

    #[test]
    fn theta_scan_tiny_lambda_never_spans() {
        let p = ModelParams::new(1, 1.0, 1.0, 2.0, 3.0).unwrap();
        let scan = run_theta_scan(&p, &[1e-12], 40.0, 50, 4, 0.0, &Budget::default()).unwrap();
        assert_eq!(scan.spanning_freq[0], 0.0);
    }

    #[test]
    fn theta_scan_rejects_bad_grid() {
        let p = base();
        for grid in [&[][..], &[0.5, 0.5][..], &[1.0, 0.5][..], &[-1.0, 1.0][..]] {
            assert!(matches!(
                run_theta_scan(&p, grid, 20.0, 5, 1, 0.0, &Budget::default()),
                Err(Error::InvalidConfig { .. })
            ));
        }
    }

    #[test]
    fn finite_size_needs_two_sides() {
        let p = ModelParams::new(1, 1.0, 1.0, 3.0, 2.0).unwrap();
        assert!(matches!(
            run_finite_size_contrast(&p, 5.0, &[64.0], 10, 1, 0.0, &Budget::default()),
            Err(Error::InvalidConfig { .. })
        ));
    }

    #[test]
    fn finite_size_rows_and_trend() {
        let p = ModelParams::new(1, 1.0, 1.0, 3.0, 2.0).unwrap();
        let report = run_finite_size_contrast(
            &p,
            5.0,
            &[32.0, 96.0],
            120,
            9,
            1e-9,
            &Budget::default(),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            assert!((0.0..=1.0).contains(&row.spanning_freq));
            assert!(row.stderr >= 0.0);
        }
        let csv = fss_csv(&report);
        assert!(csv.starts_with("L,lambda,spanning_freq,stderr\n"));
    }

    #[test]
    fn site_bond_probabilities() {
        // d=2, n=1, nu=1: p_site = 1 - e^-1.
        let p = ModelParams::new(2, 1.0, 1.0, 3.0, 3.0).unwrap();
        let report = site_bond_renormalization(
            &p, 1.0, 8, 50, 2, Adjacency::Face, &Budget::default(),
        )
        .unwrap();
        assert!((report.p_site - 0.632_120_558_828_557_7).abs() < 1e-12);
        assert!((report.r_distance - (5.0f64).sqrt()).abs() < 1e-12);
        let moore = site_bond_renormalization(
            &p, 1.0, 8, 50, 2, Adjacency::Moore, &Budget::default(),
        )
        .unwrap();
        assert!((moore.r_distance - (8.0f64).sqrt()).abs() < 1e-12);
        assert!(moore.p_bond < report.p_bond);
    }

    #[test]
    fn site_bond_fully_open_lattice_spans() {
        // Astronomically large nu and lambda drive both probabilities
        // to 1; every replica must span.
        let p = ModelParams::new(2, 1e9, 1e9, 0.5, 3.0).unwrap();
        let report = site_bond_renormalization(
            &p, 1.0, 6, 20, 3, Adjacency::Face, &Budget::default(),
        )
        .unwrap();
        assert_eq!(report.spanning_freq, 1.0);
    }

    #[test]
    fn site_bond_lambda_limit() {
        let p = ModelParams::new(1, 1.0, 1e12, 2.0, 3.0).unwrap();
        let report = site_bond_renormalization(
            &p, 2.0, 4, 10, 1, Adjacency::Face, &Budget::default(),
        )
        .unwrap();
        assert!(report.p_bond > 0.999999);
    }
}
