//! Simulator and analytics library for the heterogeneous Poisson
//! random-connection model.
//!
//! Particles form a homogeneous Poisson cloud in a box, each carrying an
//! independent Pareto(1, tau) weight; two particles at distance `r` with
//! weights `w_x`, `w_y` are joined independently with probability
//! `1 - exp(-lambda w_x w_y r^-alpha)`. The crate provides
//!
//! * [`analytic`]: exact degree-law quantities (tail constant, mean
//!   degree, mixed-Poisson pmf) and the percolation-regime classifier;
//! * [`cloud`]: reproducible sampling of plain and Palm-conditioned
//!   marked clouds;
//! * [`graph`]: realization of the random graph with pair-keyed
//!   uniforms (exact monotone coupling in lambda), degrees, union-find
//!   components and a cell-grid fast path;
//! * [`oracle`]: independent quadrature and brute-force routes used to
//!   validate the closed forms;
//! * [`experiments`]: Monte Carlo drivers (degree studies, tail fits,
//!   coupled theta scans, finite-size contrasts, site-bond
//!   renormalization).

pub mod analytic;
pub mod budget;
pub mod cloud;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod oracle;
pub mod params;
pub mod rng;
pub mod special;

pub use analytic::{
    c1_constant, classify_regime, degree_pmf, integral_closed_form, mean_degree,
    tail_asymptotic, unit_ball_volume, AnalyticReport, Regime,
};
pub use budget::Budget;
pub use cloud::{
    distance, sample_cloud, sample_cloud_with_budget, sample_palm_cloud,
    sample_palm_cloud_with_budget, sample_pareto, Boundary, BoxDomain, Particle, PointCloud,
};
pub use error::{Error, Result};
pub use experiments::{
    degree_csv, fit_tail_exponent, fss_csv, run_degree_study, run_finite_size_contrast,
    run_theta_scan, site_bond_renormalization, sitebond_csv, theta_csv, Adjacency,
    DegreeStudyResult, FiniteSizeReport, SiteBondReport, TailFitResult, ThetaScanResult,
    TrendDirection,
};
pub use graph::{
    build_graph, build_graph_fast, components, connection_probability, degree_of, ClusterStats,
    DisjointSet, Graph,
};
pub use oracle::{bfs_components, mixing_pmf_oracle, quadrature_integral, QuadratureSpec};
pub use params::ModelParams;
