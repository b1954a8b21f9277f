//! Closed-form degree-law quantities and the percolation-regime
//! classification.
//!
//! Everything here is an exact function of the model parameters: the
//! unit-ball volume, the conditional edge-intensity integral `I(w)`, the
//! tail constant `c1`, the mean degree, the mixed-Poisson degree pmf and
//! its power-law tail approximation. The independent numerical routes
//! used to validate these live in [`crate::oracle`].

use crate::error::{Error, Result};
use crate::params::{cmp_slack, ModelParams};
use crate::special::{gamma, ln_factorial, ln_gamma};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Percolation regime of the parameter tuple.
///
/// `BoundaryFiniteUnknownPositivity` marks the critical line
/// `tau * alpha = 2d`, where the critical value is known to be finite
/// (for `alpha <= 2` when `d = 1`) but whether it is positive is open.
/// The boundary is never silently merged into a neighboring regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `min(alpha, tau*alpha) <= d`: every particle has infinitely many
    /// neighbors almost surely, so percolation is trivial.
    InfiniteDegree,
    /// `tau * alpha < 2d`: the graph percolates for every positive scale.
    LambdaCZero,
    /// Non-trivial phase transition: critical scale in `(0, inf)`.
    LambdaCPositiveFinite,
    /// `d = 1` with `min(alpha, tau*alpha) > 2`: no percolation at any
    /// finite scale.
    LambdaCInfinite,
    /// `tau * alpha = 2d` boundary case.
    BoundaryFiniteUnknownPositivity,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::InfiniteDegree => "InfiniteDegree",
            Regime::LambdaCZero => "LambdaCZero",
            Regime::LambdaCPositiveFinite => "LambdaCPositiveFinite",
            Regime::LambdaCInfinite => "LambdaCInfinite",
            Regime::BoundaryFiniteUnknownPositivity => "BoundaryFiniteUnknownPositivity",
        };
        f.write_str(s)
    }
}

/// Volume of the unit ball in `R^d`: `pi^(d/2) / Gamma(d/2 + 1)`.
pub fn unit_ball_volume(d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter {
            field: "d",
            reason: "unit ball volume needs dimension >= 1".into(),
        });
    }
    let half = d as f64 / 2.0;
    Ok(std::f64::consts::PI.powf(half) / gamma(half + 1.0))
}

/// Log of the tail constant `c1`; kept in log space because the inner
/// factor is raised to `tau*alpha/d`, which overflows quickly.
pub(crate) fn ln_c1(params: &ModelParams) -> Result<f64> {
    params.require_finite_degree()?;
    let beta = params.beta();
    let v_d = unit_ball_volume(params.d)?;
    let ln_inner = params.nu.ln() + v_d.ln() + ln_gamma(1.0 - beta) + params.tau.ln()
        - (params.tau - beta).ln();
    Ok(params.tail_exponent() * ln_inner + params.tau * params.lambda.ln())
}

/// `I(w)`: the expected edge intensity seen from a particle of weight `w`,
/// integrated over space and the partner weight. Closed form
/// `v_d * Gamma(1 - d/alpha) * tau/(tau - d/alpha) * (lambda w)^(d/alpha)`.
pub fn integral_closed_form(params: &ModelParams, w: f64) -> Result<f64> {
    params.require_finite_degree()?;
    if !(w.is_finite() && w >= 1.0) {
        return Err(Error::Domain {
            what: "w",
            reason: format!("weights are supported on [1, inf), got {w}"),
        });
    }
    let beta = params.beta();
    let v_d = unit_ball_volume(params.d)?;
    Ok(v_d * gamma(1.0 - beta) * params.tau / (params.tau - beta)
        * (params.lambda * w).powf(beta))
}

/// The tail constant `c1(d, tau, alpha, lambda, nu)`.
///
/// For extreme parameter combinations the value can exceed `f64::MAX`
/// and comes back as `+inf`; use the pmf and tail functions (which stay
/// in log space) for such tuples.
pub fn c1_constant(params: &ModelParams) -> Result<f64> {
    Ok(ln_c1(params)?.exp())
}

/// Expected degree of a particle:
/// `nu * v_d * Gamma(1 - d/alpha) * (tau/(tau - d/alpha))^2 * lambda^(d/alpha)`.
pub fn mean_degree(params: &ModelParams) -> Result<f64> {
    params.require_finite_degree()?;
    let beta = params.beta();
    let v_d = unit_ball_volume(params.d)?;
    let ratio = params.tau / (params.tau - beta);
    Ok(params.nu * v_d * gamma(1.0 - beta) * ratio * ratio * params.lambda.powf(beta))
}

/// Leading-order tail approximation `c1 * n^-(tau*alpha/d)` of the degree
/// survival probability.
pub fn tail_asymptotic(params: &ModelParams, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain {
            what: "n",
            reason: "tail approximation needs n >= 1".into(),
        });
    }
    Ok((ln_c1(params)? - params.tail_exponent() * (n as f64).ln()).exp())
}

/// Probability that a particle has exactly `k` neighbors.
///
/// Evaluates the incomplete-gamma-type representation
/// `(tau*alpha/d) * c1/k! * \int_a^inf t^(k - tau*alpha/d - 1) e^-t dt`
/// with `a = c1^(d/(tau*alpha))`. The shape `k - tau*alpha/d` may be
/// negative; the integral is computed by adaptive quadrature on a
/// truncated interval with an analytic remainder bound, with the
/// integrand rescaled by its maximum so that large `k` stay in range.
pub fn degree_pmf(params: &ModelParams, k: u32) -> Result<f64> {
    params.require_finite_degree()?;
    let s = params.tail_exponent();
    let lc1 = ln_c1(params)?;
    let a = (lc1 / s).exp(); // c1^(d / tau alpha) = nu * I(1)
    let q = k as f64 - s - 1.0; // exponent of t in the integrand

    let log_integral = log_gamma_type_integral(q, a)?;
    let ln_pmf = s.ln() + lc1 - ln_factorial(k) + log_integral;
    Ok(ln_pmf.exp().min(1.0))
}

/// log of `\int_a^inf t^q e^-t dt` for `a > 0` and any real `q`.
fn log_gamma_type_integral(q: f64, a: f64) -> Result<f64> {
    debug_assert!(a > 0.0);
    // Peak of q ln t - t on [a, inf): t = q when q > a, else the left edge.
    let t_star = if q > a { q } else { a };
    let peak = q * t_star.ln() - t_star;
    let g = |t: f64| (q * t.ln() - t - peak).exp();

    // Truncation point: past max(2q, a) the log-integrand falls at slope
    // <= -1/2, so the remainder is bounded by 2 * g(T).
    let mut t_end = (2.0 * q.max(0.0)).max(a) + 10.0;
    for _ in 0..400 {
        if 2.0 * g(t_end) < 1e-18 {
            break;
        }
        t_end = t_end * 1.25 + 2.0;
    }

    // Coarse composite estimate anchors the absolute tolerance, then the
    // adaptive pass refines to ~1e-12 relative.
    let coarse = composite_simpson(&g, a, t_end, 512);
    let tol = 1e-12 * coarse.max(1e-300);
    let value = adaptive_simpson(&g, a, t_end, tol, "degree pmf integrand")?;
    Ok(peak + value.ln())
}

fn composite_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let x = a + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    acc * h / 3.0
}

/// Globally adaptive Simpson quadrature: segments carry a Richardson
/// error estimate, the worst segment is bisected until the summed error
/// meets the tolerance. Reports non-convergence instead of returning an
/// estimate that missed its tolerance.
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    context: &'static str,
) -> Result<f64> {
    // One refined segment: endpoints and midpoint with their ordinates,
    // the Richardson-extrapolated value and its error estimate.
    struct Seg {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        value: f64,
        err: f64,
    }

    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }

    let eval = |a: f64, b: f64, fa: f64, fm: f64, fb: f64, f: &dyn Fn(f64) -> f64| -> Seg {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let whole = simpson(fa, fm, fb, b - a);
        let halves = simpson(fa, flm, fm, m - a) + simpson(fm, frm, fb, b - m);
        let delta = halves - whole;
        Seg { a, b, fa, fm, fb, value: halves + delta / 15.0, err: delta.abs() / 15.0 }
    };

    let fa0 = f(a);
    let fm0 = f(0.5 * (a + b));
    let fb0 = f(b);
    let mut segs = vec![eval(a, b, fa0, fm0, fb0, f)];
    for _ in 0..200_000u32 {
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if err <= tol {
            return Ok(segs.iter().map(|s| s.value).sum());
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .expect("segments never empty");
        let seg = segs.swap_remove(worst);
        let m = 0.5 * (seg.a + seg.b);
        if seg.b - seg.a < 1e-15 * (1.0 + m.abs()) {
            // Width is at rounding resolution; keep the estimate as is.
            segs.push(Seg { err: 0.0, ..seg });
            continue;
        }
        segs.push(eval(seg.a, m, seg.fa, f(0.5 * (seg.a + m)), seg.fm, f));
        segs.push(eval(m, seg.b, seg.fm, f(0.5 * (m + seg.b)), seg.fb, f));
    }
    let err: f64 = segs.iter().map(|s| s.err).sum();
    Err(Error::NonConvergence { context, error: err, tolerance: tol })
}

/// Classify the parameter tuple into its percolation regime.
///
/// Comparisons against the regime boundaries use a relative slack of
/// `1e-12` so decimal inputs that conceptually sit on a boundary (e.g.
/// `tau * alpha = 2d` assembled from rounded factors) classify as such.
pub fn classify_regime(params: &ModelParams) -> Regime {
    if !params.finite_degree() {
        return Regime::InfiniteDegree;
    }
    let two_d = 2.0 * params.d as f64;
    match cmp_slack(params.tau * params.alpha, two_d) {
        Ordering::Less => Regime::LambdaCZero,
        Ordering::Equal => Regime::BoundaryFiniteUnknownPositivity,
        Ordering::Greater => {
            if params.d >= 2 {
                Regime::LambdaCPositiveFinite
            } else {
                // d = 1, tau*alpha > 2; finite_degree gives alpha > 1.
                match cmp_slack(params.alpha, 2.0) {
                    Ordering::Greater => Regime::LambdaCInfinite,
                    _ => Regime::LambdaCPositiveFinite,
                }
            }
        }
    }
}

/// Bundle of the closed-form quantities for one parameter tuple.
///
/// `c1`, `mean_degree` and the pmf exist only in the finite-degree
/// regime and are omitted otherwise.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticReport {
    pub params: ModelParams,
    pub v_d: f64,
    pub regime: Regime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_degree: Option<f64>,
    /// `pmf[k]` = probability of degree `k`, for `k = 0..=k_max`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pmf: Vec<f64>,
}

impl AnalyticReport {
    /// Evaluate the closed forms; `k_max` controls how many pmf values
    /// are tabulated (ignored outside the finite-degree regime).
    pub fn new(params: &ModelParams, k_max: u32) -> Result<AnalyticReport> {
        params.validate()?;
        let regime = classify_regime(params);
        let v_d = unit_ball_volume(params.d)?;
        if regime == Regime::InfiniteDegree {
            return Ok(AnalyticReport {
                params: *params,
                v_d,
                regime,
                c1: None,
                mean_degree: None,
                pmf: Vec::new(),
            });
        }
        let mut pmf = Vec::with_capacity(k_max as usize + 1);
        for k in 0..=k_max {
            pmf.push(degree_pmf(params, k)?);
        }
        Ok(AnalyticReport {
            params: *params,
            v_d,
            regime,
            c1: Some(c1_constant(params)?),
            mean_degree: Some(mean_degree(params)?),
            pmf,
        })
    }

    /// `I(w)` for this report's parameters.
    pub fn integral_at(&self, w: f64) -> Result<f64> {
        integral_closed_form(&self.params, w)
    }
}
