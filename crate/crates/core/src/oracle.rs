//! Independent numerical oracles validating the closed forms.
//!
//! These deliberately share no code path with [`crate::analytic`]: the
//! unit-ball volume comes from the elementary two-step recurrence rather
//! than the gamma function, factorials are summed logs, the radial
//! integral is evaluated by quadrature after the substitution
//! `t = r^-alpha` (and one integration by parts) instead of being
//! recognized as a gamma integral, and the weight mixture is integrated
//! in log space over a truncated range with an analytic remainder bound.

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Tolerance and budget knobs of the adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of interval subdivisions before reporting
    /// non-convergence.
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4096,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter {
                field: "tolerance",
                reason: "quadrature tolerances must be positive".into(),
            });
        }
        Ok(())
    }
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let fsum = f(c - x) + f(c + x);
        kronrod += WGK[i] * fsum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fsum;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

/// Globally adaptive Gauss-Kronrod integration over [a, b].
fn gk_adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    context: &'static str,
) -> Result<f64> {
    if a >= b {
        return Ok(0.0);
    }
    let (v, e) = gk15(f, a, b);
    let mut segments = vec![(a, b, v, e)];
    for _ in 0..spec.max_subdivisions {
        let total: f64 = segments.iter().map(|s| s.2).sum();
        let err: f64 = segments.iter().map(|s| s.3).sum();
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("segments never empty");
        let (sa, sb, _, _) = segments.swap_remove(worst);
        let mid = 0.5 * (sa + sb);
        let (v1, e1) = gk15(f, sa, mid);
        let (v2, e2) = gk15(f, mid, sb);
        segments.push((sa, mid, v1, e1));
        segments.push((mid, sb, v2, e2));
    }
    let total: f64 = segments.iter().map(|s| s.2).sum();
    let err: f64 = segments.iter().map(|s| s.3).sum();
    Err(Error::NonConvergence {
        context,
        error: err,
        tolerance: spec.abs_tol.max(spec.rel_tol * total.abs()),
    })
}

/// Unit-ball volume by the elementary recurrence
/// `v_d = v_{d-2} * 2 pi / d` with `v_1 = 2`, `v_2 = pi`; no gamma
/// function involved.
fn ball_volume_recurrence(d: u32) -> f64 {
    let mut v = if d % 2 == 1 { 2.0 } else { std::f64::consts::PI };
    let mut k = if d % 2 == 1 { 1 } else { 2 };
    while k < d {
        k += 2;
        v *= 2.0 * std::f64::consts::PI / k as f64;
    }
    v
}

/// Spatial integral `S(b) = \int_{R^d} 1 - exp(-b |x|^-alpha) dx`,
/// computed by quadrature. Polar reduction gives
/// `d v_d \int (1 - e^{-b r^-alpha}) r^{d-1} dr`; the substitution
/// `t = r^-alpha` and one integration by parts turn it into
/// `v_d b \int_0^inf e^{-b t} t^{-d/alpha} dt`, and the power map
/// `t = u^p` with `p = 1/(1 - d/alpha)` removes the endpoint
/// singularity, leaving `v_d b p \int_0^inf e^{-b u^p} du`.
fn spatial_integral(d: u32, alpha: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    debug_assert!(alpha > d as f64 && b > 0.0);
    let beta = d as f64 / alpha;
    let p = 1.0 / (1.0 - beta);
    let v_d = ball_volume_recurrence(d);
    // Truncate where the exponent reaches 45; the convexity remainder
    // e^{-b U^p} / (b p U^{p-1}) is ~1e-20 of the total there.
    let u_end = (45.0 / b).powf(1.0 / p);
    let f = |u: f64| (-b * u.powf(p)).exp();
    let inner_spec = QuadratureSpec {
        abs_tol: spec.abs_tol,
        rel_tol: spec.rel_tol / 4.0,
        max_subdivisions: spec.max_subdivisions,
    };
    let core = gk_adaptive(&f, 0.0, u_end, &inner_spec, "radial spatial integral")?;
    let remainder = (-45.0f64).exp() / (b * p * u_end.powf(p - 1.0));
    Ok(v_d * b * p * (core + remainder))
}

/// `I(w)` computed without the closed form: the spatial integral above
/// mixed over the partner weight,
/// `\int_1^inf tau v^{-tau-1} S(lambda w v) dv`, integrated in
/// `y = ln v` up to a cutoff with an analytic bound on the discarded
/// tail.
pub fn quadrature_integral(params: &ModelParams, w: f64, spec: &QuadratureSpec) -> Result<f64> {
    params.require_finite_degree()?;
    spec.validate()?;
    if !(w.is_finite() && w >= 1.0) {
        return Err(Error::Domain {
            what: "w",
            reason: format!("weights are supported on [1, inf), got {w}"),
        });
    }
    let (d, alpha, tau) = (params.d, params.alpha, params.tau);
    let beta = params.beta();
    let v_d = ball_volume_recurrence(d);
    let b0 = params.lambda * w;

    // Lower bound on the result anchors the relative truncation target.
    let s_at_one = spatial_integral(d, alpha, b0, spec)?;
    let target = spec.abs_tol.max(spec.rel_tol * s_at_one) / 4.0;

    // Tail of the v-integral past e^Y, bounded via
    // S(b) <= v_d b^beta alpha/(alpha - d) (from 1 - e^-x <= min(1, x)).
    let c_out = v_d * alpha / (alpha - d as f64) * b0.powf(beta) * tau / (tau - beta);
    let y_end = ((c_out / target).ln() / (tau - beta)).max(1.0);
    if y_end > 700.0 {
        return Err(Error::NonConvergence {
            context: "weight-mixture truncation (tau too close to d/alpha)",
            error: c_out * (-(tau - beta) * 700.0).exp(),
            tolerance: target,
        });
    }

    let inner_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / 10.0,
        rel_tol: spec.rel_tol / 10.0,
        max_subdivisions: spec.max_subdivisions,
    };
    // v = e^y turns tau v^{-tau-1} dv into tau e^{-tau y} dy.
    let g = |y: f64| {
        let s = spatial_integral(d, alpha, b0 * y.exp(), &inner_spec)
            .expect("inner integrand evaluation failed");
        tau * (-tau * y).exp() * s
    };
    gk_adaptive(&g, 0.0, y_end, spec, "weight-mixture integral")
}

/// Degree pmf by direct mixture: the Poisson(`nu I(w)`) pmf integrated
/// against the Pareto density,
/// `\int_1^inf tau w^{-tau-1} e^{-mu(w)} mu(w)^k / k! dw`.
/// `mu(w) = nu I(1) w^{d/alpha}` with `I(1)` taken from
/// [`quadrature_integral`], so the whole route is independent of the
/// incomplete-gamma representation.
pub fn mixing_pmf_oracle(params: &ModelParams, k: u32, spec: &QuadratureSpec) -> Result<f64> {
    params.require_finite_degree()?;
    spec.validate()?;
    let tau = params.tau;
    let beta = params.beta();
    let m1 = params.nu * quadrature_integral(params, 1.0, spec)?;
    let kf = k as f64;
    let ln_k_factorial: f64 = (1..=k as u64).map(|i| (i as f64).ln()).sum();

    // In y = ln w the integrand is
    //   tau e^{-tau y} * exp(k ln mu - mu - ln k!),  mu = m1 e^{beta y};
    // the Poisson factor never exceeds 1, so everything stays in range.
    let g = |y: f64| {
        let mu = m1 * (beta * y).exp();
        let poisson_log = if k == 0 {
            -mu
        } else {
            kf * mu.ln() - mu - ln_k_factorial
        };
        tau * (-tau * y + poisson_log).exp()
    };

    // Extend past the Poisson peak (mu = k) until the log-integrand both
    // decays at slope <= -1 and has dropped below the target, so the
    // discarded tail is bounded by the last ordinate.
    let y_peak = if kf > m1 { (kf / m1).ln() / beta } else { 0.0 };
    let mut y_end = y_peak + 1.0;
    let target = spec.abs_tol / 4.0;
    for _ in 0..10_000 {
        let slope = -tau + kf * beta - beta * m1 * (beta * y_end).exp();
        if slope <= -1.0 && g(y_end) <= target {
            break;
        }
        y_end += 0.5 / beta.min(1.0);
    }
    gk_adaptive(&g, 0.0, y_end, spec, "pmf weight mixture")
}

/// Breadth-first-search component labeling: returns, for every node, the
/// smallest node id in its component. Reference oracle for the
/// union-find path.
pub fn bfs_components(edges: &[(usize, usize)], n: usize) -> Vec<usize> {
    let mut adjacency = vec![Vec::new(); n];
    for &(i, j) in edges {
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    let mut label = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = start;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &u in &adjacency[v] {
                if label[u] == usize::MAX {
                    label[u] = start;
                    queue.push_back(u);
                }
            }
        }
    }
    label
}
