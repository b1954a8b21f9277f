//! Model parameters of the heterogeneous random-connection model.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Slack used when classifying parameters against regime boundaries.
/// Products like `tau * alpha` carry one rounding, so boundary cases
/// supplied as decimals still land on the intended branch.
pub const BOUNDARY_SLACK: f64 = 1e-12;

/// The five-parameter model: dimension `d`, Poisson intensity `nu`,
/// connection scale `lambda`, distance-decay exponent `alpha` and Pareto
/// tail exponent `tau` of the weight distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: u32,
    pub nu: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub tau: f64,
}

impl ModelParams {
    pub fn new(d: u32, nu: f64, lambda: f64, alpha: f64, tau: f64) -> Result<Self> {
        let p = ModelParams { d, nu, lambda, alpha, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidParameter {
                field: "d",
                reason: "dimension must be a positive integer".into(),
            });
        }
        for (field, value) in [
            ("nu", self.nu),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("tau", self.tau),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    field,
                    reason: format!("must be strictly positive and finite, got {value}"),
                });
            }
        }
        Ok(())
    }

    /// `min(alpha, tau * alpha)`, the quantity the degree condition is
    /// stated in.
    pub fn min_exponent(&self) -> f64 {
        self.alpha.min(self.tau * self.alpha)
    }

    /// Whether the degree of a particle is almost surely finite, i.e.
    /// `min(alpha, tau * alpha) > d`.
    pub fn finite_degree(&self) -> bool {
        cmp_slack(self.min_exponent(), self.d as f64) == std::cmp::Ordering::Greater
    }

    /// `d / alpha`, the exponent governing the spatial integral.
    pub fn beta(&self) -> f64 {
        self.d as f64 / self.alpha
    }

    /// `tau * alpha / d`, the power-law exponent of the degree tail.
    pub fn tail_exponent(&self) -> f64 {
        self.tau * self.alpha / self.d as f64
    }

    /// Same parameters with a different connection scale; used by the
    /// coupled lambda sweeps.
    pub fn with_lambda(&self, lambda: f64) -> ModelParams {
        ModelParams { lambda, ..*self }
    }

    /// Require the finite-degree regime, returning the divergent-integral
    /// error otherwise.
    pub fn require_finite_degree(&self) -> Result<()> {
        if self.finite_degree() {
            Ok(())
        } else {
            Err(Error::DivergentRegime {
                min_value: self.min_exponent(),
                d: self.d,
            })
        }
    }
}

/// Three-way comparison with `BOUNDARY_SLACK` relative tolerance, so that
/// e.g. `tau * alpha` landing within one ulp of `2d` classifies as equal.
pub fn cmp_slack(x: f64, y: f64) -> std::cmp::Ordering {
    let scale = 1.0f64.max(x.abs()).max(y.abs());
    if (x - y).abs() <= BOUNDARY_SLACK * scale {
        std::cmp::Ordering::Equal
    } else if x < y {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    #[test]
    fn validation_rejects_bad_fields() {
        assert!(ModelParams::new(0, 1.0, 1.0, 2.0, 3.0).is_err());
        assert!(ModelParams::new(1, -1.0, 1.0, 2.0, 3.0).is_err());
        assert!(ModelParams::new(1, 1.0, 0.0, 2.0, 3.0).is_err());
        assert!(ModelParams::new(1, 1.0, 1.0, f64::NAN, 3.0).is_err());
        assert!(ModelParams::new(1, 1.0, 1.0, 2.0, 3.0).is_ok());
    }

    #[test]
    fn finite_degree_condition() {
        // min{alpha, tau alpha} > d
        let p = ModelParams::new(1, 1.0, 1.0, 2.0, 3.0).unwrap();
        assert!(p.finite_degree());
        // alpha <= d
        let p = ModelParams::new(2, 1.0, 1.0, 1.5, 4.0).unwrap();
        assert!(!p.finite_degree());
        // tau alpha <= d
        let p = ModelParams::new(2, 1.0, 1.0, 3.0, 0.5).unwrap();
        assert!(!p.finite_degree());
    }

    #[test]
    fn slack_comparison_absorbs_rounding() {
        // 0.4 * 5.0 is not exactly 2.0 in binary, but must classify equal.
        assert_eq!(cmp_slack(0.4f64 * 5.0, 2.0), Ordering::Equal);
        assert_eq!(cmp_slack(2.0 + 1e-9, 2.0), Ordering::Greater);
        assert_eq!(cmp_slack(2.0 - 1e-9, 2.0), Ordering::Less);
    }
}
