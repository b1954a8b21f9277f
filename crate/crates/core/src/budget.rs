//! Capacity budget guarding against runaway workloads.

/// Hard limits on sampled particles and on the pair count a graph build
/// may enumerate. The particle limit can be raised or lowered through the
/// `RCM_MAX_PARTICLES` environment variable (see [`Budget::from_env`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_particles: u64,
    pub max_pairs: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_particles: 5_000_000,
            max_pairs: 2_000_000_000,
        }
    }
}

impl Budget {
    /// Default budget with `max_particles` overridden by the
    /// `RCM_MAX_PARTICLES` environment variable when set and parseable.
    /// The pair budget scales along so an all-pairs build over the full
    /// particle allowance stays admissible.
    pub fn from_env() -> Budget {
        let mut budget = Budget::default();
        if let Ok(raw) = std::env::var("RCM_MAX_PARTICLES") {
            if let Ok(n) = raw.trim().parse::<u64>() {
                budget.max_particles = n;
                budget.max_pairs = budget.max_pairs.max(n.saturating_mul(n) / 2);
            }
        }
        budget
    }
}
