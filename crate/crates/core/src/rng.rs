//! Counter-based random numbers keyed by (seed, stream, index, slot).
//!
//! Every variate the simulator consumes is a pure function of its key, so
//! clouds, edges and replicas are reproducible regardless of traversal
//! order or worker count. A keyed SplitMix64-style finalizer provides the
//! mixing; pair-keyed edge uniforms are what make the exact monotone
//! lambda-coupling possible without storing O(n^2) randomness.

use rand::RngCore;

/// Named streams. Distinct constants keep every consumer of randomness on
/// its own independent sequence for a given master seed.
pub mod stream {
    /// Poisson particle count of a cloud.
    pub const COUNT: u64 = 0x01;
    /// Positions (slots 0..d-1) and weight (slot d) of bulk particle i.
    pub const CLOUD: u64 = 0x02;
    /// Weight of the Palm-conditioned origin particle.
    pub const PALM: u64 = 0x03;
    /// Pair uniform for the edge test of particles (i, j), i < j.
    pub const EDGE: u64 = 0x04;
    /// Sub-seed of replica r inside an experiment.
    pub const REPLICA: u64 = 0x05;
    /// Site open/closed variates of the site-bond lattice model.
    pub const SITE: u64 = 0x06;
    /// Bond open/closed variates of the site-bond lattice model.
    pub const BOND: u64 = 0x07;
    /// Sub-seed per box side in finite-size contrasts.
    pub const SIDE: u64 = 0x08;
    /// Synthetic samples in test generators.
    pub const SYNTHETIC: u64 = 0x09;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// 64-bit finalizer (Stafford variant 13 of the SplitMix64 mixer).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Collapse (seed, stream, a, b) into one well-mixed 64-bit key.
#[inline]
pub fn key(seed: u64, stream: u64, a: u64, b: u64) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    h = mix64(h ^ stream.wrapping_mul(GOLDEN));
    h = mix64(h ^ a.wrapping_mul(GOLDEN));
    mix64(h ^ b.wrapping_mul(GOLDEN))
}

/// Uniform in the open interval (0, 1) from a key. The half-offset keeps
/// both endpoints strictly excluded, which inverse-CDF samplers rely on.
#[inline]
pub fn uniform(k: u64) -> f64 {
    ((k >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in (0, 1) for the keyed tuple.
#[inline]
pub fn uniform_at(seed: u64, stream: u64, a: u64, b: u64) -> f64 {
    uniform(key(seed, stream, a, b))
}

/// The uniform deciding the edge test of the unordered pair {i, j}.
/// Symmetric in its arguments by ordering them internally.
#[inline]
pub fn pair_uniform(seed: u64, i: usize, j: usize) -> f64 {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    uniform_at(seed, stream::EDGE, lo as u64, hi as u64)
}

/// Derive a sub-seed, e.g. one per replica, from a master seed.
#[inline]
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    key(seed, stream, index, 0)
}

/// Sequential counter generator over a key; this is SplitMix64 started at
/// the key, used where a consumer needs a stream of variates (e.g. the
/// Poisson count sampler) rather than a single keyed draw.
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        CounterRng { state: key }
    }

    pub fn from_parts(seed: u64, stream: u64, a: u64, b: u64) -> Self {
        CounterRng::new(key(seed, stream, a, b))
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
