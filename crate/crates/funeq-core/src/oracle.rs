//! Seeded Monte-Carlo estimation of the fixed point via the absorbing chain
//! read off the equation: from state `x`, jump to `phi1(x)` with probability
//! `phi(x)`, else to `phi2(x)`. Any bounded solution of the equation is
//! harmonic for this chain, so the probability of absorption near 1 started
//! from `x` estimates `f(x)` with `f(0) = 0`, `f(1) = 1`.
//!
//! This is an engineering cross-check for the Picard solver, not a
//! definition of correctness: a spec admitting other bounded solutions could
//! legitimately disagree, and disagreement is reported rather than hidden.
//!
//! # Reproducibility
//!
//! Everything is driven by a published 64-bit scheme, so results are
//! bit-identical across runs, machines, and worker counts:
//!
//! * `mix64` is the splitmix64 finalizer, a bijection on `u64`:
//!   `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//!    z *= 0x94D049BB133111EB; z ^= z >> 31`.
//! * path `i` of a batch with base seed `s` uses the seed
//!   `path_seed(s, i) = mix64(s + (i + 1) * 0x9E3779B97F4A7C15)`
//!   (wrapping arithmetic), which is bijective in `i` for fixed `s`.
//! * each path draws from [`SplitMix64`] seeded with its own path seed;
//!   uniforms in [0, 1) take the top 53 bits of each output word.
//!
//! Batch results are pure functions of `(spec, x, samples, config)`: paths
//! can be partitioned across workers in any way as long as the counts are
//! summed, see [`simulate_block`].

use crate::equation::{EquationError, EquationSpec};
use crate::math;

/// Weyl-sequence increment of splitmix64.
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finalizer; bijective on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of path `index` from the batch seed.
pub fn path_seed(base_seed: u64, index: u64) -> u64 {
    mix64(base_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// splitmix64 sequence generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_unit(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ChainConfigError {
    #[error("absorption_eps = {0} must lie in (0, 0.5)")]
    BadEps(f64),
    #[error("max_steps must be at least 1")]
    BadMaxSteps,
}

/// Absorbing-chain simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    /// States closer than this to 0 or 1 count as absorbed.
    pub absorption_eps: f64,
    /// Steps after which a path is declared timed out.
    pub max_steps: usize,
    /// Batch seed; per-path seeds derive from it via [`path_seed`].
    pub base_seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            absorption_eps: 1e-9,
            max_steps: 10_000,
            base_seed: 0,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), ChainConfigError> {
        if !(self.absorption_eps > 0.0 && self.absorption_eps < 0.5) {
            return Err(ChainConfigError::BadEps(self.absorption_eps));
        }
        if self.max_steps == 0 {
            return Err(ChainConfigError::BadMaxSteps);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOutcome {
    AbsorbedOne,
    AbsorbedZero,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Config(#[from] ChainConfigError),
    #[error("need at least one sample")]
    NoSamples,
    #[error("phi({x}) = {value} is not a probability (tolerance 1e-9); the spec is not a valid probability weight")]
    InvalidProbability { x: f64, value: f64 },
    #[error("{timeouts} of {samples} paths timed out (> 10%); increase max_steps")]
    TooManyTimeouts { timeouts: u64, samples: u64 },
    #[error(transparent)]
    Equation(#[from] EquationError),
}

/// Simulates one path of the chain from `x0` with the given seed.
pub fn simulate_path(
    spec: &EquationSpec,
    x0: f64,
    cfg: &ChainConfig,
    path_seed: u64,
) -> Result<PathOutcome, OracleError> {
    const PROB_TOL: f64 = 1e-9;
    let mut rng = SplitMix64::new(path_seed);
    let mut x = x0;
    let mut steps = 0;
    loop {
        if x < cfg.absorption_eps {
            return Ok(PathOutcome::AbsorbedZero);
        }
        if x > 1.0 - cfg.absorption_eps {
            return Ok(PathOutcome::AbsorbedOne);
        }
        if steps == cfg.max_steps {
            return Ok(PathOutcome::Timeout);
        }
        let w = spec.phi(x)?;
        if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&w) {
            return Err(OracleError::InvalidProbability { x, value: w });
        }
        let w = w.clamp(0.0, 1.0);
        x = if rng.next_unit() < w {
            spec.phi1(x)?
        } else {
            spec.phi2(x)?
        };
        x = x.clamp(0.0, 1.0);
        steps += 1;
    }
}

/// Raw path counts; additive across any partition of the path indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleCounts {
    pub absorbed_one: u64,
    pub absorbed_zero: u64,
    pub timeouts: u64,
}

impl OracleCounts {
    pub fn merge(&mut self, other: OracleCounts) {
        self.absorbed_one += other.absorbed_one;
        self.absorbed_zero += other.absorbed_zero;
        self.timeouts += other.timeouts;
    }
}

/// Simulates the paths with indices in `range`, all started at `x`. Splitting
/// the full index range into blocks and merging the counts reproduces the
/// sequential result exactly.
pub fn simulate_block(
    spec: &EquationSpec,
    x: f64,
    cfg: &ChainConfig,
    range: core::ops::Range<u64>,
) -> Result<OracleCounts, OracleError> {
    let mut counts = OracleCounts::default();
    for i in range {
        match simulate_path(spec, x, cfg, path_seed(cfg.base_seed, i))? {
            PathOutcome::AbsorbedOne => counts.absorbed_one += 1,
            PathOutcome::AbsorbedZero => counts.absorbed_zero += 1,
            PathOutcome::Timeout => counts.timeouts += 1,
        }
    }
    Ok(counts)
}

/// Monte-Carlo estimate of the fixed-point value at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OracleEstimate {
    pub x: f64,
    /// Fraction of non-timed-out paths absorbed near 1.
    pub p_hat: f64,
    pub samples: u64,
    /// Normal-approximation 99% half-width.
    pub ci_halfwidth: f64,
    pub timeouts: u64,
}

/// Turns merged counts into an estimate; errors when more than 10% of the
/// paths timed out.
pub fn estimate_from_counts(
    x: f64,
    samples: u64,
    counts: OracleCounts,
) -> Result<OracleEstimate, OracleError> {
    if samples == 0 {
        return Err(OracleError::NoSamples);
    }
    if counts.timeouts * 10 > samples {
        return Err(OracleError::TooManyTimeouts {
            timeouts: counts.timeouts,
            samples,
        });
    }
    let effective = (samples - counts.timeouts) as f64;
    let p_hat = counts.absorbed_one as f64 / effective;
    // 99% two-sided normal quantile
    let ci_halfwidth = 2.576 * math::sqrt(p_hat * (1.0 - p_hat) / effective);
    Ok(OracleEstimate {
        x,
        p_hat,
        samples,
        ci_halfwidth,
        timeouts: counts.timeouts,
    })
}

/// Runs `samples` paths from `x` and aggregates them.
pub fn estimate(
    spec: &EquationSpec,
    x: f64,
    samples: u64,
    cfg: &ChainConfig,
) -> Result<OracleEstimate, OracleError> {
    cfg.validate()?;
    let counts = simulate_block(spec, x, cfg, 0..samples)?;
    estimate_from_counts(x, samples, counts)
}
