//! Multi-threaded oracle batches.
//!
//! Paths are partitioned into contiguous index blocks, one per worker; each
//! path derives its seed from its index alone, and the integer counts merge
//! associatively, so the result is bit-identical to the sequential run for
//! every worker count.

use funeq_core::oracle::{self, ChainConfig, OracleCounts, OracleError, OracleEstimate};
use funeq_core::EquationSpec;

/// [`oracle::estimate`] across `threads` workers.
pub fn estimate_parallel(
    spec: &EquationSpec,
    x: f64,
    samples: u64,
    cfg: &ChainConfig,
    threads: usize,
) -> Result<OracleEstimate, OracleError> {
    cfg.validate()?;
    let threads = threads.clamp(1, samples.clamp(1, 256) as usize);
    if threads == 1 {
        return oracle::estimate(spec, x, samples, cfg);
    }

    let per = samples / threads as u64;
    let extra = samples % threads as u64;
    let mut ranges = Vec::with_capacity(threads);
    let mut start = 0u64;
    for t in 0..threads as u64 {
        let len = per + u64::from(t < extra);
        ranges.push(start..start + len);
        start += len;
    }

    let results: Vec<Result<OracleCounts, OracleError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|range| scope.spawn(move || oracle::simulate_block(spec, x, cfg, range)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("oracle worker panicked"))
            .collect()
    });

    let mut counts = OracleCounts::default();
    for r in results {
        counts.merge(r?);
    }
    oracle::estimate_from_counts(x, samples, counts)
}
