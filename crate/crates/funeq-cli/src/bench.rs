//! Cost contrast between naive recursive evaluation of the n-th iterate and
//! grid-based Picard iteration.
//!
//! The naive route expands `F_n(x) = phi(x) F_{n-1}(phi1(x)) + (1 - phi(x))
//! F_{n-1}(phi2(x))` all the way down to the initial expression, evaluating
//! it at exactly `2^n` leaves, so its cost doubles per level. The grid route
//! costs one sweep per iteration and grows linearly in n.

use std::time::Instant;

use funeq_core::{EquationSpec, ExprAst, GridFunction};
use serde::Serialize;

use crate::CliError;

/// Hard cap on recursion depth: 2^26 leaf evaluations at most.
pub const MAX_DEPTH: u32 = 26;

const TIMING_REPS: u32 = 3;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BenchRow {
    pub n: u32,
    pub leaf_count: u64,
    pub seconds: f64,
    pub grid_seconds: f64,
}

fn eval_recursive(
    spec: &EquationSpec,
    init: &ExprAst,
    x: f64,
    depth: u32,
    leaves: &mut u64,
) -> Result<f64, CliError> {
    if depth == 0 {
        *leaves += 1;
        return init
            .eval(x)
            .map_err(|e| CliError::numerical(format!("init expression: {e}")));
    }
    let w = spec.phi(x).map_err(|e| CliError::numerical(e.to_string()))?;
    let y1 = spec
        .phi1(x)
        .map_err(|e| CliError::numerical(e.to_string()))?
        .clamp(0.0, 1.0);
    let y2 = spec
        .phi2(x)
        .map_err(|e| CliError::numerical(e.to_string()))?
        .clamp(0.0, 1.0);
    Ok(w * eval_recursive(spec, init, y1, depth - 1, leaves)?
        + (1.0 - w) * eval_recursive(spec, init, y2, depth - 1, leaves)?)
}

/// Times the naive recursion at `x0 = 0.5` and the grid iteration from `f0`
/// for each depth `1..=max_depth`; each timing is the best of three runs.
pub fn run(
    spec: &EquationSpec,
    init: &ExprAst,
    f0: &GridFunction,
    max_depth: u32,
) -> Result<Vec<BenchRow>, CliError> {
    if max_depth == 0 || max_depth > MAX_DEPTH {
        return Err(CliError::input(format!(
            "max depth must lie in 1..={MAX_DEPTH}, got {max_depth}"
        )));
    }
    let mut rows = Vec::with_capacity(max_depth as usize);
    for n in 1..=max_depth {
        let mut seconds = f64::INFINITY;
        let mut leaf_count = 0;
        for _ in 0..TIMING_REPS {
            let mut leaves = 0u64;
            let t = Instant::now();
            let value = eval_recursive(spec, init, 0.5, n, &mut leaves)?;
            seconds = seconds.min(t.elapsed().as_secs_f64());
            std::hint::black_box(value);
            leaf_count = leaves;
        }

        let mut grid_seconds = f64::INFINITY;
        for _ in 0..TIMING_REPS {
            let t = Instant::now();
            let mut f = f0.clone();
            for _ in 0..n {
                f = spec
                    .apply(&f)
                    .map_err(|e| CliError::numerical(e.to_string()))?;
            }
            grid_seconds = grid_seconds.min(t.elapsed().as_secs_f64());
            std::hint::black_box(f);
        }

        rows.push(BenchRow {
            n,
            leaf_count,
            seconds,
            grid_seconds,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use funeq_core::expr::parse;

    #[test]
    fn leaf_count_doubles_per_level() {
        let spec = EquationSpec::paradise(0.1, 0.5).unwrap();
        let init = parse("x").unwrap();
        let rows = run(&spec, &init, &GridFunction::identity(64), 10).unwrap();
        assert_eq!(rows.len(), 10);
        for row in rows {
            assert_eq!(row.leaf_count, 1u64 << row.n);
        }
    }

    #[test]
    fn recursion_agrees_with_grid_iteration() {
        let spec = EquationSpec::paradise(0.1, 0.5).unwrap();
        let init = parse("x").unwrap();
        let mut leaves = 0;
        let naive = eval_recursive(&spec, &init, 0.5, 4, &mut leaves).unwrap();
        // the grid iterate interpolates, so agreement is to grid accuracy
        let mut f = GridFunction::identity(4096);
        for _ in 0..4 {
            f = spec.apply(&f).unwrap();
        }
        assert!((naive - f.eval(0.5).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn depth_guard() {
        let spec = EquationSpec::paradise(0.1, 0.5).unwrap();
        let init = parse("x").unwrap();
        let f0 = GridFunction::identity(64);
        assert!(run(&spec, &init, &f0, MAX_DEPTH + 1).is_err());
        assert!(run(&spec, &init, &f0, 0).is_err());
    }
}
