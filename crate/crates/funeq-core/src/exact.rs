//! The coefficient family with known solution `x^m`, used as ground truth
//! for measuring the true error of Picard iterates.
//!
//! With `phi1(x) = alpha*x + 1 - alpha` and `phi2(x) = beta*x`, the weight
//!
//! ```text
//! phi_m(x) = (1 - beta^m) x^m / ((alpha*x + 1 - alpha)^m - beta^m x^m)
//! ```
//!
//! makes `f(x) = x^m` an exact solution for any `m > 0` and any
//! `0 < alpha <= beta < 1`; the solution does not depend on `alpha`, `beta`.

use alloc::vec::Vec;

use crate::equation::{EquationError, EquationSpec};
use crate::grid::{distance, GridFunction, Metric};
use crate::math;
use crate::solver::SolveError;

/// Parameters of the exactly solvable family: `0 < alpha <= beta < 1`,
/// `m > 0` (non-integer exponents allowed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactFamilyParams {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
}

impl ExactFamilyParams {
    pub fn new(alpha: f64, beta: f64, m: f64) -> Result<Self, EquationError> {
        // full validation (including denominator sampling) happens in
        // EquationSpec::exact; run it here so invalid params never circulate
        EquationSpec::exact(alpha, beta, m)?;
        Ok(Self { alpha, beta, m })
    }
}

/// Builds the equation spec for the family.
pub fn build_spec(p: &ExactFamilyParams) -> Result<EquationSpec, EquationError> {
    EquationSpec::exact(p.alpha, p.beta, p.m)
}

/// The known solution `x^m` sampled on `grid_n` intervals (admissible:
/// `0^m = 0` and `1^m = 1` exactly for `m > 0`).
pub fn exact_solution(m: f64, grid_n: usize) -> Result<GridFunction, EquationError> {
    if !(m.is_finite() && m > 0.0) {
        return Err(EquationError::InvalidParameter { name: "m", value: m });
    }
    Ok(GridFunction::sample(grid_n, |x| math::pow(x, m))?)
}

/// Runs `iters` Picard steps from `f0` and records the distance of every
/// iterate (including `f0`) to the known solution, so entry `n` is the true
/// error of the n-th iterate.
pub fn true_error_series(
    p: &ExactFamilyParams,
    f0: &GridFunction,
    iters: usize,
    metric: Metric,
) -> Result<Vec<f64>, SolveError> {
    let spec = build_spec(p)?;
    let exact = exact_solution(p.m, f0.n_intervals())?;
    let mut series = Vec::with_capacity(iters + 1);
    let mut current = f0.clone();
    series.push(distance(&exact, &current, metric)?);
    for _ in 0..iters {
        current = spec.apply(&current)?;
        series.push(distance(&exact, &current, metric)?);
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ENDPOINT_TOL;
    use crate::solver::{fit_log_linear, residual};

    #[test]
    fn solution_grids() {
        let f = exact_solution(1.0, 64).unwrap();
        assert_eq!(f, GridFunction::identity(64));

        let f = exact_solution(4.0, 64).unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 0.0625);

        let f = exact_solution(7.5, 64).unwrap();
        assert!(f.is_admissible());
        assert!(exact_solution(0.0, 64).is_err());
    }

    #[test]
    fn fixed_point_identity_across_parameters() {
        for m in [1.0, 2.0, 4.0, 7.5] {
            for (alpha, beta) in [(0.3, 0.7), (0.1, 0.5)] {
                let p = ExactFamilyParams::new(alpha, beta, m).unwrap();
                let spec = build_spec(&p).unwrap();
                let f = exact_solution(m, 4096).unwrap();
                let r = residual(&spec, &f, Metric::Sup).unwrap();
                assert!(r <= 1e-6, "residual {r} for m = {m}, ({alpha}, {beta})");
            }
        }
    }

    #[test]
    fn boundary_hypotheses_hold() {
        for (alpha, beta, m) in [(0.3, 0.7, 4.0), (0.1, 0.5, 2.0), (0.5, 0.5, 7.5)] {
            let p = ExactFamilyParams::new(alpha, beta, m).unwrap();
            let report = build_spec(&p).unwrap().certify(1024).unwrap();
            assert!(report.boundary.all(), "({alpha}, {beta}, {m})");
            assert!(report.range_ok);
            assert!(report.phi_deviation_ok);
        }
    }

    #[test]
    fn starting_at_the_solution_stays_there() {
        let p = ExactFamilyParams::new(0.3, 0.7, 4.0).unwrap();
        let f0 = exact_solution(4.0, 4096).unwrap();
        let series = true_error_series(&p, &f0, 5, Metric::Sup).unwrap();
        assert_eq!(series.len(), 6);
        for e in series {
            assert!(e <= 1e-6, "error {e}");
        }
    }

    #[test]
    fn error_series_decreases_and_fits_exponential() {
        let p = ExactFamilyParams::new(0.3, 0.7, 4.0).unwrap();
        let f0 = GridFunction::identity(1024);
        let series = true_error_series(&p, &f0, 20, Metric::L2).unwrap();
        assert_eq!(series.len(), 21);
        for w in series.windows(2).skip(1) {
            assert!(w[1] < w[0], "error series not decreasing: {w:?}");
        }
        let points: Vec<(f64, f64)> = series
            .iter()
            .enumerate()
            .skip(2)
            .map(|(n, d)| (n as f64, *d))
            .collect();
        let fit = fit_log_linear(&points).unwrap();
        assert!(
            fit.ratio > 0.5 && fit.ratio < 0.9,
            "per-step ratio {}",
            fit.ratio
        );
    }

    #[test]
    fn solution_independent_of_alpha_beta() {
        // tol is chosen to dominate the O(h^2) interpolation bias of the
        // discrete fixed point, ~5e-6 for x^4 at n = 1024
        let m = 4.0;
        let opts = crate::solver::SolveOptions {
            tol: 1e-6,
            ..crate::solver::SolveOptions::default()
        };
        let f0 = GridFunction::identity(1024);
        let mut finals = Vec::new();
        for (alpha, beta) in [(0.3, 0.7), (0.1, 0.5)] {
            let spec = EquationSpec::exact(alpha, beta, m).unwrap();
            let (f, _) = crate::solver::solve(&spec, &f0, &opts).unwrap();
            finals.push(f);
        }
        let d = distance(&finals[0], &finals[1], Metric::Sup).unwrap();
        assert!(d <= 20.0 * opts.tol, "sup distance {d}");
        let truth = exact_solution(m, 1024).unwrap();
        for f in &finals {
            let d = distance(f, &truth, Metric::Sup).unwrap();
            assert!(d <= 20.0 * opts.tol, "distance to x^m: {d}");
        }
    }

    #[test]
    fn admissible_starts_converge_from_anywhere() {
        let p = ExactFamilyParams::new(0.3, 0.7, 2.0).unwrap();
        let f0 = GridFunction::sample(256, |x| math::sin(core::f64::consts::FRAC_PI_2 * x))
            .unwrap()
            .into_admissible(ENDPOINT_TOL)
            .unwrap();
        let series = true_error_series(&p, &f0, 40, Metric::Sup).unwrap();
        assert!(series[40] < 1e-4, "final error {}", series[40]);
    }
}
