//! Picard iteration toward the fixed point, with per-step convergence
//! diagnostics and exponential-rate fitting.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::equation::{EquationError, EquationSpec};
use crate::grid::{distance, GridError, GridFunction, Metric};
use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("invalid solver option {name} = {value}")]
    InvalidOption { name: &'static str, value: f64 },
    #[error("equation hypothesis failed: {name} (to tolerance 1e-12)")]
    Hypothesis { name: &'static str },
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least {need} usable records after skipping, have {have}")]
    TooFewPoints { have: usize, need: usize },
    #[error("distance {value} at n = {n} is not positive; the iteration has hit the noise floor - reduce the number of fitted iterations")]
    NonPositiveDistance { n: f64, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub stop_metric: Metric,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            stop_metric: Metric::L2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StopReason {
    Tolerance,
    MaxIterations,
}

/// One Picard step: distances between consecutive iterates in all three
/// metrics, plus the wall-clock cost of the step (zero unless a clock is
/// injected, see [`solve_with_clock`]).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IterationRecord {
    pub n: usize,
    pub d_sup: f64,
    pub d_l2: f64,
    pub d_lip: f64,
    pub seconds: f64,
}

impl IterationRecord {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Sup => self.d_sup,
            Metric::L2 => self.d_l2,
            Metric::Lip => self.d_lip,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceHistory {
    pub records: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    /// Set when the certificate cannot guarantee contraction (c >= 1); the
    /// iteration still runs and may converge empirically.
    pub warning: Option<String>,
}

impl ConvergenceHistory {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// Least-squares exponential fit `d(n) ~ amplitude * exp(-rate * n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExpFit {
    pub amplitude: f64,
    pub rate: f64,
    /// Per-step factor `exp(-rate)`.
    pub ratio: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
}

/// Ordinary least-squares line through `(x, y)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Runs the Picard iteration `f_n = T f_{n-1}` until the distance between
/// consecutive iterates drops below `tol` in the stop metric or `max_iter`
/// steps have been taken. Every iterate stays admissible.
pub fn solve(
    spec: &EquationSpec,
    f0: &GridFunction,
    opts: &SolveOptions,
) -> Result<(GridFunction, ConvergenceHistory), SolveError> {
    solve_with_clock(spec, f0, opts, || 0.0)
}

/// [`solve`] with an injected monotonic clock (seconds) used to time each
/// operator application. The iterates do not depend on the clock.
pub fn solve_with_clock<C: FnMut() -> f64>(
    spec: &EquationSpec,
    f0: &GridFunction,
    opts: &SolveOptions,
    mut clock: C,
) -> Result<(GridFunction, ConvergenceHistory), SolveError> {
    if !(opts.tol > 0.0) {
        return Err(SolveError::InvalidOption {
            name: "tol",
            value: opts.tol,
        });
    }
    if opts.max_iter == 0 {
        return Err(SolveError::InvalidOption {
            name: "max_iter",
            value: 0.0,
        });
    }

    let report = spec.certify(f0.n_intervals())?;
    if let Some(name) = report.boundary.first_failure() {
        return Err(SolveError::Hypothesis { name });
    }
    let warning = (!report.guaranteed).then(|| {
        format!(
            "contraction constant c = {:.6} is not < 1; convergence is not guaranteed",
            report.contraction_constant
        )
    });

    let mut current = f0.clone();
    let mut records = Vec::new();
    let mut stop_reason = StopReason::MaxIterations;
    for n in 1..=opts.max_iter {
        let t0 = clock();
        let next = spec.apply(&current)?;
        let d_sup = distance(&next, &current, Metric::Sup)?;
        let d_l2 = distance(&next, &current, Metric::L2)?;
        let d_lip = distance(&next, &current, Metric::Lip)?;
        let seconds = clock() - t0;
        records.push(IterationRecord {
            n,
            d_sup,
            d_l2,
            d_lip,
            seconds,
        });
        current = next;
        if records[records.len() - 1].get(opts.stop_metric) < opts.tol {
            stop_reason = StopReason::Tolerance;
            break;
        }
    }

    Ok((
        current,
        ConvergenceHistory {
            records,
            stop_reason,
            warning,
        },
    ))
}

/// A-posteriori defect of `f`: the distance between `f` and `T f`.
pub fn residual(spec: &EquationSpec, f: &GridFunction, metric: Metric) -> Result<f64, SolveError> {
    Ok(distance(f, &spec.apply(f)?, metric)?)
}

/// Ordinary least-squares line through the given points.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<LineFit, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints {
            have: points.len(),
            need: 3,
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, y) in points {
        let e = y - (intercept + slope * x);
        ss_res += e * e;
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Least-squares line through `(n, log d)`; every distance must be positive.
pub fn fit_log_linear(points: &[(f64, f64)]) -> Result<ExpFit, FitError> {
    for &(n, d) in points {
        if !(d > 0.0) || !d.is_finite() {
            return Err(FitError::NonPositiveDistance { n, value: d });
        }
    }
    let logged: Vec<(f64, f64)> = points.iter().map(|&(n, d)| (n, math::ln(d))).collect();
    let line = linear_fit(&logged)?;
    Ok(ExpFit {
        amplitude: math::exp(line.intercept),
        rate: -line.slope,
        ratio: math::exp(line.slope),
        r_squared: line.r_squared,
    })
}

/// Fits the distances recorded in `history` (in the given metric) with an
/// exponential, skipping the first `skip_first` records as transients.
pub fn fit_exponential(
    history: &ConvergenceHistory,
    metric: Metric,
    skip_first: usize,
) -> Result<ExpFit, FitError> {
    let points: Vec<(f64, f64)> = history
        .records
        .iter()
        .skip(skip_first)
        .map(|r| (r.n as f64, r.get(metric)))
        .collect();
    if points.len() < 3 {
        return Err(FitError::TooFewPoints {
            have: points.len(),
            need: 3,
        });
    }
    fit_log_linear(&points)
}

/// Default number of leading records skipped when fitting (transients before
/// the asymptotic rate).
pub const DEFAULT_SKIP_FIRST: usize = 2;
