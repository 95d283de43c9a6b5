//! Piecewise-linear functions on a uniform grid over [0, 1].
//!
//! A [`GridFunction`] stores node values at `x_i = i / N` and evaluates
//! between nodes by linear interpolation. Piecewise-linear functions are
//! themselves Lipschitz, and interpolating a Lipschitz function at the nodes
//! never increases its Lipschitz constant, so norm inequalities proved for
//! the continuous problem remain literally true at grid level.

use alloc::vec::Vec;

use crate::math;

/// Default number of grid intervals.
pub const DEFAULT_GRID: usize = 2048;

/// Tolerance for snapping endpoint values to exactly 0 and 1.
pub const ENDPOINT_TOL: f64 = 1e-12;

/// Distance used to compare two grid functions.
///
/// `Lip` is the norm distance `|d(0)| + sup |d(x) - d(y)| / |x - y|` of the
/// difference `d = f - g`; `Sup` is the uniform distance; `L2` is the
/// mean-square distance by composite trapezoid quadrature on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Metric {
    Sup,
    L2,
    Lip,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("a grid needs at least 3 node values (2 intervals), got {nodes}")]
    TooCoarse { nodes: usize },
    #[error("non-finite node value at index {index}")]
    NonFinite { index: usize },
    #[error("evaluation point {x} lies outside [0, 1]")]
    OutOfDomain { x: f64 },
    #[error("grid shape mismatch: {left} vs {right} intervals")]
    ShapeMismatch { left: usize, right: usize },
    #[error("endpoint values ({start}, {end}) are too far from (0, 1) to snap")]
    NotAdmissible { start: f64, end: f64 },
}

/// A function on [0, 1] represented by its values on the uniform grid
/// `x_i = i / N` and linear interpolation in between.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// Wraps `values[i] = f(i / N)` where `N = values.len() - 1`.
    pub fn new(values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() < 3 {
            return Err(GridError::TooCoarse { nodes: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite { index });
        }
        Ok(Self { values })
    }

    /// Samples `f` at the `n + 1` grid nodes.
    pub fn sample<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<Self, GridError> {
        let n_f = n as f64;
        Self::new((0..=n).map(|i| f(i as f64 / n_f)).collect())
    }

    /// The identity function on `n` intervals.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 2, "identity grid needs at least 2 intervals");
        let n_f = n as f64;
        Self {
            values: (0..=n).map(|i| i as f64 / n_f).collect(),
        }
    }

    pub fn n_intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The i-th grid node `i / N`.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.n_intervals() as f64
    }

    /// Evaluates at `x`: exact node value at grid nodes, linear interpolation
    /// between adjacent nodes otherwise.
    pub fn eval(&self, x: f64) -> Result<f64, GridError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(GridError::OutOfDomain { x });
        }
        let n = self.n_intervals();
        let n_f = n as f64;
        let t = x * n_f;
        let nearest = (math::round(t) as usize).min(n);
        if x == nearest as f64 / n_f {
            return Ok(self.values[nearest]);
        }
        let i = (math::floor(t) as usize).min(n - 1);
        let u = t - i as f64;
        Ok(self.values[i] + u * (self.values[i + 1] - self.values[i]))
    }

    /// The Lipschitz-space norm `|f(0)| + sup |f(x) - f(y)| / |x - y|`.
    ///
    /// For a piecewise-linear function the supremum quotient is attained on
    /// an adjacent node pair, so the maximum adjacent slope is the exact
    /// Lipschitz constant.
    pub fn lipschitz_norm(&self) -> f64 {
        let n_f = self.n_intervals() as f64;
        let max_slope = self
            .values
            .windows(2)
            .map(|w| math::abs(w[1] - w[0]) * n_f)
            .fold(0.0, f64::max);
        math::abs(self.values[0]) + max_slope
    }

    /// Whether the endpoint values are exactly 0 and 1.
    pub fn is_admissible(&self) -> bool {
        self.values[0] == 0.0 && self.values[self.values.len() - 1] == 1.0
    }

    /// Snaps endpoint values within `tol` of (0, 1) to exactly (0, 1); errors
    /// when they drift further than that.
    pub fn into_admissible(mut self, tol: f64) -> Result<Self, GridError> {
        let last = self.values.len() - 1;
        let start = self.values[0];
        let end = self.values[last];
        if math::abs(start) > tol || math::abs(end - 1.0) > tol {
            return Err(GridError::NotAdmissible { start, end });
        }
        self.values[0] = 0.0;
        self.values[last] = 1.0;
        Ok(self)
    }
}

/// Distance between two grid functions sharing the same grid.
pub fn distance(f: &GridFunction, g: &GridFunction, metric: Metric) -> Result<f64, GridError> {
    if f.n_intervals() != g.n_intervals() {
        return Err(GridError::ShapeMismatch {
            left: f.n_intervals(),
            right: g.n_intervals(),
        });
    }
    let fv = f.values();
    let gv = g.values();
    Ok(match metric {
        Metric::Sup => fv
            .iter()
            .zip(gv)
            .map(|(a, b)| math::abs(a - b))
            .fold(0.0, f64::max),
        Metric::L2 => {
            let n = f.n_intervals();
            let h = 1.0 / n as f64;
            let sq = |i: usize| {
                let d = fv[i] - gv[i];
                d * d
            };
            let mut acc = 0.5 * (sq(0) + sq(n));
            for i in 1..n {
                acc += sq(i);
            }
            math::sqrt(acc * h)
        }
        Metric::Lip => {
            let n_f = f.n_intervals() as f64;
            let max_slope = fv
                .windows(2)
                .zip(gv.windows(2))
                .map(|(a, b)| math::abs((a[1] - b[1]) - (a[0] - b[0])) * n_f)
                .fold(0.0, f64::max);
            math::abs(fv[0] - gv[0]) + max_slope
        }
    })
}

/// Composite trapezoid quadrature of `f` over [0, 1] with `n` intervals.
pub fn trapezoid<F: Fn(f64) -> f64>(n: usize, f: F) -> f64 {
    assert!(n >= 1, "trapezoid rule needs at least one interval");
    let h = 1.0 / n as f64;
    let mut acc = 0.5 * (f(0.0) + f(1.0));
    for i in 1..n {
        acc += f(i as f64 * h);
    }
    acc * h
}
