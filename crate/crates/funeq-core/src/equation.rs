//! The equation right-hand side as an operator on grid functions, plus the
//! contraction certificate derived from the coefficient norms.
//!
//! An [`EquationSpec`] is the coefficient triple `(phi, phi1, phi2)` of
//!
//! ```text
//! f(x) = phi(x) * f(phi1(x)) + (1 - phi(x)) * f(phi2(x))
//! ```
//!
//! with the hypotheses `phi(0) = 0`, `phi(1) = 1`, `phi1(1) = 1`,
//! `phi2(0) = 0`, and `phi1, phi2 : [0, 1] -> [0, 1]`. Two parametric
//! families are built in:
//!
//! * `paradise(alpha, beta)`: `phi(x) = x`, `phi1(x) = alpha*x + 1 - alpha`,
//!   `phi2(x) = beta*x` - the two-choice reinforcement-learning model;
//! * `exact(alpha, beta, m)`: `phi1`, `phi2` as above with the weight chosen
//!   so that `x^m` solves the equation exactly (see [`crate::exact`]).
//!
//! Custom coefficient triples come from parsed [`ExprAst`] expressions.

use alloc::vec::Vec;

use crate::expr::{EvalError, ExprAst};
use crate::grid::{GridError, GridFunction, ENDPOINT_TOL};
use crate::math;

/// Tolerance band for `phi1`/`phi2` values outside [0, 1]; values inside the
/// band are clamped, values beyond it abort.
pub const RANGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum FamilyTag {
    Paradise,
    Exact,
    Custom,
}

/// Which coefficient function an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficient {
    Phi,
    Phi1,
    Phi2,
}

impl core::fmt::Display for Coefficient {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Coefficient::Phi => "phi",
            Coefficient::Phi1 => "phi1",
            Coefficient::Phi2 => "phi2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquationError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("{coeff} failed to evaluate at x = {x}: {source}")]
    CoefficientEval {
        coeff: Coefficient,
        x: f64,
        source: EvalError,
    },
    #[error("{coeff}({x}) = {value} leaves [0, 1] beyond the {RANGE_TOL} tolerance (node {node})")]
    CoefficientRange {
        coeff: Coefficient,
        node: usize,
        x: f64,
        value: f64,
    },
    #[error("input grid function is not admissible: endpoints ({start}, {end})")]
    InputNotAdmissible { start: f64, end: f64 },
    #[error("operator output drifted to {value} at x = {x}; the spec violates a boundary hypothesis")]
    EndpointDrift { x: f64, value: f64 },
    #[error("exact-family denominator is {value} <= 0 at x = {x}")]
    DenominatorVanishes { x: f64, value: f64 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Coefficient norms known in closed form for the built-in families.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnalyticNorms {
    pub norm_phi: Option<f64>,
    pub norm_phi1: Option<f64>,
    pub norm_phi2: Option<f64>,
    pub phi1_at_0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NormSource {
    Analytic,
    GridEstimate,
}

/// A norm (or point value) together with how it was obtained. Grid estimates
/// are lower bounds: the certificate is heuristic when any appears.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormValue {
    pub value: f64,
    pub source: NormSource,
}

impl NormValue {
    fn analytic(value: f64) -> Self {
        Self {
            value,
            source: NormSource::Analytic,
        }
    }

    fn estimate(value: f64) -> Self {
        Self {
            value,
            source: NormSource::GridEstimate,
        }
    }
}

/// Boundary hypotheses checked to tolerance 1e-12.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundaryChecks {
    pub phi_at_0: bool,
    pub phi_at_1: bool,
    pub phi1_at_1: bool,
    pub phi2_at_0: bool,
}

impl BoundaryChecks {
    pub fn all(&self) -> bool {
        self.phi_at_0 && self.phi_at_1 && self.phi1_at_1 && self.phi2_at_0
    }

    /// Name of the first failed check, if any.
    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.phi_at_0 {
            Some("phi(0) = 0")
        } else if !self.phi_at_1 {
            Some("phi(1) = 1")
        } else if !self.phi1_at_1 {
            Some("phi1(1) = 1")
        } else if !self.phi2_at_0 {
            Some("phi2(0) = 0")
        } else {
            None
        }
    }
}

/// Result of [`EquationSpec::certify`]: hypothesis checks, coefficient norms,
/// and the contraction constant `c = 2*|phi|*(|phi1| - phi1(0) + |phi2|)`.
/// The fixed point is unique and Picard iteration converges when `c < 1`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ContractionReport {
    pub boundary: BoundaryChecks,
    pub range_ok: bool,
    pub norm_phi: NormValue,
    pub norm_phi1: NormValue,
    pub norm_phi2: NormValue,
    pub phi1_at_0: NormValue,
    pub contraction_constant: f64,
    pub operator_norm_bound: f64,
    pub guaranteed: bool,
    /// Sampled check of `|phi(x) - 1| <= |phi|` (holds whenever `phi` is
    /// admissible).
    pub phi_deviation_ok: bool,
}

impl ContractionReport {
    /// Whether the operator hypotheses (boundary values, ranges, sampled
    /// norm inequality) all hold.
    pub fn hypotheses_ok(&self) -> bool {
        self.boundary.all() && self.range_ok && self.phi_deviation_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Paradise {
        alpha: f64,
        beta: f64,
    },
    Exact {
        alpha: f64,
        beta: f64,
        m: f64,
    },
    Custom {
        phi: ExprAst,
        phi1: ExprAst,
        phi2: ExprAst,
    },
}

/// The coefficient triple `(phi, phi1, phi2)` as evaluable functions.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSpec {
    repr: Repr,
}

fn check_open_unit(name: &'static str, v: f64) -> Result<(), EquationError> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(EquationError::InvalidParameter { name, value: v })
    }
}

impl EquationSpec {
    /// `phi(x) = x`, `phi1(x) = alpha*x + 1 - alpha`, `phi2(x) = beta*x`
    /// with `0 < alpha, beta < 1`.
    pub fn paradise(alpha: f64, beta: f64) -> Result<Self, EquationError> {
        check_open_unit("alpha", alpha)?;
        check_open_unit("beta", beta)?;
        Ok(Self {
            repr: Repr::Paradise { alpha, beta },
        })
    }

    /// The family whose exact solution is `x^m`:
    /// `phi(x) = (1 - beta^m) x^m / ((alpha*x + 1 - alpha)^m - beta^m x^m)`
    /// with `0 < alpha <= beta < 1` and `m > 0`. The denominator is verified
    /// positive by sampling.
    pub fn exact(alpha: f64, beta: f64, m: f64) -> Result<Self, EquationError> {
        check_open_unit("alpha", alpha)?;
        check_open_unit("beta", beta)?;
        if alpha > beta {
            return Err(EquationError::InvalidParameter {
                name: "alpha (must be <= beta)",
                value: alpha,
            });
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(EquationError::InvalidParameter { name: "m", value: m });
        }
        let spec = Self {
            repr: Repr::Exact { alpha, beta, m },
        };
        const DENOM_SAMPLES: usize = 4096;
        let beta_m = math::pow(beta, m);
        for i in 0..=DENOM_SAMPLES {
            let x = i as f64 / DENOM_SAMPLES as f64;
            let den = math::pow(alpha * x + (1.0 - alpha), m) - beta_m * math::pow(x, m);
            if !(den > 0.0) {
                return Err(EquationError::DenominatorVanishes { x, value: den });
            }
        }
        Ok(spec)
    }

    /// A custom coefficient triple from parsed expressions of `x`.
    pub fn custom(phi: ExprAst, phi1: ExprAst, phi2: ExprAst) -> Self {
        Self {
            repr: Repr::Custom { phi, phi1, phi2 },
        }
    }

    pub fn family(&self) -> FamilyTag {
        match self.repr {
            Repr::Paradise { .. } => FamilyTag::Paradise,
            Repr::Exact { .. } => FamilyTag::Exact,
            Repr::Custom { .. } => FamilyTag::Custom,
        }
    }

    /// The weight coefficient `phi(x)`.
    pub fn phi(&self, x: f64) -> Result<f64, EquationError> {
        match &self.repr {
            Repr::Paradise { .. } => Ok(x),
            Repr::Exact { alpha, beta, m } => {
                if x == 0.0 {
                    // numerator has a zero of order m, denominator is positive
                    return Ok(0.0);
                }
                let beta_m = math::pow(*beta, *m);
                let num = (1.0 - beta_m) * math::pow(x, *m);
                let den = math::pow(alpha * x + (1.0 - alpha), *m) - beta_m * math::pow(x, *m);
                Ok(num / den)
            }
            Repr::Custom { phi, .. } => eval_coeff(phi, Coefficient::Phi, x),
        }
    }

    /// The inner map `phi1(x)` (fixes 1 under the hypotheses).
    pub fn phi1(&self, x: f64) -> Result<f64, EquationError> {
        match &self.repr {
            Repr::Paradise { alpha, .. } | Repr::Exact { alpha, .. } => {
                Ok(alpha * x + (1.0 - alpha))
            }
            Repr::Custom { phi1, .. } => eval_coeff(phi1, Coefficient::Phi1, x),
        }
    }

    /// The inner map `phi2(x)` (fixes 0 under the hypotheses).
    pub fn phi2(&self, x: f64) -> Result<f64, EquationError> {
        match &self.repr {
            Repr::Paradise { beta, .. } | Repr::Exact { beta, .. } => Ok(beta * x),
            Repr::Custom { phi2, .. } => eval_coeff(phi2, Coefficient::Phi2, x),
        }
    }

    /// Coefficient norms known in closed form.
    ///
    /// For the linear inner maps, `|phi1| = |1 - alpha| + alpha = 1` and
    /// `|phi2| = beta`; the paradise weight `phi(x) = x` has norm 1. The
    /// exact-family weight has no elementary norm and is estimated on the
    /// grid instead.
    pub fn analytic_norms(&self) -> AnalyticNorms {
        match self.repr {
            Repr::Paradise { alpha, beta } => AnalyticNorms {
                norm_phi: Some(1.0),
                norm_phi1: Some(1.0),
                norm_phi2: Some(beta),
                phi1_at_0: Some(1.0 - alpha),
            },
            Repr::Exact { alpha, beta, .. } => AnalyticNorms {
                norm_phi: None,
                norm_phi1: Some(1.0),
                norm_phi2: Some(beta),
                phi1_at_0: Some(1.0 - alpha),
            },
            Repr::Custom { .. } => AnalyticNorms::default(),
        }
    }

    /// Boundary hypotheses to tolerance 1e-12.
    pub fn boundary_checks(&self) -> Result<BoundaryChecks, EquationError> {
        Ok(BoundaryChecks {
            phi_at_0: math::abs(self.phi(0.0)?) <= ENDPOINT_TOL,
            phi_at_1: math::abs(self.phi(1.0)? - 1.0) <= ENDPOINT_TOL,
            phi1_at_1: math::abs(self.phi1(1.0)? - 1.0) <= ENDPOINT_TOL,
            phi2_at_0: math::abs(self.phi2(0.0)?) <= ENDPOINT_TOL,
        })
    }

    /// Applies the operator `Tf(x) = phi(x) f(phi1(x)) + (1 - phi(x)) f(phi2(x))`
    /// node by node, snapping the endpoints back to exactly (0, 1).
    ///
    /// `f` must be admissible; `phi1(x_i)`, `phi2(x_i)` must stay within
    /// [`RANGE_TOL`] of [0, 1]; endpoint values further than 1e-12 from (0, 1)
    /// abort, since they indicate a violated boundary hypothesis.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction, EquationError> {
        if !f.is_admissible() {
            let values = f.values();
            return Err(EquationError::InputNotAdmissible {
                start: values[0],
                end: values[values.len() - 1],
            });
        }
        let n = f.n_intervals();
        let n_f = n as f64;
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let x = i as f64 / n_f;
            let weight = self.phi(x)?;
            let y1 = clamp_unit(self.phi1(x)?, Coefficient::Phi1, i, x)?;
            let y2 = clamp_unit(self.phi2(x)?, Coefficient::Phi2, i, x)?;
            out.push(weight * f.eval(y1)? + (1.0 - weight) * f.eval(y2)?);
        }
        if math::abs(out[0]) > ENDPOINT_TOL {
            return Err(EquationError::EndpointDrift { x: 0.0, value: out[0] });
        }
        if math::abs(out[n] - 1.0) > ENDPOINT_TOL {
            return Err(EquationError::EndpointDrift { x: 1.0, value: out[n] });
        }
        out[0] = 0.0;
        out[n] = 1.0;
        Ok(GridFunction::new(out)?)
    }

    /// Builds the contraction certificate on a grid of `grid_n` intervals.
    ///
    /// Analytic norms are used where available; the rest are grid estimates
    /// (lower bounds, flagged as such - the certificate is then heuristic).
    pub fn certify(&self, grid_n: usize) -> Result<ContractionReport, EquationError> {
        if grid_n < 2 {
            return Err(EquationError::InvalidParameter {
                name: "grid_n",
                value: grid_n as f64,
            });
        }
        let boundary = self.boundary_checks()?;

        let n_f = grid_n as f64;
        let mut range_ok = true;
        let mut phi_values = Vec::with_capacity(grid_n + 1);
        let mut est_phi: f64 = 0.0;
        let mut est_phi1: f64 = 0.0;
        let mut est_phi2: f64 = 0.0;
        let mut prev: Option<(f64, f64, f64)> = None;
        for i in 0..=grid_n {
            let x = i as f64 / n_f;
            let p = self.phi(x)?;
            let p1 = self.phi1(x)?;
            let p2 = self.phi2(x)?;
            let unit = -RANGE_TOL..=1.0 + RANGE_TOL;
            if !unit.contains(&p1) || !unit.contains(&p2) {
                range_ok = false;
            }
            if let Some((q, q1, q2)) = prev {
                est_phi = est_phi.max(math::abs(p - q) * n_f);
                est_phi1 = est_phi1.max(math::abs(p1 - q1) * n_f);
                est_phi2 = est_phi2.max(math::abs(p2 - q2) * n_f);
            }
            prev = Some((p, p1, p2));
            phi_values.push(p);
        }

        let analytic = self.analytic_norms();
        let norm_phi = match analytic.norm_phi {
            Some(v) => NormValue::analytic(v),
            None => NormValue::estimate(math::abs(phi_values[0]) + est_phi),
        };
        let norm_phi1 = match analytic.norm_phi1 {
            Some(v) => NormValue::analytic(v),
            None => NormValue::estimate(math::abs(self.phi1(0.0)?) + est_phi1),
        };
        let norm_phi2 = match analytic.norm_phi2 {
            Some(v) => NormValue::analytic(v),
            None => NormValue::estimate(math::abs(self.phi2(0.0)?) + est_phi2),
        };
        // a point value, not a supremum: exact for every family
        let phi1_at_0 = match analytic.phi1_at_0 {
            Some(v) => NormValue::analytic(v),
            None => NormValue::analytic(self.phi1(0.0)?),
        };

        let contraction_constant =
            2.0 * norm_phi.value * (norm_phi1.value - phi1_at_0.value + norm_phi2.value);
        let operator_norm_bound = 2.0 * norm_phi.value * (norm_phi1.value + norm_phi2.value)
            - norm_phi.value * phi1_at_0.value;

        let max_dev = phi_values
            .iter()
            .map(|p| math::abs(p - 1.0))
            .fold(0.0, f64::max);
        let phi_deviation_ok = max_dev <= norm_phi.value + 1e-9;

        Ok(ContractionReport {
            boundary,
            range_ok,
            norm_phi,
            norm_phi1,
            norm_phi2,
            phi1_at_0,
            contraction_constant,
            operator_norm_bound,
            guaranteed: contraction_constant < 1.0,
            phi_deviation_ok,
        })
    }
}

fn eval_coeff(ast: &ExprAst, coeff: Coefficient, x: f64) -> Result<f64, EquationError> {
    ast.eval(x)
        .map_err(|source| EquationError::CoefficientEval { coeff, x, source })
}

fn clamp_unit(v: f64, coeff: Coefficient, node: usize, x: f64) -> Result<f64, EquationError> {
    if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&v) {
        return Err(EquationError::CoefficientRange {
            coeff,
            node,
            x,
            value: v,
        });
    }
    Ok(v.clamp(0.0, 1.0))
}
