//! Quadratic approximation of the fixed point for the linear-coefficient
//! family `phi(x) = x`, `phi1(x) = alpha*x + 1 - alpha`, `phi2(x) = beta*x`.
//!
//! The one-parameter family `q_b(x) = x (x + b) / (1 + b)` contains every
//! quadratic with `q(0) = 0` and `q(1) = 1`. The closed-form parameter
//!
//! ```text
//! b_c = -((2 - alpha)^2 + beta^2 - 2) / (2 (beta - alpha))
//! ```
//!
//! minimizes the majorant `P(b)` of the squared L2 defect and gives an
//! increasing concave approximation whenever `alpha^2 + (beta - 2)^2 >= 2`
//! (equivalently `b_c <= -2`). A numerically optimal `b` minimizing the true
//! L2 defect is available for comparison; the two are nearly identical.

use crate::grid::trapezoid;
use crate::math;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ApproxError {
    #[error("invalid parameter {name} = {value} (need 0 < alpha < beta < 1)")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("alpha = beta = {alpha} makes the closed form singular; in that limit the equation is solved exactly by the identity f(x) = x, no quadratic is needed")]
    EqualParameters { alpha: f64 },
    #[error("alpha = {alpha} must be smaller than beta = {beta}")]
    ParameterOrder { alpha: f64, beta: f64 },
    #[error("quadratic parameter b = -1 is singular")]
    SingularParameter,
    #[error("residue formulas need b < -1, got b = {b}")]
    DomainB { b: f64 },
    #[error("evaluation point {x} lies outside [0, 1]")]
    OutOfDomain { x: f64 },
    #[error("objective not unimodal on [{lo}, {hi}]: values ({f_lo}, {f_mid}, {f_hi}) at (lo, mid, hi) after bracket expansion")]
    NotUnimodal {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_mid: f64,
        f_hi: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ApproxKind {
    SuboptimalClosedForm,
    NumericOptimal,
}

/// A quadratic `x (x + b) / (1 + b)` interpolating (0, 0) and (1, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QuadraticApprox {
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kind: ApproxKind,
    /// Increasing and concave on [0, 1]; true exactly when `b <= -2`.
    pub admissible: bool,
}

impl QuadraticApprox {
    pub fn eval(&self, x: f64) -> Result<f64, ApproxError> {
        quadratic_eval(self.b, x)
    }
}

/// L2 defect of a quadratic, true (by quadrature) and estimated (majorant).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ResidueReport {
    /// Quadrature of the actual defect `q - Tq`.
    pub l2_residue_true: f64,
    /// `sqrt(P(b))`: the majorant with the `1/(-b-1)` factor dropped.
    pub l2_residue_estimate: f64,
    /// Closed form of the estimate at the critical point:
    /// `(beta^2 - alpha^2) / sqrt(840)`.
    pub analytic_at_bc: f64,
    /// `(2 - sqrt(2))^2 / (2 sqrt(210))`, the estimate's bound over the whole
    /// admissible parameter region.
    pub global_bound: f64,
}

fn check_params(alpha: f64, beta: f64) -> Result<(), ApproxError> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !(v.is_finite() && v > 0.0 && v < 1.0) {
            return Err(ApproxError::InvalidParameter { name, value: v });
        }
    }
    if alpha == beta {
        return Err(ApproxError::EqualParameters { alpha });
    }
    if alpha > beta {
        return Err(ApproxError::ParameterOrder { alpha, beta });
    }
    Ok(())
}

/// The critical parameter `b_c = -((2 - alpha)^2 + beta^2 - 2) / (2 (beta - alpha))`.
pub fn critical_b(alpha: f64, beta: f64) -> f64 {
    -((2.0 - alpha) * (2.0 - alpha) + beta * beta - 2.0) / (2.0 * (beta - alpha))
}

/// Whether `(alpha, beta)` lies in the region `alpha^2 + (beta - 2)^2 >= 2`
/// where the closed-form quadratic is increasing and concave.
pub fn region_admissible(alpha: f64, beta: f64) -> bool {
    alpha * alpha + (beta - 2.0) * (beta - 2.0) >= 2.0
}

/// The closed-form suboptimal quadratic. Outside the admissible region the
/// parameter is still returned, flagged inadmissible: shape guarantees are
/// then void.
pub fn suboptimal_b(alpha: f64, beta: f64) -> Result<QuadraticApprox, ApproxError> {
    check_params(alpha, beta)?;
    Ok(QuadraticApprox {
        b: critical_b(alpha, beta),
        alpha,
        beta,
        kind: ApproxKind::SuboptimalClosedForm,
        admissible: region_admissible(alpha, beta),
    })
}

/// Evaluates `x (x + b) / (1 + b)`.
pub fn quadratic_eval(b: f64, x: f64) -> Result<f64, ApproxError> {
    if b == -1.0 {
        return Err(ApproxError::SingularParameter);
    }
    Ok(x * (x + b) / (1.0 + b))
}

/// The constant part of the defect: `K = 1 - (2 + b) alpha + alpha^2 + b beta`.
fn defect_constant(alpha: f64, beta: f64, b: f64) -> f64 {
    1.0 - (2.0 + b) * alpha + alpha * alpha + b * beta
}

fn residue_signed_unchecked(alpha: f64, beta: f64, b: f64, x: f64) -> f64 {
    let u = beta * beta - alpha * alpha;
    let k = defect_constant(alpha, beta, b);
    x * (1.0 - x) * (u * x + k) / (-b - 1.0)
}

/// The signed defect `q_b(x) - [x q_b(alpha x + 1 - alpha) + (1 - x) q_b(beta x)]`
/// in closed form: `x (1 - x) ((beta^2 - alpha^2) x + K) / (-b - 1)`.
pub fn residue_pointwise(alpha: f64, beta: f64, b: f64, x: f64) -> Result<f64, ApproxError> {
    if !(b < -1.0) {
        return Err(ApproxError::DomainB { b });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(ApproxError::OutOfDomain { x });
    }
    Ok(residue_signed_unchecked(alpha, beta, b, x))
}

/// The majorant `P(b)` of the squared L2 defect: the exact polynomial
/// integral of `x^2 (1 - x)^2 ((beta^2 - alpha^2) x + K)^2` over [0, 1],
/// i.e. `u^2/105 + u K/30 + K^2/30`.
pub fn residue_sq_majorant(alpha: f64, beta: f64, b: f64) -> f64 {
    let u = beta * beta - alpha * alpha;
    let k = defect_constant(alpha, beta, b);
    u * u / 105.0 + u * k / 30.0 + k * k / 30.0
}

/// The estimate's bound over the whole admissible region:
/// `(2 - sqrt(2))^2 / (2 sqrt(210))`.
pub fn global_residue_bound() -> f64 {
    let t = 2.0 - math::sqrt(2.0);
    t * t / (2.0 * math::sqrt(210.0))
}

/// True and estimated L2 defect of `q_b`, the true value by composite
/// trapezoid quadrature with `quad_points` intervals.
pub fn residue_l2(
    alpha: f64,
    beta: f64,
    b: f64,
    quad_points: usize,
) -> Result<ResidueReport, ApproxError> {
    if !(b < -1.0) {
        return Err(ApproxError::DomainB { b });
    }
    let sq = trapezoid(quad_points.max(1), |x| {
        let e = residue_signed_unchecked(alpha, beta, b, x);
        e * e
    });
    let u = beta * beta - alpha * alpha;
    Ok(ResidueReport {
        l2_residue_true: math::sqrt(sq),
        l2_residue_estimate: math::sqrt(residue_sq_majorant(alpha, beta, b)),
        analytic_at_bc: u / math::sqrt(840.0),
        global_bound: global_residue_bound(),
    })
}

/// `d^2 P / db^2` at the critical point: `(beta - alpha)^2 / 15`, checked
/// against a central second difference of the analytic `P`.
pub fn second_derivative_check(alpha: f64, beta: f64) -> f64 {
    assert!(alpha < beta, "need alpha < beta");
    let formula = (beta - alpha) * (beta - alpha) / 15.0;
    let bc = critical_b(alpha, beta);
    let h = 1e-4;
    let p = |b: f64| residue_sq_majorant(alpha, beta, b);
    let numeric = (p(bc + h) - 2.0 * p(bc) + p(bc - h)) / (h * h);
    assert!(
        math::abs(numeric - formula) <= 1e-6 * math::abs(formula),
        "second difference {numeric} disagrees with formula {formula}"
    );
    formula
}

const GOLDEN_TOL: f64 = 1e-10;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut m1 = hi - INV_PHI * (hi - lo);
    let mut m2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(m1);
    let mut f2 = f(m2);
    while hi - lo > GOLDEN_TOL {
        if f1 < f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - INV_PHI * (hi - lo);
            f1 = f(m1);
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + INV_PHI * (hi - lo);
            f2 = f(m2);
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes the true L2 defect over `b in (-inf, -1)` by golden-section
/// search, with `quad_points` trapezoid intervals in the objective. The
/// bracket starts at [-64, -1 - 1e-6] and the left edge doubles until the
/// minimum is interior.
pub fn optimal_b(alpha: f64, beta: f64, quad_points: usize) -> Result<QuadraticApprox, ApproxError> {
    check_params(alpha, beta)?;
    let objective = |b: f64| {
        math::sqrt(trapezoid(quad_points.max(1), |x| {
            let e = residue_signed_unchecked(alpha, beta, b, x);
            e * e
        }))
    };
    let hi = -1.0 - 1e-6;
    let mut lo = -64.0;
    let mut expansions = 0;
    loop {
        let probe = hi - INV_PHI * (hi - lo);
        if objective(lo) > objective(probe) {
            break;
        }
        lo *= 2.0;
        expansions += 1;
        if expansions > 20 {
            break;
        }
    }
    let mid = hi - INV_PHI * (hi - lo);
    let (f_lo, f_mid, f_hi) = (objective(lo), objective(mid), objective(hi));
    if f_mid > f_lo || f_mid > f_hi {
        return Err(ApproxError::NotUnimodal {
            lo,
            hi,
            f_lo,
            f_mid,
            f_hi,
        });
    }
    let b = golden_min(&objective, lo, hi);
    Ok(QuadraticApprox {
        b,
        alpha,
        beta,
        kind: ApproxKind::NumericOptimal,
        admissible: b <= -2.0,
    })
}
