//! The structured run report every command prints to stdout.

use funeq_core::approx::{QuadraticApprox, ResidueReport};
use funeq_core::oracle::OracleEstimate;
use funeq_core::solver::{ConvergenceHistory, ExpFit, StopReason};
use funeq_core::ContractionReport;
use serde::Serialize;
use serde_json::Value;

use crate::bench::BenchRow;
use crate::specfile::{SpecFile, SubstitutedExprs};

#[derive(Debug, Serialize)]
pub struct InputEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<SpecFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substituted: Option<SubstitutedExprs>,
    /// Effective per-command settings after flag/file/default resolution.
    pub settings: Value,
}

#[derive(Debug, Serialize)]
pub struct SolverSummary {
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub final_residual_sup: f64,
    pub final_residual_l2: f64,
    pub final_residual_lip: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl SolverSummary {
    pub fn new(history: &ConvergenceHistory, residuals: [f64; 3]) -> Self {
        Self {
            iterations: history.iterations(),
            stop_reason: history.stop_reason,
            final_residual_sup: residuals[0],
            final_residual_l2: residuals[1],
            final_residual_lip: residuals[2],
            warning: history.warning.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OptimalSummary {
    pub quadratic: QuadraticApprox,
    pub l2_residue_true: f64,
}

#[derive(Debug, Serialize)]
pub struct ProxySummary {
    pub iterations: usize,
    pub sup_distance: f64,
    pub l2_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_sup_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_l2_distance: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ApproxSummary {
    pub suboptimal: QuadraticApprox,
    pub residue: ResidueReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal: Option<OptimalSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proxy: Option<ProxySummary>,
}

#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub points: Vec<OracleEstimate>,
    /// Largest |p_hat - f(x)| against the Picard solution of the same spec.
    pub max_discrepancy: f64,
    pub solver_iterations: usize,
    pub threads: usize,
}

#[derive(Debug, Serialize)]
pub struct BenchSummary {
    pub rows: Vec<BenchRow>,
    /// Log-linear fit of naive-recursion seconds vs depth (rows with n >= 10);
    /// `ratio` is the measured per-level time base.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub naive_time_fit: Option<ExpFit>,
    /// Slope of log(grid seconds) vs log(n): ~1 for linear growth.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_time_exponent: Option<f64>,
}

/// One structured document per run, stable field order.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub input: InputEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ContractionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<ExpFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx: Option<ApproxSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchSummary>,
    pub version: &'static str,
    pub elapsed_seconds: f64,
}

impl RunReport {
    pub fn new(command: &'static str, input: InputEcho) -> Self {
        Self {
            command,
            input,
            certificate: None,
            solver: None,
            fit: None,
            approx: None,
            oracle: None,
            bench: None,
            version: env!("CARGO_PKG_VERSION"),
            elapsed_seconds: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
