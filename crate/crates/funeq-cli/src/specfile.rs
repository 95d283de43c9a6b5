//! The TOML spec-file schema and its translation into an [`EquationSpec`].
//!
//! Exactly one of two forms must be present:
//!
//! ```toml
//! # family form
//! family = "paradise"        # or "exact", which additionally needs m
//! alpha = 0.1
//! beta = 0.5
//! ```
//!
//! ```toml
//! # custom form: coefficient expressions of x
//! phi = "x"
//! phi1 = "alpha*x + 1 - alpha"
//! phi2 = "beta*x"
//! alpha = 0.1                # optional; substituted into the expressions
//! beta = 0.5
//! ```
//!
//! Both forms take optional solver settings `grid_n`, `tol`, `max_iter`,
//! `metric` ("sup" | "l2" | "lip"). In the custom form the parameters
//! `alpha`, `beta`, `m` are substituted textually into the expressions
//! before parsing; the substituted text is echoed in the run report.

use std::path::Path;

use funeq_core::expr;
use funeq_core::grid::DEFAULT_GRID;
use funeq_core::solver::SolveOptions;
use funeq_core::{EquationSpec, Metric};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
}

/// Coefficient expressions after parameter substitution, as parsed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstitutedExprs {
    pub phi: String,
    pub phi1: String,
    pub phi2: String,
}

/// A spec file resolved into an evaluable equation plus solver settings.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub file: SpecFile,
    pub spec: EquationSpec,
    pub substituted: Option<SubstitutedExprs>,
    pub grid_n: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub metric: Metric,
}

impl LoadedSpec {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            stop_metric: self.metric,
        }
    }
}

pub fn parse_metric(name: &str) -> Result<Metric, CliError> {
    match name {
        "sup" => Ok(Metric::Sup),
        "l2" => Ok(Metric::L2),
        "lip" => Ok(Metric::Lip),
        other => Err(CliError::input(format!(
            "unknown metric `{other}` (expected sup, l2, or lip)"
        ))),
    }
}

/// Replaces whole-identifier occurrences of each parameter name with its
/// parenthesized value.
pub fn substitute_params(source: &str, params: &[(&str, f64)]) -> String {
    let bytes = source.as_bytes();
    let mut out = String::with_capacity(source.len());
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let ident = &source[start..i];
            match params.iter().find(|(name, _)| *name == ident) {
                Some((_, value)) => out.push_str(&format!("({value:?})")),
                None => out.push_str(ident),
            }
        } else {
            out.push(c as char);
            i += 1;
        }
    }
    out
}

pub fn load(path: &Path) -> Result<LoadedSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let file: SpecFile = toml::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    resolve(file)
}

pub fn resolve(file: SpecFile) -> Result<LoadedSpec, CliError> {
    let family_form = file.family.is_some();
    let custom_form = file.phi.is_some() || file.phi1.is_some() || file.phi2.is_some();
    if family_form && custom_form {
        return Err(CliError::input(
            "spec file mixes the family form and the custom form; use exactly one",
        ));
    }
    if !family_form && !custom_form {
        return Err(CliError::input(
            "spec file has neither a family nor custom coefficient expressions",
        ));
    }

    let require = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| CliError::input(format!("spec file is missing `{name}`")))
    };

    let (spec, substituted) = if family_form {
        let family = file.family.as_deref().unwrap();
        let spec = match family {
            "paradise" => {
                if file.m.is_some() {
                    return Err(CliError::input("the paradise family takes no `m`"));
                }
                EquationSpec::paradise(require(file.alpha, "alpha")?, require(file.beta, "beta")?)
            }
            "exact" => EquationSpec::exact(
                require(file.alpha, "alpha")?,
                require(file.beta, "beta")?,
                require(file.m, "m")?,
            ),
            other => {
                return Err(CliError::input(format!(
                    "unknown family `{other}` (expected \"paradise\" or \"exact\")"
                )))
            }
        }
        .map_err(|e| CliError::input(e.to_string()))?;
        (spec, None)
    } else {
        let mut params: Vec<(&str, f64)> = Vec::new();
        if let Some(a) = file.alpha {
            params.push(("alpha", a));
        }
        if let Some(b) = file.beta {
            params.push(("beta", b));
        }
        if let Some(m) = file.m {
            params.push(("m", m));
        }
        let mut texts = Vec::new();
        for (name, text) in [("phi", &file.phi), ("phi1", &file.phi1), ("phi2", &file.phi2)] {
            let text = text
                .as_ref()
                .ok_or_else(|| CliError::input(format!("spec file is missing `{name}`")))?;
            texts.push(substitute_params(text, &params));
        }
        let mut asts = Vec::new();
        for (name, text) in ["phi", "phi1", "phi2"].iter().zip(&texts) {
            asts.push(
                expr::parse(text)
                    .map_err(|e| CliError::input(format!("{name} = `{text}`: {e}")))?,
            );
        }
        let phi2 = asts.pop().unwrap();
        let phi1 = asts.pop().unwrap();
        let phi = asts.pop().unwrap();
        (
            EquationSpec::custom(phi, phi1, phi2),
            Some(SubstitutedExprs {
                phi: texts[0].clone(),
                phi1: texts[1].clone(),
                phi2: texts[2].clone(),
            }),
        )
    };

    let defaults = SolveOptions::default();
    let grid_n = file.grid_n.unwrap_or(DEFAULT_GRID);
    if grid_n < 2 {
        return Err(CliError::input("grid_n must be at least 2"));
    }
    let tol = file.tol.unwrap_or(defaults.tol);
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::input("tol must be positive"));
    }
    let max_iter = file.max_iter.unwrap_or(defaults.max_iter);
    if max_iter == 0 {
        return Err(CliError::input("max_iter must be at least 1"));
    }
    let metric = match file.metric.as_deref() {
        Some(name) => parse_metric(name)?,
        None => defaults.stop_metric,
    };

    Ok(LoadedSpec {
        file,
        spec,
        substituted,
        grid_n,
        tol,
        max_iter,
        metric,
    })
}
