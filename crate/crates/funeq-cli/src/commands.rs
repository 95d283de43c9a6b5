//! Implementations of the CLI subcommands. Each returns the run report and
//! the process exit code.

use std::path::{Path, PathBuf};
use std::time::Instant;

use funeq_core::grid::{distance, ENDPOINT_TOL};
use funeq_core::oracle::{ChainConfig, OracleError};
use funeq_core::solver::{
    fit_exponential, fit_log_linear, linear_fit, solve_with_clock, SolveError, SolveOptions,
    DEFAULT_SKIP_FIRST,
};
use funeq_core::{approx, expr, EquationSpec, ExprAst, GridFunction, Metric};
use serde_json::json;

use crate::report::{
    ApproxSummary, BenchSummary, InputEcho, OptimalSummary, OracleSummary, ProxySummary,
    RunReport, SolverSummary,
};
use crate::specfile::{self, LoadedSpec};
use crate::{bench, csvout, parallel, CliError};

fn metric_name(metric: Metric) -> &'static str {
    match metric {
        Metric::Sup => "sup",
        Metric::L2 => "l2",
        Metric::Lip => "lip",
    }
}

fn map_solve_err(e: SolveError) -> CliError {
    match e {
        SolveError::InvalidOption { .. } | SolveError::Hypothesis { .. } => {
            CliError::input(e.to_string())
        }
        SolveError::Equation(_) | SolveError::Grid(_) => CliError::numerical(e.to_string()),
    }
}

fn map_oracle_err(e: OracleError) -> CliError {
    match e {
        OracleError::Config(_) | OracleError::NoSamples => CliError::input(e.to_string()),
        _ => CliError::numerical(e.to_string()),
    }
}

/// Samples a parsed expression on the grid, then snaps the endpoints.
fn sample_admissible(ast: &ExprAst, grid_n: usize, what: &str) -> Result<GridFunction, CliError> {
    let n_f = grid_n as f64;
    let mut values = Vec::with_capacity(grid_n + 1);
    for i in 0..=grid_n {
        let x = i as f64 / n_f;
        values.push(
            ast.eval(x)
                .map_err(|e| CliError::input(format!("{what}: {e}")))?,
        );
    }
    GridFunction::new(values)
        .map_err(|e| CliError::input(format!("{what}: {e}")))?
        .into_admissible(ENDPOINT_TOL)
        .map_err(|e| CliError::input(format!("{what} is not admissible: {e}")))
}

fn echo(loaded: &LoadedSpec, spec_path: &Path, settings: serde_json::Value) -> InputEcho {
    InputEcho {
        spec_path: Some(spec_path.display().to_string()),
        spec: Some(loaded.file.clone()),
        substituted: loaded.substituted.clone(),
        settings,
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct CheckArgs {
    /// Path to the TOML spec file
    pub spec: PathBuf,
    /// Grid intervals for norm estimates (default: spec file / 2048)
    #[arg(long)]
    pub grid: Option<usize>,
}

pub fn cmd_check(args: &CheckArgs) -> Result<(RunReport, u8), CliError> {
    let t0 = Instant::now();
    let loaded = specfile::load(&args.spec)?;
    let grid_n = args.grid.unwrap_or(loaded.grid_n);
    let cert = loaded
        .spec
        .certify(grid_n)
        .map_err(|e| CliError::input(e.to_string()))?;

    let exit = if !cert.hypotheses_ok() {
        let what = cert
            .boundary
            .first_failure()
            .unwrap_or(if !cert.range_ok {
                "phi1, phi2 map [0, 1] into [0, 1]"
            } else {
                "sampled |phi(x) - 1| <= |phi|"
            });
        eprintln!("hypothesis failed: {what}");
        1
    } else if cert.guaranteed {
        0
    } else {
        2
    };

    let mut report = RunReport::new("check", echo(&loaded, &args.spec, json!({ "grid_n": grid_n })));
    report.certificate = Some(cert);
    report.elapsed_seconds = t0.elapsed().as_secs_f64();
    Ok((report, exit))
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// Path to the TOML spec file
    pub spec: PathBuf,
    /// Grid intervals (default: spec file / 2048)
    #[arg(long)]
    pub grid: Option<usize>,
    /// Stopping tolerance on the inter-iterate distance (default: spec file / 1e-10)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap (default: spec file / 200)
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Initial condition as an expression of x
    #[arg(long, default_value = "x")]
    pub init: String,
    /// Stopping metric: sup, l2, or lip (default: spec file / l2)
    #[arg(long)]
    pub metric: Option<String>,
    /// Write the solution series as CSV (header `x,f`)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the per-iteration history as CSV (header `n,d_sup,d_l2,d_lip,seconds`)
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Fit an exponential to the recorded distances
    #[arg(long)]
    pub fit: bool,
    /// Leading records to skip in the fit
    #[arg(long, default_value_t = DEFAULT_SKIP_FIRST)]
    pub skip_first: usize,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(RunReport, u8), CliError> {
    let t0 = Instant::now();
    let loaded = specfile::load(&args.spec)?;
    let grid_n = args.grid.unwrap_or(loaded.grid_n);
    let opts = SolveOptions {
        tol: args.tol.unwrap_or(loaded.tol),
        max_iter: args.max_iter.unwrap_or(loaded.max_iter),
        stop_metric: match &args.metric {
            Some(name) => specfile::parse_metric(name)?,
            None => loaded.metric,
        },
    };

    let init_ast = expr::parse(&args.init)
        .map_err(|e| CliError::input(format!("init expression `{}`: {e}", args.init)))?;
    let f0 = sample_admissible(&init_ast, grid_n, "init expression")?;

    let cert = loaded
        .spec
        .certify(grid_n)
        .map_err(|e| CliError::input(e.to_string()))?;
    let clock0 = Instant::now();
    let (f, history) = solve_with_clock(&loaded.spec, &f0, &opts, || {
        clock0.elapsed().as_secs_f64()
    })
    .map_err(map_solve_err)?;

    let tf = loaded
        .spec
        .apply(&f)
        .map_err(|e| CliError::numerical(e.to_string()))?;
    let residuals = [
        distance(&f, &tf, Metric::Sup).map_err(|e| CliError::numerical(e.to_string()))?,
        distance(&f, &tf, Metric::L2).map_err(|e| CliError::numerical(e.to_string()))?,
        distance(&f, &tf, Metric::Lip).map_err(|e| CliError::numerical(e.to_string()))?,
    ];

    let fit = args
        .fit
        .then(|| fit_exponential(&history, opts.stop_metric, args.skip_first))
        .transpose()
        .map_err(|e| CliError::numerical(e.to_string()))?;

    if let Some(path) = &args.out {
        csvout::write_solution(path, &f)?;
    }
    if let Some(path) = &args.history {
        csvout::write_history(path, &history)?;
    }

    let mut report = RunReport::new(
        "solve",
        echo(
            &loaded,
            &args.spec,
            json!({
                "grid_n": grid_n,
                "tol": opts.tol,
                "max_iter": opts.max_iter,
                "metric": metric_name(opts.stop_metric),
                "init": args.init,
                "skip_first": args.skip_first,
            }),
        ),
    );
    report.certificate = Some(cert);
    report.solver = Some(SolverSummary::new(&history, residuals));
    report.fit = fit;
    report.elapsed_seconds = t0.elapsed().as_secs_f64();
    Ok((report, 0))
}

// ---------------------------------------------------------------------------
// approx
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct ApproxArgs {
    pub alpha: f64,
    pub beta: f64,
    /// Also compute the numerically optimal quadratic
    #[arg(long)]
    pub optimal: bool,
    /// Compare against the Picard iterate after this many steps
    #[arg(long)]
    pub proxy_iters: Option<usize>,
    /// Write the curves as CSV (header `x,f_tilde[,f_opt][,f_proxy]`)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid intervals for curves and the proxy
    #[arg(long, default_value_t = funeq_core::DEFAULT_GRID)]
    pub grid: usize,
    /// Trapezoid intervals for residue quadrature
    #[arg(long, default_value_t = 4096)]
    pub quad_points: usize,
}

pub fn cmd_approx(args: &ApproxArgs) -> Result<(RunReport, u8), CliError> {
    let t0 = Instant::now();
    let suboptimal =
        approx::suboptimal_b(args.alpha, args.beta).map_err(|e| CliError::input(e.to_string()))?;
    if !suboptimal.admissible {
        eprintln!(
            "warning: ({}, {}) lies outside the region alpha^2 + (beta - 2)^2 >= 2; \
             b = {:.6} > -2, so monotonicity and concavity of the quadratic are not guaranteed",
            args.alpha, args.beta, suboptimal.b
        );
    }
    let residue = approx::residue_l2(args.alpha, args.beta, suboptimal.b, args.quad_points)
        .map_err(|e| CliError::numerical(e.to_string()))?;

    let optimal = args
        .optimal
        .then(|| -> Result<OptimalSummary, CliError> {
            let quadratic = approx::optimal_b(args.alpha, args.beta, args.quad_points)
                .map_err(|e| CliError::numerical(e.to_string()))?;
            let l2_residue_true =
                approx::residue_l2(args.alpha, args.beta, quadratic.b, args.quad_points)
                    .map_err(|e| CliError::numerical(e.to_string()))?
                    .l2_residue_true;
            Ok(OptimalSummary {
                quadratic,
                l2_residue_true,
            })
        })
        .transpose()?;

    let sample_quadratic = |q: &approx::QuadraticApprox| -> Result<GridFunction, CliError> {
        let n_f = args.grid as f64;
        let values = (0..=args.grid)
            .map(|i| q.eval(i as f64 / n_f))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::numerical(e.to_string()))?;
        GridFunction::new(values).map_err(|e| CliError::numerical(e.to_string()))
    };
    let tilde_grid = sample_quadratic(&suboptimal)?;
    let opt_grid = optimal
        .as_ref()
        .map(|o| sample_quadratic(&o.quadratic))
        .transpose()?;

    let mut proxy_grid = None;
    let proxy = args
        .proxy_iters
        .map(|iters| -> Result<ProxySummary, CliError> {
            if iters == 0 {
                return Err(CliError::input("proxy-iters must be at least 1"));
            }
            let spec = EquationSpec::paradise(args.alpha, args.beta)
                .map_err(|e| CliError::input(e.to_string()))?;
            let opts = SolveOptions {
                tol: 1e-300, // run out the full iteration budget
                max_iter: iters,
                stop_metric: Metric::L2,
            };
            let (f_proxy, _) = funeq_core::solve(&spec, &GridFunction::identity(args.grid), &opts)
                .map_err(map_solve_err)?;
            let dist = |g: &GridFunction, m: Metric| {
                distance(g, &f_proxy, m).map_err(|e| CliError::numerical(e.to_string()))
            };
            let summary = ProxySummary {
                iterations: iters,
                sup_distance: dist(&tilde_grid, Metric::Sup)?,
                l2_distance: dist(&tilde_grid, Metric::L2)?,
                optimal_sup_distance: opt_grid
                    .as_ref()
                    .map(|g| dist(g, Metric::Sup))
                    .transpose()?,
                optimal_l2_distance: opt_grid
                    .as_ref()
                    .map(|g| dist(g, Metric::L2))
                    .transpose()?,
            };
            proxy_grid = Some(f_proxy);
            Ok(summary)
        })
        .transpose()?;

    if let Some(path) = &args.out {
        let xs: Vec<f64> = (0..=args.grid).map(|i| tilde_grid.node(i)).collect();
        csvout::write_curves(
            path,
            &xs,
            tilde_grid.values(),
            opt_grid.as_ref().map(|g| g.values()),
            proxy_grid.as_ref().map(|g| g.values()),
        )?;
    }

    let mut report = RunReport::new(
        "approx",
        InputEcho {
            spec_path: None,
            spec: None,
            substituted: None,
            settings: json!({
                "alpha": args.alpha,
                "beta": args.beta,
                "grid_n": args.grid,
                "quad_points": args.quad_points,
                "optimal": args.optimal,
                "proxy_iters": args.proxy_iters,
            }),
        },
    );
    report.approx = Some(ApproxSummary {
        suboptimal,
        residue,
        optimal,
        proxy,
    });
    report.elapsed_seconds = t0.elapsed().as_secs_f64();
    Ok((report, 0))
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct OracleArgs {
    /// Path to the TOML spec file
    pub spec: PathBuf,
    /// Comma-separated evaluation points in [0, 1]
    #[arg(long, default_value = "0.25,0.5,0.75")]
    pub points: String,
    /// Paths per point
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Batch seed; per-path seeds derive from it deterministically
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the estimates as CSV (header `x,p_hat,ci,timeouts`)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism); any count gives
    /// bit-identical results
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn parse_points(list: &str) -> Result<Vec<f64>, CliError> {
    let mut points = Vec::new();
    for part in list.split(',') {
        let part = part.trim();
        let x: f64 = part
            .parse()
            .map_err(|_| CliError::input(format!("bad point `{part}` in --points")))?;
        if !(0.0..=1.0).contains(&x) {
            return Err(CliError::input(format!(
                "point {x} lies outside [0, 1]"
            )));
        }
        points.push(x);
    }
    Ok(points)
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<(RunReport, u8), CliError> {
    let t0 = Instant::now();
    let loaded = specfile::load(&args.spec)?;
    let points = parse_points(&args.points)?;
    let threads = args.threads.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let cfg = ChainConfig {
        base_seed: args.seed,
        ..ChainConfig::default()
    };

    let (solution, history) = funeq_core::solve(
        &loaded.spec,
        &GridFunction::identity(loaded.grid_n),
        &loaded.solve_options(),
    )
    .map_err(map_solve_err)?;

    let mut estimates = Vec::with_capacity(points.len());
    let mut max_discrepancy = 0.0f64;
    for &x in &points {
        let est = parallel::estimate_parallel(&loaded.spec, x, args.samples, &cfg, threads)
            .map_err(map_oracle_err)?;
        let reference = solution
            .eval(x)
            .map_err(|e| CliError::numerical(e.to_string()))?;
        max_discrepancy = max_discrepancy.max((est.p_hat - reference).abs());
        estimates.push(est);
    }

    if let Some(path) = &args.out {
        csvout::write_oracle(path, &estimates)?;
    }

    let mut report = RunReport::new(
        "oracle",
        echo(
            &loaded,
            &args.spec,
            json!({
                "points": points,
                "samples": args.samples,
                "seed": args.seed,
                "threads": threads,
                "grid_n": loaded.grid_n,
                "absorption_eps": cfg.absorption_eps,
                "max_steps": cfg.max_steps,
            }),
        ),
    );
    report.oracle = Some(OracleSummary {
        points: estimates,
        max_discrepancy,
        solver_iterations: history.iterations(),
        threads,
    });
    report.elapsed_seconds = t0.elapsed().as_secs_f64();
    Ok((report, 0))
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    /// Path to the TOML spec file
    pub spec: PathBuf,
    /// Deepest recursion level (capped at 26)
    #[arg(long, default_value_t = 20)]
    pub max_depth: u32,
    /// Write the measurements as CSV (header `n,leaf_count,seconds,grid_seconds`)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Initial condition as an expression of x
    #[arg(long, default_value = "x")]
    pub init: String,
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(RunReport, u8), CliError> {
    let t0 = Instant::now();
    let loaded = specfile::load(&args.spec)?;
    let init_ast = expr::parse(&args.init)
        .map_err(|e| CliError::input(format!("init expression `{}`: {e}", args.init)))?;
    let f0 = sample_admissible(&init_ast, loaded.grid_n, "init expression")?;
    let rows = bench::run(&loaded.spec, &init_ast, &f0, args.max_depth)?;

    let naive_points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= 10)
        .map(|r| (r.n as f64, r.seconds))
        .collect();
    let naive_time_fit = fit_log_linear(&naive_points).ok();

    let grid_points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.grid_seconds > 0.0)
        .map(|r| ((r.n as f64).ln(), r.grid_seconds.ln()))
        .collect();
    let grid_time_exponent = linear_fit(&grid_points).ok().map(|l| l.slope);

    if let Some(path) = &args.out {
        csvout::write_bench(path, &rows)?;
    }

    let mut report = RunReport::new(
        "bench",
        echo(
            &loaded,
            &args.spec,
            json!({
                "max_depth": args.max_depth,
                "grid_n": loaded.grid_n,
                "init": args.init,
            }),
        ),
    );
    report.bench = Some(BenchSummary {
        rows,
        naive_time_fit,
        grid_time_exponent,
    });
    report.elapsed_seconds = t0.elapsed().as_secs_f64();
    Ok((report, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_list_parsing() {
        assert_eq!(parse_points("0.5").unwrap(), vec![0.5]);
        assert_eq!(
            parse_points("0, 0.25 ,1").unwrap(),
            vec![0.0, 0.25, 1.0]
        );
        assert!(parse_points("0.5,oops").is_err());
        assert!(parse_points("1.5").is_err());
        assert!(parse_points("").is_err());
    }

    #[test]
    fn metric_names_roundtrip() {
        for m in [Metric::Sup, Metric::L2, Metric::Lip] {
            assert_eq!(specfile::parse_metric(metric_name(m)).unwrap(), m);
        }
    }
}
