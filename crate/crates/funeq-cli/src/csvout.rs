//! CSV writers for the plot-ready output series.
//!
//! All real numbers are printed with 17 significant digits (`{:.16e}`), the
//! line separator is a single `\n`, and rows carry no padding, so files are
//! byte-stable for fixed inputs and seeds (timing columns aside).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use funeq_core::oracle::OracleEstimate;
use funeq_core::solver::ConvergenceHistory;
use funeq_core::GridFunction;

use crate::bench::BenchRow;
use crate::CliError;

/// 17 significant digits, enough to reproduce any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    w.flush()
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

macro_rules! emit {
    ($w:expr, $path:expr, $($arg:tt)*) => {
        writeln!($w, $($arg)*)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", $path.display())))?
    };
}

/// `x,f` rows over the full grid.
pub fn write_solution(path: &Path, f: &GridFunction) -> Result<(), CliError> {
    let mut w = create(path)?;
    emit!(w, path, "x,f");
    for (i, v) in f.values().iter().enumerate() {
        emit!(w, path, "{},{}", fmt_f64(f.node(i)), fmt_f64(*v));
    }
    finish(w, path)
}

/// `n,d_sup,d_l2,d_lip,seconds` rows, one per Picard step.
pub fn write_history(path: &Path, history: &ConvergenceHistory) -> Result<(), CliError> {
    let mut w = create(path)?;
    emit!(w, path, "n,d_sup,d_l2,d_lip,seconds");
    for r in &history.records {
        emit!(
            w,
            path,
            "{},{},{},{},{}",
            r.n,
            fmt_f64(r.d_sup),
            fmt_f64(r.d_l2),
            fmt_f64(r.d_lip),
            fmt_f64(r.seconds)
        );
    }
    finish(w, path)
}

/// `x,p_hat,ci,timeouts` rows, one per query point.
pub fn write_oracle(path: &Path, estimates: &[OracleEstimate]) -> Result<(), CliError> {
    let mut w = create(path)?;
    emit!(w, path, "x,p_hat,ci,timeouts");
    for e in estimates {
        emit!(
            w,
            path,
            "{},{},{},{}",
            fmt_f64(e.x),
            fmt_f64(e.p_hat),
            fmt_f64(e.ci_halfwidth),
            e.timeouts
        );
    }
    finish(w, path)
}

/// `n,leaf_count,seconds,grid_seconds` rows, one per recursion depth.
pub fn write_bench(path: &Path, rows: &[BenchRow]) -> Result<(), CliError> {
    let mut w = create(path)?;
    emit!(w, path, "n,leaf_count,seconds,grid_seconds");
    for r in rows {
        emit!(
            w,
            path,
            "{},{},{},{}",
            r.n,
            r.leaf_count,
            fmt_f64(r.seconds),
            fmt_f64(r.grid_seconds)
        );
    }
    finish(w, path)
}

/// `x,f_tilde[,f_opt][,f_proxy]`: the quadratic curve plus optional columns.
pub fn write_curves(
    path: &Path,
    xs: &[f64],
    f_tilde: &[f64],
    f_opt: Option<&[f64]>,
    f_proxy: Option<&[f64]>,
) -> Result<(), CliError> {
    let mut w = create(path)?;
    let mut header = String::from("x,f_tilde");
    if f_opt.is_some() {
        header.push_str(",f_opt");
    }
    if f_proxy.is_some() {
        header.push_str(",f_proxy");
    }
    emit!(w, path, "{header}");
    for i in 0..xs.len() {
        let mut row = format!("{},{}", fmt_f64(xs[i]), fmt_f64(f_tilde[i]));
        if let Some(col) = f_opt {
            row.push(',');
            row.push_str(&fmt_f64(col[i]));
        }
        if let Some(col) = f_proxy {
            row.push(',');
            row.push_str(&fmt_f64(col[i]));
        }
        emit!(w, path, "{row}");
    }
    finish(w, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(1.0 / 3.0), "3.3333333333333331e-1");
        let v = 0.1 + 0.2;
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }
}
