//! End-to-end tests of the `funeq` binary: exit codes, file formats, and
//! byte-stability of the outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use funeq_cli::specfile;
use funeq_core::grid::distance;
use funeq_core::solver::{solve, SolveOptions};
use funeq_core::{EquationSpec, GridFunction, Metric};

fn funeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funeq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn write_spec(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn report_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON report")
}

#[test]
fn check_exit_codes_follow_the_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let guaranteed = write_spec(
        dir.path(),
        "g.toml",
        "family = \"paradise\"\nalpha = 0.1\nbeta = 0.2\n",
    );
    let unguaranteed = write_spec(
        dir.path(),
        "u.toml",
        "family = \"paradise\"\nalpha = 0.1\nbeta = 0.5\n",
    );
    let invalid = write_spec(
        dir.path(),
        "i.toml",
        "phi = \"x\"\nphi1 = \"0.5*x + 0.5\"\nphi2 = \"0.5*x + 0.25\"\n",
    );

    let out = funeq(&["check", guaranteed.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    let report = report_json(&out);
    assert_eq!(report["certificate"]["guaranteed"], true);
    assert!((report["certificate"]["contraction_constant"].as_f64().unwrap() - 0.6).abs() < 1e-12);

    let out = funeq(&["check", unguaranteed.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let report = report_json(&out);
    assert_eq!(report["certificate"]["guaranteed"], false);
    assert!((report["certificate"]["contraction_constant"].as_f64().unwrap() - 1.2).abs() < 1e-12);

    let out = funeq(&["check", invalid.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("phi2(0)"), "stderr: {stderr}");

    let out = funeq(&["check", dir.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);

    let out = funeq(&["frobnicate"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn solve_outputs_are_byte_stable_with_exact_headers() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "s.toml",
        "family = \"paradise\"\nalpha = 0.1\nbeta = 0.2\ngrid_n = 256\n",
    );
    let sol_a = dir.path().join("a.csv");
    let sol_b = dir.path().join("b.csv");
    let hist = dir.path().join("h.csv");

    for (sol, hist) in [(&sol_a, &hist), (&sol_b, &hist)] {
        let out = funeq(&[
            "solve",
            spec.to_str().unwrap(),
            "--out",
            sol.to_str().unwrap(),
            "--history",
            hist.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }

    let a = fs::read(&sol_a).unwrap();
    let b = fs::read(&sol_b).unwrap();
    assert_eq!(a, b, "solution files differ between identical runs");
    assert!(a.starts_with(b"x,f\n"));
    assert_eq!(a.iter().filter(|&&c| c == b'\n').count(), 258); // header + 257 nodes
    assert!(!a.contains(&b'\r'));

    let h = fs::read_to_string(&hist).unwrap();
    assert!(h.starts_with("n,d_sup,d_l2,d_lip,seconds\n"));
}

#[test]
fn solve_from_the_fixed_point_stops_in_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    // tol sits above the O(h^2) interpolation defect of x^4 on this grid
    let spec = write_spec(
        dir.path(),
        "e.toml",
        "family = \"exact\"\nalpha = 0.3\nbeta = 0.7\nm = 4.0\ngrid_n = 4096\ntol = 1e-6\n",
    );
    let out = funeq(&["solve", spec.to_str().unwrap(), "--init", "x^4"]);
    assert_eq!(exit_code(&out), 0);
    let report = report_json(&out);
    assert_eq!(report["solver"]["iterations"], 1);
    assert_eq!(report["solver"]["stop_reason"], "tolerance");
}

#[test]
fn solve_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "s.toml",
        "family = \"paradise\"\nalpha = 0.1\nbeta = 0.2\ngrid_n = 64\n",
    );
    // init not admissible: f(1) = 0.5
    let out = funeq(&["solve", spec.to_str().unwrap(), "--init", "x/2"]);
    assert_eq!(exit_code(&out), 1);
    // init does not parse
    let out = funeq(&["solve", spec.to_str().unwrap(), "--init", "x +"]);
    assert_eq!(exit_code(&out), 1);
    // unwritable output path
    let out = funeq(&[
        "solve",
        spec.to_str().unwrap(),
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn oracle_reruns_are_bit_identical_at_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "s.toml",
        "family = \"paradise\"\nalpha = 0.1\nbeta = 0.2\ngrid_n = 256\n",
    );
    let mut files = Vec::new();
    for (name, threads) in [("o1.csv", "1"), ("o2.csv", "4"), ("o3.csv", "1")] {
        let path = dir.path().join(name);
        let out = funeq(&[
            "oracle",
            spec.to_str().unwrap(),
            "--points",
            "0.2,0.5,0.8",
            "--samples",
            "20000",
            "--seed",
            "7",
            "--threads",
            threads,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        files.push(fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1], "1 vs 4 workers");
    assert_eq!(files[0], files[2], "rerun with the same seed");
    assert!(files[0].starts_with(b"x,p_hat,ci,timeouts\n"));
}

#[test]
fn approx_flags_and_exit_codes() {
    // outside the admissible region: still reported, exit 0
    let out = funeq(&["approx", "0.3", "0.7"]);
    assert_eq!(exit_code(&out), 0);
    let report = report_json(&out);
    assert_eq!(report["approx"]["suboptimal"]["admissible"], false);

    // alpha >= beta is a usage error citing the identity special case
    let out = funeq(&["approx", "0.3", "0.3"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("identity"));
    let out = funeq(&["approx", "0.5", "0.3"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn approx_curve_file_has_the_requested_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let out = funeq(&[
        "approx",
        "0.3",
        "0.5",
        "--grid",
        "64",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,f_tilde\n"));

    let out = funeq(&[
        "approx",
        "0.3",
        "0.5",
        "--grid",
        "64",
        "--optimal",
        "--proxy-iters",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,f_tilde,f_opt,f_proxy\n"));
    assert_eq!(text.lines().count(), 66); // header + 65 nodes
}

#[test]
fn bench_depth_guard_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "s.toml",
        "family = \"paradise\"\nalpha = 0.1\nbeta = 0.5\ngrid_n = 64\n",
    );
    let out = funeq(&["bench", spec.to_str().unwrap(), "--max-depth", "27"]);
    assert_eq!(exit_code(&out), 1);

    let path = dir.path().join("b.csv");
    let out = funeq(&[
        "bench",
        spec.to_str().unwrap(),
        "--max-depth",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,leaf_count,seconds,grid_seconds\n"));
    // leaf counts are exact powers of two
    for (i, line) in text.lines().skip(1).enumerate() {
        let leaf: u64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(leaf, 1 << (i + 1));
    }
}

#[test]
fn report_echo_reparses_to_an_equivalent_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "c.toml",
        "phi = \"x\"\nphi1 = \"alpha*x + 1 - alpha\"\nphi2 = \"beta*x\"\nalpha = 0.1\nbeta = 0.5\ngrid_n = 128\n",
    );
    let out = funeq(&["check", spec.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2); // c = 1.2 from grid estimates
    let report = report_json(&out);

    // substituted expressions are echoed for auditability
    assert_eq!(report["input"]["substituted"]["phi2"], "(0.5)*x");

    // the echoed spec round-trips through TOML into an equivalent equation
    let echoed: funeq_cli::specfile::SpecFile =
        serde_json::from_value(report["input"]["spec"].clone()).unwrap();
    let toml_text = toml::to_string(&echoed).unwrap();
    let reparsed: funeq_cli::specfile::SpecFile = toml::from_str(&toml_text).unwrap();
    assert_eq!(echoed, reparsed);
    let resolved = specfile::resolve(reparsed).unwrap();
    assert_eq!(resolved.grid_n, 128);
    for i in 0..=8 {
        let x = i as f64 / 8.0;
        assert!((resolved.spec.phi1(x).unwrap() - (0.1 * x + 0.9)).abs() < 1e-15);
    }
}

#[test]
fn larger_beta_flattens_the_solution_near_one() {
    let opts = SolveOptions::default();
    let f0 = GridFunction::identity(1024);
    let (low, _) = solve(&EquationSpec::paradise(0.1, 0.5).unwrap(), &f0, &opts).unwrap();
    let (high, _) = solve(&EquationSpec::paradise(0.3, 0.7).unwrap(), &f0, &opts).unwrap();
    assert!(high.eval(0.9).unwrap() > low.eval(0.9).unwrap());
    assert!(distance(&low, &high, Metric::Sup).unwrap() > 0.01);
}
