use std::path::PathBuf;
use std::process::{Command, Output};

fn stablecov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablecov"))
        .args(args)
        .env_remove("STABLECOV_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stablecov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn process_deps_row_count_and_header() {
    let o = stablecov(&["process-deps", "--alpha", "1.5", "--filter", "hyper:beta=1.2", "--lags", "1:128", "--tol", "1e-10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "n,rho,rho_tilde,codifference,covariation,tail_bound");
    assert_eq!(lines.count(), 128);
}

#[test]
fn ou_columns() {
    let o = stablecov(&["ou", "--alpha", "1.5", "--lambda", "1.0", "--tmax", "10", "--steps", "100"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("t,rho,rho_normalized,codifference,codifference_normalized\n"));
    assert_eq!(out.lines().count(), 102);
}

#[test]
fn memory_exact_json_positive() {
    let o = stablecov(&[
        "--format", "json", "memory-exact", "--alpha", "2", "--filter", "hyper:beta=0.7,sign=const", "--grid", "64:16384",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["class"], "Positive");
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn field_deps_grid() {
    let o = stablecov(&["field-deps", "--alpha", "1.2", "--matrix", "1,0.5;0.25,0.125", "--n-lags", "0:2", "--m-lags", "0,1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("n,m,rho,rho_tilde,tail_bound\n"));
    assert_eq!(out.lines().count(), 7);
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["process-deps", "--alpha", "2.5", "--filter", "explicit:1"][..],
        &["process-deps", "--alpha", "1.5", "--filter", "cubic:1"],
        &["process-deps", "--alpha", "1.5", "--filter", "hyper:beta=0.5,c0=zsum"],
        &["process-deps", "--alpha", "1.5", "--filter", "explicit:1", "--bogus"],
        &["nonsense"],
        &["spectral-estimate", "--input", "/nonexistent/samples.csv"],
    ] {
        let o = stablecov(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn numerical_failure_exits_1() {
    let o = stablecov(&["process-deps", "--alpha", "1.5", "--filter", "hyper:beta=1.2", "--lags", "3", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["memory-sim", "--alpha", "1.5", "--filter", "hyper:beta=0.8,c0=1", "--grid", "32:1024", "--reps", "50"];
    let a = scratch("a.csv");
    let b = scratch("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let mut full = vec!["--seed", "7", "--threads", threads, "--out", path.to_str().unwrap()];
        full.extend_from_slice(&args);
        assert!(stablecov(&full).status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let env_run = Command::new(env!("CARGO_BIN_EXE_stablecov"))
        .args(args)
        .env("STABLECOV_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(env_run.stdout, std::fs::read(&a).unwrap());

    let other = stablecov(&[&["--seed", "8"][..], &args].concat());
    assert_ne!(other.stdout, env_run.stdout);
}

#[test]
fn tol_halving_stays_within_certificate() {
    let run = |tol: &str| {
        let o = stablecov(&["process-deps", "--alpha", "1.5", "--filter", "hyper:beta=1.3", "--lags", "1:16", "--tol", tol]);
        assert!(o.status.success());
        stdout(&o)
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    let coarse = run("1e-6");
    let fine = run("5e-7");
    for (c, f) in coarse.iter().zip(&fine) {
        assert!((c[1] - f[1]).abs() <= c[5] + f[5], "{c:?} vs {f:?}");
    }
}

#[test]
fn spectral_estimate_roundtrip() {
    let path = scratch("samples.csv");
    let mut text = String::from("x1,x2\n");
    let mut state = 12345u64;
    for _ in 0..4000 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let u = ((state >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
        let x = (u - 0.5) / (u * (1.0 - u)).powf(1.0 / 1.5);
        text.push_str(&format!("{x},{x}\n"));
    }
    std::fs::write(&path, text).unwrap();
    let o = stablecov(&["--format", "json", "spectral-estimate", "--input", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rt = v["summary"]["rho_tilde"].as_f64().unwrap();
    assert!((rt - 1.0).abs() < 0.05, "{rt}");
}

#[test]
fn qcov_axis_atoms_vanish() {
    let o = stablecov(&["qcov", "--atoms", "1,0,1;0,-2,3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "kappa\n0\n");
}

#[test]
fn experiments_run() {
    let o = stablecov(&["--format", "json", "experiment", "zero-sum-decay", "--alpha", "1.5", "--beta", "1.2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["slope"].as_f64().unwrap() < 0.0);

    let o = stablecov(&["experiment", "sign-pattern", "--beta", "0.7", "--signs", "+-", "--grid", "32:1024"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 7);
}
