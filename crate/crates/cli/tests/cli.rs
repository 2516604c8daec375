// Copyright 2026 The oqs-lab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use oqs_lab::{exit, TimeSeries};

fn oqs_lab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oqs-lab"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("OQS_LAB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_to_stdout_is_a_parseable_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "ad.json",
        r#"{"model": {"name": "amplitude_damping", "gamma": 1}, "method": "oracle_exact", "t_final": 1, "dt": 0.1}"#,
    );
    let out = oqs_lab(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(exit::SUCCESS));
    let series = TimeSeries::from_csv(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let v = series.values("excited_population");
    assert_eq!(v.len(), 11);
    for (t, x, _) in v {
        assert!((x - (-t).exp()).abs() < 1e-9);
    }
}

#[test]
fn relative_output_path_lands_beside_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "mc.json",
        r#"{"model": {"name": "dephasing"}, "method": "monte_carlo", "t_final": 0.5, "dt": 0.05,
            "shots": 500, "seed": 11, "output_path": "mc.csv"}"#,
    );
    let one = oqs_lab(&["run", &cfg], Some("1"));
    assert_eq!(one.status.code(), Some(exit::SUCCESS));
    let first = std::fs::read(dir.path().join("mc.csv")).unwrap();
    let four = oqs_lab(&["run", &cfg], Some("4"));
    assert_eq!(four.status.code(), Some(exit::SUCCESS));
    assert_eq!(std::fs::read(dir.path().join("mc.csv")).unwrap(), first);
}

#[test]
fn config_errors_exit_with_the_config_code() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("syntax.json", "{not json"),
        ("model.json", r#"{"model": {"name": "nope"}, "method": "oracle_exact"}"#),
        ("method.json", r#"{"model": {"name": "dephasing"}, "method": "magic", "dt": 0.1}"#),
        ("dt.json", r#"{"model": {"name": "dephasing"}, "method": "oracle_rk4"}"#),
        ("field.json", r#"{"model": {"name": "dephasing", "gamma": 1}, "method": "oracle_exact"}"#),
    ] {
        let cfg = write_config(dir.path(), name, text);
        let out = oqs_lab(&["run", &cfg], None);
        assert_eq!(out.status.code(), Some(exit::CONFIG_ERROR), "{name}");
        assert!(!out.stderr.is_empty());
    }
    let missing = oqs_lab(&["run", "/nonexistent/config.json"], None);
    assert_eq!(missing.status.code(), Some(exit::CONFIG_ERROR));
    let threads = oqs_lab(&["list-methods"], Some("zero"));
    assert_eq!(threads.status.code(), Some(exit::CONFIG_ERROR));
}

#[test]
fn solver_errors_exit_with_the_solver_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "stiff.json",
        r#"{"model": {"name": "amplitude_damping", "gamma": 100}, "method": "dilation_svd", "t_final": 1, "dt": 0.5}"#,
    );
    let out = oqs_lab(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(exit::SOLVER_ERROR));
}

#[test]
fn listings_cover_every_model_and_method() {
    let models = oqs_lab(&["list-models"], None);
    assert_eq!(models.status.code(), Some(exit::SUCCESS));
    let text = String::from_utf8(models.stdout).unwrap();
    for name in oqs_core::models::MODEL_NAMES {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
    let methods = String::from_utf8(oqs_lab(&["list-methods"], None).stdout).unwrap();
    for m in oqs_lab::Method::ALL {
        assert!(methods.contains(m.as_str()), "{m}");
    }
}
