//! End-to-end tests of the command-line interface and its exit-code
//! contract: 0 success, 1 oracle discrepancy, 2 usage/config, 3 input data,
//! 4 numerical failure.

use annulus_bem::coupling;
use annulus_bem::field;
use annulus_bem::geometry::Point2;
use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_annulus-bem"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn benchmark_config(dir: &Path) -> String {
    let path = dir.join("config.toml");
    write(
        &path,
        "[geometry]\nouter_radius = 0.100\ninner_radius = 0.015\nn_outer = 40\nn_inner = 40\n",
    );
    path.display().to_string()
}

/// Synthetic boundary data: harmonic, 0 on the inner circle, 1 on the outer.
fn synthetic_fem(dir: &Path) -> String {
    let mesh = annulus_bem::build_annulus(
        Point2::new(0.0, 0.0),
        0.100,
        Point2::new(0.0, 0.0),
        0.015,
        40,
        40,
    )
    .unwrap();
    let denom = (0.100_f64 / 0.015).ln();
    let mut csv = String::from("index,x,y,a\n");
    for (k, e) in mesh.elements().iter().enumerate() {
        let m = e.midpoint();
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            k + 1,
            m.x,
            m.y,
            (m.norm() / 0.015).ln() / denom
        );
    }
    let path = dir.join("fem.csv");
    write(&path, &csv);
    path.display().to_string()
}

#[test]
fn mesh_writes_80_rows_for_benchmark_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = benchmark_config(dir.path());
    let out = run(&[
        "mesh",
        "--config",
        &config,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("mesh.csv")).unwrap();
    assert_eq!(csv.lines().count(), 81); // header + 80 elements
    assert!(csv.starts_with("index,"));
    assert!(dir.path().join("run-manifest.toml").exists());
}

#[test]
fn mesh_accepts_minimum_and_rejects_below() {
    let dir = tempfile::tempdir().unwrap();
    let ok = dir.path().join("ok.toml");
    write(&ok, "[geometry]\nn_outer = 3\nn_inner = 3\n");
    let out = run(&[
        "mesh",
        "--config",
        ok.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let bad = dir.path().join("bad.toml");
    write(&bad, "[geometry]\nn_outer = 2\nn_inner = 40\n");
    let out = run(&[
        "mesh",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_reports_summary_and_writes_solution() {
    let dir = tempfile::tempdir().unwrap();
    let config = benchmark_config(dir.path());
    let fem = synthetic_fem(dir.path());
    let out = run(&[
        "solve",
        "--config",
        &config,
        "--fem",
        &fem,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("residual_norm"));
    assert!(stdout.contains("condition_estimate"));
    let text = std::fs::read_to_string(dir.path().join("solution.txt")).unwrap();
    assert!(text.starts_with("bem-annulus-solution v1"));
    // Fluxes should be small: the synthetic potential varies slowly.
    let solution = coupling::read_solution(&text).unwrap();
    assert!(solution.fluxes().iter().all(|q| q.is_finite()));
}

#[test]
fn malformed_csv_and_singular_system_use_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let config = benchmark_config(dir.path());
    let bad_csv = dir.path().join("bad.csv");
    write(&bad_csv, "index,x,y,a\n1,0.1\n");
    let out = run(&[
        "solve",
        "--config",
        &config,
        "--fem",
        bad_csv.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    // Exit 4 is reserved for numerical failures; nothing here triggers one,
    // but the mapping is part of the contract.
    assert_ne!(out.status.code(), Some(4));
}

#[test]
fn constant_data_yields_near_zero_fluxes() {
    let dir = tempfile::tempdir().unwrap();
    let config = benchmark_config(dir.path());
    let mesh = annulus_bem::build_annulus(
        Point2::new(0.0, 0.0),
        0.100,
        Point2::new(0.0, 0.0),
        0.015,
        40,
        40,
    )
    .unwrap();
    let mut csv = String::from("index,x,y,a\n");
    for (k, e) in mesh.elements().iter().enumerate() {
        let m = e.midpoint();
        let _ = writeln!(csv, "{},{},{},2.0", k + 1, m.x, m.y);
    }
    let fem = dir.path().join("const.csv");
    write(&fem, &csv);
    let out = run(&[
        "solve",
        "--config",
        &config,
        "--fem",
        fem.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let solution =
        coupling::read_solution(&std::fs::read_to_string(dir.path().join("solution.txt")).unwrap())
            .unwrap();
    for &q in solution.fluxes() {
        assert!(q.abs() <= 2e-9, "flux {q}");
    }
}

#[test]
fn eval_grid_masks_hole_and_optionally_renders_svg() {
    let dir = tempfile::tempdir().unwrap();
    let config = benchmark_config(dir.path());
    let fem = synthetic_fem(dir.path());
    run(&[
        "solve",
        "--config",
        &config,
        "--fem",
        &fem,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let solution = dir.path().join("solution.txt");
    let out = run(&[
        "eval",
        "--solution",
        solution.to_str().unwrap(),
        "--grid",
        "-0.11,0.11,-0.11,0.11,21,21",
        "--out",
        dir.path().to_str().unwrap(),
        "--svg",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 21 * 21);
    // The grid center sits in the hole: exterior, empty value.
    let center_row: Vec<&str> = csv
        .lines()
        .find(|l| l.starts_with("0,0,") || l.starts_with("-0,"))
        .expect("center row present")
        .split(',')
        .collect();
    assert_eq!(center_row[2], "");
    assert_eq!(center_row[3], "exterior");
    assert!(dir.path().join("field.svg").exists());
}

#[test]
fn eval_single_point_matches_library_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let config = benchmark_config(dir.path());
    let fem = synthetic_fem(dir.path());
    run(&[
        "solve",
        "--config",
        &config,
        "--fem",
        &fem,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let solution_path = dir.path().join("solution.txt");
    let points = dir.path().join("points.csv");
    write(&points, "x,y\n0.03,0.04\n");
    let out = run(&[
        "eval",
        "--solution",
        solution_path.to_str().unwrap(),
        "--points",
        points.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
    let value_field = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .to_string();

    let solution =
        coupling::read_solution(&std::fs::read_to_string(&solution_path).unwrap()).unwrap();
    let expected = field::interior_potential(&solution, Point2::new(0.03, 0.04)).unwrap();
    assert_eq!(value_field, expected.to_string());
}

#[test]
fn eval_exterior_point_is_flagged_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let config = benchmark_config(dir.path());
    let fem = synthetic_fem(dir.path());
    run(&[
        "solve",
        "--config",
        &config,
        "--fem",
        &fem,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let points = dir.path().join("points.csv");
    write(&points, "x,y\n0.0,0.0\n0.03,0.04\n");
    let out = run(&[
        "eval",
        "--solution",
        dir.path().join("solution.txt").to_str().unwrap(),
        "--points",
        points.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exterior"));
    let csv = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains("exterior"));
    assert!(csv.lines().nth(2).unwrap().contains("interior"));
}

#[test]
fn report_zero_measured_row_fails_with_data_exit() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("fixture.csv");
    write(&fixture, "measured,calculated\n0.0,1.0\n");
    let out = run(&[
        "report",
        "--fixture",
        fixture.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn converge_rejects_non_increasing_lists() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("converge.toml");
    write(
        &config,
        "[geometry]\nouter_radius = 2.0\ninner_radius = 1.0\n\n[converge]\nn_values = [80, 40]\nreference = \"log_r\"\n",
    );
    let out = run(&[
        "converge",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn converge_accepts_single_entry() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("converge.toml");
    write(
        &config,
        "[geometry]\nouter_radius = 2.0\ninner_radius = 1.0\n\n[converge]\nn_values = [20]\nreference = \"log_r\"\n",
    );
    let out = run(&[
        "converge",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--svg",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(dir.path().join("convergence.svg").exists());
}

#[test]
fn oracle_check_passes_and_rejects_zero_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "oracle-check",
        "--seed",
        "3",
        "--count",
        "40",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("oracle_check.csv").exists());

    let out = run(&[
        "oracle-check",
        "--count",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&["eval", "--solution", "nowhere.txt"]);
    // Neither --grid nor --points.
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["definitely-not-a-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}
