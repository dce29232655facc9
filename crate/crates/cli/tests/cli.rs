use std::path::Path;
use std::process::Command;

use ngopt_core::optimizer::OptimizationReport;

fn ngopt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ngopt"))
}

fn read_grid(path: &Path) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let xs: Vec<f64> = r
        .headers()
        .unwrap()
        .iter()
        .skip(1)
        .map(|s| s.parse().unwrap())
        .collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    (xs, rows)
}

#[test]
fn odd_cat_run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let status = ngopt()
        .args(["run", "cat-odd", "--target", "5", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    for f in [
        "report.json",
        "tables.csv",
        "wigner_before.csv",
        "wigner_after.csv",
        "params.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }

    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: OptimizationReport = serde_json::from_str(&text).unwrap();
    assert!(report.fidelity >= 0.99);
    assert!((report.probability_after / 4.6e-2 - 1.0).abs() < 0.1);
    let again = serde_json::to_string_pretty(&report).unwrap();
    assert_eq!(again.trim_end(), text.trim_end());

    let tables = std::fs::read_to_string(dir.path().join("tables.csv")).unwrap();
    let stages: Vec<&str> = tables
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(stages, ["original", "reduced", "final"]);

    for f in ["wigner_before.csv", "wigner_after.csv"] {
        let (xs, rows) = read_grid(&dir.path().join(f));
        assert_eq!(rows.len(), xs.len());
        let h = xs[1] - xs[0];
        let total: f64 = rows.iter().flat_map(|r| r[1..].iter()).sum::<f64>() * h * h;
        assert!((total - 1.0).abs() < 0.02, "{f}: {total}");
        assert!((rows[0][0] + 8.0).abs() < 1e-9);
    }
}

#[test]
fn random_run_records_gain() {
    let dir = tempfile::tempdir().unwrap();
    let status = ngopt()
        .args([
            "run",
            "random",
            "--seed",
            "7",
            "--target",
            "auto",
            "--no-metrics",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let report: OptimizationReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert!(report.probability_after >= report.probability_before);
    assert_eq!(report.after.photons, vec![3, 3]);
    let params: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("params.json")).unwrap())
            .unwrap();
    assert_eq!(params["seed"], 7);
    assert_eq!(params["resolved_target"], serde_json::json!([3, 3]));
}

#[test]
fn custom_block_ordered_moments() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("gen.json");
    std::fs::write(
        &input,
        r#"{"ordering": "block", "photons": [15], "control_covariance": [[0.6016, 0.0], [0.0, 2.8757]]}"#,
    )
    .unwrap();
    let out = ngopt()
        .args(["run", "custom", "--target", "5", "--no-metrics", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: OptimizationReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert!(
        (report.probability_before / 1.77e-6 - 1.0).abs() < 0.05,
        "{}",
        report.probability_before
    );
}

#[test]
fn gkp_sweep_has_a_minimum_per_n() {
    let dir = tempfile::tempdir().unwrap();
    let status = ngopt()
        .args(["run", "gkp", "--sweep-s0", "--jobs", "2", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let mut r = csv::Reader::from_path(dir.path().join("sweep_s0.csv")).unwrap();
    let rows: Vec<(usize, f64)> = r
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[4].parse().unwrap())
        })
        .collect();
    let best = |n: usize| {
        rows.iter()
            .filter(|r| r.0 == n)
            .map(|r| r.1)
            .fold(f64::INFINITY, f64::min)
    };
    assert!(best(2) > best(4) && best(4) > best(6));
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "").unwrap();
    let status = ngopt()
        .args(["run", "cat-odd", "--out"])
        .arg(file.join("sub"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    let status = ngopt()
        .args(["run", "cps", "--sweep-s0"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let status = ngopt()
        .args(["run", "custom"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn tail_tolerance_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = ngopt()
        .env("NGOPT_TAIL_TOL", "1e-6")
        .args(["run", "cat-even", "--no-metrics", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let params: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("params.json")).unwrap())
            .unwrap();
    assert_eq!(params["tail_tol"], 1e-6);
    let status = ngopt()
        .env("NGOPT_TAIL_TOL", "tiny")
        .args(["run", "cat-even", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}
