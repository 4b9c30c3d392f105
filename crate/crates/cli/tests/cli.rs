//! End-to-end runs of the `kitaev-de` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kitaev-de"));
    c.env_remove("KITAEV_DE_THREADS").env("RUST_LOG", "error");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn sidecar(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path.with_extension("json")).unwrap()).unwrap()
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

const V1_TRIVIAL: &[&str] = &["--variant", "1", "--j", "1", "--delta", "-1", "--mu", "-1.5", "--alpha", "inf"];
const V2: &[&str] = &[
    "--variant",
    "long-range-pairing-hopping",
    "--j",
    "-0.8",
    "--delta",
    "1",
    "--alpha",
    "0.2",
    "--beta",
    "0.2",
    "--r",
    "3",
];

#[test]
fn winding_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let mut args = vec!["--task", "winding", "--out", out.to_str().unwrap()];
    args.extend_from_slice(V1_TRIVIAL);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["nu", "nu_raw", "min_gap", "quantized"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.0);

    let side = sidecar(&out);
    assert_eq!(side["version"], kitaev_de::VERSION);
    let cfg = &side["config"];
    assert_eq!(cfg["alpha"], "inf");
    assert_eq!(cfg["samples"], 4096);
    assert_eq!(cfg["kernel_n"], 8192);
    assert_eq!(side["result"]["nu"], 0.0);
}

#[test]
fn critical_scan_columns_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/scan.csv");
    let mut args = vec!["--task", "critical-scan", "--start", "-2", "--stop", "0.5", "--step", "0.01", "--n", "2000"];
    args.extend_from_slice(V2);
    args.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["mu", "s", "chi_s", "flagged"]);
    assert_eq!(rows.len(), 251);
    let flagged: Vec<f64> = rows.iter().filter(|r| r[3] == "1").map(|r| r[0].parse().unwrap()).collect();
    for mu_c in [-1.5, -1.0, -0.42] {
        assert!(flagged.iter().any(|m| (m - mu_c).abs() <= 0.02), "nothing flagged near {mu_c}: {flagged:?}");
    }
    for m in &flagged {
        assert!([-1.5, -1.0, -0.42].iter().any(|c| (m - c).abs() < 0.1), "spurious flag at {m}");
    }
    // end points carry no central difference
    assert_eq!(rows[0][2], "");
    assert_eq!(rows[0][0], "-2.0");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let mut args =
            vec!["--task", "compare", "--param", "delta", "--start", "-0.3", "--stop", "0.3", "--step", "0.05"];
        args.extend_from_slice(&["--channels", "s,a,E,nu", "--l-max", "8", "--kernel-n", "1024", "--n", "400"]);
        args.extend_from_slice(&[
            "--variant",
            "1",
            "--j",
            "1",
            "--mu",
            "0.5",
            "--alpha",
            "1.5",
            "--out",
            out.to_str().unwrap(),
        ]);
        let o = run(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        csvs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.pop().unwrap()).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.starts_with("delta,s,chi_s,flagged_s,a,chi_a,flagged_a,E,chi_E,flagged_E,nu\n"));
}

#[test]
fn missing_range_names_r() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"task": "winding", "variant": "long-range-pairing-hopping", "J": -0.8, "delta": 1, "mu": -0.6,
            "alpha": 0.2, "beta": 0.2}"#,
    )
    .unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`r`"), "{}", stderr(&o));
}

#[test]
fn unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"task": "winding", "chemical_potential": 1}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("chemical_potential"));
}

#[test]
fn gapless_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    // gap closes at k = π when μ = J
    let o = run(&[
        "--task",
        "winding",
        "--variant",
        "1",
        "--j",
        "1",
        "--delta",
        "1",
        "--mu",
        "1",
        "--alpha",
        "inf",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Gapless"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let cfg = configs_dir().join("winding_v2_J-0.8_mu-0.6.json");
    let o = run(&["--config", cfg.to_str().unwrap(), "--j", "0.8", "--mu", "0.6", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(sidecar(&out)["result"]["nu"], 3.0);
    assert_eq!(sidecar(&out)["config"]["J"], 0.8);
}

#[test]
fn thread_count_from_environment() {
    let o =
        bin().args(["--task", "winding", "--check"]).args(V1_TRIVIAL).env("KITAEV_DE_THREADS", "3").output().unwrap();
    assert!(o.status.success());
    let cfg: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cfg["threads"], 3);
    let o = bin()
        .args(["--task", "winding", "--check"])
        .args(V1_TRIVIAL)
        .env("KITAEV_DE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`threads`"));
}

#[test]
fn mzm_profile_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = run(&[
        "--task",
        "mzm",
        "--variant",
        "1",
        "--j",
        "1",
        "--delta",
        "1",
        "--mu",
        "-0.5",
        "--alpha",
        "inf",
        "--n",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["site", "p_left_1", "p_right_1"]);
    assert_eq!(rows.len(), 100);
    let total: f64 = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    // left mode sits on the first sites
    assert!(rows[0][1].parse::<f64>().unwrap() > 0.5);
}

#[test]
fn fit_tasks_report_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = run(&[
        "--task",
        "fit-volume",
        "--variant",
        "1",
        "--j",
        "1",
        "--delta",
        "1",
        "--mu",
        "0",
        "--alpha",
        "inf",
        "--sizes",
        "200,400,600",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side = sidecar(&out);
    assert!(side["result"]["relative_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(read_csv(&out).0, ["N", "S", "S_fit"]);

    let out = dir.path().join("b.csv");
    let o = run(&[
        "--task",
        "fit-block",
        "--variant",
        "1",
        "--j",
        "1",
        "--delta",
        "-1",
        "--mu",
        "0.8",
        "--alpha",
        "0",
        "--basis",
        "x",
        "--kernel-n",
        "2048",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let side = sidecar(&out);
    assert_eq!(side["config"]["basis"], "X");
    assert!(side["result"]["residual_rms"].as_f64().unwrap() < 1e-3);
    assert_eq!(read_csv(&out).1.len(), 11);
}

#[test]
fn two_axis_sweep_orders_rows_by_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = run(&[
        "--task",
        "sweep",
        "--variant",
        "1",
        "--j",
        "1",
        "--alpha",
        "inf",
        "--start",
        "-2",
        "--stop",
        "2",
        "--step",
        "0.5",
        "--y-param",
        "delta",
        "--y-start",
        "-1",
        "--y-stop",
        "1",
        "--y-step",
        "0.5",
        "--channels",
        "nu",
        "--threads",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["mu", "delta", "nu"]);
    assert_eq!(rows.len(), 9 * 5);
    assert_eq!((rows[1][0].as_str(), rows[1][1].as_str()), ("-1.5", "-1.0"));
    // |μ| < 1 is topological with sign set by Δ; |μ| = 1, or Δ = 0 inside, is gapless
    for r in &rows {
        let (mu, delta): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let expect = if mu.abs() == 1.0 || (delta == 0.0 && mu.abs() < 1.0) {
            String::new()
        } else if mu.abs() < 1.0 {
            format!("{:?}", delta.signum())
        } else {
            "0.0".into()
        };
        assert_eq!(r[2], expect, "mu={mu} delta={delta}");
    }
}

#[test]
fn every_recipe_config_resolves() {
    let mut count = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let o = run(&["--config", path.to_str().unwrap(), "--check"]);
        assert!(o.status.success(), "{}: {}", path.display(), stderr(&o));
        let cfg: Value = serde_json::from_slice(&o.stdout).unwrap();
        let stem = path.file_stem().unwrap().to_str().unwrap();
        assert_eq!(cfg["out"], format!("results/{stem}.csv"), "{}", path.display());
        count += 1;
    }
    assert!(count >= 20);
}
