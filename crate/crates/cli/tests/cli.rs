use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn lrh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrh")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let o = lrh(args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn values(csv: &str) -> Vec<f64> {
    csv.lines().filter(|l| !l.trim().is_empty()).map(|l| l.trim().parse().unwrap()).collect()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/synthetic_counts.csv")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn make_signal_hits_the_range() {
    let v = values(&ok(&["make-signal", "--shape", "bumps", "--n", "256", "--min", "1", "--max", "12.565"]));
    assert_eq!(v.len(), 256);
    assert_eq!(v.iter().cloned().fold(f64::INFINITY, f64::min), 1.0);
    assert_eq!(v.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 12.565);
}

#[test]
fn sampling_follows_the_seed() {
    let dir = TempDir::new().unwrap();
    let theta = write(&dir, "theta.csv", &"5\n".repeat(64));
    let a = ok(&["--seed", "9", "sample", "--family", "poisson", "--in", &theta]);
    let b = ok(&["--seed", "9", "sample", "--family", "poisson", "--in", &theta]);
    let c = ok(&["--seed", "10", "sample", "--family", "poisson", "--in", &theta]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(values(&a).iter().all(|x| x.fract() == 0.0 && *x >= 0.0));
}

#[test]
fn json_transforms_invert() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.csv", "3\n0\n7\n2\n2\n9\n1\n4\n");
    for (kind, family) in [("haar", None), ("lrh", Some("poisson")), ("stationary", None)] {
        let dec = path(&dir, &format!("{kind}.json"));
        let mut fwd = vec!["--format", "json", "--out", &dec, "transform", "--kind", kind, "--in", &x];
        if let Some(f) = family {
            fwd.extend(["--family", f]);
        }
        ok(&fwd);
        let back = values(&ok(&["transform", "--kind", kind, "--inverse", "--in", &dec]));
        let orig = [3.0, 0.0, 7.0, 2.0, 2.0, 9.0, 1.0, 4.0];
        for (b, o) in back.iter().zip(orig) {
            assert!((b - o).abs() < 1e-10, "{kind}: {back:?}");
        }
    }
}

#[test]
fn csv_decomposition_layout() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.csv", "1\n2\n3\n4\n");
    let out = ok(&["transform", "--in", &x]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "kind,scale,location,value");
    // 2 + 1 details and one top smooth
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("smooth,2,1,"));
}

#[test]
fn stabilize_then_unstabilize() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.csv", "4\n0\n1\n6\n2\n2\n0\n3\n");
    let g = path(&dir, "g.csv");
    ok(&["--out", &g, "stabilize", "--family", "poisson", "--in", &x]);
    let back = values(&ok(&["unstabilize", "--family", "poisson", "--in", &g]));
    for (b, o) in back.iter().zip([4.0, 0.0, 1.0, 6.0, 2.0, 2.0, 0.0, 3.0]) {
        assert!((b - o).abs() < 1e-9, "{back:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(lrh(&["stabilize", "--bogus"]).status.code(), Some(2));
    let odd = write(&dir, "odd.csv", "1\n2\n3\n");
    assert_eq!(lrh(&["stabilize", "--family", "poisson", "--in", &odd]).status.code(), Some(3));
    let neg = write(&dir, "neg.csv", "1\n-2\n");
    assert_eq!(lrh(&["stabilize", "--family", "poisson", "--in", &neg]).status.code(), Some(3));
    let far = write(&dir, "far.csv", "0\n100\n");
    let o = lrh(&["unstabilize", "--family", "poisson", "--in", &far]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn counts_file_is_smoothed() {
    let out = ok(&["denoise-counts", "--in", fixture().to_str().unwrap(), "--column", "count"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("count,estimate"));
    let est: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(est.len(), 1024);
    assert!(est.iter().all(|e| e.is_finite()));
    let plateau = est[350..500].iter().sum::<f64>() / 150.0;
    assert!((plateau - 6.0).abs() < 1.0, "{plateau}");
}

#[test]
fn counts_window_and_report() {
    let dir = TempDir::new().unwrap();
    let report = path(&dir, "report.json");
    let out = ok(&[
        "denoise-counts",
        "--in",
        fixture().to_str().unwrap(),
        "--column",
        "1",
        "--window",
        "256:768",
        "--report",
        &report,
    ]);
    assert_eq!(out.lines().count(), 513);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["offset"], 256);
    assert_eq!(r["n"], 512);

    let bad = write(&dir, "bad.csv", "count\n1\n2\n3\n");
    assert_eq!(lrh(&["denoise-counts", "--in", &bad]).status.code(), Some(3));
    let out = ok(&["denoise-counts", "--in", &bad, "--truncate"]);
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn stab_study_writes_sidecars() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "stab.json");
    ok(&["--out", &out, "stab-study", "--model", "1b", "--n", "256"]);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["n"], 256);
    for suffix in ["qq", "acf", "residual"] {
        let p = dir.path().join(format!("stab.{suffix}.csv"));
        assert!(p.exists(), "{suffix} sidecar missing");
    }
    assert_eq!(lrh(&["stab-study", "--model", "2a"]).status.code(), Some(3));
}

#[test]
fn coeff_study_report() {
    let out = ok(&["coeff-study", "--family", "chisq:1", "--left", "1", "--right", "2", "--reps", "50"]);
    let r: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["g"].as_array().unwrap().len(), 50);
    assert_eq!(r["meta"]["seed"], 12345);
}

#[test]
fn plot_renders_svg() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "d.csv", "x,y\n0,1\n1,3\n2,2\n");
    let svg = ok(&["plot", "--in", &data, "--title", "demo"]);
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("demo"));
    assert!(svg.trim_end().ends_with("</svg>"));
}
