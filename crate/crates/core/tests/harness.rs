use std::path::PathBuf;

use lrh::harness::counts::write_count_estimate;
use lrh::harness::report::{mse_sidecars, write_json};
use lrh::harness::*;
use lrh::*;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/synthetic_counts.csv")
}

/// Intensity the fixture was drawn from.
fn fixture_intensity() -> Vec<f64> {
    (0..1024usize)
        .map(|i| {
            let base = if i < 300 {
                2.0
            } else if i < 550 {
                6.0
            } else {
                3.0
            };
            let spike = match i {
                100 | 101 => 25.0,
                700 => 40.0,
                850..=852 => 15.0,
                _ => 0.0,
            };
            base + spike
        })
        .collect()
}

#[test]
fn fixture_loads_and_smoothing_reduces_error() {
    let cs = load_counts(&fixture(), &ColumnSpec::Name("count".into()), Windowing::Exact).unwrap();
    assert_eq!(cs.counts.len(), 1024);
    let truth = fixture_intensity();
    let cfg = DenoiseConfig::universal(1024, NoiseFamily::Poisson).unwrap();
    let est = denoise_counts(&cs, &cfg).unwrap();
    let raw = lrh::denoise::mse(&cs.to_signal().unwrap(), &truth).unwrap();
    let smoothed = lrh::denoise::mse(&est, &truth).unwrap();
    assert!(smoothed < raw, "{smoothed} vs {raw}");
    // the plateau levels are recovered away from the spikes
    let mean = |a: usize, b: usize| est[a..b].iter().sum::<f64>() / (b - a) as f64;
    assert!((mean(150, 290) - 2.0).abs() < 0.5);
    assert!((mean(320, 540) - 6.0).abs() < 0.8);
    assert!((mean(560, 690) - 3.0).abs() < 0.6);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_count_estimate(&cs, &est, &mut a).unwrap();
    write_count_estimate(&cs, &denoise_counts(&cs, &cfg).unwrap(), &mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fixture_window_and_truncation() {
    let w = load_counts(&fixture(), &ColumnSpec::Index(1), "512:1024".parse().unwrap()).unwrap();
    assert_eq!((w.counts.len(), w.offset), (512, 512));
    assert_eq!(w.label.as_deref(), Some("count"));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = MseStudyConfig { n: 128, ..MseStudyConfig::table(4) };
    let a = mse_study(&cfg, RngSeed(9), 1).unwrap();
    let b = mse_study(&cfg, RngSeed(9), 2).unwrap();
    let pa = dir.path().join("a.json");
    let pb = dir.path().join("b.json");
    write_json(&a, &pa).unwrap();
    write_json(&b, &pb).unwrap();
    assert_eq!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
    let files = mse_sidecars(&a, &pa).unwrap();
    let boxplot = std::fs::read_to_string(&files[0]).unwrap();
    assert_eq!(boxplot.lines().count(), 9);
    let c = mse_study(&cfg, RngSeed(10), 1).unwrap();
    assert_ne!(a.cells[0].mse, c.cells[0].mse);
}

#[test]
fn paired_design_preserves_kept_set_inclusion() {
    let n = 256;
    let model = SimModel::BumpsExponential;
    let truth = model.truth(n).unwrap();
    for r in 0..10 {
        let x = lrh::sampling::sample_family_with(
            &truth,
            model.family(),
            &mut RngSeed(3).substream(model.stream(r)),
        )
        .unwrap();
        let cfg = DenoiseConfig::universal(n, model.family()).unwrap();
        let g = lrh::denoise::kept_mask(&x, &cfg).unwrap();
        let f = lrh::denoise::kept_mask(&x, &cfg.with_statistic(Statistic::Fisz)).unwrap();
        let kept_g: usize = g.iter().flatten().filter(|k| **k).count();
        let kept_f: usize = f.iter().flatten().filter(|k| **k).count();
        assert!(kept_g >= kept_f);
    }
}
