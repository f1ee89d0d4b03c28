//! Sweep aggregates checked against a streaming recomputation from the raw
//! per-scene records.

use cpnray_core::experiment::{read_csv, run_experiment, write_outputs, ExperimentPlan};
use cpnray_core::monitor::read_records;
use cpnray_core::{Complexity, SceneConfig, Scenario};

/// Welford's running mean and sample variance.
fn welford(xs: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for x in xs {
        n += 1.0;
        let d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    let var = if n > 1.0 { m2 / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn plan() -> ExperimentPlan {
    ExperimentPlan {
        scenes: vec![SceneConfig::new(4_000, 3_000, 1_000, 750, Complexity::Range { lo: 10_000, hi: 70_000 })],
        node_counts: vec![1, 3, 6],
        scenarios: vec![Scenario::Ideal, Scenario::Real],
        replications: 12,
        base_seed: 99,
        ..Default::default()
    }
}

#[test]
fn summary_matches_streaming_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let result = run_experiment(&plan()).unwrap();
    let files = write_outputs(&result, dir.path()).unwrap();
    let summary = read_csv(&files.summary).unwrap();
    assert_eq!(summary.len(), 6);

    for p in &summary {
        let path = dir.path().join(format!("records_{}_{}.tsv", p.scene, p.scenario));
        let recs: Vec<_> = read_records(&path)
            .unwrap()
            .into_iter()
            .filter(|r| r.node_count == p.nodes)
            .collect();
        assert_eq!(recs.len() as u32, p.replications);
        let (mean, std) = welford(recs.iter().map(|r| r.duration_ms as f64));
        assert!(close(mean, p.mean_ms), "{mean} vs {}", p.mean_ms);
        assert!(close(std, p.std_ms), "{std} vs {}", p.std_ms);
        let (fails, _) = welford(recs.iter().map(|r| r.failures as f64));
        assert!(close(fails, p.mean_failures), "{fails} vs {}", p.mean_failures);
    }
}

#[test]
fn ideal_points_report_no_failures() {
    let result = run_experiment(&plan()).unwrap();
    for p in result.points.iter().filter(|p| p.scenario == Scenario::Ideal) {
        assert_eq!(p.mean_failures, 0.0);
    }
}

#[test]
fn csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let result = run_experiment(&plan()).unwrap();
    let files = write_outputs(&result, dir.path()).unwrap();
    let back = read_csv(&files.summary).unwrap();
    let mut expected = result.points.clone();
    expected.sort_by(|a, b| (&a.scene, a.scenario, a.nodes).cmp(&(&b.scene, b.scenario, b.nodes)));
    assert_eq!(back, expected);
}
