//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line and
//! then asserts, so `--nocapture` gives a readable checklist.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use cpnray_core::cpn::{
    advance_time, enabled_bindings, fire, run, ColourSet, Marking, Multiset, Net, Produced, SimState, StepEvent,
    TimedToken,
};
use cpnray_core::experiment::{run_experiment, write_outputs, ExperimentPlan};
use cpnray_core::raytrace::{
    build_net, failcheck_tm, get_tile_list, set_suc_ntp, tile_compl, Complexity, InvariantChecker, NodeDesc,
    NodeType, SceneConfig, Scenario, ScenarioParams,
};
use cpnray_core::{RngStream, SweepPoint};

fn report(n: u32, what: &str, ok: bool, detail: &str, elapsed: Duration, budget: Duration) -> bool {
    let in_time = elapsed <= budget;
    let pass = ok && in_time;
    println!(
        "criterion {n}: {} {what} ({detail}; {:.2?} of {:.0?})",
        if pass { "PASS" } else { "FAIL" },
        elapsed,
        budget
    );
    pass
}

fn ints(ms: &Multiset) -> Vec<(i64, u64)> {
    ms.iter().map(|(t, &c)| (t.value.as_int().unwrap(), c)).collect()
}

#[test]
fn criterion_1_token_game() {
    let started = Instant::now();
    let mut b = Net::builder();
    let p1 = b.place("p1", ColourSet::Int, false).unwrap();
    let p2 = b.place("p2", ColourSet::Int, false).unwrap();
    let p3 = b.place("p3", ColourSet::Int, false).unwrap();
    b.transition("t")
        .input(p1, "x")
        .input(p2, "y")
        .guard(|b| b.int("x") > b.int("y"))
        .output(p3, |b, _| Ok(vec![Produced::now(b.int("x"))]))
        .add()
        .unwrap();
    let net = b.build();
    let mut m = Marking::empty(&net);
    m.add_token(&net, p1, TimedToken::untimed(1), 1).unwrap();
    m.add_token(&net, p1, TimedToken::untimed(2), 7).unwrap();
    m.add_token(&net, p2, TimedToken::untimed(1), 4).unwrap();
    let mut state = SimState::new(m, 0);

    let bindings = enabled_bindings(&net, &state);
    let pairs: Vec<(i64, i64)> = bindings.iter().map(|b| (b.int("x"), b.int("y"))).collect();
    let mut ok = pairs == [(2, 1)];
    if ok {
        fire(&net, &mut state, &bindings[0]).unwrap();
        ok = ints(state.marking.get(p1)) == [(1, 1), (2, 6)] && ints(state.marking.get(p2)) == [(1, 3)];
    }
    let detail = format!(
        "bindings {pairs:?}, p1 = {}, p2 = {}",
        state.marking.get(p1),
        state.marking.get(p2)
    );
    let pass = report(1, "guarded binding and firing", ok, &detail, started.elapsed(), Duration::from_secs(1));
    assert!(pass, "{detail}");
}

#[test]
fn criterion_2_timed_firing() {
    let started = Instant::now();
    let mut b = Net::builder();
    let tp1 = b.place("tp1", ColourSet::Int, true).unwrap();
    let tp2 = b.place("tp2", ColourSet::Int, true).unwrap();
    b.transition("tt1")
        .input(tp1, "x")
        .output(tp2, |b, _| Ok(vec![Produced::after(b.int("x"), 10)]))
        .add()
        .unwrap();
    // drains tp2, so the stamped token has something to wait for
    b.transition("tt2").input(tp2, "x").add().unwrap();
    let net = b.build();
    let mut m = Marking::empty(&net);
    m.add_token(&net, tp1, TimedToken::at(1, 0), 1).unwrap();
    let mut state = SimState::new(m, 0);

    let bindings = enabled_bindings(&net, &state);
    let mut ok = bindings.len() == 1;
    let mut advanced = None;
    if ok {
        fire(&net, &mut state, &bindings[0]).unwrap();
        ok = state.marking.get(tp2).count(&TimedToken::at(1, 10)) == 1 && enabled_bindings(&net, &state).is_empty();
        advanced = advance_time(&net, &state);
        ok &= advanced == Some(10);
    }
    let detail = format!("tp2 = {}, advance_time = {advanced:?}", state.marking.get(tp2));
    let pass = report(2, "timestamp and time advance", ok, &detail, started.elapsed(), Duration::from_secs(1));
    assert!(pass, "{detail}");
}

#[test]
fn criterion_3_complexity_conservation() {
    let started = Instant::now();
    let mut gen = RngStream::new(0xC0FFEE);
    let mut failures = Vec::new();
    for i in 0..1000 {
        let tile_w = gen.discrete(1, 1_000).unwrap() as u32;
        let tile_h = gen.discrete(1, 1_000).unwrap() as u32;
        let width = gen.discrete(i64::from(tile_w), 12_000).unwrap() as u32;
        let height = gen.discrete(i64::from(tile_h), 9_000).unwrap() as u32;
        let complexity = gen.discrete(0, 200_000).unwrap() as u64;
        let seed = gen.next_u64();
        let scene = SceneConfig::new(width, height, tile_w, tile_h, Complexity::Fixed(complexity as i64));
        let tiles = get_tile_list(&scene, complexity, &mut RngStream::new(seed)).unwrap();
        let sum: u64 = tiles.iter().map(|t| t.complxt).sum();
        if sum != complexity || tiles.len() as u64 != scene.tile_count() {
            failures.push(format!("pair {i}: {} sums to {sum}, expected {complexity}", scene.label()));
        }
    }
    let small = SceneConfig::small(Complexity::Fixed(36_500)).tile_count();
    let big = SceneConfig::big(Complexity::Fixed(36_500)).tile_count();
    let ok = failures.is_empty() && small == 100 && big == 900;
    let detail = format!("{} of 1000 pairs off, grids {small} and {big}", failures.len());
    let pass = report(3, "complexity conservation", ok, &detail, started.elapsed(), Duration::from_secs(10));
    assert!(pass, "{detail}: {failures:?}");
}

#[test]
fn criterion_4_model_functions() {
    let started = Instant::now();
    let mut rng = RngStream::new(4);
    let base = [
        tile_compl(0, 500, &mut rng).unwrap() == 0,
        tile_compl(1, 500, &mut rng).unwrap() == 500,
        tile_compl(7, 0, &mut rng).unwrap() == 0,
    ];

    let params = ScenarioParams::default();
    let multiples = (0..10_000).all(|_| {
        let t = failcheck_tm(&params, &mut rng).unwrap();
        t > 0 && t.is_multiple_of(params.chck_per_ms)
    });

    let tile = get_tile_list(&SceneConfig::small(Complexity::Fixed(36_500)), 36_500, &mut rng).unwrap()[0];
    let client = NodeDesc { id: 1, nd_type: NodeType::Client };
    let master = NodeDesc { id: 0, nd_type: NodeType::Master };
    let trials = 100_000;
    let client_ok = (0..trials)
        .filter(|_| set_suc_ntp(tile, &client, &params, &mut rng).unwrap().c_suc)
        .count();
    let master_ok = (0..trials)
        .filter(|_| set_suc_ntp(tile, &master, &params, &mut rng).unwrap().c_suc)
        .count();
    let client_freq = client_ok as f64 / trials as f64;
    let master_freq = master_ok as f64 / trials as f64;

    let ok = base.iter().all(|&b| b) && multiples && (0.89..=0.91).contains(&client_freq) && master_freq == 1.0;
    let detail = format!(
        "base cases {base:?}, check multiples {multiples}, client {client_freq:.4}, master {master_freq:.4}"
    );
    let pass = report(4, "model functions", ok, &detail, started.elapsed(), Duration::from_secs(30));
    assert!(pass, "{detail}");
}

/// One scene, every step checked. Returns (violations, failure-path firings).
fn checked_run(nodes: u32, scenario: Scenario, seed: u64) -> (Vec<String>, u64) {
    let mut rng = RngStream::new(seed);
    let params = ScenarioParams::default().with_nodes(nodes).with_scenario(scenario);
    let model = build_net(&SceneConfig::small(Complexity::Fixed(36_500)), &params, &mut rng).unwrap();
    let mut state = SimState::with_rng(model.initial.clone(), rng);
    let mut checker = InvariantChecker::new(&model);
    let complete = model.transitions.complete_scene;
    let end = run(
        &model.net,
        &mut state,
        |_, ev| ev.and_then(StepEvent::fired).is_some_and(|b| b.transition() == complete),
        &mut [&mut checker],
        Some(10_000_000),
    );
    let mut violations = checker.violations.clone();
    if let Err(e) = end {
        violations.push(e.to_string());
    }
    if checker.steps_checked == 0 {
        violations.push("no steps observed".into());
    }
    (violations, checker.failure_path_firings)
}

#[test]
fn criterion_5_structural_invariants() {
    let started = Instant::now();
    let runs = 100u64;
    let real: Vec<_> = (0..runs).into_par_iter().map(|s| checked_run(8, Scenario::Real, s)).collect();
    let ideal: Vec<_> = (0..runs).into_par_iter().map(|s| checked_run(8, Scenario::Ideal, 1_000 + s)).collect();

    let real_bad: Vec<&String> = real.iter().flat_map(|(v, _)| v).collect();
    let ideal_bad: Vec<&String> = ideal.iter().flat_map(|(v, _)| v).collect();
    let real_failures: u64 = real.iter().map(|(_, f)| f).sum();
    let ideal_failures: u64 = ideal.iter().map(|(_, f)| f).sum();
    let ok = real_bad.is_empty() && ideal_bad.is_empty() && ideal_failures == 0;
    let detail = format!(
        "{runs} real runs with {} violations and {real_failures} failure-path firings; \
         {runs} ideal runs with {} violations and {ideal_failures} failure-path firings",
        real_bad.len(),
        ideal_bad.len()
    );
    let pass = report(5, "structural invariants", ok, &detail, started.elapsed(), Duration::from_secs(300));
    assert!(pass, "{detail}: {real_bad:?} {ideal_bad:?}");
}

fn means(points: &[SweepPoint]) -> BTreeMap<(String, Scenario, u32), f64> {
    points
        .iter()
        .map(|p| ((p.scene.clone(), p.scenario, p.nodes), p.mean_ms))
        .collect()
}

#[test]
fn criterion_6_scenario_ordering() {
    let started = Instant::now();
    let plan = ExperimentPlan {
        scenes: vec![SceneConfig::small(Complexity::Fixed(36_500))],
        node_counts: vec![2, 5, 10, 15, 20, 25],
        scenarios: vec![Scenario::Ideal, Scenario::Real],
        replications: 30,
        base_seed: 6,
        ..Default::default()
    };
    let result = run_experiment(&plan).unwrap();
    let m = means(&result.points);
    let scene = plan.scenes[0].label();
    let mut rows = Vec::new();
    let mut ok = result.aborted.is_empty();
    for &n in &plan.node_counts {
        let ideal = m[&(scene.clone(), Scenario::Ideal, n)];
        let real = m[&(scene.clone(), Scenario::Real, n)];
        ok &= real >= ideal;
        rows.push(format!("{n}: {:.0}s vs {:.0}s", real / 1000.0, ideal / 1000.0));
    }
    let detail = format!("real vs ideal means {}", rows.join(", "));
    let pass = report(6, "real never faster than ideal", ok, &detail, started.elapsed(), Duration::from_secs(600));
    assert!(pass, "{detail}");
}

#[test]
fn criterion_7_diminishing_returns() {
    let started = Instant::now();
    let plan = ExperimentPlan {
        node_counts: vec![1, 2, 10, 25],
        scenarios: vec![Scenario::Ideal],
        base_seed: 7,
        ..Default::default()
    };
    let result = run_experiment(&plan).unwrap();
    let m = means(&result.points);
    let mut ok = result.aborted.is_empty();
    let mut rows = Vec::new();
    for scene in &plan.scenes {
        let at = |n| m[&(scene.label(), Scenario::Ideal, n)];
        let early = at(2) - at(10);
        let late = at(10) - at(25);
        ok &= late < early && at(2) < at(1);
        rows.push(format!(
            "{}: 2->10 gains {:.0}s, 10->25 gains {:.0}s, 1 node {:.0}s, 2 nodes {:.0}s",
            scene.label(),
            early / 1000.0,
            late / 1000.0,
            at(1) / 1000.0,
            at(2) / 1000.0
        ));
    }
    let detail = rows.join("; ");
    let pass = report(7, "diminishing returns", ok, &detail, started.elapsed(), Duration::from_secs(600));
    assert!(pass, "{detail}");
}

fn output_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    files
}

#[test]
fn criterion_8_determinism() {
    let started = Instant::now();
    let plan = ExperimentPlan::default();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_outputs(&run_experiment(&plan).unwrap(), a.path()).unwrap();
    write_outputs(&run_experiment(&plan).unwrap(), b.path()).unwrap();
    let fa = output_files(a.path());
    let fb = output_files(b.path());

    let compared: Vec<&String> = fa
        .keys()
        .filter(|k| k.ends_with(".csv") || k.ends_with(".dat"))
        .collect();
    let differing: Vec<&String> = fa.keys().filter(|k| fb.get(*k) != fa.get(*k)).collect();
    let ok = fa.keys().eq(fb.keys()) && differing.is_empty() && compared.len() == 5;
    let detail = format!(
        "{} csv/dat files and {} files overall compared, {} differ",
        compared.len(),
        fa.len(),
        differing.len()
    );
    let pass = report(8, "byte-identical sweep outputs", ok, &detail, started.elapsed(), Duration::from_secs(900));
    assert!(pass, "{detail}: {differing:?}");
}
