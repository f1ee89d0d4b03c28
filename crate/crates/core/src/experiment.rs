//! Replicated node-count sweeps over the raytracing model.
//!
//! Every replication gets its own stream seeded from
//! `derive_seed(derive_seed(base_seed, point_index), replication)`, where
//! `point_index` enumerates (scene, scenario, node count) in plan order.
//! Replications run in parallel and are merged by index, so outputs do not
//! depend on thread count or completion order.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cpn::{run, SimState, StepEvent};
use crate::error::{ConfigError, IoError, RunError};
use crate::monitor::{write_records, SceneMonitor, SceneRecord};
use crate::raytrace::{build_net, Complexity, SceneConfig, Scenario, ScenarioParams};
use crate::stochastic::{derive_seed, RngStream};

pub const DEFAULT_REPLICATIONS: u32 = 30;
pub const DEFAULT_MAX_STEPS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub scenes: Vec<SceneConfig>,
    pub node_counts: Vec<u32>,
    pub scenarios: Vec<Scenario>,
    pub replications: u32,
    pub base_seed: u64,
    /// Template for every run; `node_count` and `scenario` are overridden per point.
    pub params: ScenarioParams,
    /// Per-replication step ceiling.
    pub max_steps: Option<u64>,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl Default for ExperimentPlan {
    /// Small and big scene at complexity 36500, 1..=25 nodes, both scenarios.
    fn default() -> Self {
        ExperimentPlan {
            scenes: vec![
                SceneConfig::small(Complexity::Fixed(36_500)),
                SceneConfig::big(Complexity::Fixed(36_500)),
            ],
            node_counts: (1..=25).collect(),
            scenarios: vec![Scenario::Ideal, Scenario::Real],
            replications: DEFAULT_REPLICATIONS,
            base_seed: 1,
            params: ScenarioParams::default(),
            max_steps: Some(DEFAULT_MAX_STEPS),
            threads: None,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.replications < 1 {
            return Err(ConfigError::Plan("replications must be at least 1".into()));
        }
        if self.node_counts.is_empty() || self.node_counts.contains(&0) {
            return Err(ConfigError::Plan("node counts must be non-empty and each at least 1".into()));
        }
        if self.scenes.is_empty() || self.scenarios.is_empty() {
            return Err(ConfigError::Plan("need at least one scene and one scenario".into()));
        }
        for scene in &self.scenes {
            scene.validate()?;
        }
        for point in self.points() {
            point.params.validate()?;
        }
        Ok(())
    }

    /// Sweep points in plan order.
    pub fn points(&self) -> Vec<PlanPoint> {
        let mut out = Vec::new();
        for scene in &self.scenes {
            for &scenario in &self.scenarios {
                for &nodes in &self.node_counts {
                    out.push(PlanPoint {
                        index: out.len() as u64,
                        scene: *scene,
                        params: self.params.clone().with_nodes(nodes).with_scenario(scenario),
                    });
                }
            }
        }
        out
    }

    pub fn replication_seed(&self, point_index: u64, replication: u32) -> u64 {
        derive_seed(derive_seed(self.base_seed, point_index), u64::from(replication))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanPoint {
    pub index: u64,
    pub scene: SceneConfig,
    pub params: ScenarioParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub scene: String,
    pub scenario: Scenario,
    pub nodes: u32,
    pub mean_ms: f64,
    pub std_ms: f64,
    pub replications: u32,
    pub mean_failures: f64,
}

/// Raw monitor output of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecords {
    pub scene: String,
    pub scenario: Scenario,
    pub nodes: u32,
    pub records: Vec<SceneRecord>,
}

/// A replication excluded from the aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct Aborted {
    pub scene: String,
    pub scenario: Scenario,
    pub nodes: u32,
    pub replication: u32,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentResult {
    pub points: Vec<SweepPoint>,
    pub records: Vec<PointRecords>,
    pub aborted: Vec<Aborted>,
}

/// Runs one replication until `scenes_per_run` scenes complete.
pub fn run_replication(
    scene: &SceneConfig,
    params: &ScenarioParams,
    seed: u64,
    max_steps: Option<u64>,
) -> Result<Vec<SceneRecord>, RunError> {
    let mut rng = RngStream::new(seed);
    let model = build_net(scene, params, &mut rng)?;
    let mut state = SimState::with_rng(model.initial.clone(), rng);
    let mut monitor = SceneMonitor::new(&model, seed);
    let complete = model.transitions.complete_scene;
    let target = params.scenes_per_run;
    let mut done = 0u32;
    run(
        &model.net,
        &mut state,
        |_, ev| {
            if ev.and_then(StepEvent::fired).is_some_and(|b| b.transition() == complete) {
                done += 1;
            }
            done >= target
        },
        &mut [&mut monitor],
        max_steps,
    )?;
    Ok(monitor.into_records())
}

/// Mean and sample standard deviation (zero for fewer than two values).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult, ConfigError> {
    plan.validate()?;
    let points = plan.points();
    let jobs: Vec<(usize, u32)> = (0..points.len())
        .flat_map(|p| (0..plan.replications).map(move |r| (p, r)))
        .collect();

    let work = || -> Vec<Result<Vec<SceneRecord>, RunError>> {
        jobs.par_iter()
            .map(|&(p, r)| {
                let point = &points[p];
                let seed = plan.replication_seed(point.index, r);
                run_replication(&point.scene, &point.params, seed, plan.max_steps)
            })
            .collect()
    };
    let outcomes = match plan.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ConfigError::Plan(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let mut result = ExperimentResult::default();
    let mut outcomes = outcomes.into_iter();
    for point in &points {
        let label = point.scene.label();
        let mut records = Vec::new();
        let mut included = 0u32;
        for r in 0..plan.replications {
            match outcomes.next().expect("one outcome per job") {
                Ok(recs) => {
                    included += 1;
                    records.extend(recs);
                }
                Err(e) => result.aborted.push(Aborted {
                    scene: label.clone(),
                    scenario: point.params.scenario,
                    nodes: point.params.node_count,
                    replication: r,
                    seed: plan.replication_seed(point.index, r),
                    error: e.to_string(),
                }),
            }
        }
        let durations: Vec<f64> = records.iter().map(|r| r.duration_ms as f64).collect();
        let failures: Vec<f64> = records.iter().map(|r| r.failures as f64).collect();
        let (mean_ms, std_ms) = mean_std(&durations);
        let (mean_failures, _) = mean_std(&failures);
        result.points.push(SweepPoint {
            scene: label.clone(),
            scenario: point.params.scenario,
            nodes: point.params.node_count,
            mean_ms,
            std_ms,
            replications: included,
            mean_failures,
        });
        result.records.push(PointRecords {
            scene: label,
            scenario: point.params.scenario,
            nodes: point.params.node_count,
            records,
        });
    }
    Ok(result)
}

fn sorted(points: &[SweepPoint]) -> Vec<&SweepPoint> {
    let mut rows: Vec<&SweepPoint> = points.iter().collect();
    rows.sort_by(|a, b| (&a.scene, a.scenario, a.nodes).cmp(&(&b.scene, b.scenario, b.nodes)));
    rows
}

/// Summary CSV, rows sorted by (scene, scenario, nodes).
pub fn emit_csv(points: &[SweepPoint], path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(BufWriter::new(file));
    w.write_record(["scene", "scenario", "nodes", "mean_ms", "std_ms", "replications", "mean_failures"])
        .map_err(|e| IoError::csv(path, e))?;
    for p in sorted(points) {
        w.serialize(p).map_err(|e| IoError::csv(path, e))?;
    }
    let mut inner = w.into_inner().map_err(|e| IoError::io(path, e.into_error()))?;
    inner.flush().map_err(|e| IoError::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepPoint>, IoError> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| IoError::csv(path, e))?;
    r.deserialize().collect::<Result<_, _>>().map_err(|e| IoError::csv(path, e))
}

/// One `<scene>_<scenario>.dat` series per (scene, scenario) under `dir`:
/// node count and mean duration in seconds, whitespace separated.
pub fn emit_plotdata(points: &[SweepPoint], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, IoError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    let mut series: BTreeMap<(&str, Scenario), Vec<&SweepPoint>> = BTreeMap::new();
    for p in sorted(points) {
        series.entry((&p.scene, p.scenario)).or_default().push(p);
    }
    let mut written = Vec::new();
    for ((scene, scenario), rows) in series {
        let path = dir.join(format!("{scene}_{scenario}.dat"));
        let mut text = String::from("# nodes mean_s\n");
        for p in rows {
            text.push_str(&format!("{} {}\n", p.nodes, p.mean_ms / 1000.0));
        }
        fs::write(&path, text).map_err(|e| IoError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn write_aborted(aborted: &[Aborted], path: &Path) -> Result<(), IoError> {
    let mut text = String::from("scene\tscenario\tnodes\treplication\tseed\terror\n");
    for a in aborted {
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            a.scene,
            a.scenario,
            a.nodes,
            a.replication,
            a.seed,
            a.error.replace(['\t', '\n'], " ")
        ));
    }
    let mut f = File::create(path).map_err(|e| IoError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| IoError::io(path, e))
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub summary: PathBuf,
    pub plots: Vec<PathBuf>,
    pub records: Vec<PathBuf>,
    pub aborted: PathBuf,
}

/// Writes `summary.csv`, `plot/*.dat`, one `records_<scene>_<scenario>.tsv`
/// per series and `aborted.tsv` under `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: impl AsRef<Path>) -> Result<OutputFiles, IoError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
    let summary = dir.join("summary.csv");
    emit_csv(&result.points, &summary)?;
    let plots = emit_plotdata(&result.points, dir.join("plot"))?;

    let mut grouped: BTreeMap<(&str, Scenario), Vec<SceneRecord>> = BTreeMap::new();
    for pr in &result.records {
        grouped
            .entry((&pr.scene, pr.scenario))
            .or_default()
            .extend(pr.records.iter().cloned());
    }
    let mut records = Vec::new();
    for ((scene, scenario), recs) in grouped {
        let path = dir.join(format!("records_{scene}_{scenario}.tsv"));
        write_records(&recs, &path)?;
        records.push(path);
    }
    let aborted = dir.join("aborted.tsv");
    write_aborted(&result.aborted, &aborted)?;
    Ok(OutputFiles {
        summary,
        plots,
        records,
        aborted,
    })
}
