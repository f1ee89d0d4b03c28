//! Data collection on the raytracing model.
//!
//! [`SceneMonitor`] watches fired transitions and emits one [`SceneRecord`]
//! per completed scene: how long the scene took from the moment it was sent
//! to the cluster, how many nodes actually worked on it and how many jobs
//! failed along the way.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::colour::Time;
use crate::cpn::{Monitor, Net, SimState, StepEvent};
use crate::error::IoError;
use crate::raytrace::{ModelTransitions, RaytraceModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneRecord {
    pub scene_index: u32,
    pub duration_ms: u64,
    pub node_count: u32,
    pub nodes_used: u32,
    pub failures: u64,
    pub complexity: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct OpenScene {
    start: Time,
    complexity: u64,
    failures: u64,
    nodes: BTreeSet<u32>,
}

#[derive(Debug, Clone)]
pub struct SceneMonitor {
    transitions: ModelTransitions,
    node_count: u32,
    seed: u64,
    open: Option<OpenScene>,
    records: Vec<SceneRecord>,
}

impl SceneMonitor {
    pub fn new(model: &RaytraceModel, seed: u64) -> Self {
        SceneMonitor {
            transitions: model.transitions,
            node_count: model.params.node_count,
            seed,
            open: None,
            records: Vec::new(),
        }
    }

    pub fn records(&self) -> &[SceneRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<SceneRecord> {
        self.records
    }
}

impl Monitor for SceneMonitor {
    fn observe(&mut self, _net: &Net, state: &SimState, event: &StepEvent) {
        let StepEvent::Fired { binding, time } = event else {
            return;
        };
        let t = binding.transition();
        let tr = &self.transitions;
        if t == tr.send_scene {
            self.open = Some(OpenScene {
                start: *time,
                complexity: binding.int("c").max(0) as u64,
                failures: 0,
                nodes: BTreeSet::new(),
            });
        } else if t == tr.suc_rtr_start || t == tr.unsuc_rtr_start {
            if let Some(open) = self.open.as_mut() {
                open.nodes.insert(binding.job("t").1.id);
                if t == tr.unsuc_rtr_start {
                    open.failures += 1;
                }
            }
        } else if t == tr.complete_scene {
            if let Some(open) = self.open.take() {
                debug_assert_eq!(*time, state.now);
                self.records.push(SceneRecord {
                    scene_index: self.records.len() as u32,
                    duration_ms: time - open.start,
                    node_count: self.node_count,
                    nodes_used: open.nodes.len() as u32,
                    failures: open.failures,
                    complexity: open.complexity,
                    seed: self.seed,
                });
            }
        }
    }
}

/// Tab-separated, header first, one record per line.
pub fn write_records(records: &[SceneRecord], path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .from_writer(BufWriter::new(file));
    w.write_record(["scene_index", "duration_ms", "node_count", "nodes_used", "failures", "complexity", "seed"])
        .map_err(|e| IoError::csv(path, e))?;
    for r in records {
        w.serialize(r).map_err(|e| IoError::csv(path, e))?;
    }
    let mut inner = w.into_inner().map_err(|e| IoError::io(path, e.into_error()))?;
    inner.flush().map_err(|e| IoError::io(path, e))
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<SceneRecord>, IoError> {
    let path = path.as_ref();
    let mut r = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .from_path(path)
        .map_err(|e| IoError::csv(path, e))?;
    r.deserialize().collect::<Result<_, _>>().map_err(|e| IoError::csv(path, e))
}
