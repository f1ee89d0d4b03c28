use crate::cpn::{Monitor, Net, SimState, StepEvent};

use super::config::Scenario;
use super::model::{Occupancy, RaytraceModel};

/// Monitor that checks the structural invariants of the model after every
/// step and collects any violation.
#[derive(Debug)]
pub struct InvariantChecker<'a> {
    model: &'a RaytraceModel,
    scene_complexity: Option<u64>,
    pub steps_checked: u64,
    pub failure_path_firings: u64,
    pub violations: Vec<String>,
}

impl<'a> InvariantChecker<'a> {
    pub fn new(model: &'a RaytraceModel) -> Self {
        InvariantChecker {
            model,
            scene_complexity: None,
            steps_checked: 0,
            failure_path_firings: 0,
            violations: Vec::new(),
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn violation(&mut self, now: u64, msg: String) {
        // keep the log bounded on a badly broken model
        if self.violations.len() < 32 {
            self.violations.push(format!("@{now}: {msg}"));
        }
    }
}

impl Monitor for InvariantChecker<'_> {
    fn observe(&mut self, _net: &Net, state: &SimState, event: &StepEvent) {
        let tr = self.model.transitions;
        if let Some(b) = event.fired() {
            let t = b.transition();
            if t == tr.send_scene {
                self.scene_complexity = Some(b.int("c").max(0) as u64);
            } else if t == tr.complete_scene {
                self.scene_complexity = None;
            } else if t == tr.unsuc_rtr_start || t == tr.return_tile || t == tr.recover_node {
                self.failure_path_firings += 1;
                if self.model.params.scenario == Scenario::Ideal {
                    let name = &self.model.net.transition(t).name;
                    self.violation(state.now, format!("{name} fired in the ideal scenario"));
                }
            }
        }

        let occ = Occupancy::of(self.model, &state.marking);
        let nodes = u64::from(self.model.params.node_count);
        if occ.nodes() != nodes {
            self.violation(state.now, format!("node count {} != {nodes}: {occ:?}", occ.nodes()));
        }
        if occ.failed_master_tiles != 0 {
            self.violation(state.now, "master tile in the failure path".into());
        }
        match self.scene_complexity {
            Some(c) => {
                let tiles = self.model.tile_count();
                if occ.tiles() != tiles {
                    self.violation(state.now, format!("tile count {} != {tiles}: {occ:?}", occ.tiles()));
                }
                if occ.complexity != c {
                    self.violation(state.now, format!("complexity {} != {c}", occ.complexity));
                }
            }
            None => {
                if occ.tiles() != 0 {
                    self.violation(state.now, format!("{} tiles outside a scene", occ.tiles()));
                }
            }
        }
        self.steps_checked += 1;
    }
}
