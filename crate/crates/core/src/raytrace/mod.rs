//! Executable model of the demand-driven parallel raytracing cluster.

mod config;
mod functions;
mod invariants;
mod model;

pub use crate::colour::{NodeDesc, NodeType, Tile};
pub use config::{Complexity, SceneConfig, Scenario, ScenarioParams};
pub use functions::{comm_time, failcheck_tm, get_tile_list, raytr_tm, recovery_tm, set_suc_ntp, tile_compl};
pub use invariants::InvariantChecker;
pub use model::{build_net, ModelPlaces, ModelTransitions, Occupancy, RaytraceModel};

/// Place and transition names of the model.
pub mod names {
    pub use super::model::{
        COMPLETE_SCENE, COMPUTED_TILES, FREE_NODES, INVALID_NODES, NEW_SCENE, NODES_NO, PREPARED_TILES, PREP_TILE,
        RAYTR_TILES, RECOVER_NODE, RETURN_TILE, SC_START_TIME, SELECT_TILE, SEND_RTR_TILE, SEND_SCENE,
        SUC_RTR_START, UNSR_RAYTR_TILES, UNSUC_RTR_START,
    };
}
