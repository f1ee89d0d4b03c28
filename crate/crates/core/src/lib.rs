//! Timed coloured Petri net engine with an executable model of a
//! demand-driven parallel raytracing cluster, plus the monitors and sweep
//! harness used to study rendering time against cluster size.

pub mod colour;
pub mod cpn;
pub mod error;
pub mod experiment;
pub mod monitor;
pub mod raytrace;
pub mod stochastic;

pub use colour::{NodeDesc, NodeType, Tile, Time, TokenValue};
pub use error::{ConfigError, ExprError, IoError, NetError, RunError, StochasticError};
pub use experiment::{run_experiment, ExperimentPlan, ExperimentResult, SweepPoint};
pub use monitor::{SceneMonitor, SceneRecord};
pub use raytrace::{build_net, Complexity, RaytraceModel, SceneConfig, Scenario, ScenarioParams};
pub use stochastic::RngStream;
