//! Fixtures shared by the benchmarks.

use cpnray_core::cpn::{run, SimState, StepEvent};
use cpnray_core::{build_net, Complexity, RaytraceModel, RngStream, SceneConfig, Scenario, ScenarioParams};

/// Raytracing model on the small scene plus a state ready to simulate it.
pub fn fixture(nodes: u32, scenario: Scenario, seed: u64) -> (RaytraceModel, SimState) {
    let mut rng = RngStream::new(seed);
    let params = ScenarioParams::default().with_nodes(nodes).with_scenario(scenario);
    let model = build_net(&SceneConfig::small(Complexity::Fixed(36_500)), &params, &mut rng).expect("valid model");
    let state = SimState::with_rng(model.initial.clone(), rng);
    (model, state)
}

/// Simulates until `steps` transitions have fired, so the tile list is
/// populated and nodes are busy.
pub fn warm(model: &RaytraceModel, state: &mut SimState, steps: u64) {
    run(&model.net, state, |s, _| s.steps >= steps, &mut [], None).expect("warm-up run");
}

/// Number of fired transitions in one full scene.
pub fn scene_steps(model: &RaytraceModel, state: &mut SimState) -> u64 {
    let complete = model.transitions.complete_scene;
    run(
        &model.net,
        state,
        |_, ev| ev.and_then(StepEvent::fired).is_some_and(|b| b.transition() == complete),
        &mut [],
        None,
    )
    .expect("scene run");
    state.steps
}
