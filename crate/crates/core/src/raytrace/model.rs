//! The timed net of the demand-driven raytracing cluster.
//!
//! The master sends the whole scene to every client, splits the image into
//! tiles and hands them out to free nodes one at a time. Client jobs may
//! fail; a failure is detected after some check periods, the tile goes back
//! to the end of the list and the node is out until it recovers.

use std::sync::Arc;

use crate::colour::{ColourSet, NodeDesc, NodeType, Tile, TokenValue};
use crate::cpn::{Marking, Multiset, Net, PlaceId, Produced, TimedToken, TransitionId};
use crate::error::{ConfigError, NetError, StochasticError};
use crate::stochastic::RngStream;

use super::config::{SceneConfig, ScenarioParams};
use super::functions::{comm_time, failcheck_tm, get_tile_list, raytr_tm, recovery_tm, set_suc_ntp};

pub const NEW_SCENE: &str = "newScene";
pub const NODES_NO: &str = "nodesNo";
pub const FREE_NODES: &str = "freeNodes";
pub const SC_START_TIME: &str = "scStartTime";
pub const PREPARED_TILES: &str = "preparedTiles";
pub const PREP_TILE: &str = "prepTile";
pub const RAYTR_TILES: &str = "raytrTiles";
pub const UNSR_RAYTR_TILES: &str = "unsrRaytrTiles";
pub const COMPUTED_TILES: &str = "computedTiles";
pub const INVALID_NODES: &str = "invalidNodes";

pub const SEND_SCENE: &str = "sendScene";
pub const SELECT_TILE: &str = "selectTile";
pub const SUC_RTR_START: &str = "sucRtrStart";
pub const UNSUC_RTR_START: &str = "unsucRtrStart";
pub const SEND_RTR_TILE: &str = "sendRtrTile";
pub const RETURN_TILE: &str = "returnTile";
pub const RECOVER_NODE: &str = "recoverNode";
pub const COMPLETE_SCENE: &str = "completeScene";

#[derive(Debug, Clone, Copy)]
pub struct ModelPlaces {
    pub new_scene: PlaceId,
    pub nodes_no: PlaceId,
    pub free_nodes: PlaceId,
    pub sc_start_time: PlaceId,
    pub prepared_tiles: PlaceId,
    pub prep_tile: PlaceId,
    pub raytr_tiles: PlaceId,
    pub unsr_raytr_tiles: PlaceId,
    pub computed_tiles: PlaceId,
    pub invalid_nodes: PlaceId,
}

#[derive(Debug, Clone, Copy)]
pub struct ModelTransitions {
    pub send_scene: TransitionId,
    pub select_tile: TransitionId,
    pub suc_rtr_start: TransitionId,
    pub unsuc_rtr_start: TransitionId,
    pub send_rtr_tile: TransitionId,
    pub return_tile: TransitionId,
    pub recover_node: TransitionId,
    pub complete_scene: TransitionId,
}

/// A built model: the net, its initial marking, and handles to its nodes.
#[derive(Debug, Clone)]
pub struct RaytraceModel {
    pub net: Arc<Net>,
    pub initial: Marking,
    pub places: ModelPlaces,
    pub transitions: ModelTransitions,
    pub scene: SceneConfig,
    pub params: ScenarioParams,
}

impl RaytraceModel {
    pub fn tile_count(&self) -> u64 {
        self.scene.tile_count()
    }

    /// Nodes of the cluster: node 0 is the master, the rest are clients.
    pub fn cluster(node_count: u32) -> Vec<NodeDesc> {
        (0..node_count)
            .map(|id| NodeDesc {
                id,
                nd_type: if id == 0 { NodeType::Master } else { NodeType::Client },
            })
            .collect()
    }
}

fn jobs(ms: &Multiset) -> impl Iterator<Item = (&Tile, &NodeDesc, u64)> {
    ms.iter().filter_map(|(t, &c)| t.value.as_job().map(|(tile, node)| (tile, node, c)))
}

/// Counts used by the structural invariants of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occupancy {
    pub free_nodes: u64,
    pub busy_nodes: u64,
    pub invalid_nodes: u64,
    pub listed_tiles: u64,
    pub prep_tiles: u64,
    pub raytr_tiles: u64,
    pub unsr_tiles: u64,
    pub computed_tiles: u64,
    /// Σ complxt over every tile currently in the net.
    pub complexity: u64,
    /// Tiles assigned to the master sitting in the failure path.
    pub failed_master_tiles: u64,
}

impl Occupancy {
    pub fn of(model: &RaytraceModel, marking: &Marking) -> Self {
        let p = &model.places;
        let lists: Vec<&Arc<[Tile]>> = marking
            .get(p.prepared_tiles)
            .values()
            .filter_map(TokenValue::as_tile_list)
            .collect();
        let job_places = [p.prep_tile, p.raytr_tiles, p.unsr_raytr_tiles];
        let job_count = |place: PlaceId| jobs(marking.get(place)).map(|(_, _, c)| c).sum::<u64>();
        let computed: Vec<&Tile> = marking
            .get(p.computed_tiles)
            .values()
            .filter_map(TokenValue::as_tile)
            .collect();

        let mut complexity: u64 = lists.iter().flat_map(|l| l.iter()).map(|t| t.complxt).sum();
        complexity += computed.iter().map(|t| t.complxt).sum::<u64>();
        for place in job_places {
            complexity += jobs(marking.get(place)).map(|(t, _, c)| t.complxt * c).sum::<u64>();
        }

        Occupancy {
            free_nodes: marking.get(p.free_nodes).len(),
            busy_nodes: job_places.iter().map(|&pl| job_count(pl)).sum(),
            invalid_nodes: marking.get(p.invalid_nodes).len(),
            listed_tiles: lists.iter().map(|l| l.len() as u64).sum(),
            prep_tiles: job_count(p.prep_tile),
            raytr_tiles: job_count(p.raytr_tiles),
            unsr_tiles: job_count(p.unsr_raytr_tiles),
            computed_tiles: computed.len() as u64,
            complexity,
            failed_master_tiles: jobs(marking.get(p.unsr_raytr_tiles))
                .filter(|(t, n, _)| t.nd_type == NodeType::Master || n.nd_type == NodeType::Master)
                .map(|(_, _, c)| c)
                .sum(),
        }
    }

    pub fn nodes(&self) -> u64 {
        self.free_nodes + self.busy_nodes + self.invalid_nodes
    }

    pub fn tiles(&self) -> u64 {
        self.listed_tiles + self.prep_tiles + self.raytr_tiles + self.unsr_tiles + self.computed_tiles
    }
}

/// Builds the net and its initial marking. `rng` supplies the first scene's
/// complexity when it is drawn from a range.
pub fn build_net(scene: &SceneConfig, params: &ScenarioParams, rng: &mut RngStream) -> Result<RaytraceModel, ConfigError> {
    scene.validate()?;
    params.validate()?;
    build(scene, params, rng).map_err(|e| ConfigError::Params(e.to_string()))
}

#[derive(Debug, thiserror::Error)]
enum BuildError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Draw(#[from] StochasticError),
}

fn build(scene: &SceneConfig, params: &ScenarioParams, rng: &mut RngStream) -> Result<RaytraceModel, BuildError> {
    let scene = *scene;
    let params = Arc::new(params.clone());
    let tile_count = scene.tile_count();

    let mut b = Net::builder();
    let new_scene = b.place(NEW_SCENE, ColourSet::Int, true)?;
    let nodes_no = b.place(NODES_NO, ColourSet::Int, false)?;
    let free_nodes = b.place(FREE_NODES, ColourSet::Node, true)?;
    let sc_start_time = b.place(SC_START_TIME, ColourSet::Int, false)?;
    let prepared_tiles = b.place(PREPARED_TILES, ColourSet::TileList, true)?;
    let prep_tile = b.place(PREP_TILE, ColourSet::Job, true)?;
    let raytr_tiles = b.place(RAYTR_TILES, ColourSet::Job, true)?;
    let unsr_raytr_tiles = b.place(UNSR_RAYTR_TILES, ColourSet::Job, true)?;
    let computed_tiles = b.place(COMPUTED_TILES, ColourSet::Tile, true)?;
    let invalid_nodes = b.place(INVALID_NODES, ColourSet::Node, true)?;

    let send_scene = {
        let params = params.clone();
        b.transition(SEND_SCENE)
            .input(new_scene, "c")
            .input(nodes_no, "nNo")
            .input(prepared_tiles, "l")
            .input(sc_start_time, "s")
            .guard(|b| b.tile_list("l").is_empty())
            .output(nodes_no, |b, _| Ok(vec![Produced::now(b.int("nNo"))]))
            .output(prepared_tiles, move |b, ctx| {
                let others = (b.int("nNo") - 1).max(0) as u64;
                let per_node = ctx.rng.rn_normal_int(params.send_mean_ms, params.send_var)? as u64;
                let complexity = b.int("c").max(0) as u64;
                let tiles = get_tile_list(&scene, complexity, ctx.rng)?;
                Ok(vec![Produced::after(TokenValue::tile_list(tiles), others * per_node)])
            })
            .output(sc_start_time, |_, ctx| Ok(vec![Produced::now(ctx.now as i64)]))
            .add()?
    };

    let select_tile = {
        let params = params.clone();
        b.transition(SELECT_TILE)
            .input(free_nodes, "nt")
            .input(prepared_tiles, "l")
            .guard(|b| !b.tile_list("l").is_empty())
            .output(prep_tile, move |b, ctx| {
                let node = *b.node("nt");
                let t = set_suc_ntp(b.tile_list("l")[0], &node, &params, ctx.rng)?;
                Ok(vec![Produced::now(TokenValue::Job(t, node))])
            })
            .output(prepared_tiles, |b, _| {
                let rest: Arc<[Tile]> = b.tile_list("l")[1..].into();
                Ok(vec![Produced::now(TokenValue::TileList(rest))])
            })
            .add()?
    };

    let suc_rtr_start = {
        let params = params.clone();
        b.transition(SUC_RTR_START)
            .input(prep_tile, "t")
            .guard(|b| b.job("t").0.c_suc)
            .output(raytr_tiles, move |b, ctx| {
                let (tile, _) = b.job("t");
                let delay = raytr_tm(tile, &params)? + comm_time(&params, ctx.rng)?;
                Ok(vec![Produced::after(b.value("t").clone(), delay)])
            })
            .add()?
    };

    let unsuc_rtr_start = {
        let params = params.clone();
        b.transition(UNSUC_RTR_START)
            .input(prep_tile, "t")
            .guard(|b| !b.job("t").0.c_suc)
            .output(unsr_raytr_tiles, move |b, ctx| {
                let delay = failcheck_tm(&params, ctx.rng)?;
                Ok(vec![Produced::after(b.value("t").clone(), delay)])
            })
            .add()?
    };

    let send_rtr_tile = b
        .transition(SEND_RTR_TILE)
        .input(raytr_tiles, "t")
        .output(computed_tiles, |b, _| Ok(vec![Produced::now(*b.job("t").0)]))
        .output(free_nodes, |b, _| Ok(vec![Produced::now(*b.job("t").1)]))
        .add()?;

    let return_tile = {
        let params = params.clone();
        b.transition(RETURN_TILE)
            .input(unsr_raytr_tiles, "t")
            .input(prepared_tiles, "l")
            .output(prepared_tiles, |b, _| {
                let (tile, _) = b.job("t");
                let reset = Tile {
                    c_suc: true,
                    nd_type: NodeType::Unassigned,
                    ..*tile
                };
                let list: Arc<[Tile]> = b.tile_list("l").iter().copied().chain([reset]).collect();
                Ok(vec![Produced::now(TokenValue::TileList(list))])
            })
            .output(invalid_nodes, move |b, ctx| {
                let delay = recovery_tm(&params, ctx.rng)?;
                Ok(vec![Produced::after(*b.job("t").1, delay)])
            })
            .add()?
    };

    let recover_node = b
        .transition(RECOVER_NODE)
        .input(invalid_nodes, "nd")
        .output(free_nodes, |b, _| Ok(vec![Produced::now(*b.node("nd"))]))
        .add()?;

    let complete_scene = {
        let complexity = scene.complexity;
        b.transition(COMPLETE_SCENE)
            .input_all(computed_tiles, "ts", Some(tile_count))
            .input(sc_start_time, "s")
            .input(prepared_tiles, "l")
            .guard(|b| b.tile_list("l").is_empty())
            .output(sc_start_time, |b, _| Ok(vec![Produced::now(b.int("s"))]))
            .output(prepared_tiles, |b, _| Ok(vec![Produced::now(b.value("l").clone())]))
            .output(new_scene, move |_, ctx| {
                Ok(vec![Produced::now(complexity.draw(ctx.rng)?)])
            })
            .add()?
    };

    let net = b.build();
    let mut m = Marking::empty(&net);
    m.add_token(&net, new_scene, TimedToken::at(scene.complexity.draw(rng)?, 0), 1)?;
    m.add_token(&net, nodes_no, TimedToken::untimed(i64::from(params.node_count)), 1)?;
    for node in RaytraceModel::cluster(params.node_count) {
        m.add_token(&net, free_nodes, TimedToken::at(node, 0), 1)?;
    }
    m.add_token(&net, sc_start_time, TimedToken::untimed(0), 1)?;
    m.add_token(&net, prepared_tiles, TimedToken::at(TokenValue::tile_list(Vec::new()), 0), 1)?;

    Ok(RaytraceModel {
        net: Arc::new(net),
        initial: m,
        places: ModelPlaces {
            new_scene,
            nodes_no,
            free_nodes,
            sc_start_time,
            prepared_tiles,
            prep_tile,
            raytr_tiles,
            unsr_raytr_tiles,
            computed_tiles,
            invalid_nodes,
        },
        transitions: ModelTransitions {
            send_scene,
            select_tile,
            suc_rtr_start,
            unsuc_rtr_start,
            send_rtr_tile,
            return_tile,
            recover_node,
            complete_scene,
        },
        scene,
        params: Arc::unwrap_or_clone(params),
    })
}
