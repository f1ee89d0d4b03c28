//! Model functions evaluated on the raytracing net's arcs.

use crate::colour::{NodeDesc, NodeType, Tile, Time};
use crate::error::{ExprError, StochasticError};
use crate::stochastic::RngStream;

use super::config::{SceneConfig, Scenario, ScenarioParams};

/// Share of `rem_cmpl` given to the next tile when `rem_tiles` tiles remain.
///
/// Each share is a normal draw around 80% of the even split; the last tile
/// takes whatever is left, so iterating over a whole list distributes the
/// complexity exactly.
pub fn tile_compl(rem_tiles: u64, rem_cmpl: u64, rng: &mut RngStream) -> Result<u64, StochasticError> {
    match (rem_tiles, rem_cmpl) {
        (0, _) => Ok(0),
        (1, c) => Ok(c),
        (_, 0) => Ok(0),
        (n, c) => {
            let even = c as f64 / n as f64;
            let cmpl = rng.rn_normal_int_real(even * 0.8, even * 0.7)? as u64;
            Ok(if c > cmpl { cmpl } else { c })
        }
    }
}

/// Splits the image into a row-major grid of tiles and spreads `complexity`
/// over them. Edge tiles carry the remainder dimensions.
pub fn get_tile_list(scene: &SceneConfig, complexity: u64, rng: &mut RngStream) -> Result<Vec<Tile>, StochasticError> {
    let cols = scene.columns();
    let rows = scene.rows();
    let total = u64::from(cols) * u64::from(rows);
    let mut tiles = Vec::with_capacity(total as usize);
    let mut rem_cmpl = complexity;
    for row in 0..rows {
        let hgt = (scene.height - row * scene.tile_height).min(scene.tile_height);
        for col in 0..cols {
            let wdt = (scene.width - col * scene.tile_width).min(scene.tile_width);
            let index = row * cols + col;
            let share = tile_compl(total - u64::from(index), rem_cmpl, rng)?;
            rem_cmpl -= share;
            tiles.push(Tile {
                index,
                wdt,
                hgt,
                complxt: share,
                c_suc: true,
                nd_type: NodeType::Unassigned,
            });
        }
    }
    debug_assert_eq!(rem_cmpl, 0);
    Ok(tiles)
}

/// Assigns `tile` to `node` and decides whether the attempt will succeed.
/// The master never fails, and nothing fails in the ideal scenario.
pub fn set_suc_ntp(
    tile: Tile,
    node: &NodeDesc,
    params: &ScenarioParams,
    rng: &mut RngStream,
) -> Result<Tile, StochasticError> {
    let c_suc = match (node.nd_type, params.scenario) {
        (NodeType::Master, _) | (_, Scenario::Ideal) => true,
        _ => rng.bernoulli(params.client_success_p)?,
    };
    Ok(Tile {
        nd_type: node.nd_type,
        c_suc,
        ..tile
    })
}

/// Raytracing time of an assigned tile: pixel work plus complexity work,
/// scaled by the performance of the node type.
pub fn raytr_tm(tile: &Tile, params: &ScenarioParams) -> Result<Time, ExprError> {
    let perf = match (tile.nd_type, params.scenario) {
        (NodeType::Unassigned, _) => return Err(ExprError::UnassignedTile(tile.index)),
        (NodeType::Master, Scenario::Real) => params.master_perf,
        _ => 1.0,
    };
    let work = params.work_ms_per_kilopixel * tile.pixels() as f64 / 1000.0
        + params.work_ms_per_complexity * tile.complxt as f64;
    Ok((work / perf).round() as Time)
}

/// Delay to reach the master and hand back a finished tile.
pub fn comm_time(params: &ScenarioParams, rng: &mut RngStream) -> Result<Time, StochasticError> {
    Ok(rng.rn_exponential_int(params.comm_mean_ms)? as Time)
}

/// Time to notice a failed node: a whole number of check periods.
pub fn failcheck_tm(params: &ScenarioParams, rng: &mut RngStream) -> Result<Time, StochasticError> {
    let k = rng.discrete(1, params.chck_max_mult as i64)? as Time;
    Ok(k * params.chck_per_ms)
}

pub fn recovery_tm(params: &ScenarioParams, rng: &mut RngStream) -> Result<Time, StochasticError> {
    Ok(rng.discrete(1, params.recovery_max_ms as i64)? as Time)
}
