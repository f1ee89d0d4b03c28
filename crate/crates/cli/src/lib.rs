//! Argument handling for the `cpnray` sweep harness.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, ValueEnum};

use cpnray_core::experiment::{ExperimentPlan, DEFAULT_MAX_STEPS, DEFAULT_REPLICATIONS};
use cpnray_core::{Complexity, SceneConfig, Scenario, ScenarioParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Ideal,
    Real,
    Both,
}

/// Simulate the raytracing cluster over a node-count sweep and write
/// summary CSV, per-scene records and plot data.
#[derive(Debug, Parser)]
#[command(name = "cpnray", version)]
#[command(group(ArgGroup::new("cmpl").args(["complexity", "complexity_range"])))]
pub struct Cli {
    /// Image size as WxH; repeat for several scenes [default: 10000x7500 and 30000x22500]
    #[arg(long = "scene", value_name = "WxH", value_parser = parse_dims)]
    pub scenes: Vec<(u32, u32)>,

    /// Tile size as WxH
    #[arg(long, value_name = "WxH", value_parser = parse_dims, default_value = "1000x750")]
    pub tile: (u32, u32),

    /// Fixed scene complexity
    #[arg(long, value_name = "N")]
    pub complexity: Option<i64>,

    /// Scene complexity drawn uniformly from LO:HI for every scene
    #[arg(long, value_name = "LO:HI", value_parser = parse_range)]
    pub complexity_range: Option<(i64, i64)>,

    /// Node counts: a list (1,2,8), a range (2..25 or 2-25), or a mix
    #[arg(long, value_name = "LIST|RANGE", value_parser = parse_nodes, default_value = "1..25")]
    pub nodes: NodeList,

    #[arg(long, value_enum, default_value = "both")]
    pub scenario: ScenarioArg,

    #[arg(long, value_name = "N", default_value_t = DEFAULT_REPLICATIONS)]
    pub replications: u32,

    #[arg(long, value_name = "N", default_value_t = 1)]
    pub seed: u64,

    #[arg(long, value_name = "N", default_value_t = 1)]
    pub scenes_per_run: u32,

    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// Worker threads [default: all cores]
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,

    /// Step ceiling per replication; 0 disables it
    #[arg(long, value_name = "N", default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: u64,

    /// Fraction of master performance spent raytracing (real scenario) [default: 0.7]
    #[arg(long = "param-master-perf", alias = "param-master_perf", value_name = "F")]
    pub master_perf: Option<f64>,
    /// Probability a client job succeeds (real scenario) [default: 0.9]
    #[arg(long = "param-client-success-p", alias = "param-client_success_p", value_name = "P")]
    pub client_success_p: Option<f64>,
    /// Mean per-node scene transfer time [default: 20000]
    #[arg(long = "param-send-mean-ms", alias = "param-send_mean_ms", value_name = "MS")]
    pub send_mean_ms: Option<f64>,
    /// Variance of the per-node transfer time [default: 10000]
    #[arg(long = "param-send-var", alias = "param-send_var", value_name = "V")]
    pub send_var: Option<f64>,
    /// Mean of the exponential tile return delay [default: 500]
    #[arg(long = "param-comm-mean-ms", alias = "param-comm_mean_ms", value_name = "MS")]
    pub comm_mean_ms: Option<f64>,
    /// Failure check period [default: 5000]
    #[arg(long = "param-chck-per-ms", alias = "param-chck_per_ms", value_name = "MS")]
    pub chck_per_ms: Option<u64>,
    /// Most check periods before a failure is noticed [default: 6]
    #[arg(long = "param-chck-max-mult", alias = "param-chck_max_mult", value_name = "K")]
    pub chck_max_mult: Option<u64>,
    /// Upper bound of the uniform node recovery time [default: 86400000]
    #[arg(long = "param-recovery-max-ms", alias = "param-recovery_max_ms", value_name = "MS")]
    pub recovery_max_ms: Option<u64>,
    /// Raytracing cost per complexity unit [default: 50]
    #[arg(long = "param-work-ms-per-complexity", alias = "param-work_ms_per_complexity", value_name = "MS")]
    pub work_ms_per_complexity: Option<f64>,
    /// Raytracing cost per thousand pixels [default: 1]
    #[arg(long = "param-work-ms-per-kilopixel", alias = "param-work_ms_per_kilopixel", value_name = "MS")]
    pub work_ms_per_kilopixel: Option<f64>,
}

/// Node counts parsed from one `--nodes` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeList(pub Vec<u32>);

pub fn parse_dims(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got `{s}`"))?;
    let w: u32 = w.trim().parse().map_err(|e| format!("bad width `{w}`: {e}"))?;
    let h: u32 = h.trim().parse().map_err(|e| format!("bad height `{h}`: {e}"))?;
    if w == 0 || h == 0 {
        return Err(format!("dimensions must be positive, got `{s}`"));
    }
    Ok((w, h))
}

pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad bound `{lo}`: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad bound `{hi}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

/// `1,2,8`, `2..25`, `2..=25`, `2-25`, or comma-separated mixes of these.
/// Ranges are inclusive. Duplicates are dropped, order is kept.
pub fn parse_nodes(s: &str) -> Result<NodeList, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad node count `{t}`: {e}"));
    let mut out: Vec<u32> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bounds = part
            .split_once("..=")
            .or_else(|| part.split_once(".."))
            .or_else(|| part.split_once('-'));
        let items: Vec<u32> = match bounds {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range `{part}`"));
                }
                (a..=b).collect()
            }
            None => vec![num(part)?],
        };
        for n in items {
            if n == 0 {
                return Err("node counts must be at least 1".into());
            }
            if !out.contains(&n) {
                out.push(n);
            }
        }
    }
    if out.is_empty() {
        return Err("no node counts given".into());
    }
    Ok(NodeList(out))
}

impl Cli {
    pub fn plan(&self) -> Result<ExperimentPlan> {
        let complexity = match (self.complexity, self.complexity_range) {
            (Some(c), None) => Complexity::Fixed(c),
            (None, Some((lo, hi))) => Complexity::Range { lo, hi },
            (None, None) => Complexity::Fixed(36_500),
            (Some(_), Some(_)) => bail!("--complexity and --complexity-range are exclusive"),
        };
        let dims = if self.scenes.is_empty() {
            vec![(10_000, 7_500), (30_000, 22_500)]
        } else {
            self.scenes.clone()
        };
        let scenes = dims
            .into_iter()
            .map(|(w, h)| SceneConfig::new(w, h, self.tile.0, self.tile.1, complexity))
            .collect();
        let scenarios = match self.scenario {
            ScenarioArg::Ideal => vec![Scenario::Ideal],
            ScenarioArg::Real => vec![Scenario::Real],
            ScenarioArg::Both => vec![Scenario::Ideal, Scenario::Real],
        };

        let mut params = ScenarioParams {
            scenes_per_run: self.scenes_per_run,
            ..ScenarioParams::default()
        };
        macro_rules! apply {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    params.$field = v;
                }
            )*};
        }
        apply!(
            master_perf,
            client_success_p,
            send_mean_ms,
            send_var,
            comm_mean_ms,
            chck_per_ms,
            chck_max_mult,
            recovery_max_ms,
            work_ms_per_complexity,
            work_ms_per_kilopixel
        );

        let plan = ExperimentPlan {
            scenes,
            node_counts: self.nodes.0.clone(),
            scenarios,
            replications: self.replications,
            base_seed: self.seed,
            params,
            max_steps: (self.max_steps > 0).then_some(self.max_steps),
            threads: self.threads,
        };
        plan.validate().context("invalid experiment")?;
        Ok(plan)
    }
}
