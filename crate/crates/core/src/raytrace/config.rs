use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, StochasticError};
use crate::stochastic::RngStream;

/// Scene complexity: a fixed value, or drawn uniformly from `[lo, hi]` each
/// time a new scene enters the net.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Complexity {
    Fixed(i64),
    Range { lo: i64, hi: i64 },
}

impl Complexity {
    pub fn draw(&self, rng: &mut RngStream) -> Result<i64, StochasticError> {
        match *self {
            Complexity::Fixed(c) => Ok(c),
            Complexity::Range { lo, hi } => rng.discrete(lo, hi),
        }
    }
}

impl Default for Complexity {
    /// The range of scene complexities seen in practice on the cluster.
    fn default() -> Self {
        Complexity::Range { lo: 10_000, hi: 70_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SceneConfig {
    pub width: u32,
    pub height: u32,
    pub tile_width: u32,
    pub tile_height: u32,
    pub complexity: Complexity,
}

impl SceneConfig {
    pub fn new(width: u32, height: u32, tile_width: u32, tile_height: u32, complexity: Complexity) -> Self {
        SceneConfig {
            width,
            height,
            tile_width,
            tile_height,
            complexity,
        }
    }

    /// 10000x7500 pixels with 1000x750 tiles.
    pub fn small(complexity: Complexity) -> Self {
        Self::new(10_000, 7_500, 1_000, 750, complexity)
    }

    /// 30000x22500 pixels with 1000x750 tiles.
    pub fn big(complexity: Complexity) -> Self {
        Self::new(30_000, 22_500, 1_000, 750, complexity)
    }

    pub fn columns(&self) -> u32 {
        self.width.div_ceil(self.tile_width)
    }

    pub fn rows(&self) -> u32 {
        self.height.div_ceil(self.tile_height)
    }

    pub fn tile_count(&self) -> u64 {
        u64::from(self.columns()) * u64::from(self.rows())
    }

    /// `WxH`, used to name output series.
    pub fn label(&self) -> String {
        format!("{}x{}", self.width, self.height)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.width == 0 || self.height == 0 || self.tile_width == 0 || self.tile_height == 0 {
            return Err(ConfigError::Scene("dimensions must be at least 1".into()));
        }
        if self.tile_width > self.width || self.tile_height > self.height {
            return Err(ConfigError::Scene(format!(
                "tile {}x{} exceeds scene {}x{}",
                self.tile_width, self.tile_height, self.width, self.height
            )));
        }
        match self.complexity {
            Complexity::Fixed(c) if c < 0 => Err(ConfigError::Scene(format!("negative complexity {c}"))),
            Complexity::Range { lo, hi } if lo < 0 || lo > hi => {
                Err(ConfigError::Scene(format!("bad complexity range {lo}:{hi}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Equal nodes at full performance, no failures.
    Ideal,
    /// Master at reduced performance, client jobs may fail.
    Real,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Ideal => "ideal",
            Scenario::Real => "real",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(Scenario::Ideal),
            "real" => Ok(Scenario::Real),
            other => Err(ConfigError::Params(format!("unknown scenario `{other}`"))),
        }
    }
}

/// Cluster and timing parameters of one simulated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub node_count: u32,
    pub scenario: Scenario,
    /// Fraction of the master's performance available for raytracing.
    pub master_perf: f64,
    pub client_success_p: f64,
    /// Per-node scene transfer time: normal mean and variance, in ms.
    pub send_mean_ms: f64,
    pub send_var: f64,
    pub comm_mean_ms: f64,
    pub chck_per_ms: u64,
    pub chck_max_mult: u64,
    pub recovery_max_ms: u64,
    pub work_ms_per_complexity: f64,
    pub work_ms_per_kilopixel: f64,
    pub scenes_per_run: u32,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            node_count: 8,
            scenario: Scenario::Real,
            master_perf: 0.7,
            client_success_p: 0.9,
            send_mean_ms: 20_000.0,
            send_var: 10_000.0,
            comm_mean_ms: 500.0,
            chck_per_ms: 5_000,
            chck_max_mult: 6,
            recovery_max_ms: 86_400_000,
            work_ms_per_complexity: 50.0,
            work_ms_per_kilopixel: 1.0,
            scenes_per_run: 1,
        }
    }
}

impl ScenarioParams {
    pub fn with_nodes(mut self, node_count: u32) -> Self {
        self.node_count = node_count;
        self
    }

    pub fn with_scenario(mut self, scenario: Scenario) -> Self {
        self.scenario = scenario;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Params(msg));
        if self.node_count < 1 {
            return bad("node_count must be at least 1".into());
        }
        if !(self.master_perf > 0.0 && self.master_perf <= 1.0) {
            return bad(format!("master_perf must lie in (0, 1], got {}", self.master_perf));
        }
        if !(0.0..=1.0).contains(&self.client_success_p) {
            return bad(format!("client_success_p must lie in [0, 1], got {}", self.client_success_p));
        }
        let reals = [
            ("send_mean_ms", self.send_mean_ms),
            ("send_var", self.send_var),
            ("work_ms_per_complexity", self.work_ms_per_complexity),
            ("work_ms_per_kilopixel", self.work_ms_per_kilopixel),
        ];
        for (name, v) in reals {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if !(self.comm_mean_ms.is_finite() && self.comm_mean_ms > 0.0) {
            return bad(format!("comm_mean_ms must be positive, got {}", self.comm_mean_ms));
        }
        if self.chck_per_ms < 1 || self.chck_max_mult < 1 {
            return bad("chck_per_ms and chck_max_mult must be at least 1".into());
        }
        if self.recovery_max_ms < 1 {
            return bad("recovery_max_ms must be at least 1".into());
        }
        if self.scenes_per_run < 1 {
            return bad("scenes_per_run must be at least 1".into());
        }
        Ok(())
    }
}
