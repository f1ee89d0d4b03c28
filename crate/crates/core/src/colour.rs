//! Colour sets: the closed set of values a token may carry.

use std::fmt;
use std::sync::Arc;

/// Model time in milliseconds.
pub type Time = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeType {
    Unassigned = 0,
    Master = 1,
    Client = 2,
}

impl NodeType {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// One rectangular image section rendered as a single job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tile {
    /// Position in the generated tile list; identifies the tile within a scene.
    pub index: u32,
    pub wdt: u32,
    pub hgt: u32,
    pub complxt: u64,
    /// Whether this raytracing attempt will succeed.
    pub c_suc: bool,
    pub nd_type: NodeType,
}

impl Tile {
    pub fn pixels(&self) -> u64 {
        u64::from(self.wdt) * u64::from(self.hgt)
    }
}

/// A cluster node. `id` is unique within a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeDesc {
    pub id: u32,
    pub nd_type: NodeType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColourSet {
    Unit,
    Int,
    Bool,
    Tile,
    TileList,
    Node,
    Job,
}

/// Value carried by a token.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TokenValue {
    Unit,
    Int(i64),
    Bool(bool),
    Tile(Tile),
    TileList(Arc<[Tile]>),
    Node(NodeDesc),
    /// A tile together with the node it was assigned to.
    Job(Tile, NodeDesc),
}

impl TokenValue {
    pub fn colour(&self) -> ColourSet {
        match self {
            TokenValue::Unit => ColourSet::Unit,
            TokenValue::Int(_) => ColourSet::Int,
            TokenValue::Bool(_) => ColourSet::Bool,
            TokenValue::Tile(_) => ColourSet::Tile,
            TokenValue::TileList(_) => ColourSet::TileList,
            TokenValue::Node(_) => ColourSet::Node,
            TokenValue::Job(..) => ColourSet::Job,
        }
    }

    pub fn tile_list(tiles: impl Into<Arc<[Tile]>>) -> Self {
        TokenValue::TileList(tiles.into())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            TokenValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            TokenValue::Bool(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_tile(&self) -> Option<&Tile> {
        match self {
            TokenValue::Tile(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_tile_list(&self) -> Option<&Arc<[Tile]>> {
        match self {
            TokenValue::TileList(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_node(&self) -> Option<&NodeDesc> {
        match self {
            TokenValue::Node(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_job(&self) -> Option<(&Tile, &NodeDesc)> {
        match self {
            TokenValue::Job(t, n) => Some((t, n)),
            _ => None,
        }
    }
}

impl From<i64> for TokenValue {
    fn from(v: i64) -> Self {
        TokenValue::Int(v)
    }
}

impl From<bool> for TokenValue {
    fn from(v: bool) -> Self {
        TokenValue::Bool(v)
    }
}

impl From<Tile> for TokenValue {
    fn from(t: Tile) -> Self {
        TokenValue::Tile(t)
    }
}

impl From<NodeDesc> for TokenValue {
    fn from(n: NodeDesc) -> Self {
        TokenValue::Node(n)
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{idx={},wdt={},hgt={},complxt={},cSuc={},ndType={}}}",
            self.index,
            self.wdt,
            self.hgt,
            self.complxt,
            self.c_suc,
            self.nd_type.code()
        )
    }
}

impl fmt::Display for NodeDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node{}:{}", self.id, self.nd_type.code())
    }
}

impl fmt::Display for TokenValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenValue::Unit => f.write_str("()"),
            TokenValue::Int(v) => write!(f, "{v}"),
            TokenValue::Bool(v) => write!(f, "{v}"),
            TokenValue::Tile(t) => write!(f, "{t}"),
            TokenValue::TileList(l) => write!(f, "[{} tiles]", l.len()),
            TokenValue::Node(n) => write!(f, "{n}"),
            TokenValue::Job(t, n) => write!(f, "({t},{n})"),
        }
    }
}
