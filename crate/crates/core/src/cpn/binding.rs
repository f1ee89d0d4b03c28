use std::fmt;
use std::sync::Arc;

use crate::colour::{NodeDesc, Tile, TokenValue};

use super::multiset::TimedToken;
use super::net::{PlaceId, TransitionId};

/// Value bound to one input-arc variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    One(TokenValue),
    All(Vec<TokenValue>),
}

/// An assignment of input tokens to a transition's variables, together with
/// the exact tokens that firing will remove.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub(crate) transition: TransitionId,
    pub(crate) vars: Arc<[Arc<str>]>,
    pub(crate) bound: Vec<Bound>,
    pub(crate) consumed: Vec<(PlaceId, TimedToken, u64)>,
}

impl Binding {
    pub fn transition(&self) -> TransitionId {
        self.transition
    }

    pub fn get(&self, var: &str) -> Option<&Bound> {
        self.vars.iter().position(|v| &**v == var).map(|i| &self.bound[i])
    }

    /// The single token bound to `var`. Panics if `var` is not a single-token
    /// variable of this transition, which is a net construction bug.
    pub fn value(&self, var: &str) -> &TokenValue {
        match self.get(var) {
            Some(Bound::One(v)) => v,
            _ => panic!("binding has no single-token variable `{var}`"),
        }
    }

    pub fn values(&self, var: &str) -> &[TokenValue] {
        match self.get(var) {
            Some(Bound::All(v)) => v,
            _ => panic!("binding has no bulk variable `{var}`"),
        }
    }

    pub fn int(&self, var: &str) -> i64 {
        self.value(var)
            .as_int()
            .unwrap_or_else(|| panic!("variable `{var}` is not an INT"))
    }

    pub fn tile(&self, var: &str) -> &Tile {
        self.value(var)
            .as_tile()
            .unwrap_or_else(|| panic!("variable `{var}` is not a TILE"))
    }

    pub fn tile_list(&self, var: &str) -> &Arc<[Tile]> {
        self.value(var)
            .as_tile_list()
            .unwrap_or_else(|| panic!("variable `{var}` is not a tile list"))
    }

    pub fn node(&self, var: &str) -> &NodeDesc {
        self.value(var)
            .as_node()
            .unwrap_or_else(|| panic!("variable `{var}` is not a node"))
    }

    pub fn job(&self, var: &str) -> (&Tile, &NodeDesc) {
        self.value(var)
            .as_job()
            .unwrap_or_else(|| panic!("variable `{var}` is not a job"))
    }

    /// Tokens removed on firing: (place, token, count).
    pub fn consumed(&self) -> &[(PlaceId, TimedToken, u64)] {
        &self.consumed
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Bound)> {
        self.vars.iter().map(|v| &**v).zip(self.bound.iter())
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (var, bound)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match bound {
                Bound::One(v) => write!(f, "{var}={v}")?,
                Bound::All(vs) => write!(f, "{var}=<{} tokens>", vs.len())?,
            }
        }
        f.write_str("}")
    }
}
