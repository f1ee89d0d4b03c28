use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::colour::{ColourSet, Time, TokenValue};
use crate::error::{ExprError, NetError};
use crate::stochastic::RngStream;

use super::binding::Binding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceId(pub(crate) usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionId(pub(crate) usize);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl TransitionId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub name: String,
    pub colour: ColourSet,
    pub timed: bool,
}

/// How an input arc binds tokens from its place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputPattern {
    /// Binds one ready token.
    One,
    /// Binds every ready token in the place. With `expect`, the arc is only
    /// satisfiable when exactly that many tokens are ready.
    All { expect: Option<u64> },
}

#[derive(Debug, Clone)]
pub struct InputArc {
    pub place: PlaceId,
    pub var: Arc<str>,
    pub pattern: InputPattern,
}

/// A token produced by an output arc; `delay` is added to the firing time
/// for timed places and must be zero for untimed ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Produced {
    pub value: TokenValue,
    pub delay: Time,
}

impl Produced {
    pub fn now(value: impl Into<TokenValue>) -> Self {
        Produced {
            value: value.into(),
            delay: 0,
        }
    }

    pub fn after(value: impl Into<TokenValue>, delay: Time) -> Self {
        Produced {
            value: value.into(),
            delay,
        }
    }
}

/// What an output arc expression may see besides the binding.
pub struct ArcContext<'a> {
    pub now: Time,
    pub rng: &'a mut RngStream,
}

pub type Guard = Arc<dyn Fn(&Binding) -> bool + Send + Sync>;
pub type ArcExpr =
    Arc<dyn Fn(&Binding, &mut ArcContext<'_>) -> Result<Vec<Produced>, ExprError> + Send + Sync>;

#[derive(Clone)]
pub struct OutputArc {
    pub place: PlaceId,
    pub expr: ArcExpr,
}

#[derive(Clone)]
pub struct Transition {
    pub name: String,
    pub inputs: Vec<InputArc>,
    pub outputs: Vec<OutputArc>,
    pub guard: Option<Guard>,
    pub(crate) vars: Arc<[Arc<str>]>,
}

impl fmt::Debug for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transition")
            .field("name", &self.name)
            .field("inputs", &self.inputs)
            .field("outputs", &self.outputs.iter().map(|o| o.place).collect::<Vec<_>>())
            .field("guarded", &self.guard.is_some())
            .finish()
    }
}

/// Immutable net structure. Shareable across concurrent runs.
#[derive(Debug, Clone)]
pub struct Net {
    places: Vec<Place>,
    transitions: Vec<Transition>,
    place_index: HashMap<String, PlaceId>,
    transition_index: HashMap<String, TransitionId>,
    /// Transitions sorted by name; the binding enumeration order.
    order: Vec<TransitionId>,
}

impl Net {
    pub fn builder() -> NetBuilder {
        NetBuilder::default()
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn place(&self, id: PlaceId) -> &Place {
        &self.places[id.0]
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id.0]
    }

    pub fn place_id(&self, name: &str) -> Result<PlaceId, NetError> {
        self.place_index
            .get(name)
            .copied()
            .ok_or_else(|| NetError::UnknownPlace(name.to_owned()))
    }

    pub fn transition_id(&self, name: &str) -> Result<TransitionId, NetError> {
        self.transition_index
            .get(name)
            .copied()
            .ok_or_else(|| NetError::UnknownTransition(name.to_owned()))
    }

    pub(crate) fn enumeration_order(&self) -> &[TransitionId] {
        &self.order
    }
}

#[derive(Default)]
pub struct NetBuilder {
    places: Vec<Place>,
    transitions: Vec<Transition>,
    place_index: HashMap<String, PlaceId>,
    transition_index: HashMap<String, TransitionId>,
}

impl NetBuilder {
    pub fn place(&mut self, name: &str, colour: ColourSet, timed: bool) -> Result<PlaceId, NetError> {
        if self.place_index.contains_key(name) {
            return Err(NetError::DuplicatePlace(name.to_owned()));
        }
        let id = PlaceId(self.places.len());
        self.places.push(Place {
            name: name.to_owned(),
            colour,
            timed,
        });
        self.place_index.insert(name.to_owned(), id);
        Ok(id)
    }

    pub fn transition(&mut self, name: &str) -> TransitionBuilder<'_> {
        TransitionBuilder {
            net: self,
            name: name.to_owned(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            guard: None,
        }
    }

    pub fn build(self) -> Net {
        let mut order: Vec<TransitionId> = (0..self.transitions.len()).map(TransitionId).collect();
        order.sort_by(|a, b| self.transitions[a.0].name.cmp(&self.transitions[b.0].name));
        Net {
            places: self.places,
            transitions: self.transitions,
            place_index: self.place_index,
            transition_index: self.transition_index,
            order,
        }
    }
}

pub struct TransitionBuilder<'a> {
    net: &'a mut NetBuilder,
    name: String,
    inputs: Vec<InputArc>,
    outputs: Vec<OutputArc>,
    guard: Option<Guard>,
}

impl<'a> TransitionBuilder<'a> {
    pub fn input(mut self, place: PlaceId, var: &str) -> Self {
        self.inputs.push(InputArc {
            place,
            var: var.into(),
            pattern: InputPattern::One,
        });
        self
    }

    /// Binds all ready tokens of `place` as one variable.
    pub fn input_all(mut self, place: PlaceId, var: &str, expect: Option<u64>) -> Self {
        self.inputs.push(InputArc {
            place,
            var: var.into(),
            pattern: InputPattern::All { expect },
        });
        self
    }

    pub fn guard(mut self, guard: impl Fn(&Binding) -> bool + Send + Sync + 'static) -> Self {
        self.guard = Some(Arc::new(guard));
        self
    }

    pub fn output(
        mut self,
        place: PlaceId,
        expr: impl Fn(&Binding, &mut ArcContext<'_>) -> Result<Vec<Produced>, ExprError>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        self.outputs.push(OutputArc {
            place,
            expr: Arc::new(expr),
        });
        self
    }

    pub fn add(self) -> Result<TransitionId, NetError> {
        let TransitionBuilder {
            net,
            name,
            inputs,
            outputs,
            guard,
        } = self;
        if net.transition_index.contains_key(&name) {
            return Err(NetError::DuplicateTransition(name));
        }
        let n_places = net.places.len();
        let arc_places = inputs.iter().map(|a| a.place).chain(outputs.iter().map(|a| a.place));
        for p in arc_places {
            if p.0 >= n_places {
                return Err(NetError::UnknownPlace(format!("#{}", p.0)));
            }
        }
        let mut vars: Vec<Arc<str>> = Vec::with_capacity(inputs.len());
        for arc in &inputs {
            if vars.iter().any(|v| v == &arc.var) {
                return Err(NetError::DuplicateVariable {
                    transition: name,
                    var: arc.var.to_string(),
                });
            }
            vars.push(arc.var.clone());
        }
        let id = TransitionId(net.transitions.len());
        net.transition_index.insert(name.clone(), id);
        net.transitions.push(Transition {
            name,
            inputs,
            outputs,
            guard,
            vars: vars.into(),
        });
        Ok(id)
    }
}
