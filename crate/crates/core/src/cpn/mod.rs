//! Generic timed coloured Petri net engine.

mod binding;
mod marking;
mod multiset;
mod net;
mod sim;

pub use crate::colour::{ColourSet, Time, TokenValue};
pub use binding::{Binding, Bound};
pub use marking::Marking;
pub use multiset::{Multiset, TimedToken};
pub use net::{
    ArcContext, ArcExpr, Guard, InputArc, InputPattern, Net, NetBuilder, OutputArc, Place, PlaceId, Produced,
    Transition, TransitionBuilder, TransitionId,
};
pub use sim::{
    advance_time, bindings_at, enabled_bindings, fire, is_enabled_at, run, step, Monitor, RunEnd, SimState,
    StepEvent,
};
