//! Timed token-game execution.
//!
//! A transition is enabled under a binding when every input arc can be
//! satisfied by distinct tokens that are ready at the current model time and
//! the guard holds. Model time only moves when nothing is enabled; it then
//! jumps to the earliest pending time stamp at which something becomes
//! enabled.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use crate::colour::Time;
use crate::error::NetError;
use crate::stochastic::RngStream;

use super::binding::{Binding, Bound};
use super::marking::{check_token, Marking};
use super::multiset::TimedToken;
use super::net::{ArcContext, InputPattern, Net, PlaceId, TransitionId};

#[derive(Debug, Clone)]
pub struct SimState {
    pub marking: Marking,
    pub now: Time,
    pub rng: RngStream,
    /// Number of firings so far.
    pub steps: u64,
}

impl SimState {
    pub fn new(marking: Marking, seed: u64) -> Self {
        SimState {
            marking,
            now: 0,
            rng: RngStream::new(seed),
            steps: 0,
        }
    }

    pub fn with_rng(marking: Marking, rng: RngStream) -> Self {
        SimState {
            marking,
            now: 0,
            rng,
            steps: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepEvent {
    Fired { binding: Binding, time: Time },
    TimeAdvanced { from: Time, to: Time },
    Dead,
}

impl StepEvent {
    pub fn fired(&self) -> Option<&Binding> {
        match self {
            StepEvent::Fired { binding, .. } => Some(binding),
            _ => None,
        }
    }

    /// One-line rendering with transition names resolved against `net`.
    pub fn describe<'a>(&'a self, net: &'a Net) -> impl fmt::Display + 'a {
        EventDisplay { event: self, net }
    }
}

struct EventDisplay<'a> {
    event: &'a StepEvent,
    net: &'a Net,
}

impl fmt::Display for EventDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.event {
            StepEvent::Fired { binding, time } => {
                write!(f, "@{time} fire {} {binding}", self.net.transition(binding.transition()).name)
            }
            StepEvent::TimeAdvanced { from, to } => write!(f, "advance {from} -> {to}"),
            StepEvent::Dead => f.write_str("dead"),
        }
    }
}

/// Observer invoked after every step. Sees the state read-only.
pub trait Monitor {
    fn observe(&mut self, net: &Net, state: &SimState, event: &StepEvent);
}

impl<F> Monitor for F
where
    F: FnMut(&Net, &SimState, &StepEvent),
{
    fn observe(&mut self, net: &Net, state: &SimState, event: &StepEvent) {
        self(net, state, event)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunEnd {
    Stopped,
    Dead,
}

struct Partial {
    bound: Vec<Bound>,
    consumed: Vec<(PlaceId, TimedToken, u64)>,
}

impl Partial {
    fn used(&self, place: PlaceId, token: &TimedToken) -> u64 {
        self.consumed
            .iter()
            .filter(|(p, t, _)| *p == place && t == token)
            .map(|(_, _, c)| c)
            .sum()
    }
}

fn search(
    net: &Net,
    marking: &Marking,
    now: Time,
    tid: TransitionId,
    arc: usize,
    partial: &mut Partial,
    emit: &mut dyn FnMut(Binding) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let transition = net.transition(tid);
    if arc == transition.inputs.len() {
        let binding = Binding {
            transition: tid,
            vars: transition.vars.clone(),
            bound: partial.bound.clone(),
            consumed: partial.consumed.clone(),
        };
        if transition.guard.as_ref().is_none_or(|g| g(&binding)) {
            return emit(binding);
        }
        return ControlFlow::Continue(());
    }

    let input = &transition.inputs[arc];
    let place = input.place;
    let tokens = marking.get(place);
    match input.pattern {
        InputPattern::One => {
            // Entries are ordered by (value, timestamp): the first available
            // entry of each value is its earliest-stamped ready token.
            let mut last = None;
            for (token, count) in tokens.ready(now) {
                if last == Some(&token.value) {
                    continue;
                }
                if count <= partial.used(place, token) {
                    continue;
                }
                last = Some(&token.value);
                partial.bound.push(Bound::One(token.value.clone()));
                partial.consumed.push((place, token.clone(), 1));
                let flow = search(net, marking, now, tid, arc + 1, partial, emit);
                partial.bound.pop();
                partial.consumed.pop();
                flow?;
            }
            ControlFlow::Continue(())
        }
        InputPattern::All { expect } => {
            let available: Vec<(&TimedToken, u64)> = tokens
                .ready(now)
                .map(|(t, c)| (t, c - partial.used(place, t)))
                .filter(|&(_, c)| c > 0)
                .collect();
            let total: u64 = available.iter().map(|&(_, c)| c).sum();
            if expect.is_some_and(|e| e != total) {
                return ControlFlow::Continue(());
            }
            let depth = partial.consumed.len();
            let mut values = Vec::with_capacity(total as usize);
            for &(token, count) in &available {
                values.extend(std::iter::repeat_n(token.value.clone(), count as usize));
                partial.consumed.push((place, token.clone(), count));
            }
            partial.bound.push(Bound::All(values));
            let flow = search(net, marking, now, tid, arc + 1, partial, emit);
            partial.bound.pop();
            partial.consumed.truncate(depth);
            flow
        }
    }
}

fn visit_bindings(
    net: &Net,
    marking: &Marking,
    now: Time,
    emit: &mut dyn FnMut(Binding) -> ControlFlow<()>,
) -> ControlFlow<()> {
    for &tid in net.enumeration_order() {
        let mut partial = Partial {
            bound: Vec::new(),
            consumed: Vec::new(),
        };
        search(net, marking, now, tid, 0, &mut partial, emit)?;
    }
    ControlFlow::Continue(())
}

/// Every enabled (transition, binding) pair at `state.now`, ordered by
/// transition name and then by bound token values.
pub fn enabled_bindings(net: &Net, state: &SimState) -> Vec<Binding> {
    bindings_at(net, &state.marking, state.now)
}

pub fn bindings_at(net: &Net, marking: &Marking, now: Time) -> Vec<Binding> {
    let mut out = Vec::new();
    let _ = visit_bindings(net, marking, now, &mut |b| {
        out.push(b);
        ControlFlow::Continue(())
    });
    out
}

pub fn is_enabled_at(net: &Net, marking: &Marking, now: Time) -> bool {
    visit_bindings(net, marking, now, &mut |_| ControlFlow::Break(())).is_break()
}

/// Fires `binding` at the current time. The marking is left untouched on error.
pub fn fire(net: &Net, state: &mut SimState, binding: &Binding) -> Result<(), NetError> {
    let transition = net.transition(binding.transition);
    let not_enabled = || NetError::NotEnabled {
        transition: transition.name.clone(),
        now: state.now,
    };
    if binding.vars != transition.vars || binding.bound.len() != transition.inputs.len() {
        return Err(not_enabled());
    }
    if !transition.guard.as_ref().is_none_or(|g| g(binding)) {
        return Err(not_enabled());
    }

    let mut demand: BTreeMap<(PlaceId, &TimedToken), u64> = BTreeMap::new();
    for (place, token, count) in &binding.consumed {
        *demand.entry((*place, token)).or_insert(0) += count;
    }
    for (&(place, token), &count) in &demand {
        if !token.is_ready(state.now) || state.marking.get(place).count(token) < count {
            return Err(not_enabled());
        }
    }

    let now = state.now;
    let mut produced = Vec::new();
    for arc in &transition.outputs {
        let mut ctx = ArcContext {
            now,
            rng: &mut state.rng,
        };
        let tokens = (arc.expr)(binding, &mut ctx).map_err(|source| NetError::Expression {
            transition: transition.name.clone(),
            source,
        })?;
        let timed = net.place(arc.place).timed;
        for p in tokens {
            let timestamp = match (timed, p.delay) {
                (true, d) => Some(now + d),
                (false, 0) => None,
                (false, _) => {
                    return Err(NetError::TimestampMismatch {
                        place: net.place(arc.place).name.clone(),
                        timed: false,
                    })
                }
            };
            let token = TimedToken {
                value: p.value,
                timestamp,
            };
            check_token(net, arc.place, &token)?;
            produced.push((arc.place, token));
        }
    }

    for (&(place, token), &count) in &demand {
        let removed = state.marking.get_mut(place).remove(token, count);
        debug_assert!(removed, "token availability checked above");
    }
    for (place, token) in produced {
        state.marking.get_mut(place).add(token, 1);
    }
    state.steps += 1;
    Ok(())
}

/// The earliest time after `state.now` at which some binding is enabled, or
/// `None` for a dead marking.
pub fn advance_time(net: &Net, state: &SimState) -> Option<Time> {
    debug_assert!(
        !is_enabled_at(net, &state.marking, state.now),
        "time may only advance when nothing is enabled"
    );
    state
        .marking
        .pending_timestamps(state.now)
        .into_iter()
        .find(|&t| is_enabled_at(net, &state.marking, t))
}

/// Fires one uniformly chosen enabled binding, or advances time, or reports
/// a dead marking.
pub fn step(net: &Net, state: &mut SimState) -> Result<StepEvent, NetError> {
    let mut bindings = enabled_bindings(net, state);
    if !bindings.is_empty() {
        let pick = if bindings.len() == 1 {
            0
        } else {
            state.rng.pick(bindings.len())
        };
        let binding = bindings.swap_remove(pick);
        fire(net, state, &binding)?;
        return Ok(StepEvent::Fired {
            binding,
            time: state.now,
        });
    }
    match advance_time(net, state) {
        Some(to) => {
            let from = state.now;
            debug_assert!(to > from);
            state.now = to;
            Ok(StepEvent::TimeAdvanced { from, to })
        }
        None => Ok(StepEvent::Dead),
    }
}

/// Steps until `stop` returns true or the marking is dead. `stop` is first
/// consulted with no event, before any step is taken. `max_steps` bounds the
/// number of steps taken by this call.
pub fn run(
    net: &Net,
    state: &mut SimState,
    mut stop: impl FnMut(&SimState, Option<&StepEvent>) -> bool,
    hooks: &mut [&mut dyn Monitor],
    max_steps: Option<u64>,
) -> Result<RunEnd, NetError> {
    if stop(state, None) {
        return Ok(RunEnd::Stopped);
    }
    let mut taken = 0u64;
    loop {
        if max_steps.is_some_and(|limit| taken >= limit) {
            return Err(NetError::StepLimit {
                limit: taken,
                now: state.now,
            });
        }
        let before = state.now;
        let event = step(net, state)?;
        taken += 1;
        debug_assert!(state.now >= before);
        for hook in hooks.iter_mut() {
            hook.observe(net, state, &event);
        }
        if event == StepEvent::Dead {
            return Ok(RunEnd::Dead);
        }
        if stop(state, Some(&event)) {
            return Ok(RunEnd::Stopped);
        }
    }
}
