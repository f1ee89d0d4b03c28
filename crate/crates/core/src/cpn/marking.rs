use std::fmt;

use crate::colour::Time;
use crate::error::NetError;

use super::multiset::{Multiset, TimedToken};
use super::net::{Net, PlaceId};

/// Per-place token multisets covering exactly the places of one net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    places: Vec<Multiset>,
}

impl Marking {
    pub fn empty(net: &Net) -> Self {
        Marking {
            places: vec![Multiset::new(); net.places().len()],
        }
    }

    pub fn get(&self, place: PlaceId) -> &Multiset {
        &self.places[place.0]
    }

    pub(crate) fn get_mut(&mut self, place: PlaceId) -> &mut Multiset {
        &mut self.places[place.0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (PlaceId, &Multiset)> {
        self.places.iter().enumerate().map(|(i, m)| (PlaceId(i), m))
    }

    pub fn is_empty(&self) -> bool {
        self.places.iter().all(Multiset::is_empty)
    }

    /// Adds `tokens` to `place` after checking colour and timing against the net.
    pub fn add_tokens(&mut self, net: &Net, place: PlaceId, tokens: &Multiset) -> Result<(), NetError> {
        self.check_shape(net)?;
        if place.0 >= self.places.len() {
            return Err(NetError::UnknownPlace(format!("#{}", place.0)));
        }
        for (token, _) in tokens.iter() {
            check_token(net, place, token)?;
        }
        self.places[place.0].add_all(tokens);
        Ok(())
    }

    /// Convenience for a single token.
    pub fn add_token(&mut self, net: &Net, place: PlaceId, token: TimedToken, count: u64) -> Result<(), NetError> {
        self.add_tokens(net, place, &[(token, count)].into_iter().collect())
    }

    pub fn check_shape(&self, net: &Net) -> Result<(), NetError> {
        if self.places.len() != net.places().len() {
            return Err(NetError::MarkingShape {
                expected: net.places().len(),
                found: self.places.len(),
            });
        }
        Ok(())
    }

    /// Time stamps strictly after `now`, ascending and deduplicated.
    pub fn pending_timestamps(&self, now: Time) -> Vec<Time> {
        let mut ts: Vec<Time> = self
            .places
            .iter()
            .flat_map(|m| m.pending_timestamps(now))
            .collect();
        ts.sort_unstable();
        ts.dedup();
        ts
    }

    pub fn display<'a>(&'a self, net: &'a Net) -> impl fmt::Display + 'a {
        MarkingDisplay { marking: self, net }
    }
}

pub(crate) fn check_token(net: &Net, place: PlaceId, token: &TimedToken) -> Result<(), NetError> {
    let p = net.place(place);
    if token.value.colour() != p.colour {
        return Err(NetError::ColourMismatch {
            place: p.name.clone(),
            expected: p.colour,
            found: token.value.to_string(),
        });
    }
    if token.timestamp.is_some() != p.timed {
        return Err(NetError::TimestampMismatch {
            place: p.name.clone(),
            timed: p.timed,
        });
    }
    Ok(())
}

struct MarkingDisplay<'a> {
    marking: &'a Marking,
    net: &'a Net,
}

impl fmt::Display for MarkingDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, ms) in self.marking.iter() {
            if !ms.is_empty() {
                writeln!(f, "{}: {}", self.net.place(id).name, ms)?;
            }
        }
        Ok(())
    }
}
