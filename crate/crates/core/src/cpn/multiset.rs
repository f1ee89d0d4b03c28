use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

use crate::colour::{Time, TokenValue};

/// A token value with its optional time stamp. Tokens in untimed places carry
/// `None` and are always ready.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimedToken {
    pub value: TokenValue,
    pub timestamp: Option<Time>,
}

impl TimedToken {
    pub fn untimed(value: impl Into<TokenValue>) -> Self {
        TimedToken {
            value: value.into(),
            timestamp: None,
        }
    }

    pub fn at(value: impl Into<TokenValue>, timestamp: Time) -> Self {
        TimedToken {
            value: value.into(),
            timestamp: Some(timestamp),
        }
    }

    pub fn is_ready(&self, now: Time) -> bool {
        self.timestamp.is_none_or(|ts| ts <= now)
    }
}

/// Multiset of timed tokens. Counts are always positive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Multiset {
    entries: BTreeMap<TimedToken, u64>,
    total: u64,
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(token: TimedToken) -> Self {
        let mut ms = Self::new();
        ms.add(token, 1);
        ms
    }

    pub fn add(&mut self, token: TimedToken, count: u64) {
        if count == 0 {
            return;
        }
        *self.entries.entry(token).or_insert(0) += count;
        self.total += count;
    }

    pub fn add_all(&mut self, other: &Multiset) {
        for (token, &count) in &other.entries {
            self.add(token.clone(), count);
        }
    }

    /// Removes `count` copies of `token`. Leaves `self` untouched and returns
    /// `false` when fewer copies are present.
    pub fn remove(&mut self, token: &TimedToken, count: u64) -> bool {
        if count == 0 {
            return true;
        }
        match self.entries.get_mut(token) {
            Some(have) if *have >= count => {
                *have -= count;
                if *have == 0 {
                    self.entries.remove(token);
                }
                self.total -= count;
                true
            }
            _ => false,
        }
    }

    /// Removes a whole sub-multiset, or nothing at all.
    pub fn remove_all(&mut self, other: &Multiset) -> bool {
        if !self.contains_all(other) {
            return false;
        }
        for (token, &count) in &other.entries {
            let removed = self.remove(token, count);
            debug_assert!(removed);
        }
        true
    }

    pub fn contains_all(&self, other: &Multiset) -> bool {
        other.entries.iter().all(|(t, &c)| self.count(t) >= c)
    }

    pub fn count(&self, token: &TimedToken) -> u64 {
        self.entries.get(token).copied().unwrap_or(0)
    }

    /// Total number of tokens, with multiplicity.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, TimedToken, u64> {
        self.entries.iter()
    }

    /// Entries whose tokens are ready at `now`, in ascending token order.
    pub fn ready(&self, now: Time) -> impl Iterator<Item = (&TimedToken, u64)> {
        self.entries
            .iter()
            .filter(move |(t, _)| t.is_ready(now))
            .map(|(t, &c)| (t, c))
    }

    pub fn ready_len(&self, now: Time) -> u64 {
        self.ready(now).map(|(_, c)| c).sum()
    }

    /// Total count of tokens carrying `value`, over all time stamps.
    pub fn count_value(&self, value: &TokenValue) -> u64 {
        self.entries
            .iter()
            .filter(|(t, _)| &t.value == value)
            .map(|(_, &c)| c)
            .sum()
    }

    /// Time stamps strictly after `now`.
    pub fn pending_timestamps(&self, now: Time) -> impl Iterator<Item = Time> + '_ {
        self.entries
            .keys()
            .filter_map(move |t| t.timestamp.filter(|&ts| ts > now))
    }

    pub fn values(&self) -> impl Iterator<Item = &TokenValue> {
        self.entries
            .iter()
            .flat_map(|(t, &c)| std::iter::repeat_n(&t.value, c as usize))
    }
}

impl FromIterator<(TimedToken, u64)> for Multiset {
    fn from_iter<I: IntoIterator<Item = (TimedToken, u64)>>(iter: I) -> Self {
        let mut ms = Multiset::new();
        for (t, c) in iter {
            ms.add(t, c);
        }
        ms
    }
}

impl FromIterator<TimedToken> for Multiset {
    fn from_iter<I: IntoIterator<Item = TimedToken>>(iter: I) -> Self {
        iter.into_iter().map(|t| (t, 1)).collect()
    }
}

/// Formats as `1`1++7`2`, with `@ts` after timed values.
impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("empty");
        }
        for (i, (token, count)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str("++")?;
            }
            write!(f, "{count}`{}", token.value)?;
            if let Some(ts) = token.timestamp {
                write!(f, "@{ts}")?;
            }
        }
        Ok(())
    }
}
