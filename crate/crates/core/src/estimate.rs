//! Result sets of `(plant state, cost)` pairs.

use std::collections::{BTreeMap, BTreeSet};

use crate::plant::{Plant, StateId, StateSet};

/// Error-tolerant state estimates, ordered by `(state, cost)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EstimateSet(BTreeSet<(StateId, u32)>);

impl EstimateSet {
    pub fn new() -> Self {
        EstimateSet(BTreeSet::new())
    }

    /// Every state of `states` at one cost.
    pub fn at_cost(states: &StateSet, cost: u32) -> Self {
        states.iter().map(|&q| (q, cost)).collect()
    }

    pub fn insert(&mut self, state: StateId, cost: u32) -> bool {
        self.0.insert((state, cost))
    }

    pub fn contains(&self, state: StateId, cost: u32) -> bool {
        self.0.contains(&(state, cost))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn extend(&mut self, other: &EstimateSet) {
        self.0.extend(other.iter());
    }

    /// The plant states, costs dropped.
    pub fn states(&self) -> StateSet {
        self.0.iter().map(|&(q, _)| q).collect()
    }

    pub fn max_cost(&self) -> Option<u32> {
        self.0.iter().map(|&(_, c)| c).max()
    }

    pub fn format(&self, plant: &Plant) -> String {
        let parts: Vec<String> = self
            .iter()
            .map(|(q, c)| format!("({}, {c})", plant.state_name(q)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl FromIterator<(StateId, u32)> for EstimateSet {
    fn from_iter<I: IntoIterator<Item = (StateId, u32)>>(iter: I) -> Self {
        EstimateSet(iter.into_iter().collect())
    }
}

impl IntoIterator for EstimateSet {
    type Item = (StateId, u32);
    type IntoIter = std::collections::btree_set::IntoIter<(StateId, u32)>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// Keeps, per plant state, only its cheapest pair.
pub fn least_cost_filter(est: &EstimateSet) -> EstimateSet {
    let mut best: BTreeMap<StateId, u32> = BTreeMap::new();
    for (q, c) in est.iter() {
        best.entry(q).and_modify(|b| *b = (*b).min(c)).or_insert(c);
    }
    best.into_iter().collect()
}
