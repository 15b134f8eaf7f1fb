//! Reachability operators shared by the plant and its modified variants.

use std::collections::BTreeSet;

/// A finite labeled transition structure whose labels are either silent
/// or carry an observation.
pub trait Automaton {
    type State: Copy + Ord;
    type Label;
    type Obs: Eq;

    fn successors(&self, state: Self::State) -> &[(Self::Label, Self::State)];

    /// `None` when the label is not seen by the coordinator.
    fn observation<'a>(&'a self, label: &'a Self::Label) -> Option<&'a Self::Obs>;
}

/// Least fixpoint of `set` under silent transitions.
pub fn unobservable_reach<A: Automaton>(
    automaton: &A,
    set: &BTreeSet<A::State>,
) -> BTreeSet<A::State> {
    let mut reached = set.clone();
    let mut worklist: Vec<A::State> = set.iter().copied().collect();
    while let Some(state) = worklist.pop() {
        for (label, next) in automaton.successors(state) {
            if automaton.observation(label).is_none() && reached.insert(*next) {
                worklist.push(*next);
            }
        }
    }
    reached
}

/// One-step successors of `set` under transitions observed as `obs`.
pub fn observable_reach<A: Automaton>(
    automaton: &A,
    set: &BTreeSet<A::State>,
    obs: &A::Obs,
) -> BTreeSet<A::State> {
    let mut reached = BTreeSet::new();
    for &state in set {
        for (label, next) in automaton.successors(state) {
            if automaton.observation(label) == Some(obs) {
                reached.insert(*next);
            }
        }
    }
    reached
}

/// `UR(R_obs(set))`, the estimate update applied along a release edge.
pub fn update<A: Automaton>(
    automaton: &A,
    set: &BTreeSet<A::State>,
    obs: &A::Obs,
) -> BTreeSet<A::State> {
    let stepped = observable_reach(automaton, set, obs);
    if stepped.is_empty() {
        return stepped;
    }
    unobservable_reach(automaton, &stepped)
}

/// Every distinct observation labelling an edge that leaves `set`.
pub fn enabled_observations<'a, A: Automaton>(
    automaton: &'a A,
    set: &BTreeSet<A::State>,
) -> Vec<&'a A::Obs>
where
    A::Obs: Ord,
{
    let mut seen = BTreeSet::new();
    for &state in set {
        for (label, _) in automaton.successors(state) {
            if let Some(obs) = automaton.observation(label) {
                seen.insert(obs);
            }
        }
    }
    seen.into_iter().collect()
}
