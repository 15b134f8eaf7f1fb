//! The cost-constrained globally modified system and estimation over it.

use std::collections::BTreeSet;

use crate::engine::{self, Release, ReleaseSystem, Synchronizer, DEFAULT_NODE_CAP};
use crate::erm::{Erm, Symbol};
use crate::error::{Error, Result};
use crate::estimate::EstimateSet;
use crate::plant::{EventId, Plant, StateId, StateSet};
use crate::reach::{self, Automaton};
use crate::si_state::{releasable_events, sbuilder_release, SiState};

/// A plant state paired with an accumulated cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CostedState {
    pub state: StateId,
    pub cost: u32,
}

impl CostedState {
    pub fn new(state: StateId, cost: u32) -> Self {
        CostedState { state, cost }
    }
}

/// Which construction rule produced a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GlobalRule {
    /// Unobservable move copied at constant cost.
    Silent,
    /// Observable move received as itself, replaced or deleted.
    Received,
    /// Insertion self-loop.
    Inserted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalLabel {
    /// The plant event behind the move; `None` for insertions.
    pub original: Option<EventId>,
    /// What the coordinator sees; `None` for silent moves and deletions.
    pub received: Symbol,
    pub rule: GlobalRule,
}

impl GlobalLabel {
    pub fn is_error(&self) -> bool {
        match self.rule {
            GlobalRule::Silent => false,
            GlobalRule::Received => self.original != self.received,
            GlobalRule::Inserted => true,
        }
    }
}

/// The globally modified system over `Q × {0..c_u}`.
#[derive(Debug, Clone)]
pub struct ModifiedPlantG {
    bound: u32,
    successors: Vec<Vec<(GlobalLabel, CostedState)>>,
    initial: BTreeSet<CostedState>,
}

impl ModifiedPlantG {
    fn slot(&self, s: CostedState) -> usize {
        s.state.index() * (self.bound as usize + 1) + s.cost as usize
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn num_states(&self) -> usize {
        self.successors.len()
    }

    pub fn states(&self) -> impl Iterator<Item = CostedState> + '_ {
        let width = self.bound as usize + 1;
        (0..self.successors.len())
            .map(move |i| CostedState::new(StateId((i / width) as u32), (i % width) as u32))
    }

    /// `Q_0 × {0}`.
    pub fn initial(&self) -> &BTreeSet<CostedState> {
        &self.initial
    }

    pub fn transitions(&self) -> impl Iterator<Item = (CostedState, GlobalLabel, CostedState)> + '_ {
        self.states().flat_map(move |s| {
            self.successors[self.slot(s)]
                .iter()
                .map(move |&(l, t)| (s, l, t))
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }
}

impl Automaton for ModifiedPlantG {
    type State = CostedState;
    type Label = GlobalLabel;
    type Obs = EventId;

    fn successors(&self, state: CostedState) -> &[(GlobalLabel, CostedState)] {
        &self.successors[self.slot(state)]
    }

    fn observation<'a>(&'a self, label: &'a GlobalLabel) -> Option<&'a EventId> {
        label.received.as_ref()
    }
}

/// Builds the globally modified system of `plant` under `erm`.
pub fn build_gg(plant: &Plant, erm: &Erm) -> Result<ModifiedPlantG> {
    erm.check_global(plant)?;
    let bound = erm.bound();
    let width = bound as usize + 1;
    let mut successors = vec![Vec::new(); plant.num_states() * width];
    let observable = plant.observable_events();
    for q in plant.states() {
        for c in 0..=bound {
            let list = &mut successors[q.index() * width + c as usize];
            for &(e, next) in plant.successors(q) {
                if !plant.is_observable(e) {
                    list.push((
                        GlobalLabel {
                            original: Some(e),
                            received: None,
                            rule: GlobalRule::Silent,
                        },
                        CostedState::new(next, c),
                    ));
                    continue;
                }
                for received in std::iter::once(None).chain(observable.iter().map(|&s| Some(s))) {
                    if let Some(c2) = erm.step(c, Some(e), received) {
                        list.push((
                            GlobalLabel {
                                original: Some(e),
                                received,
                                rule: GlobalRule::Received,
                            },
                            CostedState::new(next, c2),
                        ));
                    }
                }
            }
            for &s in &observable {
                if let Some(c2) = erm.step(c, None, Some(s)) {
                    list.push((
                        GlobalLabel {
                            original: None,
                            received: Some(s),
                            rule: GlobalRule::Inserted,
                        },
                        CostedState::new(q, c2),
                    ));
                }
            }
            list.sort();
            list.dedup();
        }
    }
    let initial = plant.initial().iter().map(|&q| CostedState::new(q, 0)).collect();
    Ok(ModifiedPlantG {
        bound,
        successors,
        initial,
    })
}

pub(crate) fn check_inputs(plant: &Plant, tau: &SiState, q0: &StateSet) -> Result<()> {
    if tau.num_sites() != plant.num_sites() {
        return Err(Error::invalid(format!(
            "SI-state has {} components, plant has {} sites",
            tau.num_sites(),
            plant.num_sites()
        )));
    }
    plant.check_states(q0)
}

/// The plain synchronizer run over a modified system: S-builder releases
/// with estimates in `Q × {0..c_u}`.
pub type GlobalSystemSync = Synchronizer<SiState, EventId, CostedState>;

struct SystemReleases<'a, A> {
    plant: &'a Plant,
    gg: &'a A,
}

impl<A: Automaton<Obs = EventId>> ReleaseSystem for SystemReleases<'_, A> {
    type Node = SiState;
    type Label = EventId;
    type State = A::State;

    fn level(&self, node: &SiState) -> usize {
        node.count()
    }

    fn releases(
        &self,
        tau: &SiState,
        estimate: &BTreeSet<A::State>,
    ) -> Vec<Release<SiState, EventId, A::State>> {
        releasable_events(self.plant, tau)
            .into_iter()
            .filter_map(|e| {
                let contribution = reach::update(self.gg, estimate, &e);
                (!contribution.is_empty()).then(|| Release {
                    label: e,
                    target: sbuilder_release(self.plant, tau, e).expect("releasable"),
                    contribution,
                })
            })
            .collect()
    }
}

/// Runs the error-free synchronizer over `gg` from `UR(q0 × {0})`.
pub fn build_system_synchronizer(
    plant: &Plant,
    gg: &ModifiedPlantG,
    tau: &SiState,
    q0: &StateSet,
) -> Result<GlobalSystemSync> {
    check_inputs(plant, tau, q0)?;
    let start: BTreeSet<CostedState> = q0.iter().map(|&q| CostedState::new(q, 0)).collect();
    let initial = reach::unobservable_reach(gg, &start);
    engine::synchronize(
        &SystemReleases { plant, gg },
        tau.clone(),
        initial,
        DEFAULT_NODE_CAP,
    )
}

/// Error-free synchronizer over the plant itself.
pub type PlainSync = Synchronizer<SiState, EventId, StateId>;

/// Runs the error-free synchronizer over the plant from `UR(q0)`.
pub fn build_plain_synchronizer(plant: &Plant, tau: &SiState, q0: &StateSet) -> Result<PlainSync> {
    check_inputs(plant, tau, q0)?;
    engine::synchronize(
        &SystemReleases { plant, gg: plant },
        tau.clone(),
        plant.unobservable_reach(q0),
        DEFAULT_NODE_CAP,
    )
}

/// Error-free current-state estimate consistent with `tau`.
pub fn estimate_error_free(plant: &Plant, tau: &SiState, q0: &StateSet) -> Result<StateSet> {
    let sync = build_plain_synchronizer(plant, tau, q0)?;
    Ok(sync
        .estimate_of(&SiState::ending(plant.num_sites()))
        .cloned()
        .unwrap_or_default())
}

/// Global-error estimate computed on the modified system.
pub fn estimate_global_system(
    plant: &Plant,
    erm: &Erm,
    tau: &SiState,
    q0: &StateSet,
) -> Result<EstimateSet> {
    let gg = build_gg(plant, erm)?;
    let sync = build_system_synchronizer(plant, &gg, tau, q0)?;
    Ok(sync
        .estimate_of(&SiState::ending(plant.num_sites()))
        .map(|set| set.iter().map(|s| (s.state, s.cost)).collect())
        .unwrap_or_default())
}
