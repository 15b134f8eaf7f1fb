//! The global error-tolerant sequence builder and its synchronizer.

use std::collections::BTreeSet;

use crate::engine::{self, Extraction, Graph, Release, ReleaseSystem, Synchronizer, DEFAULT_NODE_CAP};
use crate::erm::{CostedSequence, Erm, Symbol};
use crate::error::Result;
use crate::estimate::EstimateSet;
use crate::plant::{EventId, Plant, StateId, StateSet};
use crate::si_state::{sbuilder_release, SiState};

use super::gg::check_inputs;

/// An SI-state with the cost accumulated on the way to it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CostedSiState {
    pub tau: SiState,
    pub cost: u32,
}

impl CostedSiState {
    pub fn new(tau: SiState, cost: u32) -> Self {
        CostedSiState { tau, cost }
    }

    pub fn level(&self) -> usize {
        self.tau.count()
    }
}

/// `(original, received)`; never both empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairLabel {
    pub original: Symbol,
    pub received: Symbol,
}

impl PairLabel {
    pub fn new(original: Symbol, received: Symbol) -> Self {
        PairLabel { original, received }
    }

    pub fn is_error(&self) -> bool {
        self.original != self.received
    }
}

/// One release of the builder: a deletion hypothesis keeps `tau` (H1), any
/// other pair releases the received event (H2).
pub fn egts_release(
    plant: &Plant,
    erm: &Erm,
    node: &CostedSiState,
    label: PairLabel,
) -> Option<CostedSiState> {
    if label.original.is_none() && label.received.is_none() {
        return None;
    }
    let cost = erm.step(node.cost, label.original, label.received)?;
    let tau = match label.received {
        None => node.tau.clone(),
        Some(e) => sbuilder_release(plant, &node.tau, e)?,
    };
    Some(CostedSiState::new(tau, cost))
}

/// Every defined release out of `node`, in label order.
pub fn egts_successors(
    plant: &Plant,
    erm: &Erm,
    node: &CostedSiState,
) -> Vec<(PairLabel, CostedSiState)> {
    let heads: BTreeSet<EventId> = (0..node.tau.num_sites())
        .filter_map(|s| node.tau.head(s))
        .collect();
    let symbols: Vec<Symbol> = std::iter::once(None)
        .chain(erm.alphabet().iter().map(|&e| Some(e)))
        .collect();
    let mut out = Vec::new();
    for &original in &symbols {
        for received in std::iter::once(None).chain(heads.iter().map(|&e| Some(e))) {
            let label = PairLabel::new(original, received);
            if let Some(next) = egts_release(plant, erm, node, label) {
                out.push((label, next));
            }
        }
    }
    out
}

/// The plant-independent builder reachable from `(tau, 0)`.
pub fn build_egts_builder(
    plant: &Plant,
    erm: &Erm,
    tau: &SiState,
) -> Result<Graph<CostedSiState, PairLabel>> {
    erm.check_global(plant)?;
    engine::explore(
        CostedSiState::new(tau.clone(), 0),
        CostedSiState::level,
        |n| egts_successors(plant, erm, n),
        DEFAULT_NODE_CAP,
    )
}

pub type GlobalBuilderSync = Synchronizer<CostedSiState, PairLabel, StateId>;

struct BuilderReleases<'a> {
    plant: &'a Plant,
    erm: &'a Erm,
}

impl ReleaseSystem for BuilderReleases<'_> {
    type Node = CostedSiState;
    type Label = PairLabel;
    type State = StateId;

    fn level(&self, node: &CostedSiState) -> usize {
        node.level()
    }

    fn releases(
        &self,
        node: &CostedSiState,
        estimate: &StateSet,
    ) -> Vec<Release<CostedSiState, PairLabel, StateId>> {
        let mut updated: Vec<(Symbol, StateSet)> = Vec::new();
        let mut out = Vec::new();
        for (label, target) in egts_successors(self.plant, self.erm, node) {
            let contribution = match updated.iter().find(|(o, _)| *o == label.original) {
                Some((_, set)) => set.clone(),
                None => {
                    let set = self.plant.update(estimate, label.original);
                    updated.push((label.original, set.clone()));
                    set
                }
            };
            if !contribution.is_empty() {
                out.push(Release {
                    label,
                    target,
                    contribution,
                });
            }
        }
        out
    }
}

/// Estimation-by-release over the builder, on the original plant.
pub fn build_egt_synchronizer(
    plant: &Plant,
    erm: &Erm,
    tau: &SiState,
    q0: &StateSet,
) -> Result<GlobalBuilderSync> {
    erm.check_global(plant)?;
    check_inputs(plant, tau, q0)?;
    engine::synchronize(
        &BuilderReleases { plant, erm },
        CostedSiState::new(tau.clone(), 0),
        plant.unobservable_reach(q0),
        DEFAULT_NODE_CAP,
    )
}

/// `(q, c)` for every ending node `(T_e, c)` of a costed synchronizer.
pub fn ending_estimates<L>(sync: &Synchronizer<CostedSiState, L, StateId>) -> EstimateSet {
    let mut out = EstimateSet::new();
    for (id, node) in sync.graph().nodes().iter().enumerate() {
        if node.tau.is_ending() {
            for &q in sync.estimate(id) {
                out.insert(q, node.cost);
            }
        }
    }
    out
}

/// Global-error estimate computed with the error-tolerant builder.
pub fn estimate_global_builder(
    plant: &Plant,
    erm: &Erm,
    tau: &SiState,
    q0: &StateSet,
) -> Result<EstimateSet> {
    Ok(ending_estimates(&build_egt_synchronizer(plant, erm, tau, q0)?))
}

/// Original-sequence projections of marked paths, with their ending costs.
pub fn extract_geto(
    graph: &Graph<CostedSiState, PairLabel>,
    limit: usize,
) -> Extraction<CostedSequence> {
    let words = engine::marked_words(
        graph,
        |n: &CostedSiState| n.tau.is_ending().then_some(n.cost),
        |l: &PairLabel| l.original,
        limit,
    );
    Extraction {
        items: words
            .items
            .into_iter()
            .map(|(seq, cost)| CostedSequence::new(seq, cost))
            .collect(),
        complete: words.complete,
    }
}
