//! Release lists, the local error-tolerant sequence builder and its
//! synchronizer.

use std::collections::BTreeSet;

use crate::engine::{self, Extraction, Graph, Release, ReleaseSystem, Synchronizer, DEFAULT_NODE_CAP};
use crate::erm::{CostedSequence, LocalErmSet, Symbol};
use crate::error::Result;
use crate::estimate::EstimateSet;
use crate::global::{check_inputs, ending_estimates, CostedSiState};
use crate::plant::{EventId, Plant, StateId, StateSet};
use crate::si_state::SiState;

use super::gl::{check_site_erms, MTuple};

/// Pairs `(original, received)` a site may use to release from a sequence.
pub type ReleaseList = BTreeSet<(Symbol, Symbol)>;

/// Deletions of any site symbol, plus replacement, insertion and match
/// pairs whose received component is the head of `seq`.
pub fn release_list(erms: &LocalErmSet, site: usize, seq: &[EventId]) -> ReleaseList {
    let erm = erms.site(site);
    let mut out: ReleaseList = erm
        .alphabet()
        .iter()
        .filter(|&&s| erm.cost(Some(s), None).is_some())
        .map(|&s| (Some(s), None))
        .collect();
    if let Some(&head) = seq.first() {
        out.insert((Some(head), Some(head)));
        for &s in erm.alphabet() {
            if s != head && erm.cost(Some(s), Some(head)).is_some() {
                out.insert((Some(s), Some(head)));
            }
        }
        if erm.cost(None, Some(head)).is_some() {
            out.insert((None, Some(head)));
        }
    }
    out
}

/// `(original | received per site)`; never entirely empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalPairLabel {
    pub original: Symbol,
    pub received: MTuple,
}

impl LocalPairLabel {
    pub fn new(original: Symbol, received: MTuple) -> Self {
        LocalPairLabel { original, received }
    }

    /// True unless every observing site receives the original as is.
    pub fn is_error(&self, plant: &Plant) -> bool {
        match self.original {
            None => true,
            Some(e) => plant
                .observers(e)
                .iter()
                .any(|s| self.received[s] != Some(e)),
        }
    }
}

/// One builder release. With an empty original exactly one site takes its
/// head as an insertion; otherwise every site observing the original picks
/// a pair from its release list and the rest stay untouched.
pub fn elts_release(
    plant: &Plant,
    erms: &LocalErmSet,
    node: &CostedSiState,
    label: &LocalPairLabel,
) -> Option<CostedSiState> {
    let m = node.tau.num_sites();
    if label.received.len() != m {
        return None;
    }
    let mut tau = node.tau.clone();
    let mut cost = node.cost;
    match label.original {
        None => {
            let mut filled = label.received.iter().enumerate().filter(|(_, r)| r.is_some());
            let (site, &received) = filled.next()?;
            if filled.next().is_some() {
                return None;
            }
            if !release_list(erms, site, node.tau.component(site)).contains(&(None, received)) {
                return None;
            }
            cost = erms.site(site).step(cost, None, received)?;
            tau.pop_head(site);
        }
        Some(orig) => {
            if !plant.is_observable(orig) {
                return None;
            }
            let observers = plant.observers(orig);
            for site in 0..m {
                let received = label.received[site];
                if !observers.contains(site) {
                    if received.is_some() {
                        return None;
                    }
                    continue;
                }
                let list = release_list(erms, site, node.tau.component(site));
                if !list.contains(&(Some(orig), received)) {
                    return None;
                }
                cost = erms.site(site).step(cost, Some(orig), received)?;
                if received.is_some() {
                    tau.pop_head(site);
                }
            }
            if cost > erms.bound() {
                return None;
            }
        }
    }
    (cost <= erms.bound()).then(|| CostedSiState::new(tau, cost))
}

/// Every defined release out of `node`, in label order.
pub fn elts_successors(
    plant: &Plant,
    erms: &LocalErmSet,
    node: &CostedSiState,
) -> Vec<(LocalPairLabel, CostedSiState)> {
    let m = node.tau.num_sites();
    let mut labels = Vec::new();
    for site in 0..m {
        if let Some(head) = node.tau.head(site) {
            let mut received = vec![None; m];
            received[site] = Some(head);
            labels.push(LocalPairLabel::new(None, received));
        }
    }
    for orig in plant.observable_events() {
        let mut partial: Vec<MTuple> = vec![Vec::with_capacity(m)];
        for site in 0..m {
            let options: Vec<Symbol> = if plant.observers(orig).contains(site) {
                std::iter::once(None)
                    .chain(node.tau.head(site).map(Some))
                    .collect()
            } else {
                vec![None]
            };
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    options.iter().map(move |&o| {
                        let mut p = p.clone();
                        p.push(o);
                        p
                    })
                })
                .collect();
        }
        labels.extend(partial.into_iter().map(|r| LocalPairLabel::new(Some(orig), r)));
    }
    labels.sort();
    labels
        .into_iter()
        .filter_map(|l| elts_release(plant, erms, node, &l).map(|n| (l, n)))
        .collect()
}

/// The plant-independent builder reachable from `(tau, 0)`.
pub fn build_elts_builder(
    plant: &Plant,
    erms: &LocalErmSet,
    tau: &SiState,
) -> Result<Graph<CostedSiState, LocalPairLabel>> {
    check_site_erms(plant, erms)?;
    engine::explore(
        CostedSiState::new(tau.clone(), 0),
        CostedSiState::level,
        |n| elts_successors(plant, erms, n),
        DEFAULT_NODE_CAP,
    )
}

pub type LocalBuilderSync = Synchronizer<CostedSiState, LocalPairLabel, StateId>;

struct BuilderReleases<'a> {
    plant: &'a Plant,
    erms: &'a LocalErmSet,
}

impl ReleaseSystem for BuilderReleases<'_> {
    type Node = CostedSiState;
    type Label = LocalPairLabel;
    type State = StateId;

    fn level(&self, node: &CostedSiState) -> usize {
        node.level()
    }

    fn releases(
        &self,
        node: &CostedSiState,
        estimate: &StateSet,
    ) -> Vec<Release<CostedSiState, LocalPairLabel, StateId>> {
        let mut updated: Vec<(Symbol, StateSet)> = Vec::new();
        let mut out = Vec::new();
        for (label, target) in elts_successors(self.plant, self.erms, node) {
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

/// Estimation-by-release over the local builder, on the original plant.
pub fn build_elt_synchronizer(
    plant: &Plant,
    erms: &LocalErmSet,
    tau: &SiState,
    q0: &StateSet,
) -> Result<LocalBuilderSync> {
    check_site_erms(plant, erms)?;
    check_inputs(plant, tau, q0)?;
    engine::synchronize(
        &BuilderReleases { plant, erms },
        CostedSiState::new(tau.clone(), 0),
        plant.unobservable_reach(q0),
        DEFAULT_NODE_CAP,
    )
}

/// Local-error estimate computed with the error-tolerant builder.
pub fn estimate_local_builder(
    plant: &Plant,
    erms: &LocalErmSet,
    tau: &SiState,
    q0: &StateSet,
) -> Result<EstimateSet> {
    Ok(ending_estimates(&build_elt_synchronizer(plant, erms, tau, q0)?))
}

/// Original-sequence projections of marked paths, with their ending costs.
pub fn extract_leto(
    graph: &Graph<CostedSiState, LocalPairLabel>,
    limit: usize,
) -> Extraction<CostedSequence> {
    let words = engine::marked_words(
        graph,
        |n: &CostedSiState| n.tau.is_ending().then_some(n.cost),
        |l: &LocalPairLabel| l.original,
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
