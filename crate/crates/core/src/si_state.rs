//! Synchronization information states and the error-free sequence builder.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::plant::{EventId, Plant};

/// Default per-site sequence capacity.
pub const DEFAULT_SITE_CAPACITY: usize = 32;

/// One observation sequence per site. The all-empty tuple is the ending state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiState {
    seqs: Vec<Vec<EventId>>,
}

impl SiState {
    /// Validates that every component only holds events its site observes and
    /// respects the per-site capacity.
    pub fn new(plant: &Plant, seqs: Vec<Vec<EventId>>, capacity: usize) -> Result<Self> {
        if seqs.len() != plant.num_sites() {
            return Err(Error::invalid(format!(
                "SI-state has {} components, plant has {} sites",
                seqs.len(),
                plant.num_sites()
            )));
        }
        for (site, seq) in seqs.iter().enumerate() {
            if seq.len() > capacity {
                return Err(Error::resource(format!(
                    "site {} reports {} events, capacity is {capacity}",
                    site + 1,
                    seq.len()
                )));
            }
            for &e in seq {
                plant.check_event(e)?;
                if !plant.observers(e).contains(site) {
                    return Err(Error::invalid(format!(
                        "site {} cannot observe event `{}`",
                        site + 1,
                        plant.event_name(e)
                    )));
                }
            }
        }
        Ok(SiState { seqs })
    }

    /// Builds an SI-state without alphabet checks.
    pub fn from_raw(seqs: Vec<Vec<EventId>>) -> Self {
        SiState { seqs }
    }

    pub fn ending(num_sites: usize) -> Self {
        SiState {
            seqs: vec![Vec::new(); num_sites],
        }
    }

    /// Per-site projections of `run`.
    pub fn observe(plant: &Plant, run: &[EventId]) -> Self {
        let mut seqs = vec![Vec::new(); plant.num_sites()];
        for &e in run {
            for site in plant.observers(e).iter() {
                seqs[site].push(e);
            }
        }
        SiState { seqs }
    }

    pub fn num_sites(&self) -> usize {
        self.seqs.len()
    }

    pub fn component(&self, site: usize) -> &[EventId] {
        &self.seqs[site]
    }

    pub fn components(&self) -> &[Vec<EventId>] {
        &self.seqs
    }

    pub fn into_components(self) -> Vec<Vec<EventId>> {
        self.seqs
    }

    pub fn head(&self, site: usize) -> Option<EventId> {
        self.seqs[site].first().copied()
    }

    pub fn is_ending(&self) -> bool {
        self.seqs.iter().all(Vec::is_empty)
    }

    /// Total number of recorded events across sites.
    pub fn count(&self) -> usize {
        self.seqs.iter().map(Vec::len).sum()
    }

    /// Drops the head of `site`; the caller has checked it exists.
    pub(crate) fn pop_head(&mut self, site: usize) {
        self.seqs[site].remove(0);
    }

    /// Number of states of the error-free builder over this SI-state, `Π(|τ_i|+1)`.
    pub fn builder_bound(&self) -> u128 {
        self.seqs.iter().map(|s| s.len() as u128 + 1).product()
    }

    pub fn format(&self, plant: &Plant) -> String {
        let parts: Vec<String> = self.seqs.iter().map(|s| plant.format_sequence(s)).collect();
        format!("({})", parts.join(", "))
    }
}

/// Releases `event` from every site observing it. `None` when some observing
/// site does not hold `event` at its head.
pub fn sbuilder_release(plant: &Plant, tau: &SiState, event: EventId) -> Option<SiState> {
    let observers = plant.observers(event);
    if observers.is_empty() {
        return None;
    }
    if !observers.iter().all(|site| tau.head(site) == Some(event)) {
        return None;
    }
    let mut next = tau.clone();
    for site in observers.iter() {
        next.pop_head(site);
    }
    Some(next)
}

/// Events that can be released at `tau`, in id order.
pub fn releasable_events(plant: &Plant, tau: &SiState) -> Vec<EventId> {
    let heads: BTreeSet<EventId> = (0..tau.num_sites()).filter_map(|s| tau.head(s)).collect();
    heads
        .into_iter()
        .filter(|&e| sbuilder_release(plant, tau, e).is_some())
        .collect()
}

/// Every total order over the observable alphabet whose projections match
/// `tau`. Exponential; meant for oracles and tests.
pub fn enumerate_to_sequences(
    plant: &Plant,
    tau: &SiState,
    component_cap: usize,
) -> Result<BTreeSet<Vec<EventId>>> {
    if let Some(site) = (0..tau.num_sites()).find(|&s| tau.component(s).len() > component_cap) {
        return Err(Error::resource(format!(
            "site {} holds {} events, enumeration cap is {component_cap}",
            site + 1,
            tau.component(site).len()
        )));
    }
    let mut out = BTreeSet::new();
    let mut prefix = Vec::new();
    enumerate_into(plant, tau, &mut prefix, &mut out);
    Ok(out)
}

fn enumerate_into(
    plant: &Plant,
    tau: &SiState,
    prefix: &mut Vec<EventId>,
    out: &mut BTreeSet<Vec<EventId>>,
) {
    if tau.is_ending() {
        out.insert(prefix.clone());
        return;
    }
    for e in releasable_events(plant, tau) {
        let next = sbuilder_release(plant, tau, e).expect("releasable");
        prefix.push(e);
        enumerate_into(plant, &next, prefix, out);
        prefix.pop();
    }
}
