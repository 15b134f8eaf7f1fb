//! Observation automaton, the locally modified system and the multi-release
//! synchronizer over it.

use std::collections::BTreeSet;

use crate::engine::{self, Release, ReleaseSystem, Synchronizer, DEFAULT_NODE_CAP};
use crate::erm::{LocalErmSet, Symbol};
use crate::error::{Error, Result};
use crate::estimate::EstimateSet;
use crate::global::{check_inputs, CostedState};
use crate::plant::{EventId, Plant, StateId, StateSet};
use crate::reach::{self, Automaton};
use crate::si_state::SiState;

/// One received symbol (or ε) per site.
pub type MTuple = Vec<Symbol>;

pub fn is_silent(tuple: &[Symbol]) -> bool {
    tuple.iter().all(Option::is_none)
}

/// `(P_1(e), …, P_m(e))`.
pub fn project_tuple(plant: &Plant, event: EventId) -> MTuple {
    let observers = plant.observers(event);
    (0..plant.num_sites())
        .map(|s| observers.contains(s).then_some(event))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservationLabel {
    pub event: EventId,
    pub tuple: MTuple,
}

/// The plant relabelled with per-site projections.
#[derive(Debug, Clone)]
pub struct ObservationAutomaton {
    num_sites: usize,
    successors: Vec<Vec<(ObservationLabel, StateId)>>,
}

impl ObservationAutomaton {
    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn num_transitions(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, &ObservationLabel, StateId)> {
        self.successors.iter().enumerate().flat_map(|(q, list)| {
            list.iter().map(move |(l, t)| (StateId(q as u32), l, *t))
        })
    }
}

impl Automaton for ObservationAutomaton {
    type State = StateId;
    type Label = ObservationLabel;
    type Obs = MTuple;

    fn successors(&self, state: StateId) -> &[(ObservationLabel, StateId)] {
        &self.successors[state.index()]
    }

    fn observation<'a>(&'a self, label: &'a ObservationLabel) -> Option<&'a MTuple> {
        (!is_silent(&label.tuple)).then_some(&label.tuple)
    }
}

pub fn build_go(plant: &Plant) -> ObservationAutomaton {
    let successors = plant
        .states()
        .map(|q| {
            plant
                .successors(q)
                .iter()
                .map(|&(e, t)| {
                    (
                        ObservationLabel {
                            event: e,
                            tuple: project_tuple(plant, e),
                        },
                        t,
                    )
                })
                .collect()
        })
        .collect();
    ObservationAutomaton {
        num_sites: plant.num_sites(),
        successors,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocalRule {
    /// Tuple copied as is.
    Copied,
    /// Some components deleted or replaced.
    Rewritten,
    /// Insertion self-loop.
    Inserted,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalLabel {
    /// The plant event behind the move; `None` for insertions.
    pub original: Option<EventId>,
    pub tuple: MTuple,
    pub rule: LocalRule,
}

impl LocalLabel {
    pub fn is_error(&self) -> bool {
        self.rule != LocalRule::Copied
    }
}

/// The locally modified system over `Q × {0..c_u}`.
#[derive(Debug, Clone)]
pub struct ModifiedPlantL {
    bound: u32,
    num_sites: usize,
    successors: Vec<Vec<(LocalLabel, CostedState)>>,
}

impl ModifiedPlantL {
    fn slot(&self, s: CostedState) -> usize {
        s.state.index() * (self.bound as usize + 1) + s.cost as usize
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn num_states(&self) -> usize {
        self.successors.len()
    }

    pub fn states(&self) -> impl Iterator<Item = CostedState> + '_ {
        let width = self.bound as usize + 1;
        (0..self.successors.len())
            .map(move |i| CostedState::new(StateId((i / width) as u32), (i % width) as u32))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (CostedState, &LocalLabel, CostedState)> + '_ {
        self.states().flat_map(move |s| {
            self.successors[self.slot(s)]
                .iter()
                .map(move |(l, t)| (s, l, *t))
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }
}

impl Automaton for ModifiedPlantL {
    type State = CostedState;
    type Label = LocalLabel;
    type Obs = MTuple;

    fn successors(&self, state: CostedState) -> &[(LocalLabel, CostedState)] {
        &self.successors[self.slot(state)]
    }

    fn observation<'a>(&'a self, label: &'a LocalLabel) -> Option<&'a MTuple> {
        (!is_silent(&label.tuple)).then_some(&label.tuple)
    }
}

/// Builds the locally modified system. Insertion loops carry exactly one
/// non-empty component.
pub fn build_gl(go: &ObservationAutomaton, erms: &LocalErmSet) -> Result<ModifiedPlantL> {
    build_gl_with_insertions(go, erms, 1)
}

/// As [`build_gl`], but insertion loops may fill up to `max_sites`
/// components at once. Used to check that single insertions suffice.
pub fn build_gl_with_insertions(
    go: &ObservationAutomaton,
    erms: &LocalErmSet,
    max_sites: usize,
) -> Result<ModifiedPlantL> {
    let m = go.num_sites();
    if erms.num_sites() != m {
        return Err(Error::invalid(format!(
            "{} local matrices for {m} sites",
            erms.num_sites()
        )));
    }
    let bound = erms.bound();
    let width = bound as usize + 1;
    let insertions = insertion_tuples(erms, max_sites);
    let mut successors = Vec::with_capacity(go.successors.len() * width);
    for (q, list) in go.successors.iter().enumerate() {
        for c in 0..=bound {
            let mut out = Vec::new();
            for (label, next) in list {
                for (tuple, c2) in rewrites(erms, &label.tuple, c)? {
                    let rule = if tuple == label.tuple {
                        LocalRule::Copied
                    } else {
                        LocalRule::Rewritten
                    };
                    out.push((
                        LocalLabel {
                            original: Some(label.event),
                            tuple,
                            rule,
                        },
                        CostedState::new(*next, c2),
                    ));
                }
            }
            for (tuple, delta) in &insertions {
                if c + delta <= bound {
                    out.push((
                        LocalLabel {
                            original: None,
                            tuple: tuple.clone(),
                            rule: LocalRule::Inserted,
                        },
                        CostedState::new(StateId(q as u32), c + delta),
                    ));
                }
            }
            out.sort();
            out.dedup();
            successors.push(out);
        }
    }
    Ok(ModifiedPlantL {
        bound,
        num_sites: m,
        successors,
    })
}

/// Every way each non-empty component may be kept, deleted or replaced,
/// with the resulting cost when within the bound.
fn rewrites(erms: &LocalErmSet, tuple: &[Symbol], base: u32) -> Result<Vec<(MTuple, u32)>> {
    let mut partial: Vec<(MTuple, u32)> = vec![(Vec::with_capacity(tuple.len()), base)];
    for (site, &component) in tuple.iter().enumerate() {
        let erm = erms.site(site);
        let mut next = Vec::new();
        for (prefix, cost) in partial {
            match component {
                None => {
                    let mut p = prefix;
                    p.push(None);
                    next.push((p, cost));
                }
                Some(e) => {
                    if !erm.contains(e) {
                        return Err(Error::invalid(format!(
                            "matrix of site {} lacks a symbol its site observes",
                            site + 1
                        )));
                    }
                    let targets = std::iter::once(None).chain(erm.alphabet().iter().map(|&s| Some(s)));
                    for to in targets {
                        if let Some(c2) = erm.step(cost, Some(e), to) {
                            let mut p = prefix.clone();
                            p.push(to);
                            next.push((p, c2));
                        }
                    }
                }
            }
        }
        partial = next;
    }
    Ok(partial)
}

fn insertion_tuples(erms: &LocalErmSet, max_sites: usize) -> Vec<(MTuple, u32)> {
    let m = erms.num_sites();
    let mut partial: Vec<(MTuple, u32, usize)> = vec![(Vec::new(), 0, 0)];
    for site in 0..m {
        let erm = erms.site(site);
        let mut next = Vec::new();
        for (prefix, cost, used) in partial {
            let mut skip = prefix.clone();
            skip.push(None);
            next.push((skip, cost, used));
            if used == max_sites {
                continue;
            }
            for &s in erm.alphabet() {
                if let Some(c2) = erm.step(cost, None, Some(s)) {
                    let mut p = prefix.clone();
                    p.push(Some(s));
                    next.push((p, c2, used + 1));
                }
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .filter(|(t, _, used)| *used > 0 && !is_silent(t))
        .map(|(t, c, _)| (t, c))
        .collect()
}

/// Releases every non-empty component of `tuple` from the head of its site
/// simultaneously.
pub fn ms_release(tau: &SiState, tuple: &[Symbol]) -> Option<SiState> {
    if tuple.len() != tau.num_sites() || is_silent(tuple) {
        return None;
    }
    let mut next = tau.clone();
    for (site, &component) in tuple.iter().enumerate() {
        if let Some(e) = component {
            if tau.head(site) != Some(e) {
                return None;
            }
            next.pop_head(site);
        }
    }
    Some(next)
}

/// Total number of recorded events, the release order key.
pub fn counting(tau: &SiState) -> usize {
    tau.count()
}

pub type LocalSystemSync = Synchronizer<SiState, MTuple, CostedState>;

struct SystemReleases<'a> {
    gl: &'a ModifiedPlantL,
}

impl ReleaseSystem for SystemReleases<'_> {
    type Node = SiState;
    type Label = MTuple;
    type State = CostedState;

    fn level(&self, node: &SiState) -> usize {
        counting(node)
    }

    fn releases(
        &self,
        tau: &SiState,
        estimate: &BTreeSet<CostedState>,
    ) -> Vec<Release<SiState, MTuple, CostedState>> {
        reach::enabled_observations(self.gl, estimate)
            .into_iter()
            .filter_map(|tuple| {
                let target = ms_release(tau, tuple)?;
                let contribution = reach::update(self.gl, estimate, tuple);
                (!contribution.is_empty()).then(|| Release {
                    label: tuple.clone(),
                    target,
                    contribution,
                })
            })
            .collect()
    }
}

/// Runs the multi-release synchronizer over `gl` from `UR(q0 × {0})`.
pub fn build_ms_synchronizer(
    plant: &Plant,
    gl: &ModifiedPlantL,
    tau: &SiState,
    q0: &StateSet,
) -> Result<LocalSystemSync> {
    check_inputs(plant, tau, q0)?;
    let start: BTreeSet<CostedState> = q0.iter().map(|&q| CostedState::new(q, 0)).collect();
    let initial = reach::unobservable_reach(gl, &start);
    engine::synchronize(&SystemReleases { gl }, tau.clone(), initial, DEFAULT_NODE_CAP)
}

/// Local-error estimate computed on the locally modified system.
pub fn estimate_local_system(
    plant: &Plant,
    erms: &LocalErmSet,
    tau: &SiState,
    q0: &StateSet,
) -> Result<EstimateSet> {
    check_site_erms(plant, erms)?;
    let gl = build_gl(&build_go(plant), erms)?;
    let sync = build_ms_synchronizer(plant, &gl, tau, q0)?;
    Ok(sync
        .estimate_of(&SiState::ending(plant.num_sites()))
        .map(|set| set.iter().map(|s| (s.state, s.cost)).collect())
        .unwrap_or_default())
}

pub(crate) fn check_site_erms(plant: &Plant, erms: &LocalErmSet) -> Result<()> {
    if erms.num_sites() != plant.num_sites() {
        return Err(Error::invalid(format!(
            "{} local matrices for {} sites",
            erms.num_sites(),
            plant.num_sites()
        )));
    }
    for site in 0..plant.num_sites() {
        if erms.site(site).alphabet() != plant.site_alphabet(site).as_slice() {
            return Err(Error::invalid(format!(
                "matrix of site {} does not match the site alphabet",
                site + 1
            )));
        }
    }
    Ok(())
}
