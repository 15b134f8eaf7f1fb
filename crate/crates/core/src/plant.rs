//! The plant automaton, observation sites and natural projections.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::reach::{self, Automaton};

/// Dense index of an event. Ids follow the lexicographic order of names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

/// Dense index of a plant state. Ids follow the lexicographic order of names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl EventId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type StateSet = BTreeSet<StateId>;

/// Maximum number of observation sites.
pub const MAX_SITES: usize = 64;

/// Set of observation sites, stored as a bit mask over zero-based site indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteSet(u64);

impl SiteSet {
    pub const EMPTY: SiteSet = SiteSet(0);

    pub fn from_sites(sites: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = 0u64;
        for s in sites {
            debug_assert!(s < MAX_SITES);
            mask |= 1 << s;
        }
        SiteSet(mask)
    }

    pub fn contains(self, site: usize) -> bool {
        site < MAX_SITES && self.0 & (1 << site) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Zero-based site indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_SITES).filter(move |&s| self.0 & (1 << s) != 0)
    }
}

/// Interned names with a stable, sorted id assignment.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NameTable {
    names: Vec<String>,
    index: BTreeMap<String, u32>,
}

impl NameTable {
    pub fn new<S: AsRef<str>>(kind: &'static str, names: &[S]) -> Result<Self> {
        let mut sorted: Vec<String> = names.iter().map(|n| n.as_ref().to_owned()).collect();
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::Duplicate {
                    kind,
                    name: pair[0].clone(),
                });
            }
        }
        let index = sorted
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        Ok(NameTable {
            names: sorted,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A nondeterministic finite automaton observed by `num_sites` observation
/// sites. An event with an empty observer set is unobservable.
#[derive(Debug, Clone)]
pub struct Plant {
    states: NameTable,
    events: NameTable,
    observers: Vec<SiteSet>,
    successors: Vec<Vec<(EventId, StateId)>>,
    initial: StateSet,
    num_sites: usize,
}

impl Plant {
    /// Builds a plant from names. Observer indices are one-based site numbers.
    pub fn new<S: AsRef<str>>(
        num_sites: usize,
        states: &[S],
        events: &[(S, Vec<usize>)],
        transitions: &[(S, S, S)],
        initial: &[S],
    ) -> Result<Self> {
        if num_sites == 0 || num_sites > MAX_SITES {
            return Err(Error::invalid(format!(
                "number of sites must be in 1..={MAX_SITES}, got {num_sites}"
            )));
        }
        let state_table = NameTable::new("state", states)?;
        let event_names: Vec<&str> = events.iter().map(|(n, _)| n.as_ref()).collect();
        let event_table = NameTable::new("event", &event_names)?;

        let mut observers = vec![SiteSet::EMPTY; event_table.len()];
        for (name, sites) in events {
            let id = event_table.get(name.as_ref()).expect("interned");
            for &site in sites {
                if site == 0 || site > num_sites {
                    return Err(Error::invalid(format!(
                        "event `{}` names site {site}, expected 1..={num_sites}",
                        name.as_ref()
                    )));
                }
            }
            observers[id as usize] = SiteSet::from_sites(sites.iter().map(|s| s - 1));
        }

        let state = |name: &str| {
            state_table
                .get(name)
                .map(StateId)
                .ok_or_else(|| Error::UnknownState(name.to_owned()))
        };
        let event = |name: &str| {
            event_table
                .get(name)
                .map(EventId)
                .ok_or_else(|| Error::UnknownEvent(name.to_owned()))
        };

        let mut successors = vec![Vec::new(); state_table.len()];
        for (src, ev, dst) in transitions {
            let (src, ev, dst) = (state(src.as_ref())?, event(ev.as_ref())?, state(dst.as_ref())?);
            successors[src.index()].push((ev, dst));
        }
        for list in &mut successors {
            list.sort();
            list.dedup();
        }

        let mut init = StateSet::new();
        for name in initial {
            init.insert(state(name.as_ref())?);
        }
        if init.is_empty() {
            return Err(Error::invalid("plant has no initial state"));
        }

        Ok(Plant {
            states: state_table,
            events: event_table,
            observers,
            successors,
            initial: init,
            num_sites,
        })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> {
        (0..self.events.len() as u32).map(EventId)
    }

    pub fn state_name(&self, id: StateId) -> &str {
        self.states.name(id.0)
    }

    pub fn event_name(&self, id: EventId) -> &str {
        self.events.name(id.0)
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states
            .get(name)
            .map(StateId)
            .ok_or_else(|| Error::UnknownState(name.to_owned()))
    }

    pub fn event_id(&self, name: &str) -> Result<EventId> {
        self.events
            .get(name)
            .map(EventId)
            .ok_or_else(|| Error::UnknownEvent(name.to_owned()))
    }

    pub fn event_table(&self) -> &NameTable {
        &self.events
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn observers(&self, event: EventId) -> SiteSet {
        self.observers[event.index()]
    }

    pub fn is_observable(&self, event: EventId) -> bool {
        !self.observers(event).is_empty()
    }

    /// Events seen by at least one site, in id order.
    pub fn observable_events(&self) -> Vec<EventId> {
        self.events().filter(|&e| self.is_observable(e)).collect()
    }

    /// Events seen by the zero-based `site`, in id order.
    pub fn site_alphabet(&self, site: usize) -> Vec<EventId> {
        self.events()
            .filter(|&e| self.observers(e).contains(site))
            .collect()
    }

    /// Outgoing transitions of `state`, sorted by (event, target).
    pub fn successors(&self, state: StateId) -> &[(EventId, StateId)] {
        &self.successors[state.index()]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(s, list)| list.iter().map(move |&(e, d)| (StateId(s as u32), e, d)))
    }

    pub fn num_transitions(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn check_event(&self, event: EventId) -> Result<()> {
        if event.index() < self.num_events() {
            Ok(())
        } else {
            Err(Error::UnknownEvent(format!("#{}", event.0)))
        }
    }

    pub fn check_states(&self, set: &StateSet) -> Result<()> {
        match set.iter().find(|s| s.index() >= self.num_states()) {
            Some(s) => Err(Error::UnknownState(format!("#{}", s.0))),
            None => Ok(()),
        }
    }

    /// Natural projection onto the zero-based `site`.
    pub fn project(&self, seq: &[EventId], site: usize) -> Result<Vec<EventId>> {
        if site >= self.num_sites {
            return Err(Error::invalid(format!("site {} out of range", site + 1)));
        }
        let mut out = Vec::new();
        for &e in seq {
            self.check_event(e)?;
            if self.observers(e).contains(site) {
                out.push(e);
            }
        }
        Ok(out)
    }

    /// Projection onto the events seen by at least one site.
    pub fn project_observable(&self, seq: &[EventId]) -> Vec<EventId> {
        seq.iter()
            .copied()
            .filter(|&e| self.is_observable(e))
            .collect()
    }

    pub fn unobservable_reach(&self, set: &StateSet) -> StateSet {
        reach::unobservable_reach(self, set)
    }

    /// `R_e(set)`; `None` stands for the empty event, whose reach is `UR(set)`.
    pub fn observable_reach(&self, set: &StateSet, event: Option<EventId>) -> Result<StateSet> {
        match event {
            None => Ok(self.unobservable_reach(set)),
            Some(e) => {
                self.check_event(e)?;
                if !self.is_observable(e) {
                    return Err(Error::invalid(format!(
                        "event `{}` is unobservable",
                        self.event_name(e)
                    )));
                }
                Ok(reach::observable_reach(self, set, &e))
            }
        }
    }

    /// `UR(R_e(set))` with `R_ε = UR`.
    pub fn update(&self, set: &StateSet, event: Option<EventId>) -> StateSet {
        match event {
            None => self.unobservable_reach(set),
            Some(e) => reach::update(self, set, &e),
        }
    }

    /// States reached from `set` by some run whose observable projection is `obs`.
    pub fn observed_reach(&self, set: &StateSet, obs: &[EventId]) -> StateSet {
        let mut current = self.unobservable_reach(set);
        for &e in obs {
            if current.is_empty() {
                break;
            }
            current = reach::update(self, &current, &e);
        }
        current
    }

    pub fn format_sequence(&self, seq: &[EventId]) -> String {
        if seq.is_empty() {
            return "ε".to_owned();
        }
        seq.iter()
            .map(|&e| self.event_name(e))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Automaton for Plant {
    type State = StateId;
    type Label = EventId;
    type Obs = EventId;

    fn successors(&self, state: StateId) -> &[(EventId, StateId)] {
        &self.successors[state.index()]
    }

    fn observation<'a>(&'a self, label: &'a EventId) -> Option<&'a EventId> {
        self.is_observable(*label).then_some(label)
    }
}

impl fmt::Display for SiteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sites: Vec<String> = self.iter().map(|s| (s + 1).to_string()).collect();
        write!(f, "{{{}}}", sites.join(","))
    }
}
