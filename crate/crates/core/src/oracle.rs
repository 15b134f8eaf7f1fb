//! Brute-force reference answers computed straight from the set-builder
//! definitions, by enumerating candidate original observation strings.
//!
//! Runs are enumerated through their observable projection: the states
//! reached by all runs projecting to `ω` are `UR(R_ωn(…UR(q0)))`. A string is
//! abandoned once no extension can align with the received data within the
//! bound.

use std::collections::BTreeSet;

use crate::erm::{Alignment, CostSet, CostedSequence, Erm, LocalErmSet};
use crate::error::{Error, Result};
use crate::estimate::EstimateSet;
use crate::global::check_inputs;
use crate::plant::{EventId, Plant, StateSet};
use crate::si_state::{enumerate_to_sequences, SiState};

/// Enumeration limits. Exceeding any of them is an error, never a
/// truncated answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    /// Longest candidate original observation string.
    pub max_run_length: usize,
    pub max_component_length: usize,
    pub max_cost: u32,
    /// Candidate strings visited before giving up.
    pub max_words: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_run_length: 8,
            max_component_length: 4,
            max_cost: 3,
            max_words: 2_000_000,
        }
    }
}

impl OracleCaps {
    fn check(&self, tau: &SiState, bound: u32) -> Result<usize> {
        if self.max_run_length == 0 || self.max_component_length == 0 || self.max_words == 0 {
            return Err(Error::invalid("oracle caps must be positive"));
        }
        if bound > self.max_cost {
            return Err(Error::resource(format!(
                "cost bound {bound} exceeds oracle cap {}",
                self.max_cost
            )));
        }
        if let Some(site) =
            (0..tau.num_sites()).find(|&s| tau.component(s).len() > self.max_component_length)
        {
            return Err(Error::resource(format!(
                "site {} holds {} events, oracle cap is {}",
                site + 1,
                tau.component(site).len(),
                self.max_component_length
            )));
        }
        // every original symbol is either received somewhere or deleted at cost >= 1
        let needed = tau.count() + bound as usize;
        if needed > self.max_run_length {
            return Err(Error::resource(format!(
                "witness strings may reach length {needed}, oracle cap is {}",
                self.max_run_length
            )));
        }
        Ok(needed)
    }
}

/// How candidate strings are matched against the received SI-state.
trait Matcher: Clone {
    fn push(&self, plant: &Plant, sym: EventId) -> Self;
    fn is_dead(&self) -> bool;
    fn costs(&self) -> Vec<u32>;
}

#[derive(Clone)]
struct GlobalMatcher<'a> {
    rows: Vec<Alignment<'a>>,
}

impl Matcher for GlobalMatcher<'_> {
    fn push(&self, _plant: &Plant, sym: EventId) -> Self {
        GlobalMatcher {
            rows: self.rows.iter().map(|r| r.push(sym)).filter(|r| !r.is_dead()).collect(),
        }
    }

    fn is_dead(&self) -> bool {
        self.rows.is_empty()
    }

    fn costs(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.rows.iter().flat_map(|r| r.final_costs().iter()).collect();
        set.into_iter().collect()
    }
}

#[derive(Clone)]
struct LocalMatcher<'a> {
    sites: Vec<Alignment<'a>>,
    bound: u32,
}

impl Matcher for LocalMatcher<'_> {
    fn push(&self, plant: &Plant, sym: EventId) -> Self {
        let observers = plant.observers(sym);
        let sites = self
            .sites
            .iter()
            .enumerate()
            .map(|(i, a)| if observers.contains(i) { a.push(sym) } else { a.clone() })
            .collect();
        LocalMatcher {
            sites,
            bound: self.bound,
        }
    }

    fn is_dead(&self) -> bool {
        let mut total = 0;
        for site in &self.sites {
            match site.min_cost() {
                Some(c) => total += c,
                None => return true,
            }
        }
        total > self.bound
    }

    fn costs(&self) -> Vec<u32> {
        let mut totals = CostSet::empty(self.bound);
        totals.insert(0);
        for site in &self.sites {
            let mut next = CostSet::empty(self.bound);
            for c in site.final_costs().iter() {
                next.union_shifted(&totals, c);
            }
            totals = next;
        }
        totals.iter().collect()
    }
}

struct Search<'p, M> {
    plant: &'p Plant,
    alphabet: Vec<EventId>,
    max_len: usize,
    max_words: usize,
    visited: usize,
    found: Vec<(Vec<EventId>, Option<StateSet>, Vec<u32>)>,
    _matcher: std::marker::PhantomData<M>,
}

impl<M: Matcher> Search<'_, M> {
    /// With `states` absent, strings are enumerated without consulting the plant.
    fn run(&mut self, word: &mut Vec<EventId>, states: Option<&StateSet>, matcher: &M) -> Result<()> {
        self.visited += 1;
        if self.visited > self.max_words {
            return Err(Error::resource(format!(
                "oracle visited more than {} candidate strings",
                self.max_words
            )));
        }
        let costs = matcher.costs();
        if !costs.is_empty() {
            self.found.push((word.clone(), states.cloned(), costs));
        }
        if word.len() == self.max_len {
            return Ok(());
        }
        for i in 0..self.alphabet.len() {
            let sym = self.alphabet[i];
            let next_states = match states {
                Some(set) => {
                    let next = self.plant.update(set, Some(sym));
                    if next.is_empty() {
                        continue;
                    }
                    Some(next)
                }
                None => None,
            };
            let next = matcher.push(self.plant, sym);
            if next.is_dead() {
                continue;
            }
            word.push(sym);
            self.run(word, next_states.as_ref(), &next)?;
            word.pop();
        }
        Ok(())
    }
}

/// A matching string, its reached states and its alignment costs.
type Hit = (Vec<EventId>, Option<StateSet>, Vec<u32>);

fn search<M: Matcher>(
    plant: &Plant,
    start: Option<StateSet>,
    matcher: M,
    max_len: usize,
    caps: &OracleCaps,
) -> Result<Vec<Hit>> {
    let mut s = Search {
        plant,
        alphabet: plant.observable_events(),
        max_len,
        max_words: caps.max_words,
        visited: 0,
        found: Vec::new(),
        _matcher: std::marker::PhantomData::<M>,
    };
    if !matcher.is_dead() {
        s.run(&mut Vec::new(), start.as_ref(), &matcher)?;
    }
    Ok(s.found)
}

fn global_matcher<'a>(
    plant: &Plant,
    erm: &'a Erm,
    tos: &'a BTreeSet<Vec<EventId>>,
) -> Result<GlobalMatcher<'a>> {
    erm.check_global(plant)?;
    Ok(GlobalMatcher {
        rows: tos.iter().map(|wr| Alignment::new(erm, wr)).collect(),
    })
}

fn local_matcher<'a>(plant: &Plant, erms: &'a LocalErmSet, tau: &'a SiState) -> Result<LocalMatcher<'a>> {
    if erms.num_sites() != plant.num_sites() {
        return Err(Error::invalid("local matrices do not match the number of sites"));
    }
    Ok(LocalMatcher {
        sites: (0..plant.num_sites())
            .map(|i| Alignment::new(erms.site(i), tau.component(i)))
            .collect(),
        bound: erms.bound(),
    })
}

fn collect_estimates(found: Vec<(Vec<EventId>, Option<StateSet>, Vec<u32>)>) -> EstimateSet {
    let mut out = EstimateSet::new();
    for (_, states, costs) in found {
        for q in states.expect("plant-guided search") {
            for &c in &costs {
                out.insert(q, c);
            }
        }
    }
    out
}

fn collect_words(found: Vec<(Vec<EventId>, Option<StateSet>, Vec<u32>)>) -> BTreeSet<CostedSequence> {
    found
        .into_iter()
        .flat_map(|(w, _, costs)| costs.into_iter().map(move |c| CostedSequence::new(w.clone(), c)))
        .collect()
}

/// Global-error estimate by enumeration.
pub fn oracle_global(
    plant: &Plant,
    erm: &Erm,
    tau: &SiState,
    q0: &StateSet,
    caps: &OracleCaps,
) -> Result<EstimateSet> {
    check_inputs(plant, tau, q0)?;
    let max_len = caps.check(tau, erm.bound())?;
    let tos = enumerate_to_sequences(plant, tau, caps.max_component_length)?;
    let matcher = global_matcher(plant, erm, &tos)?;
    let start = plant.unobservable_reach(q0);
    Ok(collect_estimates(search(plant, Some(start), matcher, max_len, caps)?))
}

/// Local-error estimate by enumeration.
pub fn oracle_local(
    plant: &Plant,
    erms: &LocalErmSet,
    tau: &SiState,
    q0: &StateSet,
    caps: &OracleCaps,
) -> Result<EstimateSet> {
    check_inputs(plant, tau, q0)?;
    let max_len = caps.check(tau, erms.bound())?;
    let matcher = local_matcher(plant, erms, tau)?;
    let start = plant.unobservable_reach(q0);
    Ok(collect_estimates(search(plant, Some(start), matcher, max_len, caps)?))
}

/// Every `(ω, c)` over the observable alphabet whose global tampering can
/// produce some total order of `tau`.
pub fn oracle_geto(
    plant: &Plant,
    erm: &Erm,
    tau: &SiState,
    caps: &OracleCaps,
) -> Result<BTreeSet<CostedSequence>> {
    let max_len = caps.check(tau, erm.bound())?;
    let tos = enumerate_to_sequences(plant, tau, caps.max_component_length)?;
    let matcher = global_matcher(plant, erm, &tos)?;
    Ok(collect_words(search(plant, None, matcher, max_len, caps)?))
}

/// Every `(ω, c)` whose per-site tampering can produce `tau` at total cost `c`.
pub fn oracle_leto(
    plant: &Plant,
    erms: &LocalErmSet,
    tau: &SiState,
    caps: &OracleCaps,
) -> Result<BTreeSet<CostedSequence>> {
    let max_len = caps.check(tau, erms.bound())?;
    let matcher = local_matcher(plant, erms, tau)?;
    Ok(collect_words(search(plant, None, matcher, max_len, caps)?))
}
