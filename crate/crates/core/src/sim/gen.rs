//! Seeded generators for plants, matrices and estimation instances.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::erm::{validate_erm, Erm, LocalErmSet, RawErm, Symbol};
use crate::error::{Error, Result};
use crate::plant::{EventId, Plant, StateSet};
use crate::si_state::SiState;

use super::tamper::{sample_run, tamper_global, tamper_local};

/// Generator parameters. Every field has a default, so a partial document
/// is accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub format_version: u32,
    pub min_states: usize,
    pub max_states: usize,
    pub min_events: usize,
    pub max_events: usize,
    pub min_sites: usize,
    pub max_sites: usize,
    /// Chance that an observable event gets one more observing site.
    pub shared_event_probability: f64,
    pub unobservable_probability: f64,
    /// Chance that a given state enables a given event.
    pub transition_probability: f64,
    /// Chance of a second target for an enabled event.
    pub nondeterminism_probability: f64,
    pub max_initial_states: usize,
    pub max_cost_bound: u32,
    /// Chance that an off-diagonal matrix cell is admissible.
    pub error_probability: f64,
    pub max_error_cost: u32,
    pub max_run_length: usize,
    pub max_component_length: usize,
    /// Chance that an instance gets an arbitrary SI-state instead of a
    /// tampered run.
    pub random_si_probability: f64,
    /// Use error-free matrices with a zero bound.
    pub identity_errors: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            format_version: 1,
            min_states: 1,
            max_states: 8,
            min_events: 1,
            max_events: 5,
            min_sites: 1,
            max_sites: 3,
            shared_event_probability: 0.3,
            unobservable_probability: 0.2,
            transition_probability: 0.35,
            nondeterminism_probability: 0.15,
            max_initial_states: 2,
            max_cost_bound: 2,
            error_probability: 0.3,
            max_error_cost: 2,
            max_run_length: 6,
            max_component_length: 4,
            random_si_probability: 0.2,
            identity_errors: false,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = [
            ("shared_event_probability", self.shared_event_probability),
            ("unobservable_probability", self.unobservable_probability),
            ("transition_probability", self.transition_probability),
            ("nondeterminism_probability", self.nondeterminism_probability),
            ("error_probability", self.error_probability),
            ("random_si_probability", self.random_si_probability),
        ];
        for (name, p) in prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        let ranges = [
            ("states", self.min_states, self.max_states),
            ("events", self.min_events, self.max_events),
            ("sites", self.min_sites, self.max_sites),
        ];
        for (name, lo, hi) in ranges {
            if lo == 0 || lo > hi {
                return Err(Error::invalid(format!(
                    "{name} range {lo}..={hi} must be non-empty and start at 1 or more"
                )));
            }
        }
        if self.max_sites > crate::plant::MAX_SITES {
            return Err(Error::invalid("too many sites"));
        }
        if self.max_initial_states == 0 {
            return Err(Error::invalid("max_initial_states must be at least 1"));
        }
        if self.format_version != 1 {
            return Err(Error::Format {
                path: "format_version".to_owned(),
                message: format!("unsupported generator format version {}", self.format_version),
            });
        }
        Ok(())
    }
}

pub fn random_plant<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Plant {
    let n = rng.gen_range(cfg.min_states..=cfg.max_states);
    let k = rng.gen_range(cfg.min_events..=cfg.max_events);
    let m = rng.gen_range(cfg.min_sites..=cfg.max_sites);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut events: Vec<(String, Vec<usize>)> = Vec::new();
    for j in 0..k {
        let mut sites = Vec::new();
        if !rng.gen_bool(cfg.unobservable_probability) {
            let mut pool: Vec<usize> = (1..=m).collect();
            pool.shuffle(rng);
            sites.push(pool.pop().expect("at least one site"));
            while !pool.is_empty() && rng.gen_bool(cfg.shared_event_probability) {
                sites.push(pool.pop().expect("non-empty"));
            }
            sites.sort();
        }
        events.push((format!("e{j}"), sites));
    }
    let mut transitions = Vec::new();
    for s in &states {
        for (e, _) in &events {
            if rng.gen_bool(cfg.transition_probability) {
                transitions.push((s.clone(), e.clone(), states.choose(rng).expect("states").clone()));
                if rng.gen_bool(cfg.nondeterminism_probability) {
                    transitions.push((s.clone(), e.clone(), states.choose(rng).expect("states").clone()));
                }
            }
        }
    }
    let count = rng.gen_range(1..=cfg.max_initial_states.min(n));
    let initial: Vec<String> = states.choose_multiple(rng, count).cloned().collect();
    Plant::new(m, &states, &events, &transitions, &initial).expect("generated plant is well formed")
}

/// A matrix over `alphabet` with the given bound.
pub fn random_erm<R: Rng>(alphabet: &[EventId], bound: u32, cfg: &GenConfig, rng: &mut R) -> Erm {
    if cfg.identity_errors {
        return Erm::identity(alphabet.to_vec(), bound);
    }
    let symbols: Vec<Symbol> = std::iter::once(None)
        .chain(alphabet.iter().map(|&e| Some(e)))
        .collect();
    let mut entries = Vec::new();
    for &from in &symbols {
        for &to in &symbols {
            if from == to || !rng.gen_bool(cfg.error_probability) {
                continue;
            }
            let floor = if from.is_none() || to.is_none() { 1 } else { 0 };
            let top = cfg.max_error_cost.max(floor);
            entries.push((from, to, rng.gen_range(floor..=top)));
        }
    }
    validate_erm(&RawErm {
        alphabet: alphabet.to_vec(),
        bound,
        entries,
    })
    .expect("generated matrix is well formed")
}

fn random_bound<R: Rng>(cfg: &GenConfig, rng: &mut R) -> u32 {
    if cfg.identity_errors {
        0
    } else {
        rng.gen_range(0..=cfg.max_cost_bound)
    }
}

pub fn random_global_erm<R: Rng>(plant: &Plant, cfg: &GenConfig, rng: &mut R) -> Erm {
    let bound = random_bound(cfg, rng);
    random_erm(&plant.observable_events(), bound, cfg, rng)
}

pub fn random_local_erms<R: Rng>(plant: &Plant, cfg: &GenConfig, rng: &mut R) -> LocalErmSet {
    let bound = random_bound(cfg, rng);
    let sites = (0..plant.num_sites())
        .map(|s| random_erm(&plant.site_alphabet(s), bound, cfg, rng))
        .collect();
    LocalErmSet::new(plant, sites, bound).expect("generated local matrices are aligned")
}

/// An SI-state with arbitrary per-site sequences.
pub fn random_si_state<R: Rng>(plant: &Plant, max_len: usize, rng: &mut R) -> SiState {
    let seqs = (0..plant.num_sites())
        .map(|s| {
            let alphabet = plant.site_alphabet(s);
            if alphabet.is_empty() {
                return Vec::new();
            }
            let len = rng.gen_range(0..=max_len);
            (0..len).map(|_| *alphabet.choose(rng).expect("non-empty")).collect()
        })
        .collect();
    SiState::from_raw(seqs)
}

fn truncate(tau: SiState, max_len: usize) -> SiState {
    SiState::from_raw(
        tau.into_components()
            .into_iter()
            .map(|mut s| {
                s.truncate(max_len);
                s
            })
            .collect(),
    )
}

/// One global estimation problem.
#[derive(Debug, Clone)]
pub struct GlobalInstance {
    pub plant: Plant,
    pub erm: Erm,
    pub tau: SiState,
    pub q0: StateSet,
}

/// One local estimation problem.
#[derive(Debug, Clone)]
pub struct LocalInstance {
    pub plant: Plant,
    pub erms: LocalErmSet,
    pub tau: SiState,
    pub q0: StateSet,
}

pub fn global_instance<R: Rng>(cfg: &GenConfig, rng: &mut R) -> GlobalInstance {
    let plant = random_plant(cfg, rng);
    let erm = random_global_erm(&plant, cfg, rng);
    let q0 = plant.initial().clone();
    let tau = if rng.gen_bool(cfg.random_si_probability) {
        random_si_state(&plant, cfg.max_component_length, rng)
    } else {
        let len = rng.gen_range(0..=cfg.max_run_length);
        let run = sample_run(&plant, &q0, len, rng);
        truncate(tamper_global(&plant, &run.events, &erm, rng).tau, cfg.max_component_length)
    };
    GlobalInstance { plant, erm, tau, q0 }
}

pub fn local_instance<R: Rng>(cfg: &GenConfig, rng: &mut R) -> LocalInstance {
    let plant = random_plant(cfg, rng);
    let erms = random_local_erms(&plant, cfg, rng);
    let q0 = plant.initial().clone();
    let tau = if rng.gen_bool(cfg.random_si_probability) {
        random_si_state(&plant, cfg.max_component_length, rng)
    } else {
        let len = rng.gen_range(0..=cfg.max_run_length);
        let run = sample_run(&plant, &q0, len, rng);
        truncate(tamper_local(&plant, &run.events, &erms, rng).tau, cfg.max_component_length)
    };
    LocalInstance { plant, erms, tau, q0 }
}
