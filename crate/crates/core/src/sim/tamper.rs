//! Run sampling and randomized tampering.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::erm::{Erm, LocalErmSet, Symbol};
use crate::plant::{EventId, Plant, StateId, StateSet};
use crate::si_state::SiState;

/// A run of the plant from one concrete initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledRun {
    pub events: Vec<EventId>,
    pub start: StateId,
    /// Concrete state the sampled path ends in.
    pub state: StateId,
    /// Every state the event sequence reaches from the initial set.
    pub reached: StateSet,
    /// Set when the walk hit a dead end before the requested length.
    pub truncated: bool,
}

/// Uniform random walk of at most `len` events starting in a state of `q0`.
pub fn sample_run<R: Rng>(plant: &Plant, q0: &StateSet, len: usize, rng: &mut R) -> SampledRun {
    let starts: Vec<StateId> = q0.iter().copied().collect();
    let start = *starts.choose(rng).expect("non-empty initial set");
    let mut state = start;
    let mut events = Vec::with_capacity(len);
    let mut truncated = false;
    for _ in 0..len {
        match plant.successors(state).choose(rng) {
            Some(&(e, next)) => {
                events.push(e);
                state = next;
            }
            None => {
                truncated = true;
                break;
            }
        }
    }
    let mut reached = q0.clone();
    for &e in &events {
        reached = reached
            .iter()
            .flat_map(|&s| plant.successors(s).iter().filter(move |(ev, _)| *ev == e).map(|&(_, t)| t))
            .collect();
    }
    SampledRun {
        events,
        start,
        state,
        reached,
        truncated,
    }
}

/// One step of an edit script.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditAction {
    Keep(EventId),
    Delete(EventId),
    Replace(EventId, EventId),
    Insert(EventId),
}

/// A received word with the script that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tampering {
    pub received: Vec<EventId>,
    pub cost: u32,
    pub script: Vec<EditAction>,
}

fn maybe_insert<R: Rng>(erm: &Erm, budget: u32, out: &mut Tampering, rng: &mut R) {
    if !rng.gen_bool(0.25) {
        return;
    }
    let options: Vec<(EventId, u32)> = erm
        .alphabet()
        .iter()
        .filter_map(|&e| erm.cost(None, Some(e)).map(|c| (e, c)))
        .filter(|&(_, c)| out.cost + c <= budget)
        .collect();
    if let Some(&(e, c)) = options.choose(rng) {
        out.received.push(e);
        out.cost += c;
        out.script.push(EditAction::Insert(e));
    }
}

/// Random admissible edit of `w` whose total cost stays within `budget`.
pub fn sample_tampering<R: Rng>(w: &[EventId], erm: &Erm, budget: u32, rng: &mut R) -> Tampering {
    let mut out = Tampering {
        received: Vec::new(),
        cost: 0,
        script: Vec::new(),
    };
    for &sigma in w {
        maybe_insert(erm, budget, &mut out, rng);
        let mut options: Vec<(Symbol, u32)> = Vec::new();
        for to in std::iter::once(None).chain(erm.alphabet().iter().map(|&e| Some(e))) {
            if to == Some(sigma) {
                continue;
            }
            if let Some(c) = erm.cost(Some(sigma), to) {
                if out.cost + c <= budget {
                    options.push((to, c));
                }
            }
        }
        let pick = if options.is_empty() || rng.gen_bool(0.5) {
            None
        } else {
            options.choose(rng).copied()
        };
        match pick {
            None => {
                out.received.push(sigma);
                out.script.push(EditAction::Keep(sigma));
            }
            Some((None, c)) => {
                out.cost += c;
                out.script.push(EditAction::Delete(sigma));
            }
            Some((Some(to), c)) => {
                out.cost += c;
                out.received.push(to);
                out.script.push(EditAction::Replace(sigma, to));
            }
        }
    }
    maybe_insert(erm, budget, &mut out, rng);
    out
}

/// Result of tampering a run's observation under a single matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalTampering {
    pub tau: SiState,
    pub cost: u32,
    pub script: Vec<EditAction>,
}

/// Tampers the observable projection of `run`, then splits it per site.
pub fn tamper_global<R: Rng>(plant: &Plant, run: &[EventId], erm: &Erm, rng: &mut R) -> GlobalTampering {
    let w = plant.project_observable(run);
    let t = sample_tampering(&w, erm, erm.bound(), rng);
    GlobalTampering {
        tau: SiState::observe(plant, &t.received),
        cost: t.cost,
        script: t.script,
    }
}

/// Result of tampering each site's projection separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTampering {
    pub tau: SiState,
    pub cost: u32,
    pub scripts: Vec<Vec<EditAction>>,
}

/// Tampers every site projection of `run`. Sites draw from a shared budget in
/// random order.
pub fn tamper_local<R: Rng>(plant: &Plant, run: &[EventId], erms: &LocalErmSet, rng: &mut R) -> LocalTampering {
    let m = plant.num_sites();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut seqs = vec![Vec::new(); m];
    let mut scripts = vec![Vec::new(); m];
    let mut cost = 0;
    for site in order {
        let w = plant.project(run, site).expect("site in range");
        let t = sample_tampering(&w, erms.site(site), erms.bound() - cost, rng);
        cost += t.cost;
        seqs[site] = t.received;
        scripts[site] = t.script;
    }
    LocalTampering {
        tau: SiState::from_raw(seqs),
        cost,
        scripts,
    }
}
