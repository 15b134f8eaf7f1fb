//! JSON document types and their conversion to model values.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::erm::{Erm, LocalErmSet, RawErm, Symbol};
use crate::error::{Error, Result};
use crate::estimate::EstimateSet;
use crate::plant::{EventId, Plant, StateSet};
use crate::si_state::SiState;

pub const FORMAT_VERSION: u32 = 1;

/// Reserved token for the empty symbol.
pub const EPS: &str = "eps";

/// Parses `text` as `T`, reporting the field path and position of the
/// first problem.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Format {
            path,
            message: inner.to_string(),
        }
    })
}

/// Canonical text: keys sorted, two-space indent, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("document serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
    text.push('\n');
    text
}

fn check_version(found: u32, what: &str) -> Result<()> {
    if found != FORMAT_VERSION {
        return Err(Error::Format {
            path: "format_version".to_owned(),
            message: format!("unsupported {what} format version {found}, expected {FORMAT_VERSION}"),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDecl {
    pub name: String,
    pub observers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantFile {
    pub format_version: u32,
    pub num_sites: usize,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub events: Vec<EventDecl>,
    pub transitions: Vec<[String; 3]>,
}

impl PlantFile {
    pub fn to_plant(&self) -> Result<Plant> {
        check_version(self.format_version, "plant")?;
        let events: Vec<(&str, Vec<usize>)> = self
            .events
            .iter()
            .map(|e| (e.name.as_str(), e.observers.clone()))
            .collect();
        if events.iter().any(|(n, _)| *n == EPS) {
            return Err(Error::invalid(format!("event name `{EPS}` is reserved")));
        }
        let transitions: Vec<(&str, &str, &str)> = self
            .transitions
            .iter()
            .map(|[s, e, t]| (s.as_str(), e.as_str(), t.as_str()))
            .collect();
        let states: Vec<&str> = self.states.iter().map(String::as_str).collect();
        let initial: Vec<&str> = self.initial.iter().map(String::as_str).collect();
        Plant::new(self.num_sites, &states, &events, &transitions, &initial)
    }

    pub fn from_plant(plant: &Plant) -> Self {
        PlantFile {
            format_version: FORMAT_VERSION,
            num_sites: plant.num_sites(),
            states: plant.states().map(|q| plant.state_name(q).to_owned()).collect(),
            initial: plant.initial().iter().map(|&q| plant.state_name(q).to_owned()).collect(),
            events: plant
                .events()
                .map(|e| EventDecl {
                    name: plant.event_name(e).to_owned(),
                    observers: plant.observers(e).iter().map(|s| s + 1).collect(),
                })
                .collect(),
            transitions: plant
                .transitions()
                .map(|(s, e, t)| {
                    [
                        plant.state_name(s).to_owned(),
                        plant.event_name(e).to_owned(),
                        plant.state_name(t).to_owned(),
                    ]
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErmEntry {
    pub from: String,
    pub to: String,
    pub cost: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErmFile {
    pub format_version: u32,
    pub cost_bound: u32,
    pub alphabet: Vec<String>,
    pub entries: Vec<ErmEntry>,
}

fn symbol(plant: &Plant, name: &str) -> Result<Symbol> {
    if name == EPS {
        Ok(None)
    } else {
        plant.event_id(name).map(Some)
    }
}

fn symbol_name(plant: &Plant, s: Symbol) -> String {
    s.map_or_else(|| EPS.to_owned(), |e| plant.event_name(e).to_owned())
}

fn raw_erm(plant: &Plant, bound: u32, alphabet: &[String], entries: &[ErmEntry]) -> Result<RawErm> {
    let alphabet = alphabet
        .iter()
        .map(|n| plant.event_id(n))
        .collect::<Result<Vec<EventId>>>()?;
    let entries = entries
        .iter()
        .map(|e| Ok((symbol(plant, &e.from)?, symbol(plant, &e.to)?, e.cost)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RawErm {
        alphabet,
        bound,
        entries,
    })
}

fn entries_of(plant: &Plant, erm: &Erm) -> Vec<ErmEntry> {
    let mut entries: Vec<ErmEntry> = erm
        .error_actions()
        .into_iter()
        .map(|(f, t, cost)| ErmEntry {
            from: symbol_name(plant, f),
            to: symbol_name(plant, t),
            cost,
        })
        .collect();
    entries.sort_by(|a, b| (&a.from, &a.to).cmp(&(&b.from, &b.to)));
    entries
}

impl ErmFile {
    /// Resolves names against `plant` and validates the matrix.
    pub fn to_erm(&self, plant: &Plant) -> Result<Erm> {
        check_version(self.format_version, "matrix")?;
        let raw = raw_erm(plant, self.cost_bound, &self.alphabet, &self.entries)?;
        Erm::from_raw(&raw, |e| plant.event_name(e).to_owned())
    }

    pub fn from_erm(plant: &Plant, erm: &Erm) -> Self {
        ErmFile {
            format_version: FORMAT_VERSION,
            cost_bound: erm.bound(),
            alphabet: erm.alphabet().iter().map(|&e| plant.event_name(e).to_owned()).collect(),
            entries: entries_of(plant, erm),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteErm {
    pub site: usize,
    pub alphabet: Vec<String>,
    pub entries: Vec<ErmEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalErmFile {
    pub format_version: u32,
    pub cost_bound: u32,
    pub sites: Vec<SiteErm>,
}

impl LocalErmFile {
    pub fn to_erms(&self, plant: &Plant) -> Result<LocalErmSet> {
        check_version(self.format_version, "local matrix")?;
        let m = plant.num_sites();
        let mut per_site: Vec<Option<Erm>> = vec![None; m];
        for entry in &self.sites {
            if entry.site == 0 || entry.site > m {
                return Err(Error::invalid(format!(
                    "local matrix names site {}, expected 1..={m}",
                    entry.site
                )));
            }
            let slot = &mut per_site[entry.site - 1];
            if slot.is_some() {
                return Err(Error::Duplicate {
                    kind: "site",
                    name: entry.site.to_string(),
                });
            }
            let raw = raw_erm(plant, self.cost_bound, &entry.alphabet, &entry.entries)?;
            let erm = Erm::from_raw(&raw, |e| plant.event_name(e).to_owned()).map_err(|e| match e {
                Error::InvalidErm(d) => Error::InvalidErm(
                    d.into_iter().map(|m| format!("site {}: {m}", entry.site)).collect(),
                ),
                other => other,
            })?;
            *slot = Some(erm);
        }
        let per_site = per_site
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| Error::invalid(format!("no matrix for site {}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        LocalErmSet::new(plant, per_site, self.cost_bound)
    }

    pub fn from_erms(plant: &Plant, erms: &LocalErmSet) -> Self {
        LocalErmFile {
            format_version: FORMAT_VERSION,
            cost_bound: erms.bound(),
            sites: erms
                .sites()
                .iter()
                .enumerate()
                .map(|(i, erm)| SiteErm {
                    site: i + 1,
                    alphabet: erm.alphabet().iter().map(|&e| plant.event_name(e).to_owned()).collect(),
                    entries: entries_of(plant, erm),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiStateFile {
    pub format_version: u32,
    pub sequences: Vec<Vec<String>>,
}

impl SiStateFile {
    pub fn to_si_state(&self, plant: &Plant, capacity: usize) -> Result<SiState> {
        check_version(self.format_version, "SI-state")?;
        let seqs = self
            .sequences
            .iter()
            .map(|s| s.iter().map(|n| plant.event_id(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        SiState::new(plant, seqs, capacity)
    }

    pub fn from_si_state(plant: &Plant, tau: &SiState) -> Self {
        SiStateFile {
            format_version: FORMAT_VERSION,
            sequences: names(plant, tau),
        }
    }
}

pub(crate) fn names(plant: &Plant, tau: &SiState) -> Vec<Vec<String>> {
    tau.components()
        .iter()
        .map(|s| s.iter().map(|&e| plant.event_name(e).to_owned()).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateEntry {
    pub state: String,
    pub cost: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateFile {
    pub format_version: u32,
    pub estimates: Vec<EstimateEntry>,
}

impl EstimateFile {
    pub fn from_estimate(plant: &Plant, est: &EstimateSet) -> Self {
        let mut estimates: Vec<EstimateEntry> = est
            .iter()
            .map(|(q, cost)| EstimateEntry {
                state: plant.state_name(q).to_owned(),
                cost,
            })
            .collect();
        estimates.sort();
        EstimateFile {
            format_version: FORMAT_VERSION,
            estimates,
        }
    }

    pub fn to_estimate(&self, plant: &Plant) -> Result<EstimateSet> {
        check_version(self.format_version, "estimate")?;
        self.estimates
            .iter()
            .map(|e| Ok((plant.state_id(&e.state)?, e.cost)))
            .collect()
    }
}

/// Resolves a list of state names.
pub fn state_set(plant: &Plant, names: &[impl AsRef<str>]) -> Result<StateSet> {
    if names.is_empty() {
        return Err(Error::invalid("initial state set is empty"));
    }
    names.iter().map(|n| plant.state_id(n.as_ref())).collect()
}

/// A sequence of synchronizations; each step's SI-state is given inline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub format_version: u32,
    pub mode: String,
    pub method: String,
    /// Paths relative to the chain file.
    pub plant: String,
    pub erm: String,
    pub initial: Vec<String>,
    pub steps: Vec<Vec<Vec<String>>>,
}

impl ChainFile {
    pub fn check(&self) -> Result<()> {
        check_version(self.format_version, "chain")
    }

    pub fn step(&self, plant: &Plant, index: usize, capacity: usize) -> Result<SiState> {
        SiStateFile {
            format_version: FORMAT_VERSION,
            sequences: self.steps[index].clone(),
        }
        .to_si_state(plant, capacity)
    }
}
