//! Synchronizer and modified-system documents, in JSON and DOT.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::engine::Synchronizer;
use crate::global::{CostedSiState, CostedState, GlobalBuilderSync, GlobalSystemSync, ModifiedPlantG, PairLabel};
use crate::local::{LocalBuilderSync, LocalPairLabel, LocalSystemSync, MTuple, ModifiedPlantL};
use crate::plant::{EventId, Plant, StateId};
use crate::si_state::SiState;

use super::files::{names, FORMAT_VERSION, EPS};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncEstimate {
    pub state: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncNode {
    pub id: usize,
    pub tau: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<u32>,
    pub ending: bool,
    pub estimate: Vec<SyncEstimate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncEdge {
    pub source: usize,
    pub target: usize,
    /// Hypothesised original symbol; builder edges only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original: Option<String>,
    /// Released symbol, one per site for multi-releases.
    pub received: Vec<String>,
    pub error: bool,
}

/// A built synchronizer, root first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncFile {
    pub format_version: u32,
    pub kind: String,
    pub nodes: Vec<SyncNode>,
    pub edges: Vec<SyncEdge>,
}

/// Any of the four synchronizers.
#[derive(Debug, Clone)]
pub enum AnySync {
    GlobalSystem(GlobalSystemSync),
    GlobalBuilder(GlobalBuilderSync),
    LocalSystem(LocalSystemSync),
    LocalBuilder(LocalBuilderSync),
}

fn sym(plant: &Plant, s: Option<EventId>) -> String {
    s.map_or_else(|| EPS.to_owned(), |e| plant.event_name(e).to_owned())
}

fn tuple_names(plant: &Plant, t: &MTuple) -> Vec<String> {
    t.iter().map(|&s| sym(plant, s)).collect()
}

trait NodeView {
    fn tau(&self) -> &SiState;
    fn cost(&self) -> Option<u32>;
}

impl NodeView for SiState {
    fn tau(&self) -> &SiState {
        self
    }
    fn cost(&self) -> Option<u32> {
        None
    }
}

impl NodeView for CostedSiState {
    fn tau(&self) -> &SiState {
        &self.tau
    }
    fn cost(&self) -> Option<u32> {
        Some(self.cost)
    }
}

trait StateView: Copy {
    fn entry(self, plant: &Plant) -> SyncEstimate;
}

impl StateView for StateId {
    fn entry(self, plant: &Plant) -> SyncEstimate {
        SyncEstimate {
            state: plant.state_name(self).to_owned(),
            cost: None,
        }
    }
}

impl StateView for CostedState {
    fn entry(self, plant: &Plant) -> SyncEstimate {
        SyncEstimate {
            state: plant.state_name(self.state).to_owned(),
            cost: Some(self.cost),
        }
    }
}

fn document<N, L, S>(
    plant: &Plant,
    kind: &str,
    sync: &Synchronizer<N, L, S>,
    edge: impl Fn(&L) -> (Option<String>, Vec<String>, bool),
) -> SyncFile
where
    N: Clone + Ord + NodeView,
    S: StateView,
{
    let graph = sync.graph();
    let nodes = graph
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, n)| {
            let mut estimate: Vec<SyncEstimate> =
                sync.estimate(id).iter().map(|s| s.entry(plant)).collect();
            estimate.sort();
            SyncNode {
                id,
                tau: names(plant, n.tau()),
                cost: n.cost(),
                ending: n.tau().is_ending(),
                estimate,
            }
        })
        .collect();
    let edges = graph
        .edges()
        .iter()
        .map(|e| {
            let (original, received, error) = edge(&e.label);
            SyncEdge {
                source: e.source,
                target: e.target,
                original,
                received,
                error,
            }
        })
        .collect();
    SyncFile {
        format_version: FORMAT_VERSION,
        kind: kind.to_owned(),
        nodes,
        edges,
    }
}

impl AnySync {
    pub fn kind(&self) -> &'static str {
        match self {
            AnySync::GlobalSystem(_) => "global-system",
            AnySync::GlobalBuilder(_) => "global-builder",
            AnySync::LocalSystem(_) => "local-system",
            AnySync::LocalBuilder(_) => "local-builder",
        }
    }

    pub fn to_file(&self, plant: &Plant) -> SyncFile {
        let kind = self.kind();
        match self {
            AnySync::GlobalSystem(s) => {
                document(plant, kind, s, |e: &EventId| (None, vec![sym(plant, Some(*e))], false))
            }
            AnySync::GlobalBuilder(s) => document(plant, kind, s, |l: &PairLabel| {
                (
                    Some(sym(plant, l.original)),
                    vec![sym(plant, l.received)],
                    l.is_error(),
                )
            }),
            AnySync::LocalSystem(s) => {
                document(plant, kind, s, |t: &MTuple| (None, tuple_names(plant, t), false))
            }
            AnySync::LocalBuilder(s) => document(plant, kind, s, |l: &LocalPairLabel| {
                (
                    Some(sym(plant, l.original)),
                    tuple_names(plant, &l.received),
                    l.is_error(plant),
                )
            }),
        }
    }

    pub fn to_dot(&self, plant: &Plant) -> String {
        sync_dot(&self.to_file(plant))
    }
}

fn quote(s: &str) -> String {
    format!(
        "\"{}\"",
        s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
    )
}

fn seq_text(seq: &[String]) -> String {
    if seq.is_empty() {
        "ε".to_owned()
    } else {
        seq.join(" ")
    }
}

fn symbol_text(s: &str) -> &str {
    if s == EPS {
        "ε"
    } else {
        s
    }
}

/// DOT rendering: label line one is the SI-state (with cost), line two the
/// estimate; ending nodes are double circles and error edges dashed.
pub fn sync_dot(doc: &SyncFile) -> String {
    let mut out = String::new();
    writeln!(out, "digraph synchronizer {{").unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    writeln!(out, "  node [shape=box];").unwrap();
    for node in &doc.nodes {
        let parts: Vec<String> = node.tau.iter().map(|s| seq_text(s)).collect();
        let mut head = format!("({})", parts.join(", "));
        if let Some(c) = node.cost {
            head = format!("({head}, {c})");
        }
        let est: Vec<String> = node
            .estimate
            .iter()
            .map(|e| match e.cost {
                Some(c) => format!("({}, {c})", e.state),
                None => e.state.clone(),
            })
            .collect();
        let label = format!("{head}\n{{{}}}", est.join(", "));
        let shape = if node.ending { ", shape=doublecircle" } else { "" };
        writeln!(out, "  n{} [label={}{shape}];", node.id, quote(&label)).unwrap();
    }
    for edge in &doc.edges {
        let received: Vec<&str> = edge.received.iter().map(|s| symbol_text(s)).collect();
        let mut label = if received.len() == 1 {
            received[0].to_owned()
        } else {
            format!("({})", received.join(", "))
        };
        if let Some(orig) = &edge.original {
            label = format!("{} / {label}", symbol_text(orig));
        }
        let style = if edge.error { ", style=dashed" } else { "" };
        writeln!(
            out,
            "  n{} -> n{} [label={}{style}];",
            edge.source,
            edge.target,
            quote(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostedStateName {
    pub state: String,
    pub cost: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModifiedTransition {
    pub source: CostedStateName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original: Option<String>,
    /// Empty for silent moves.
    pub received: Vec<String>,
    pub error: bool,
    pub target: CostedStateName,
}

/// A modified system written out as costed states and labelled moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModifiedFile {
    pub format_version: u32,
    pub kind: String,
    pub cost_bound: u32,
    pub initial: Vec<CostedStateName>,
    pub transitions: Vec<ModifiedTransition>,
}

fn costed(plant: &Plant, s: CostedState) -> CostedStateName {
    CostedStateName {
        state: plant.state_name(s.state).to_owned(),
        cost: s.cost,
    }
}

pub fn gg_file(plant: &Plant, gg: &ModifiedPlantG) -> ModifiedFile {
    let mut transitions: Vec<ModifiedTransition> = gg
        .transitions()
        .map(|(s, l, t)| ModifiedTransition {
            source: costed(plant, s),
            original: Some(sym(plant, l.original)),
            received: l.received.map(|e| vec![plant.event_name(e).to_owned()]).unwrap_or_default(),
            error: l.is_error(),
            target: costed(plant, t),
        })
        .collect();
    transitions.sort();
    ModifiedFile {
        format_version: FORMAT_VERSION,
        kind: "gg".to_owned(),
        cost_bound: gg.bound(),
        initial: gg.initial().iter().map(|&s| costed(plant, s)).collect(),
        transitions,
    }
}

pub fn gl_file(plant: &Plant, gl: &ModifiedPlantL) -> ModifiedFile {
    let mut transitions: Vec<ModifiedTransition> = gl
        .transitions()
        .map(|(s, l, t)| ModifiedTransition {
            source: costed(plant, s),
            original: Some(sym(plant, l.original)),
            received: if l.tuple.iter().all(Option::is_none) {
                Vec::new()
            } else {
                tuple_names(plant, &l.tuple)
            },
            error: l.is_error(),
            target: costed(plant, t),
        })
        .collect();
    transitions.sort();
    let initial: BTreeSet<CostedStateName> = plant
        .initial()
        .iter()
        .map(|&q| costed(plant, CostedState::new(q, 0)))
        .collect();
    ModifiedFile {
        format_version: FORMAT_VERSION,
        kind: "gl".to_owned(),
        cost_bound: gl.bound(),
        initial: initial.into_iter().collect(),
        transitions,
    }
}

/// DOT rendering of a modified system; error moves are dashed.
pub fn modified_dot(doc: &ModifiedFile) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", doc.kind).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    let mut states: BTreeSet<&CostedStateName> = BTreeSet::new();
    for t in &doc.transitions {
        states.insert(&t.source);
        states.insert(&t.target);
    }
    states.extend(doc.initial.iter());
    let id = |s: &CostedStateName| quote(&format!("{}/{}", s.state, s.cost));
    for s in &states {
        let shape = if doc.initial.contains(s) { ", peripheries=2" } else { "" };
        writeln!(
            out,
            "  {} [label={}{shape}];",
            id(s),
            quote(&format!("({}, {})", s.state, s.cost))
        )
        .unwrap();
    }
    for t in &doc.transitions {
        let received: Vec<&str> = t.received.iter().map(|s| symbol_text(s)).collect();
        let label = match received.len() {
            0 => "ε".to_owned(),
            1 => received[0].to_owned(),
            _ => format!("({})", received.join(", ")),
        };
        let style = if t.error { ", style=dashed" } else { "" };
        writeln!(
            out,
            "  {} -> {} [label={}{style}];",
            id(&t.source),
            id(&t.target),
            quote(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
