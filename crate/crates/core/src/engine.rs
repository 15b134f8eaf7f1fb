//! Release graphs and the estimation-by-release engine.
//!
//! Nodes are processed by descending level and then by node order. Every
//! release must lead to a node that comes strictly later in that order, so a
//! node's estimate is complete by the time it is popped. The estimators keep
//! this true by using the total sequence count as level and ordering costed
//! nodes by `(tau, cost)`; a violation is reported as an invariant error.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use crate::error::{Error, Result};

/// Default cap on the number of nodes of any built graph.
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge<L> {
    pub source: usize,
    pub label: L,
    pub target: usize,
}

/// A rooted release graph. Node 0 is the root; ids follow discovery order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph<N, L> {
    nodes: Vec<N>,
    index: BTreeMap<N, usize>,
    edges: Vec<Edge<L>>,
    outgoing: Vec<Vec<usize>>,
}

impl<N: Clone + Ord, L> Graph<N, L> {
    fn with_root(root: N) -> Self {
        let mut index = BTreeMap::new();
        index.insert(root.clone(), 0);
        Graph {
            nodes: vec![root],
            index,
            edges: Vec::new(),
            outgoing: vec![Vec::new()],
        }
    }

    fn intern(&mut self, node: N, cap: usize) -> Result<(usize, bool)> {
        if let Some(&id) = self.index.get(&node) {
            return Ok((id, false));
        }
        if self.nodes.len() >= cap {
            return Err(Error::resource(format!("release graph exceeds {cap} nodes")));
        }
        let id = self.nodes.len();
        self.index.insert(node.clone(), id);
        self.nodes.push(node);
        self.outgoing.push(Vec::new());
        Ok((id, true))
    }

    fn add_edge(&mut self, source: usize, label: L, target: usize) {
        self.outgoing[source].push(self.edges.len());
        self.edges.push(Edge {
            source,
            label,
            target,
        });
    }

    pub fn root(&self) -> &N {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[N] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &N {
        &self.nodes[id]
    }

    pub fn id_of(&self, node: &N) -> Option<usize> {
        self.index.get(node).copied()
    }

    pub fn edges(&self) -> &[Edge<L>] {
        &self.edges
    }

    pub fn outgoing(&self, id: usize) -> impl Iterator<Item = &Edge<L>> {
        self.outgoing[id].iter().map(move |&e| &self.edges[e])
    }

    pub fn out_degree(&self, id: usize) -> usize {
        self.outgoing[id].len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
}

/// Explores every node reachable from `root` under `successors`, without
/// any estimate. `level` must strictly order edges as described above.
pub fn explore<N, L>(
    root: N,
    level: impl Fn(&N) -> usize,
    successors: impl Fn(&N) -> Vec<(L, N)>,
    cap: usize,
) -> Result<Graph<N, L>>
where
    N: Clone + Ord + Debug,
{
    let mut graph = Graph::with_root(root.clone());
    let mut queue = BTreeSet::from([(Reverse(level(&root)), root)]);
    while let Some(key) = queue.pop_first() {
        let source = graph.index[&key.1];
        for (label, target) in successors(&key.1) {
            let target_key = (Reverse(level(&target)), target);
            check_order(&key, &target_key)?;
            let (id, fresh) = graph.intern(target_key.1.clone(), cap)?;
            if fresh {
                queue.insert(target_key);
            }
            graph.add_edge(source, label, id);
        }
    }
    Ok(graph)
}

fn check_order<N: Ord + Debug>(source: &(Reverse<usize>, N), target: &(Reverse<usize>, N)) -> Result<()> {
    if target <= source {
        return Err(Error::invariant(format!(
            "release from {:?} to {:?} does not move forward in the schedule",
            source.1, target.1
        )));
    }
    Ok(())
}

/// One candidate release out of a node with the estimate it contributes to
/// the target.
#[derive(Debug, Clone)]
pub struct Release<N, L, S> {
    pub label: L,
    pub target: N,
    pub contribution: BTreeSet<S>,
}

/// A release structure whose nodes carry state estimates.
pub trait ReleaseSystem {
    type Node: Clone + Ord + Debug;
    type Label;
    type State: Copy + Ord;

    fn level(&self, node: &Self::Node) -> usize;

    /// Feasible releases out of `node` given its final estimate. Every
    /// contribution must be non-empty.
    fn releases(
        &self,
        node: &Self::Node,
        estimate: &BTreeSet<Self::State>,
    ) -> Vec<Release<Self::Node, Self::Label, Self::State>>;
}

/// A release graph annotated with an estimate per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synchronizer<N, L, S> {
    graph: Graph<N, L>,
    estimates: Vec<BTreeSet<S>>,
}

impl<N: Clone + Ord, L, S> Synchronizer<N, L, S> {
    pub fn graph(&self) -> &Graph<N, L> {
        &self.graph
    }

    pub fn estimate(&self, id: usize) -> &BTreeSet<S> {
        &self.estimates[id]
    }

    pub fn estimate_of(&self, node: &N) -> Option<&BTreeSet<S>> {
        self.graph.id_of(node).map(|id| &self.estimates[id])
    }

    pub fn estimates(&self) -> &[BTreeSet<S>] {
        &self.estimates
    }
}

/// Builds the synchronizer rooted at `root` with `initial` as root estimate.
pub fn synchronize<R: ReleaseSystem>(
    system: &R,
    root: R::Node,
    initial: BTreeSet<R::State>,
    cap: usize,
) -> Result<Synchronizer<R::Node, R::Label, R::State>> {
    let mut graph = Graph::with_root(root.clone());
    let mut estimates = vec![initial];
    let mut queue = BTreeSet::from([(Reverse(system.level(&root)), root)]);
    while let Some(key) = queue.pop_first() {
        let source = graph.index[&key.1];
        let estimate = std::mem::take(&mut estimates[source]);
        for release in system.releases(&key.1, &estimate) {
            if release.contribution.is_empty() {
                return Err(Error::invariant(format!(
                    "empty contribution released from {:?}",
                    key.1
                )));
            }
            let target_key = (Reverse(system.level(&release.target)), release.target);
            check_order(&key, &target_key)?;
            let (id, fresh) = graph.intern(target_key.1.clone(), cap)?;
            if fresh {
                estimates.push(BTreeSet::new());
                queue.insert(target_key);
            }
            estimates[id].extend(release.contribution);
            graph.add_edge(source, release.label, id);
        }
        estimates[source] = estimate;
    }
    Ok(Synchronizer { graph, estimates })
}

/// Marked-path projections gathered from a release graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction<T> {
    pub items: BTreeSet<T>,
    /// False when the limit cut enumeration short.
    pub complete: bool,
}

type WordSet<E> = BTreeSet<(Vec<E>, u32)>;

/// Collects `(word, cost)` for every path from the root to a marked node,
/// where the word concatenates `emit` over the path's labels and the cost
/// is the one `marked` reports for the last node. At most `limit` distinct
/// pairs are kept per node.
pub fn marked_words<N, L, E>(
    graph: &Graph<N, L>,
    marked: impl Fn(&N) -> Option<u32>,
    emit: impl Fn(&L) -> Option<E>,
    limit: usize,
) -> Extraction<(Vec<E>, u32)>
where
    N: Clone + Ord,
    E: Clone + Ord,
{
    let mut memo: Vec<Option<WordSet<E>>> = vec![None; graph.num_nodes()];
    let mut complete = true;
    let mut stack = vec![(0usize, false)];
    while let Some((id, expanded)) = stack.pop() {
        if memo[id].is_some() {
            continue;
        }
        if !expanded {
            stack.push((id, true));
            for edge in graph.outgoing(id) {
                if memo[edge.target].is_none() {
                    stack.push((edge.target, false));
                }
            }
            continue;
        }
        let mut words = BTreeSet::new();
        if let Some(cost) = marked(graph.node(id)) {
            words.insert((Vec::new(), cost));
        }
        for edge in graph.outgoing(id) {
            let symbol = emit(&edge.label);
            for (suffix, cost) in memo[edge.target].as_ref().expect("post-order") {
                let mut word = Vec::with_capacity(suffix.len() + 1);
                word.extend(symbol.clone());
                word.extend(suffix.iter().cloned());
                words.insert((word, *cost));
            }
        }
        if words.len() > limit {
            complete = false;
            words = words.into_iter().take(limit).collect();
        }
        memo[id] = Some(words);
    }
    Extraction {
        items: memo[0].take().unwrap_or_default(),
        complete,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Countdown;

    impl ReleaseSystem for Countdown {
        type Node = u32;
        type Label = u32;
        type State = u32;

        fn level(&self, node: &u32) -> usize {
            *node as usize
        }

        fn releases(&self, node: &u32, estimate: &BTreeSet<u32>) -> Vec<Release<u32, u32, u32>> {
            (1..=2)
                .filter(|k| *k <= *node)
                .map(|k| Release {
                    label: k,
                    target: node - k,
                    contribution: estimate.iter().map(|s| s + k).collect(),
                })
                .collect()
        }
    }

    #[test]
    fn estimates_accumulate_over_all_paths() {
        let sync = synchronize(&Countdown, 3, BTreeSet::from([0]), 100).unwrap();
        assert_eq!(sync.graph().num_nodes(), 4);
        assert_eq!(sync.estimate_of(&0), Some(&BTreeSet::from([3])));
        assert_eq!(sync.estimate_of(&1), Some(&BTreeSet::from([2])));
    }

    #[test]
    fn backward_edges_are_rejected() {
        let result = explore(0u32, |_| 0, |n| if *n < 2 { vec![((), n + 1)] } else { vec![((), 0)] }, 10);
        assert!(matches!(result, Err(Error::Invariant(_))));
    }

    #[test]
    fn node_cap() {
        let result = explore(10u32, |n| *n as usize, |n| if *n > 0 { vec![((), n - 1)] } else { vec![] }, 5);
        assert!(matches!(result, Err(Error::Resource(_))));
    }

    #[test]
    fn marked_words_over_diamond() {
        let graph = explore(
            2u32,
            |n| *n as usize,
            |n| match n {
                2 => vec![('a', 1), ('b', 1)],
                1 => vec![('c', 0)],
                _ => vec![],
            },
            10,
        )
        .unwrap();
        let words = marked_words(&graph, |n| (*n == 0).then_some(0), |l| Some(*l), 10);
        assert!(words.complete);
        assert_eq!(
            words.items,
            BTreeSet::from([(vec!['a', 'c'], 0), (vec!['b', 'c'], 0)])
        );
        let capped = marked_words(&graph, |n| (*n == 0).then_some(0), |l| Some(*l), 1);
        assert!(!capped.complete);
    }
}
