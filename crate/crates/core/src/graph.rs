//! Undirected simple graphs and network-wide degree centralization.
//!
//! The centralization index of a graph with `n` nodes, `m` edges and maximum
//! degree `d*` is
//!
//! ```text
//! C = Σ_i (d* - d_i) / ((n - 1)(n - 2)) = (n·d* - 2m) / ((n - 1)(n - 2))
//! ```
//!
//! It is 1 for a star and 0 for any regular graph. Graphs with fewer than
//! three nodes have centralization 0.
//!
//! Every value produced here is a ratio of two exact integers divided once in
//! floating point, so two mathematically equal values are bit-identical.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}` -- `{1}`")]
    DuplicateEdge(String, String),
    #[error("node id {id} is out of range for a graph with {node_count} nodes")]
    UnknownNode { id: NodeId, node_count: usize },
    #[error("unknown node label `{0}`")]
    UnknownLabel(String),
    #[error("node {0} is already in the removal set")]
    CandidateInBase(NodeId),
    #[error("node {0} is in the no-strike set")]
    NoStrikeMember(NodeId),
}

/// Immutable undirected simple graph with dense node ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    // sorted, no duplicates, no self-loops
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph whose labels are the decimal node ids.
    ///
    /// Unlike [`GraphBuilder`], repeated edges are rejected here.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::with_nodes(node_count);
        for &(u, v) in edges {
            if !builder.add_edge(u, v)? {
                return Err(GraphError::DuplicateEdge(u.to_string(), v.to_string()));
            }
        }
        Ok(builder.build())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Neighbors of `node` in ascending id order.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency
            .get(u)
            .is_some_and(|adj| adj.binary_search(&v).is_ok())
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.node_count()
    }

    /// Every edge once as `(u, v)` with `u < v`, ordered by `u` then `v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, adj)| {
            adj.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Edges incident to `node`, each normalized to `(min, max)`.
    pub fn incident_edges(&self, node: NodeId) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency[node]
            .iter()
            .map(move |&v| (node.min(v), node.max(v)))
    }

    fn check_node(&self, id: NodeId) -> Result<(), GraphError> {
        if id < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::UnknownNode {
                id,
                node_count: self.node_count(),
            })
        }
    }
}

/// Incremental construction of a [`Graph`] keyed by labels or ids.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    adjacency: Vec<BTreeSet<NodeId>>,
    duplicate_edges: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts with nodes `0..n` labelled by their ids.
    pub fn with_nodes(n: usize) -> Self {
        let mut builder = Self::new();
        for i in 0..n {
            builder.add_node(&i.to_string());
        }
        builder
    }

    /// Returns the id of `label`, creating the node on first sight.
    pub fn add_node(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        self.adjacency.push(BTreeSet::new());
        id
    }

    /// Adds an edge between existing ids. Returns `false` if it was already present.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        let n = self.labels.len();
        for id in [u, v] {
            if id >= n {
                return Err(GraphError::UnknownNode { id, node_count: n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(self.labels[u].clone()));
        }
        let inserted = self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
        if !inserted {
            self.duplicate_edges += 1;
        }
        Ok(inserted)
    }

    pub fn add_labeled_edge(&mut self, a: &str, b: &str) -> Result<bool, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a.to_owned()));
        }
        let u = self.add_node(a);
        let v = self.add_node(b);
        self.add_edge(u, v)
    }

    /// Number of `add_edge` calls that hit an existing edge.
    pub fn duplicate_edges(&self) -> usize {
        self.duplicate_edges
    }

    pub fn build(self) -> Graph {
        let adjacency: Vec<Vec<NodeId>> = self
            .adjacency
            .into_iter()
            .map(|set| set.into_iter().collect())
            .collect();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Graph {
            labels: self.labels,
            index: self.index,
            adjacency,
            edge_count,
        }
    }
}

macro_rules! node_set {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
        pub struct $name(BTreeSet<NodeId>);

        impl $name {
            pub fn empty() -> Self {
                Self::default()
            }

            /// Collects `ids`, rejecting any id that is not a node of `graph`.
            pub fn new<I>(graph: &Graph, ids: I) -> Result<Self, GraphError>
            where
                I: IntoIterator<Item = NodeId>,
            {
                let mut members = BTreeSet::new();
                for id in ids {
                    graph.check_node(id)?;
                    members.insert(id);
                }
                Ok(Self(members))
            }

            pub fn from_labels<'a, I>(graph: &Graph, labels: I) -> Result<Self, GraphError>
            where
                I: IntoIterator<Item = &'a str>,
            {
                let mut members = BTreeSet::new();
                for label in labels {
                    let id = graph
                        .node_id(label)
                        .ok_or_else(|| GraphError::UnknownLabel(label.to_owned()))?;
                    members.insert(id);
                }
                Ok(Self(members))
            }

            pub fn contains(&self, id: NodeId) -> bool {
                self.0.contains(&id)
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            /// Members in ascending id order.
            pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
                self.0.iter().copied()
            }

            pub fn as_set(&self) -> &BTreeSet<NodeId> {
                &self.0
            }
        }
    };
}

node_set!(
    /// Nodes that stay in the graph but may never be chosen for removal.
    NoStrikeSet
);

node_set!(
    /// A set of nodes to delete from a graph.
    RemovalSet
);

impl RemovalSet {
    /// Returns a copy with `id` added.
    pub fn with(&self, id: NodeId) -> Self {
        let mut members = self.0.clone();
        members.insert(id);
        Self(members)
    }

    pub(crate) fn from_trusted<I: IntoIterator<Item = NodeId>>(ids: I) -> Self {
        Self(ids.into_iter().collect())
    }
}

/// Centralization of a graph described only by its size, maximum degree and
/// edge count. Zero when fewer than three nodes remain.
pub fn centralization(node_count: usize, max_degree: usize, edge_count: usize) -> f64 {
    if node_count < 3 {
        return 0.0;
    }
    let n = node_count as u64;
    let numerator = n * max_degree as u64 - 2 * edge_count as u64;
    let denominator = (n - 1) * (n - 2);
    numerator as f64 / denominator as f64
}

/// Freeman network-wide degree centrality of `graph`, in `[0, 1]`.
pub fn network_degree_centrality(graph: &Graph) -> f64 {
    centralization(graph.node_count(), graph.max_degree(), graph.edge_count())
}

/// Centralization of the graph left after deleting `removed`.
///
/// # Panics
///
/// If `removed` holds an id that is not a node of `graph`.
pub fn fragile(graph: &Graph, removed: &RemovalSet) -> f64 {
    let mut alive = vec![true; graph.node_count()];
    for id in removed.iter() {
        alive[id] = false;
    }
    let mut nodes = 0;
    let mut degree_sum = 0;
    let mut max_degree = 0;
    for u in graph.nodes().filter(|&u| alive[u]) {
        let d = graph.neighbors(u).iter().filter(|&&v| alive[v]).count();
        nodes += 1;
        degree_sum += d;
        max_degree = max_degree.max(d);
    }
    centralization(nodes, max_degree, degree_sum / 2)
}

/// `fragile(base ∪ {candidate}) - fragile(base)`, evaluated incrementally.
pub fn marginal_gain(
    graph: &Graph,
    base: &RemovalSet,
    candidate: NodeId,
) -> Result<f64, GraphError> {
    graph.check_node(candidate)?;
    for id in base.iter() {
        graph.check_node(id)?;
    }
    if base.contains(candidate) {
        return Err(GraphError::CandidateInBase(candidate));
    }
    let mut state = FragilityState::new(graph);
    for id in base.iter() {
        state.remove(id);
    }
    Ok(state.gain(candidate))
}

/// Subgraph induced by `keep`, with node ids renumbered in ascending order of
/// the original ids and labels carried over.
pub fn induced_subgraph(graph: &Graph, keep: &BTreeSet<NodeId>) -> Result<Graph, GraphError> {
    let mut new_id = vec![usize::MAX; graph.node_count()];
    let mut builder = GraphBuilder::new();
    for &old in keep {
        graph.check_node(old)?;
        new_id[old] = builder.add_node(graph.label(old));
    }
    for (u, v) in graph.edges() {
        if new_id[u] != usize::MAX && new_id[v] != usize::MAX {
            builder.add_edge(new_id[u], new_id[v])?;
        }
    }
    Ok(builder.build())
}

/// Working copy of a graph's degree structure under node deletion.
///
/// Keeps the live degree of every node, a histogram of live degrees and the
/// current maximum, so deleting or restoring node `i` costs `O(d_i)` plus the
/// distance the maximum moves.
#[derive(Debug, Clone)]
pub struct FragilityState<'g> {
    graph: &'g Graph,
    alive: Vec<bool>,
    degree: Vec<usize>,
    degree_histogram: Vec<usize>,
    alive_nodes: usize,
    alive_edges: usize,
    max_degree: usize,
}

impl<'g> FragilityState<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let degree: Vec<usize> = graph.nodes().map(|u| graph.degree(u)).collect();
        let max_degree = degree.iter().copied().max().unwrap_or(0);
        let mut degree_histogram = vec![0; max_degree + 1];
        for &d in &degree {
            degree_histogram[d] += 1;
        }
        Self {
            graph,
            alive: vec![true; graph.node_count()],
            degree,
            degree_histogram,
            alive_nodes: graph.node_count(),
            alive_edges: graph.edge_count(),
            max_degree,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn is_alive(&self, node: NodeId) -> bool {
        self.alive[node]
    }

    pub fn alive_nodes(&self) -> usize {
        self.alive_nodes
    }

    pub fn alive_edges(&self) -> usize {
        self.alive_edges
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Live degree of a live node.
    pub fn degree(&self, node: NodeId) -> usize {
        self.degree[node]
    }

    pub fn fragility(&self) -> f64 {
        centralization(self.alive_nodes, self.max_degree, self.alive_edges)
    }

    /// Deletes a live node.
    pub fn remove(&mut self, node: NodeId) {
        assert!(self.alive[node], "node {node} is already removed");
        self.alive[node] = false;
        self.degree_histogram[self.degree[node]] -= 1;
        self.alive_nodes -= 1;
        self.alive_edges -= self.degree[node];
        for &v in self.graph.neighbors(node) {
            if self.alive[v] {
                self.degree_histogram[self.degree[v]] -= 1;
                self.degree[v] -= 1;
                self.degree_histogram[self.degree[v]] += 1;
            }
        }
        while self.max_degree > 0 && self.degree_histogram[self.max_degree] == 0 {
            self.max_degree -= 1;
        }
    }

    /// Puts a deleted node back.
    pub fn restore(&mut self, node: NodeId) {
        assert!(!self.alive[node], "node {node} is not removed");
        let mut d = 0;
        for &v in self.graph.neighbors(node) {
            if self.alive[v] {
                d += 1;
                self.degree_histogram[self.degree[v]] -= 1;
                self.degree[v] += 1;
                self.degree_histogram[self.degree[v]] += 1;
                self.max_degree = self.max_degree.max(self.degree[v]);
            }
        }
        self.alive[node] = true;
        self.degree[node] = d;
        self.degree_histogram[d] += 1;
        self.max_degree = self.max_degree.max(d);
        self.alive_nodes += 1;
        self.alive_edges += d;
    }

    /// Fragility after deleting `node`, leaving the state unchanged.
    pub fn fragility_without(&mut self, node: NodeId) -> f64 {
        self.remove(node);
        let value = self.fragility();
        self.restore(node);
        value
    }

    pub fn gain(&mut self, node: NodeId) -> f64 {
        let before = self.fragility();
        self.fragility_without(node) - before
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    // hubs 0-1, 0 -> {2,3,4}, 1 -> {5,6,7}
    fn double_star() -> Graph {
        Graph::from_edges(8, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7)]).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    fn removal(g: &Graph, ids: &[NodeId]) -> RemovalSet {
        RemovalSet::new(g, ids.iter().copied()).unwrap()
    }

    #[test]
    fn centrality_examples() {
        assert_eq!(network_degree_centrality(&star(4)), 1.0);
        assert_eq!(network_degree_centrality(&complete(4)), 0.0);
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!((network_degree_centrality(&path) - 1.0 / 3.0).abs() < 1e-12);
        let pair = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(network_degree_centrality(&pair), 0.0);
        assert!((network_degree_centrality(&double_star()) - 18.0 / 42.0).abs() < 1e-12);
    }

    #[test]
    fn fragile_examples() {
        let g = star(4);
        assert_eq!(fragile(&g, &RemovalSet::empty()), 1.0);
        assert_eq!(fragile(&g, &removal(&g, &[0])), 0.0);
        assert_eq!(fragile(&g, &removal(&g, &[1])), 1.0);
        let ds = double_star();
        assert!((fragile(&ds, &removal(&ds, &[2])) - 16.0 / 30.0).abs() < 1e-12);
        assert!((fragile(&ds, &removal(&ds, &[0])) - 15.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_gain_examples() {
        let g = star(4);
        assert_eq!(marginal_gain(&g, &RemovalSet::empty(), 1).unwrap(), 0.0);
        assert_eq!(marginal_gain(&g, &RemovalSet::empty(), 0).unwrap(), -1.0);
        let ds = double_star();
        let gain = marginal_gain(&ds, &RemovalSet::empty(), 2).unwrap();
        assert!((gain - (16.0 / 30.0 - 18.0 / 42.0)).abs() < 1e-12);
    }

    #[test]
    fn marginal_gain_rejects_member_of_base() {
        let g = star(4);
        let base = removal(&g, &[1]);
        assert_eq!(
            marginal_gain(&g, &base, 1),
            Err(GraphError::CandidateInBase(1))
        );
        assert!(matches!(
            marginal_gain(&g, &base, 9),
            Err(GraphError::UnknownNode { id: 9, .. })
        ));
    }

    #[test]
    fn induced_subgraph_examples() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let sub = induced_subgraph(&path, &BTreeSet::from([0, 2])).unwrap();
        assert_eq!((sub.node_count(), sub.edge_count()), (2, 0));
        assert_eq!(sub.labels(), &["0".to_string(), "2".to_string()]);

        let all: BTreeSet<_> = path.nodes().collect();
        assert_eq!(induced_subgraph(&path, &all).unwrap(), path);

        let k5 = complete(5);
        let sub = induced_subgraph(&k5, &BTreeSet::from([1, 3, 4])).unwrap();
        assert_eq!((sub.node_count(), sub.edge_count()), (3, 3));

        assert!(induced_subgraph(&path, &BTreeSet::from([7])).is_err());
    }

    #[test]
    fn construction_rejects_self_loops_and_parallel_edges() {
        assert_eq!(
            Graph::from_edges(2, &[(1, 1)]),
            Err(GraphError::SelfLoop("1".into()))
        );
        assert!(matches!(
            Graph::from_edges(2, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(..))
        ));
        let mut b = GraphBuilder::new();
        assert!(b.add_labeled_edge("a", "b").unwrap());
        assert!(!b.add_labeled_edge("b", "a").unwrap());
        assert_eq!(b.duplicate_edges(), 1);
        assert!(b.add_labeled_edge("c", "c").is_err());
    }

    #[test]
    fn state_restore_is_exact_inverse() {
        let ds = double_star();
        let mut state = FragilityState::new(&ds);
        let before = state.fragility();
        state.remove(0);
        state.remove(5);
        assert_eq!(state.fragility(), fragile(&ds, &removal(&ds, &[0, 5])));
        state.restore(5);
        state.restore(0);
        assert_eq!(state.fragility(), before);
        assert_eq!(state.max_degree(), 4);
        assert_eq!(state.alive_edges(), 7);
    }

    #[test]
    fn node_sets_validate_ids() {
        let g = star(2);
        assert!(NoStrikeSet::new(&g, [0, 3]).is_err());
        assert!(RemovalSet::from_labels(&g, ["1", "x"]).is_err());
        let s = NoStrikeSet::from_labels(&g, ["2", "0"]).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2]);
    }
}
