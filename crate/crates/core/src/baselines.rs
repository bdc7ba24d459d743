//! Conventional targeting baselines: rank nodes once by degree, closeness or
//! betweenness on the intact graph and remove the top of that list.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, NoStrikeSet, NodeId, RemovalSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("cannot take {requested} nodes from a ranking of {available}")]
    TooMany { requested: usize, available: usize },
    #[error("unknown centrality `{0}` (expected degree, closeness or betweenness)")]
    UnknownCentrality(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Centrality {
    Degree,
    Closeness,
    Betweenness,
}

impl Centrality {
    pub const ALL: [Centrality; 3] = [
        Centrality::Degree,
        Centrality::Closeness,
        Centrality::Betweenness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Centrality::Degree => "degree",
            Centrality::Closeness => "closeness",
            Centrality::Betweenness => "betweenness",
        }
    }

    pub fn scores(self, graph: &Graph) -> Vec<f64> {
        match self {
            Centrality::Degree => degree_scores(graph),
            Centrality::Closeness => closeness_scores(graph),
            Centrality::Betweenness => betweenness_scores(graph),
        }
    }

    pub fn rank(self, graph: &Graph, no_strike: &NoStrikeSet) -> NodeRanking {
        NodeRanking::from_scores(self.scores(graph), no_strike)
    }
}

impl fmt::Display for Centrality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Centrality {
    type Err = BaselineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Centrality::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| BaselineError::UnknownCentrality(s.to_owned()))
    }
}

/// Per-node scores and the targetable nodes sorted by descending score,
/// ties broken by ascending id.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRanking {
    pub scores: Vec<f64>,
    pub order: Vec<NodeId>,
}

impl NodeRanking {
    pub fn from_scores(scores: Vec<f64>, no_strike: &NoStrikeSet) -> Self {
        let mut order: Vec<NodeId> = (0..scores.len())
            .filter(|&i| !no_strike.contains(i))
            .collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        Self { scores, order }
    }

    pub fn top(&self, m: usize) -> Result<&[NodeId], BaselineError> {
        self.order.get(..m).ok_or(BaselineError::TooMany {
            requested: m,
            available: self.order.len(),
        })
    }
}

pub fn degree_scores(graph: &Graph) -> Vec<f64> {
    graph.nodes().map(|i| graph.degree(i) as f64).collect()
}

/// Closeness with the component-size correction:
/// `(r / (n - 1)) · (r / Σ dist)` where `r` counts the nodes reachable from
/// `i` (excluding `i`). Isolated nodes score 0. On a connected graph this is
/// the inverse of the mean distance.
pub fn closeness_scores(graph: &Graph) -> Vec<f64> {
    let n = graph.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    graph
        .nodes()
        .map(|source| {
            dist.fill(usize::MAX);
            dist[source] = 0;
            queue.push_back(source);
            let (mut reached, mut total) = (0usize, 0usize);
            while let Some(u) = queue.pop_front() {
                for &v in graph.neighbors(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        reached += 1;
                        total += dist[v];
                        queue.push_back(v);
                    }
                }
            }
            if total == 0 {
                0.0
            } else {
                let r = reached as f64;
                (r / (n - 1) as f64) * (r / total as f64)
            }
        })
        .collect()
}

/// Shortest-path betweenness (Brandes), unnormalized, each unordered pair
/// counted once.
pub fn betweenness_scores(graph: &Graph) -> Vec<f64> {
    let n = graph.node_count();
    let mut betweenness = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in graph.nodes() {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in graph.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        // predecessors of w are exactly its neighbors one level closer to s
        for &w in order.iter().rev() {
            for &v in graph.neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                betweenness[w] += delta[w];
            }
        }
    }
    for b in &mut betweenness {
        *b /= 2.0;
    }
    betweenness
}

pub fn degree_ranking(graph: &Graph, no_strike: &NoStrikeSet) -> NodeRanking {
    Centrality::Degree.rank(graph, no_strike)
}

pub fn closeness_ranking(graph: &Graph, no_strike: &NoStrikeSet) -> NodeRanking {
    Centrality::Closeness.rank(graph, no_strike)
}

pub fn betweenness_ranking(graph: &Graph, no_strike: &NoStrikeSet) -> NodeRanking {
    Centrality::Betweenness.rank(graph, no_strike)
}

/// The first `m` nodes of a ranking computed once on the intact graph.
pub fn static_removal_schedule(
    ranking: &NodeRanking,
    m: usize,
) -> Result<RemovalSet, BaselineError> {
    Ok(RemovalSet::from_trusted(ranking.top(m)?.iter().copied()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    fn double_star() -> Graph {
        Graph::from_edges(8, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7)]).unwrap()
    }

    #[test]
    fn degree_rankings() {
        let none = NoStrikeSet::empty();
        assert_eq!(degree_ranking(&star(4), &none).order[0], 0);
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(degree_ranking(&k4, &none).order, vec![0, 1, 2, 3]);
        let ds = double_star();
        let s = NoStrikeSet::new(&ds, [0]).unwrap();
        let ranking = degree_ranking(&ds, &s);
        assert_eq!(ranking.order[0], 1);
        assert!(!ranking.order.contains(&0));
    }

    #[test]
    fn closeness_values() {
        let scores = closeness_scores(&star(4));
        assert_eq!(scores[0], 1.0);
        assert!((scores[1] - 4.0 / 7.0).abs() < 1e-12);

        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(closeness_ranking(&path, &NoStrikeSet::empty()).order[0], 1);

        let pairs = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let scores = closeness_scores(&pairs);
        for s in &scores {
            assert!((s - 1.0 / 3.0).abs() < 1e-12);
        }

        let isolated = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(closeness_scores(&isolated)[2], 0.0);
    }

    #[test]
    fn betweenness_values() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(betweenness_scores(&path), vec![0.0, 1.0, 0.0]);
        assert_eq!(betweenness_scores(&star(4)), vec![6.0, 0.0, 0.0, 0.0, 0.0]);
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let scores = betweenness_scores(&c5);
        for s in &scores {
            assert!((s - scores[0]).abs() < 1e-12);
        }
        // node 0 is the unique midpoint of the pair (1, 4)
        assert!((scores[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schedules() {
        let none = NoStrikeSet::empty();
        let ranking = degree_ranking(&star(4), &none);
        assert_eq!(
            static_removal_schedule(&ranking, 1)
                .unwrap()
                .iter()
                .collect::<Vec<_>>(),
            vec![0]
        );
        assert!(static_removal_schedule(&ranking, 0).unwrap().is_empty());
        assert!(static_removal_schedule(&ranking, 6).is_err());

        let ranking = betweenness_ranking(&double_star(), &none);
        let top2: Vec<_> = static_removal_schedule(&ranking, 2)
            .unwrap()
            .iter()
            .collect();
        assert_eq!(top2, vec![0, 1]);
    }

    #[test]
    fn centrality_names_round_trip() {
        for c in Centrality::ALL {
            assert_eq!(c.name().parse::<Centrality>().unwrap(), c);
        }
        assert!("eigen".parse::<Centrality>().is_err());
    }
}
