//! Seeded synthetic graphs used as stand-ins for unavailable datasets.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder};

/// Relative slack allowed between the requested and generated edge count.
pub const EDGE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("cannot place {edges} edges on {nodes} nodes as a {kind} graph")]
    InfeasibleDensity {
        kind: SyntheticKind,
        nodes: usize,
        edges: usize,
    },
    #[error("unknown graph kind `{0}` (expected scale-free, random or star-of-stars)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyntheticKind {
    /// Preferential attachment grown from a small clique.
    ScaleFree,
    /// Uniform graph with exactly the requested edge count.
    Random,
    /// `⌊√n⌋` hubs, hub 0 joined to the others, leaves spread round-robin.
    /// Always a tree, so the edge target is ignored.
    StarOfStars,
}

impl SyntheticKind {
    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::ScaleFree => "scale-free",
            SyntheticKind::Random => "random",
            SyntheticKind::StarOfStars => "star-of-stars",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            SyntheticKind::ScaleFree,
            SyntheticKind::Random,
            SyntheticKind::StarOfStars,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| SynthError::UnknownKind(s.to_owned()))
    }
}

/// Generates a graph with `n` nodes labelled `0..n`, deterministic in `seed`.
pub fn generate_synthetic(
    kind: SyntheticKind,
    n: usize,
    m_target: usize,
    seed: u64,
) -> Result<Graph, SynthError> {
    let infeasible = || SynthError::InfeasibleDensity {
        kind,
        nodes: n,
        edges: m_target,
    };
    let max_edges = n * n.saturating_sub(1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = GraphBuilder::with_nodes(n);

    match kind {
        SyntheticKind::StarOfStars => {
            let hubs = (n as f64).sqrt().floor() as usize;
            for hub in 1..hubs {
                builder.add_edge(0, hub).expect("distinct hubs");
            }
            for leaf in hubs..n {
                builder
                    .add_edge((leaf - hubs) % hubs.max(1), leaf)
                    .expect("leaf differs from hub");
            }
            return Ok(builder.build());
        }
        SyntheticKind::Random => {
            if m_target > max_edges {
                return Err(infeasible());
            }
            for pair in index::sample(&mut rng, max_edges, m_target) {
                let (u, v) = unrank_pair(pair);
                builder.add_edge(u, v).expect("distinct pair");
            }
        }
        SyntheticKind::ScaleFree => {
            if n < 2 || m_target > max_edges || m_target + 1 < n {
                return Err(infeasible());
            }
            let per_node = m_target as f64 / n as f64;
            let core = ((per_node.ceil() as usize) + 1).clamp(2, n);
            let core_edges = core * (core - 1) / 2;
            let mut degree = vec![0usize; n];
            for u in 0..core {
                for v in u + 1..core {
                    builder.add_edge(u, v).expect("clique edge");
                    degree[u] += 1;
                    degree[v] += 1;
                }
            }
            let grown = n - core;
            let remaining = m_target.saturating_sub(core_edges);
            let mut placed = 0usize;
            for (step, node) in (core..n).enumerate() {
                // spread the remaining edges evenly over the arriving nodes
                let due = (remaining as f64 * (step + 1) as f64 / grown as f64).round() as usize;
                let want = due.saturating_sub(placed).clamp(1, node);
                let targets = index::sample_weighted(&mut rng, node, |i| degree[i] as f64, want)
                    .expect("positive weights for every existing node");
                for target in targets {
                    builder
                        .add_edge(node, target)
                        .expect("new node differs from targets");
                    degree[target] += 1;
                }
                degree[node] = want;
                placed += want;
            }
        }
    }

    let graph = builder.build();
    let slack = (m_target as f64 * EDGE_TOLERANCE).floor() as usize;
    if graph.edge_count().abs_diff(m_target) > slack {
        return Err(infeasible());
    }
    Ok(graph)
}

// pair index -> (u, v) with u < v, enumerating (0,1), (0,2), (1,2), (0,3), ...
fn unrank_pair(index: usize) -> (usize, usize) {
    let mut v = ((((8 * index + 1) as f64).sqrt() + 1.0) / 2.0).floor() as usize;
    while v * (v - 1) / 2 > index {
        v -= 1;
    }
    while (v + 1) * v / 2 <= index {
        v += 1;
    }
    (index - v * (v - 1) / 2, v)
}
