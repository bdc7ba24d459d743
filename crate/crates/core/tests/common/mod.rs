#![allow(dead_code)]

use std::collections::BTreeSet;

use fragility::{Graph, NoStrikeSet, NodeId, RemovalSet};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each pair becomes an edge with probability `density`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn random_no_strike(rng: &mut ChaCha8Rng, g: &Graph, max_size: usize) -> NoStrikeSet {
    let size = rng.gen_range(0..=max_size.min(g.node_count()));
    let picked = index::sample(rng, g.node_count(), size).into_vec();
    NoStrikeSet::new(g, picked).unwrap()
}

pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::from_edges(leaves + 1, &edges).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Hub 0 with leaves 2, 3, 4 and hub 1 with leaves 5, 6, 7; hubs adjacent.
pub fn double_star() -> Graph {
    Graph::from_edges(8, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7)]).unwrap()
}

/// Centralization from its definition: the summed shortfall of every node's
/// degree against the maximum, over the star's shortfall `(n-1)(n-2)`.
/// Works on the survivors of `removed` directly, without the library.
pub fn definitional_fragility(g: &Graph, removed: &BTreeSet<NodeId>) -> f64 {
    let alive: Vec<NodeId> = g.nodes().filter(|v| !removed.contains(v)).collect();
    let n = alive.len();
    if n < 3 {
        return 0.0;
    }
    let degrees: Vec<usize> = alive
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter(|u| !removed.contains(u))
                .count()
        })
        .collect();
    let max = *degrees.iter().max().unwrap();
    let shortfall: usize = degrees.iter().map(|d| max - d).sum();
    shortfall as f64 / ((n - 1) * (n - 2)) as f64
}

/// Every subset of `candidates` with at most `k` members.
pub fn subsets_up_to(candidates: &[NodeId], k: usize) -> Vec<Vec<NodeId>> {
    let mut out = vec![Vec::new()];
    for &c in candidates {
        let extended: Vec<Vec<NodeId>> = out
            .iter()
            .filter(|s| s.len() < k)
            .map(|s| {
                let mut t = s.clone();
                t.push(c);
                t
            })
            .collect();
        out.extend(extended);
    }
    out
}

/// Best fragility over all targetable subsets of size at most `k`, computed
/// from the definition.
pub fn brute_force_optimum(g: &Graph, s: &NoStrikeSet, k: usize) -> f64 {
    let candidates: Vec<NodeId> = g.nodes().filter(|&v| !s.contains(v)).collect();
    subsets_up_to(&candidates, k)
        .into_iter()
        .map(|set| definitional_fragility(g, &set.into_iter().collect()))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn removal(g: &Graph, ids: &[NodeId]) -> RemovalSet {
    RemovalSet::new(g, ids.iter().copied()).unwrap()
}

use fragility::ip::{Domain, IpModel, LinearRow, Sense};

fn row_holds(row: &LinearRow, values: &[f64]) -> bool {
    let lhs: f64 = row.terms.iter().map(|&(v, c)| c * values[v]).sum();
    match row.sense {
        Sense::Le => lhs <= row.rhs + 1e-9,
        Sense::Ge => lhs >= row.rhs - 1e-9,
        Sense::Eq => (lhs - row.rhs).abs() <= 1e-9,
    }
}

/// Calls `visit` on every 0/1 assignment satisfying all rows and domains of
/// `model`. Rows are checked as soon as their last variable is fixed.
pub fn for_each_binary_solution(model: &IpModel, mut visit: impl FnMut(&[f64])) {
    let vars = model.variable_count();
    let mut choices: Vec<Vec<f64>> = vec![vec![0.0, 1.0]; vars];
    for d in model.domains() {
        if d.domain == Domain::Zero {
            choices[d.var] = vec![0.0];
        }
    }
    let mut due: Vec<Vec<&LinearRow>> = vec![Vec::new(); vars];
    for row in model.rows() {
        match row.terms.iter().map(|t| t.0).max() {
            Some(last) => due[last].push(row),
            None => assert!(row_holds(row, &[]), "constant row {} fails", row.name),
        }
    }
    fn go(
        at: usize,
        values: &mut Vec<f64>,
        choices: &[Vec<f64>],
        due: &[Vec<&LinearRow>],
        visit: &mut dyn FnMut(&[f64]),
    ) {
        if at == values.len() {
            visit(values);
            return;
        }
        for &c in &choices[at] {
            values[at] = c;
            if due[at].iter().all(|r| row_holds(r, values)) {
                go(at + 1, values, choices, due, visit);
            }
        }
        values[at] = 0.0;
    }
    go(0, &mut vec![0.0; vars], &choices, &due, &mut visit);
}

/// The fractional objective recomputed from raw values: removals `r = Σ X`,
/// surviving edges `Σ Y`, selected degree `Σ Q`.
pub fn fractional_objective(model: &IpModel, values: &[f64]) -> f64 {
    let (n, m) = (model.node_count(), model.edge_count());
    let r: f64 = values[..n].iter().sum();
    let y: f64 = values[2 * n..2 * n + m].iter().sum();
    let q: f64 = values[2 * n + m..2 * n + 3 * m].iter().sum();
    let left = n as f64 - r;
    if left < 3.0 {
        return 0.0;
    }
    (left * q - 2.0 * y) / ((left - 1.0) * (left - 2.0))
}

// Every simple path from s to t, found by DFS.
fn all_paths(g: &Graph, s: NodeId, t: NodeId) -> Vec<Vec<NodeId>> {
    fn walk(g: &Graph, at: NodeId, t: NodeId, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        if at == t {
            out.push(path.clone());
            return;
        }
        for &next in g.neighbors(at) {
            if !path.contains(&next) {
                path.push(next);
                walk(g, next, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, s, t, &mut vec![s], &mut out);
    out
}

/// For every unordered pair, the share of its shortest paths passing through
/// each interior node.
pub fn enumerated_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut scores = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let paths = all_paths(g, s, t);
            let Some(shortest) = paths.iter().map(Vec::len).min() else {
                continue;
            };
            let geodesics: Vec<_> = paths.into_iter().filter(|p| p.len() == shortest).collect();
            for (v, score) in scores.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                let through = geodesics.iter().filter(|p| p.contains(&v)).count();
                *score += through as f64 / geodesics.len() as f64;
            }
        }
    }
    scores
}
