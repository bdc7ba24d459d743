//! Removal planners: the greedy heuristic, exhaustive search and the
//! threshold decision built on top of it.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{fragile, FragilityState, Graph, NoStrikeSet, NodeId, RemovalSet};

/// Default cap on the number of subsets [`ExactSolver`] may visit.
pub const DEFAULT_WORK_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("exhaustive search needs {subsets} subsets, above the work limit of {limit}")]
    WorkLimitExceeded { subsets: u128, limit: u64 },
    #[error("threshold {0} is not in [0, 1]")]
    InvalidThreshold(f64),
}

/// An ordered removal sequence together with the fragility after each prefix.
///
/// `trace[0]` is the fragility of the intact graph and `trace[j]` the
/// fragility after removing `removed[..j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalSolution {
    pub removed: Vec<NodeId>,
    pub trace: Vec<f64>,
}

impl RemovalSolution {
    pub fn final_fragility(&self) -> f64 {
        *self
            .trace
            .last()
            .expect("trace always holds the initial fragility")
    }

    pub fn initial_fragility(&self) -> f64 {
        self.trace[0]
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty()
    }

    pub fn removal_set(&self) -> RemovalSet {
        RemovalSet::from_trusted(self.removed.iter().copied())
    }

    pub fn labels<'g>(&self, graph: &'g Graph) -> Vec<&'g str> {
        self.removed.iter().map(|&i| graph.label(i)).collect()
    }
}

/// Greedy removal: each round deletes the targetable node whose removal
/// raises fragility the most, accepting zero gain and stopping once every
/// candidate would lower it or `k` nodes are gone.
///
/// Candidates are scanned in ascending id order and the incumbent is only
/// replaced by a strictly better score, so ties go to the lowest id.
pub fn greedy_fragile(graph: &Graph, no_strike: &NoStrikeSet, k: usize) -> RemovalSolution {
    greedy_fragile_timed(graph, no_strike, k).0
}

/// [`greedy_fragile`] that also reports the cumulative wall time after each
/// accepted removal.
pub fn greedy_fragile_timed(
    graph: &Graph,
    no_strike: &NoStrikeSet,
    k: usize,
) -> (RemovalSolution, Vec<Duration>) {
    let start = Instant::now();
    let mut state = FragilityState::new(graph);
    let mut removed = Vec::new();
    let mut trace = vec![state.fragility()];
    let mut timings = Vec::new();

    while removed.len() < k {
        let current = state.fragility();
        let mut best: Option<(NodeId, f64)> = None;
        for candidate in graph.nodes() {
            if !state.is_alive(candidate) || no_strike.contains(candidate) {
                continue;
            }
            let after = state.fragility_without(candidate);
            let better = match best {
                None => after >= current,
                Some((_, incumbent)) => after > incumbent,
            };
            if better {
                best = Some((candidate, after));
            }
        }
        let Some((chosen, after)) = best else { break };
        state.remove(chosen);
        removed.push(chosen);
        trace.push(after);
        timings.push(start.elapsed());
    }
    (RemovalSolution { removed, trace }, timings)
}

/// Exhaustive search over every targetable subset of size `0..=k`.
#[derive(Debug, Clone, Copy)]
pub struct ExactSolver {
    pub work_limit: u64,
}

impl Default for ExactSolver {
    fn default() -> Self {
        Self {
            work_limit: DEFAULT_WORK_LIMIT,
        }
    }
}

impl ExactSolver {
    pub fn with_work_limit(work_limit: u64) -> Self {
        Self { work_limit }
    }

    /// Returns a maximum-fragility removal set of size at most `k`.
    ///
    /// Among equal values the larger set wins, then the lexicographically
    /// smallest id sequence. `k` above the number of targetable nodes is
    /// clamped. `removed` is sorted by id and `trace` follows that order.
    pub fn solve(
        &self,
        graph: &Graph,
        no_strike: &NoStrikeSet,
        k: usize,
    ) -> Result<RemovalSolution, SolverError> {
        let candidates: Vec<NodeId> = graph.nodes().filter(|&i| !no_strike.contains(i)).collect();
        let k = k.min(candidates.len());
        let subsets = subset_count(candidates.len(), k);
        if subsets > u128::from(self.work_limit) {
            return Err(SolverError::WorkLimitExceeded {
                subsets,
                limit: self.work_limit,
            });
        }

        let mut search = Search {
            state: FragilityState::new(graph),
            candidates: &candidates,
            k,
            current: Vec::with_capacity(k),
            best: Vec::new(),
            best_value: f64::NEG_INFINITY,
        };
        search.visit(0);

        let mut state = FragilityState::new(graph);
        let mut trace = vec![state.fragility()];
        for &i in &search.best {
            state.remove(i);
            trace.push(state.fragility());
        }
        debug_assert_eq!(
            search.best_value,
            fragile(
                graph,
                &RemovalSet::from_trusted(search.best.iter().copied())
            )
        );
        Ok(RemovalSolution {
            removed: search.best,
            trace,
        })
    }
}

struct Search<'a, 'g> {
    state: FragilityState<'g>,
    candidates: &'a [NodeId],
    k: usize,
    current: Vec<NodeId>,
    best: Vec<NodeId>,
    best_value: f64,
}

impl Search<'_, '_> {
    // Pre-order over the subset tree visits sets in lexicographic order, so
    // the first set seen at a given (value, size) is the smallest one.
    fn visit(&mut self, from: usize) {
        let value = self.state.fragility();
        if value > self.best_value
            || (value == self.best_value && self.current.len() > self.best.len())
        {
            self.best_value = value;
            self.best.clone_from(&self.current);
        }
        if self.current.len() == self.k {
            return;
        }
        for pos in from..self.candidates.len() {
            let node = self.candidates[pos];
            self.state.remove(node);
            self.current.push(node);
            self.visit(pos + 1);
            self.current.pop();
            self.state.restore(node);
        }
    }
}

/// `Σ_{j=0..=k} C(n, j)`, saturating.
pub fn subset_count(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for j in 0..=k.min(n) {
        total = total.saturating_add(term);
        // C(n, j+1) = C(n, j) * (n - j) / (j + 1), exact at every step
        term = term.saturating_mul((n - j) as u128) / (j as u128 + 1);
    }
    total
}

/// Optimal removal set under the default work limit.
pub fn exact_opt(
    graph: &Graph,
    no_strike: &NoStrikeSet,
    k: usize,
) -> Result<RemovalSolution, SolverError> {
    ExactSolver::default().solve(graph, no_strike, k)
}

/// Whether some targetable set of at most `k` nodes pushes fragility strictly
/// above `x`.
pub fn fragility_decision(
    graph: &Graph,
    no_strike: &NoStrikeSet,
    k: usize,
    x: f64,
    solver: &ExactSolver,
) -> Result<bool, SolverError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(SolverError::InvalidThreshold(x));
    }
    Ok(solver.solve(graph, no_strike, k)?.final_fragility() > x)
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
    fn greedy_star_takes_a_zero_gain_leaf() {
        let sol = greedy_fragile(&star(4), &NoStrikeSet::empty(), 1);
        assert_eq!(sol.removed, vec![1]);
        assert_eq!(sol.trace, vec![1.0, 1.0]);
    }

    #[test]
    fn greedy_with_zero_budget() {
        let g = double_star();
        let sol = greedy_fragile(&g, &NoStrikeSet::empty(), 0);
        assert!(sol.is_empty());
        assert_eq!(sol.trace, vec![18.0 / 42.0]);
    }

    #[test]
    fn greedy_double_star() {
        let g = double_star();
        let sol = greedy_fragile(&g, &NoStrikeSet::empty(), 1);
        assert_eq!(sol.removed, vec![2]);
        assert!((sol.final_fragility() - 16.0 / 30.0).abs() < 1e-12);

        let leaves = NoStrikeSet::new(&g, 2..8).unwrap();
        let sol = greedy_fragile(&g, &leaves, 1);
        assert_eq!(sol.removed, vec![0]);
        assert!((sol.final_fragility() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn greedy_stops_when_every_move_hurts() {
        // only the center is targetable and deleting it drops fragility to 0
        let g = star(4);
        let s = NoStrikeSet::new(&g, 1..5).unwrap();
        let sol = greedy_fragile(&g, &s, 3);
        assert!(sol.is_empty());
        assert_eq!(sol.final_fragility(), 1.0);
    }

    #[test]
    fn exact_examples() {
        let sol = exact_opt(&star(4), &NoStrikeSet::empty(), 1).unwrap();
        assert_eq!(sol.removed, vec![1]);
        assert_eq!(sol.final_fragility(), 1.0);

        let triangle = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let sol = exact_opt(&triangle, &NoStrikeSet::empty(), 1).unwrap();
        assert_eq!(sol.final_fragility(), 0.0);
        assert!(sol.removed.len() <= 1);

        let g = double_star();
        let exact = exact_opt(&g, &NoStrikeSet::empty(), 2).unwrap();
        let greedy = greedy_fragile(&g, &NoStrikeSet::empty(), 2);
        assert!(exact.final_fragility() >= greedy.final_fragility());
        assert_eq!(exact.final_fragility(), fragile(&g, &exact.removal_set()));
    }

    #[test]
    fn exact_clamps_budget_and_guards_work() {
        let g = star(4);
        let sol = exact_opt(&g, &NoStrikeSet::empty(), 50).unwrap();
        assert!(sol.removed.len() <= 5);
        let err = ExactSolver::with_work_limit(10)
            .solve(&g, &NoStrikeSet::empty(), 2)
            .unwrap_err();
        assert_eq!(
            err,
            SolverError::WorkLimitExceeded {
                subsets: 16,
                limit: 10
            }
        );
    }

    #[test]
    fn subset_counts() {
        assert_eq!(subset_count(5, 0), 1);
        assert_eq!(subset_count(5, 2), 1 + 5 + 10);
        assert_eq!(subset_count(4, 9), 16);
        assert_eq!(subset_count(40, 40), 1u128 << 40);
    }

    #[test]
    fn decision_examples() {
        let solver = ExactSolver::default();
        let none = NoStrikeSet::empty();
        assert!(fragility_decision(&star(4), &none, 1, 0.99, &solver).unwrap());
        assert!(!fragility_decision(&star(4), &none, 1, 1.0, &solver).unwrap());
        assert!(fragility_decision(&double_star(), &none, 1, 0.5, &solver).unwrap());
        assert!(fragility_decision(&star(4), &none, 1, 1.5, &solver).is_err());
    }
}
