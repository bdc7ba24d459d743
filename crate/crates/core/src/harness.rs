//! Removal-curve experiments, runtime benchmarks and their CSV form.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::baselines::{static_removal_schedule, BaselineError, Centrality};
use crate::graph::{fragile, network_degree_centrality, Graph, NoStrikeSet, NodeId, RemovalSet};
use crate::solvers::{greedy_fragile, greedy_fragile_timed};

pub const CSV_HEADER: &str =
    "strategy,nodes_removed,fraction_removed,fragility,percent_increase,wall_time_s";

/// Node and edge counts of the reference terror networks used as size targets
/// for synthetic stand-ins.
pub const REFERENCE_NETWORK_SIZES: [(usize, usize); 4] =
    [(57, 162), (102, 388), (105, 590), (135, 556)];

/// Node and edge count of the large e-mail network used for scaling runs.
pub const LARGE_NETWORK_SIZE: (usize, usize) = (1133, 5541);

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("the intact graph has fragility 0, so percent change is undefined")]
    ZeroBaseline,
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("unknown strategy `{0}` (expected greedy, degree, closeness or betweenness)")]
    UnknownStrategy(String),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Greedy,
    Ranked(Centrality),
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Greedy,
        Strategy::Ranked(Centrality::Degree),
        Strategy::Ranked(Centrality::Closeness),
        Strategy::Ranked(Centrality::Betweenness),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Greedy => "greedy",
            Strategy::Ranked(c) => c.name(),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| HarnessError::UnknownStrategy(s.to_owned()))
    }
}

/// One point of a removal curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub strategy: String,
    pub nodes_removed: usize,
    pub fraction_removed: f64,
    pub fragility: f64,
    pub percent_increase: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub strategies: Vec<Strategy>,
    pub max_fraction: f64,
    /// Nodes removed between consecutive points.
    pub step: usize,
    /// Seed of the synthetic graph the experiment runs on, if any.
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            strategies: Strategy::ALL.to_vec(),
            max_fraction: 0.12,
            step: 1,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.max_fraction > 0.0 && self.max_fraction <= 1.0) {
            return Err(HarnessError::InvalidConfig(format!(
                "max_fraction {} is not in (0, 1]",
                self.max_fraction
            )));
        }
        if self.step == 0 {
            return Err(HarnessError::InvalidConfig(
                "step must be at least 1".into(),
            ));
        }
        if self.strategies.is_empty() {
            return Err(HarnessError::InvalidConfig("no strategies selected".into()));
        }
        Ok(())
    }
}

/// Curve of one strategy along with the removal order its points are
/// prefixes of.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyCurve {
    pub strategy: Strategy,
    pub order: Vec<NodeId>,
    pub points: Vec<CurvePoint>,
}

impl StrategyCurve {
    /// The removal set behind `point`.
    pub fn removal_set(&self, point: &CurvePoint) -> RemovalSet {
        RemovalSet::from_trusted(self.order[..point.nodes_removed].iter().copied())
    }
}

pub fn percent_increase(baseline: f64, fragility: f64) -> f64 {
    100.0 * (fragility - baseline) / baseline
}

/// Largest budget covered by `max_fraction` of the nodes.
pub fn max_budget(node_count: usize, max_fraction: f64) -> usize {
    // the epsilon keeps e.g. 0.12 * 100 from landing on 11.999...
    ((max_fraction * node_count as f64) + 1e-9).floor() as usize
}

/// Runs every configured strategy at budgets `step, 2·step, …` up to
/// `max_fraction · n`. Greedy points are prefixes of one greedy run; ranked
/// strategies remove the top of a ranking computed once.
pub fn run_curves(
    graph: &Graph,
    no_strike: &NoStrikeSet,
    config: &ExperimentConfig,
) -> Result<Vec<StrategyCurve>, HarnessError> {
    config.validate()?;
    let baseline = network_degree_centrality(graph);
    if baseline <= 0.0 {
        return Err(HarnessError::ZeroBaseline);
    }
    let n = graph.node_count();
    let top = max_budget(n, config.max_fraction);
    let budgets: Vec<usize> = (1..)
        .map(|j| j * config.step)
        .take_while(|&b| b <= top)
        .collect();

    let mut strategies = config.strategies.clone();
    strategies.sort_by_key(|s| s.name());
    strategies.dedup();

    let mut curves = Vec::with_capacity(strategies.len());
    for strategy in strategies {
        let point = |removed: usize, fragility: f64, elapsed: Duration| CurvePoint {
            strategy: strategy.name().to_owned(),
            nodes_removed: removed,
            fraction_removed: removed as f64 / n as f64,
            fragility,
            percent_increase: percent_increase(baseline, fragility),
            wall_time: elapsed.as_secs_f64(),
        };
        let mut points = Vec::with_capacity(budgets.len());
        let order = match strategy {
            Strategy::Greedy => {
                let (solution, timings) = greedy_fragile_timed(graph, no_strike, top);
                for &b in &budgets {
                    let removed = b.min(solution.removed.len());
                    if removed == 0
                        || points
                            .last()
                            .is_some_and(|p: &CurvePoint| p.nodes_removed == removed)
                    {
                        continue;
                    }
                    points.push(point(
                        removed,
                        solution.trace[removed],
                        timings[removed - 1],
                    ));
                }
                solution.removed
            }
            Strategy::Ranked(centrality) => {
                let start = Instant::now();
                let ranking = centrality.rank(graph, no_strike);
                let elapsed = start.elapsed();
                for &b in budgets.iter().filter(|&&b| b <= ranking.order.len()) {
                    let set = static_removal_schedule(&ranking, b)?;
                    points.push(point(b, fragile(graph, &set), elapsed));
                }
                ranking.order
            }
        };
        curves.push(StrategyCurve {
            strategy,
            order,
            points,
        });
    }
    Ok(curves)
}

/// All points of `curves`, ordered by strategy name then budget.
pub fn collect_points(curves: &[StrategyCurve]) -> Vec<CurvePoint> {
    let mut points: Vec<CurvePoint> = curves
        .iter()
        .flat_map(|c| c.points.iter().cloned())
        .collect();
    sort_points(&mut points);
    points
}

fn sort_points(points: &mut [CurvePoint]) {
    points.sort_by(|a, b| {
        a.strategy
            .cmp(&b.strategy)
            .then(a.nodes_removed.cmp(&b.nodes_removed))
    });
}

fn time_once(
    strategy: Strategy,
    graph: &Graph,
    no_strike: &NoStrikeSet,
    budget: usize,
) -> Result<Duration, HarnessError> {
    let start = Instant::now();
    match strategy {
        Strategy::Greedy => {
            std::hint::black_box(greedy_fragile(graph, no_strike, budget));
        }
        Strategy::Ranked(centrality) => {
            let ranking = centrality.rank(graph, no_strike);
            std::hint::black_box(static_removal_schedule(&ranking, budget)?);
        }
    }
    Ok(start.elapsed())
}

/// Median-of-three wall time, in seconds, for each budget. One untimed run
/// precedes the measurements.
pub fn benchmark_runtime(
    graph: &Graph,
    no_strike: &NoStrikeSet,
    strategy: Strategy,
    budgets: &[usize],
) -> Result<Vec<(usize, f64)>, HarnessError> {
    let mut results = Vec::with_capacity(budgets.len());
    for &budget in budgets {
        time_once(strategy, graph, no_strike, budget)?;
        let mut samples = [Duration::ZERO; 3];
        for sample in &mut samples {
            *sample = time_once(strategy, graph, no_strike, budget)?;
        }
        samples.sort();
        results.push((budget, samples[1].as_secs_f64()));
    }
    Ok(results)
}

/// Renders points as CSV with six decimals, sorted by strategy then budget.
pub fn emit_csv(points: &[CurvePoint]) -> String {
    let mut sorted = points.to_vec();
    sort_points(&mut sorted);
    let mut out = String::with_capacity(64 * (sorted.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &sorted {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6}",
            p.strategy,
            p.nodes_removed,
            p.fraction_removed,
            p.fragility,
            p.percent_increase,
            p.wall_time
        );
    }
    out
}

pub fn write_csv(points: &[CurvePoint], path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, emit_csv(points)).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_csv(text: &str) -> Result<Vec<CurvePoint>, HarnessError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == CSV_HEADER => {}
        _ => {
            return Err(HarnessError::Csv {
                line: 1,
                message: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut points = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| HarnessError::Csv {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(err(format!("expected 6 fields, found {}", fields.len())));
        }
        let real = |i: usize| {
            fields[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| err(format!("field {}: {e}", i + 1)))
        };
        points.push(CurvePoint {
            strategy: fields[0].to_owned(),
            nodes_removed: fields[1]
                .trim()
                .parse()
                .map_err(|e| err(format!("field 2: {e}")))?,
            fraction_removed: real(2)?,
            fragility: real(3)?,
            percent_increase: real(4)?,
            wall_time: real(5)?,
        });
    }
    Ok(points)
}
