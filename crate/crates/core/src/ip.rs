//! Mixed binary program for the removal problem and its LP-file export.
//!
//! Variables, for `n` nodes and `m` undirected edges `(u, v)` with `u < v`:
//!
//! | name        | count | meaning                                          |
//! |-------------|-------|--------------------------------------------------|
//! | `X_u`       | n     | node `u` is removed                              |
//! | `Z_u`       | n     | node `u` is the selected maximum-degree survivor |
//! | `Y_u_v`     | m     | edge survives                                    |
//! | `Qf_u_v`    | m     | edge counts toward the degree of `u`             |
//! | `Qb_u_v`    | m     | edge counts toward the degree of `v`             |
//!
//! Rows, in emission order (`2 + 2n + 5m` in total):
//!
//! ```text
//! budget          Σ X ≤ k                 (= i once linearized)
//! select_one      Σ Z = 1
//! alive_cap       2 Y + X_u + X_v ≤ 2     edge survives only if both ends do
//! alive_floor     Y + X_u + X_v ≥ 1       edge survives if both ends do
//! orient          Qf + Qb - Y ≤ 0         only surviving edges count
//! fwd             Qf - Z_u ≤ 0            Qf counts toward the selected u
//! bwd             Qb - Z_v ≤ 0            Qb counts toward the selected v
//! Z domain        Z_u ∈ {0, 1}            one per node
//! X domain        X_u = 0 on the no-strike set, X_u ∈ {0, 1} elsewhere
//! ```
//!
//! With these rows `Σ Y` is the surviving edge count and `Σ Q` is the
//! surviving degree of one node, so the objective
//! `((n - r) ΣQ - 2 ΣY) / ((n - r - 1)(n - r - 2))` with `r = Σ X` is at most,
//! and at the optimum exactly, the fragility of the removal set.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::graph::{Graph, NoStrikeSet, NodeId, RemovalSet};

const TOLERANCE: f64 = 1e-9;
const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IpError {
    #[error("linearization index {index} is outside 1..={budget}")]
    IndexOutOfRange { index: usize, budget: usize },
    #[error("the model still has the fractional objective; linearize it for a fixed removal count before emitting")]
    FractionalObjective,
    #[error("variable name `{0}` is produced by more than one variable after sanitizing labels")]
    NameCollision(String),
    #[error("assignment has {got} values but the model has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("assignment violates row `{0}`")]
    Infeasible(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Remove,
    Select,
    EdgeAlive,
    ForwardDegree,
    BackwardDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowFamily {
    Budget,
    SingleSelect,
    AliveCap,
    AliveFloor,
    OrientationCap,
    ForwardSelect,
    BackwardSelect,
    SelectDomain,
    NoStrike,
    RemoveDomain,
    /// Integrality of `Y` and `Q`; checked but not counted as a row.
    EdgeDomain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub family: RowFamily,
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearRow {
    fn lhs(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|&(var, coef)| coef * values[var])
            .sum()
    }

    fn holds(&self, values: &[f64]) -> bool {
        let lhs = self.lhs(values);
        match self.sense {
            Sense::Le => lhs <= self.rhs + TOLERANCE,
            Sense::Ge => lhs >= self.rhs - TOLERANCE,
            Sense::Eq => (lhs - self.rhs).abs() <= TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Binary,
    UnitInterval,
    Zero,
}

impl Domain {
    fn contains(self, value: f64) -> bool {
        match self {
            Domain::Binary => value.abs() <= TOLERANCE || (value - 1.0).abs() <= TOLERANCE,
            Domain::UnitInterval => (-TOLERANCE..=1.0 + TOLERANCE).contains(&value),
            Domain::Zero => value.abs() <= TOLERANCE,
        }
    }
}

/// A per-node domain constraint on `X` or `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainRow {
    pub family: RowFamily,
    pub var: usize,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// Removal count taken from `Σ X`; not expressible in an LP file.
    Fractional,
    /// Removal count fixed to `removals`, denominators folded into the
    /// coefficients.
    Linear {
        removals: usize,
        terms: Vec<(usize, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpModel {
    labels: Vec<String>,
    edges: Vec<(NodeId, NodeId)>,
    budget: usize,
    rows: Vec<LinearRow>,
    domains: Vec<DomainRow>,
    objective: Objective,
}

/// Builds the program for removing at most `k` nodes outside `no_strike`.
pub fn build_fragility_ip(graph: &Graph, no_strike: &NoStrikeSet, k: usize) -> IpModel {
    IpModel::new(graph, no_strike, k)
}

/// Fixes the removal count to `index`, making the objective linear.
pub fn linearize(model: &IpModel, index: usize) -> Result<IpModel, IpError> {
    model.linearize(index)
}

/// Relaxes `X` and `Z` to `[0, 1]`.
pub fn relax_bounds(model: &IpModel) -> IpModel {
    model.relax()
}

pub fn check_feasible(
    model: &IpModel,
    assignment: &IpAssignment,
) -> Result<FeasibilityReport, IpError> {
    model.check(assignment)
}

pub fn evaluate_objective(model: &IpModel, assignment: &IpAssignment) -> Result<f64, IpError> {
    model.evaluate(assignment)
}

pub fn emit_lp(model: &IpModel) -> Result<String, IpError> {
    model.to_lp()
}

impl IpModel {
    pub fn new(graph: &Graph, no_strike: &NoStrikeSet, k: usize) -> Self {
        let labels = graph.labels().to_vec();
        let edges: Vec<_> = graph.edges().collect();
        let mut model = IpModel {
            labels,
            edges,
            budget: k,
            rows: Vec::new(),
            domains: Vec::new(),
            objective: Objective::Fractional,
        };
        let n = model.node_count();
        let label = |i: NodeId| graph.label(i);

        model.rows.push(LinearRow {
            family: RowFamily::Budget,
            name: "budget".into(),
            terms: (0..n).map(|i| (model.x(i), 1.0)).collect(),
            sense: Sense::Le,
            rhs: k as f64,
        });
        model.rows.push(LinearRow {
            family: RowFamily::SingleSelect,
            name: "select_one".into(),
            terms: (0..n).map(|i| (model.z(i), 1.0)).collect(),
            sense: Sense::Eq,
            rhs: 1.0,
        });

        let mut edge_rows = Vec::with_capacity(5 * model.edges.len());
        let families = [
            RowFamily::AliveCap,
            RowFamily::AliveFloor,
            RowFamily::OrientationCap,
            RowFamily::ForwardSelect,
            RowFamily::BackwardSelect,
        ];
        for family in families {
            for (e, &(u, v)) in model.edges.iter().enumerate() {
                let (y, qf, qb) = (model.y(e), model.qf(e), model.qb(e));
                let (xu, xv) = (model.x(u), model.x(v));
                let (prefix, terms, sense, rhs) = match family {
                    RowFamily::AliveCap => (
                        "alive_cap",
                        vec![(y, 2.0), (xu, 1.0), (xv, 1.0)],
                        Sense::Le,
                        2.0,
                    ),
                    RowFamily::AliveFloor => (
                        "alive_floor",
                        vec![(y, 1.0), (xu, 1.0), (xv, 1.0)],
                        Sense::Ge,
                        1.0,
                    ),
                    RowFamily::OrientationCap => (
                        "orient",
                        vec![(qf, 1.0), (qb, 1.0), (y, -1.0)],
                        Sense::Le,
                        0.0,
                    ),
                    RowFamily::ForwardSelect => {
                        ("fwd", vec![(qf, 1.0), (model.z(u), -1.0)], Sense::Le, 0.0)
                    }
                    RowFamily::BackwardSelect => {
                        ("bwd", vec![(qb, 1.0), (model.z(v), -1.0)], Sense::Le, 0.0)
                    }
                    _ => unreachable!(),
                };
                edge_rows.push(LinearRow {
                    family,
                    name: format!("{prefix}_{}_{}", label(u), label(v)),
                    terms,
                    sense,
                    rhs,
                });
            }
        }
        model.rows.extend(edge_rows);

        for i in 0..n {
            model.domains.push(DomainRow {
                family: RowFamily::SelectDomain,
                var: model.z(i),
                domain: Domain::Binary,
            });
        }
        for i in no_strike.iter() {
            model.domains.push(DomainRow {
                family: RowFamily::NoStrike,
                var: model.x(i),
                domain: Domain::Zero,
            });
        }
        for i in (0..n).filter(|&i| !no_strike.contains(i)) {
            model.domains.push(DomainRow {
                family: RowFamily::RemoveDomain,
                var: model.x(i),
                domain: Domain::Binary,
            });
        }
        model
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn variable_count(&self) -> usize {
        2 * self.node_count() + 3 * self.edge_count()
    }

    /// Linear rows plus per-node domain rows.
    pub fn constraint_count(&self) -> usize {
        self.rows.len() + self.domains.len()
    }

    pub fn rows(&self) -> &[LinearRow] {
        &self.rows
    }

    pub fn domains(&self) -> &[DomainRow] {
        &self.domains
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn x(&self, node: NodeId) -> usize {
        node
    }

    pub fn z(&self, node: NodeId) -> usize {
        self.node_count() + node
    }

    pub fn y(&self, edge: usize) -> usize {
        2 * self.node_count() + edge
    }

    pub fn qf(&self, edge: usize) -> usize {
        2 * self.node_count() + self.edge_count() + edge
    }

    pub fn qb(&self, edge: usize) -> usize {
        2 * self.node_count() + 2 * self.edge_count() + edge
    }

    /// Index of the edge `(u, v)`, in either orientation.
    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn var_kind(&self, var: usize) -> VarKind {
        let (n, m) = (self.node_count(), self.edge_count());
        match var {
            v if v < n => VarKind::Remove,
            v if v < 2 * n => VarKind::Select,
            v if v < 2 * n + m => VarKind::EdgeAlive,
            v if v < 2 * n + 2 * m => VarKind::ForwardDegree,
            _ => VarKind::BackwardDegree,
        }
    }

    /// Variable name before label sanitizing.
    pub fn var_name(&self, var: usize) -> String {
        let (n, m) = (self.node_count(), self.edge_count());
        let edge_name = |prefix: &str, e: usize| {
            let (u, v) = self.edges[e];
            format!("{prefix}_{}_{}", self.labels[u], self.labels[v])
        };
        match self.var_kind(var) {
            VarKind::Remove => format!("X_{}", self.labels[var]),
            VarKind::Select => format!("Z_{}", self.labels[var - n]),
            VarKind::EdgeAlive => edge_name("Y", var - 2 * n),
            VarKind::ForwardDegree => edge_name("Qf", var - 2 * n - m),
            VarKind::BackwardDegree => edge_name("Qb", var - 2 * n - 2 * m),
        }
    }

    pub fn linearize(&self, index: usize) -> Result<IpModel, IpError> {
        if index == 0 || index > self.budget {
            return Err(IpError::IndexOutOfRange {
                index,
                budget: self.budget,
            });
        }
        let mut model = self.clone();
        let budget = &mut model.rows[0];
        debug_assert_eq!(budget.family, RowFamily::Budget);
        // exactly `index` removals: the folded constants are only right then
        budget.sense = Sense::Eq;
        budget.rhs = index as f64;

        let remaining = self.node_count().saturating_sub(index);
        let (q_coef, y_coef) = if remaining >= 3 {
            let denom = ((remaining - 1) * (remaining - 2)) as f64;
            (remaining as f64 / denom, -2.0 / denom)
        } else {
            (0.0, 0.0)
        };
        let m = self.edge_count();
        let mut terms = Vec::with_capacity(3 * m);
        terms.extend((0..m).map(|e| (self.y(e), y_coef)));
        terms.extend((0..m).map(|e| (self.qf(e), q_coef)));
        terms.extend((0..m).map(|e| (self.qb(e), q_coef)));
        model.objective = Objective::Linear {
            removals: index,
            terms,
        };
        Ok(model)
    }

    pub fn relax(&self) -> IpModel {
        let mut model = self.clone();
        for row in &mut model.domains {
            if row.domain == Domain::Binary {
                row.domain = Domain::UnitInterval;
            }
        }
        model
    }

    pub fn is_relaxed(&self) -> bool {
        self.domains
            .iter()
            .any(|d| d.domain == Domain::UnitInterval)
    }

    /// Checks every row and domain; all violations are reported.
    pub fn check(&self, assignment: &IpAssignment) -> Result<FeasibilityReport, IpError> {
        let values = &assignment.values;
        if values.len() != self.variable_count() {
            return Err(IpError::DimensionMismatch {
                expected: self.variable_count(),
                got: values.len(),
            });
        }
        let mut violations = Vec::new();
        for row in &self.rows {
            if !row.holds(values) {
                violations.push(Violation {
                    family: row.family,
                    row: row.name.clone(),
                });
            }
        }
        for d in &self.domains {
            if !d.domain.contains(values[d.var]) {
                violations.push(Violation {
                    family: d.family,
                    row: format!("domain {}", self.var_name(d.var)),
                });
            }
        }
        let first_edge_var = 2 * self.node_count();
        for (var, &value) in values.iter().enumerate().skip(first_edge_var) {
            if !Domain::Binary.contains(value) {
                violations.push(Violation {
                    family: RowFamily::EdgeDomain,
                    row: format!("domain {}", self.var_name(var)),
                });
            }
        }
        Ok(FeasibilityReport { violations })
    }

    /// Objective value of a feasible assignment.
    pub fn evaluate(&self, assignment: &IpAssignment) -> Result<f64, IpError> {
        let report = self.check(assignment)?;
        if let Some(first) = report.violations.first() {
            return Err(IpError::Infeasible(first.row.clone()));
        }
        let values = &assignment.values;
        match &self.objective {
            Objective::Linear { terms, .. } => Ok(terms.iter().map(|&(v, c)| c * values[v]).sum()),
            Objective::Fractional => {
                let n = self.node_count();
                let m = self.edge_count();
                let removed: f64 = values[..n].iter().sum();
                let alive_edges: f64 = (0..m).map(|e| values[self.y(e)]).sum();
                let degree: f64 = (0..m)
                    .map(|e| values[self.qf(e)] + values[self.qb(e)])
                    .sum();
                let remaining = n as f64 - removed;
                if remaining < 3.0 - TOLERANCE {
                    return Ok(0.0);
                }
                Ok((remaining * degree - 2.0 * alive_edges)
                    / ((remaining - 1.0) * (remaining - 2.0)))
            }
        }
    }

    /// Renders the model in CPLEX LP format. Fails on the fractional objective.
    pub fn to_lp(&self) -> Result<String, IpError> {
        let Objective::Linear { removals, terms } = &self.objective else {
            return Err(IpError::FractionalObjective);
        };
        let names = self.sanitized_names()?;
        let sanitized_row = |row: &LinearRow| sanitize(&row.name);

        let mut out = String::new();
        // fmt::Write into a String cannot fail
        let _ = writeln!(
            out,
            "\\ removal model: {} nodes, {} edges, exactly {} removals",
            self.node_count(),
            self.edge_count(),
            removals
        );
        out.push_str("Maximize\n obj:");
        if terms.is_empty() {
            if let Some(first) = names.first() {
                let _ = write!(out, " 0 {first}");
            }
        } else {
            write_terms(&mut out, terms, &names);
        }
        out.push('\n');

        out.push_str("Subject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", sanitized_row(row));
            write_terms(&mut out, &row.terms, &names);
            let _ = writeln!(out, " {} {}", row.sense, fmt_number(row.rhs));
        }

        out.push_str("Bounds\n");
        for d in &self.domains {
            match d.domain {
                Domain::Zero => {
                    let _ = writeln!(out, " {} = 0", names[d.var]);
                }
                Domain::Binary | Domain::UnitInterval => {
                    let _ = writeln!(out, " 0 <= {} <= 1", names[d.var]);
                }
            }
        }

        out.push_str("Binary\n");
        for d in self.domains.iter().filter(|d| d.domain == Domain::Binary) {
            let _ = writeln!(out, " {}", names[d.var]);
        }
        for name in &names[2 * self.node_count()..] {
            let _ = writeln!(out, " {name}");
        }
        out.push_str("End\n");
        Ok(out)
    }

    fn sanitized_names(&self) -> Result<Vec<String>, IpError> {
        let mut seen = HashSet::with_capacity(self.variable_count());
        let mut names = Vec::with_capacity(self.variable_count());
        for var in 0..self.variable_count() {
            let name = sanitize(&self.var_name(var));
            if !seen.insert(name.clone()) {
                return Err(IpError::NameCollision(name));
            }
            names.push(name);
        }
        Ok(names)
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn fmt_number(value: f64) -> String {
    if value == 0.0 {
        // avoid "-0"
        "0".into()
    } else {
        format!("{value}")
    }
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], names: &[String]) {
    for (pos, &(var, coef)) in terms.iter().enumerate() {
        if pos > 0 && pos % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if coef < 0.0 { '-' } else { '+' };
        let magnitude = coef.abs();
        if pos == 0 && sign == '+' {
            out.push(' ');
        } else {
            let _ = write!(out, " {sign} ");
        }
        if magnitude != 1.0 {
            let _ = write!(out, "{} ", fmt_number(magnitude));
        }
        out.push_str(&names[var]);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub family: RowFamily,
    pub row: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, family: RowFamily) -> bool {
        self.violations.iter().any(|v| v.family == family)
    }
}

/// One value per model variable, in model order.
#[derive(Debug, Clone, PartialEq)]
pub struct IpAssignment {
    pub values: Vec<f64>,
}

impl IpAssignment {
    pub fn zeros(model: &IpModel) -> Self {
        Self {
            values: vec![0.0; model.variable_count()],
        }
    }

    /// Encodes `removed`: `X` on the removed nodes, `Y` on surviving edges,
    /// `Z` on the lowest-id maximum-degree survivor and `Q` on that node's
    /// surviving edges.
    pub fn canonical(model: &IpModel, graph: &Graph, removed: &RemovalSet) -> Self {
        let mut a = Self::zeros(model);
        let n = graph.node_count();
        let alive: Vec<bool> = (0..n).map(|i| !removed.contains(i)).collect();
        for i in removed.iter() {
            a.values[model.x(i)] = 1.0;
        }
        let live_degree = |i: NodeId| graph.neighbors(i).iter().filter(|&&j| alive[j]).count();
        let selected = (0..n)
            .filter(|&i| alive[i])
            .max_by_key(|&i| (live_degree(i), std::cmp::Reverse(i)))
            .unwrap_or(0);
        if n > 0 {
            a.values[model.z(selected)] = 1.0;
        }
        for (e, &(u, v)) in model.edges().iter().enumerate() {
            if alive[u] && alive[v] {
                a.values[model.y(e)] = 1.0;
                if u == selected {
                    a.values[model.qf(e)] = 1.0;
                } else if v == selected {
                    a.values[model.qb(e)] = 1.0;
                }
            }
        }
        a
    }
}
