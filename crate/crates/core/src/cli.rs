//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for bad input (flags, files, labels), 2 when
//! the request is well formed but cannot be met (work limit, budget larger
//! than the targetable set, undefined percent change).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::baselines::{static_removal_schedule, BaselineError, Centrality};
use crate::graph::{fragile, network_degree_centrality, Graph, NoStrikeSet};
use crate::harness::{
    benchmark_runtime, collect_points, emit_csv, run_curves, ExperimentConfig, HarnessError,
    Strategy,
};
use crate::io::{
    emit_edge_list, manifest_path_for, read_edge_list, read_no_strike, write_text, RunManifest,
};
use crate::ip::IpModel;
use crate::solvers::{
    greedy_fragile, ExactSolver, RemovalSolution, SolverError, DEFAULT_WORK_LIMIT,
};
use crate::synth::{generate_synthetic, SynthError, SyntheticKind};

#[derive(Debug, Parser)]
#[command(
    name = "fragility",
    version,
    about = "Plan node removals that leave a network as star-like as possible"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Edge list to load.
    #[arg(long, global = true, value_name = "PATH")]
    graph: Option<PathBuf>,
    /// Labels that may not be removed, one per line.
    #[arg(long, global = true, value_name = "PATH")]
    no_strike: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write a JSON run manifest here.
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the degree centralization of the graph.
    Centrality,
    /// Greedy removal of up to k nodes.
    Greedy {
        #[arg(long)]
        k: usize,
    },
    /// Optimal removal of up to k nodes by exhaustive search.
    Exact {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_WORK_LIMIT)]
        work_limit: u64,
    },
    /// Whether removing at most k nodes can push centralization above x.
    Decision {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = DEFAULT_WORK_LIMIT)]
        work_limit: u64,
    },
    /// Write the integer program as CPLEX LP, linearized for i removals
    /// (i = k unless given).
    EmitIp {
        #[arg(long)]
        k: usize,
        #[arg(long, value_name = "I", conflicts_with = "all_i")]
        linearize_i: Option<usize>,
        /// One file per i in 1..=k; --out names a directory.
        #[arg(long, requires = "out")]
        all_i: bool,
        /// Relax the binary domains of X and Z to [0, 1].
        #[arg(long)]
        relax: bool,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Remove the top m nodes of a centrality ranking.
    Baseline {
        #[arg(long)]
        strategy: Centrality,
        #[arg(long)]
        m: usize,
        /// Rank every node, including no-strike ones.
        #[arg(long)]
        ignore_no_strike: bool,
    },
    /// Removal curves for several strategies, as CSV.
    Curve {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "greedy,degree,closeness,betweenness"
        )]
        strategies: Vec<Strategy>,
        #[arg(long, default_value_t = 0.12)]
        max_fraction: f64,
        #[arg(long, default_value_t = 1)]
        step: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Median wall time of a strategy at several budgets.
    Bench {
        #[arg(long, default_value = "greedy")]
        strategy: Strategy,
        #[arg(long, value_delimiter = ',', required = true)]
        budgets: Vec<usize>,
    },
    /// Generate a seeded synthetic graph as an edge list.
    Synth {
        #[arg(long)]
        kind: SyntheticKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self {
            code: 1,
            message: message.to_string(),
        }
    }

    fn infeasible(message: impl ToString) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::WorkLimitExceeded { .. } => Failure::infeasible(e),
            SolverError::InvalidThreshold(_) => Failure::input(e),
        }
    }
}

impl From<BaselineError> for Failure {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::TooMany { .. } => Failure::infeasible(e),
            BaselineError::UnknownCentrality(_) => Failure::input(e),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::ZeroBaseline => Failure::infeasible(e),
            HarnessError::Baseline(inner) => inner.into(),
            other => Failure::input(other),
        }
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::InfeasibleDensity { .. } => Failure::infeasible(e),
            SynthError::UnknownKind(_) => Failure::input(e),
        }
    }
}

impl From<crate::io::IoError> for Failure {
    fn from(e: crate::io::IoError) -> Self {
        Failure::input(e)
    }
}

impl From<crate::ip::IpError> for Failure {
    fn from(e: crate::ip::IpError) -> Self {
        Failure::input(e)
    }
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    1
                }
            };
        }
    };
    let mut session = Session {
        global: &cli.global,
        manifest: RunManifest::new(command_name(&cli.command)),
        warnings: Vec::new(),
    };
    session.manifest.graph = cli.global.graph.clone();
    session.manifest.no_strike = cli.global.no_strike.clone();
    let result = session.execute(&cli.command);
    for warning in &session.warnings {
        let _ = writeln!(err, "warning: {warning}");
    }
    match result.and_then(|text| session.finish(text)) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Centrality => "centrality",
        Command::Greedy { .. } => "greedy",
        Command::Exact { .. } => "exact",
        Command::Decision { .. } => "decision",
        Command::EmitIp { .. } => "emit-ip",
        Command::Baseline { .. } => "baseline",
        Command::Curve { .. } => "curve",
        Command::Bench { .. } => "bench",
        Command::Synth { .. } => "synth",
    }
}

struct Session<'a> {
    global: &'a GlobalArgs,
    manifest: RunManifest,
    warnings: Vec<String>,
}

impl Session<'_> {
    fn load(&mut self) -> Result<(Graph, NoStrikeSet), Failure> {
        let path = self
            .global
            .graph
            .as_deref()
            .ok_or_else(|| Failure::input("this command needs --graph PATH"))?;
        let doc = read_edge_list(path)?;
        if doc.duplicate_edges > 0 {
            self.warnings.push(format!(
                "{}: collapsed {} duplicate edges",
                path.display(),
                doc.duplicate_edges
            ));
        }
        let no_strike = match &self.global.no_strike {
            Some(p) => read_no_strike(p, &doc.graph)?,
            None => NoStrikeSet::empty(),
        };
        Ok((doc.graph, no_strike))
    }

    fn write_output(&mut self, path: &Path, text: &str) -> Result<(), Failure> {
        write_text(path, text)?;
        self.manifest.outputs.push(path.to_owned());
        Ok(())
    }

    // Writes manifests and, for JSON output, embeds the manifest.
    fn finish(&mut self, text: String) -> Result<String, Failure> {
        let mut targets: Vec<PathBuf> = self
            .manifest
            .outputs
            .iter()
            .map(|p| manifest_path_for(p))
            .collect();
        targets.extend(self.global.manifest.clone());
        for target in targets {
            self.manifest.write(&target)?;
        }
        Ok(text)
    }

    fn render(&self, text: String, json: Value, csv: String) -> String {
        match self.global.format {
            Format::Text => text,
            Format::Json => {
                let mut json = json;
                if let Value::Object(map) = &mut json {
                    map.insert(
                        "manifest".into(),
                        serde_json::to_value(&self.manifest).expect("manifest serializes"),
                    );
                }
                serde_json::to_string_pretty(&json).expect("json serializes") + "\n"
            }
            Format::Csv => csv,
        }
    }

    fn solution(&self, graph: &Graph, sol: &RemovalSolution) -> String {
        let labels = sol.labels(graph);
        let text = format!(
            "removed ({}): {}\nfragility: {:.6} -> {:.6}\n",
            labels.len(),
            labels.join(" "),
            sol.initial_fragility(),
            sol.final_fragility()
        );
        let json = json!({
            "removed": labels,
            "initial_fragility": sol.initial_fragility(),
            "fragility": sol.final_fragility(),
            "trace": sol.trace,
        });
        let mut csv = String::from("step,label,fragility\n");
        let _ = writeln!(csv, "0,,{:.6}", sol.trace[0]);
        for (j, label) in labels.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{:.6}", j + 1, label, sol.trace[j + 1]);
        }
        self.render(text, json, csv)
    }

    fn execute(&mut self, command: &Command) -> Result<String, Failure> {
        match command {
            Command::Centrality => {
                let (g, _) = self.load()?;
                let c = network_degree_centrality(&g);
                Ok(self.render(
                    format!("{c:.6}\n"),
                    json!({"nodes": g.node_count(), "edges": g.edge_count(), "centralization": c}),
                    format!(
                        "nodes,edges,centralization\n{},{},{c:.6}\n",
                        g.node_count(),
                        g.edge_count()
                    ),
                ))
            }
            Command::Greedy { k } => {
                self.manifest.param("k", k);
                let (g, s) = self.load()?;
                let sol = greedy_fragile(&g, &s, *k);
                Ok(self.solution(&g, &sol))
            }
            Command::Exact { k, work_limit } => {
                self.manifest.param("k", k).param("work_limit", work_limit);
                let (g, s) = self.load()?;
                let sol = ExactSolver::with_work_limit(*work_limit).solve(&g, &s, *k)?;
                Ok(self.solution(&g, &sol))
            }
            Command::Decision { k, x, work_limit } => {
                self.manifest
                    .param("k", k)
                    .param("x", x)
                    .param("work_limit", work_limit);
                let (g, s) = self.load()?;
                if !(0.0..=1.0).contains(x) {
                    return Err(SolverError::InvalidThreshold(*x).into());
                }
                let sol = ExactSolver::with_work_limit(*work_limit).solve(&g, &s, *k)?;
                let best = sol.final_fragility();
                let answer = best > *x;
                let witness = if answer { sol.labels(&g) } else { Vec::new() };
                Ok(self.render(
                    format!(
                        "{}\nbest fragility: {best:.6}\n{}",
                        if answer { "yes" } else { "no" },
                        if answer { format!("witness: {}\n", witness.join(" ")) } else { String::new() }
                    ),
                    json!({"answer": answer, "threshold": x, "best_fragility": best, "witness": witness}),
                    format!("answer,threshold,best_fragility\n{answer},{x},{best:.6}\n"),
                ))
            }
            Command::EmitIp {
                k,
                linearize_i,
                all_i,
                relax,
                out,
            } => {
                self.manifest.param("k", k).param("relax", relax);
                let (g, s) = self.load()?;
                let base = IpModel::new(&g, &s, *k);
                let indices: Vec<usize> = if *all_i {
                    (1..=*k).collect()
                } else {
                    vec![linearize_i.unwrap_or(*k)]
                };
                if !*all_i {
                    self.manifest.param("linearize_i", indices[0]);
                }
                let mut lp_files = Vec::new();
                for &i in &indices {
                    let mut model = base.linearize(i)?;
                    if *relax {
                        model = model.relax();
                    }
                    lp_files.push((i, model.to_lp()?));
                }
                let summary = format!(
                    "{} variables, {} constraints\n",
                    base.variable_count(),
                    base.constraint_count()
                );
                match out {
                    None => Ok(lp_files.into_iter().map(|(_, lp)| lp).collect()),
                    Some(path) if *all_i => {
                        std::fs::create_dir_all(path)
                            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                        for (i, lp) in &lp_files {
                            self.write_output(&path.join(format!("removal_i{i}.lp")), lp)?;
                        }
                        Ok(summary)
                    }
                    Some(path) => {
                        self.write_output(path, &lp_files[0].1)?;
                        Ok(summary)
                    }
                }
            }
            Command::Baseline {
                strategy,
                m,
                ignore_no_strike,
            } => {
                self.manifest
                    .param("strategy", strategy)
                    .param("m", m)
                    .param("ignore_no_strike", ignore_no_strike);
                let (g, s) = self.load()?;
                let s = if *ignore_no_strike {
                    NoStrikeSet::empty()
                } else {
                    s
                };
                let ranking = strategy.rank(&g, &s);
                let set = static_removal_schedule(&ranking, *m)?;
                let labels: Vec<&str> = ranking.order[..*m].iter().map(|&i| g.label(i)).collect();
                let before = network_degree_centrality(&g);
                let after = fragile(&g, &set);
                let mut csv = String::from("rank,label,score\n");
                for (r, &i) in ranking.order[..*m].iter().enumerate() {
                    let _ = writeln!(csv, "{},{},{:.6}", r + 1, g.label(i), ranking.scores[i]);
                }
                Ok(self.render(
                    format!(
                        "removed ({}): {}\nfragility: {before:.6} -> {after:.6}\n",
                        labels.len(),
                        labels.join(" ")
                    ),
                    json!({
                        "strategy": strategy.name(),
                        "removed": labels,
                        "initial_fragility": before,
                        "fragility": after,
                    }),
                    csv,
                ))
            }
            Command::Curve {
                strategies,
                max_fraction,
                step,
                out,
            } => {
                let names: Vec<&str> = strategies.iter().map(|s| s.name()).collect();
                self.manifest
                    .param("strategies", names.join(","))
                    .param("max_fraction", max_fraction)
                    .param("step", step);
                let (g, s) = self.load()?;
                let config = ExperimentConfig {
                    strategies: strategies.clone(),
                    max_fraction: *max_fraction,
                    step: *step,
                    seed: 0,
                };
                let curves = run_curves(&g, &s, &config)?;
                let points = collect_points(&curves);
                let csv = emit_csv(&points);
                match out {
                    Some(path) => {
                        self.write_output(path, &csv)?;
                        Ok(format!(
                            "{} points written to {}\n",
                            points.len(),
                            path.display()
                        ))
                    }
                    None if self.global.format == Format::Json => {
                        let rows: Vec<Value> = points
                            .iter()
                            .map(|p| {
                                json!({
                                    "strategy": p.strategy,
                                    "nodes_removed": p.nodes_removed,
                                    "fraction_removed": p.fraction_removed,
                                    "fragility": p.fragility,
                                    "percent_increase": p.percent_increase,
                                    "wall_time_s": p.wall_time,
                                })
                            })
                            .collect();
                        Ok(self.render(String::new(), json!({ "points": rows }), String::new()))
                    }
                    None => Ok(csv),
                }
            }
            Command::Bench { strategy, budgets } => {
                let list: Vec<String> = budgets.iter().map(usize::to_string).collect();
                self.manifest
                    .param("strategy", strategy)
                    .param("budgets", list.join(","));
                let (g, s) = self.load()?;
                let times = benchmark_runtime(&g, &s, *strategy, budgets)?;
                let mut text = String::new();
                let mut csv = String::from("strategy,budget,seconds\n");
                for (b, t) in &times {
                    let _ = writeln!(text, "{strategy} k={b}: {t:.6} s");
                    let _ = writeln!(csv, "{strategy},{b},{t:.6}");
                }
                let rows: Vec<Value> = times
                    .iter()
                    .map(|(b, t)| json!({"budget": b, "seconds": t}))
                    .collect();
                Ok(self.render(
                    text,
                    json!({"strategy": strategy.name(), "timings": rows}),
                    csv,
                ))
            }
            Command::Synth {
                kind,
                n,
                m,
                seed,
                out,
            } => {
                self.manifest
                    .param("kind", kind)
                    .param("n", n)
                    .param("m", m);
                self.manifest.seed = Some(*seed);
                let g = generate_synthetic(*kind, *n, *m, *seed)?;
                let text = emit_edge_list(&g)?;
                match out {
                    Some(path) => {
                        self.write_output(path, &text)?;
                        Ok(format!(
                            "{} nodes, {} edges written to {}\n",
                            g.node_count(),
                            g.edge_count(),
                            path.display()
                        ))
                    }
                    None => Ok(text),
                }
            }
        }
    }
}
