//! Command-line front end behind the `dagw` binary.
//!
//! Exit codes: 0 on success, 1 on budget exhaustion or a failed check, 2 on
//! a configuration error.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::algo::{build, ConfigError};
use crate::checker::dot::to_dot;
use crate::checker::explore::{budget_from_env, explore, ExtendedRelation, FreshRelation, TransitionRelation};
use crate::checker::fixture::parse_fixture;
use crate::checker::props::{check_acyclic, check_bounds};
use crate::checker::verify::{verify, verify_system, InitSpec, VerifyConfig};
use crate::executor::{run, AsyncModel, NodePolicy, RunConfig, RunVerdict, SchedulerKind};
use crate::graph::{fig1, fig3, fig4, generate, Family, Graph, NodeId};
use crate::model::{rank, state_from_locals, AlgoKind, Algorithm, GlobalState, LocalState};

#[derive(Debug, Parser)]
#[command(name = "dagw", version, about = "Guarded-command simulator and explicit-state checker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one execution and write a JSON Lines trace.
    Run(RunArgs),
    /// Explore every execution and check the structural properties.
    Verify(VerifyArgs),
    /// Measure moves and rounds over a family of graphs as CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AsyncFlag {
    Fresh,
    Amr,
    Aa,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyFlag {
    Path,
    Star,
    Clique,
    Gnp,
}

#[derive(Debug, Args)]
pub struct AlgoArgs {
    #[arg(long, value_parser = parse_algo)]
    pub algo: AlgoKind,
    /// Destination node (1-based) for shortest path.
    #[arg(long)]
    pub dest: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long = "async", value_enum, default_value = "fresh")]
    pub model: AsyncFlag,
    #[arg(long, default_value_t = 1)]
    pub channel_bound: usize,
    #[arg(long, default_value_t = 3)]
    pub window: usize,
}

impl ModelArgs {
    fn model(&self) -> Result<AsyncModel, CliError> {
        Ok(match self.model {
            AsyncFlag::Fresh => AsyncModel::Fresh,
            AsyncFlag::Amr if self.channel_bound == 0 => return Err(config("--channel-bound must be at least 1")),
            AsyncFlag::Amr => AsyncModel::Amr { channel_bound: self.channel_bound },
            AsyncFlag::Aa if self.window == 0 => return Err(config("--window must be at least 1")),
            AsyncFlag::Aa => AsyncModel::Aa { window: self.window },
        })
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Alias (fig1, fig3, fig4, pathN, starN, cliqueN, gnp:N:P:SEED) or file.
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value = "central")]
    pub scheduler: SchedulerKind,
    #[arg(long, default_value = "random")]
    pub policy: NodePolicy,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub max_moves: u64,
    /// `default` or a JSON file holding one global state.
    #[arg(long, default_value = "default")]
    pub init: String,
    /// Trace output; standard output when omitted.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, required_unless_present = "system")]
    pub algo: Option<String>,
    #[arg(long)]
    pub dest: Option<usize>,
    #[arg(long, required_unless_present = "system")]
    pub graph: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// `default`, `all`, or a JSON file holding a list of global states.
    #[arg(long, default_value = "default")]
    pub init: String,
    /// Hand-built transition system to check instead of exploring.
    #[arg(long, conflicts_with_all = ["algo", "graph"])]
    pub system: Option<PathBuf>,
    /// Skip the probes whose expected outcome is a failure.
    #[arg(long)]
    pub no_probes: bool,
    /// Graphviz export of the explored system.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Verdict output; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Explicit graphs; combined with the family expansion.
    #[arg(long)]
    pub graph: Vec<String>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyFlag>,
    /// Node counts, `A..B` (inclusive) or a single number.
    #[arg(long, value_parser = parse_range)]
    pub n: Option<RangeInclusive<u64>>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Seeds for `gnp`, `A..B` (inclusive) or a single number.
    #[arg(long, value_parser = parse_range, default_value = "1")]
    pub seeds: RangeInclusive<u64>,
    /// Scheduler of the runs that measure rounds.
    #[arg(long, default_value = "synchronous")]
    pub scheduler: SchedulerKind,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Seeded runs per graph; the worst round count is reported.
    #[arg(long, default_value_t = 5)]
    pub runs: u64,
    /// CSV output; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Algo(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_algo(s: &str) -> Result<AlgoKind, String> {
    s.parse()
}

fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("invalid number `{t}`"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range `{s}`"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|v| v..=v),
    }
}

/// Resolves a graph alias, generator spec or file path.
pub fn resolve_graph(spec: &str) -> Result<Graph, CliError> {
    let sized = |prefix: &str| spec.strip_prefix(prefix).and_then(|r| r.parse::<usize>().ok());
    let graph = match spec {
        "fig1" => Ok(fig1()),
        "fig3" => Ok(fig3()),
        "fig4" => Ok(fig4()),
        _ if sized("path").is_some() => generate(Family::Path, sized("path").unwrap_or(0), None),
        _ if sized("star").is_some() => generate(Family::Star, sized("star").unwrap_or(0), None),
        _ if sized("clique").is_some() => generate(Family::Clique, sized("clique").unwrap_or(0), None),
        _ if spec.starts_with("gnp:") => {
            let parts: Vec<&str> = spec.split(':').collect();
            let bad = || config(format!("expected gnp:N:P:SEED, got `{spec}`"));
            if parts.len() != 4 {
                return Err(bad());
            }
            let n = parts[1].parse().map_err(|_| bad())?;
            let p = parts[2].parse().map_err(|_| bad())?;
            let seed = parts[3].parse().map_err(|_| bad())?;
            generate(Family::Gnp { p }, n, Some(seed))
        }
        _ => {
            let text = read(Path::new(spec))?;
            Graph::parse(&text).map(|g| g.with_name(spec))
        }
    };
    graph.map_err(|e| config(format!("graph `{spec}`: {e}")))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn dest_node(dest: Option<usize>) -> Result<Option<NodeId>, CliError> {
    match dest {
        Some(0) => Err(config("--dest is 1-based")),
        d => Ok(d.map(|d| NodeId(d - 1))),
    }
}

fn load_states(algo: &dyn Algorithm, path: &Path) -> Result<Vec<GlobalState>, CliError> {
    let text = read(path)?;
    let bad = |e: &dyn std::fmt::Display| config(format!("{}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(&e))?;
    // A single state is a list of locals; a list of states is a list of lists.
    let nested = value.as_array().and_then(|a| a.first()).is_some_and(|f| f.is_array());
    let lists: Vec<Vec<LocalState>> = if nested {
        serde_json::from_value(value).map_err(|e| bad(&e))?
    } else {
        vec![serde_json::from_value(value).map_err(|e| bad(&e))?]
    };
    lists.into_iter().map(|l| state_from_locals(algo, l).map_err(|e| bad(&e))).collect()
}

/// Parses `args` and runs the command, returning the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[derive(Serialize)]
struct TraceHeader<'a> {
    kind: &'static str,
    schema: u32,
    algo: AlgoKind,
    graph: &'a str,
    #[serde(flatten)]
    config: &'a RunConfig,
    init: GlobalState,
}

pub fn cmd_run(a: &RunArgs) -> Result<i32, CliError> {
    let graph = resolve_graph(&a.graph)?;
    let algo = build(a.algo.algo, graph, dest_node(a.algo.dest)?)?;
    let init = match a.init.as_str() {
        "default" => algo.default_init(),
        "all" => return Err(config("`--init all` is only available for verify")),
        path => {
            let mut states = load_states(algo.as_ref(), Path::new(path))?;
            if states.len() != 1 {
                return Err(config("run takes exactly one initial state"));
            }
            states.remove(0)
        }
    };
    let cfg = RunConfig {
        scheduler: a.scheduler,
        policy: a.policy,
        model: a.model.model()?,
        seed: a.seed,
        max_moves: a.max_moves,
        ..RunConfig::default()
    };
    let header = TraceHeader {
        kind: "header",
        schema: 1,
        algo: algo.kind(),
        graph: algo.graph().name(),
        config: &cfg,
        init: init.clone(),
    };
    let out = run(algo.as_ref(), cfg.clone(), init);
    let mut buf = Vec::new();
    let line = |buf: &mut Vec<u8>, v: &dyn erased::Json| {
        v.write(buf);
        buf.push(b'\n');
    };
    line(&mut buf, &header);
    for e in out.trace.events() {
        line(&mut buf, e);
    }
    let summary = json!({
        "kind": "summary",
        "verdict": out.verdict,
        "moves": out.trace.moves(),
        "rounds": out.trace.rounds(),
        "steps": out.steps,
        "final_state": out.final_state,
        "final_rank": rank(algo.as_ref(), &out.final_state),
        "optimal": algo.optimal(&out.final_state),
    });
    line(&mut buf, &summary);
    write_out(a.trace.as_deref(), &buf)?;
    Ok(if out.verdict == RunVerdict::Converged { 0 } else { 1 })
}

mod erased {
    /// Object-safe JSON serialization for mixed trace lines.
    pub trait Json {
        fn write(&self, buf: &mut Vec<u8>);
    }

    impl<T: serde::Serialize> Json for T {
        fn write(&self, buf: &mut Vec<u8>) {
            serde_json::to_writer(buf, self).expect("trace values serialize");
        }
    }
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    if let Some(path) = &a.system {
        let fixture = parse_fixture(&read(path)?).map_err(|e| config(format!("{}: {e}", path.display())))?;
        let report = verify_system(&fixture.system, fixture.optimal.as_deref(), &path.display().to_string());
        if let Some(dot) = &a.dot {
            write_out(Some(dot), to_dot(&fixture.system, &report.graph, None).as_bytes())?;
        }
        write_out(a.out.as_deref(), &pretty(&report))?;
        return Ok(if report.ok { 0 } else { 1 });
    }
    let kind = parse_algo(a.algo.as_deref().unwrap_or_default()).map_err(config)?;
    let graph = resolve_graph(a.graph.as_deref().unwrap_or_default())?;
    let algo = build(kind, graph, dest_node(a.dest)?)?;
    let init = match a.init.as_str() {
        "default" => InitSpec::Default,
        "all" => InitSpec::All,
        path => InitSpec::States(load_states(algo.as_ref(), Path::new(path))?),
    };
    let cfg = VerifyConfig { model: a.model.model()?, init, budget: budget_from_env(), probes: !a.no_probes };
    let verified = verify(algo.as_ref(), &cfg);
    if let (Some(dot), Some(ts), Some(ann)) = (&a.dot, &verified.system, &verified.annotations) {
        write_out(Some(dot), to_dot(ts, algo.graph().name(), Some(&ann.rank)).as_bytes())?;
    }
    write_out(a.out.as_deref(), &pretty(&verified.report))?;
    Ok(if verified.report.ok { 0 } else { 1 })
}

fn pretty<T: Serialize>(v: &T) -> Vec<u8> {
    let mut buf = serde_json::to_vec_pretty(v).expect("reports serialize");
    buf.push(b'\n');
    buf
}

/// One CSV row of `bench`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub graph: String,
    pub algo: AlgoKind,
    pub scheduler: SchedulerKind,
    pub model: AsyncModel,
    /// Longest explored path from the default init, in moves.
    pub moves: Option<u64>,
    /// Worst round count over the seeded runs.
    pub rounds: Option<u64>,
    pub bound: String,
    pub pass: bool,
}

pub const BENCH_HEADER: &str = "graph,algo,scheduler,model,moves,rounds,bound,pass";

impl BenchRow {
    pub fn csv(&self) -> String {
        let opt = |v: Option<u64>| v.map_or_else(|| "NA".to_string(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{},{}",
            self.graph,
            self.algo,
            self.scheduler,
            self.model,
            opt(self.moves),
            opt(self.rounds),
            self.bound,
            if self.pass { "pass" } else { "fail" }
        )
    }
}

/// Measures one graph: exhaustive longest path and seeded round counts.
pub fn bench_row(
    algo: &dyn Algorithm,
    scheduler: SchedulerKind,
    model: AsyncModel,
    runs: u64,
    budget: usize,
) -> BenchRow {
    let fresh = FreshRelation::new(algo);
    let ext = ExtendedRelation::new(algo, model);
    let relation: &dyn TransitionRelation = if model == AsyncModel::Fresh { &fresh } else { &ext };
    let bounds = explore(relation, [algo.default_init()], budget)
        .ok()
        .map(|ts| check_bounds(&ts, &check_acyclic(&ts), algo, true));
    let moves = bounds.as_ref().and_then(|b| b.longest_path_moves);
    let (bound, limit) = match bounds.as_ref().and_then(|b| b.algo_bound.clone()) {
        Some((name, v)) => (name, Some(u128::from(v))),
        None => ("generic".to_string(), bounds.as_ref().map(|b| b.generic_bound)),
    };
    let mut rounds: Option<u64> = Some(0);
    for seed in 0..runs.max(1) {
        let cfg = RunConfig { scheduler, policy: NodePolicy::Random, model, seed, ..RunConfig::default() };
        let out = run(algo, cfg, algo.default_init());
        rounds = match out.verdict {
            RunVerdict::Converged => rounds.map(|r| r.max(out.trace.rounds())),
            _ => None,
        };
        if scheduler == SchedulerKind::Synchronous && model == AsyncModel::Fresh {
            break;
        }
    }
    let pass = matches!((moves, limit), (Some(m), Some(l)) if u128::from(m) <= l) && rounds.is_some();
    BenchRow {
        graph: algo.graph().name().to_string(),
        algo: algo.kind(),
        scheduler,
        model,
        moves,
        rounds,
        bound: match limit {
            Some(l) => format!("{bound}={l}"),
            None => bound,
        },
        pass,
    }
}

pub fn cmd_bench(a: &BenchArgs) -> Result<i32, CliError> {
    let mut graphs = Vec::new();
    for spec in &a.graph {
        graphs.push(resolve_graph(spec)?);
    }
    if let Some(family) = a.family {
        let ns = a.n.clone().ok_or_else(|| config("--family needs --n"))?;
        for n in ns {
            let n = n as usize;
            let g = match family {
                FamilyFlag::Path => vec![generate(Family::Path, n, None)],
                FamilyFlag::Star => vec![generate(Family::Star, n, None)],
                FamilyFlag::Clique => vec![generate(Family::Clique, n, None)],
                FamilyFlag::Gnp => a.seeds.clone().map(|s| generate(Family::Gnp { p: a.p }, n, Some(s))).collect(),
            };
            for g in g {
                graphs.push(g.map_err(|e| config(e.to_string()))?);
            }
        }
    }
    if graphs.is_empty() {
        return Err(config("bench needs --graph or --family with --n"));
    }
    let model = a.model.model()?;
    let dest = dest_node(a.algo.dest)?;
    let budget = budget_from_env();
    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    let mut all = true;
    for g in graphs {
        let algo = build(a.algo.algo, g, dest)?;
        let row = bench_row(algo.as_ref(), a.scheduler, model, a.runs, budget);
        all &= row.pass;
        csv.push_str(&row.csv());
        csv.push('\n');
    }
    write_out(a.out.as_deref(), csv.as_bytes())?;
    Ok(if all { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_aliases() {
        assert_eq!(resolve_graph("star4").unwrap().m(), 3);
        assert_eq!(resolve_graph("clique4").unwrap().m(), 6);
        assert_eq!(resolve_graph("path5").unwrap().n(), 5);
        assert_eq!(resolve_graph("gnp:5:0.5:3").unwrap().name(), "gnp:5:0.5:3");
        assert!(matches!(resolve_graph("gnp:5:x:3"), Err(CliError::Config(_))));
        assert!(matches!(resolve_graph("/nonexistent/graph.txt"), Err(CliError::Io { .. })));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..6").unwrap(), 2..=6);
        assert_eq!(parse_range("2..=6").unwrap(), 2..=6);
        assert_eq!(parse_range("4").unwrap(), 4..=4);
        assert!(parse_range("6..2").is_err());
    }

    #[test]
    fn bench_rows_on_paths() {
        for n in 2..=6 {
            let algo = build(AlgoKind::Mm, generate(Family::Path, n, None).unwrap(), None).unwrap();
            let row = bench_row(algo.as_ref(), SchedulerKind::Synchronous, AsyncModel::Fresh, 1, 1 << 20);
            assert!(row.pass, "{}", row.csv());
            assert!(row.moves.unwrap() <= 2 * n as u64);
        }
        let algo = build(AlgoKind::Dc, Graph::new(3).unwrap(), None).unwrap();
        let row = bench_row(algo.as_ref(), SchedulerKind::Central, AsyncModel::Fresh, 2, 1 << 20);
        assert_eq!(row.moves, Some(0));
    }
}
