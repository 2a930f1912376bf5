//! End-to-end verification of one configuration, and the probes whose
//! expected outcome is a failure.

use serde::Serialize;

use crate::algo::{MaximalMatching, ShortestPath};
use crate::checker::explore::{explore, ExploreError, ExtendedRelation, FreshRelation, TransitionRelation, TransitionSystem};
use crate::checker::props::{
    annotate, check_acyclic, check_bounds, check_dag_inducing, check_distance_descent, check_induced, check_partial_order,
    check_rank_descent, check_sinks_optimal, induce_order, Annotations, BoundsReport, OptimalReference,
};
use crate::checker::verdict::{replay, Counterexample, Expectation, PropertyVerdict};
use crate::executor::{run, AsyncModel, NodePolicy, RunConfig, RunVerdict, SchedulerKind};
use crate::model::{domain_product, AlgoKind, Algorithm, GlobalState};

/// Largest domain product used as the reference set of optimal states.
pub const REFERENCE_PRODUCT_LIMIT: u128 = 1 << 20;

#[derive(Clone, Debug)]
pub enum InitSpec {
    Default,
    /// Every state of the per-node domain product.
    All,
    States(Vec<GlobalState>),
}

impl InitSpec {
    fn label(&self) -> String {
        match self {
            InitSpec::Default => "default".into(),
            InitSpec::All => "all".into(),
            InitSpec::States(s) => format!("file ({} states)", s.len()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub model: AsyncModel,
    pub init: InitSpec,
    pub budget: usize,
    /// Run the expected-failure probes that apply to the algorithm.
    pub probes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub algo: Option<AlgoKind>,
    pub graph: String,
    pub model: AsyncModel,
    pub init: String,
    pub budget: usize,
    pub budget_exceeded: bool,
    pub initial_states: usize,
    pub states: usize,
    pub edges: usize,
    pub sinks: usize,
    pub acyclic: bool,
    pub all_sinks_optimal: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sink_states: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsReport>,
    pub properties: Vec<PropertyVerdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub aa_probes: Vec<AaProbe>,
    pub ok: bool,
}

impl VerifyReport {
    fn finish(mut self) -> Self {
        let probe_ok = self.aa_probes.iter().all(AaProbe::acceptable);
        self.ok = !self.budget_exceeded && probe_ok && self.properties.iter().all(|p| p.ok);
        self
    }

    pub fn property(&self, name: &str) -> Option<&PropertyVerdict> {
        self.properties.iter().find(|p| p.name == name)
    }
}

/// Explored system together with the facts computed on it.
pub struct Verified {
    pub report: VerifyReport,
    pub system: Option<TransitionSystem>,
    pub annotations: Option<Annotations>,
}

fn expectations(kind: AlgoKind, model: AsyncModel, init: &InitSpec) -> (Expectation, Expectation, Expectation) {
    use Expectation::*;
    let default_init = matches!(init, InitSpec::Default);
    let mm_aa = kind == AlgoKind::Mm && matches!(model, AsyncModel::Aa { .. });
    // (structure: acyclic + partial order + optimal sinks, rank descent, move bounds)
    if mm_aa {
        return (Report, Report, Report);
    }
    let structure = match kind {
        AlgoKind::Sp if !default_init => Report,
        _ => Pass,
    };
    let fresh = model == AsyncModel::Fresh;
    let descent = match (kind, default_init, fresh) {
        (AlgoKind::Dc, _, true) => Pass,
        (_, true, true) => Pass,
        _ => Report,
    };
    let moves = match (kind, default_init) {
        (_, true) => Pass,
        (AlgoKind::Dc, false) => Pass,
        _ => Report,
    };
    let structure = if kind == AlgoKind::Mm && !default_init { Pass } else { structure };
    (structure, descent, moves)
}

/// Explores the configuration and checks every applicable property.
pub fn verify(algo: &dyn Algorithm, cfg: &VerifyConfig) -> Verified {
    let kind = algo.kind();
    let inits: Vec<GlobalState> = match &cfg.init {
        InitSpec::Default => vec![algo.default_init()],
        InitSpec::All => domain_product(algo).collect(),
        InitSpec::States(s) => s.clone(),
    };
    let mut report = VerifyReport {
        schema: 1,
        algo: Some(kind),
        graph: algo.graph().name().to_string(),
        model: cfg.model,
        init: cfg.init.label(),
        budget: cfg.budget,
        budget_exceeded: false,
        initial_states: inits.len(),
        states: 0,
        edges: 0,
        sinks: 0,
        acyclic: false,
        all_sinks_optimal: false,
        sink_states: Vec::new(),
        bounds: None,
        properties: Vec::new(),
        aa_probes: Vec::new(),
        ok: false,
    };
    if let (true, AlgoKind::Mm, AsyncModel::Aa { window }) = (cfg.probes, kind, cfg.model) {
        let mm = MaximalMatching::new(algo.graph().clone()).expect("graph already accepted");
        report.aa_probes = [false, true].map(|all| mm_aa_probe(&mm, window, all, cfg.budget)).into();
    }
    let fresh_rel = FreshRelation::new(algo);
    let ext_rel = ExtendedRelation::new(algo, cfg.model);
    let relation: &dyn TransitionRelation = if cfg.model == AsyncModel::Fresh { &fresh_rel } else { &ext_rel };
    let ts = match explore(relation, inits, cfg.budget) {
        Ok(ts) => ts,
        Err(ExploreError::BudgetExceeded { explored, .. }) => {
            report.budget_exceeded = true;
            report.states = explored;
            return Verified { report: report.finish(), system: None, annotations: None };
        }
        Err(ExploreError::Model(e)) => {
            report.properties.push(PropertyVerdict::new("model", Expectation::Pass, false, e.to_string()));
            return Verified { report: report.finish(), system: None, annotations: None };
        }
    };
    let ann = annotate(&ts, algo);
    let (structure, descent, moves) = expectations(kind, cfg.model, &cfg.init);
    let default_init = matches!(cfg.init, InitSpec::Default);
    // Matching from a corrupted start may release a partner and later point
    // at it again, so local revisits are only reported there.
    let partial_order = if kind == AlgoKind::Mm && !default_init { Expectation::Report } else { structure };

    let acyc = check_acyclic(&ts);
    let sinks = ts.sinks();
    report.states = ts.len();
    report.edges = ts.edge_count();
    report.sinks = sinks.len();
    report.acyclic = acyc.acyclic();
    report.all_sinks_optimal = sinks.iter().all(|&s| ann.optimal[s]);
    if sinks.len() <= 64 {
        report.sink_states = sinks.iter().map(|&s| ts.global(s).to_string()).collect();
    }
    let mut props = vec![
        acyc.verdict(&ts, structure),
        check_sinks_optimal(&ts, &ann.optimal, structure),
        check_rank_descent(&ts, &ann.rank, descent),
        check_partial_order(&ts, partial_order),
    ];
    if kind == AlgoKind::Sp {
        props.push(check_distance_descent(&ts, if default_init { structure } else { Expectation::Report }));
    }

    let (reference, persistence) = match kind {
        AlgoKind::Mm if domain_product(algo).size() <= REFERENCE_PRODUCT_LIMIT => {
            (OptimalReference::DomainProduct, Expectation::Fail)
        }
        AlgoKind::Mm => (OptimalReference::Explored, Expectation::Report),
        _ => (OptimalReference::Explored, structure),
    };
    let dag = check_dag_inducing(&ts, &ann, algo, reference, persistence);
    let mm_aa = kind == AlgoKind::Mm && matches!(cfg.model, AsyncModel::Aa { .. });
    let (progress, silence) = if mm_aa || structure == Expectation::Report {
        (dag.progress.expecting(Expectation::Report), dag.silence.expecting(Expectation::Report))
    } else {
        (dag.progress, dag.silence)
    };
    props.extend([progress, dag.persistence, silence]);

    let n = algo.graph().n();
    props.push(match induce_order(&ts, &acyc, &ann.optimal, n) {
        Ok(order) => check_induced(&ts, &order),
        Err(e) => PropertyVerdict::new("induced_rank", Expectation::Report, false, format!("construction inapplicable: {e}")),
    });

    let bounds = check_bounds(&ts, &acyc, algo, default_init);
    props.push(bounds.verdict(moves));
    report.bounds = Some(bounds);

    if cfg.probes {
        if let Some(sp) = as_shortest_path(algo) {
            props.push(sp_zero_probe(&sp, cfg.budget));
        }
    }
    report.properties = props;
    Verified { report: report.finish(), system: Some(ts), annotations: Some(ann) }
}

/// Rebuilds a concrete SP instance; the trait object does not expose it.
fn as_shortest_path(algo: &dyn Algorithm) -> Option<ShortestPath> {
    ShortestPath::new(algo.graph().clone(), Some(algo.destination()?)).ok()
}

/// From every node at `⟨⊤, 0⟩` no guard holds, yet the state is not
/// optimal whenever some node is not the destination. Expected to fail.
pub fn sp_zero_probe(sp: &ShortestPath, budget: usize) -> PropertyVerdict {
    let rel = FreshRelation::new(sp);
    let name = "zero_distance_init_reaches_optimum";
    match explore(&rel, [sp.zero_init()], budget) {
        Ok(ts) => {
            let ann = annotate(&ts, sp);
            let bad = ts.sinks().into_iter().find(|&s| !ann.optimal[s]);
            let violations = sp.value_violations(&ts.global(ts.initial()[0]));
            let detail = format!(
                "{} states, {} moves possible; estimates below true distance: {}",
                ts.len(),
                ts.edge_count(),
                violations.iter().map(|(v, d)| format!("{v}:{d}")).collect::<Vec<_>>().join(" ")
            );
            let cex = bad.map(|s| Counterexample::new(&ts, vec![s], None, "terminal but suboptimal"));
            PropertyVerdict::new(name, Expectation::Fail, bad.is_none(), detail).with_counterexample(cex)
        }
        Err(e) => PropertyVerdict::new(name, Expectation::Fail, true, format!("not explored: {e}")),
    }
}

/// Checks a hand-built system: acyclicity, local partial order, and (when
/// flags are given) optimal sinks and the induced rank.
pub fn verify_system(ts: &TransitionSystem, optimal: Option<&[bool]>, name: &str) -> VerifyReport {
    let acyc = check_acyclic(ts);
    let sinks = ts.sinks();
    let n = if ts.is_empty() { 0 } else { ts.global(0).len() };
    let mut props = vec![acyc.verdict(ts, Expectation::Pass), check_partial_order(ts, Expectation::Pass)];
    if let Some(opt) = optimal {
        props.push(check_sinks_optimal(ts, opt, Expectation::Pass));
        props.push(match induce_order(ts, &acyc, opt, n) {
            Ok(order) => check_induced(ts, &order),
            Err(e) => PropertyVerdict::new("induced_rank", Expectation::Pass, false, format!("construction inapplicable: {e}")),
        });
    }
    for p in &props {
        if let Some(c) = &p.counterexample {
            debug_assert!(replay(ts, None, c).is_ok());
        }
    }
    VerifyReport {
        schema: 1,
        algo: Some(ts.kind()),
        graph: name.to_string(),
        model: AsyncModel::Fresh,
        init: "fixture".into(),
        budget: ts.len(),
        budget_exceeded: false,
        initial_states: ts.initial().len(),
        states: ts.len(),
        edges: ts.edge_count(),
        sinks: sinks.len(),
        acyclic: acyc.acyclic(),
        all_sinks_optimal: optimal.is_some_and(|o| sinks.iter().all(|&s| o[s])),
        sink_states: sinks.iter().take(64).map(|&s| ts.global(s).to_string()).collect(),
        bounds: None,
        properties: props,
        aa_probes: Vec::new(),
        ok: false,
    }
    .finish()
}

/// What the matching-under-AA search found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AaClassification {
    /// A cycle of extended states, so some node revisits a local state.
    Cycle,
    /// A path along which some node returns to an earlier local state.
    LocalRevisit,
    /// A path longer than `2n` moves.
    MoveBoundViolation,
    /// A terminal extended state whose global part is not a maximal matching.
    SuboptimalSink,
    /// The explored system satisfies every checked property.
    NoViolation,
    /// The search hit the state budget.
    BudgetExhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct AaProbe {
    pub graph: String,
    pub window: usize,
    /// Search started from every state of the domain product rather than
    /// from the default initial state.
    pub all_inits: bool,
    pub states: usize,
    pub classification: AaClassification,
    pub longest_path_moves: Option<u64>,
    pub counterexample: Option<Counterexample>,
    /// The counterexample was re-derived step by step from the relation.
    pub replayed: bool,
}

impl AaProbe {
    /// Any classification is acceptable as long as a reported violation
    /// replays against the relation.
    pub fn acceptable(&self) -> bool {
        self.counterexample.is_none() || self.replayed
    }
}

/// Bounded search for the failure of matching under arbitrary asynchrony.
pub fn mm_aa_probe(mm: &MaximalMatching, window: usize, all_inits: bool, budget: usize) -> AaProbe {
    let rel = ExtendedRelation::new(mm, AsyncModel::Aa { window });
    let mut probe = AaProbe {
        graph: mm.graph().name().to_string(),
        window,
        all_inits,
        states: 0,
        classification: AaClassification::BudgetExhausted,
        longest_path_moves: None,
        counterexample: None,
        replayed: false,
    };
    let inits: Vec<GlobalState> = if all_inits { domain_product(mm).collect() } else { vec![mm.default_init()] };
    let ts = match explore(&rel, inits, budget) {
        Ok(ts) => ts,
        Err(ExploreError::BudgetExceeded { explored, .. }) => {
            probe.states = explored;
            return probe;
        }
        Err(ExploreError::Model(e)) => panic!("matching relation produced an invalid state: {e}"),
    };
    probe.states = ts.len();
    let acyc = check_acyclic(&ts);
    let ann = annotate(&ts, mm);
    let bounds = check_bounds(&ts, &acyc, mm, true);
    probe.longest_path_moves = bounds.longest_path_moves;
    let po = check_partial_order(&ts, Expectation::Report);
    let sinks = check_sinks_optimal(&ts, &ann.optimal, Expectation::Report);
    let (class, cex) = if !acyc.acyclic() {
        (AaClassification::Cycle, acyc.verdict(&ts, Expectation::Report).counterexample)
    } else if !po.holds {
        (AaClassification::LocalRevisit, po.counterexample)
    } else if !bounds.holds() {
        (AaClassification::MoveBoundViolation, longest_move_path(&ts, &acyc))
    } else if !sinks.holds {
        (AaClassification::SuboptimalSink, sinks.counterexample)
    } else {
        (AaClassification::NoViolation, None)
    };
    probe.classification = class;
    probe.replayed = cex.as_ref().is_some_and(|c| replay(&ts, Some(&rel), c).is_ok());
    probe.counterexample = cex;
    probe
}

/// A path realizing the most moves, from an initial state.
fn longest_move_path(ts: &TransitionSystem, acyc: &crate::checker::props::Acyclicity) -> Option<Counterexample> {
    let order = acyc.order.as_ref()?;
    let mut best = vec![0u64; ts.len()];
    let mut next = vec![None; ts.len()];
    for &s in order.iter().rev() {
        for (t, l) in ts.successors(s) {
            let v = best[t] + u64::from(l.mover().is_some());
            if next[s].is_none() || v > best[s] {
                best[s] = v;
                next[s] = Some(t);
            }
        }
    }
    let start = *ts.initial().iter().max_by_key(|&&s| best[s])?;
    let mut path = vec![start];
    while let Some(t) = next[*path.last().expect("non-empty")] {
        path.push(t);
    }
    Some(Counterexample::new(ts, path, None, format!("{} moves", best[start])))
}

/// Rounds to convergence under the synchronous scheduler on fresh values.
#[derive(Clone, Debug, Serialize)]
pub struct RoundsReport {
    pub verdict: RunVerdict,
    pub rounds: u64,
    pub moves: u64,
}

pub fn synchronous_rounds(algo: &dyn Algorithm, init: GlobalState) -> RoundsReport {
    let cfg = RunConfig {
        scheduler: SchedulerKind::Synchronous,
        policy: NodePolicy::FixedOrder,
        model: AsyncModel::Fresh,
        ..RunConfig::default()
    };
    let out = run(algo, cfg, init);
    RoundsReport { verdict: out.verdict, rounds: out.trace.rounds(), moves: out.trace.moves() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::testutil::v;
    use crate::algo::DominantClique;
    use crate::checker::explore::DEFAULT_BUDGET;
    use crate::graph::{fig1, fig3, fig4, generate, Family};

    fn cfg(model: AsyncModel, init: InitSpec) -> VerifyConfig {
        VerifyConfig { model, init, budget: DEFAULT_BUDGET, probes: true }
    }

    #[test]
    fn fixed_graph_configurations_verify() {
        let dc = DominantClique::new(fig1()).unwrap();
        let sp = ShortestPath::new(fig3(), Some(v(4))).unwrap();
        let mm = MaximalMatching::new(fig4()).unwrap();
        let algos: [&dyn Algorithm; 3] = [&dc, &sp, &mm];
        for algo in algos {
            let r = verify(algo, &cfg(AsyncModel::Fresh, InitSpec::Default)).report;
            assert!(r.ok, "{}", serde_json::to_string_pretty(&r).unwrap());
        }
        let r = verify(&mm, &cfg(AsyncModel::Amr { channel_bound: 1 }, InitSpec::Default)).report;
        assert!(r.ok && r.acyclic, "{}", serde_json::to_string_pretty(&r).unwrap());
        let r = verify(&dc, &cfg(AsyncModel::Aa { window: 2 }, InitSpec::Default)).report;
        assert!(r.ok && r.acyclic);
        let r = verify(&sp, &cfg(AsyncModel::Aa { window: 2 }, InitSpec::Default)).report;
        assert!(r.ok && r.acyclic, "{}", serde_json::to_string_pretty(&r).unwrap());
    }

    #[test]
    fn all_inits_sweeps() {
        let dc = DominantClique::new(fig1()).unwrap();
        let r = verify(&dc, &cfg(AsyncModel::Fresh, InitSpec::All)).report;
        assert_eq!(r.initial_states, 128);
        assert!(r.ok && r.all_sinks_optimal);
        for n in [3, 4] {
            let mm = MaximalMatching::new(generate(Family::Path, n, None).unwrap()).unwrap();
            let r = verify(&mm, &cfg(AsyncModel::Fresh, InitSpec::All)).report;
            assert!(r.ok && r.all_sinks_optimal, "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }

    #[test]
    fn zero_distance_probe_fails_as_expected() {
        let sp = ShortestPath::new(fig3(), Some(v(4))).unwrap();
        let p = sp_zero_probe(&sp, DEFAULT_BUDGET);
        assert!(p.ok && !p.holds);
        assert!(p.detail.contains("v1:-4"));
    }

    #[test]
    fn rounds_on_fixed_graphs() {
        let sp = ShortestPath::new(fig3(), Some(v(4))).unwrap();
        let r = synchronous_rounds(&sp, sp.default_init());
        assert_eq!(r.verdict, RunVerdict::Converged);
        assert!(r.rounds <= fig3().hop_diameter().unwrap() as u64 + 1);
        let dc = DominantClique::new(fig1()).unwrap();
        assert!(synchronous_rounds(&dc, dc.default_init()).rounds <= 3);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mm = MaximalMatching::new(fig4()).unwrap();
        let r = verify(&mm, &VerifyConfig { budget: 3, ..cfg(AsyncModel::Fresh, InitSpec::Default) }).report;
        assert!(r.budget_exceeded && !r.ok);
        let p = mm_aa_probe(&mm, 2, false, 3);
        assert_eq!(p.classification, AaClassification::BudgetExhausted);
    }

    #[test]
    fn matching_under_aa_is_classified_and_replayed() {
        let mm = MaximalMatching::new(generate(Family::Path, 4, None).unwrap()).unwrap();
        let p = mm_aa_probe(&mm, 2, true, DEFAULT_BUDGET);
        assert_eq!(p.classification, AaClassification::Cycle);
        assert!(p.replayed && p.acceptable());
        let cex = p.counterexample.unwrap();
        assert_eq!(cex.path[cex.cycle_start.unwrap()], *cex.path.last().unwrap());
    }
}
