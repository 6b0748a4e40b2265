//! Quality criteria of an encoding, checked on explored graphs of a source
//! term and its translation.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::ccs::{self, canonicalize, CanonicalState, CcsError, Tag};
use crate::csp::{self, Proc};
use crate::encoder::{encode, make_renaming_policy, Coordinator, EncodeError};
use crate::equivalence::{BisimClasses, CoupledRelation};
use crate::explore::{
    aux_only_cycles, build_source_graph, build_target_graph, reference_to_source, Budget,
    Lts, SimClause, SourceGraph, StepClass, TargetGraph, TargetStep, Verdict,
};
use crate::name::Name;
use crate::syntax::{print_source, print_target};

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Target(#[from] CcsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Criterion {
    OperationalCorrespondence,
    WeakOperationalCorrespondence,
    DivergenceReflection,
    SuccessSensitivity,
    BarbRespect,
    NameInvariance,
    Distributability,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::OperationalCorrespondence,
        Criterion::WeakOperationalCorrespondence,
        Criterion::DivergenceReflection,
        Criterion::SuccessSensitivity,
        Criterion::BarbRespect,
        Criterion::NameInvariance,
        Criterion::Distributability,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Criterion::OperationalCorrespondence => "operationalCorrespondence",
            Criterion::WeakOperationalCorrespondence => "weakOperationalCorrespondence",
            Criterion::DivergenceReflection => "divergenceReflection",
            Criterion::SuccessSensitivity => "successSensitivity",
            Criterion::BarbRespect => "barbRespect",
            Criterion::NameInvariance => "nameInvariance",
            Criterion::Distributability => "distributability",
        }
    }

    pub fn from_key(s: &str) -> Option<Criterion> {
        Criterion::ALL.into_iter().find(|c| c.key() == s)
    }

    /// Whether the encoding under `coordinator` is expected to satisfy it.
    pub fn claimed(self, coordinator: Coordinator) -> bool {
        !matches!(
            (self, coordinator),
            (Criterion::OperationalCorrespondence, Coordinator::Decentral) | (Criterion::Distributability, Coordinator::Central)
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub result: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub stats: BTreeMap<&'static str, u64>,
}

impl CriterionResult {
    fn new(result: Verdict, witness: Option<Value>) -> Self {
        CriterionResult { result, witness, stats: BTreeMap::new() }
    }

    fn truncated() -> Self {
        CriterionResult::new(Verdict::Inconclusive, Some(json!({ "cause": "graph truncated" })))
    }

    fn stat(mut self, key: &'static str, value: u64) -> Self {
        self.stats.insert(key, value);
        self
    }
}

/// A source term with its explored source graph and the explored graph of
/// its translation under one coordinator.
pub struct Analysis {
    pub term: Proc,
    pub coordinator: Coordinator,
    pub budget: Budget,
    pub source: SourceGraph,
    pub target: TargetGraph,
    source_lts: Lts,
    target_lts: Lts,
    derived: OnceCell<(Lts, Vec<usize>)>,
}

impl Analysis {
    pub fn new(term: &Proc, coordinator: Coordinator, budget: Budget) -> Result<Analysis, CriteriaError> {
        let source = build_source_graph(term, budget);
        let target = build_target_graph(&encode(term, coordinator)?, coordinator, budget)?;
        let (source_lts, target_lts) = (source.lts(), target.graph.lts());
        Ok(Analysis { term: term.clone(), coordinator, budget, source, target, source_lts, target_lts, derived: OnceCell::new() })
    }

    pub fn source_lts(&self) -> &Lts {
        &self.source_lts
    }

    pub fn target_lts(&self) -> &Lts {
        &self.target_lts
    }

    pub fn truncated(&self) -> bool {
        self.source.truncated || self.target.graph.truncated
    }

    /// Translation of every source node, explored and laid side by side;
    /// `roots[i]` is the root of the translation of source node `i`.
    fn derivative_translations(&self) -> Result<&(Lts, Vec<usize>), CriteriaError> {
        if let Some(d) = self.derived.get() {
            return Ok(d);
        }
        let mut all = self.target_lts.clone();
        let mut roots = vec![0];
        for s in &self.source.nodes[1..] {
            let t = build_target_graph(&encode(s, self.coordinator)?, self.coordinator, self.budget)?;
            roots.push(all.len());
            all = all.union(&t.graph.lts());
        }
        Ok(self.derived.get_or_init(|| (all, roots)))
    }

    pub fn check(&self, criterion: Criterion) -> Result<CriterionResult, CriteriaError> {
        let start = Instant::now();
        let r = match criterion {
            Criterion::OperationalCorrespondence => self.operational_correspondence()?,
            Criterion::WeakOperationalCorrespondence => self.weak_operational_correspondence()?,
            Criterion::DivergenceReflection => self.divergence_reflection(),
            Criterion::SuccessSensitivity => self.success_sensitivity(),
            Criterion::BarbRespect => self.barb_respect(),
            Criterion::NameInvariance => name_invariance_default(&self.term, self.coordinator)?,
            Criterion::Distributability => self.distributability()?,
        };
        Ok(r.stat("runtimeMs", start.elapsed().as_millis() as u64))
    }
}

/// Immediate barbs of the term against the translated barbs its encoding
/// shows before any announcement is consumed: states reached by propagating
/// announcements towards the top, under the single-token coordinator (whose
/// graph `central` must be).
pub fn static_barbs_in(p: &Proc, central: &TargetGraph) -> (BTreeSet<Name>, BTreeSet<Name>) {
    assert_eq!(central.coordinator, Coordinator::Central);
    let g = &central.graph;
    let mut seen = vec![false; g.len()];
    let mut stack = vec![0usize];
    let mut barbs = BTreeSet::new();
    while let Some(n) = stack.pop() {
        if std::mem::replace(&mut seen[n], true) {
            continue;
        }
        barbs.extend(g.barbs[n].iter().copied());
        for e in &g.out[n] {
            let e = &g.edges[*e as usize];
            if e.data.input_tag != Tag::CoordAnnounce && !e.data.input_tag.is_operator_step() {
                stack.push(e.to as usize);
            }
        }
    }
    (csp::source_barbs(p), barbs)
}

pub fn static_barbs(p: &Proc, budget: Budget) -> Result<(BTreeSet<Name>, BTreeSet<Name>), CriteriaError> {
    let central = build_target_graph(&encode(p, Coordinator::Central)?, Coordinator::Central, budget)?;
    Ok(static_barbs_in(p, &central))
}

fn names_json(s: &BTreeSet<Name>) -> Value {
    Value::from(s.iter().map(|n| n.as_str().to_string()).collect::<Vec<_>>())
}

fn label_json(l: Option<Name>) -> Value {
    match l {
        Some(n) => Value::from(n.as_str()),
        None => Value::from("tau"),
    }
}

impl Analysis {
    /// Every source derivative is matched by a reachable target state
    /// bisimilar to its translation, and every reachable target state is
    /// bisimilar to the translation of some source derivative.
    fn operational_correspondence(&self) -> Result<CriterionResult, CriteriaError> {
        if self.truncated() {
            return Ok(CriterionResult::truncated());
        }
        let (derived, roots) = self.derivative_translations()?;
        if derived.truncated {
            return Ok(CriterionResult::truncated());
        }
        let classes = BisimClasses::new(&self.target_lts, derived);
        let wanted: BTreeSet<u32> = roots.iter().map(|r| classes.right_class(*r)).collect();
        let present: BTreeSet<u32> = (0..self.target_lts.len()).map(|t| classes.left_class(t)).collect();
        let stats = |r: CriterionResult| {
            r.stat("derivatives", roots.len() as u64)
                .stat("targetStates", self.target_lts.len() as u64)
                .stat("refinementRounds", classes.rounds as u64)
        };
        if let Some(i) = roots.iter().position(|r| !present.contains(&classes.right_class(*r))) {
            let w = json!({ "clause": "complete", "source": print_source(&self.source.nodes[i]) });
            return Ok(stats(CriterionResult::new(Verdict::False, Some(w))));
        }
        let unmatched: Vec<usize> =
            (0..self.target_lts.len()).filter(|t| !wanted.contains(&classes.left_class(*t))).collect();
        if let Some(&t) = unmatched.first() {
            let (success, barbs) = self.target_lts.reachable_predicates();
            let w = json!({
                "clause": "sound",
                "targetNode": t,
                "reachableSuccess": success[t],
                "reachableBarbs": names_json(&barbs[t]),
                "unmatchedStates": unmatched.len(),
            });
            return Ok(stats(CriterionResult::new(Verdict::False, Some(w))));
        }
        Ok(stats(CriterionResult::new(Verdict::True, None)))
    }

    /// Coupled similarity is transitive, so target states are compared with
    /// translations of source derivatives through the derivatives themselves:
    /// each derivative must be coupled similar to its own translation.
    fn weak_operational_correspondence(&self) -> Result<CriterionResult, CriteriaError> {
        if self.truncated() {
            return Ok(CriterionResult::truncated());
        }
        let (derived, roots) = self.derivative_translations()?;
        if derived.truncated {
            return Ok(CriterionResult::truncated());
        }
        let own = CoupledRelation::new(&self.source_lts, derived);
        if let Some(i) = (0..roots.len()).find(|i| !own.related(*i, roots[*i])) {
            let w = json!({ "clause": "translation", "source": print_source(&self.source.nodes[i]) });
            return Ok(CriterionResult::new(Verdict::False, Some(w)));
        }
        let rel = CoupledRelation::new(&self.source_lts, &self.target_lts);
        let n = self.target_lts.len();
        let matched: Vec<bool> = (0..n).map(|t| (0..roots.len()).any(|s| rel.related(s, t))).collect();
        let stats = |r: CriterionResult| {
            r.stat("derivatives", roots.len() as u64)
                .stat("targetStates", n as u64)
                .stat("matchedStates", matched.iter().filter(|m| **m).count() as u64)
        };
        if let Some(s) = (0..roots.len()).find(|s| !(0..n).any(|t| rel.related(*s, t))) {
            let w = json!({ "clause": "complete", "source": print_source(&self.source.nodes[s]) });
            return Ok(stats(CriterionResult::new(Verdict::False, Some(w))));
        }
        // states that can still reach a matched state
        let mut rev = vec![Vec::new(); n];
        for (t, ss) in self.target_lts.succ.iter().enumerate() {
            for s in ss {
                rev[*s as usize].push(t);
            }
        }
        let mut ok = matched.clone();
        let mut stack: Vec<usize> = (0..n).filter(|t| matched[*t]).collect();
        while let Some(t) = stack.pop() {
            for &p in &rev[t] {
                if !std::mem::replace(&mut ok[p], true) {
                    stack.push(p);
                }
            }
        }
        if let Some(t) = (0..n).find(|t| !ok[*t]) {
            let w = json!({ "clause": "weaklySound", "targetNode": t });
            return Ok(stats(CriterionResult::new(Verdict::False, Some(w))));
        }
        Ok(stats(CriterionResult::new(Verdict::True, None)))
    }

    fn divergence_reflection(&self) -> CriterionResult {
        if self.truncated() {
            return CriterionResult::truncated();
        }
        let target = self.target_lts.diverges_from(0);
        let source = self.source_lts.diverges_from(0);
        let w = (target && !source).then(|| json!({ "targetDiverges": true, "sourceDiverges": false }));
        CriterionResult::new(Verdict::from_bool(!target || source), w)
            .stat("auxOnlyCycles", aux_only_cycles(&self.target).len() as u64)
    }

    fn root_predicates(&self) -> ((bool, BTreeSet<Name>), (bool, BTreeSet<Name>)) {
        let (ss, sb) = self.source_lts.reachable_predicates();
        let (ts, tb) = self.target_lts.reachable_predicates();
        ((ss[0], sb[0].clone()), (ts[0], tb[0].clone()))
    }

    fn success_sensitivity(&self) -> CriterionResult {
        if self.truncated() {
            return CriterionResult::truncated();
        }
        let ((s, _), (t, _)) = self.root_predicates();
        let w = (s != t).then(|| json!({ "source": s, "target": t }));
        CriterionResult::new(Verdict::from_bool(s == t), w)
    }

    fn barb_respect(&self) -> CriterionResult {
        if self.truncated() {
            return CriterionResult::truncated();
        }
        let ((_, s), (_, t)) = self.root_predicates();
        let w = (s != t).then(|| json!({ "source": names_json(&s), "target": names_json(&t) }));
        CriterionResult::new(Verdict::from_bool(s == t), w)
    }
}

/// Checks that encoding a renamed term gives, up to structural congruence,
/// the renamed encoding. `sigma` must be injective on the names of `p`.
pub fn check_name_invariance(
    p: &Proc,
    coordinator: Coordinator,
    sigma: &BTreeMap<Name, Name>,
) -> Result<CriterionResult, CriteriaError> {
    let apply = |n: Name| sigma.get(&n).copied().unwrap_or(n);
    let renamed = csp::rename_channels(p, &apply);
    let direct = canonicalize(&encode(&renamed, coordinator)?);
    // the induced renaming of reference names, projection by projection
    let before = make_renaming_policy(csp::all_names(p));
    let after = make_renaming_policy(csp::all_names(&renamed));
    let mut induced: HashMap<Name, Name> = HashMap::new();
    for a in before.domain() {
        for (x, y) in before.image(a)?.into_iter().zip(after.image(apply(a))?) {
            induced.insert(x, y);
        }
    }
    let lifted = encode(p, coordinator)?.rename_free(&|n| induced.get(&n).copied().unwrap_or(n));
    let equal = canonicalize(&lifted) == direct;
    let w = (!equal).then(|| {
        json!({ "renaming": sigma.iter().map(|(a, b)| format!("{a}->{b}")).collect::<Vec<_>>() })
    });
    Ok(CriterionResult::new(Verdict::from_bool(equal), w))
}

/// Three injective renamings of the names of `p`: pairwise swaps, a cyclic
/// rotation, and a move to fresh names.
pub fn standard_renamings(p: &Proc) -> Vec<BTreeMap<Name, Name>> {
    let names: Vec<Name> = csp::all_names(p).into_iter().collect();
    let swap = names
        .chunks(2)
        .flat_map(|c| match c {
            [a, b] => vec![(*a, *b), (*b, *a)],
            _ => Vec::new(),
        })
        .collect();
    let rotate = names.iter().enumerate().map(|(i, a)| (*a, names[(i + 1) % names.len()])).collect();
    let mut taken: BTreeSet<Name> = names.iter().copied().collect();
    let fresh = names
        .iter()
        .map(|a| {
            let mut spelling = format!("{a}x");
            while taken.contains(&Name::source(&spelling)) {
                spelling.push('x');
            }
            let b = Name::source(&spelling);
            taken.insert(b);
            (*a, b)
        })
        .collect();
    vec![swap, rotate, fresh]
}

fn name_invariance_default(p: &Proc, coordinator: Coordinator) -> Result<CriterionResult, CriteriaError> {
    let renamings = standard_renamings(p);
    let mut verdict = Verdict::True;
    let mut witness = None;
    for sigma in &renamings {
        let r = check_name_invariance(p, coordinator, sigma)?;
        if r.result != Verdict::True && witness.is_none() {
            witness = r.witness;
        }
        verdict = verdict.and(r.result);
    }
    Ok(CriterionResult::new(verdict, witness).stat("renamings", renamings.len() as u64))
}

/// The source action a simulation step simulates (`Some(None)` for an
/// internal one), when the step identifies it.
fn simulated_action(class: StepClass, step: &TargetStep) -> Option<Option<Name>> {
    match class {
        StepClass::Sim(SimClause::Announcement | SimClause::Unresolved) => step.first_arg.map(reference_to_source),
        StepClass::Sim(SimClause::PositiveLock) => match step.output_tag {
            Tag::CoordQuery(n) => Some(reference_to_source(n)),
            _ => None,
        },
        StepClass::Sim(SimClause::Operator) => Some(None),
        _ => None,
    }
}

/// Pairs of actions that some reachable source state can perform without
/// conflict, that is, through steps sharing no choice operator.
pub fn distributable_pairs(g: &SourceGraph) -> BTreeSet<(Option<Name>, Option<Name>)> {
    let mut pairs = BTreeSet::new();
    for n in 0..g.len() {
        for (k, e1) in g.out[n].iter().enumerate() {
            for e2 in &g.out[n][k + 1..] {
                let (e1, e2) = (&g.edges[*e1 as usize].data, &g.edges[*e2 as usize].data);
                if e1.resources.is_disjoint(&e2.resources) {
                    let (a, b) = (e1.label.name(), e2.label.name());
                    pairs.insert(if a <= b { (a, b) } else { (b, a) });
                }
            }
        }
    }
    pairs
}

impl Analysis {
    /// For every distributable pair of source actions, some reachable target
    /// state enables simulation steps of both that consume disjoint atoms,
    /// and performing them in either order leads to the same state.
    fn distributability(&self) -> Result<CriterionResult, CriteriaError> {
        if self.truncated() {
            return Ok(CriterionResult::truncated());
        }
        let pairs = distributable_pairs(&self.source);
        let g = &self.target.graph;
        let index: HashMap<&CanonicalState, usize> = g.nodes.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut verdict = Verdict::True;
        let mut witness = None;
        for &(a, b) in &pairs {
            let mut contended = 0u64;
            let mut shared: Option<String> = None;
            let mut found = false;
            'states: for n in 0..g.len() {
                for (k, &x) in g.out[n].iter().enumerate() {
                    for &y in &g.out[n][k + 1..] {
                        let (ex, ey) = (&g.edges[x as usize], &g.edges[y as usize]);
                        let (lx, ly) = (simulated_action(ex.class, &ex.data), simulated_action(ey.class, &ey.data));
                        if !(lx == Some(a) && ly == Some(b) || lx == Some(b) && ly == Some(a)) {
                            continue;
                        }
                        let consumed = |d: &TargetStep| {
                            let mut c = vec![d.output_atom];
                            if !d.input_replicated {
                                c.push(d.input_atom);
                            }
                            c
                        };
                        let (cx, cy) = (consumed(&ex.data), consumed(&ey.data));
                        if let Some(atom) = cx.iter().find(|i| cy.contains(i)) {
                            contended += 1;
                            if shared.is_none() {
                                shared = Some(print_target(&g.nodes[n].atom_process(*atom as usize)));
                            }
                            continue;
                        }
                        let both = ccs::fire_many(
                            &g.nodes[n],
                            &[
                                (ex.data.output_atom as usize, ex.data.input_atom as usize),
                                (ey.data.output_atom as usize, ey.data.input_atom as usize),
                            ],
                            self.target.options,
                        )?;
                        let Some(&joined) = index.get(&both.target) else { continue };
                        let reaches = |from: u32| g.successors(from as usize).any(|m| m == joined);
                        if reaches(ex.to) && reaches(ey.to) {
                            found = true;
                            break 'states;
                        }
                    }
                }
            }
            if !found {
                verdict = Verdict::False;
                if witness.is_none() {
                    witness = Some(json!({
                        "actions": [label_json(a), label_json(b)],
                        "contendedStates": contended,
                        "sharedAtom": shared,
                    }));
                }
            }
        }
        Ok(CriterionResult::new(verdict, witness).stat("distributablePairs", pairs.len() as u64))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimedResult {
    /// Whether the encoding is expected to meet the criterion.
    pub claimed: bool,
    #[serde(flatten)]
    pub result: CriterionResult,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub sim_edges: usize,
    pub truncated: bool,
    pub source_nodes: usize,
    pub unresolved: usize,
    pub lock_violations: usize,
    pub aux_only_cycles: usize,
}

/// One checked term under one coordinator.
#[derive(Clone, Debug, Serialize)]
pub struct CriteriaReport {
    pub schema: &'static str,
    pub term: String,
    pub coordinator: Coordinator,
    pub criteria: BTreeMap<&'static str, ClaimedResult>,
    pub graph: GraphStats,
}

impl CriteriaReport {
    /// Conjunction of the claimed criteria.
    pub fn claimed_verdict(&self) -> Verdict {
        self.criteria.values().filter(|c| c.claimed).fold(Verdict::True, |v, c| v.and(c.result.result))
    }
}

impl Analysis {
    pub fn graph_stats(&self) -> GraphStats {
        let g = &self.target.graph;
        GraphStats {
            nodes: g.len(),
            edges: g.edges.len(),
            sim_edges: g.sim_edge_count(),
            truncated: self.truncated(),
            source_nodes: self.source.len(),
            unresolved: self.target.unresolved,
            lock_violations: crate::explore::check_lock_invariants(&self.target).violations(),
            aux_only_cycles: aux_only_cycles(&self.target).len(),
        }
    }

    pub fn report(&self, criteria: &[Criterion]) -> Result<CriteriaReport, CriteriaError> {
        let mut out = BTreeMap::new();
        for &c in criteria {
            out.insert(c.key(), ClaimedResult { claimed: c.claimed(self.coordinator), result: self.check(c)? });
        }
        Ok(CriteriaReport {
            schema: "v1",
            term: print_source(&self.term),
            coordinator: self.coordinator,
            criteria: out,
            graph: self.graph_stats(),
        })
    }
}

pub fn check_operational_correspondence_strict(p: &Proc, budget: Budget) -> Result<CriterionResult, CriteriaError> {
    Analysis::new(p, Coordinator::Central, budget)?.check(Criterion::OperationalCorrespondence)
}

pub fn check_weak_operational_correspondence(p: &Proc, budget: Budget) -> Result<CriterionResult, CriteriaError> {
    Analysis::new(p, Coordinator::Decentral, budget)?.check(Criterion::WeakOperationalCorrespondence)
}

pub fn check_divergence_reflection(p: &Proc, coordinator: Coordinator, budget: Budget) -> Result<CriterionResult, CriteriaError> {
    Analysis::new(p, coordinator, budget)?.check(Criterion::DivergenceReflection)
}

pub fn check_success_sensitivity(p: &Proc, coordinator: Coordinator) -> Result<CriterionResult, CriteriaError> {
    Analysis::new(p, coordinator, Budget::default())?.check(Criterion::SuccessSensitivity)
}

pub fn check_barb_respect(p: &Proc, coordinator: Coordinator) -> Result<CriterionResult, CriteriaError> {
    Analysis::new(p, coordinator, Budget::default())?.check(Criterion::BarbRespect)
}

pub fn check_distributability_preservation(p: &Proc, coordinator: Coordinator) -> Result<CriterionResult, CriteriaError> {
    Analysis::new(p, coordinator, Budget::default())?.check(Criterion::Distributability)
}
