//! Finite reduction graphs of source and target terms, step classification,
//! and the reachability predicates the checkers are built on.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::ccs::{self, AtomKind, CName, CanonOptions, CanonicalState, CcsError, Tag, TargetProcess};
use crate::csp::{self, Origin, Proc, Resource, SourceLabel};
use crate::encoder::{tau_name, Coordinator};
use crate::name::Name;

/// Exploration limits; hitting either marks the graph truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_states: usize,
    pub max_edges: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_states: 50_000, max_edges: 200_000 }
    }
}

impl Budget {
    pub fn states(n: usize) -> Budget {
        Budget { max_states: n, max_edges: n.saturating_mul(4) }
    }
}

/// Which rule made a target step a simulation step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SimClause {
    /// The central coordinator consumed an announcement whose lock answers true.
    Announcement,
    /// A positive lock instantiation was consumed.
    PositiveLock,
    /// A step of internal choice, divergence or recursion.
    Operator,
    /// The lock outcome could not be determined; classified sim to stay sound.
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum StepClass {
    Source,
    Aux,
    Sim(SimClause),
}

impl StepClass {
    pub fn is_sim(self) -> bool {
        matches!(self, StepClass::Sim(_))
    }
}

#[derive(Clone, Debug)]
pub struct Edge<E> {
    pub from: u32,
    pub to: u32,
    pub class: StepClass,
    pub data: E,
}

/// A reduction graph rooted at node 0.
#[derive(Clone, Debug)]
pub struct Graph<N, E> {
    pub nodes: Vec<N>,
    pub edges: Vec<Edge<E>>,
    /// Outgoing edge indices per node.
    pub out: Vec<Vec<u32>>,
    pub success: Vec<bool>,
    pub barbs: Vec<BTreeSet<Name>>,
    pub truncated: bool,
}

impl<N, E> Graph<N, E> {
    fn empty() -> Self {
        Graph { nodes: Vec::new(), edges: Vec::new(), out: Vec::new(), success: Vec::new(), barbs: Vec::new(), truncated: false }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn successors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[n].iter().map(move |e| self.edges[*e as usize].to as usize)
    }

    pub fn sim_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.class.is_sim()).count()
    }

    /// The unlabelled reduction system with its observables.
    pub fn lts(&self) -> Lts {
        Lts {
            succ: (0..self.len()).map(|n| self.successors(n).map(|m| m as u32).collect()).collect(),
            success: self.success.clone(),
            barbs: self.barbs.clone(),
            truncated: self.truncated,
        }
    }

    fn add_edge(&mut self, from: u32, to: u32, class: StepClass, data: E) {
        self.out[from as usize].push(self.edges.len() as u32);
        self.edges.push(Edge { from, to, class, data });
    }
}

#[derive(Clone, Debug)]
pub struct SourceStep {
    pub label: SourceLabel,
    pub origin: Origin,
    pub resources: BTreeSet<Resource>,
}

pub type SourceGraph = Graph<Proc, SourceStep>;

/// Which source transitions count as steps of the reduction graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceSteps {
    /// Every transition, visible or not: the term is treated as a closed
    /// system whose actions are performed without an environment.
    All,
    /// Only internal transitions.
    TauOnly,
}

pub fn build_source_graph(p: &Proc, budget: Budget) -> SourceGraph {
    build_source_graph_with(p, SourceSteps::All, budget)
}

pub fn build_source_graph_with(p: &Proc, steps: SourceSteps, budget: Budget) -> SourceGraph {
    let mut g = Graph::empty();
    let mut index: HashMap<Proc, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    let intern = |q: Proc, g: &mut SourceGraph, index: &mut HashMap<Proc, u32>, queue: &mut VecDeque<u32>| -> Option<u32> {
        if let Some(&i) = index.get(&q) {
            return Some(i);
        }
        if g.nodes.len() >= budget.max_states {
            g.truncated = true;
            return None;
        }
        let i = g.nodes.len() as u32;
        g.success.push(csp::source_has_success(&q));
        g.barbs.push(csp::source_barbs(&q));
        g.out.push(Vec::new());
        g.nodes.push(q.clone());
        index.insert(q, i);
        queue.push_back(i);
        Some(i)
    };
    intern(p.clone(), &mut g, &mut index, &mut queue);
    while let Some(i) = queue.pop_front() {
        let node = g.nodes[i as usize].clone();
        for t in csp::transitions_with_origin(&node) {
            if steps == SourceSteps::TauOnly && t.label != SourceLabel::Tau {
                continue;
            }
            if g.edges.len() >= budget.max_edges {
                g.truncated = true;
                break;
            }
            let Some(j) = intern(Arc::new(t.target), &mut g, &mut index, &mut queue) else { continue };
            let dup = g.out[i as usize].iter().any(|e| {
                let e = &g.edges[*e as usize];
                e.to == j && e.data.label == t.label && e.data.resources == t.resources
            });
            if !dup {
                g.add_edge(i, j, StepClass::Source, SourceStep { label: t.label, origin: t.origin, resources: t.resources });
            }
        }
    }
    g
}

/// What a target edge consumed and produced.
#[derive(Clone, Debug)]
pub struct TargetStep {
    pub output_atom: u32,
    pub input_atom: u32,
    pub input_replicated: bool,
    pub output_tag: Tag<CName>,
    pub input_tag: Tag<CName>,
    /// First transmitted name (the announced action for announcements).
    pub first_arg: Option<CName>,
    /// Restricted names of the source state mapped to the target state;
    /// `u32::MAX` where a name disappeared.
    pub renaming: Box<[u32]>,
}

#[derive(Clone, Debug)]
pub struct TargetGraph {
    pub graph: Graph<CanonicalState, TargetStep>,
    pub coordinator: Coordinator,
    /// Announcement edges whose lock outcome could not be determined.
    pub unresolved: usize,
    pub options: CanonOptions,
}

pub fn build_target_graph(t: &TargetProcess, coordinator: Coordinator, budget: Budget) -> Result<TargetGraph, CcsError> {
    build_target_graph_with(t, coordinator, budget, CanonOptions::default())
}

pub fn build_target_graph_with(
    t: &TargetProcess,
    coordinator: Coordinator,
    budget: Budget,
    options: CanonOptions,
) -> Result<TargetGraph, CcsError> {
    build_target_graph_from(ccs::canonicalize_with(t, options), coordinator, budget, options)
}

pub fn build_target_graph_from(
    root: CanonicalState,
    coordinator: Coordinator,
    budget: Budget,
    options: CanonOptions,
) -> Result<TargetGraph, CcsError> {
    let mut g: Graph<CanonicalState, TargetStep> = Graph::empty();
    let mut index: HashMap<CanonicalState, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut add_node = |s: CanonicalState, g: &mut Graph<CanonicalState, TargetStep>, queue: &mut VecDeque<u32>| -> Option<u32> {
        if let Some(&i) = index.get(&s) {
            return Some(i);
        }
        if g.nodes.len() >= budget.max_states {
            g.truncated = true;
            return None;
        }
        let i = g.nodes.len() as u32;
        g.success.push(ccs::target_has_success(&s));
        g.barbs.push(BTreeSet::new());
        g.out.push(Vec::new());
        g.nodes.push(s.clone());
        index.insert(s, i);
        queue.push_back(i);
        Some(i)
    };
    add_node(root, &mut g, &mut queue);
    'explore: while let Some(i) = queue.pop_front() {
        let state = g.nodes[i as usize].clone();
        for r in ccs::target_reductions_with(&state, options)? {
            if g.edges.len() >= budget.max_edges {
                g.truncated = true;
                break 'explore;
            }
            let Some(j) = add_node(r.target, &mut g, &mut queue) else { continue };
            let class = match (coordinator, r.info.input_tag) {
                (_, tag) if tag.is_operator_step() => StepClass::Sim(SimClause::Operator),
                (Coordinator::Decentral, Tag::LockPos) => StepClass::Sim(SimClause::PositiveLock),
                // resolved below, once the lock's answer is in the graph
                (Coordinator::Central, Tag::CoordAnnounce) => StepClass::Sim(SimClause::Unresolved),
                _ => StepClass::Aux,
            };
            let step = TargetStep {
                output_atom: r.info.output_atom as u32,
                input_atom: r.info.input_atom as u32,
                input_replicated: r.info.replicated,
                output_tag: r.info.output_tag,
                input_tag: r.info.input_tag,
                first_arg: r.info.args.first().copied(),
                renaming: r.renaming.iter().map(|x| x.unwrap_or(u32::MAX)).collect(),
            };
            g.add_edge(i, j, class, step);
        }
    }
    let mut tg = TargetGraph { graph: g, coordinator, unresolved: 0, options };
    if coordinator == Coordinator::Central {
        resolve_announcements(&mut tg);
    }
    tg.graph.barbs = (0..tg.graph.len()).map(|n| immediate_translated_barbs(&tg, n)).collect();
    Ok(tg)
}

/// The outcome of the coordinator's lock test following announcement edge
/// `e`: searches forward from its target for the step that resolves the
/// if-construct. With the single token held, no other test can be pending.
fn announcement_outcome(g: &Graph<CanonicalState, TargetStep>, e: usize) -> Option<bool> {
    let mut seen = vec![false; g.len()];
    let mut queue = VecDeque::from([g.edges[e].to as usize]);
    let (mut then_seen, mut else_seen) = (false, false);
    let mut incomplete = false;
    while let Some(n) = queue.pop_front() {
        if std::mem::replace(&mut seen[n], true) {
            continue;
        }
        if g.out[n].is_empty() && g.truncated {
            incomplete = true;
        }
        for &ei in &g.out[n] {
            let edge = &g.edges[ei as usize];
            match edge.data.input_tag {
                Tag::CoordThen => then_seen = true,
                Tag::CoordElse => else_seen = true,
                _ => queue.push_back(edge.to as usize),
            }
        }
    }
    match (then_seen, else_seen, incomplete) {
        (true, false, false) => Some(true),
        (false, true, false) => Some(false),
        _ => None,
    }
}

fn resolve_announcements(tg: &mut TargetGraph) {
    let g = &tg.graph;
    let updates: Vec<(usize, StepClass)> = g
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.data.input_tag == Tag::CoordAnnounce && !e.data.input_tag.is_operator_step())
        .map(|(i, _)| {
            let class = match announcement_outcome(g, i) {
                Some(true) => StepClass::Sim(SimClause::Announcement),
                Some(false) => StepClass::Aux,
                None => StepClass::Sim(SimClause::Unresolved),
            };
            (i, class)
        })
        .collect();
    tg.unresolved = updates.iter().filter(|(_, c)| *c == StepClass::Sim(SimClause::Unresolved)).count();
    for (i, c) in updates {
        tg.graph.edges[i].class = c;
    }
}

/// Source action named by a reference name `a.1`; `None` for tau.
pub fn reference_to_source(n: CName) -> Option<Name> {
    let CName::Free(n) = n else { return None };
    if n == tau_name() {
        return None;
    }
    n.as_str().strip_suffix(".1").map(Name::source)
}

/// Translated barbs of node `n`: a source action is observable when the
/// coordinator can commit to it from here. Centrally that is an announcement
/// consumption whose lock answers true; decentrally it is the coordinator's
/// lock test meeting a positive lock instantiation.
fn immediate_translated_barbs(tg: &TargetGraph, n: usize) -> BTreeSet<Name> {
    let g = &tg.graph;
    g.out[n]
        .iter()
        .filter_map(|&ei| {
            let e = &g.edges[ei as usize];
            match tg.coordinator {
                Coordinator::Central if e.class == StepClass::Sim(SimClause::Announcement) => {
                    e.data.first_arg.and_then(reference_to_source)
                }
                Coordinator::Decentral if e.data.input_tag == Tag::LockPos => match e.data.output_tag {
                    Tag::CoordQuery(c) => reference_to_source(c),
                    _ => None,
                },
                _ => None,
            }
        })
        .collect()
}

/// Translated barbs of a single state, computed without a prebuilt graph:
/// each enabled announcement consumption (or lock test) is followed in a
/// scratch exploration of at most `probe_budget` states that excludes
/// operator steps, until the coordinator's test resolves.
pub fn translated_barbs(s: &CanonicalState, coordinator: Coordinator, probe_budget: usize) -> Result<BTreeSet<Name>, CcsError> {
    let mut out = BTreeSet::new();
    for r in ccs::target_reductions(s)? {
        match coordinator {
            Coordinator::Decentral => {
                if let (Tag::LockPos, Tag::CoordQuery(c)) = (r.info.input_tag, r.info.output_tag) {
                    out.extend(reference_to_source(c));
                }
            }
            Coordinator::Central => {
                if r.info.input_tag != Tag::CoordAnnounce {
                    continue;
                }
                let Some(a) = r.info.args.first().copied().and_then(reference_to_source) else { continue };
                if probe_lock(&r.target, probe_budget)? == Some(true) {
                    out.insert(a);
                }
            }
        }
    }
    Ok(out)
}

fn probe_lock(start: &CanonicalState, budget: usize) -> Result<Option<bool>, CcsError> {
    let mut seen: HashMap<CanonicalState, ()> = HashMap::new();
    let mut queue = VecDeque::from([start.clone()]);
    let (mut then_seen, mut else_seen) = (false, false);
    while let Some(s) = queue.pop_front() {
        if seen.insert(s.clone(), ()).is_some() {
            continue;
        }
        if seen.len() > budget {
            return Ok(None);
        }
        for r in ccs::target_reductions(&s)? {
            match r.info.input_tag {
                Tag::CoordThen => then_seen = true,
                Tag::CoordElse => else_seen = true,
                tag if tag.is_operator_step() => {}
                _ => queue.push_back(r.target),
            }
        }
    }
    Ok(match (then_seen, else_seen) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        _ => None,
    })
}

/// Unlabelled reduction system with observables, the input of the
/// equivalence checkers.
#[derive(Clone, Debug, Default)]
pub struct Lts {
    pub succ: Vec<Vec<u32>>,
    pub success: Vec<bool>,
    pub barbs: Vec<BTreeSet<Name>>,
    pub truncated: bool,
}

impl Lts {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    /// Disjoint union; nodes of `other` are shifted by `self.len()`.
    pub fn union(&self, other: &Lts) -> Lts {
        let off = self.len() as u32;
        let mut succ = self.succ.clone();
        succ.extend(other.succ.iter().map(|s| s.iter().map(|x| x + off).collect()));
        let mut success = self.success.clone();
        success.extend(other.success.iter().copied());
        let mut barbs = self.barbs.clone();
        barbs.extend(other.barbs.iter().cloned());
        Lts { succ, success, barbs, truncated: self.truncated || other.truncated }
    }

    /// Strongly connected components, each listed once, in reverse
    /// topological order (components only reaching earlier ones come first).
    pub fn sccs(&self) -> Vec<Vec<u32>> {
        let mut dg: DiGraph<(), ()> = DiGraph::with_capacity(self.len(), 0);
        for _ in 0..self.len() {
            dg.add_node(());
        }
        for (u, vs) in self.succ.iter().enumerate() {
            for v in vs {
                dg.add_edge((u as u32).into(), (*v).into(), ());
            }
        }
        tarjan_scc(&dg).into_iter().map(|c| c.into_iter().map(|n| n.index() as u32).collect()).collect()
    }

    /// Weakly reachable success and barbs for every node.
    pub fn reachable_predicates(&self) -> (Vec<bool>, Vec<BTreeSet<Name>>) {
        let mut success = vec![false; self.len()];
        let mut barbs = vec![BTreeSet::new(); self.len()];
        for comp in self.sccs() {
            let mut s = false;
            let mut b = BTreeSet::new();
            for &n in &comp {
                s |= self.success[n as usize];
                b.extend(self.barbs[n as usize].iter().copied());
                for &m in &self.succ[n as usize] {
                    s |= success[m as usize];
                    b.extend(barbs[m as usize].iter().copied());
                }
            }
            for &n in &comp {
                success[n as usize] = s;
                barbs[n as usize] = b.clone();
            }
        }
        (success, barbs)
    }

    /// Whether some cycle is reachable from `root`.
    pub fn diverges_from(&self, root: usize) -> bool {
        let reach = self.reachable_from(root);
        self.sccs().iter().any(|c| {
            reach[c[0] as usize] && (c.len() > 1 || self.succ[c[0] as usize].contains(&c[0]))
        })
    }

    pub fn reachable_from(&self, root: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n], true) {
                continue;
            }
            stack.extend(self.succ[n].iter().map(|m| *m as usize));
        }
        seen
    }
}

/// Outcome of a check that may be cut short by the exploration budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::False, _) | (_, Verdict::False) => Verdict::False,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::True,
        }
    }
}

pub fn detect_divergence<N, E>(g: &Graph<N, E>) -> Verdict {
    if g.truncated {
        return Verdict::Inconclusive;
    }
    Verdict::from_bool(g.lts().diverges_from(0))
}

/// Cycles made of auxiliary steps only, reported by one node on each.
pub fn aux_only_cycles(tg: &TargetGraph) -> Vec<u32> {
    let g = &tg.graph;
    let aux = Lts {
        succ: (0..g.len())
            .map(|n| {
                g.out[n]
                    .iter()
                    .map(|e| &g.edges[*e as usize])
                    .filter(|e| !e.class.is_sim())
                    .map(|e| e.to)
                    .collect()
            })
            .collect(),
        ..Lts::default()
    };
    aux.sccs()
        .into_iter()
        .filter(|c| c.len() > 1 || aux.succ[c[0] as usize].contains(&c[0]))
        .map(|c| c[0])
        .collect()
}

/// Violations of the lock invariants found in a target graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LockReport {
    /// Nodes holding two positive instantiations of one lock.
    pub duplicate_positive: Vec<u32>,
    /// Nodes holding a positive next to another instantiation of one lock.
    pub positive_with_other: Vec<u32>,
    /// Nodes holding a positive instantiation of a lock that was negative
    /// on some path leading there.
    pub positive_after_negative: Vec<u32>,
}

impl LockReport {
    pub fn violations(&self) -> usize {
        self.duplicate_positive.len() + self.positive_with_other.len() + self.positive_after_negative.len()
    }
}

fn lock_instantiations(s: &CanonicalState) -> (HashMap<u32, u32>, HashMap<u32, u32>) {
    let (mut pos, mut neg): (HashMap<u32, u32>, HashMap<u32, u32>) = (HashMap::new(), HashMap::new());
    for a in s.atoms() {
        if a.kind() != AtomKind::Input {
            continue;
        }
        let Some(CName::Top(l)) = a.subject() else { continue };
        match a.tag() {
            Tag::LockPos => *pos.entry(l).or_default() += 1,
            Tag::LockNeg => *neg.entry(l).or_default() += 1,
            _ => {}
        }
    }
    (pos, neg)
}

pub fn check_lock_invariants(tg: &TargetGraph) -> LockReport {
    let g = &tg.graph;
    let mut report = LockReport::default();
    let inst: Vec<_> = g.nodes.iter().map(lock_instantiations).collect();
    for (n, (pos, neg)) in inst.iter().enumerate() {
        if pos.values().any(|c| *c > 1) {
            report.duplicate_positive.push(n as u32);
        }
        if pos.iter().any(|(l, c)| *c >= 1 && neg.contains_key(l)) {
            report.positive_with_other.push(n as u32);
        }
    }
    // locks that have been negative, propagated along edges
    let mut negative: Vec<BTreeSet<u32>> = inst.iter().map(|(_, neg)| neg.keys().copied().collect()).collect();
    let mut work: VecDeque<usize> = (0..g.len()).collect();
    let mut queued = vec![true; g.len()];
    while let Some(n) = work.pop_front() {
        queued[n] = false;
        for &ei in &g.out[n] {
            let e = &g.edges[ei as usize];
            let to = e.to as usize;
            let mapped: Vec<u32> = negative[n]
                .iter()
                .filter_map(|l| e.data.renaming.get(*l as usize).copied())
                .filter(|l| *l != u32::MAX)
                .collect();
            let mut grew = false;
            for l in mapped {
                grew |= negative[to].insert(l);
            }
            if grew && !queued[to] {
                queued[to] = true;
                work.push_back(to);
            }
        }
    }
    for (n, (pos, _)) in inst.iter().enumerate() {
        if pos.keys().any(|l| negative[n].contains(l)) {
            report.positive_after_negative.push(n as u32);
        }
    }
    report
}

/// Graphviz rendering; simulation steps are drawn bold and red.
pub fn to_dot<N, E>(g: &Graph<N, E>, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", title.replace('"', "'"));
    let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
    for n in 0..g.len() {
        let mut label = n.to_string();
        if g.success[n] {
            label.push_str(" ✓");
        }
        if !g.barbs[n].is_empty() {
            let bs: Vec<&str> = g.barbs[n].iter().map(|b| b.as_str()).collect();
            let _ = write!(label, "\\n{{{}}}", bs.join(","));
        }
        let shape = if n == 0 { ", shape=doublecircle" } else { "" };
        let _ = writeln!(out, "  n{n} [label=\"{label}\"{shape}];");
    }
    for e in &g.edges {
        let style = match e.class {
            StepClass::Sim(_) => " [color=red, penwidth=2.5, label=\"sim\"]",
            StepClass::Aux => " [color=gray50]",
            StepClass::Source => "",
        };
        let _ = writeln!(out, "  n{} -> n{}{style};", e.from, e.to);
    }
    out.push_str("}\n");
    out
}
