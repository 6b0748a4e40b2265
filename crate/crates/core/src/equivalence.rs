//! Weak reduction bisimilarity and coupled similarity between two finite
//! reduction graphs, sensitive to reachable success and reachable barbs.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::explore::{Lts, Verdict};
use crate::name::Name;

/// What a single observation-or-step clause found lacking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Clause {
    Success { left: bool, right: bool },
    Barbs { left: BTreeSet<Name>, right: BTreeSet<Name> },
    /// A step of one side that the other side cannot answer weakly.
    Step { side: Side, from: u32, to: u32 },
    /// The coupling requirement of a coupled simulation fails after a step.
    Coupling { side: Side, from: u32, to: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Witness {
    /// Size of the relation that was found and audited.
    Relation { pairs: u64 },
    /// A pair outside every relation, with the clause that removed it.
    Distinguished { left: u32, right: u32, clause: Option<Clause> },
    Truncated { cause: String },
    /// The independent re-check rejected the computed relation.
    AuditFailed { left: u32, right: u32, clause: Clause },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub result: Verdict,
    pub witness: Witness,
}

impl Outcome {
    pub fn holds(&self) -> bool {
        self.result == Verdict::True
    }
}

fn truncation(g1: &Lts, g2: &Lts) -> Option<Outcome> {
    let cause = match (g1.truncated, g2.truncated) {
        (false, false) => return None,
        (true, false) => "left graph truncated",
        (false, true) => "right graph truncated",
        (true, true) => "both graphs truncated",
    };
    Some(Outcome { result: Verdict::Inconclusive, witness: Witness::Truncated { cause: cause.into() } })
}

/// Reachable success and barbs of every node, numbered so that equal
/// observations get equal ids across both graphs.
struct Signatures {
    left: Vec<u32>,
    right: Vec<u32>,
    observed: Vec<(bool, BTreeSet<Name>)>,
}

impl Signatures {
    fn new(g1: &Lts, g2: &Lts) -> Signatures {
        let mut ids: HashMap<(bool, BTreeSet<Name>), u32> = HashMap::new();
        let mut observed = Vec::new();
        let mut number = |g: &Lts| -> Vec<u32> {
            let (s, b) = g.reachable_predicates();
            s.into_iter()
                .zip(b)
                .map(|key| {
                    *ids.entry(key.clone()).or_insert_with(|| {
                        observed.push(key);
                        observed.len() as u32 - 1
                    })
                })
                .collect()
        };
        let left = number(g1);
        let right = number(g2);
        Signatures { left, right, observed }
    }

    /// Whether everything observable of `x` is observable of `y`.
    fn covered(&self, x: u32, y: u32) -> bool {
        let (sx, bx) = &self.observed[x as usize];
        let (sy, by) = &self.observed[y as usize];
        (!sx || *sy) && bx.is_subset(by)
    }

    /// Coupled simulations compare observations by inclusion, the simulating
    /// side reaching at least what the simulated side reaches.
    fn inclusion_clause(&self, side: Side, p: usize, q: usize) -> Option<Clause> {
        let (x, y) = match side {
            Side::Left => (self.left[p], self.right[q]),
            Side::Right => (self.right[q], self.left[p]),
        };
        if self.covered(x, y) {
            None
        } else {
            self.clause(p, q)
        }
    }

    fn clause(&self, p: usize, q: usize) -> Option<Clause> {
        let (sp, bp) = &self.observed[self.left[p] as usize];
        let (sq, bq) = &self.observed[self.right[q] as usize];
        if sp != sq {
            Some(Clause::Success { left: *sp, right: *sq })
        } else if bp != bq {
            Some(Clause::Barbs { left: bp.clone(), right: bq.clone() })
        } else {
            None
        }
    }
}

/// Weak bisimilarity classes of the disjoint union of two graphs.
///
/// Mutually reachable states are weakly bisimilar in a reduction system, so
/// refinement runs on strongly connected components: a component's key is
/// its current class together with the set of classes it reaches weakly, and
/// classes are split by key until their number stops growing.
pub struct BisimClasses {
    offset: usize,
    class: Vec<u32>,
    pub rounds: usize,
}

impl BisimClasses {
    pub fn new(g1: &Lts, g2: &Lts) -> BisimClasses {
        let sigs = Signatures::new(g1, g2);
        let u = g1.union(g2);
        let comps = u.sccs();
        let mut comp_of = vec![0u32; u.len()];
        for (c, nodes) in comps.iter().enumerate() {
            for n in nodes {
                comp_of[*n as usize] = c as u32;
            }
        }
        let comp_succ: Vec<Vec<u32>> = comps
            .iter()
            .enumerate()
            .map(|(c, nodes)| {
                let mut s: Vec<u32> = nodes
                    .iter()
                    .flat_map(|n| u.succ[*n as usize].iter().map(|m| comp_of[*m as usize]))
                    .filter(|d| *d as usize != c)
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let sig_of = |n: usize| if n < g1.len() { sigs.left[n] } else { sigs.right[n - g1.len()] };
        let mut class: Vec<u32> = comps.iter().map(|nodes| sig_of(nodes[0] as usize)).collect();
        let mut count = sigs.observed.len();
        let mut rounds = 0;
        loop {
            rounds += 1;
            // successors come before their predecessors in `comps`
            let mut reach: Vec<Vec<u32>> = Vec::with_capacity(comps.len());
            for c in 0..comps.len() {
                let mut w = vec![class[c]];
                for d in &comp_succ[c] {
                    w.extend_from_slice(&reach[*d as usize]);
                }
                w.sort_unstable();
                w.dedup();
                reach.push(w);
            }
            let mut keys: HashMap<(u32, &[u32]), u32> = HashMap::new();
            let next: Vec<u32> = (0..comps.len())
                .map(|c| {
                    let n = keys.len() as u32;
                    *keys.entry((class[c], &reach[c])).or_insert(n)
                })
                .collect();
            let grown = keys.len() > count;
            count = keys.len();
            class = next;
            if !grown {
                break;
            }
        }
        let class = (0..u.len()).map(|n| class[comp_of[n] as usize]).collect();
        BisimClasses { offset: g1.len(), class, rounds }
    }

    pub fn left_class(&self, p: usize) -> u32 {
        self.class[p]
    }

    pub fn right_class(&self, q: usize) -> u32 {
        self.class[self.offset + q]
    }

    pub fn related(&self, p: usize, q: usize) -> bool {
        self.left_class(p) == self.right_class(q)
    }
}

/// Classes weakly reachable from every node, by forward propagation to a
/// fixpoint (deliberately not sharing code with the component-based
/// refinement).
fn weak_class_sets(g: &Lts, class: impl Fn(usize) -> u32, classes: usize) -> Vec<FixedBitSet> {
    let mut sets: Vec<FixedBitSet> = (0..g.len())
        .map(|n| {
            let mut s = FixedBitSet::with_capacity(classes);
            s.insert(class(n) as usize);
            s
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for n in (0..g.len()).rev() {
            for m in &g.succ[n] {
                let m = *m as usize;
                if m == n || sets[m].is_subset(&sets[n]) {
                    continue;
                }
                let add = sets[m].clone();
                sets[n].union_with(&add);
                changed = true;
            }
        }
    }
    sets
}

/// Re-checks that "same class, both reachable from the roots" is a weak
/// bisimulation satisfying the observation clauses.
fn audit_bisim(g1: &Lts, g2: &Lts, s1: usize, s2: usize, bc: &BisimClasses) -> Result<u64, (u32, u32, Clause)> {
    let sigs = Signatures::new(g1, g2);
    let classes = bc.class.iter().max().map_or(0, |m| *m as usize + 1);
    let w1 = weak_class_sets(g1, |n| bc.left_class(n), classes);
    let w2 = weak_class_sets(g2, |n| bc.right_class(n), classes);
    let r1 = g1.reachable_from(s1);
    let r2 = g2.reachable_from(s2);
    let mut members: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new()); classes];
    for p in (0..g1.len()).filter(|p| r1[*p]) {
        members[bc.left_class(p) as usize].0.push(p);
    }
    for q in (0..g2.len()).filter(|q| r2[*q]) {
        members[bc.right_class(q) as usize].1.push(q);
    }
    let mut pairs = 0u64;
    for (ps, qs) in &members {
        if ps.is_empty() || qs.is_empty() {
            continue;
        }
        pairs += ps.len() as u64 * qs.len() as u64;
        let (p0, q0) = (ps[0], qs[0]);
        for &p in ps {
            if let Some(c) = sigs.clause(p, q0) {
                return Err((p as u32, q0 as u32, c));
            }
        }
        for &q in qs {
            if let Some(c) = sigs.clause(p0, q) {
                return Err((p0 as u32, q as u32, c));
            }
        }
        // every step of every left member answered by every right member
        for &p in ps {
            for &p2 in &g1.succ[p] {
                let needed = bc.left_class(p2 as usize) as usize;
                if let Some(&q) = qs.iter().find(|q| !w2[**q].contains(needed)) {
                    return Err((p as u32, q as u32, Clause::Step { side: Side::Left, from: p as u32, to: p2 }));
                }
            }
        }
        for &q in qs {
            for &q2 in &g2.succ[q] {
                let needed = bc.right_class(q2 as usize) as usize;
                if let Some(&p) = ps.iter().find(|p| !w1[**p].contains(needed)) {
                    return Err((p as u32, q as u32, Clause::Step { side: Side::Right, from: q as u32, to: q2 }));
                }
            }
        }
    }
    Ok(pairs)
}

/// Names the clause separating two differently classed nodes, when a
/// single one does.
fn bisim_distinction(g1: &Lts, g2: &Lts, p: usize, q: usize, bc: &BisimClasses) -> Option<Clause> {
    let sigs = Signatures::new(g1, g2);
    if let Some(c) = sigs.clause(p, q) {
        return Some(c);
    }
    let classes = bc.class.iter().max().map_or(0, |m| *m as usize + 1);
    let reach_classes = |g: &Lts, root: usize, class: &dyn Fn(usize) -> u32| {
        let mut s = FixedBitSet::with_capacity(classes);
        for (n, r) in g.reachable_from(root).into_iter().enumerate() {
            if r {
                s.insert(class(n) as usize);
            }
        }
        s
    };
    let wq = reach_classes(g2, q, &|n| bc.right_class(n));
    if let Some(p2) = g1.succ[p].iter().find(|p2| !wq.contains(bc.left_class(**p2 as usize) as usize)) {
        return Some(Clause::Step { side: Side::Left, from: p as u32, to: *p2 });
    }
    let wp = reach_classes(g1, p, &|n| bc.left_class(n));
    if let Some(q2) = g2.succ[q].iter().find(|q2| !wp.contains(bc.right_class(**q2 as usize) as usize)) {
        return Some(Clause::Step { side: Side::Right, from: q as u32, to: *q2 });
    }
    None
}

/// Whether node `s1` of `g1` and node `s2` of `g2` are weakly bisimilar.
pub fn weak_bisim_check(g1: &Lts, g2: &Lts, s1: usize, s2: usize) -> Outcome {
    if let Some(o) = truncation(g1, g2) {
        return o;
    }
    let bc = BisimClasses::new(g1, g2);
    if !bc.related(s1, s2) {
        let clause = bisim_distinction(g1, g2, s1, s2, &bc);
        return Outcome {
            result: Verdict::False,
            witness: Witness::Distinguished { left: s1 as u32, right: s2 as u32, clause },
        };
    }
    match audit_bisim(g1, g2, s1, s2, &bc) {
        Ok(pairs) => Outcome { result: Verdict::True, witness: Witness::Relation { pairs } },
        Err((left, right, clause)) => {
            Outcome { result: Verdict::Inconclusive, witness: Witness::AuditFailed { left, right, clause } }
        }
    }
}

/// Nodes from which some member of `set` is reachable (reflexively).
fn backward_closure(rev: &[Vec<u32>], set: &FixedBitSet) -> FixedBitSet {
    let mut out = set.clone();
    let mut stack: Vec<usize> = set.ones().collect();
    while let Some(n) = stack.pop() {
        for m in &rev[n] {
            let m = *m as usize;
            if !out.put(m) {
                stack.push(m);
            }
        }
    }
    out
}

fn reverse(g: &Lts) -> Vec<Vec<u32>> {
    let mut rev = vec![Vec::new(); g.len()];
    for (n, ms) in g.succ.iter().enumerate() {
        for m in ms {
            rev[*m as usize].push(n as u32);
        }
    }
    rev
}

/// The greatest coupled simulation over the disjoint union of two graphs,
/// restricted to pairs with one node on each side.
pub struct CoupledRelation {
    /// `lr[p]`: right nodes q with (p, q) in the relation.
    lr: Vec<FixedBitSet>,
    /// `rl[q]`: left nodes p with (q, p) in the relation.
    rl: Vec<FixedBitSet>,
    pub rounds: usize,
}

/// One direction of the functional: pairs (x, y) with x on side `a` and y on
/// side `b`, given the relation in both orientations.
fn coupled_pass(a: &Lts, ab: &[FixedBitSet], ba: &[FixedBitSet], rev_b: &[Vec<u32>], nb: usize) -> Vec<FixedBitSet> {
    // for each node x2 of `a`: the `b` nodes that can weakly reach a partner
    // of x2 in either orientation, intersected
    let answer: Vec<FixedBitSet> = (0..a.len())
        .map(|x2| {
            let forward = backward_closure(rev_b, &ab[x2]);
            let mut coupled = FixedBitSet::with_capacity(nb);
            for (y, row) in ba.iter().enumerate() {
                if row.contains(x2) {
                    coupled.insert(y);
                }
            }
            let mut both = backward_closure(rev_b, &coupled);
            both.intersect_with(&forward);
            both
        })
        .collect();
    (0..a.len())
        .map(|x| {
            let mut row = ab[x].clone();
            for x2 in &a.succ[x] {
                row.intersect_with(&answer[*x2 as usize]);
            }
            row
        })
        .collect()
}

impl CoupledRelation {
    pub fn new(g1: &Lts, g2: &Lts) -> CoupledRelation {
        let sigs = Signatures::new(g1, g2);
        let (n1, n2) = (g1.len(), g2.len());
        let mut lr: Vec<FixedBitSet> = (0..n1)
            .map(|p| {
                let mut row = FixedBitSet::with_capacity(n2);
                row.extend((0..n2).filter(|q| sigs.covered(sigs.left[p], sigs.right[*q])));
                row
            })
            .collect();
        let mut rl: Vec<FixedBitSet> = (0..n2)
            .map(|q| {
                let mut row = FixedBitSet::with_capacity(n1);
                row.extend((0..n1).filter(|p| sigs.covered(sigs.right[q], sigs.left[*p])));
                row
            })
            .collect();
        let rev1 = reverse(g1);
        let rev2 = reverse(g2);
        let mut rounds = 0;
        loop {
            rounds += 1;
            let lr2 = coupled_pass(g1, &lr, &rl, &rev2, n2);
            let rl2 = coupled_pass(g2, &rl, &lr, &rev1, n1);
            if lr2 == lr && rl2 == rl {
                break;
            }
            lr = lr2;
            rl = rl2;
        }
        CoupledRelation { lr, rl, rounds }
    }

    /// (p, q) with p on the left and q on the right.
    pub fn left_right(&self, p: usize, q: usize) -> bool {
        self.lr[p].contains(q)
    }

    /// (q, p) with q on the right and p on the left.
    pub fn right_left(&self, q: usize, p: usize) -> bool {
        self.rl[q].contains(p)
    }

    /// Related in both directions.
    pub fn related(&self, p: usize, q: usize) -> bool {
        self.left_right(p, q) && self.right_left(q, p)
    }
}

/// Nodes that can reach, reflexively, a member of `set`; computed by a
/// forward pass over components rather than a backward search.
fn can_reach(g: &Lts, comps: &[Vec<u32>], set: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(g.len());
    for comp in comps {
        let hit = comp.iter().any(|n| {
            let n = *n as usize;
            set.contains(n) || g.succ[n].iter().any(|m| out.contains(*m as usize))
        });
        if hit {
            for n in comp {
                out.insert(*n as usize);
            }
        }
    }
    out
}

/// Re-checks every clause of a coupled simulation for the pairs reachable
/// from the roots, in both orientations.
#[allow(clippy::needless_range_loop)]
fn audit_coupled(g1: &Lts, g2: &Lts, s1: usize, s2: usize, rel: &CoupledRelation) -> Result<u64, (u32, u32, Clause)> {
    let sigs = Signatures::new(g1, g2);
    let comps1 = g1.sccs();
    let comps2 = g2.sccs();
    let r1 = g1.reachable_from(s1);
    let r2 = g2.reachable_from(s2);
    let (rev1, rev2) = (reverse(g1), reverse(g2));
    let mut pairs = 0u64;
    // left-to-right pairs
    for p2 in 0..g1.len() {
        let mut preds: Vec<usize> = rev1[p2].iter().map(|p| *p as usize).filter(|p| r1[*p]).collect();
        preds.dedup();
        if preds.is_empty() {
            continue;
        }
        let forward = can_reach(g2, &comps2, &rel.lr[p2]);
        let mut partners = FixedBitSet::with_capacity(g2.len());
        partners.extend((0..g2.len()).filter(|q| rel.rl[*q].contains(p2)));
        let coupled = can_reach(g2, &comps2, &partners);
        for p in preds {
            for q in rel.lr[p].ones().filter(|q| r2[*q]) {
                if !forward.contains(q) {
                    return Err((p as u32, q as u32, Clause::Step { side: Side::Left, from: p as u32, to: p2 as u32 }));
                }
                if !coupled.contains(q) {
                    return Err((p as u32, q as u32, Clause::Coupling { side: Side::Left, from: p as u32, to: p2 as u32 }));
                }
            }
        }
    }
    for q2 in 0..g2.len() {
        let mut preds: Vec<usize> = rev2[q2].iter().map(|q| *q as usize).filter(|q| r2[*q]).collect();
        preds.dedup();
        if preds.is_empty() {
            continue;
        }
        let forward = can_reach(g1, &comps1, &rel.rl[q2]);
        let mut partners = FixedBitSet::with_capacity(g1.len());
        partners.extend((0..g1.len()).filter(|p| rel.lr[*p].contains(q2)));
        let coupled = can_reach(g1, &comps1, &partners);
        for q in preds {
            for p in rel.rl[q].ones().filter(|p| r1[*p]) {
                if !forward.contains(p) {
                    return Err((p as u32, q as u32, Clause::Step { side: Side::Right, from: q as u32, to: q2 as u32 }));
                }
                if !coupled.contains(p) {
                    return Err((p as u32, q as u32, Clause::Coupling { side: Side::Right, from: q as u32, to: q2 as u32 }));
                }
            }
        }
    }
    for p in (0..g1.len()).filter(|p| r1[*p]) {
        for q in rel.lr[p].ones().filter(|q| r2[*q]) {
            pairs += 1;
            if let Some(c) = sigs.inclusion_clause(Side::Left, p, q) {
                return Err((p as u32, q as u32, c));
            }
        }
    }
    for q in (0..g2.len()).filter(|q| r2[*q]) {
        for p in rel.rl[q].ones().filter(|p| r1[*p]) {
            pairs += 1;
            if let Some(c) = sigs.inclusion_clause(Side::Right, p, q) {
                return Err((p as u32, q as u32, c));
            }
        }
    }
    Ok(pairs)
}

/// Whether node `s1` of `g1` and node `s2` of `g2` are coupled similar: a
/// coupled simulation must contain both (s1, s2) and (s2, s1). Each pair's
/// observations are compared by inclusion; with equality a state that has
/// partially committed to a choice could not be related to anything.
pub fn coupled_sim_check(g1: &Lts, g2: &Lts, s1: usize, s2: usize) -> Outcome {
    if let Some(o) = truncation(g1, g2) {
        return o;
    }
    let rel = CoupledRelation::new(g1, g2);
    if !rel.related(s1, s2) {
        let sigs = Signatures::new(g1, g2);
        return Outcome {
            result: Verdict::False,
            witness: Witness::Distinguished {
                left: s1 as u32,
                right: s2 as u32,
                clause: sigs.inclusion_clause(Side::Left, s1, s2).or_else(|| sigs.inclusion_clause(Side::Right, s1, s2)),
            },
        };
    }
    match audit_coupled(g1, g2, s1, s2, &rel) {
        Ok(pairs) => Outcome { result: Verdict::True, witness: Witness::Relation { pairs } },
        Err((left, right, clause)) => {
            Outcome { result: Verdict::Inconclusive, witness: Witness::AuditFailed { left, right, clause } }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lts(succ: &[&[u32]], barbs: &[&[&str]]) -> Lts {
        Lts {
            succ: succ.iter().map(|s| s.to_vec()).collect(),
            success: vec![false; succ.len()],
            barbs: barbs.iter().map(|b| b.iter().map(|x| Name::source(x)).collect()).collect(),
            truncated: false,
        }
    }

    fn prefix(a: &str) -> Lts {
        lts(&[&[1], &[]], &[&[a], &[]])
    }

    #[test]
    fn identical_graphs_are_bisimilar() {
        let g = lts(&[&[1, 2], &[0], &[]], &[&[], &["a"], &["b"]]);
        for s in 0..g.len() {
            assert!(weak_bisim_check(&g, &g, s, s).holds());
            assert!(coupled_sim_check(&g, &g, s, s).holds());
        }
    }

    #[test]
    fn different_barbs_distinguish_roots() {
        let o = weak_bisim_check(&prefix("a"), &prefix("b"), 0, 0);
        assert_eq!(o.result, Verdict::False);
        let Witness::Distinguished { clause: Some(Clause::Barbs { left, right }), .. } = o.witness else {
            panic!("{:?}", o.witness)
        };
        assert_eq!(left, [Name::source("a")].into());
        assert_eq!(right, [Name::source("b")].into());
    }

    #[test]
    fn internal_steps_are_invisible() {
        let long = lts(&[&[1], &[2], &[3], &[]], &[&[], &[], &["a"], &[]]);
        let o = weak_bisim_check(&prefix("a"), &long, 0, 0);
        assert!(o.holds(), "{o:?}");
        assert_eq!(o.witness, Witness::Relation { pairs: 4 });
    }

    #[test]
    fn gradual_choice_is_coupled_similar_but_not_bisimilar() {
        // one step choosing among three, against a choice made in two stages
        let flat = lts(&[&[1, 2, 3], &[], &[], &[]], &[&[], &["a"], &["b"], &["c"]]);
        let staged = lts(&[&[1, 2], &[], &[3, 4], &[], &[]], &[&[], &["a"], &[], &["b"], &["c"]]);
        assert_eq!(weak_bisim_check(&flat, &staged, 0, 0).result, Verdict::False);
        let o = coupled_sim_check(&flat, &staged, 0, 0);
        assert!(o.holds(), "{o:?}");
    }

    #[test]
    fn success_is_observed() {
        let mut a = prefix("a");
        let b = prefix("a");
        a.success[1] = true;
        let o = weak_bisim_check(&a, &b, 0, 0);
        assert!(matches!(o.witness, Witness::Distinguished { clause: Some(Clause::Success { .. }), .. }));
        assert_eq!(coupled_sim_check(&a, &b, 0, 0).result, Verdict::False);
    }

    #[test]
    fn truncation_is_inconclusive() {
        let mut g = prefix("a");
        g.truncated = true;
        assert_eq!(weak_bisim_check(&g, &prefix("a"), 0, 0).result, Verdict::Inconclusive);
        assert_eq!(coupled_sim_check(&prefix("a"), &g, 0, 0).result, Verdict::Inconclusive);
    }

    #[test]
    fn unreachable_states_do_not_matter() {
        let g = lts(&[&[1], &[], &[3], &[2]], &[&["a"], &[], &["z"], &[]]);
        assert!(weak_bisim_check(&prefix("a"), &g, 0, 0).holds());
        assert!(coupled_sim_check(&prefix("a"), &g, 0, 0).holds());
    }

    #[test]
    fn divergence_is_not_observed() {
        let looping = lts(&[&[0, 1], &[]], &[&["a"], &[]]);
        assert!(weak_bisim_check(&prefix("a"), &looping, 0, 0).holds());
    }
}
