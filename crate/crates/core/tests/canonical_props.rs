mod common;

use std::collections::{BTreeSet, HashMap, VecDeque};

use common::{SourceGen, TargetGen};
use csp2ccs::ccs::{self, AtomKind, CName, CanonOptions};
use csp2ccs::equivalence::weak_bisim_check;
use csp2ccs::explore::{build_target_graph_with, Budget, Lts, Verdict};
use csp2ccs::{canonicalize, encode, Coordinator, target_reductions, CanonicalState, Name, TargetProcess};
use proptest::prelude::*;

fn n(s: &str) -> Name {
    Name::from_target_spelling(s)
}

fn gen(seed: u64, depth: u32) -> TargetProcess {
    TargetGen::new(seed).term(depth)
}

/// Reduction graph with strong free-output barbs, explored up to `cap` states.
fn raw_lts(t: &TargetProcess, opts: CanonOptions, cap: usize) -> Lts {
    let mut index: HashMap<CanonicalState, u32> = HashMap::new();
    let mut states = Vec::new();
    let mut queue = VecDeque::new();
    let root = ccs::canonicalize_with(t, opts);
    index.insert(root.clone(), 0);
    states.push(root);
    queue.push_back(0u32);
    let mut lts = Lts::default();
    while let Some(i) = queue.pop_front() {
        let s = states[i as usize].clone();
        let mut succ = Vec::new();
        for r in ccs::target_reductions_with(&s, opts).unwrap() {
            let j = match index.get(&r.target) {
                Some(&j) => j,
                None if states.len() >= cap => {
                    lts.truncated = true;
                    continue;
                }
                None => {
                    let j = states.len() as u32;
                    index.insert(r.target.clone(), j);
                    states.push(r.target);
                    queue.push_back(j);
                    j
                }
            };
            succ.push(j);
        }
        lts.succ.resize(states.len(), Vec::new());
        lts.succ[i as usize] = succ;
    }
    lts.succ.resize(states.len(), Vec::new());
    for s in &states {
        lts.success.push(ccs::target_has_success(s));
        let barbs: BTreeSet<Name> = s
            .atoms()
            .iter()
            .filter(|a| a.kind() == AtomKind::Output)
            .filter_map(|a| match a.subject() {
                Some(CName::Free(x)) => Some(x),
                _ => None,
            })
            .collect();
        lts.barbs.push(barbs);
    }
    lts
}

proptest! {
    #![proptest_config(common::config(1000))]

    #[test]
    fn canonical_form_is_idempotent(seed in any::<u64>()) {
        let t = gen(seed, 5);
        let once = canonicalize(&t);
        let twice = canonicalize(&once.to_process());
        prop_assert_eq!(once, twice);
    }
}

proptest! {
    #![proptest_config(common::config(300))]

    #[test]
    fn structural_congruence_is_respected(seed in any::<u64>()) {
        let p = gen(seed, 4);
        let q = gen(seed.wrapping_add(1), 4);
        let c = canonicalize(&p);
        prop_assert_eq!(&canonicalize(&TargetProcess::par(p.clone(), TargetProcess::Nil)), &c);
        prop_assert_eq!(&canonicalize(&TargetProcess::matching(n("f0"), n("f0"), p.clone())), &c);
        prop_assert_eq!(
            canonicalize(&TargetProcess::par(p.clone(), q.clone())),
            canonicalize(&TargetProcess::par(q.clone(), p.clone()))
        );
        // (nu z) P | Q == (nu z)(P | Q) when z is not free in Q.
        let z = n("zz");
        let body = p.rename_free(&|x| if x == n("f1") { z } else { x });
        prop_assert_eq!(
            canonicalize(&TargetProcess::par(TargetProcess::res(vec![z], body.clone()), q.clone())),
            canonicalize(&TargetProcess::res(vec![z], TargetProcess::par(body.clone(), q.clone())))
        );
        // Alpha-renaming of a restricted name.
        let w = n("ww");
        let renamed = body.rename_free(&|x| if x == z { w } else { x });
        prop_assert_eq!(
            canonicalize(&TargetProcess::res(vec![z], body)),
            canonicalize(&TargetProcess::res(vec![w], renamed))
        );
    }

    #[test]
    fn reducts_are_canonical_and_keep_free_names(seed in any::<u64>()) {
        let s = canonicalize(&gen(seed, 5));
        let free = s.free_names();
        for r in target_reductions(&s).unwrap() {
            prop_assert_eq!(&canonicalize(&r.target.to_process()), &r.target);
            prop_assert!(r.target.free_names().is_subset(&free));
        }
    }
}

proptest! {
    #![proptest_config(common::config(40))]

    #[test]
    fn pruning_preserves_weak_behaviour_of_raw_terms(seed in any::<u64>()) {
        let t = gen(seed, 4);
        let pruned = raw_lts(&t, CanonOptions { prune: true }, 300);
        let full = raw_lts(&t, CanonOptions { prune: false }, 300);
        prop_assume!(!pruned.truncated && !full.truncated);
        let out = weak_bisim_check(&pruned, &full, 0, 0);
        prop_assert_eq!(out.result, Verdict::True, "{:?}", out.witness);
    }
}

proptest! {
    #![proptest_config(common::config(20))]

    #[test]
    fn pruning_preserves_weak_behaviour_of_encodings(seed in any::<u64>(), central in any::<bool>()) {
        let p = SourceGen::new(seed).term(3);
        let coord = if central { Coordinator::Central } else { Coordinator::Decentral };
        let t = encode(&p, coord).unwrap();
        let budget = Budget::states(1200);
        let pruned = build_target_graph_with(&t, coord, budget, CanonOptions { prune: true }).unwrap();
        let full = build_target_graph_with(&t, coord, budget, CanonOptions { prune: false }).unwrap();
        prop_assume!(!pruned.graph.truncated && !full.graph.truncated);
        let out = weak_bisim_check(&pruned.graph.lts(), &full.graph.lts(), 0, 0);
        prop_assert_eq!(out.result, Verdict::True, "{:?}", out.witness);
    }
}
