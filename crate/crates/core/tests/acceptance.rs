//! End-to-end acceptance run over the built-in corpus. Prints one PASS/FAIL
//! line per criterion and exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{SourceGen, TargetGen};
use csp2ccs::ccs::CanonOptions;
use csp2ccs::corpus;
use csp2ccs::criteria::{self, Analysis, Criterion};
use csp2ccs::equivalence::{coupled_sim_check, weak_bisim_check};
use csp2ccs::explore::{aux_only_cycles, build_target_graph_with, check_lock_invariants, Budget, Verdict};
use csp2ccs::{canonicalize, encode, parse_source, Coordinator, Name, Proc};

type Check = Result<(), String>;
type Named<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

struct Entry {
    id: String,
    term: Proc,
    central: Analysis,
    decentral: Analysis,
    built: Duration,
}

impl Entry {
    fn both(&self) -> [&Analysis; 2] {
        [&self.central, &self.decentral]
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn expect(a: &Analysis, id: &str, c: Criterion, want: Verdict) -> Check {
    let r = a.check(c).map_err(|e| format!("{id}: {e}"))?;
    ensure(r.result == want, || {
        format!("{id} ({:?}) {}: {:?}, witness {:?}", a.coordinator, c.key(), r.result, r.witness)
    })
}

fn load() -> Vec<Entry> {
    corpus::builtin()
        .into_iter()
        .map(|t| {
            let start = Instant::now();
            let term = t.process().expect("corpus term parses");
            let central = Analysis::new(&term, Coordinator::Central, Budget::default()).expect("central analysis");
            let decentral = Analysis::new(&term, Coordinator::Decentral, Budget::default()).expect("decentral analysis");
            Entry { id: t.id, term, central, decentral, built: start.elapsed() / 2 }
        })
        .collect()
}

fn central_bisimilarity(corpus: &[Entry]) -> Check {
    ensure(corpus.len() >= 10, || format!("corpus has {} terms", corpus.len()))?;
    for e in corpus {
        let start = Instant::now();
        let a = &e.central;
        let out = weak_bisim_check(a.source_lts(), a.target_lts(), 0, 0);
        ensure(out.result == Verdict::True, || format!("{}: {:?} {:?}", e.id, out.result, out.witness))?;
        let took = start.elapsed() + e.built;
        ensure(took < Duration::from_secs(60), || format!("{}: took {took:?}", e.id))?;
    }
    Ok(())
}

fn decentral_coupled_similarity(corpus: &[Entry]) -> Check {
    for e in corpus {
        let start = Instant::now();
        let a = &e.decentral;
        let out = coupled_sim_check(a.source_lts(), a.target_lts(), 0, 0);
        ensure(out.result == Verdict::True, || format!("{}: {:?} {:?}", e.id, out.result, out.witness))?;
        let took = start.elapsed() + e.built;
        ensure(took < Duration::from_secs(60), || format!("{}: took {took:?}", e.id))?;
    }
    Ok(())
}

fn partial_commitment(corpus: &[Entry]) -> Check {
    let e = corpus.iter().find(|e| e.id == "partial-commitment").ok_or("partial-commitment term missing")?;
    let a = &e.decentral;
    let (src, tgt) = (a.source_lts(), a.target_lts());
    let (_, barbs) = tgt.reachable_predicates();
    let reach = tgt.reachable_from(0);
    let want: BTreeSet<Name> = [Name::source("o"), Name::source("q")].into();
    let state = (0..tgt.len()).find(|&t| reach[t] && barbs[t] == want).ok_or("no reachable state with barbs {o, q}")?;
    let src_reach = src.reachable_from(0);
    for s in (0..src.len()).filter(|&s| src_reach[s]) {
        let r = weak_bisim_check(src, tgt, s, state).result;
        ensure(r == Verdict::False, || format!("target state {state} vs source state {s}: {r:?}"))?;
    }
    let r = coupled_sim_check(src, tgt, 0, 0).result;
    ensure(r == Verdict::True, || format!("coupled similarity of the whole pair: {r:?}"))
}

fn correspondence_split(corpus: &[Entry]) -> Check {
    for e in corpus {
        expect(&e.central, &e.id, Criterion::OperationalCorrespondence, Verdict::True)?;
        expect(&e.decentral, &e.id, Criterion::WeakOperationalCorrespondence, Verdict::True)?;
    }
    let e = corpus.iter().find(|e| e.id == "partial-commitment").ok_or("partial-commitment term missing")?;
    let r = e.decentral.check(Criterion::OperationalCorrespondence).map_err(|e| e.to_string())?;
    ensure(r.result == Verdict::False, || format!("strict check on decentral partial-commitment: {:?}", r.result))?;
    let clause = r.witness.as_ref().and_then(|w| w.get("clause")).and_then(|c| c.as_str());
    ensure(clause == Some("sound"), || format!("expected a soundness witness, got {:?}", r.witness))
}

fn lock_invariants(corpus: &[Entry]) -> Check {
    for e in corpus {
        for a in e.both() {
            let r = check_lock_invariants(&a.target);
            ensure(r.violations() == 0, || format!("{} ({:?}): {r:?}", e.id, a.coordinator))?;
        }
    }
    Ok(())
}

fn divergence(corpus: &[Entry]) -> Check {
    for e in corpus {
        for a in e.both() {
            expect(a, &e.id, Criterion::DivergenceReflection, Verdict::True)?;
            let cycles = aux_only_cycles(&a.target);
            ensure(cycles.is_empty(), || format!("{} ({:?}): aux-only cycle through {cycles:?}", e.id, a.coordinator))?;
        }
    }
    Ok(())
}

fn observables(corpus: &[Entry]) -> Check {
    for e in corpus {
        for a in e.both() {
            expect(a, &e.id, Criterion::SuccessSensitivity, Verdict::True)?;
            expect(a, &e.id, Criterion::BarbRespect, Verdict::True)?;
        }
        let (source, target) = criteria::static_barbs_in(&e.term, &e.central.target);
        ensure(source == target, || format!("{}: static barbs {source:?} vs {target:?}", e.id))?;
    }
    Ok(())
}

fn name_invariance(corpus: &[Entry]) -> Check {
    for e in corpus {
        let sigmas = criteria::standard_renamings(&e.term);
        ensure(sigmas.len() == 3, || format!("{}: {} renamings", e.id, sigmas.len()))?;
        for coord in [Coordinator::Central, Coordinator::Decentral] {
            for sigma in &sigmas {
                let r = criteria::check_name_invariance(&e.term, coord, sigma).map_err(|x| x.to_string())?;
                ensure(r.result == Verdict::True, || format!("{} ({coord:?}): {:?}", e.id, r.witness))?;
            }
        }
    }
    Ok(())
}

fn distributability(corpus: &[Entry]) -> Check {
    for e in corpus {
        expect(&e.decentral, &e.id, Criterion::Distributability, Verdict::True)?;
    }
    let pair = parse_source("a -> STOP |[]| b -> STOP").unwrap();
    let e = corpus.iter().find(|e| e.term == pair).ok_or("a -> STOP |[]| b -> STOP missing from corpus")?;
    let pairs = criteria::distributable_pairs(&e.decentral.source);
    ensure(!pairs.is_empty(), || "no distributable pair found".into())?;
    expect(&e.central, &e.id, Criterion::Distributability, Verdict::False)
}

fn canonicaliser_safety() -> Check {
    for seed in 0..1000 {
        let t = TargetGen::new(seed).term(5);
        let once = canonicalize(&t);
        ensure(canonicalize(&once.to_process()) == once, || format!("not idempotent on seed {seed}"))?;
    }
    let mut compared = 0;
    let mut seed = 0;
    while compared < 20 {
        seed += 1;
        ensure(seed < 500, || format!("only {compared} usable random terms"))?;
        let p = SourceGen::new(seed).term(3);
        let coord = if seed % 2 == 0 { Coordinator::Central } else { Coordinator::Decentral };
        let t = encode(&p, coord).map_err(|e| e.to_string())?;
        let budget = Budget::states(1200);
        let pruned = build_target_graph_with(&t, coord, budget, CanonOptions { prune: true }).map_err(|e| e.to_string())?;
        let full = build_target_graph_with(&t, coord, budget, CanonOptions { prune: false }).map_err(|e| e.to_string())?;
        if pruned.graph.truncated || full.graph.truncated || full.graph.len() < 3 {
            continue;
        }
        let (g1, g2) = (pruned.graph.lts(), full.graph.lts());
        let r = weak_bisim_check(&g1, &g2, 0, 0).result;
        ensure(r == Verdict::True, || format!("seed {seed}: pruned vs unpruned {r:?}"))?;
        let (s1, b1) = g1.reachable_predicates();
        let (s2, b2) = g2.reachable_predicates();
        ensure(s1[0] == s2[0] && b1[0] == b2[0], || format!("seed {seed}: root predicates differ"))?;
        compared += 1;
    }
    Ok(())
}

fn main() {
    let corpus = load();
    let checks: Vec<Named> = vec![
        ("central encoding is weakly bisimilar", Box::new(|| central_bisimilarity(&corpus))),
        ("decentral encoding is coupled similar", Box::new(|| decentral_coupled_similarity(&corpus))),
        ("partial commitment witness", Box::new(|| partial_commitment(&corpus))),
        ("strict vs weak operational correspondence", Box::new(|| correspondence_split(&corpus))),
        ("lock invariants", Box::new(|| lock_invariants(&corpus))),
        ("divergence reflection", Box::new(|| divergence(&corpus))),
        ("success sensitivity and barb respect", Box::new(|| observables(&corpus))),
        ("name invariance", Box::new(|| name_invariance(&corpus))),
        ("distributability", Box::new(|| distributability(&corpus))),
        ("canonicaliser and pruning safety", Box::new(canonicaliser_safety)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("criterion {:>2} {name}: PASS ({:.1?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
