use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use csp2ccs::corpus;
use csp2ccs::criteria::Analysis;
use csp2ccs::equivalence::{coupled_sim_check, weak_bisim_check};
use csp2ccs::explore::{build_target_graph, Budget};
use csp2ccs::{canonicalize, encode, parse_source, Coordinator};

fn exploration(c: &mut Criterion) {
    let mut group = c.benchmark_group("explore");
    group.sample_size(10);
    for (id, text) in [
        ("interleave", "a -> STOP |[]| b -> STOP"),
        ("hidden-sync", "(a -> b -> STOP |[a]| a -> STOP) / a"),
        ("partial-commitment", corpus::PARTIAL_COMMITMENT),
    ] {
        let p = parse_source(text).unwrap();
        for coord in [Coordinator::Central, Coordinator::Decentral] {
            let t = encode(&p, coord).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("{coord:?}"), id), &t, |b, t| {
                b.iter(|| build_target_graph(t, coord, Budget::default()).unwrap())
            });
        }
    }
    group.finish();
}

fn canonical_form(c: &mut Criterion) {
    let p = parse_source(corpus::PARTIAL_COMMITMENT).unwrap();
    let t = encode(&p, Coordinator::Decentral).unwrap();
    c.bench_function("canonicalize/partial-commitment", |b| b.iter(|| canonicalize(&t)));
}

fn equivalences(c: &mut Criterion) {
    let p = parse_source(corpus::PARTIAL_COMMITMENT).unwrap();
    let a = Analysis::new(&p, Coordinator::Decentral, Budget::default()).unwrap();
    let mut group = c.benchmark_group("equivalence");
    group.sample_size(10);
    group.bench_function("bisim/partial-commitment", |b| {
        b.iter(|| weak_bisim_check(a.source_lts(), a.target_lts(), 0, 0))
    });
    group.bench_function("coupled/partial-commitment", |b| {
        b.iter(|| coupled_sim_check(a.source_lts(), a.target_lts(), 0, 0))
    });
    group.finish();
}

criterion_group!(benches, exploration, canonical_form, equivalences);
criterion_main!(benches);
