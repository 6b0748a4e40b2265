use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use csp2ccs::corpus::{self, CorpusTerm};
use csp2ccs::criteria::{Analysis, ClaimedResult, CriteriaReport, Criterion, CriterionResult, GraphStats};
use csp2ccs::equivalence::{coupled_sim_check, weak_bisim_check, Outcome};
use csp2ccs::explore::{self, build_source_graph, Budget, Verdict};
use csp2ccs::{encode, parse_source, parse_target, print_source, print_target, Coordinator, Proc};
use serde::Serialize;

use crate::output::{exit_status, write_atomic, write_json, Failure};
use crate::{Cli, Command, Input, Shared};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    Bisim,
    Coupled,
    Criterion(Criterion),
}

impl Check {
    fn key(self) -> &'static str {
        match self {
            Check::Bisim => "bisim",
            Check::Coupled => "coupled",
            Check::Criterion(c) => c.key(),
        }
    }

    fn claimed(self, coordinator: Coordinator) -> bool {
        match self {
            Check::Bisim => coordinator == Coordinator::Central,
            Check::Coupled => true,
            Check::Criterion(c) => c.claimed(coordinator),
        }
    }
}

fn claimed_checks(coordinator: Coordinator) -> Vec<Check> {
    Criterion::ALL.into_iter().filter(|c| c.claimed(coordinator)).map(Check::Criterion).collect()
}

fn resolve_checks(names: &[String], coordinator: Coordinator) -> Result<Vec<Check>, Failure> {
    if names.is_empty() {
        return Ok(claimed_checks(coordinator));
    }
    let mut out = Vec::new();
    for name in names {
        let more = match name.as_str() {
            "bisim" => vec![Check::Bisim],
            "coupled" => vec![Check::Coupled],
            "claimed" => claimed_checks(coordinator),
            "all" => [Check::Bisim, Check::Coupled].into_iter().chain(Criterion::ALL.map(Check::Criterion)).collect(),
            key => match Criterion::from_key(key) {
                Some(c) => vec![Check::Criterion(c)],
                None => {
                    let keys: Vec<&str> = Criterion::ALL.iter().map(|c| c.key()).collect();
                    return Err(Failure::input(format!(
                        "unknown check `{key}`; expected bisim, coupled, claimed, all or one of {}",
                        keys.join(", ")
                    )));
                }
            },
        };
        for c in more {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

fn equivalence_result(o: Outcome) -> CriterionResult {
    CriterionResult {
        result: o.result,
        witness: Some(serde_json::to_value(&o.witness).expect("witnesses serialize")),
        stats: BTreeMap::new(),
    }
}

fn run_check(a: &Analysis, check: Check) -> Result<ClaimedResult, Failure> {
    let result = match check {
        Check::Bisim => equivalence_result(weak_bisim_check(a.source_lts(), a.target_lts(), 0, 0)),
        Check::Coupled => equivalence_result(coupled_sim_check(a.source_lts(), a.target_lts(), 0, 0)),
        Check::Criterion(c) => a.check(c).map_err(Failure::input)?,
    };
    Ok(ClaimedResult { claimed: check.claimed(a.coordinator), result })
}

fn analyse(term: &Proc, coordinator: Coordinator, budget: Budget, checks: &[Check]) -> Result<(Analysis, CriteriaReport), Failure> {
    let a = Analysis::new(term, coordinator, budget).map_err(Failure::input)?;
    let mut criteria = BTreeMap::new();
    for &c in checks {
        criteria.insert(c.key(), run_check(&a, c)?);
    }
    let report = CriteriaReport {
        schema: "v1",
        term: print_source(term),
        coordinator,
        criteria,
        graph: a.graph_stats(),
    };
    Ok((a, report))
}

fn read_input(input: &Input) -> Result<String, Failure> {
    match (&input.term, &input.file) {
        (_, Some(path)) => std::fs::read_to_string(path).map_err(|e| Failure::io(path, e)),
        (Some(t), None) if t == "-" => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::io(Path::new("<stdin>"), e))?;
            Ok(text)
        }
        (Some(t), None) => Ok(t.clone()),
        (None, None) => Err(Failure::input("no term given")),
    }
}

fn read_source(input: &Input) -> Result<Proc, Failure> {
    parse_source(&read_input(input)?).map_err(Failure::input)
}

fn reject(flag: &str, set: bool, command: &str) -> Result<(), Failure> {
    if set {
        return Err(Failure::input(format!("--{flag} is not supported by `{command}`")));
    }
    Ok(())
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::True => "true",
        Verdict::False => "false",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn coordinator_name(c: Coordinator) -> &'static str {
    match c {
        Coordinator::Central => "central",
        Coordinator::Decentral => "decentral",
    }
}

fn print_report(r: &CriteriaReport) {
    let g = &r.graph;
    println!("{}  [{}]", r.term, coordinator_name(r.coordinator));
    println!(
        "  graph: {} nodes, {} edges ({} simulation){}",
        g.nodes,
        g.edges,
        g.sim_edges,
        if g.truncated { ", truncated" } else { "" }
    );
    for (key, c) in &r.criteria {
        let note = if c.claimed { "" } else { "  (not claimed)" };
        println!("  {key:<30} {}{note}", verdict_text(c.result.result));
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ExploreReport {
    schema: &'static str,
    term: String,
    coordinator: Coordinator,
    graph: GraphStats,
    diverges: bool,
}

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    let shared = &cli.shared;
    let coordinator = shared.coordinator.map(Coordinator::from).unwrap_or(Coordinator::Central);
    let budget = Budget::states(shared.budget);
    if !matches!(cli.command, Command::Corpus { .. }) {
        reject("seed-corpus", shared.seed_corpus.is_some(), command_name(&cli.command))?;
    }
    match &cli.command {
        Command::Parse { input, target } => {
            reject("dot", shared.dot.is_some(), "parse")?;
            reject("report", shared.report.is_some(), "parse")?;
            let text = read_input(input)?;
            if *target {
                println!("{}", print_target(&parse_target(&text).map_err(Failure::input)?));
            } else {
                println!("{}", print_source(&*parse_source(&text).map_err(Failure::input)?));
            }
            Ok(0)
        }
        Command::Encode { input } => {
            reject("dot", shared.dot.is_some(), "encode")?;
            reject("report", shared.report.is_some(), "encode")?;
            let p = read_source(input)?;
            println!("{}", print_target(&encode(&p, coordinator).map_err(Failure::input)?));
            Ok(0)
        }
        Command::Explore { input, source } => explore_command(shared, input, *source, coordinator, budget),
        Command::Check { input, checks } => {
            let p = read_source(input)?;
            let checks = resolve_checks(checks, coordinator)?;
            let (a, report) = analyse(&p, coordinator, budget, &checks)?;
            print_report(&report);
            if let Some(path) = &shared.dot {
                write_atomic(path, explore::to_dot(&a.target.graph, &report.term).as_bytes())?;
            }
            if let Some(path) = &shared.report {
                write_json(path, &report)?;
            }
            Ok(exit_status(report.criteria.values().map(|c| c.result.result)))
        }
        Command::Corpus { checks } => corpus_command(shared, checks, budget),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse { .. } => "parse",
        Command::Encode { .. } => "encode",
        Command::Explore { .. } => "explore",
        Command::Check { .. } => "check",
        Command::Corpus { .. } => "corpus",
    }
}

fn explore_command(shared: &Shared, input: &Input, source: bool, coordinator: Coordinator, budget: Budget) -> Result<u8, Failure> {
    let p = read_source(input)?;
    let term = print_source(&p);
    if source {
        reject("report", shared.report.is_some(), "explore --source")?;
        let g = build_source_graph(&p, budget);
        println!("nodes: {}", g.len());
        println!("edges: {}", g.edges.len());
        println!("truncated: {}", g.truncated);
        println!("diverges: {}", g.lts().diverges_from(0));
        if let Some(path) = &shared.dot {
            write_atomic(path, explore::to_dot(&g, &term).as_bytes())?;
        }
        return Ok(0);
    }
    let a = Analysis::new(&p, coordinator, budget).map_err(Failure::input)?;
    let stats = a.graph_stats();
    let diverges = a.target_lts().diverges_from(0);
    println!("nodes: {}", stats.nodes);
    println!("edges: {}", stats.edges);
    println!("simulation edges: {}", stats.sim_edges);
    println!("truncated: {}", stats.truncated);
    println!("unresolved announcements: {}", stats.unresolved);
    println!("lock violations: {}", stats.lock_violations);
    println!("auxiliary-only cycles: {}", stats.aux_only_cycles);
    println!("diverges: {diverges}");
    if let Some(path) = &shared.dot {
        write_atomic(path, explore::to_dot(&a.target.graph, &term).as_bytes())?;
    }
    if let Some(path) = &shared.report {
        write_json(path, &ExploreReport { schema: "v1", term, coordinator, graph: stats, diverges })?;
    }
    Ok(0)
}

fn corpus_command(shared: &Shared, checks: &[String], budget: Budget) -> Result<u8, Failure> {
    reject("dot", shared.dot.is_some(), "corpus")?;
    let terms: Vec<CorpusTerm> = match &shared.seed_corpus {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            corpus::load(&text).map_err(Failure::input)?
        }
        None => corpus::builtin(),
    };
    let coordinators = match shared.coordinator {
        Some(c) => vec![c.into()],
        None => vec![Coordinator::Central, Coordinator::Decentral],
    };
    let mut jobs = Vec::new();
    for t in &terms {
        let p = t.process().map_err(Failure::input)?;
        for &c in &coordinators {
            jobs.push((t.id.as_str(), p.clone(), c, resolve_checks(checks, c)?));
        }
    }
    let results: Mutex<Vec<Option<Result<CriteriaReport, Failure>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((_, p, c, checks)) = jobs.get(i) else { break };
                let r = analyse(p, *c, budget, checks).map(|(_, r)| r);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    let mut reports = Vec::new();
    for ((id, ..), r) in jobs.iter().zip(results.into_inner().unwrap()) {
        let r = r.expect("every job ran")?;
        let mut verdicts: Vec<String> = Vec::new();
        for (key, c) in &r.criteria {
            if c.result.result != Verdict::True {
                verdicts.push(format!("{key}={}", verdict_text(c.result.result)));
            }
        }
        let summary = if verdicts.is_empty() { "all true".to_string() } else { verdicts.join(" ") };
        println!("{id:<20} {:<10} {summary}", coordinator_name(r.coordinator));
        reports.push(r);
    }
    if let Some(path) = &shared.report {
        write_json(path, &reports)?;
    }
    Ok(exit_status(reports.iter().flat_map(|r| r.criteria.values().map(|c| c.result.result))))
}
