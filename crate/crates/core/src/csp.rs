//! The CSP dialect: syntax, labelled operational semantics, barbs, success
//! and maximal distribution into parallel components.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::name::Name;

pub type Proc = Arc<SourceProcess>;

/// A finite renaming with explicit domain; identity outside the domain.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Renaming(BTreeMap<Name, Name>);

impl Renaming {
    pub fn new(pairs: impl IntoIterator<Item = (Name, Name)>) -> Self {
        Renaming(pairs.into_iter().collect())
    }

    pub fn apply(&self, n: Name) -> Name {
        self.0.get(&n).copied().unwrap_or(n)
    }

    pub fn domain(&self) -> impl Iterator<Item = Name> + '_ {
        self.0.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Name, Name)> + '_ {
        self.0.iter().map(|(a, b)| (*a, *b))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceProcess {
    Stop,
    Div,
    Success,
    Var(Name),
    Mu(Name, Proc),
    /// External choice over action prefixes; never empty.
    ExtSum(Vec<(Name, Proc)>),
    IntChoice(Proc, Proc),
    Par(Proc, Proc, BTreeSet<Name>),
    Conceal(Proc, Name),
    Rename(Proc, Renaming),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceLabel {
    Tau,
    Act(Name),
}

impl SourceLabel {
    pub fn name(self) -> Option<Name> {
        match self {
            SourceLabel::Tau => None,
            SourceLabel::Act(a) => Some(a),
        }
    }
}

impl fmt::Display for SourceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceLabel::Tau => f.write_str("tau"),
            SourceLabel::Act(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CspError {
    #[error("external choice with no branches")]
    EmptySum,
    #[error("process variable `{0}` is not bound by an enclosing mu")]
    UnboundVariable(Name),
}

/// Position of a subterm, as the list of child indices from the root.
pub type Position = Vec<u16>;

/// The syntactic resource a step uses. Two steps are in conflict when they
/// share a resource: the same external choice, or the same internal choice,
/// recursion or divergence operator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Sum(Position),
    Operator(Position),
}

/// How a step came about; tau steps produced by concealing an action are
/// simulated by announcements, the others by the operator machinery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Prefix,
    Operator,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Transition {
    pub label: SourceLabel,
    pub target: SourceProcess,
    pub origin: Origin,
    pub resources: BTreeSet<Resource>,
}

pub fn stop() -> Proc {
    Arc::new(SourceProcess::Stop)
}

pub fn prefix(a: Name, cont: Proc) -> Proc {
    Arc::new(SourceProcess::ExtSum(vec![(a, cont)]))
}

/// Checks the well-formedness conditions that the semantics relies on.
pub fn validate(p: &SourceProcess) -> Result<(), CspError> {
    fn go(p: &SourceProcess, bound: &mut Vec<Name>) -> Result<(), CspError> {
        match p {
            SourceProcess::Stop | SourceProcess::Div | SourceProcess::Success => Ok(()),
            SourceProcess::Var(x) => {
                if bound.contains(x) {
                    Ok(())
                } else {
                    Err(CspError::UnboundVariable(*x))
                }
            }
            SourceProcess::Mu(x, body) => {
                bound.push(*x);
                let r = go(body, bound);
                bound.pop();
                r
            }
            SourceProcess::ExtSum(branches) => {
                if branches.is_empty() {
                    return Err(CspError::EmptySum);
                }
                branches.iter().try_for_each(|(_, q)| go(q, bound))
            }
            SourceProcess::IntChoice(l, r) | SourceProcess::Par(l, r, _) => {
                go(l, bound)?;
                go(r, bound)
            }
            SourceProcess::Conceal(q, _) | SourceProcess::Rename(q, _) => go(q, bound),
        }
    }
    go(p, &mut Vec::new())
}

/// Replaces free occurrences of the variable `x` by `replacement`.
///
/// Only closed replacements are substituted during execution, so no capture
/// can occur; an inner `mu x` shadows.
pub fn substitute_var(p: &Proc, x: Name, replacement: &Proc) -> Proc {
    match &**p {
        SourceProcess::Var(y) if *y == x => replacement.clone(),
        SourceProcess::Stop | SourceProcess::Div | SourceProcess::Success | SourceProcess::Var(_) => {
            p.clone()
        }
        SourceProcess::Mu(y, _) if *y == x => p.clone(),
        SourceProcess::Mu(y, body) => {
            Arc::new(SourceProcess::Mu(*y, substitute_var(body, x, replacement)))
        }
        SourceProcess::ExtSum(branches) => Arc::new(SourceProcess::ExtSum(
            branches
                .iter()
                .map(|(a, q)| (*a, substitute_var(q, x, replacement)))
                .collect(),
        )),
        SourceProcess::IntChoice(l, r) => Arc::new(SourceProcess::IntChoice(
            substitute_var(l, x, replacement),
            substitute_var(r, x, replacement),
        )),
        SourceProcess::Par(l, r, a) => Arc::new(SourceProcess::Par(
            substitute_var(l, x, replacement),
            substitute_var(r, x, replacement),
            a.clone(),
        )),
        SourceProcess::Conceal(q, b) => {
            Arc::new(SourceProcess::Conceal(substitute_var(q, x, replacement), *b))
        }
        SourceProcess::Rename(q, f) => {
            Arc::new(SourceProcess::Rename(substitute_var(q, x, replacement), f.clone()))
        }
    }
}

/// All labelled transitions of `p`, with the resources each one uses.
pub fn transitions_with_origin(p: &Proc) -> Vec<Transition> {
    let mut out = Vec::new();
    collect(p, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

fn single(res: Resource) -> BTreeSet<Resource> {
    std::iter::once(res).collect()
}

fn collect(p: &Proc, pos: &mut Position, out: &mut Vec<Transition>) {
    match &**p {
        SourceProcess::Stop | SourceProcess::Success | SourceProcess::Var(_) => {}
        SourceProcess::Div => out.push(Transition {
            label: SourceLabel::Tau,
            target: SourceProcess::Div,
            origin: Origin::Operator,
            resources: single(Resource::Operator(pos.clone())),
        }),
        SourceProcess::ExtSum(branches) => {
            for (a, cont) in branches {
                out.push(Transition {
                    label: SourceLabel::Act(*a),
                    target: (**cont).clone(),
                    origin: Origin::Prefix,
                    resources: single(Resource::Sum(pos.clone())),
                });
            }
        }
        SourceProcess::IntChoice(l, r) => {
            for branch in [l, r] {
                out.push(Transition {
                    label: SourceLabel::Tau,
                    target: (**branch).clone(),
                    origin: Origin::Operator,
                    resources: single(Resource::Operator(pos.clone())),
                });
            }
        }
        SourceProcess::Mu(x, body) => out.push(Transition {
            label: SourceLabel::Tau,
            target: (*substitute_var(body, *x, p)).clone(),
            origin: Origin::Operator,
            resources: single(Resource::Operator(pos.clone())),
        }),
        SourceProcess::Conceal(inner, b) => {
            for t in sub_transitions(inner, pos, 0) {
                let label = match t.label {
                    SourceLabel::Act(a) if a == *b => SourceLabel::Tau,
                    other => other,
                };
                out.push(Transition {
                    label,
                    target: SourceProcess::Conceal(Arc::new(t.target), *b),
                    origin: t.origin,
                    resources: t.resources,
                });
            }
        }
        SourceProcess::Rename(inner, f) => {
            for t in sub_transitions(inner, pos, 0) {
                let label = match t.label {
                    SourceLabel::Act(a) => SourceLabel::Act(f.apply(a)),
                    SourceLabel::Tau => SourceLabel::Tau,
                };
                out.push(Transition {
                    label,
                    target: SourceProcess::Rename(Arc::new(t.target), f.clone()),
                    origin: t.origin,
                    resources: t.resources,
                });
            }
        }
        SourceProcess::Par(l, r, sync) => {
            let left = sub_transitions(l, pos, 0);
            let right = sub_transitions(r, pos, 1);
            let synchronised = |label: SourceLabel| matches!(label, SourceLabel::Act(a) if sync.contains(&a));
            for t in &left {
                if !synchronised(t.label) {
                    out.push(Transition {
                        label: t.label,
                        target: SourceProcess::Par(Arc::new(t.target.clone()), r.clone(), sync.clone()),
                        origin: t.origin,
                        resources: t.resources.clone(),
                    });
                }
            }
            for t in &right {
                if !synchronised(t.label) {
                    out.push(Transition {
                        label: t.label,
                        target: SourceProcess::Par(l.clone(), Arc::new(t.target.clone()), sync.clone()),
                        origin: t.origin,
                        resources: t.resources.clone(),
                    });
                }
            }
            for tl in left.iter().filter(|t| synchronised(t.label)) {
                for tr in right.iter().filter(|t| t.label == tl.label) {
                    out.push(Transition {
                        label: tl.label,
                        target: SourceProcess::Par(
                            Arc::new(tl.target.clone()),
                            Arc::new(tr.target.clone()),
                            sync.clone(),
                        ),
                        origin: Origin::Prefix,
                        resources: tl.resources.union(&tr.resources).cloned().collect(),
                    });
                }
            }
        }
    }
}

fn sub_transitions(p: &Proc, pos: &mut Position, child: u16) -> Vec<Transition> {
    let mut out = Vec::new();
    pos.push(child);
    collect(p, pos, &mut out);
    pos.pop();
    out
}

/// The labelled transition relation, as a deduplicated set.
pub fn source_transitions(p: &Proc) -> BTreeSet<(SourceLabel, SourceProcess)> {
    transitions_with_origin(p)
        .into_iter()
        .map(|t| (t.label, t.target))
        .collect()
}

pub fn source_barbs(p: &Proc) -> BTreeSet<Name> {
    transitions_with_origin(p)
        .into_iter()
        .filter_map(|t| t.label.name())
        .collect()
}

/// Whether success occurs unguarded: under parallel, concealment and
/// renaming, but not under prefixes, internal choice or recursion.
pub fn source_has_success(p: &SourceProcess) -> bool {
    match p {
        SourceProcess::Success => true,
        SourceProcess::Par(l, r, _) => source_has_success(l) || source_has_success(r),
        SourceProcess::Conceal(q, _) | SourceProcess::Rename(q, _) => source_has_success(q),
        _ => false,
    }
}

/// The maximal distribution of `p` into parallel components. Concealment and
/// renaming wrappers above a parallel operator are pushed onto every
/// component; recursive bodies are not copied.
pub fn source_distributable_components(p: &Proc) -> Vec<Proc> {
    match &**p {
        SourceProcess::Par(l, r, _) => {
            let mut out = source_distributable_components(l);
            out.extend(source_distributable_components(r));
            out
        }
        SourceProcess::Conceal(q, b) if matches!(**q, SourceProcess::Par(..) | SourceProcess::Conceal(..) | SourceProcess::Rename(..)) => {
            let parts = source_distributable_components(q);
            if parts.len() == 1 {
                vec![p.clone()]
            } else {
                parts.into_iter().map(|c| Arc::new(SourceProcess::Conceal(c, *b))).collect()
            }
        }
        SourceProcess::Rename(q, f) if matches!(**q, SourceProcess::Par(..) | SourceProcess::Conceal(..) | SourceProcess::Rename(..)) => {
            let parts = source_distributable_components(q);
            if parts.len() == 1 {
                vec![p.clone()]
            } else {
                parts
                    .into_iter()
                    .map(|c| Arc::new(SourceProcess::Rename(c, f.clone())))
                    .collect()
            }
        }
        _ => vec![p.clone()],
    }
}

/// Number of action prefixes (sum branches) occurring in `p`.
pub fn prefix_count(p: &SourceProcess) -> usize {
    match p {
        SourceProcess::Stop | SourceProcess::Div | SourceProcess::Success | SourceProcess::Var(_) => 0,
        SourceProcess::Mu(_, q) | SourceProcess::Conceal(q, _) | SourceProcess::Rename(q, _) => {
            prefix_count(q)
        }
        SourceProcess::ExtSum(bs) => bs.iter().map(|(_, q)| 1 + prefix_count(q)).sum(),
        SourceProcess::IntChoice(l, r) | SourceProcess::Par(l, r, _) => prefix_count(l) + prefix_count(r),
    }
}

/// Every channel name written anywhere in `p`: prefixes, synchronisation
/// sets, concealed names and both sides of renamings.
pub fn all_names(p: &SourceProcess) -> BTreeSet<Name> {
    fn go(p: &SourceProcess, out: &mut BTreeSet<Name>) {
        match p {
            SourceProcess::Stop | SourceProcess::Div | SourceProcess::Success | SourceProcess::Var(_) => {}
            SourceProcess::Mu(_, q) => go(q, out),
            SourceProcess::ExtSum(bs) => {
                for (a, q) in bs {
                    out.insert(*a);
                    go(q, out);
                }
            }
            SourceProcess::IntChoice(l, r) => {
                go(l, out);
                go(r, out);
            }
            SourceProcess::Par(l, r, a) => {
                out.extend(a.iter().copied());
                go(l, out);
                go(r, out);
            }
            SourceProcess::Conceal(q, b) => {
                out.insert(*b);
                go(q, out);
            }
            SourceProcess::Rename(q, f) => {
                for (x, y) in f.pairs() {
                    out.insert(x);
                    out.insert(y);
                }
                go(q, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(p, &mut out);
    out
}

/// Applies a channel substitution to every name of `p` (prefixes, sets,
/// concealed names and renaming maps).
pub fn rename_channels(p: &Proc, sigma: &dyn Fn(Name) -> Name) -> Proc {
    Arc::new(match &**p {
        SourceProcess::Stop | SourceProcess::Div | SourceProcess::Success | SourceProcess::Var(_) => {
            (**p).clone()
        }
        SourceProcess::Mu(x, q) => SourceProcess::Mu(*x, rename_channels(q, sigma)),
        SourceProcess::ExtSum(bs) => SourceProcess::ExtSum(
            bs.iter().map(|(a, q)| (sigma(*a), rename_channels(q, sigma))).collect(),
        ),
        SourceProcess::IntChoice(l, r) => {
            SourceProcess::IntChoice(rename_channels(l, sigma), rename_channels(r, sigma))
        }
        SourceProcess::Par(l, r, a) => SourceProcess::Par(
            rename_channels(l, sigma),
            rename_channels(r, sigma),
            a.iter().map(|n| sigma(*n)).collect(),
        ),
        SourceProcess::Conceal(q, b) => SourceProcess::Conceal(rename_channels(q, sigma), sigma(*b)),
        SourceProcess::Rename(q, f) => SourceProcess::Rename(
            rename_channels(q, sigma),
            Renaming::new(f.pairs().map(|(x, y)| (sigma(x), sigma(y)))),
        ),
    })
}
