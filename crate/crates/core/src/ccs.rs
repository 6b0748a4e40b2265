//! Asynchronous CCS with name passing and matching.
//!
//! Two representations live here. [`TargetProcess`] is the surface syntax the
//! encoder produces and the printer/parser exchange: binders carry names.
//! [`CanonicalState`] is the normal form used as graph node identity:
//! restrictions are lifted to prenex position and numbered, the body is a
//! sorted multiset of atoms (outputs, inputs, replicated inputs, success), and
//! names bound inside an atom are de Bruijn levels. Each atom is stored as an
//! interned *shape* (the atom with its restricted names abstracted to local
//! slots) plus the list of state-level restricted names filling those slots.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use thiserror::Error;

use crate::name::Name;

/// Provenance attached by the encoder. Tags never influence reductions; they
/// let the explorer classify steps and read off translated barbs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag<N> {
    None,
    /// Announcement output `act<c, r, l, s>`.
    Announce,
    /// The coordinator's input on the outermost announcement channel.
    CoordAnnounce,
    /// The coordinator's lock query, carrying the announced channel.
    CoordQuery(N),
    /// Then-branch of the coordinator's if-construct.
    CoordThen,
    /// Else-branch of the coordinator's if-construct.
    CoordElse,
    /// Positive lock instantiation `l(t,f).t<>`.
    LockPos,
    /// Negative lock instantiation `l(t,f).f<>`.
    LockNeg,
    /// A True sent on a simulation channel.
    BoolPos,
    /// A False sent on a simulation channel.
    BoolNeg,
    /// Internal choice channel.
    Choice,
    /// Divergence channel.
    Diverge,
    /// Recursion (process variable) channel.
    Unfold,
}

impl<N: Copy> Tag<N> {
    pub fn map<M>(self, f: impl FnOnce(N) -> M) -> Tag<M> {
        match self {
            Tag::None => Tag::None,
            Tag::Announce => Tag::Announce,
            Tag::CoordAnnounce => Tag::CoordAnnounce,
            Tag::CoordQuery(n) => Tag::CoordQuery(f(n)),
            Tag::CoordThen => Tag::CoordThen,
            Tag::CoordElse => Tag::CoordElse,
            Tag::LockPos => Tag::LockPos,
            Tag::LockNeg => Tag::LockNeg,
            Tag::BoolPos => Tag::BoolPos,
            Tag::BoolNeg => Tag::BoolNeg,
            Tag::Choice => Tag::Choice,
            Tag::Diverge => Tag::Diverge,
            Tag::Unfold => Tag::Unfold,
        }
    }

    pub fn is_operator_step(self) -> bool {
        matches!(self, Tag::Choice | Tag::Diverge | Tag::Unfold)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetProcess {
    Nil,
    Success,
    Par(Box<TargetProcess>, Box<TargetProcess>),
    Res(Vec<Name>, Box<TargetProcess>),
    Input {
        chan: Name,
        params: Vec<Name>,
        body: Box<TargetProcess>,
        tag: Tag<Name>,
    },
    RepInput {
        chan: Name,
        params: Vec<Name>,
        body: Box<TargetProcess>,
        tag: Tag<Name>,
    },
    Output {
        chan: Name,
        args: Vec<Name>,
        tag: Tag<Name>,
    },
    Match(Name, Name, Box<TargetProcess>),
}

impl TargetProcess {
    pub fn par(l: TargetProcess, r: TargetProcess) -> TargetProcess {
        TargetProcess::Par(Box::new(l), Box::new(r))
    }

    /// Right-nested parallel composition; the empty product is `0`.
    pub fn par_all(items: impl IntoIterator<Item = TargetProcess>) -> TargetProcess {
        let mut items: Vec<_> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return TargetProcess::Nil;
        };
        while let Some(p) = items.pop() {
            acc = TargetProcess::par(p, acc);
        }
        acc
    }

    pub fn res(names: Vec<Name>, body: TargetProcess) -> TargetProcess {
        if names.is_empty() {
            body
        } else {
            TargetProcess::Res(names, Box::new(body))
        }
    }

    pub fn input(chan: Name, params: Vec<Name>, body: TargetProcess) -> TargetProcess {
        TargetProcess::Input { chan, params, body: Box::new(body), tag: Tag::None }
    }

    pub fn rep_input(chan: Name, params: Vec<Name>, body: TargetProcess) -> TargetProcess {
        TargetProcess::RepInput { chan, params, body: Box::new(body), tag: Tag::None }
    }

    pub fn output(chan: Name, args: Vec<Name>) -> TargetProcess {
        TargetProcess::Output { chan, args, tag: Tag::None }
    }

    pub fn matching(x: Name, y: Name, body: TargetProcess) -> TargetProcess {
        TargetProcess::Match(x, y, Box::new(body))
    }

    /// Replaces the tag of an input, replicated input or output; other
    /// constructors are returned unchanged.
    pub fn tagged(mut self, new: Tag<Name>) -> TargetProcess {
        match &mut self {
            TargetProcess::Input { tag, .. }
            | TargetProcess::RepInput { tag, .. }
            | TargetProcess::Output { tag, .. } => *tag = new,
            _ => {}
        }
        self
    }

    /// Structural equality ignoring provenance tags.
    pub fn untagged(&self) -> TargetProcess {
        use TargetProcess::*;
        match self {
            Nil => Nil,
            Success => Success,
            Par(l, r) => Par(Box::new(l.untagged()), Box::new(r.untagged())),
            Res(ns, b) => Res(ns.clone(), Box::new(b.untagged())),
            Input { chan, params, body, .. } => Input {
                chan: *chan,
                params: params.clone(),
                body: Box::new(body.untagged()),
                tag: Tag::None,
            },
            RepInput { chan, params, body, .. } => RepInput {
                chan: *chan,
                params: params.clone(),
                body: Box::new(body.untagged()),
                tag: Tag::None,
            },
            Output { chan, args, .. } => Output { chan: *chan, args: args.clone(), tag: Tag::None },
            Match(x, y, b) => Match(*x, *y, Box::new(b.untagged())),
        }
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out, false);
        out
    }

    /// Free names occurring in channel position (subjects of inputs/outputs).
    pub fn free_subject_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out, true);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>, subjects_only: bool) {
        let note = |n: &Name, bound: &Vec<Name>, subject: bool, out: &mut BTreeSet<Name>| {
            if (subject || !subjects_only) && !bound.contains(n) {
                out.insert(*n);
            }
        };
        match self {
            TargetProcess::Nil | TargetProcess::Success => {}
            TargetProcess::Par(l, r) => {
                l.collect_free(bound, out, subjects_only);
                r.collect_free(bound, out, subjects_only);
            }
            TargetProcess::Res(ns, b) => {
                let len = bound.len();
                bound.extend(ns.iter().copied());
                b.collect_free(bound, out, subjects_only);
                bound.truncate(len);
            }
            TargetProcess::Input { chan, params, body, .. }
            | TargetProcess::RepInput { chan, params, body, .. } => {
                note(chan, bound, true, out);
                let len = bound.len();
                bound.extend(params.iter().copied());
                body.collect_free(bound, out, subjects_only);
                bound.truncate(len);
            }
            TargetProcess::Output { chan, args, .. } => {
                note(chan, bound, true, out);
                for a in args {
                    note(a, bound, false, out);
                }
            }
            TargetProcess::Match(x, y, b) => {
                note(x, bound, false, out);
                note(y, bound, false, out);
                b.collect_free(bound, out, subjects_only);
            }
        }
    }

    /// Applies `sigma` to free names. Binders are assumed not to clash with
    /// the image of `sigma` (true for encoder output, whose binders are
    /// generated names).
    pub fn rename_free(&self, sigma: &dyn Fn(Name) -> Name) -> TargetProcess {
        fn go(p: &TargetProcess, bound: &mut Vec<Name>, sigma: &dyn Fn(Name) -> Name) -> TargetProcess {
            let f = |n: Name, bound: &Vec<Name>| if bound.contains(&n) { n } else { sigma(n) };
            use TargetProcess::*;
            match p {
                Nil => Nil,
                Success => Success,
                Par(l, r) => Par(Box::new(go(l, bound, sigma)), Box::new(go(r, bound, sigma))),
                Res(ns, b) => {
                    let len = bound.len();
                    bound.extend(ns.iter().copied());
                    let b = go(b, bound, sigma);
                    bound.truncate(len);
                    Res(ns.clone(), Box::new(b))
                }
                Input { chan, params, body, tag } | RepInput { chan, params, body, tag } => {
                    let chan2 = f(*chan, bound);
                    let tag2 = tag.map(|n| f(n, bound));
                    let len = bound.len();
                    bound.extend(params.iter().copied());
                    let body2 = Box::new(go(body, bound, sigma));
                    bound.truncate(len);
                    if matches!(p, Input { .. }) {
                        Input { chan: chan2, params: params.clone(), body: body2, tag: tag2 }
                    } else {
                        RepInput { chan: chan2, params: params.clone(), body: body2, tag: tag2 }
                    }
                }
                Output { chan, args, tag } => Output {
                    chan: f(*chan, bound),
                    args: args.iter().map(|a| f(*a, bound)).collect(),
                    tag: tag.map(|n| f(n, bound)),
                },
                Match(x, y, b) => Match(f(*x, bound), f(*y, bound), Box::new(go(b, bound, sigma))),
            }
        }
        go(self, &mut Vec::new(), sigma)
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            TargetProcess::Nil | TargetProcess::Success | TargetProcess::Output { .. } => 1,
            TargetProcess::Par(l, r) => 1 + l.size() + r.size(),
            TargetProcess::Res(_, b) | TargetProcess::Match(_, _, b) => 1 + b.size(),
            TargetProcess::Input { body, .. } | TargetProcess::RepInput { body, .. } => 1 + body.size(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CcsError {
    #[error("arity mismatch on channel {channel}: output sends {sent} names, input expects {expected}")]
    ArityMismatch {
        channel: String,
        sent: usize,
        expected: usize,
    },
}

/// A name inside the normal form: free, restricted at state level, or bound
/// inside an atom (de Bruijn level counted from the atom root).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CName {
    Free(Name),
    Top(u32),
    Bound(u32),
}

/// Locally-nameless process term. Binders only record how many names they
/// bind; occurrences are [`CName::Bound`] levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Nil,
    Success,
    Par(Vec<Term>),
    Res(u32, Box<Term>),
    Input {
        chan: CName,
        arity: u32,
        body: Box<Term>,
        repl: bool,
        tag: Tag<CName>,
    },
    Output {
        chan: CName,
        args: Vec<CName>,
        tag: Tag<CName>,
    },
    Match(CName, CName, Box<Term>),
}

impl Term {
    fn for_each_name(&self, f: &mut impl FnMut(CName, Occ)) {
        match self {
            Term::Nil | Term::Success => {}
            Term::Par(cs) => cs.iter().for_each(|c| c.for_each_name(f)),
            Term::Res(_, b) => b.for_each_name(f),
            Term::Input { chan, body, tag, .. } => {
                f(*chan, Occ::InSubject);
                if let Tag::CoordQuery(n) = tag {
                    f(*n, Occ::Tag);
                }
                body.for_each_name(f);
            }
            Term::Output { chan, args, tag } => {
                f(*chan, Occ::OutSubject);
                for a in args {
                    f(*a, Occ::Data);
                }
                if let Tag::CoordQuery(n) = tag {
                    f(*n, Occ::Tag);
                }
            }
            Term::Match(x, y, b) => {
                f(*x, Occ::Test);
                f(*y, Occ::Test);
                b.for_each_name(f);
            }
        }
    }

    fn map_names(&self, f: &mut impl FnMut(CName) -> CName) -> Term {
        match self {
            Term::Nil => Term::Nil,
            Term::Success => Term::Success,
            Term::Par(cs) => Term::Par(cs.iter().map(|c| c.map_names(f)).collect()),
            Term::Res(k, b) => Term::Res(*k, Box::new(b.map_names(f))),
            Term::Input { chan, arity, body, repl, tag } => Term::Input {
                chan: f(*chan),
                arity: *arity,
                body: Box::new(body.map_names(f)),
                repl: *repl,
                tag: tag.map(&mut *f),
            },
            Term::Output { chan, args, tag } => Term::Output {
                chan: f(*chan),
                args: args.iter().map(|a| f(*a)).collect(),
                tag: tag.map(&mut *f),
            },
            Term::Match(x, y, b) => Term::Match(f(*x), f(*y), Box::new(b.map_names(f))),
        }
    }

    fn contains_success(&self) -> bool {
        match self {
            Term::Success => true,
            Term::Nil | Term::Output { .. } => false,
            Term::Par(cs) => cs.iter().any(Term::contains_success),
            Term::Res(_, b) | Term::Match(_, _, b) | Term::Input { body: b, .. } => b.contains_success(),
        }
    }

    fn has_free_output(&self) -> bool {
        match self {
            Term::Output { chan, .. } => matches!(chan, CName::Free(_)),
            Term::Nil | Term::Success => false,
            Term::Par(cs) => cs.iter().any(Term::has_free_output),
            Term::Res(_, b) | Term::Match(_, _, b) | Term::Input { body: b, .. } => b.has_free_output(),
        }
    }

    /// Simplifies below binders: flattens parallel compositions, drops `0`,
    /// resolves syntactically equal matches, and sorts parallel components by
    /// a key that ignores the identity of state-level restricted names.
    fn simplify(self) -> Term {
        match self {
            Term::Par(cs) => {
                let mut flat = Vec::new();
                for c in cs {
                    match c.simplify() {
                        Term::Nil => {}
                        Term::Par(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                match flat.len() {
                    0 => Term::Nil,
                    1 => flat.pop().unwrap(),
                    _ => {
                        let mut keyed: Vec<(Vec<u32>, Term)> =
                            flat.into_iter().map(|t| (sort_key(&t), t)).collect();
                        keyed.sort_by(|a, b| a.0.cmp(&b.0));
                        Term::Par(keyed.into_iter().map(|(_, t)| t).collect())
                    }
                }
            }
            Term::Res(k, b) => match b.simplify() {
                Term::Nil => Term::Nil,
                b if k == 0 => b,
                b => Term::Res(k, Box::new(b)),
            },
            Term::Match(x, y, b) if x == y => b.simplify(),
            Term::Match(x, y, b) => match b.simplify() {
                Term::Nil => Term::Nil,
                b => Term::Match(x, y, Box::new(b)),
            },
            Term::Input { chan, arity, body, repl, tag } => Term::Input {
                chan,
                arity,
                body: Box::new(body.simplify()),
                repl,
                tag,
            },
            other => other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Occ {
    InSubject,
    OutSubject,
    Data,
    Test,
    Tag,
}

fn encode_name(n: CName, out: &mut Vec<u32>, abstract_top: bool) {
    match n {
        CName::Free(x) => {
            out.push(1);
            out.push(x.id());
        }
        CName::Top(i) => {
            out.push(2);
            out.push(if abstract_top { 0 } else { i });
        }
        CName::Bound(l) => {
            out.push(3);
            out.push(l);
        }
    }
}

fn encode_tag(t: &Tag<CName>, out: &mut Vec<u32>, abstract_top: bool) {
    let code = match t {
        Tag::None => 0,
        Tag::Announce => 1,
        Tag::CoordAnnounce => 2,
        Tag::CoordQuery(_) => 3,
        Tag::CoordThen => 4,
        Tag::CoordElse => 5,
        Tag::LockPos => 6,
        Tag::LockNeg => 7,
        Tag::BoolPos => 8,
        Tag::BoolNeg => 9,
        Tag::Choice => 10,
        Tag::Diverge => 11,
        Tag::Unfold => 12,
    };
    out.push(code);
    if let Tag::CoordQuery(n) = t {
        encode_name(*n, out, abstract_top);
    }
}

fn encode_term(t: &Term, out: &mut Vec<u32>, abstract_top: bool) {
    match t {
        Term::Nil => out.push(100),
        Term::Success => out.push(101),
        Term::Par(cs) => {
            out.push(102);
            out.push(cs.len() as u32);
            cs.iter().for_each(|c| encode_term(c, out, abstract_top));
        }
        Term::Res(k, b) => {
            out.push(103);
            out.push(*k);
            encode_term(b, out, abstract_top);
        }
        Term::Input { chan, arity, body, repl, tag } => {
            out.push(if *repl { 105 } else { 104 });
            encode_name(*chan, out, abstract_top);
            out.push(*arity);
            encode_tag(tag, out, abstract_top);
            encode_term(body, out, abstract_top);
        }
        Term::Output { chan, args, tag } => {
            out.push(106);
            encode_name(*chan, out, abstract_top);
            out.push(args.len() as u32);
            args.iter().for_each(|a| encode_name(*a, out, abstract_top));
            encode_tag(tag, out, abstract_top);
        }
        Term::Match(x, y, b) => {
            out.push(107);
            encode_name(*x, out, abstract_top);
            encode_name(*y, out, abstract_top);
            encode_term(b, out, abstract_top);
        }
    }
}

fn sort_key(t: &Term) -> Vec<u32> {
    let mut out = Vec::new();
    encode_term(t, &mut out, true);
    out
}

// ---------------------------------------------------------------------------
// Shapes

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeId(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomKind {
    Output,
    Input,
    RepInput,
    Success,
}

#[derive(Clone, Copy, Debug, Default)]
struct SlotUse {
    in_subject: bool,
    out_subject: bool,
    data: bool,
}

/// An interned atom with its restricted names abstracted into slots.
#[derive(Debug)]
pub struct Shape {
    pub id: ShapeId,
    pub term: Term,
    pub kind: AtomKind,
    pub slots: u32,
    slot_use: Vec<SlotUse>,
    /// The slot of the atom's subject, if the subject is restricted.
    subject_slot: Option<u32>,
    guards_observable: bool,
}

struct ShapeTable {
    ids: HashMap<Arc<Term>, Arc<Shape>>,
    shapes: Vec<Arc<Shape>>,
}

fn shape_table() -> &'static RwLock<ShapeTable> {
    static TABLE: OnceLock<RwLock<ShapeTable>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(ShapeTable { ids: HashMap::new(), shapes: Vec::new() }))
}

pub fn shape(id: ShapeId) -> Arc<Shape> {
    shape_table().read().unwrap().shapes[id.0 as usize].clone()
}

fn intern_shape(term: Term) -> Arc<Shape> {
    if let Some(sh) = shape_table().read().unwrap().ids.get(&term) {
        return sh.clone();
    }
    let mut table = shape_table().write().unwrap();
    if let Some(sh) = table.ids.get(&term) {
        return sh.clone();
    }
    let kind = match &term {
        Term::Output { .. } => AtomKind::Output,
        Term::Input { repl: false, .. } => AtomKind::Input,
        Term::Input { repl: true, .. } => AtomKind::RepInput,
        Term::Success => AtomKind::Success,
        other => panic!("not an atom: {other:?}"),
    };
    let mut slots = 0;
    let mut slot_use: Vec<SlotUse> = Vec::new();
    term.for_each_name(&mut |n, occ| {
        if let CName::Top(i) = n {
            slots = slots.max(i + 1);
            if slot_use.len() <= i as usize {
                slot_use.resize(i as usize + 1, SlotUse::default());
            }
            let u = &mut slot_use[i as usize];
            match occ {
                Occ::InSubject => u.in_subject = true,
                Occ::OutSubject => u.out_subject = true,
                Occ::Data => u.data = true,
                Occ::Test | Occ::Tag => {}
            }
        }
    });
    let subject_slot = match &term {
        Term::Output { chan: CName::Top(i), .. } | Term::Input { chan: CName::Top(i), .. } => Some(*i),
        _ => None,
    };
    let guards_observable = match &term {
        Term::Input { body, .. } => body.contains_success() || body.has_free_output(),
        _ => false,
    };
    let id = ShapeId(table.shapes.len() as u32);
    let shape = Arc::new(Shape {
        id,
        term: term.clone(),
        kind,
        slots,
        slot_use,
        subject_slot,
        guards_observable,
    });
    table.shapes.push(shape.clone());
    table.ids.insert(Arc::new(term), shape.clone());
    shape
}

/// One element of the parallel multiset of a canonical state.
#[derive(Clone, Debug)]
pub struct Atom {
    shape: Arc<Shape>,
    /// State-level restricted names filling the shape's slots.
    pub tops: Vec<u32>,
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.shape.id == other.shape.id && self.tops == other.tops
    }
}

impl Eq for Atom {}

impl std::hash::Hash for Atom {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.shape.id.hash(state);
        self.tops.hash(state);
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.shape.id, &self.tops).cmp(&(other.shape.id, &other.tops))
    }
}

impl Atom {
    pub fn shape(&self) -> &Arc<Shape> {
        &self.shape
    }

    pub fn shape_id(&self) -> ShapeId {
        self.shape.id
    }

    fn resolve(&self, n: CName) -> CName {
        match n {
            CName::Top(i) => CName::Top(self.tops[i as usize]),
            other => other,
        }
    }

    /// The atom with slots replaced by state-level names.
    pub fn term(&self) -> Term {
        self.shape.term.map_names(&mut |n| self.resolve(n))
    }

    pub fn kind(&self) -> AtomKind {
        self.shape.kind
    }

    pub fn tag(&self) -> Tag<CName> {
        match &self.shape.term {
            Term::Input { tag, .. } | Term::Output { tag, .. } => tag.map(|n| self.resolve(n)),
            _ => Tag::None,
        }
    }

    /// Subject channel of an input or output atom.
    pub fn subject(&self) -> Option<CName> {
        match &self.shape.term {
            Term::Input { chan, .. } | Term::Output { chan, .. } => Some(self.resolve(*chan)),
            _ => None,
        }
    }

    /// Arguments of an output atom.
    pub fn args(&self) -> Vec<CName> {
        match &self.shape.term {
            Term::Output { args, .. } => args.iter().map(|a| self.resolve(*a)).collect(),
            _ => Vec::new(),
        }
    }
}

/// Abstracts a state-level atom into an interned shape plus slot filling.
fn make_atom(raw: Term) -> Atom {
    let raw = raw.simplify();
    let mut tops: Vec<u32> = Vec::new();
    let term = raw.map_names(&mut |n| match n {
        CName::Top(i) => {
            let slot = match tops.iter().position(|&t| t == i) {
                Some(s) => s,
                None => {
                    tops.push(i);
                    tops.len() - 1
                }
            };
            CName::Top(slot as u32)
        }
        other => other,
    });
    Atom { shape: intern_shape(term), tops }
}

// ---------------------------------------------------------------------------
// Canonical states

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CanonOptions {
    pub prune: bool,
}

impl Default for CanonOptions {
    fn default() -> Self {
        CanonOptions { prune: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalState {
    nres: u32,
    atoms: Vec<Atom>,
}

impl CanonicalState {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn restricted_count(&self) -> u32 {
        self.nres
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for a in &self.atoms {
            a.shape.term.for_each_name(&mut |n, _| {
                if let CName::Free(x) = n {
                    out.insert(x);
                }
            });
        }
        out
    }

    /// Rebuilds surface syntax; restricted names print as `v#i`, names bound
    /// inside atoms as `x#level`.
    pub fn to_process(&self) -> TargetProcess {
        let tops: Vec<Name> = (0..self.nres).map(|i| Name::generated(&format!("v#{i}"))).collect();
        let body = TargetProcess::par_all(self.atoms.iter().map(|a| term_to_process(&a.term(), &tops, 0)));
        TargetProcess::res(tops, body)
    }

    /// One atom as a process, restricted names left free.
    pub fn atom_process(&self, i: usize) -> TargetProcess {
        let tops: Vec<Name> = (0..self.nres).map(|i| Name::generated(&format!("v#{i}"))).collect();
        term_to_process(&self.atoms[i].term(), &tops, 0)
    }
}

fn level_name(level: u32) -> Name {
    Name::generated(&format!("x#{level}"))
}

fn term_to_process(t: &Term, tops: &[Name], depth: u32) -> TargetProcess {
    let name = |n: CName| match n {
        CName::Free(x) => x,
        CName::Top(i) => tops[i as usize],
        CName::Bound(l) => level_name(l),
    };
    match t {
        Term::Nil => TargetProcess::Nil,
        Term::Success => TargetProcess::Success,
        Term::Par(cs) => TargetProcess::par_all(cs.iter().map(|c| term_to_process(c, tops, depth))),
        Term::Res(k, b) => TargetProcess::res(
            (depth..depth + k).map(level_name).collect(),
            term_to_process(b, tops, depth + k),
        ),
        Term::Input { chan, arity, body, repl, tag } => {
            let params = (depth..depth + arity).map(level_name).collect();
            let body = Box::new(term_to_process(body, tops, depth + arity));
            let tag = tag.map(name);
            if *repl {
                TargetProcess::RepInput { chan: name(*chan), params, body, tag }
            } else {
                TargetProcess::Input { chan: name(*chan), params, body, tag }
            }
        }
        Term::Output { chan, args, tag } => TargetProcess::Output {
            chan: name(*chan),
            args: args.iter().map(|a| name(*a)).collect(),
            tag: tag.map(name),
        },
        Term::Match(x, y, b) => TargetProcess::matching(name(*x), name(*y), term_to_process(b, tops, depth)),
    }
}

fn lower(p: &TargetProcess, env: &mut Vec<Name>) -> Term {
    let resolve = |n: Name, env: &Vec<Name>| match env.iter().rposition(|m| *m == n) {
        Some(level) => CName::Bound(level as u32),
        None => CName::Free(n),
    };
    match p {
        TargetProcess::Nil => Term::Nil,
        TargetProcess::Success => Term::Success,
        TargetProcess::Par(l, r) => Term::Par(vec![lower(l, env), lower(r, env)]),
        TargetProcess::Res(ns, b) => {
            let len = env.len();
            env.extend(ns.iter().copied());
            let body = lower(b, env);
            env.truncate(len);
            Term::Res(ns.len() as u32, Box::new(body))
        }
        TargetProcess::Input { chan, params, body, tag } | TargetProcess::RepInput { chan, params, body, tag } => {
            let c = resolve(*chan, env);
            let tg = tag.map(|n| resolve(n, env));
            let len = env.len();
            env.extend(params.iter().copied());
            let b = lower(body, env);
            env.truncate(len);
            Term::Input {
                chan: c,
                arity: params.len() as u32,
                body: Box::new(b),
                repl: matches!(p, TargetProcess::RepInput { .. }),
                tag: tg,
            }
        }
        TargetProcess::Output { chan, args, tag } => Term::Output {
            chan: resolve(*chan, env),
            args: args.iter().map(|a| resolve(*a, env)).collect(),
            tag: tag.map(|n| resolve(n, env)),
        },
        TargetProcess::Match(x, y, b) => Term::Match(resolve(*x, env), resolve(*y, env), Box::new(lower(b, env))),
    }
}

/// Moves a term to top level: restrictions become fresh state-level names,
/// top-level matches are decided, and the remaining atoms are emitted with
/// their own binders re-based to level 0.
///
/// `slots` maps shape slots to state names; `env` maps the levels bound
/// above `t` to the names that now replace them.
fn flatten(t: &Term, slots: &[u32], env: &mut Vec<CName>, next_top: &mut u32, out: &mut Vec<Term>) {
    let resolve = |n: CName, env: &Vec<CName>| match n {
        CName::Top(i) => CName::Top(slots[i as usize]),
        CName::Bound(l) if (l as usize) < env.len() => env[l as usize],
        CName::Bound(l) => CName::Bound(l - env.len() as u32),
        free => free,
    };
    match t {
        Term::Nil => {}
        Term::Par(cs) => cs.iter().for_each(|c| flatten(c, slots, env, next_top, out)),
        Term::Res(k, b) => {
            let len = env.len();
            for _ in 0..*k {
                env.push(CName::Top(*next_top));
                *next_top += 1;
            }
            flatten(b, slots, env, next_top, out);
            env.truncate(len);
        }
        Term::Match(x, y, b) => {
            // distinct resolved names at top level can never become equal
            if resolve(*x, env) == resolve(*y, env) {
                flatten(b, slots, env, next_top, out);
            }
        }
        Term::Success => out.push(Term::Success),
        Term::Input { .. } | Term::Output { .. } => {
            let env_snapshot = env.clone();
            out.push(t.map_names(&mut |n| resolve(n, &env_snapshot)));
        }
    }
}

/// Removes atoms that can never take part in a reduction: an input (output)
/// whose subject is restricted and on which no other atom can ever produce a
/// matching output (input), because the name occurs nowhere else in output
/// (input) subject position or as transmitted data. Atoms guarding success or
/// an output on a free name are kept.
fn prune(atoms: &mut Vec<Atom>, n: usize) {
    // per restricted name: atoms able to receive on it / send on it
    let mut can_recv = vec![0u32; n];
    let mut can_send = vec![0u32; n];
    let contribution = |a: &Atom, slot: usize| {
        let u = a.shape.slot_use[slot];
        (u32::from(u.in_subject || u.data), u32::from(u.out_subject || u.data))
    };
    for a in atoms.iter() {
        for slot in 0..a.shape.slot_use.len() {
            let (r, s) = contribution(a, slot);
            can_recv[a.tops[slot] as usize] += r;
            can_send[a.tops[slot] as usize] += s;
        }
    }
    let mut alive = vec![true; atoms.len()];
    loop {
        let mut changed = false;
        for (i, a) in atoms.iter().enumerate() {
            if !alive[i] || a.shape.guards_observable {
                continue;
            }
            let Some(slot) = a.shape.subject_slot else { continue };
            let top = a.tops[slot as usize] as usize;
            let (own_r, own_s) = contribution(a, slot as usize);
            let dead = match a.shape.kind {
                AtomKind::Input | AtomKind::RepInput => can_send[top] == own_s,
                AtomKind::Output => can_recv[top] == own_r,
                AtomKind::Success => false,
            };
            if dead {
                alive[i] = false;
                changed = true;
                for slot in 0..a.shape.slot_use.len() {
                    let (r, s) = contribution(a, slot);
                    can_recv[a.tops[slot] as usize] -= r;
                    can_send[a.tops[slot] as usize] -= s;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if alive.iter().all(|x| *x) {
        return;
    }
    let mut i = 0;
    atoms.retain(|_| {
        let keep = alive[i];
        i += 1;
        keep
    });
}

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Result of normalisation: the canonical state and, for every state-level
/// name used on input, its canonical index (None if the name disappeared).
struct Normalised {
    state: CanonicalState,
    renaming: Vec<Option<u32>>,
}

/// Search for the least numbering stops branching after this many complete
/// numberings; beyond it the result may depend on the input order.
const MAX_NUMBERINGS: usize = 64;

/// Canonical numbering of restricted names by colour refinement with
/// individualisation: names are coloured by iterated hashing over the atoms
/// they occur in; while some colours are shared, each name of the first
/// shared colour is tried as distinguished, and the least resulting state
/// is kept.
struct Numbering<'a> {
    atoms: &'a [Atom],
    used: Vec<usize>,
    best: Option<(Vec<Atom>, Vec<Option<u32>>, u32)>,
    numberings: usize,
}

impl Numbering<'_> {
    fn refine(&self, colour: &mut [u64]) {
        let mut atom_hash = vec![0u64; self.atoms.len()];
        let mut acc = vec![0u64; colour.len()];
        let mut classes = self.classes(colour);
        loop {
            for (h, a) in atom_hash.iter_mut().zip(self.atoms) {
                let mut x = mix(a.shape.id.0 as u64);
                for t in &a.tops {
                    x = mix(x ^ colour[*t as usize]);
                }
                *h = x;
            }
            acc.iter_mut().for_each(|x| *x = 0);
            for (h, a) in atom_hash.iter().zip(self.atoms) {
                for (slot, t) in a.tops.iter().enumerate() {
                    acc[*t as usize] = acc[*t as usize].wrapping_add(mix(h ^ ((slot as u64 + 1) << 48)));
                }
            }
            for &t in &self.used {
                colour[t] = mix(colour[t].rotate_left(17) ^ acc[t]);
            }
            let now = self.classes(colour);
            if now <= classes {
                break;
            }
            classes = now;
        }
    }

    fn classes(&self, colour: &[u64]) -> usize {
        let mut cs: Vec<u64> = self.used.iter().map(|t| colour[*t]).collect();
        cs.sort_unstable();
        cs.dedup();
        cs.len()
    }

    fn search(&mut self, mut colour: Vec<u64>) {
        self.refine(&mut colour);
        let mut by_colour: Vec<(u64, usize)> = self.used.iter().map(|t| (colour[*t], *t)).collect();
        by_colour.sort_unstable();
        let cell: Vec<usize> = match by_colour.windows(2).find(|w| w[0].0 == w[1].0) {
            Some(w) => by_colour.iter().filter(|(c, _)| *c == w[0].0).map(|(_, t)| *t).collect(),
            None => return self.leaf(&colour),
        };
        for (k, t) in cell.into_iter().enumerate() {
            if k > 0 && self.numberings >= MAX_NUMBERINGS {
                break;
            }
            let mut c = colour.clone();
            c[t] = mix(c[t] ^ 0x5bd1_e995);
            self.search(c);
        }
    }

    fn leaf(&mut self, colour: &[u64]) {
        self.numberings += 1;
        let atoms = self.atoms;
        let mut order: Vec<usize> = (0..atoms.len()).collect();
        order.sort_by(|&i, &j| {
            let (a, b) = (&atoms[i], &atoms[j]);
            a.shape.id.cmp(&b.shape.id).then_with(|| {
                a.tops
                    .iter()
                    .map(|t| colour[*t as usize])
                    .cmp(b.tops.iter().map(|t| colour[*t as usize]))
            })
        });
        let mut renaming: Vec<Option<u32>> = vec![None; colour.len()];
        let mut next = 0u32;
        for &i in &order {
            for t in &atoms[i].tops {
                let r = &mut renaming[*t as usize];
                if r.is_none() {
                    *r = Some(next);
                    next += 1;
                }
            }
        }
        let mut renamed: Vec<Atom> = atoms
            .iter()
            .map(|a| Atom { shape: a.shape.clone(), tops: a.tops.iter().map(|t| renaming[*t as usize].unwrap()).collect() })
            .collect();
        renamed.sort();
        if self.best.as_ref().is_none_or(|(b, _, _)| renamed < *b) {
            self.best = Some((renamed, renaming, next));
        }
    }
}

fn normalise(mut atoms: Vec<Atom>, next_top: u32, opts: CanonOptions) -> Normalised {
    let n = next_top as usize;
    if opts.prune {
        prune(&mut atoms, n);
    }
    let mut used = vec![false; n];
    for a in &atoms {
        for t in &a.tops {
            used[*t as usize] = true;
        }
    }
    let used = (0..n).filter(|t| used[*t]).collect();
    let mut numbering = Numbering { atoms: &atoms, used, best: None, numberings: 0 };
    numbering.search(vec![0u64; n]);
    let (atoms, renaming, nres) = numbering.best.expect("at least one numbering");
    Normalised { state: CanonicalState { nres, atoms }, renaming }
}

pub fn canonicalize_with(t: &TargetProcess, opts: CanonOptions) -> CanonicalState {
    let term = lower(t, &mut Vec::new());
    let mut next = 0;
    let mut raw = Vec::new();
    flatten(&term, &[], &mut Vec::new(), &mut next, &mut raw);
    normalise(raw.into_iter().map(make_atom).collect(), next, opts).state
}

/// Normal form modulo structural congruence (best effort), with inert junk
/// pruned.
pub fn canonicalize(t: &TargetProcess) -> CanonicalState {
    canonicalize_with(t, CanonOptions::default())
}

/// Re-normalises an existing state (used to check idempotence).
pub fn recanonicalize(s: &CanonicalState, opts: CanonOptions) -> CanonicalState {
    normalise(s.atoms.clone(), s.nres, opts).state
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedexInfo {
    pub channel: CName,
    pub replicated: bool,
    pub output_atom: usize,
    pub input_atom: usize,
    pub output_tag: Tag<CName>,
    pub input_tag: Tag<CName>,
    pub args: Vec<CName>,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub info: RedexInfo,
    pub target: CanonicalState,
    /// Canonical index in `target` of each restricted name of the source
    /// state, when it survives.
    pub renaming: Vec<Option<u32>>,
}

/// Transmitted name, relative to the names a body instantiation can see.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum ArgRef {
    Free(Name),
    Slot(u32),
}

/// Atoms produced by running an input body on given arguments. Slot `i` of
/// a produced atom refers to the `i`-th visible name when `i` is below the
/// number of visible names, and to a freshly restricted name otherwise.
struct Instantiation {
    atoms: Vec<(Arc<Shape>, Vec<u32>)>,
    fresh: u32,
}

type InstKey = (ShapeId, Vec<ArgRef>);

fn instantiation_cache() -> &'static RwLock<HashMap<InstKey, Arc<Instantiation>>> {
    static CACHE: OnceLock<RwLock<HashMap<InstKey, Arc<Instantiation>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn instantiate(input: &Atom, args: &[CName]) -> Arc<Instantiation> {
    // visible names: the input's own slots, then new restricted arguments
    let mut visible: Vec<u32> = input.tops.clone();
    let key_args: Vec<ArgRef> = args
        .iter()
        .map(|a| match a {
            CName::Free(x) => ArgRef::Free(*x),
            CName::Top(t) => {
                let pos = visible.iter().position(|v| v == t).unwrap_or_else(|| {
                    visible.push(*t);
                    visible.len() - 1
                });
                ArgRef::Slot(pos as u32)
            }
            CName::Bound(_) => unreachable!("bound name at top level"),
        })
        .collect();
    let key = (input.shape.id, key_args);
    if let Some(inst) = instantiation_cache().read().unwrap().get(&key) {
        return inst.clone();
    }
    let Term::Input { body, .. } = &input.shape.term else { unreachable!("not an input") };
    let identity: Vec<u32> = (0..input.tops.len() as u32).collect();
    let env: Vec<CName> = key
        .1
        .iter()
        .map(|a| match a {
            ArgRef::Free(x) => CName::Free(*x),
            ArgRef::Slot(i) => CName::Top(*i),
        })
        .collect();
    let mut next = visible.len() as u32;
    let mut raw = Vec::new();
    flatten(body, &identity, &mut env.clone(), &mut next, &mut raw);
    let atoms = raw
        .into_iter()
        .map(make_atom)
        .map(|a| (a.shape, a.tops))
        .collect();
    let inst = Arc::new(Instantiation { atoms, fresh: next - visible.len() as u32 });
    instantiation_cache().write().unwrap().insert(key, inst.clone());
    inst
}

/// Fires the given redex (output atom, input atom) of `s`.
pub fn fire(s: &CanonicalState, output_atom: usize, input_atom: usize, opts: CanonOptions) -> Result<Reduction, CcsError> {
    fire_many(s, &[(output_atom, input_atom)], opts)
}

/// Fires several pairwise-disjoint redexes of `s` at once.
pub fn fire_many(s: &CanonicalState, redexes: &[(usize, usize)], opts: CanonOptions) -> Result<Reduction, CcsError> {
    let mut consumed = vec![false; s.atoms.len()];
    let mut info = None;
    let mut produced: Vec<Atom> = Vec::new();
    let mut next_top = s.nres;
    for &(o, i) in redexes {
        let out = &s.atoms[o];
        let inp = &s.atoms[i];
        let args = out.args();
        let Term::Input { arity, repl, .. } = &inp.shape.term else {
            panic!("redex input atom is not an input");
        };
        let channel = out.subject().expect("output has a subject");
        if args.len() != *arity as usize {
            let channel = match channel {
                CName::Free(x) => x.to_string(),
                other => format!("{other:?}"),
            };
            return Err(CcsError::ArityMismatch { channel, sent: args.len(), expected: *arity as usize });
        }
        assert!(!consumed[o], "redexes overlap");
        consumed[o] = true;
        if !*repl {
            assert!(!consumed[i], "redexes overlap");
            consumed[i] = true;
        }
        let mut visible = inp.tops.clone();
        for a in &args {
            if let CName::Top(t) = a {
                if !visible.contains(t) {
                    visible.push(*t);
                }
            }
        }
        let inst = instantiate(inp, &args);
        let base = visible.len() as u32;
        for (shape, slots) in &inst.atoms {
            let tops = slots
                .iter()
                .map(|x| if *x < base { visible[*x as usize] } else { next_top + (x - base) })
                .collect();
            produced.push(Atom { shape: shape.clone(), tops });
        }
        next_top += inst.fresh;
        if info.is_none() {
            info = Some(RedexInfo {
                channel,
                replicated: *repl,
                output_atom: o,
                input_atom: i,
                output_tag: out.tag(),
                input_tag: inp.tag(),
                args,
            });
        }
    }
    let mut atoms: Vec<Atom> = s
        .atoms
        .iter()
        .zip(&consumed)
        .filter(|(_, c)| !**c)
        .map(|(a, _)| a.clone())
        .collect();
    atoms.extend(produced);
    let n = normalise(atoms, next_top, opts);
    let mut renaming = n.renaming;
    renaming.truncate(s.nres as usize);
    Ok(Reduction { info: info.expect("at least one redex"), target: n.state, renaming })
}

/// All pairs (output atom, input atom) on the same channel.
pub fn redexes(s: &CanonicalState) -> Vec<(usize, usize)> {
    let mut by_chan: HashMap<CName, Vec<usize>> = HashMap::new();
    for (i, a) in s.atoms.iter().enumerate() {
        if matches!(a.kind(), AtomKind::Input | AtomKind::RepInput) {
            by_chan.entry(a.subject().unwrap()).or_default().push(i);
        }
    }
    let mut out = Vec::new();
    for (o, a) in s.atoms.iter().enumerate() {
        if a.kind() == AtomKind::Output {
            if let Some(ins) = by_chan.get(&a.subject().unwrap()) {
                out.extend(ins.iter().map(|&i| (o, i)));
            }
        }
    }
    out
}

/// One successor per redex, deduplicated by resulting canonical state.
pub fn target_reductions_with(s: &CanonicalState, opts: CanonOptions) -> Result<Vec<Reduction>, CcsError> {
    let mut out: Vec<Reduction> = Vec::new();
    let mut seen: HashSet<CanonicalState> = HashSet::new();
    for (o, i) in redexes(s) {
        let r = fire(s, o, i, opts)?;
        if seen.insert(r.target.clone()) {
            out.push(r);
        }
    }
    Ok(out)
}

pub fn target_reductions(s: &CanonicalState) -> Result<Vec<Reduction>, CcsError> {
    target_reductions_with(s, CanonOptions::default())
}

pub fn target_has_success(s: &CanonicalState) -> bool {
    s.atoms.iter().any(|a| a.kind() == AtomKind::Success)
}

impl fmt::Display for CanonicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_target(&self.to_process()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::source(s)
    }

    fn out(c: &str, args: &[&str]) -> TargetProcess {
        TargetProcess::output(n(c), args.iter().map(|a| n(a)).collect())
    }

    #[test]
    fn nil_is_unit_of_parallel() {
        let s = canonicalize(&TargetProcess::par(TargetProcess::Nil, out("c", &[])));
        assert_eq!(s, canonicalize(&out("c", &[])));
        assert_eq!(s.atoms().len(), 1);
    }

    #[test]
    fn equal_match_is_removed() {
        let s = canonicalize(&TargetProcess::matching(n("x"), n("x"), out("c", &[])));
        assert_eq!(s, canonicalize(&out("c", &[])));
    }

    #[test]
    fn restricted_output_without_receiver_is_pruned() {
        let a = Name::generated("a#1");
        let t = TargetProcess::res(vec![a], TargetProcess::output(a, vec![]));
        let s = canonicalize(&t);
        assert!(s.atoms().is_empty());
        let unpruned = canonicalize_with(&t, CanonOptions { prune: false });
        assert_eq!(unpruned.atoms().len(), 1);
        assert!(target_reductions(&unpruned).unwrap().is_empty());
    }

    #[test]
    fn communication_substitutes() {
        // c<a> | c(x).x<>  ->  a<>
        let x = Name::generated("x#t1");
        let t = TargetProcess::par(
            out("c", &["a"]),
            TargetProcess::input(n("c"), vec![x], TargetProcess::output(x, vec![])),
        );
        let rs = target_reductions(&canonicalize(&t)).unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].target, canonicalize(&out("a", &[])));
        assert_eq!(rs[0].info.channel, CName::Free(n("c")));
    }

    #[test]
    fn empty_state_has_no_reductions() {
        assert!(target_reductions(&canonicalize(&TargetProcess::Nil)).unwrap().is_empty());
    }

    #[test]
    fn competing_outputs_give_two_successors() {
        let x = Name::generated("x#t2");
        let t = TargetProcess::par_all([
            out("c", &["a"]),
            out("c", &["b"]),
            TargetProcess::input(n("c"), vec![x], TargetProcess::Nil),
        ]);
        let mut succ: Vec<_> = target_reductions(&canonicalize(&t))
            .unwrap()
            .into_iter()
            .map(|r| r.target)
            .collect();
        succ.sort();
        let mut expected = vec![canonicalize(&out("c", &["b"])), canonicalize(&out("c", &["a"]))];
        expected.sort();
        assert_eq!(succ, expected);
    }

    #[test]
    fn success_survives_scope_extrusion() {
        let a = Name::generated("a#2");
        let t = TargetProcess::res(vec![a], TargetProcess::par(TargetProcess::Success, TargetProcess::output(a, vec![])));
        assert!(target_has_success(&canonicalize(&t)));
        assert!(!target_has_success(&canonicalize(&out("c", &[]))));
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let x = Name::generated("x#t3");
        let t = TargetProcess::par(out("c", &[]), TargetProcess::input(n("c"), vec![x], TargetProcess::Nil));
        let err = target_reductions(&canonicalize(&t)).unwrap_err();
        assert!(matches!(err, CcsError::ArityMismatch { sent: 0, expected: 1, .. }));
    }

    #[test]
    fn alpha_equivalent_terms_coincide() {
        let (a, b) = (Name::generated("a#9"), Name::generated("b#9"));
        let t1 = TargetProcess::res(
            vec![a],
            TargetProcess::par(TargetProcess::output(a, vec![n("k")]), TargetProcess::input(a, vec![], TargetProcess::Nil)),
        );
        let t2 = TargetProcess::res(
            vec![b],
            TargetProcess::par(TargetProcess::input(b, vec![], TargetProcess::Nil), TargetProcess::output(b, vec![n("k")])),
        );
        assert_eq!(canonicalize(&t1), canonicalize(&t2));
    }

    #[test]
    fn replicated_input_persists() {
        let t = TargetProcess::par(out("c", &[]), TargetProcess::rep_input(n("c"), vec![], out("d", &[])));
        let rs = target_reductions(&canonicalize(&t)).unwrap();
        assert_eq!(rs.len(), 1);
        assert!(rs[0].info.replicated);
        let expected = TargetProcess::par(out("d", &[]), TargetProcess::rep_input(n("c"), vec![], out("d", &[])));
        assert_eq!(rs[0].target, canonicalize(&expected));
    }
}
