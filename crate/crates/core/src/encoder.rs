//! Translation of CSP terms into asynchronous name-passing CCS.
//!
//! Every source action becomes an *announcement* `act<c, req, lock, simu>`
//! travelling up the parallel tree. Parallel operators forward or pair up
//! announcements, and a coordinator at the root consumes them, asks the lock
//! and, if the lock answers true, tells the announcing sum (through `simu`)
//! to commit. The centralised coordinator serialises attempts with a single
//! token; the decentralised one handles announcements concurrently.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ccs::{Tag, TargetProcess as T};
use crate::csp::{validate, CspError, SourceProcess};
use crate::name::{Name, NameKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinator {
    Central,
    Decentral,
}

impl std::fmt::Display for Coordinator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Coordinator::Central => "central",
            Coordinator::Decentral => "decentral",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("renaming policy has no image for `{0}`")]
    MissingName(Name),
    #[error("process variable `{0}` is not bound")]
    UnboundVariable(Name),
    #[error(transparent)]
    Source(#[from] CspError),
}

/// The name announcing a step produced by concealment.
pub fn tau_name() -> Name {
    Name::reserved("_tau")
}

/// The announcement channel left free by the inner encoding.
pub fn top_act() -> Name {
    Name::reserved("_act")
}

/// Maps each source name `a` to the triple `(a.1, a.2, a.3)`: the reference
/// name carried in announcements, and the names used for announcements
/// arriving from the left and the right of a synchronising parallel operator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RenamingPolicy {
    map: BTreeMap<Name, [Name; 3]>,
}

pub fn make_renaming_policy(names: impl IntoIterator<Item = Name>) -> RenamingPolicy {
    let map = names
        .into_iter()
        .map(|a| {
            let image = [1, 2, 3].map(|i| Name::generated(&format!("{a}.{i}")));
            (a, image)
        })
        .collect();
    RenamingPolicy { map }
}

impl RenamingPolicy {
    pub fn image(&self, a: Name) -> Result<[Name; 3], EncodeError> {
        self.map.get(&a).copied().ok_or(EncodeError::MissingName(a))
    }

    /// The `i`-th projection (1-based) of the image of `a`.
    pub fn project(&self, a: Name, i: usize) -> Result<Name, EncodeError> {
        Ok(self.image(a)?[i - 1])
    }

    /// The source name whose reference name is `n`.
    pub fn source_of(&self, n: Name) -> Option<Name> {
        self.map.iter().find(|(_, img)| img[0] == n).map(|(a, _)| *a)
    }

    pub fn domain(&self) -> impl Iterator<Item = Name> + '_ {
        self.map.keys().copied()
    }

    /// No image is reserved and images of distinct names are disjoint.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.map.values().flatten().all(|n| {
            n.kind() == NameKind::Generated && !n.as_str().contains('#') && seen.insert(*n)
        })
    }
}

/// Monotone supply of fresh binder names, local to one encoding run.
#[derive(Debug, Default)]
pub struct Fresh {
    next: u32,
}

impl Fresh {
    pub fn name(&mut self, base: &str) -> Name {
        self.next += 1;
        Name::generated(&format!("{base}#{}", self.next))
    }
}

/// `l<T>` is `l(t,f).t<>`, `l<F>` is `l(t,f).f<>`.
pub fn expand_bool(l: Name, value: bool, fresh: &mut Fresh) -> T {
    let (t, f) = (fresh.name("t"), fresh.name("f"));
    T::input(l, vec![t, f], T::output(if value { t } else { f }, vec![]))
}

/// `l(v). if v then P else Q` is `(new t,f)(l<t,f> | t().P | f().Q)`.
pub fn expand_if(l: Name, then_branch: T, else_branch: T, fresh: &mut Fresh) -> T {
    expand_if_tagged(l, then_branch, else_branch, fresh, [Tag::None; 3])
}

fn expand_if_tagged(l: Name, then_branch: T, else_branch: T, fresh: &mut Fresh, tags: [Tag<Name>; 3]) -> T {
    let (t, f) = (fresh.name("t"), fresh.name("f"));
    T::res(
        vec![t, f],
        T::par_all([
            T::output(l, vec![t, f]).tagged(tags[0]),
            T::input(t, vec![], then_branch).tagged(tags[1]),
            T::input(f, vec![], else_branch).tagged(tags[2]),
        ]),
    )
}

/// `[x in A]P` is the product of `[x=a]P` over `a in A`.
pub fn expand_match_set(x: Name, allowed: &BTreeSet<Name>, body: &T) -> T {
    T::par_all(allowed.iter().map(|a| T::matching(x, *a, body.clone())))
}

fn lock_value(l: Name, value: bool, fresh: &mut Fresh) -> T {
    expand_bool(l, value, fresh).tagged(if value { Tag::LockPos } else { Tag::LockNeg })
}

fn send_bool(s: Name, value: bool, fresh: &mut Fresh) -> T {
    expand_bool(s, value, fresh).tagged(if value { Tag::BoolPos } else { Tag::BoolNeg })
}

/// Reference names (or tau) that announcements of `p` can carry.
pub fn announced(p: &SourceProcess, policy: &RenamingPolicy) -> Result<BTreeSet<Name>, EncodeError> {
    Ok(match p {
        SourceProcess::Stop | SourceProcess::Div | SourceProcess::Success | SourceProcess::Var(_) => BTreeSet::new(),
        SourceProcess::Mu(_, body) => announced(body, policy)?,
        SourceProcess::ExtSum(branches) => {
            let mut out = BTreeSet::new();
            for (a, cont) in branches {
                out.insert(policy.project(*a, 1)?);
                out.extend(announced(cont, policy)?);
            }
            out
        }
        SourceProcess::IntChoice(l, r) | SourceProcess::Par(l, r, _) => {
            let mut out = announced(l, policy)?;
            out.extend(announced(r, policy)?);
            out
        }
        SourceProcess::Conceal(q, z) => {
            let mut out = announced(q, policy)?;
            let z1 = policy.project(*z, 1)?;
            if out.remove(&z1) {
                out.insert(tau_name());
            }
            out
        }
        SourceProcess::Rename(q, f) => {
            let mut out = BTreeSet::new();
            for n in announced(q, policy)? {
                let mapped = match policy.source_of(n) {
                    Some(a) => policy.project(f.apply(a), 1)?,
                    None => n,
                };
                out.insert(mapped);
            }
            out
        }
    })
}

struct Encoder<'a> {
    policy: &'a RenamingPolicy,
    fresh: Fresh,
    vars: Vec<(Name, Name)>,
}

impl Encoder<'_> {
    fn enc(&mut self, p: &SourceProcess, act: Name) -> Result<T, EncodeError> {
        match p {
            SourceProcess::Stop => Ok(T::Nil),
            SourceProcess::Success => Ok(T::Success),
            SourceProcess::Div => {
                let rep = self.fresh.name("rep");
                Ok(T::res(
                    vec![rep],
                    T::par(T::output(rep, vec![]), T::rep_input(rep, vec![], T::output(rep, vec![])).tagged(Tag::Diverge)),
                ))
            }
            SourceProcess::Mu(x, body) => {
                let xn = self.fresh.name("x");
                self.vars.push((*x, xn));
                let inner = self.enc(body, act);
                self.vars.pop();
                Ok(T::res(
                    vec![xn],
                    T::par(T::output(xn, vec![]), T::rep_input(xn, vec![], inner?).tagged(Tag::Unfold)),
                ))
            }
            SourceProcess::Var(x) => {
                let (_, xn) = self
                    .vars
                    .iter()
                    .rev()
                    .find(|(v, _)| v == x)
                    .ok_or(EncodeError::UnboundVariable(*x))?;
                Ok(T::output(*xn, vec![]))
            }
            SourceProcess::IntChoice(l, r) => {
                let mu = self.fresh.name("mu");
                let (pl, pr) = (self.enc(l, act)?, self.enc(r, act)?);
                Ok(T::res(
                    vec![mu],
                    T::par_all([
                        T::input(mu, vec![], pl).tagged(Tag::Choice),
                        T::input(mu, vec![], pr).tagged(Tag::Choice),
                        T::output(mu, vec![]),
                    ]),
                ))
            }
            SourceProcess::ExtSum(branches) => self.sum(branches, act),
            SourceProcess::Par(l, r, sync) => self.parallel(l, r, sync, act),
            SourceProcess::Conceal(q, z) => {
                let z1 = self.policy.project(*z, 1)?;
                let others: BTreeSet<Name> = announced(q, self.policy)?.into_iter().filter(|n| *n != z1).collect();
                self.relabel(q, act, |c, args, bridge| {
                    T::par(
                        T::matching(c, z1, T::output(bridge, [vec![tau_name()], args.to_vec()].concat())),
                        expand_match_set(c, &others, &T::output(bridge, [vec![c], args.to_vec()].concat())),
                    )
                })
            }
            SourceProcess::Rename(q, f) => {
                let mut pairs = Vec::new();
                for (x, z) in f.pairs() {
                    pairs.push((self.policy.project(x, 1)?, self.policy.project(z, 1)?));
                }
                let dom: BTreeSet<Name> = pairs.iter().map(|(x, _)| *x).collect();
                let others: BTreeSet<Name> = announced(q, self.policy)?.into_iter().filter(|n| !dom.contains(n)).collect();
                self.relabel(q, act, move |c, args, bridge| {
                    T::par(
                        T::par_all(
                            pairs
                                .iter()
                                .map(|(x1, z1)| T::matching(c, *x1, T::output(bridge, [vec![*z1], args.to_vec()].concat()))),
                        ),
                        expand_match_set(c, &others, &T::output(bridge, [vec![c], args.to_vec()].concat())),
                    )
                })
            }
        }
    }

    /// Shared shape of concealment and renaming:
    /// `(new act')((new act)(enc(q) | !act(c,r,l,s).route) | !act'(x).outer<x>)`.
    fn relabel(
        &mut self,
        q: &SourceProcess,
        act: Name,
        route: impl FnOnce(Name, &[Name], Name) -> T,
    ) -> Result<T, EncodeError> {
        let inner_act = self.fresh.name("act");
        let bridge = self.fresh.name("act'");
        let body = self.enc(q, inner_act)?;
        let (c, args) = self.announcement_params();
        let routed = route(c, &args, bridge);
        let xs = self.params(4);
        Ok(T::res(
            vec![bridge],
            T::par(
                T::res(
                    vec![inner_act],
                    T::par(body, T::rep_input(inner_act, [vec![c], args].concat(), routed)),
                ),
                T::rep_input(bridge, xs.clone(), T::output(act, xs)),
            ),
        ))
    }

    fn announcement_params(&mut self) -> (Name, Vec<Name>) {
        (self.fresh.name("c"), vec![self.fresh.name("r"), self.fresh.name("l"), self.fresh.name("s")])
    }

    fn params(&mut self, n: usize) -> Vec<Name> {
        (0..n).map(|_| self.fresh.name("y")).collect()
    }

    fn sum(&mut self, branches: &[(crate::name::Name, crate::csp::Proc)], act: Name) -> Result<T, EncodeError> {
        let req = self.fresh.name("req");
        let lock = self.fresh.name("lock");
        let mut names = vec![req, lock];
        let mut parts = vec![T::input(req, vec![], lock_value(lock, true, &mut self.fresh))];
        for (a, cont) in branches {
            let s = self.fresh.name("s");
            names.push(s);
            let a1 = self.policy.project(*a, 1)?;
            parts.push(T::output(act, vec![a1, req, lock, s]).tagged(Tag::Announce));
            let body = self.enc(cont, act)?;
            parts.push(self.sum_receiver(s, req, lock, body));
        }
        Ok(T::res(names, T::par_all(parts)))
    }

    /// `!s(v). if v then (body | !req().lock<F>) else req().lock<T>`, with the
    /// replicated Boolean receive unrolled into a re-arming loop on `k`.
    fn sum_receiver(&mut self, s: Name, req: Name, lock: Name, body: T) -> T {
        let k = self.fresh.name("k");
        let once = |enc: &mut Self| {
            let commit = T::par(body.clone(), T::rep_input(req, vec![], lock_value(lock, false, &mut enc.fresh)));
            let reopen = T::par(
                T::input(req, vec![], lock_value(lock, true, &mut enc.fresh)),
                T::output(k, vec![]),
            );
            expand_if(s, commit, reopen, &mut enc.fresh)
        };
        let first = once(self);
        let again = once(self);
        T::res(vec![k], T::par(first, T::rep_input(k, vec![], again)))
    }

    fn parallel(&mut self, l: &SourceProcess, r: &SourceProcess, sync: &BTreeSet<Name>, act: Name) -> Result<T, EncodeError> {
        let bridge = self.fresh.name("act'");
        let mut sync_imgs = Vec::new();
        for a in sync {
            sync_imgs.push(self.policy.image(*a)?);
        }
        let sync1: BTreeSet<Name> = sync_imgs.iter().map(|img| img[0]).collect();
        let mut visible = announced(l, self.policy)?;
        visible.extend(announced(r, self.policy)?);
        let pass: BTreeSet<Name> = visible.difference(&sync1).copied().collect();

        let side = |enc: &mut Self, q: &SourceProcess, proj: usize| -> Result<T, EncodeError> {
            let inner_act = enc.fresh.name("act");
            let body = enc.enc(q, inner_act)?;
            let (c, args) = enc.announcement_params();
            let routed = T::par(
                T::par_all(sync_imgs.iter().map(|img| T::matching(c, img[0], T::output(img[proj], args.clone())))),
                expand_match_set(c, &pass, &T::output(bridge, [vec![c], args.clone()].concat())),
            );
            Ok(T::res(
                vec![inner_act],
                T::par(body, T::rep_input(inner_act, [vec![c], args].concat(), routed)),
            ))
        };
        let left = side(self, l, 1)?;
        let right = side(self, r, 2)?;
        let mut parts = vec![left, right];
        for img in &sync_imgs {
            parts.push(self.synch(*img, act));
        }
        let xs = self.params(4);
        parts.push(T::rep_input(bridge, xs.clone(), T::output(act, xs)));
        let mut restricted = vec![bridge];
        for img in &sync_imgs {
            restricted.push(img[1]);
            restricted.push(img[2]);
        }
        Ok(T::res(restricted, T::par_all(parts)))
    }

    /// Pairs every left announcement on `img[1]` with every right
    /// announcement on `img[2]`, creating a combined announcement and its
    /// simulation manager for each pair.
    fn synch(&mut self, img: [Name; 3], act: Name) -> T {
        let next = self.fresh.name("mt");
        let syn = self.fresh.name("syn");
        let (lreq, llock, lsimu) = (self.fresh.name("lreq"), self.fresh.name("llock"), self.fresh.name("lsimu"));
        let (rreq, rlock, rsimu) = (self.fresh.name("rreq"), self.fresh.name("rlock"), self.fresh.name("rsimu"));
        let syn_bridge = self.fresh.name("syn'");
        let (req, lock, simu) = (self.fresh.name("req"), self.fresh.name("lock"), self.fresh.name("s"));
        let sim = self.sim([lreq, llock, lsimu], [rreq, rlock, rsimu], [req, lock, simu]);
        let combine = T::rep_input(
            syn,
            vec![rreq, rlock, rsimu],
            T::par(
                T::res(
                    vec![req, lock, simu],
                    T::par(T::output(act, vec![img[0], req, lock, simu]).tagged(Tag::Announce), sim),
                ),
                T::output(syn_bridge, vec![rreq, rlock, rsimu]),
            ),
        );
        let syn2 = self.fresh.name("syn");
        let xs = self.params(3);
        let handover = T::res(
            vec![syn2],
            T::par(T::output(next, vec![syn2]), T::rep_input(syn_bridge, xs.clone(), T::output(syn2, xs))),
        );
        let per_left = T::input(img[1], vec![lreq, llock, lsimu], T::res(vec![syn_bridge], T::par(combine, handover)));
        T::res(
            vec![next],
            T::par(T::output(next, vec![img[2]]), T::rep_input(next, vec![syn], per_left)),
        )
    }

    /// Manager for one combined announcement: on request, asks the left lock,
    /// then the right lock, answers its own lock accordingly and relays the
    /// simulation decision to both sides.
    fn sim(&mut self, left: [Name; 3], right: [Name; 3], own: [Name; 3]) -> T {
        let [lreq, llock, lsimu] = left;
        let [rreq, rlock, rsimu] = right;
        let [req, lock, simu] = own;
        let rearm = self.fresh.name("l'");
        let f = &mut self.fresh;
        let refuse_forever = |f: &mut Fresh| T::rep_input(req, vec![], lock_value(lock, false, f));

        let committed = T::par_all([send_bool(lsimu, true, f), send_bool(rsimu, true, f), refuse_forever(f)]);
        let retry = T::par_all([send_bool(lsimu, false, f), send_bool(rsimu, false, f), T::output(rearm, vec![])]);
        let decide = expand_if(simu, committed, retry, f);
        let both = T::par(lock_value(lock, true, f), decide);
        let right_refused = T::par_all([lock_value(lock, false, f), send_bool(lsimu, false, f), refuse_forever(f)]);
        let ask_right = T::par(T::output(rreq, vec![]), expand_if(rlock, both, right_refused, f));
        let left_refused = T::par(lock_value(lock, false, f), refuse_forever(f));
        let ask_left = T::par(T::output(lreq, vec![]), expand_if(llock, ask_right, left_refused, f));
        T::res(
            vec![rearm],
            T::par(
                T::output(rearm, vec![]),
                T::rep_input(rearm, vec![], T::input(req, vec![], ask_left)),
            ),
        )
    }
}

/// The inner encoding; its only free channel is [`top_act`].
pub fn encode_inner(p: &SourceProcess, policy: &RenamingPolicy) -> Result<T, EncodeError> {
    validate(p)?;
    let mut enc = Encoder { policy, fresh: Fresh::default(), vars: Vec::new() };
    enc.enc(p, top_act())
}

fn policy_for(p: &SourceProcess) -> RenamingPolicy {
    make_renaming_policy(crate::csp::all_names(p))
}

fn coordinator_body(coordinator: Coordinator, once: Name, fresh: &mut Fresh) -> T {
    let act = top_act();
    let (c, r, l, s) = (fresh.name("c"), fresh.name("r"), fresh.name("l"), fresh.name("s"));
    let commit = send_bool(s, true, fresh);
    let (then_branch, else_branch) = match coordinator {
        Coordinator::Central => (T::par(T::output(once, vec![]), commit), T::output(once, vec![])),
        Coordinator::Decentral => (commit, T::Nil),
    };
    let test = expand_if_tagged(
        l,
        then_branch,
        else_branch,
        fresh,
        [Tag::CoordQuery(c), Tag::CoordThen, Tag::CoordElse],
    );
    let handle = T::par(T::output(r, vec![]), test);
    match coordinator {
        Coordinator::Central => T::rep_input(
            once,
            vec![],
            T::input(act, vec![c, r, l, s], handle).tagged(Tag::CoordAnnounce),
        ),
        Coordinator::Decentral => T::rep_input(act, vec![c, r, l, s], handle).tagged(Tag::CoordAnnounce),
    }
}

/// Inner encoding under the chosen coordinator; the result is closed.
pub fn encode(p: &SourceProcess, coordinator: Coordinator) -> Result<T, EncodeError> {
    encode_with_policy(p, coordinator, &policy_for(p))
}

pub fn encode_with_policy(p: &SourceProcess, coordinator: Coordinator, policy: &RenamingPolicy) -> Result<T, EncodeError> {
    validate(p)?;
    let mut enc = Encoder { policy, fresh: Fresh::default(), vars: Vec::new() };
    let inner = enc.enc(p, top_act())?;
    let once = enc.fresh.name("o");
    let coord = coordinator_body(coordinator, once, &mut enc.fresh);
    Ok(match coordinator {
        Coordinator::Central => T::res(vec![top_act(), once], T::par_all([inner, T::output(once, vec![]), coord])),
        Coordinator::Decentral => T::res(vec![top_act()], T::par(inner, coord)),
    })
}

pub fn encode_central(p: &SourceProcess) -> Result<T, EncodeError> {
    encode(p, Coordinator::Central)
}

pub fn encode_decentral(p: &SourceProcess) -> Result<T, EncodeError> {
    encode(p, Coordinator::Decentral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccs::{canonicalize, target_reductions, CName};
    use crate::syntax::parse_source;

    fn src(text: &str) -> crate::csp::Proc {
        parse_source(text).unwrap()
    }

    #[test]
    fn policy_triples_are_disjoint_and_unreserved() {
        assert!(make_renaming_policy([]).is_well_formed());
        let p = make_renaming_policy([Name::source("a"), Name::source("b")]);
        assert!(p.is_well_formed());
        let [a1, a2, a3] = p.image(Name::source("a")).unwrap();
        assert_eq!((a1.as_str(), a2.as_str(), a3.as_str()), ("a.1", "a.2", "a.3"));
        assert_eq!(p.source_of(a1), Some(Name::source("a")));
    }

    #[test]
    fn boolean_expansions() {
        let mut f = Fresh::default();
        let l = Name::generated("l#0");
        let T::Input { chan, params, body, .. } = expand_bool(l, true, &mut f) else { panic!() };
        assert_eq!(chan, l);
        assert_eq!(*body, T::output(params[0], vec![]));
        let T::Input { params, body, .. } = expand_bool(l, false, &mut f) else { panic!() };
        assert_eq!(*body, T::output(params[1], vec![]));
    }

    #[test]
    fn if_construct_takes_the_then_branch_for_true() {
        let mut f = Fresh::default();
        let l = Name::generated("l#0");
        let then_b = T::output(Name::source("yes"), vec![]);
        let else_b = T::output(Name::source("no"), vec![]);
        let t = T::res(vec![l], T::par(expand_bool(l, true, &mut f), expand_if(l, then_b.clone(), else_b.clone(), &mut f)));
        let top_output = |s: &crate::ccs::CanonicalState, n: &str| {
            s.atoms().iter().any(|a| a.kind() == crate::ccs::AtomKind::Output && a.subject() == Some(CName::Free(Name::source(n))))
        };
        let mut frontier = vec![canonicalize(&t)];
        let (mut yes, mut no) = (false, false);
        while let Some(s) = frontier.pop() {
            yes |= top_output(&s, "yes");
            no |= top_output(&s, "no");
            frontier.extend(target_reductions(&s).unwrap().into_iter().map(|r| r.target));
        }
        assert!(yes && !no);
    }

    #[test]
    fn match_set_expansion() {
        let x = Name::generated("x#0");
        let body = T::Success;
        assert_eq!(expand_match_set(x, &BTreeSet::new(), &body), T::Nil);
        let a = Name::source("a");
        assert_eq!(expand_match_set(x, &[a].into(), &body), T::matching(x, a, T::Success));
        let b = Name::source("b");
        assert_eq!(
            expand_match_set(x, &[a, b].into(), &body),
            T::par(T::matching(x, a, T::Success), T::matching(x, b, T::Success))
        );
    }

    #[test]
    fn simple_cases_of_the_inner_encoding() {
        let pol = RenamingPolicy::default();
        assert_eq!(encode_inner(&src("STOP"), &pol).unwrap(), T::Nil);
        assert_eq!(encode_inner(&src("TICK"), &pol).unwrap(), T::Success);
        let T::Res(names, body) = encode_inner(&src("DIV"), &pol).unwrap() else { panic!() };
        let rep = names[0];
        assert_eq!(
            body.untagged(),
            T::par(T::output(rep, vec![]), T::rep_input(rep, vec![], T::output(rep, vec![])))
        );
        let T::Res(names, body) = encode_inner(&src("STOP |~| TICK"), &pol).unwrap() else { panic!() };
        let mu = names[0];
        assert_eq!(
            body.untagged(),
            T::par_all([T::input(mu, vec![], T::Nil), T::input(mu, vec![], T::Success), T::output(mu, vec![])])
        );
    }

    #[test]
    fn encodings_are_closed_in_subject_position() {
        for text in ["a -> STOP", "(a -> STOP) / a", "a -> TICK |[a]| a -> STOP", "rn { a -> b } a -> STOP", "mu X . a -> X"] {
            for c in [Coordinator::Central, Coordinator::Decentral] {
                let t = encode(&src(text), c).unwrap();
                assert!(t.free_subject_names().is_empty(), "{text} {c}: {:?}", t.free_subject_names());
            }
        }
    }

    #[test]
    fn inner_encoding_only_uses_the_top_announcement_channel() {
        let p = src("(a -> STOP [] b -> STOP) |[a]| a -> STOP");
        let t = encode_inner(&p, &policy_for(&p)).unwrap();
        assert_eq!(t.free_subject_names(), [top_act()].into());
    }

    #[test]
    fn coordinators_differ_only_in_the_token() {
        let p = src("a -> STOP");
        let central = encode_central(&p).unwrap();
        let decentral = encode_decentral(&p).unwrap();
        let T::Res(cn, cb) = &central else { panic!() };
        let T::Res(dn, _) = &decentral else { panic!() };
        assert_eq!(cn.len(), 2);
        assert_eq!(dn.len(), 1);
        assert!(cb.size() > 1);
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let p = SourceProcess::Var(Name::variable("X"));
        assert!(matches!(encode_central(&p), Err(EncodeError::Source(_))));
    }

    #[test]
    fn announced_names_track_concealment_and_renaming() {
        let p = src("(a -> STOP [] b -> STOP) / a");
        let pol = policy_for(&p);
        let got = announced(&p, &pol).unwrap();
        assert_eq!(got, [tau_name(), pol.project(Name::source("b"), 1).unwrap()].into());
        let p = src("rn { a -> c } a -> STOP");
        let pol = policy_for(&p);
        assert_eq!(announced(&p, &pol).unwrap(), [pol.project(Name::source("c"), 1).unwrap()].into());
    }
}
