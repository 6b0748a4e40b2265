//! Random term generators shared by the property and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use csp2ccs::csp::Renaming;
use csp2ccs::{Name, Proc, SourceProcess, TargetProcess};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn n(s: &str) -> Name {
    Name::from_target_spelling(s)
}

/// Random arity-consistent target term. Free channels `f0`, `f1` and every
/// bound name carry no arguments; the free channel `g` carries one.
pub struct TargetGen {
    rng: StdRng,
    fresh: u32,
}

impl TargetGen {
    pub fn new(seed: u64) -> Self {
        TargetGen { rng: StdRng::seed_from_u64(seed), fresh: 0 }
    }

    fn fresh(&mut self) -> Name {
        self.fresh += 1;
        n(&format!("x{}", self.fresh))
    }

    fn plain(&mut self, scope: &[Name]) -> Name {
        let k = self.rng.gen_range(0..2 + scope.len());
        match k {
            0 => n("f0"),
            1 => n("f1"),
            _ => scope[k - 2],
        }
    }

    pub fn term(&mut self, depth: u32) -> TargetProcess {
        self.go(depth, &mut Vec::new())
    }

    fn go(&mut self, depth: u32, scope: &mut Vec<Name>) -> TargetProcess {
        let leaf = depth == 0 || self.rng.gen_bool(0.25);
        if leaf {
            return match self.rng.gen_range(0..5) {
                0 => TargetProcess::Nil,
                1 => TargetProcess::Success,
                2 | 3 => TargetProcess::output(self.plain(scope), vec![]),
                _ => {
                    let arg = self.plain(scope);
                    TargetProcess::output(n("g"), vec![arg])
                }
            };
        }
        match self.rng.gen_range(0..9) {
            0..=2 => TargetProcess::par(self.go(depth - 1, scope), self.go(depth - 1, scope)),
            3 => {
                let a = self.fresh();
                scope.push(a);
                let body = self.go(depth - 1, scope);
                scope.pop();
                TargetProcess::res(vec![a], body)
            }
            4 => {
                let c = self.plain(scope);
                let body = self.go(depth - 1, scope);
                TargetProcess::input(c, vec![], body)
            }
            5 => {
                let x = self.fresh();
                scope.push(x);
                let body = self.go(depth - 1, scope);
                scope.pop();
                TargetProcess::input(n("g"), vec![x], body)
            }
            6 => {
                let c = self.plain(scope);
                let body = self.go(depth - 1, scope);
                TargetProcess::rep_input(c, vec![], body)
            }
            7 => {
                let (x, y) = (self.plain(scope), self.plain(scope));
                let body = self.go(depth - 1, scope);
                TargetProcess::matching(x, y, body)
            }
            _ => {
                let a = self.plain(scope);
                let b = self.go(depth - 1, scope);
                TargetProcess::par(TargetProcess::output(a, vec![]), b)
            }
        }
    }
}

/// Random well-formed source term over the channels `a`, `b`, `c`.
/// Recursion variables only occur under an action prefix.
pub struct SourceGen {
    rng: StdRng,
}

impl SourceGen {
    pub fn new(seed: u64) -> Self {
        SourceGen { rng: StdRng::seed_from_u64(seed) }
    }

    fn chan(&mut self) -> Name {
        Name::source(["a", "b", "c"][self.rng.gen_range(0..3)])
    }

    pub fn term(&mut self, depth: u32) -> Proc {
        self.go(depth, &mut Vec::new())
    }

    /// `vars` holds the bound variables with whether a prefix separates the
    /// current position from their binder.
    fn go(&mut self, depth: u32, vars: &mut Vec<(Name, bool)>) -> Proc {
        let leaf = depth == 0 || self.rng.gen_bool(0.2);
        if leaf {
            let usable: Vec<Name> = vars.iter().filter(|v| v.1).map(|v| v.0).collect();
            let k = self.rng.gen_range(0..3 + usize::from(!usable.is_empty()));
            return Arc::new(match k {
                0 => SourceProcess::Stop,
                1 => SourceProcess::Div,
                2 => SourceProcess::Success,
                _ => SourceProcess::Var(usable[self.rng.gen_range(0..usable.len())]),
            });
        }
        Arc::new(match self.rng.gen_range(0..7) {
            0 | 1 => {
                let k = self.rng.gen_range(1..=3);
                let mut under: Vec<(Name, bool)> = vars.iter().map(|v| (v.0, true)).collect();
                SourceProcess::ExtSum((0..k).map(|_| (self.chan(), self.go(depth - 1, &mut under))).collect())
            }
            2 => SourceProcess::IntChoice(self.go(depth - 1, vars), self.go(depth - 1, vars)),
            3 => {
                let set: BTreeSet<Name> = (0..self.rng.gen_range(0..3)).map(|_| self.chan()).collect();
                SourceProcess::Par(self.go(depth - 1, vars), self.go(depth - 1, vars), set)
            }
            4 => SourceProcess::Conceal(self.go(depth - 1, vars), self.chan()),
            5 => {
                let (x, y) = (self.chan(), self.chan());
                SourceProcess::Rename(self.go(depth - 1, vars), Renaming::new([(x, y)]))
            }
            _ => {
                let x = Name::variable(["X", "Y", "Z"][vars.len().min(2)]);
                vars.push((x, false));
                let body = self.go(depth - 1, vars);
                vars.pop();
                SourceProcess::Mu(x, body)
            }
        })
    }
}

pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}
