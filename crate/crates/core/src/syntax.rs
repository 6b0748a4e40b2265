//! Concrete syntax for both calculi.
//!
//! Source terms:
//!
//! ```text
//! STOP | DIV | TICK | X | mu X . P
//! a -> P [] b -> Q        external choice over prefixes
//! P |~| Q                 internal choice
//! P |[a, b]| Q            parallel, synchronising on {a, b}
//! P / a                   concealment
//! rn { a -> b } P         renaming
//! ```
//!
//! Prefix binds tightest, then `/` and `rn`, then `[]`, then `|~|`, then
//! `|[..]|`. A source text may start with definitions `NAME = term;` that are
//! inlined into later definitions and the final term.
//!
//! Target terms: `(new a,b) P`, `c(x,y).P`, `!c(x).P`, `c<x,y>`, `[x=y]P`,
//! `0`, `TICK`, `P | Q`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::ccs::TargetProcess;
use crate::csp::{Proc, Renaming, SourceProcess};
use crate::name::{is_source_spelling, is_variable_spelling, Name};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: &[&str] = &[
    "|[", "]|", "|~|", "[]", "->", "(", ")", "{", "}", "[", "]", "|", "/", ".", ",", "=", ";", "<", ">", "!",
];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() {
                let d = chars[i];
                let dotted = d == '.' && chars.get(i + 1).is_some_and(|e| e.is_ascii_digit());
                if d.is_ascii_alphanumeric() || d == '_' || d == '#' || d == '\'' || dotted {
                    i += 1;
                } else {
                    break;
                }
            }
            let word: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(word), line, col });
            col += i - start;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        // "[]" directly followed by "|" is the empty synchronisation set "|[]|"
        let sym = SYMBOLS.iter().find(|s| rest.starts_with(**s));
        match sym {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), line, col });
                i += s.len();
                col += s.len();
            }
            None => {
                return Err(ParseError { line, col, message: format!("unexpected character `{c}`") });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = &self.toks[self.pos];
        Err(ParseError { line: t.line, col: t.col, message: message.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(w) => {
                self.bump();
                Ok(w)
            }
            other => self.err(format!("expected identifier, found {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(w) => format!("`{w}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_owned(),
    }
}

const SOURCE_KEYWORDS: &[&str] = &["STOP", "DIV", "TICK", "mu", "rn"];

struct SourceParser {
    p: Parser,
    defs: HashMap<String, Proc>,
    bound: Vec<Name>,
}

impl SourceParser {
    fn channel(&mut self) -> Result<Name, ParseError> {
        let w = self.p.ident()?;
        if !is_source_spelling(&w) || SOURCE_KEYWORDS.contains(&w.as_str()) {
            self.p.pos -= 1;
            return self.p.err(format!("`{w}` is not a channel name"));
        }
        Ok(Name::source(&w))
    }

    fn channel_list(&mut self, close: &str) -> Result<BTreeSet<Name>, ParseError> {
        let mut set = BTreeSet::new();
        if self.p.eat(close) {
            return Ok(set);
        }
        loop {
            set.insert(self.channel()?);
            if self.p.eat(close) {
                return Ok(set);
            }
            self.p.expect(",")?;
        }
    }

    fn par(&mut self) -> Result<Proc, ParseError> {
        let mut left = self.ichoice()?;
        loop {
            let sync = if self.p.is_sym("|[") {
                self.p.bump();
                self.channel_list("]|")?
            } else if self.p.is_sym("|") && matches!(self.p.peek_at(1), Tok::Sym("[]")) && matches!(self.p.peek_at(2), Tok::Sym("|")) {
                self.p.bump();
                self.p.bump();
                self.p.bump();
                BTreeSet::new()
            } else {
                return Ok(left);
            };
            let right = self.ichoice()?;
            left = Arc::new(SourceProcess::Par(left, right, sync));
        }
    }

    fn ichoice(&mut self) -> Result<Proc, ParseError> {
        let mut left = self.sum()?;
        while self.p.eat("|~|") {
            let right = self.sum()?;
            left = Arc::new(SourceProcess::IntChoice(left, right));
        }
        Ok(left)
    }

    fn sum(&mut self) -> Result<Proc, ParseError> {
        let first = self.hide()?;
        if !self.p.is_sym("[]") {
            return Ok(first);
        }
        let mut branches = Vec::new();
        let mut operand = first;
        loop {
            match &*operand {
                SourceProcess::ExtSum(bs) => branches.extend(bs.iter().cloned()),
                _ => return self.p.err("operands of `[]` must be prefixed processes"),
            }
            if !self.p.eat("[]") {
                break;
            }
            operand = self.hide()?;
        }
        Ok(Arc::new(SourceProcess::ExtSum(branches)))
    }

    fn hide(&mut self) -> Result<Proc, ParseError> {
        if matches!(self.p.peek(), Tok::Ident(w) if w == "rn") {
            self.p.bump();
            self.p.expect("{")?;
            let mut pairs = Vec::new();
            if !self.p.eat("}") {
                loop {
                    let from = self.channel()?;
                    self.p.expect("->")?;
                    let to = self.channel()?;
                    pairs.push((from, to));
                    if self.p.eat("}") {
                        break;
                    }
                    self.p.expect(",")?;
                }
            }
            let body = self.hide()?;
            return Ok(Arc::new(SourceProcess::Rename(body, Renaming::new(pairs))));
        }
        let mut p = self.prefix()?;
        while self.p.eat("/") {
            let a = self.channel()?;
            p = Arc::new(SourceProcess::Conceal(p, a));
        }
        Ok(p)
    }

    fn prefix(&mut self) -> Result<Proc, ParseError> {
        if let Tok::Ident(w) = self.p.peek() {
            if is_source_spelling(w) && !SOURCE_KEYWORDS.contains(&w.as_str()) && matches!(self.p.peek_at(1), Tok::Sym("->")) {
                let a = self.channel()?;
                self.p.bump();
                let cont = self.prefix()?;
                return Ok(Arc::new(SourceProcess::ExtSum(vec![(a, cont)])));
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Proc, ParseError> {
        if self.p.eat("(") {
            let p = self.par()?;
            self.p.expect(")")?;
            return Ok(p);
        }
        let w = match self.p.peek().clone() {
            Tok::Ident(w) => w,
            other => return self.p.err(format!("expected a process, found {}", describe(&other))),
        };
        match w.as_str() {
            "STOP" => {
                self.p.bump();
                Ok(Arc::new(SourceProcess::Stop))
            }
            "DIV" => {
                self.p.bump();
                Ok(Arc::new(SourceProcess::Div))
            }
            "TICK" => {
                self.p.bump();
                Ok(Arc::new(SourceProcess::Success))
            }
            "mu" => {
                self.p.bump();
                let v = self.p.ident()?;
                if !is_variable_spelling(&v) || SOURCE_KEYWORDS.contains(&v.as_str()) {
                    self.p.pos -= 1;
                    return self.p.err(format!("`{v}` is not a process variable"));
                }
                self.p.expect(".")?;
                let x = Name::variable(&v);
                self.bound.push(x);
                let body = self.par();
                self.bound.pop();
                Ok(Arc::new(SourceProcess::Mu(x, body?)))
            }
            _ if is_variable_spelling(&w) => {
                let x = Name::variable(&w);
                if self.bound.contains(&x) {
                    self.p.bump();
                    Ok(Arc::new(SourceProcess::Var(x)))
                } else if let Some(def) = self.defs.get(&w) {
                    self.p.bump();
                    Ok(def.clone())
                } else {
                    self.p.err(format!("process variable `{w}` is not bound by an enclosing mu or a definition"))
                }
            }
            _ if is_source_spelling(&w) => self.p.err(format!("expected `->` after `{w}`")),
            _ => self.p.err(format!("unexpected `{w}`")),
        }
    }
}

/// Parses a source text: optional definitions `NAME = term;` followed by the
/// main term.
pub fn parse_source(text: &str) -> Result<Proc, ParseError> {
    let mut sp = SourceParser { p: Parser { toks: lex(text)?, pos: 0 }, defs: HashMap::new(), bound: Vec::new() };
    while let (Tok::Ident(w), Tok::Sym("=")) = (sp.p.peek().clone(), sp.p.peek_at(1).clone()) {
        if !is_variable_spelling(&w) || SOURCE_KEYWORDS.contains(&w.as_str()) {
            return sp.p.err(format!("`{w}` cannot name a definition"));
        }
        sp.p.bump();
        sp.p.bump();
        let body = sp.par()?;
        sp.p.expect(";")?;
        sp.defs.insert(w, body);
    }
    let p = sp.par()?;
    if sp.p.peek() != &Tok::Eof {
        return sp.p.err(format!("unexpected {} after term", describe(sp.p.peek())));
    }
    Ok(p)
}

const LVL_PAR: u8 = 0;
const LVL_ICHOICE: u8 = 1;
const LVL_SUM: u8 = 2;
const LVL_HIDE: u8 = 3;
const LVL_PREFIX: u8 = 4;

fn source_level(p: &SourceProcess) -> u8 {
    match p {
        SourceProcess::Par(..) => LVL_PAR,
        SourceProcess::IntChoice(..) => LVL_ICHOICE,
        SourceProcess::ExtSum(bs) if bs.len() > 1 => LVL_SUM,
        SourceProcess::Conceal(..) | SourceProcess::Rename(..) => LVL_HIDE,
        SourceProcess::ExtSum(_) => LVL_PREFIX,
        _ => 5,
    }
}

/// Prints a left operand of an infix or postfix operator; a `mu` there would
/// extend over the rest of the text.
fn print_left(p: &SourceProcess, ctx: u8, out: &mut String) {
    print_src(p, if matches!(p, SourceProcess::Mu(..)) { LVL_PREFIX + 1 } else { ctx }, out);
}

fn print_src(p: &SourceProcess, ctx: u8, out: &mut String) {
    let wrap = source_level(p) < ctx || matches!(p, SourceProcess::Mu(..)) && ctx > 0;
    if wrap {
        out.push('(');
    }
    match p {
        SourceProcess::Stop => out.push_str("STOP"),
        SourceProcess::Div => out.push_str("DIV"),
        SourceProcess::Success => out.push_str("TICK"),
        SourceProcess::Var(x) => out.push_str(x.as_str()),
        SourceProcess::Mu(x, body) => {
            let _ = write!(out, "mu {x} . ");
            print_src(body, LVL_PAR, out);
        }
        SourceProcess::ExtSum(bs) => {
            for (i, (a, cont)) in bs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" [] ");
                }
                let _ = write!(out, "{a} -> ");
                print_src(cont, LVL_PREFIX, out);
            }
        }
        SourceProcess::IntChoice(l, r) => {
            print_left(l, LVL_ICHOICE, out);
            out.push_str(" |~| ");
            print_src(r, LVL_SUM, out);
        }
        SourceProcess::Par(l, r, sync) => {
            print_left(l, LVL_PAR, out);
            out.push_str(" |[");
            let names: Vec<&str> = sync.iter().map(|n| n.as_str()).collect();
            out.push_str(&names.join(", "));
            out.push_str("]| ");
            print_src(r, LVL_ICHOICE, out);
        }
        SourceProcess::Conceal(q, a) => {
            // a renaming operand would absorb the `/`
            let inner = if matches!(&**q, SourceProcess::Rename(..)) { LVL_PREFIX + 1 } else { LVL_HIDE };
            print_left(q, inner, out);
            let _ = write!(out, " / {a}");
        }
        SourceProcess::Rename(q, f) => {
            let pairs: Vec<String> = f.pairs().map(|(a, b)| format!("{a} -> {b}")).collect();
            let _ = write!(out, "rn {{ {} }} ", pairs.join(", "));
            print_src(q, LVL_HIDE, out);
        }
    }
    if wrap {
        out.push(')');
    }
}

pub fn print_source(p: &SourceProcess) -> String {
    let mut out = String::new();
    print_src(p, LVL_PAR, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Target syntax

fn target_name(p: &mut Parser) -> Result<Name, ParseError> {
    let w = p.ident()?;
    if w == "new" || w == "TICK" {
        p.pos -= 1;
        return p.err(format!("`{w}` is not a name"));
    }
    Ok(Name::from_target_spelling(&w))
}

fn target_names(p: &mut Parser, close: &str) -> Result<Vec<Name>, ParseError> {
    let mut out = Vec::new();
    if p.eat(close) {
        return Ok(out);
    }
    loop {
        out.push(target_name(p)?);
        if p.eat(close) {
            return Ok(out);
        }
        p.expect(",")?;
    }
}

fn target_par(p: &mut Parser) -> Result<TargetProcess, ParseError> {
    let mut items = vec![target_prefixed(p)?];
    while p.eat("|") {
        items.push(target_prefixed(p)?);
    }
    Ok(TargetProcess::par_all(items))
}

fn target_prefixed(p: &mut Parser) -> Result<TargetProcess, ParseError> {
    if p.is_sym("(") {
        if matches!(p.peek_at(1), Tok::Ident(w) if w == "new") {
            p.bump();
            p.bump();
            let names = target_names(p, ")")?;
            let body = target_prefixed(p)?;
            return Ok(TargetProcess::Res(names, Box::new(body)));
        }
        p.bump();
        let inner = target_par(p)?;
        p.expect(")")?;
        return Ok(inner);
    }
    if p.eat("[") {
        let x = target_name(p)?;
        p.expect("=")?;
        let y = target_name(p)?;
        p.expect("]")?;
        let body = target_prefixed(p)?;
        return Ok(TargetProcess::matching(x, y, body));
    }
    if p.eat("!") {
        let chan = target_name(p)?;
        p.expect("(")?;
        let params = target_names(p, ")")?;
        p.expect(".")?;
        let body = target_prefixed(p)?;
        return Ok(TargetProcess::rep_input(chan, params, body));
    }
    match p.peek().clone() {
        Tok::Ident(w) if w == "0" => {
            p.bump();
            Ok(TargetProcess::Nil)
        }
        Tok::Ident(w) if w == "TICK" => {
            p.bump();
            Ok(TargetProcess::Success)
        }
        Tok::Ident(_) => {
            let chan = target_name(p)?;
            if p.eat("<") {
                let args = target_names(p, ">")?;
                Ok(TargetProcess::output(chan, args))
            } else if p.eat("(") {
                let params = target_names(p, ")")?;
                p.expect(".")?;
                let body = target_prefixed(p)?;
                Ok(TargetProcess::input(chan, params, body))
            } else {
                p.err(format!("expected `<` or `(` after `{chan}`"))
            }
        }
        other => p.err(format!("expected a process, found {}", describe(&other))),
    }
}

pub fn parse_target(text: &str) -> Result<TargetProcess, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = target_par(&mut p)?;
    if p.peek() != &Tok::Eof {
        return p.err(format!("unexpected {} after term", describe(p.peek())));
    }
    Ok(t)
}

fn join(names: &[Name]) -> String {
    names.iter().map(|n| n.as_str()).collect::<Vec<_>>().join(",")
}

fn print_tgt(t: &TargetProcess, guarded: bool, out: &mut String) {
    match t {
        TargetProcess::Nil => out.push('0'),
        TargetProcess::Success => out.push_str("TICK"),
        TargetProcess::Par(l, r) => {
            if guarded {
                out.push('(');
            }
            let left_nested = matches!(**l, TargetProcess::Par(..));
            if left_nested {
                out.push('(');
            }
            print_tgt(l, false, out);
            if left_nested {
                out.push(')');
            }
            out.push_str(" | ");
            print_tgt(r, false, out);
            if guarded {
                out.push(')');
            }
        }
        TargetProcess::Res(ns, b) => {
            let _ = write!(out, "(new {}) ", join(ns));
            print_tgt(b, true, out);
        }
        TargetProcess::Input { chan, params, body, .. } => {
            let _ = write!(out, "{chan}({}).", join(params));
            print_tgt(body, true, out);
        }
        TargetProcess::RepInput { chan, params, body, .. } => {
            let _ = write!(out, "!{chan}({}).", join(params));
            print_tgt(body, true, out);
        }
        TargetProcess::Output { chan, args, .. } => {
            let _ = write!(out, "{chan}<{}>", join(args));
        }
        TargetProcess::Match(x, y, b) => {
            let _ = write!(out, "[{x}={y}]");
            print_tgt(b, true, out);
        }
    }
}

/// Prints a target term; provenance tags are not part of the syntax.
pub fn print_target(t: &TargetProcess) -> String {
    let mut out = String::new();
    print_tgt(t, false, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{prefix, stop};

    fn a(s: &str) -> Name {
        Name::source(s)
    }

    #[test]
    fn parses_stop() {
        assert_eq!(*parse_source("STOP").unwrap(), SourceProcess::Stop);
    }

    #[test]
    fn parses_binary_sum() {
        let p = parse_source("a -> STOP [] b -> STOP").unwrap();
        assert_eq!(*p, SourceProcess::ExtSum(vec![(a("a"), stop()), (a("b"), stop())]));
    }

    #[test]
    fn parses_definitions() {
        let text = "P1 = STOP; P2 = STOP; P3 = STOP; P4 = STOP; P5 = STOP;\n\
                    (o -> P1 [] p -> P2) |[o,p]| (o -> P3 [] p -> P4 [] q -> P5)";
        let p = parse_source(text).unwrap();
        let left = Arc::new(SourceProcess::ExtSum(vec![(a("o"), stop()), (a("p"), stop())]));
        let right = Arc::new(SourceProcess::ExtSum(vec![(a("o"), stop()), (a("p"), stop()), (a("q"), stop())]));
        let sync: BTreeSet<Name> = [a("o"), a("p")].into_iter().collect();
        assert_eq!(*p, SourceProcess::Par(left, right, sync));
    }

    #[test]
    fn precedence() {
        let p = parse_source("a -> STOP / a |~| b -> STOP |[]| c -> STOP").unwrap();
        let SourceProcess::Par(l, _, sync) = &*p else { panic!("{p:?}") };
        assert!(sync.is_empty());
        let SourceProcess::IntChoice(ll, _) = &**l else { panic!() };
        assert_eq!(**ll, SourceProcess::Conceal(prefix(a("a"), stop()), a("a")));
    }

    #[test]
    fn rejects_unbound_variable() {
        let e = parse_source("a -> X").unwrap_err();
        assert_eq!((e.line, e.col), (1, 6));
    }

    #[test]
    fn rejects_empty_sum_operand() {
        assert!(parse_source("STOP [] a -> STOP").is_err());
        assert!(parse_source("a -> ").is_err());
    }

    #[test]
    fn reports_line_and_column() {
        let e = parse_source("a -> STOP\n  |~| %").unwrap_err();
        assert_eq!((e.line, e.col), (2, 7));
    }

    #[test]
    fn source_round_trips() {
        for text in [
            "mu X . a -> X",
            "(a -> STOP) / a",
            "rn { a -> b } a -> STOP",
            "(rn { a -> b } a -> STOP) / b",
            "a -> (b -> STOP [] c -> STOP)",
            "(a -> STOP |~| b -> STOP) |[a]| (mu Y . DIV |~| Y)",
            "a -> TICK |[a]| (a -> STOP |[]| b -> STOP)",
        ] {
            let p = parse_source(text).unwrap();
            let printed = print_source(&p);
            assert_eq!(parse_source(&printed).unwrap(), p, "{text} printed as {printed}");
        }
    }

    #[test]
    fn target_round_trips() {
        for text in [
            "(new a#1,b#1) (a#1<c> | !a#1(x#0).[x#0=c]TICK)",
            "c(x,y).(x<> | y<>) | 0",
            "(a.1<> | b.2()._tau<>) | act#3(c,r,l,s).0",
        ] {
            let t = parse_target(text).unwrap();
            let printed = print_target(&t);
            assert_eq!(parse_target(&printed).unwrap(), t, "{text} printed as {printed}");
        }
    }
}
