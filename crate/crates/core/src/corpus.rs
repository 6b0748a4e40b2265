//! A fixed set of small source terms the checks are run on, plus loading of
//! extra terms from a file.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csp::Proc;
use crate::syntax::{parse_source, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusTerm {
    pub id: String,
    pub term: String,
}

impl CorpusTerm {
    fn new(id: &str, term: &str) -> Self {
        CorpusTerm { id: id.into(), term: term.into() }
    }

    pub fn process(&self) -> Result<Proc, ParseError> {
        parse_source(&self.term)
    }
}

/// The two-sided choice with a shared partner used to show partial
/// commitments: o and p need both sides, q only the right one.
pub const PARTIAL_COMMITMENT: &str = "P1 = STOP; P2 = STOP; P3 = STOP; P4 = STOP; P5 = STOP;
(o -> P1 [] p -> P2) |[o,p]| (o -> P3 [] p -> P4 [] q -> P5)";

pub fn builtin() -> Vec<CorpusTerm> {
    vec![
        CorpusTerm::new("stop", "STOP"),
        CorpusTerm::new("tick", "TICK"),
        CorpusTerm::new("div", "DIV"),
        CorpusTerm::new("prefix", "a -> STOP"),
        CorpusTerm::new("loop", "mu X . a -> X"),
        CorpusTerm::new("silent-loop", "mu X . X"),
        CorpusTerm::new("sync-success", "a -> TICK |[a]| a -> STOP"),
        CorpusTerm::new("sync", "a -> STOP |[a]| a -> STOP"),
        CorpusTerm::new("hide", "(a -> STOP) / a"),
        CorpusTerm::new("rename", "rn { a -> b } a -> STOP"),
        CorpusTerm::new("internal-choice", "a -> STOP |~| b -> STOP"),
        CorpusTerm::new("interleave", "a -> STOP |[]| b -> STOP"),
        CorpusTerm::new("sync-or-leave", "(a -> TICK [] b -> STOP) |[a]| a -> STOP"),
        CorpusTerm::new("hidden-sync", "(a -> b -> STOP |[a]| a -> STOP) / a"),
        CorpusTerm::new("partial-commitment", PARTIAL_COMMITMENT),
    ]
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus file is not a JSON list of {{\"id\", \"term\"}} objects: {0}")]
    Format(#[from] serde_json::Error),
    #[error("corpus term `{id}`: {source}")]
    Parse { id: String, source: ParseError },
}

/// Reads extra terms, a JSON list of `{"id": .., "term": ..}` objects, and
/// checks that each parses.
pub fn load(text: &str) -> Result<Vec<CorpusTerm>, CorpusError> {
    let terms: Vec<CorpusTerm> = serde_json::from_str(text)?;
    for t in &terms {
        t.process().map_err(|source| CorpusError::Parse { id: t.id.clone(), source })?;
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_terms_parse_and_are_distinct() {
        let terms = builtin();
        assert!(terms.len() >= 12);
        let mut ids: Vec<_> = terms.iter().map(|t| t.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), terms.len());
        for t in &terms {
            t.process().unwrap_or_else(|e| panic!("{}: {e}", t.id));
        }
    }

    #[test]
    fn loading_reports_the_bad_term() {
        let ok = load(r#"[{"id": "x", "term": "a -> STOP"}]"#).unwrap();
        assert_eq!(ok[0].id, "x");
        let err = load(r#"[{"id": "bad", "term": "a -> "}]"#).unwrap_err();
        assert!(err.to_string().contains("bad"), "{err}");
        assert!(load("{}").is_err());
    }
}
