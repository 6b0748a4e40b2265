//! Interned names shared by both calculi.
//!
//! Every spelling is interned once in a process-wide table. A name belongs to
//! exactly one [`NameKind`]; the kinds are kept disjoint by spelling
//! conventions (source names start with a lowercase letter, reserved names
//! with `_`, generated names contain `#` or `.`).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NameKind {
    /// A channel name written in a CSP term.
    Source,
    /// A distinguished name of the encoding (the tau announcement name).
    Reserved,
    /// Names minted by the renaming policy or by an encoding run.
    Generated,
    /// CSP process variables.
    Variable,
}

struct Interner {
    ids: HashMap<&'static str, u32>,
    entries: Vec<(&'static str, NameKind)>,
}

fn interner() -> &'static RwLock<Interner> {
    static TABLE: OnceLock<RwLock<Interner>> = OnceLock::new();
    TABLE.get_or_init(|| {
        RwLock::new(Interner {
            ids: HashMap::new(),
            entries: Vec::new(),
        })
    })
}

/// An interned identifier. Equality and hashing are by id; ordering is by
/// spelling so that sorted collections print the same way in every run.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Name(u32);

impl Name {
    fn intern(spelling: &str, kind: NameKind) -> Name {
        if let Some(&id) = interner().read().unwrap().ids.get(spelling) {
            return Name(id);
        }
        let mut table = interner().write().unwrap();
        if let Some(&id) = table.ids.get(spelling) {
            return Name(id);
        }
        let leaked: &'static str = Box::leak(spelling.to_owned().into_boxed_str());
        let id = table.entries.len() as u32;
        table.entries.push((leaked, kind));
        table.ids.insert(leaked, id);
        Name(id)
    }

    /// A CSP channel name. Panics if the spelling is not a lowercase identifier.
    pub fn source(spelling: &str) -> Name {
        assert!(
            is_source_spelling(spelling),
            "`{spelling}` is not a valid source name"
        );
        Name::intern(spelling, NameKind::Source)
    }

    /// A CSP process variable (uppercase identifier).
    pub fn variable(spelling: &str) -> Name {
        assert!(
            is_variable_spelling(spelling),
            "`{spelling}` is not a valid process variable"
        );
        Name::intern(spelling, NameKind::Variable)
    }

    pub fn reserved(spelling: &str) -> Name {
        assert!(spelling.starts_with('_'));
        Name::intern(spelling, NameKind::Reserved)
    }

    pub fn generated(spelling: &str) -> Name {
        assert!(spelling.contains('#') || spelling.contains('.'));
        Name::intern(spelling, NameKind::Generated)
    }

    /// Interns a spelling read back from printed target syntax, choosing the
    /// kind from the spelling conventions.
    pub fn from_target_spelling(spelling: &str) -> Name {
        if spelling.starts_with('_') {
            Name::reserved(spelling)
        } else if spelling.contains('#') || spelling.contains('.') {
            Name::generated(spelling)
        } else if is_variable_spelling(spelling) {
            Name::variable(spelling)
        } else {
            Name::source(spelling)
        }
    }

    pub fn as_str(self) -> &'static str {
        interner().read().unwrap().entries[self.0 as usize].0
    }

    pub fn kind(self) -> NameKind {
        interner().read().unwrap().entries[self.0 as usize].1
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

pub fn is_source_spelling(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub fn is_variable_spelling(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            Ordering::Equal
        } else {
            self.as_str()
                .cmp(other.as_str())
                .then(self.0.cmp(&other.0))
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}
