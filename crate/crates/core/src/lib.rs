//! Encoding CSP into asynchronous name-passing CCS, with a state-space
//! explorer and checkers for the correctness criteria of such encodings.

pub mod ccs;
pub mod corpus;
pub mod criteria;
pub mod csp;
pub mod encoder;
pub mod equivalence;
pub mod explore;
pub mod name;
pub mod syntax;

pub use ccs::{canonicalize, target_has_success, target_reductions, CanonicalState, TargetProcess};
pub use csp::{source_barbs, source_has_success, source_transitions, Proc, SourceLabel, SourceProcess};
pub use name::Name;
pub use syntax::{parse_source, parse_target, print_source, print_target, ParseError};
pub use encoder::{encode, encode_central, encode_decentral, Coordinator};
