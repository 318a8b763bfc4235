//! Active learning of concepts from membership and preference queries.

pub mod atom;
pub mod consistency;
pub mod dfa;
pub mod error;
pub mod family;
pub mod hasse;
pub mod knowledge;
pub mod label;
pub mod learner;
pub mod monotone;
pub mod oracles;
pub mod strategy;
pub mod targets;

pub use atom::{Alphabet, Atom, Coord, Symbol, Universe};
pub use consistency::{is_consistent, memrep_holds, Concept};
pub use error::{Error, Result};
pub use hasse::{build_hasse, detect_violations, HasseDiagram, Violation, ViolationKind, ViolationReport};
pub use knowledge::{Entry, EntryId, Fact, KnowledgeBase, Source};
pub use label::{MemLabel, PrefLabel};
