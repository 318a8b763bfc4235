pub mod automaton;
pub mod encode;
pub mod family;
pub mod prefix_tree;
pub mod sat;
pub mod synth;

pub use automaton::{Dfa, State, WordCounter};
pub use encode::SymmetryBreaking;
pub use family::DfaFamily;
pub use synth::{
    count_consistent, min_size_synthesize, synthesize, unsat_core, Enumeration, SynthOptions, Synthesizer,
};
