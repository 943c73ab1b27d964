//! Constraint graphs, multi-axis systems, their text format and the words they allow.

mod format;
mod graph;
mod system;
pub(crate) mod words;

pub use format::{format_system, load_system, parse_system, save_system};
pub use graph::{hard_square_graph, ConstraintGraph, MAX_COLOURS};
pub use system::{
    find_friendly_colours, hard_square_system, monomer_dimer_system, validate_system, AxisReport, ConstraintSystem,
    ValidationReport,
};
pub use words::{
    enumerate_helical_slab_words, enumerate_helical_slab_words_with_limits, enumerate_slab_words, enumerate_words,
    enumerate_words_with_limits, Boundary, ColoringWord, StateSpace, WordKind,
};
