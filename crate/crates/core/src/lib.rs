//! Grammar-constrained reachability over edge-labeled directed graphs.
//!
//! A pair of vertices `(s, t)` is accepted when some path from `s` to `t`
//! has a trace (concatenation of edge labels) in the language of a fixed
//! context-free grammar. This crate builds all-pairs indices for that
//! query and its variants:
//!
//! * [`sat`] — worklist saturation for CNF grammars, the cubic baseline;
//! * [`lin`] — terminal-anchored propagation for TALNF (linear) grammars,
//!   subcubic on sparse graphs;
//! * [`swd`] — a hash-consed witness DAG over either index, with explicit
//!   path extraction and straight-line-program output;
//! * [`lindist`] — shortest accepted path lengths with parent pointers,
//!   for linear grammars;
//! * [`oracle`] — naive reference implementations used by the test suites.

pub mod grammar;
pub mod graph;
pub mod index_io;
pub mod lin;
pub mod lindist;
pub mod oracle;
pub mod relations;
pub mod sat;
pub mod swd;

pub use grammar::{
    derives, parse_grammar, recognize, to_cnf, to_talnf, Grammar, GrammarBuilder, GrammarError,
    GrammarForm, NtId, Production, Symbol, TermId, TALNF_SIZE_FACTOR,
};
pub use graph::{parse_graph, Edge, GraphError, LabeledGraph, Path};
pub use lin::lin_build;
pub use lindist::{lindist_build, DistanceIndex, INFINITE_DISTANCE};
pub use oracle::{enumerate_accepted, naive_fixpoint, OracleError};
pub use relations::{
    extract_path, BuildStats, BuiltIndex, IndexError, RelationSet, WitnessRecord, WitnessTable,
};
pub use sat::sat_build;
pub use swd::{emit_slp, expand_explicit, swd_wrap, NodeId, Slp, SlpRule, WitnessDag};
