//! Realizing bounded-degree sequences as graphs with small components and
//! embedding them into dense host graphs.

#![forbid(unsafe_code)]

pub mod embed;
pub mod error;
mod flow;
pub mod gadgets;
pub mod graph;
pub mod harness;
pub mod sequences;
pub mod stars;
pub mod unbalanced;

pub use embed::{
    check_embedding, embed_backtracking, embed_pipeline, embed_sequence, embed_with_edits, parity_obstruction,
    EmbedOutcome, EmbeddingMap, PipelineInput, PipelineParams, Stage,
};
pub use error::{Error, Result};
pub use gadgets::{build_bounded_realization, verify_bounded_structure, GadgetRealization, StructureReport};
pub use graph::SimpleGraph;
pub use sequences::{
    ffactor_condition_holds, is_graphic, realize_bipartite, realize_graphic, zero_sum_split, BipartiteDemand,
    DegreeSequence, IntSequence,
};
pub use stars::{star_decompose, Star, StarDecomposition};
pub use unbalanced::{decompose_unbalanced, form_tuples, tuple_bias, ComponentList, UnbalancedBipartiteSeq};
