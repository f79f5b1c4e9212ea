//! Embedding realizations into host graphs.
//!
//! [`embed_backtracking`] is the exact oracle. The staged pipeline in
//! [`pipeline`] partitions the host into clusters, decomposes the cluster
//! graph into stars, covers the leftover vertices first and then places the
//! remaining bounded components star by star.

mod assign;
mod clusters;
mod distribute;
mod edits;
mod phase1;
pub mod pipeline;
pub(crate) mod search;

use serde::{Deserialize, Serialize};

use crate::graph::SimpleGraph;
use crate::sequences::DegreeSequence;

pub use assign::{assign_leftovers, AssignedVertex, Assignment};
pub use clusters::{build_cluster_graph, regularize_stars, ClusterPartition};
pub use distribute::{distribute_components, guaranteed_volume, Distribution, Distributor, Side, StarVacancy};
pub use edits::{embed_pattern_with_edits, embed_sequence, embed_with_edits, EditOutcome, SequenceEmbedding, SequenceOutcome};
pub use phase1::{phase1_cover, BipartitePiece, Occupancy, Phase1Report};
pub use pipeline::{
    embed_pipeline, PipelineFailure, PipelineInput, PipelineParams, PipelineStats, PipelineSuccess, Stage,
};

/// `mapping[u]` is the host image of pattern vertex `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingMap {
    pub mapping: Vec<usize>,
}

/// Why a map fails to be an edge-preserving injection.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapViolation {
    #[error("map has {got} entries for a pattern on {expected} vertices")]
    WrongLength { expected: usize, got: usize },
    #[error("vertex {vertex} maps to {image}, outside the host")]
    OutOfRange { vertex: usize, image: usize },
    #[error("vertices {first} and {second} both map to {image}")]
    NotInjective { first: usize, second: usize, image: usize },
    #[error("pattern edge ({u}, {v}) maps to a non-edge")]
    MissingEdge { u: usize, v: usize },
}

/// Validity checker for maps from any source: injectivity plus edge
/// preservation, checked directly.
pub fn check_embedding(
    pattern: &SimpleGraph,
    host: &SimpleGraph,
    map: &EmbeddingMap,
) -> Result<(), MapViolation> {
    let m = &map.mapping;
    if m.len() != pattern.vertex_count() {
        return Err(MapViolation::WrongLength {
            expected: pattern.vertex_count(),
            got: m.len(),
        });
    }
    let mut owner: Vec<Option<usize>> = vec![None; host.vertex_count()];
    for (u, &x) in m.iter().enumerate() {
        if x >= host.vertex_count() {
            return Err(MapViolation::OutOfRange { vertex: u, image: x });
        }
        if let Some(first) = owner[x] {
            return Err(MapViolation::NotInjective {
                first,
                second: u,
                image: x,
            });
        }
        owner[x] = Some(u);
    }
    for (u, v) in pattern.edges() {
        if !host.has_edge(m[u], m[v]) {
            return Err(MapViolation::MissingEdge { u, v });
        }
    }
    Ok(())
}

/// Result of an exact search. `Timeout` never means absence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedOutcome {
    Found(EmbeddingMap),
    Absent,
    Timeout,
}

impl EmbedOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, EmbedOutcome::Found(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            EmbedOutcome::Found(_) => "found",
            EmbedOutcome::Absent => "absent",
            EmbedOutcome::Timeout => "timeout",
        }
    }
}

/// Exact search for a copy of `pattern` in `host`, visiting at most
/// `budget` search nodes.
pub fn embed_backtracking(pattern: &SimpleGraph, host: &SimpleGraph, budget: u64) -> EmbedOutcome {
    let problem = search::Problem::new(pattern, host, budget);
    match search::solve(&problem).0 {
        search::SearchOutcome::Found(mapping) => EmbedOutcome::Found(EmbeddingMap { mapping }),
        search::SearchOutcome::Absent => EmbedOutcome::Absent,
        search::SearchOutcome::Timeout => EmbedOutcome::Timeout,
    }
}

/// All degrees odd and the host has a component of odd order. For a
/// spanning sequence (`seq.len() == v(host)`) this certifies that no
/// realization embeds: realizations of all-odd sequences only have even
/// components.
pub fn parity_obstruction(seq: &DegreeSequence, host: &SimpleGraph) -> bool {
    !seq.is_empty()
        && seq.degrees().iter().all(|d| d % 2 == 1)
        && host.components().iter().any(|c| c.len() % 2 == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching(k: usize) -> SimpleGraph {
        let mut g = SimpleGraph::new(2 * k);
        for i in 0..k {
            g.add_edge(2 * i, 2 * i + 1);
        }
        g
    }

    #[test]
    fn two_edges_into_c4() {
        let out = embed_backtracking(&matching(2), &SimpleGraph::cycle(4), 1000);
        let EmbedOutcome::Found(map) = out else {
            panic!("expected a map, got {out:?}")
        };
        assert!(check_embedding(&matching(2), &SimpleGraph::cycle(4), &map).is_ok());
    }

    #[test]
    fn two_edges_not_in_claw() {
        let claw = SimpleGraph::complete_bipartite(1, 3);
        assert_eq!(embed_backtracking(&matching(2), &claw, 1000), EmbedOutcome::Absent);
    }

    #[test]
    fn perfect_matching_not_in_lopsided_bipartite() {
        let host = SimpleGraph::complete_bipartite(3, 5);
        assert_eq!(embed_backtracking(&matching(4), &host, 1_000_000), EmbedOutcome::Absent);
    }

    #[test]
    fn tiny_budget_times_out_rather_than_claiming_absence() {
        // K4 minus an edge does not contain K4, but the root bounds do not
        // see it, so with a budget of one node the answer must be Timeout.
        let mut host = SimpleGraph::complete(5);
        host.remove_edge(0, 1);
        host.remove_edge(2, 3);
        host.remove_edge(1, 4);
        let out = embed_backtracking(&SimpleGraph::complete(4), &host, 1);
        assert_ne!(out, EmbedOutcome::Absent);
    }

    #[test]
    fn checker_catches_violations() {
        let p = matching(1);
        let h = SimpleGraph::from_edges(3, &[(0, 1)]).unwrap();
        let map = |m: Vec<usize>| EmbeddingMap { mapping: m };
        assert!(check_embedding(&p, &h, &map(vec![0, 1])).is_ok());
        assert!(matches!(
            check_embedding(&p, &h, &map(vec![0, 2])),
            Err(MapViolation::MissingEdge { .. })
        ));
        assert!(matches!(
            check_embedding(&p, &h, &map(vec![0, 0])),
            Err(MapViolation::NotInjective { .. })
        ));
        assert!(matches!(
            check_embedding(&p, &h, &map(vec![0, 7])),
            Err(MapViolation::OutOfRange { .. })
        ));
        assert!(matches!(
            check_embedding(&p, &h, &map(vec![0])),
            Err(MapViolation::WrongLength { .. })
        ));
    }

    #[test]
    fn parity_examples() {
        let ones = DegreeSequence::new(vec![1; 8]);
        let split = SimpleGraph::complete(3).disjoint_union(&SimpleGraph::complete(5));
        assert!(parity_obstruction(&ones, &split));
        assert!(!parity_obstruction(&ones, &SimpleGraph::complete(8)));
        let with_two = DegreeSequence::new(vec![1, 1, 2, 1, 1, 1, 1, 2]);
        assert!(!parity_obstruction(&with_two, &split));
    }
}
