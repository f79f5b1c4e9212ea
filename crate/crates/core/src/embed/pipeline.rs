//! The staged embedding pipeline.
//!
//! A realization of the input sequence is split into pieces: bounded
//! bipartite components, a remainder that is embedded directly by the exact
//! search, and isolated vertices. The host left after the direct step is cut
//! into clusters whose density graph is covered by stars. Exceptional
//! vertices are assigned to clusters and covered first; the remaining
//! pieces are spread over the stars and placed star by star, and anything
//! that did not fit is handed to one final exact search over all vacant
//! vertices. Every map is checked before it is returned.

use serde::{Deserialize, Serialize};

use super::assign::assign_leftovers;
use super::clusters::{build_cluster_graph, regularize_stars, ClusterPartition};
use super::distribute::{Distributor, Side, StarVacancy};
use super::phase1::{phase1_cover, BipartitePiece, Occupancy};
use super::search::{self, Bitset, Problem, SearchOutcome};
use super::{check_embedding, EmbeddingMap};
use crate::error::Error;
use crate::gadgets::build_bounded_realization;
use crate::graph::SimpleGraph;
use crate::sequences::{is_graphic, realize_graphic, DegreeSequence};
use crate::stars::{star_decompose, StarDecomposition};
use crate::unbalanced::{decompose_unbalanced, UnbalancedBipartiteSeq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Realize,
    PreEmbed,
    Clusters,
    Stars,
    Regularize,
    Assign,
    Phase1,
    Distribute,
    Phase2,
    Validate,
}

impl Stage {
    pub const ALL: [Stage; 10] = [
        Stage::Realize,
        Stage::PreEmbed,
        Stage::Clusters,
        Stage::Stars,
        Stage::Regularize,
        Stage::Assign,
        Stage::Phase1,
        Stage::Distribute,
        Stage::Phase2,
        Stage::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Realize => "realize",
            Stage::PreEmbed => "preembed",
            Stage::Clusters => "clusters",
            Stage::Stars => "stars",
            Stage::Regularize => "regularize",
            Stage::Assign => "assign",
            Stage::Phase1 => "phase1",
            Stage::Distribute => "distribute",
            Stage::Phase2 => "phase2",
            Stage::Validate => "validate",
        }
    }

    /// Stages completed before this one.
    pub fn predecessors(self) -> &'static [Stage] {
        &Stage::ALL[..self as usize]
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub enum PipelineInput {
    Graphic(DegreeSequence),
    Unbalanced(UnbalancedBipartiteSeq),
}

impl PipelineInput {
    pub fn len(&self) -> usize {
        match self {
            PipelineInput::Graphic(s) => s.len(),
            PipelineInput::Unbalanced(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_degree(&self) -> usize {
        match self {
            PipelineInput::Graphic(s) => s.max_degree(),
            PipelineInput::Unbalanced(s) => s.max_degree(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// Cluster size `m`.
    pub cluster_size: usize,
    /// Density threshold `d` of the cluster graph.
    pub density: f64,
    /// Degree margin `eta` used by the assignment rule.
    pub eta: f64,
    /// Leaf bound of the star decomposition.
    pub q: usize,
    pub seed: u64,
    /// Degree bound for the unbalanced decomposition; defaults to the
    /// sequence maximum.
    pub max_degree: Option<usize>,
    /// Host vertices that must stay unused by an unbalanced sequence.
    pub slack: usize,
    /// Node budget for each exact search inside the pipeline.
    pub star_budget: u64,
    /// Node budget for the final search over all vacant vertices.
    pub completion_budget: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            cluster_size: 6,
            density: 0.4,
            eta: 0.1,
            q: 1,
            seed: 0,
            max_degree: None,
            slack: 0,
            star_budget: 1_000_000,
            completion_budget: 1_000_000,
        }
    }
}

/// Counters describing one successful or failed run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub realization: String,
    pub pieces: usize,
    pub pre_embedded: usize,
    pub clusters: usize,
    pub dissolved_clusters: usize,
    pub stars: usize,
    pub discarded: usize,
    pub assigned: usize,
    pub phase1_fallbacks: usize,
    pub star_fallbacks: usize,
    pub completion_pieces: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineSuccess {
    pub pattern: SimpleGraph,
    pub map: EmbeddingMap,
    pub stats: PipelineStats,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("pipeline failed at stage {stage}: {reason}")]
pub struct PipelineFailure {
    pub stage: Stage,
    pub reason: String,
    /// The realization, when one was built before the failure.
    pub pattern: Option<SimpleGraph>,
    pub stats: PipelineStats,
}

struct Run<'a> {
    host: &'a SimpleGraph,
    params: &'a PipelineParams,
    pattern: Option<SimpleGraph>,
    stats: PipelineStats,
}

impl Run<'_> {
    fn fail(&self, stage: Stage, reason: impl ToString) -> PipelineFailure {
        PipelineFailure {
            stage,
            reason: reason.to_string(),
            pattern: self.pattern.clone(),
            stats: self.stats.clone(),
        }
    }

    fn seed(&self, salt: u64) -> u64 {
        self.params.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

/// The realization split into the parts the pipeline treats differently.
struct Parts {
    pattern: SimpleGraph,
    pieces: Vec<BipartitePiece>,
    direct: Vec<usize>,
    isolated: Vec<usize>,
}

fn split_by_components(pattern: SimpleGraph) -> Parts {
    let mut pieces = Vec::new();
    let mut direct = Vec::new();
    let mut isolated = Vec::new();
    for comp in pattern.components() {
        if comp.len() == 1 {
            isolated.push(comp[0]);
            continue;
        }
        match BipartitePiece::new(pattern.induced(&comp), comp.clone()) {
            Some(piece) => pieces.push(piece),
            None => direct.extend(comp),
        }
    }
    direct.sort_unstable();
    Parts {
        pattern,
        pieces,
        direct,
        isolated,
    }
}

fn realize(run: &mut Run<'_>, input: &PipelineInput) -> Result<Parts, PipelineFailure> {
    let n = run.host.vertex_count();
    match input {
        PipelineInput::Graphic(seq) => {
            if seq.len() > n {
                return Err(run.fail(Stage::Realize, format!("{} degrees for {n} host vertices", seq.len())));
            }
            if !is_graphic(seq) {
                return Err(run.fail(Stage::Realize, Error::NotGraphic));
            }
            match build_bounded_realization(seq) {
                Ok(r) => {
                    run.stats.realization = "gadgets".into();
                    let isolated: Vec<usize> = (0..seq.len()).filter(|&v| seq.degrees()[v] == 0).collect();
                    let pieces = r
                        .type1_components
                        .iter()
                        .map(|comp| {
                            BipartitePiece::new(r.graph.induced(comp), comp.clone())
                                .expect("type-1 gadgets are bipartite")
                        })
                        .collect();
                    Ok(Parts {
                        pattern: r.graph,
                        pieces,
                        direct: r.set_a,
                        isolated,
                    })
                }
                Err(Error::InsufficientGadgets { .. }) => {
                    run.stats.realization = "havel-hakimi".into();
                    let g = realize_graphic(seq).map_err(|e| run.fail(Stage::Realize, e))?;
                    Ok(split_by_components(g))
                }
                Err(e) => Err(run.fail(Stage::Realize, e)),
            }
        }
        PipelineInput::Unbalanced(seq) => {
            if seq.len() + run.params.slack > n {
                return Err(run.fail(
                    Stage::Realize,
                    format!("{} vertices plus slack {} exceed {n}", seq.len(), run.params.slack),
                ));
            }
            let d = run.params.max_degree.unwrap_or_else(|| seq.max_degree());
            let list = decompose_unbalanced(seq, d).map_err(|e| run.fail(Stage::Realize, e))?;
            run.stats.realization = "unbalanced".into();
            let pattern = list.union_graph(seq.len());
            let pieces = list
                .components
                .iter()
                .map(|c| {
                    let s = c.s_labels.len();
                    BipartitePiece {
                        labels: (0..c.vertex_count()).map(|i| c.label(i)).collect(),
                        graph: c.graph.clone(),
                        larger: (s..c.vertex_count()).collect(),
                        smaller: (0..s).collect(),
                    }
                })
                .collect();
            Ok(Parts {
                pattern,
                pieces,
                direct: Vec::new(),
                isolated: Vec::new(),
            })
        }
    }
}

fn bitset_of(n: usize, vs: impl IntoIterator<Item = usize>) -> Bitset {
    let mut b = Bitset::new(n);
    for v in vs {
        b.insert(v);
    }
    b
}

/// Embeds the union of `pieces` into `host`, each piece's larger class
/// restricted to `larger_pool` and smaller class to `smaller_pool` (per
/// piece), writing successes into `occ`.
fn place_pieces(
    host: &SimpleGraph,
    pieces: &[(&BipartitePiece, Vec<usize>, Vec<usize>)],
    occ: &mut Occupancy,
    budget: u64,
) -> bool {
    let n = host.vertex_count();
    let total: usize = pieces.iter().map(|(p, _, _)| p.vertex_count()).sum();
    let mut union = SimpleGraph::new(total);
    let mut allowed = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut offset = 0;
    for (piece, larger_pool, smaller_pool) in pieces {
        let lp = bitset_of(n, larger_pool.iter().copied().filter(|&v| occ.vacant(v)));
        let sp = bitset_of(n, smaller_pool.iter().copied().filter(|&v| occ.vacant(v)));
        let mut side = vec![false; piece.vertex_count()];
        for &x in &piece.larger {
            side[x] = true;
        }
        for local in 0..piece.vertex_count() {
            allowed.push(if side[local] { lp.clone() } else { sp.clone() });
            labels.push(piece.labels[local]);
        }
        for (u, v) in piece.graph.edges() {
            union.add_edge(offset + u, offset + v);
        }
        offset += piece.vertex_count();
    }
    if total == 0 {
        return true;
    }
    let mut problem = Problem::new(&union, host, budget);
    problem.allowed = Some(allowed);
    match search::solve(&problem).0 {
        SearchOutcome::Found(m) => {
            for (i, &h) in m.iter().enumerate() {
                occ.place(labels[i], h);
            }
            true
        }
        _ => false,
    }
}

/// Runs the stages in order. Identical inputs give identical results.
pub fn embed_pipeline(
    host: &SimpleGraph,
    input: &PipelineInput,
    params: &PipelineParams,
) -> Result<PipelineSuccess, PipelineFailure> {
    let mut run = Run {
        host,
        params,
        pattern: None,
        stats: PipelineStats::default(),
    };
    let n = host.vertex_count();

    let Parts {
        pattern,
        mut pieces,
        direct,
        isolated,
    } = realize(&mut run, input)?;
    run.pattern = Some(pattern.clone());
    run.stats.pieces = pieces.len();
    let mut occ = Occupancy::new(pattern.vertex_count(), n);

    if !direct.is_empty() {
        let sub_pattern = pattern.induced(&direct);
        let problem = Problem::new(&sub_pattern, host, params.star_budget);
        match search::solve(&problem).0 {
            SearchOutcome::Found(m) => {
                for (i, &h) in m.iter().enumerate() {
                    occ.place(direct[i], h);
                }
            }
            SearchOutcome::Absent => return Err(run.fail(Stage::PreEmbed, "no copy of the non-bipartite part")),
            SearchOutcome::Timeout => return Err(run.fail(Stage::PreEmbed, "search budget exhausted")),
        }
        run.stats.pre_embedded = direct.len();
    }

    // Everything from here on lives in the host induced on the free vertices.
    let free: Vec<usize> = (0..n).filter(|&v| occ.vacant(v)).collect();
    let sub = host.induced(&free);
    let mut local = Occupancy::new(pattern.vertex_count(), sub.vertex_count());
    pieces.sort_by_key(BipartitePiece::vertex_count);
    let mut used = vec![false; pieces.len()];

    // The cluster stages need room for two clusters; a smaller remainder
    // goes straight to the completion search.
    if !pieces.is_empty() && sub.vertex_count() >= 2 * params.cluster_size {
        let mut partition = build_cluster_graph(&sub, params.cluster_size, params.density, run.seed(1))
            .map_err(|e| run.fail(Stage::Clusters, e))?;
        run.stats.clusters = partition.clusters.len();

        let stars = loop {
            match star_decompose(&partition.cluster_graph, params.q) {
                Ok(s) => break s,
                Err(Error::Stuck(c)) if partition.clusters.len() > 2 => {
                    partition.dissolve(c);
                    run.stats.dissolved_clusters += 1;
                }
                Err(e) => return Err(run.fail(Stage::Stars, e)),
            }
        };
        run.stats.stars = stars.stars.len();

        run.stats.discarded = regularize_stars(&sub, &mut partition, &stars);
        if partition.cluster_size() == 0 {
            return Err(run.fail(Stage::Regularize, "every cluster emptied"));
        }

        let assignment = assign_leftovers(&sub, &partition, &stars, params.eta, params.density, run.seed(2))
            .map_err(|e| run.fail(Stage::Assign, e))?;
        run.stats.assigned = assignment.len();

        let report = phase1_cover(
            &sub,
            &partition,
            &stars,
            &assignment,
            &pieces,
            &mut used,
            &mut local,
            params.density,
            run.seed(3),
        )
        .map_err(|e| run.fail(Stage::Phase1, e))?;
        run.stats.phase1_fallbacks = report.fallbacks;

        let per_star = distribute(&partition, &stars, &pieces, &used, &local);
        for (star, placed) in stars.stars.iter().zip(per_star) {
            let center = partition.clusters[star.center].clone();
            let leaves: Vec<usize> = star
                .leaves
                .iter()
                .flat_map(|&l| partition.clusters[l].iter().copied())
                .collect();
            let jobs: Vec<(&BipartitePiece, Vec<usize>, Vec<usize>)> = placed
                .iter()
                .map(|&(k, side)| match side {
                    Side::LargerToCenter => (&pieces[k], center.clone(), leaves.clone()),
                    Side::LargerToLeaves => (&pieces[k], leaves.clone(), center.clone()),
                })
                .collect();
            if place_pieces(&sub, &jobs, &mut local, params.star_budget) {
                for &(k, _) in &placed {
                    used[k] = true;
                }
            } else {
                run.stats.star_fallbacks += 1;
            }
        }
    }
    let leftovers: Vec<usize> = (0..pieces.len()).filter(|&k| !used[k]).collect();
    run.stats.completion_pieces = leftovers.len();

    // Completion: the leftover pieces anywhere in the vacant part.
    let everywhere: Vec<usize> = (0..sub.vertex_count()).collect();
    let jobs: Vec<(&BipartitePiece, Vec<usize>, Vec<usize>)> = leftovers
        .iter()
        .map(|&k| (&pieces[k], everywhere.clone(), everywhere.clone()))
        .collect();
    if !place_pieces(&sub, &jobs, &mut local, params.completion_budget) {
        return Err(run.fail(Stage::Phase2, "leftover components do not fit the vacant vertices"));
    }
    for (label, img) in local.image.iter().enumerate() {
        if let Some(h) = img {
            occ.place(label, free[*h]);
        }
    }
    let spare_list: Vec<usize> = (0..n).filter(|&v| occ.vacant(v)).collect();
    let mut spare = spare_list.into_iter();
    for &v in &isolated {
        match spare.next() {
            Some(h) => occ.place(v, h),
            None => return Err(run.fail(Stage::Phase2, "no room for isolated vertices")),
        }
    }
    let Some(mapping) = occ.image.iter().copied().collect::<Option<Vec<usize>>>() else {
        return Err(run.fail(Stage::Phase2, "some pattern vertex was never placed"));
    };
    let map = EmbeddingMap { mapping };
    if let Err(e) = check_embedding(&pattern, host, &map) {
        return Err(run.fail(Stage::Validate, e));
    }
    Ok(PipelineSuccess {
        pattern,
        map,
        stats: run.stats,
    })
}

/// Spreads the unused pieces over the stars, largest piece first, each into
/// the star with the most vacancies whose rule admits it. Pieces no star
/// admits stay unplaced.
fn distribute(
    p: &ClusterPartition,
    s: &StarDecomposition,
    pieces: &[BipartitePiece],
    used: &[bool],
    occ: &Occupancy,
) -> Vec<Vec<(usize, Side)>> {
    let vacant = |c: usize| p.clusters[c].iter().filter(|&&v| occ.vacant(v)).count();
    let mut dists: Vec<Distributor> = s
        .stars
        .iter()
        .map(|st| {
            Distributor::new(StarVacancy {
                a: vacant(st.center),
                b: st.leaves.iter().map(|&l| vacant(l)).sum(),
                h: st.leaves.len(),
            })
        })
        .collect();
    let mut placed = vec![Vec::new(); s.stars.len()];
    let mut order: Vec<usize> = (0..pieces.len()).filter(|&k| !used[k]).collect();
    order.sort_by_key(|&k| (std::cmp::Reverse(pieces[k].vertex_count()), k));
    for k in order {
        let mut stars: Vec<usize> = (0..dists.len()).collect();
        stars.sort_by_key(|&i| (std::cmp::Reverse(dists[i].vacancy.a + dists[i].vacancy.b), i));
        let (larger, smaller) = (pieces[k].larger.len(), pieces[k].smaller.len());
        if let Some((i, side)) = stars.into_iter().find_map(|i| dists[i].place(larger, smaller).map(|side| (i, side))) {
            placed[i].push((k, side));
        }
    }
    placed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{embed_backtracking, EmbedOutcome};

    #[test]
    fn two_regular_into_k12() {
        let input = PipelineInput::Graphic(DegreeSequence::new(vec![2; 12]));
        let params = PipelineParams {
            q: 2,
            ..PipelineParams::default()
        };
        let out = embed_pipeline(&SimpleGraph::complete(12), &input, &params).unwrap();
        assert_eq!(out.pattern.degrees(), vec![2; 12]);
        assert!(check_embedding(&out.pattern, &SimpleGraph::complete(12), &out.map).is_ok());
    }

    #[test]
    fn sharpness_host_fails_and_oracle_agrees() {
        let host = SimpleGraph::complete_bipartite(3, 5);
        let input = PipelineInput::Graphic(DegreeSequence::new(vec![1; 8]));
        let err = embed_pipeline(&host, &input, &PipelineParams::default()).unwrap_err();
        let pattern = err.pattern.expect("realized before failing");
        assert_eq!(embed_backtracking(&pattern, &host, 1_000_000), EmbedOutcome::Absent);
    }

    #[test]
    fn deterministic_given_seed() {
        let host = SimpleGraph::complete(20);
        let input = PipelineInput::Graphic(DegreeSequence::new(vec![1, 1, 2, 2, 2, 3, 3, 3, 3, 2, 2, 2, 1, 1]));
        let params = PipelineParams {
            seed: 5,
            ..PipelineParams::default()
        };
        let a = embed_pipeline(&host, &input, &params);
        let b = embed_pipeline(&host, &input, &params);
        assert_eq!(a, b);
    }

    #[test]
    fn stage_prefixes() {
        assert!(Stage::Realize.predecessors().is_empty());
        assert_eq!(Stage::Assign.predecessors().len(), 5);
        assert_eq!(Stage::Validate.predecessors().last(), Some(&Stage::Phase2));
    }
}
