//! Covering the assigned exceptional vertices, each by its own component.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::assign::{AssignedVertex, Assignment};
use super::clusters::ClusterPartition;
use super::search::{self, Bitset, Problem, SearchOutcome};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::stars::StarDecomposition;

const FALLBACK_BUDGET: u64 = 100_000;
const HALVING_DRAWS: usize = 11;

/// A connected bipartite piece of the pattern, in local coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartitePiece {
    /// Pattern label of each local vertex.
    pub labels: Vec<usize>,
    pub graph: SimpleGraph,
    pub larger: Vec<usize>,
    pub smaller: Vec<usize>,
}

impl BipartitePiece {
    /// `None` if the graph is not bipartite. On equal classes the class of
    /// local vertex 0 counts as larger.
    pub fn new(graph: SimpleGraph, labels: Vec<usize>) -> Option<Self> {
        let side = graph.bipartition()?;
        let (mut x, mut y): (Vec<usize>, Vec<usize>) = (0..graph.vertex_count()).partition(|&v| !side[v]);
        if x.len() < y.len() {
            std::mem::swap(&mut x, &mut y);
        }
        Some(BipartitePiece {
            labels,
            graph,
            larger: x,
            smaller: y,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }
}

/// Which host vertex each pattern label occupies, and the reverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occupancy {
    pub image: Vec<Option<usize>>,
    pub occupied: Vec<bool>,
}

impl Occupancy {
    pub fn new(pattern_len: usize, host_len: usize) -> Self {
        Occupancy {
            image: vec![None; pattern_len],
            occupied: vec![false; host_len],
        }
    }

    pub fn place(&mut self, label: usize, host_vertex: usize) {
        debug_assert!(self.image[label].is_none() && !self.occupied[host_vertex]);
        self.image[label] = Some(host_vertex);
        self.occupied[host_vertex] = true;
    }

    pub fn vacant(&self, v: usize) -> bool {
        !self.occupied[v]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase1Report {
    /// `(exceptional vertex, piece index)` for each covered vertex.
    pub covered: Vec<(usize, usize)>,
    /// Covers that needed the exact search after the greedy step failed.
    pub fallbacks: usize,
    /// The two halves of each cluster; phase 1 draws from the first.
    pub halves: Vec<(Vec<usize>, Vec<usize>)>,
    /// Smallest `min(deg(w, X'), deg(w, X'')) / deg(w, X)` seen for each
    /// cluster's chosen split.
    pub halving_ratio: Vec<f64>,
}

fn partners(s: &StarDecomposition, clusters: usize) -> (Vec<Vec<usize>>, Vec<bool>) {
    let mut partners = vec![Vec::new(); clusters];
    let mut is_center = vec![false; clusters];
    for star in &s.stars {
        is_center[star.center] = true;
        for &leaf in &star.leaves {
            partners[star.center].push(leaf);
            partners[leaf].push(star.center);
        }
    }
    (partners, is_center)
}

fn halving_score(host: &SimpleGraph, x1: &[usize], x2: &[usize], watchers: &[usize]) -> f64 {
    let mut worst = f64::INFINITY;
    for &w in watchers {
        let d1 = x1.iter().filter(|&&v| host.has_edge(w, v)).count();
        let d2 = x2.iter().filter(|&&v| host.has_edge(w, v)).count();
        if d1 + d2 > 0 {
            worst = worst.min(d1.min(d2) as f64 / (d1 + d2) as f64);
        }
    }
    worst
}

fn halve(
    host: &SimpleGraph,
    p: &ClusterPartition,
    partners: &[Vec<usize>],
    rng: &mut ChaCha8Rng,
) -> (Vec<(Vec<usize>, Vec<usize>)>, Vec<f64>) {
    let mut halves = Vec::with_capacity(p.clusters.len());
    let mut ratios = Vec::with_capacity(p.clusters.len());
    for (i, cluster) in p.clusters.iter().enumerate() {
        let watchers: Vec<usize> = partners[i].iter().flat_map(|&j| p.clusters[j].iter().copied()).collect();
        let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
        for _ in 0..HALVING_DRAWS {
            let mut order = cluster.clone();
            order.shuffle(rng);
            let (a, b) = order.split_at(order.len() / 2);
            let (mut a, mut b) = (a.to_vec(), b.to_vec());
            a.sort_unstable();
            b.sort_unstable();
            let score = halving_score(host, &a, &b, &watchers);
            if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                best = Some((score, a, b));
            }
            if score > 1.0 / 3.0 {
                break;
            }
        }
        let (score, a, b) = best.unwrap_or((f64::INFINITY, Vec::new(), Vec::new()));
        halves.push((a, b));
        ratios.push(score);
    }
    (halves, ratios)
}

/// Greedy placement of `piece` with its `y` class on the target side and
/// local vertex `y1` pinned to `v`. Returns local-to-host images.
fn greedy_cover(
    host: &SimpleGraph,
    piece: &BipartitePiece,
    ys: &[usize],
    xs: &[usize],
    v: usize,
    target_pool: &[usize],
    partner_pool: &[usize],
    d: f64,
) -> Option<Vec<usize>> {
    let mut image = vec![usize::MAX; piece.vertex_count()];
    image[ys[0]] = v;
    let mut common: Vec<usize> = partner_pool.iter().copied().filter(|&w| host.has_edge(v, w)).collect();
    if common.len() < xs.len() {
        return None;
    }
    let mut taken: Vec<usize> = Vec::new();
    for &y in &ys[1..] {
        let threshold = (d * common.len() as f64 / 3.0).max(xs.len() as f64);
        let pick = target_pool
            .iter()
            .copied()
            .filter(|u| !taken.contains(u))
            .map(|u| (common.iter().filter(|&&w| host.has_edge(u, w)).count(), u))
            .filter(|&(c, _)| c as f64 >= threshold)
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))?;
        let u = pick.1;
        taken.push(u);
        image[y] = u;
        common.retain(|&w| host.has_edge(u, w));
    }
    for (&x, &w) in xs.iter().zip(&common) {
        image[x] = w;
    }
    Some(image)
}

fn oracle_cover(
    host: &SimpleGraph,
    piece: &BipartitePiece,
    ys: &[usize],
    xs: &[usize],
    v: usize,
    target_pool: &[usize],
    partner_pool: &[usize],
) -> Option<Vec<usize>> {
    let n = host.vertex_count();
    let set = |vs: &[usize]| {
        let mut b = Bitset::new(n);
        for &x in vs {
            b.insert(x);
        }
        b
    };
    let mut allowed = vec![Bitset::new(n); piece.vertex_count()];
    for &y in ys {
        allowed[y] = set(target_pool);
    }
    allowed[ys[0]] = set(&[v]);
    for &x in xs {
        allowed[x] = set(partner_pool);
    }
    let mut problem = Problem::new(&piece.graph, host, FALLBACK_BUDGET);
    problem.allowed = Some(allowed);
    problem.pinned = vec![(ys[0], v)];
    match search::solve(&problem).0 {
        SearchOutcome::Found(m) => Some(m),
        _ => None,
    }
}

/// Covers every assigned vertex with a dedicated unused piece: the piece's
/// class facing the target cluster is the smaller one when the target is a
/// star center and the larger one otherwise. Pieces are tried in the given
/// order. Placed pieces are marked in `used` and written into `occ`.
#[allow(clippy::too_many_arguments)]
pub fn phase1_cover(
    host: &SimpleGraph,
    p: &ClusterPartition,
    s: &StarDecomposition,
    a: &Assignment,
    pieces: &[BipartitePiece],
    used: &mut [bool],
    occ: &mut Occupancy,
    d: f64,
    seed: u64,
) -> Result<Phase1Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (partners, is_center) = partners(s, p.clusters.len());
    let (halves, halving_ratio) = halve(host, p, &partners, &mut rng);
    let mut report = Phase1Report {
        covered: Vec::new(),
        fallbacks: 0,
        halves,
        halving_ratio,
    };

    for &AssignedVertex { vertex: v, target, partner } in a.iter() {
        let vacant_half = |c: usize| -> Vec<usize> {
            report.halves[c].0.iter().copied().filter(|&w| occ.vacant(w)).collect()
        };
        let target_half = vacant_half(target);
        let partner_half = vacant_half(partner);
        let mut placed = false;
        for (k, piece) in pieces.iter().enumerate() {
            if used[k] {
                continue;
            }
            let (ys, xs) = if is_center[target] {
                (&piece.smaller, &piece.larger)
            } else {
                (&piece.larger, &piece.smaller)
            };
            let mut ys = ys.clone();
            ys.sort_by_key(|&y| (std::cmp::Reverse(piece.graph.degree(y)), y));
            if xs.len() > partner_half.len() || ys.len() > target_half.len() + 1 {
                continue;
            }
            let mut image = greedy_cover(host, piece, &ys, xs, v, &target_half, &partner_half, d);
            if image.is_none() {
                image = oracle_cover(host, piece, &ys, xs, v, &target_half, &partner_half);
                if image.is_some() {
                    report.fallbacks += 1;
                }
            }
            if let Some(image) = image {
                for (local, &h) in image.iter().enumerate() {
                    occ.place(piece.labels[local], h);
                }
                used[k] = true;
                report.covered.push((v, k));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::CoverFailed(v));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stars::Star;

    fn edge_star() -> StarDecomposition {
        StarDecomposition {
            stars: vec![Star {
                center: 0,
                leaves: vec![1],
            }],
            covered: vec![true, true],
            q: 2,
        }
    }

    #[test]
    fn no_assigned_vertices_changes_nothing() {
        let host = SimpleGraph::complete(8);
        let p = ClusterPartition {
            clusters: vec![(0..4).collect(), (4..8).collect()],
            exceptional: vec![],
            cluster_graph: SimpleGraph::complete(2),
            density_threshold: 0.5,
        };
        let mut occ = Occupancy::new(0, 8);
        let r = phase1_cover(&host, &p, &edge_star(), &Assignment::default(), &[], &mut [], &mut occ, 0.5, 0)
            .unwrap();
        assert!(r.covered.is_empty());
        assert!(occ.occupied.iter().all(|&o| !o));
    }

    #[test]
    fn star_piece_centred_on_the_exceptional_vertex() {
        // Clusters 0..8 (center) and 8..16 (leaf), complete to each other;
        // vertex 16 sees every leaf-cluster vertex.
        let mut host = SimpleGraph::complete_bipartite(8, 8).disjoint_union(&SimpleGraph::new(1));
        for w in 8..16 {
            host.add_edge(16, w);
        }
        let p = ClusterPartition {
            clusters: vec![(0..8).collect(), (8..16).collect()],
            exceptional: vec![16],
            cluster_graph: SimpleGraph::complete(2),
            density_threshold: 0.5,
        };
        let piece = BipartitePiece::new(SimpleGraph::complete_bipartite(1, 2), vec![0, 1, 2]).unwrap();
        let assignment = Assignment {
            per_cluster: vec![
                vec![AssignedVertex {
                    vertex: 16,
                    target: 0,
                    partner: 1,
                }],
                vec![],
            ],
        };
        let mut occ = Occupancy::new(3, 17);
        let mut used = [false];
        let r = phase1_cover(&host, &p, &edge_star(), &assignment, &[piece], &mut used, &mut occ, 0.5, 4).unwrap();
        assert_eq!(r.covered, vec![(16, 0)]);
        assert_eq!(occ.image[0], Some(16));
        assert!(occ.image[1..].iter().all(|x| x.is_some_and(|w| (8..16).contains(&w))));
        assert_eq!(occ.occupied.iter().filter(|&&o| o).count(), 3);
    }
}
