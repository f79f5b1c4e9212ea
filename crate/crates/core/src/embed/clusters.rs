//! Random equitable partition of a host into clusters, the density-threshold
//! cluster graph, and the per-star clean-up that precedes placement.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::stars::StarDecomposition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPartition {
    /// Host vertices of each cluster, sorted.
    pub clusters: Vec<Vec<usize>>,
    /// Host vertices outside every cluster, sorted.
    pub exceptional: Vec<usize>,
    /// Edge `(i, j)` iff the edge density between clusters `i` and `j` is
    /// at least `density_threshold`.
    pub cluster_graph: SimpleGraph,
    pub density_threshold: f64,
}

impl ClusterPartition {
    /// Common size of the live clusters (dissolved clusters are empty).
    pub fn cluster_size(&self) -> usize {
        self.clusters.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Cluster index of each host vertex, `None` for exceptional vertices.
    pub fn owner(&self, n: usize) -> Vec<Option<usize>> {
        let mut own = vec![None; n];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in c {
                own[v] = Some(i);
            }
        }
        own
    }

    /// Moves cluster `i` into the exceptional set and drops it from the
    /// cluster graph; later clusters shift down by one index.
    pub fn dissolve(&mut self, i: usize) {
        let gone = self.clusters.remove(i);
        self.exceptional.extend(gone);
        self.exceptional.sort_unstable();
        let keep: Vec<usize> = (0..self.cluster_graph.vertex_count()).filter(|&c| c != i).collect();
        self.cluster_graph = self.cluster_graph.induced(&keep);
    }

    /// Exact edge density between two vertex sets.
    pub fn density(host: &SimpleGraph, x: &[usize], y: &[usize]) -> f64 {
        if x.is_empty() || y.is_empty() {
            return 0.0;
        }
        host.edges_between(x, y) as f64 / (x.len() * y.len()) as f64
    }
}

/// Splits the host into `floor(n / m)` clusters of exactly `m` vertices
/// after a seeded shuffle; the remaining `n mod m` vertices are exceptional.
pub fn build_cluster_graph(host: &SimpleGraph, m: usize, d: f64, seed: u64) -> Result<ClusterPartition> {
    let n = host.vertex_count();
    if m == 0 || n < 2 * m {
        return Err(Error::DegenerateInput(format!(
            "{n} host vertices cannot form two clusters of size {m}"
        )));
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::InvalidInput(format!("density threshold {d} outside (0, 1)")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let l = n / m;
    let mut clusters: Vec<Vec<usize>> = order.chunks(m).take(l).map(<[usize]>::to_vec).collect();
    for c in &mut clusters {
        c.sort_unstable();
    }
    let mut exceptional = order[l * m..].to_vec();
    exceptional.sort_unstable();

    let mut cluster_graph = SimpleGraph::new(l);
    for i in 0..l {
        for j in i + 1..l {
            if ClusterPartition::density(host, &clusters[i], &clusters[j]) >= d {
                cluster_graph.add_edge(i, j);
            }
        }
    }
    Ok(ClusterPartition {
        clusters,
        exceptional,
        cluster_graph,
        density_threshold: d,
    })
}

/// Per star, moves every cluster vertex with at most `2dm/3` neighbours in
/// a partner cluster to the exceptional set, then trims all clusters to the
/// smallest surviving size by discarding their highest labels. Clusters not
/// covered by any star are dissolved. Returns the number of vertices moved.
pub fn regularize_stars(host: &SimpleGraph, p: &mut ClusterPartition, s: &StarDecomposition) -> usize {
    let m = p.cluster_size() as f64;
    let limit = 2.0 * p.density_threshold * m / 3.0;
    let before = p.exceptional.len();

    let mut partners: Vec<Vec<usize>> = vec![Vec::new(); p.clusters.len()];
    for star in &s.stars {
        for &leaf in &star.leaves {
            partners[star.center].push(leaf);
            partners[leaf].push(star.center);
        }
    }
    let snapshot = p.clusters.clone();
    for (i, cluster) in p.clusters.iter_mut().enumerate() {
        if partners[i].is_empty() {
            p.exceptional.append(cluster);
            continue;
        }
        let (keep, drop): (Vec<usize>, Vec<usize>) = cluster.iter().partition(|&&v| {
            partners[i].iter().all(|&j| {
                let mut deg = 0;
                for &w in &snapshot[j] {
                    if host.has_edge(v, w) {
                        deg += 1;
                    }
                }
                deg as f64 > limit
            })
        });
        *cluster = keep;
        p.exceptional.extend(drop);
    }

    let target = p
        .clusters
        .iter()
        .zip(&partners)
        .filter(|(_, ps)| !ps.is_empty())
        .map(|(c, _)| c.len())
        .min()
        .unwrap_or(0);
    for c in &mut p.clusters {
        while c.len() > target {
            p.exceptional.push(c.pop().expect("nonempty"));
        }
    }
    p.exceptional.sort_unstable();
    p.exceptional.len() - before
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stars::star_decompose;

    #[test]
    fn complete_host_gives_complete_cluster_graph() {
        let p = build_cluster_graph(&SimpleGraph::complete(20), 5, 0.3, 1).unwrap();
        assert_eq!(p.clusters.len(), 4);
        assert!(p.exceptional.is_empty());
        assert_eq!(p.cluster_graph.edge_count(), 6);
    }

    #[test]
    fn disjoint_cliques_split_the_cluster_graph() {
        // Most shuffles mix the two cliques, so the components are checked on
        // the host side: clusters wholly inside one clique never meet the other.
        let host = SimpleGraph::complete(10).disjoint_union(&SimpleGraph::complete(10));
        for seed in 0..20 {
            let p = build_cluster_graph(&host, 5, 0.3, seed).unwrap();
            for (i, j) in p.cluster_graph.edges() {
                assert!(ClusterPartition::density(&host, &p.clusters[i], &p.clusters[j]) >= 0.3);
            }
            let pure = |c: &Vec<usize>| c.iter().all(|&v| v < 10) || c.iter().all(|&v| v >= 10);
            if p.clusters.iter().all(pure) {
                assert_eq!(p.cluster_graph.components().len(), 2);
            }
        }
    }

    #[test]
    fn small_host_is_degenerate() {
        assert!(matches!(
            build_cluster_graph(&SimpleGraph::complete(9), 5, 0.3, 0),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn partition_covers_every_vertex_once() {
        let host = SimpleGraph::cycle(23);
        let p = build_cluster_graph(&host, 4, 0.1, 9).unwrap();
        let mut all: Vec<usize> = p.clusters.concat();
        all.extend(&p.exceptional);
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        assert_eq!(p.exceptional.len(), 3);
    }

    #[test]
    fn regularization_keeps_equal_sizes() {
        let host = SimpleGraph::complete(24);
        let mut p = build_cluster_graph(&host, 6, 0.5, 2).unwrap();
        let s = star_decompose(&p.cluster_graph, 1).unwrap();
        let moved = regularize_stars(&host, &mut p, &s);
        assert_eq!(moved, 0);
        assert!(p.clusters.iter().all(|c| c.len() == 6));
    }
}
