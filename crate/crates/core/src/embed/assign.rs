//! Assigning exceptional vertices to clusters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::clusters::ClusterPartition;
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::stars::StarDecomposition;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignedVertex {
    pub vertex: usize,
    /// Cluster the vertex is covered from.
    pub target: usize,
    /// Cluster on the opposite side of the star, to which the vertex has
    /// large degree.
    pub partner: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Assignment {
    /// `per_cluster[i]` lists the vertices assigned to cluster `i`, in
    /// processing order.
    pub per_cluster: Vec<Vec<AssignedVertex>>,
}

impl Assignment {
    pub fn len(&self) -> usize {
        self.per_cluster.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &AssignedVertex> {
        self.per_cluster.iter().flatten()
    }
}

/// Permitted (target, partner) pairs for `v`. Large degree to a leaf makes
/// the center a target; large degree to the center of a star with fewer than
/// `q` leaves makes every leaf a target.
fn permitted(
    host: &SimpleGraph,
    p: &ClusterPartition,
    s: &StarDecomposition,
    eta: f64,
    v: usize,
) -> Vec<(usize, usize)> {
    let large = |c: usize| {
        let deg = p.clusters[c].iter().filter(|&&w| host.has_edge(v, w)).count();
        deg as f64 >= eta * p.clusters[c].len() as f64 / 4.0
    };
    let mut out: Vec<(usize, usize)> = Vec::new();
    for star in &s.stars {
        if let Some(&leaf) = star.leaves.iter().find(|&&b| large(b)) {
            out.push((star.center, leaf));
        }
        // A 1-star has no preferred center, so it is read both ways.
        if (star.leaves.len() < s.q || star.leaves.len() == 1) && large(star.center) {
            for &leaf in &star.leaves {
                out.push((leaf, star.center));
            }
        }
    }
    out
}

/// Assigns every exceptional vertex of `p` to a permitted cluster, at most
/// `floor(sqrt(d) * m)` per cluster. Vertices with fewer options go first
/// (ties broken by a seeded random key); each picks the least-loaded
/// permitted cluster, lowest index on ties.
pub fn assign_leftovers(
    host: &SimpleGraph,
    p: &ClusterPartition,
    s: &StarDecomposition,
    eta: f64,
    d: f64,
    seed: u64,
) -> Result<Assignment> {
    let cap = (d.sqrt() * p.cluster_size() as f64).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queue: Vec<(usize, u64, usize, Vec<(usize, usize)>)> = p
        .exceptional
        .iter()
        .map(|&v| {
            let opts = permitted(host, p, s, eta, v);
            (opts.len(), rng.gen::<u64>(), v, opts)
        })
        .collect();
    if let Some(&(_, _, v, _)) = queue.iter().find(|e| e.0 == 0) {
        return Err(Error::Unassignable(v));
    }
    queue.sort_unstable();

    let mut per_cluster: Vec<Vec<AssignedVertex>> = vec![Vec::new(); p.clusters.len()];
    for (_, _, v, opts) in queue {
        let best = opts
            .iter()
            .filter(|(t, _)| per_cluster[*t].len() < cap)
            .min_by_key(|(t, _)| (per_cluster[*t].len(), *t));
        let Some(&(target, partner)) = best else {
            return Err(Error::Overload(v));
        };
        per_cluster[target].push(AssignedVertex {
            vertex: v,
            target,
            partner,
        });
    }
    Ok(Assignment { per_cluster })
}
