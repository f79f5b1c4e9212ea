//! Decomposing a graph into vertex-disjoint stars with at most `q` leaves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{maximum_matching, SimpleGraph};

/// A star: `center` joined to every leaf. A 1-star is an edge with a
/// designated center.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: usize,
    pub leaves: Vec<usize>,
}

impl Star {
    pub fn vertex_count(&self) -> usize {
        1 + self.leaves.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarDecomposition {
    pub stars: Vec<Star>,
    pub covered: Vec<bool>,
    pub q: usize,
}

impl StarDecomposition {
    pub fn covers_all(&self) -> bool {
        self.covered.iter().all(|&c| c)
    }

    /// Number of stars with exactly `leaves` leaves.
    pub fn count_with_leaves(&self, leaves: usize) -> usize {
        self.stars.iter().filter(|s| s.leaves.len() == leaves).count()
    }

    /// Checks disjointness, leaf counts in `1..=q`, and that every star edge
    /// is an edge of `g`.
    pub fn is_valid_for(&self, g: &SimpleGraph) -> bool {
        let mut seen = vec![false; g.vertex_count()];
        for s in &self.stars {
            if s.leaves.is_empty() || s.leaves.len() > self.q {
                return false;
            }
            for v in std::iter::once(s.center).chain(s.leaves.iter().copied()) {
                if v >= seen.len() || seen[v] {
                    return false;
                }
                seen[v] = true;
            }
            if s.leaves.iter().any(|&l| !g.has_edge(s.center, l)) {
                return false;
            }
        }
        seen == self.covered
    }
}

/// Working state: stars by id (removed stars leave `None`), and the star id
/// holding each vertex.
struct Partial {
    stars: Vec<Option<Star>>,
    owner: Vec<Option<usize>>,
    q: usize,
}

impl Partial {
    fn new(n: usize, q: usize) -> Self {
        Partial {
            stars: Vec::new(),
            owner: vec![None; n],
            q,
        }
    }

    fn push(&mut self, center: usize, leaves: Vec<usize>) {
        let id = self.stars.len();
        self.owner[center] = Some(id);
        for &l in &leaves {
            self.owner[l] = Some(id);
        }
        self.stars.push(Some(Star { center, leaves }));
    }

    fn star(&self, id: usize) -> &Star {
        self.stars[id].as_ref().expect("owner points at a live star")
    }

    /// Applies the first case that covers `v`, scanning neighbours in label
    /// order for each case in turn. Returns false if none applies.
    fn augment(&mut self, g: &SimpleGraph, v: usize) -> bool {
        // (a) a neighbour in a 1-star: regrow it as a 2-star centred there.
        if self.q >= 2 {
            for u in g.neighbors(v) {
                let id = self.owner[u].expect("uncovered neighbours are handled first");
                let star = self.star(id);
                if star.leaves.len() == 1 {
                    let other = if star.center == u { star.leaves[0] } else { star.center };
                    self.stars[id] = None;
                    self.push(u, vec![other, v]);
                    return true;
                }
            }
        }
        // (b) a neighbour centring an h-star with h < q: add v as a leaf.
        for u in g.neighbors(v) {
            let id = self.owner[u].expect("covered");
            let star = self.star(id);
            if star.center == u && star.leaves.len() < self.q {
                self.stars[id].as_mut().expect("live").leaves.push(v);
                self.owner[v] = Some(id);
                return true;
            }
        }
        // (c) a neighbour that is a leaf of an h-star with h >= 2: detach it
        // and pair it with v.
        for u in g.neighbors(v) {
            let id = self.owner[u].expect("covered");
            let star = self.star(id);
            if star.center != u && star.leaves.len() >= 2 {
                self.stars[id].as_mut().expect("live").leaves.retain(|&l| l != u);
                self.push(u, vec![v]);
                return true;
            }
        }
        false
    }

    fn finish(self, n: usize) -> StarDecomposition {
        let mut covered = vec![false; n];
        let stars: Vec<Star> = self.stars.into_iter().flatten().collect();
        for s in &stars {
            covered[s.center] = true;
            for &l in &s.leaves {
                covered[l] = true;
            }
        }
        StarDecomposition {
            stars,
            covered,
            q: self.q,
        }
    }
}

/// Covers every vertex of `g` with vertex-disjoint stars of at most `q`
/// leaves.
///
/// Edges are first taken greedily in lexicographic order: an edge between
/// two uncovered vertices opens a 1-star centred at its lower endpoint, and
/// an uncovered vertex adjacent to a center with spare room joins that star.
/// Each remaining uncovered vertex is then absorbed by the local moves
/// above. With `q = 1` stars are edges and the cover is a perfect matching,
/// found by augmenting paths instead.
pub fn star_decompose(g: &SimpleGraph, q: usize) -> Result<StarDecomposition> {
    if q == 0 {
        return Err(Error::InvalidInput("q must be at least 1".into()));
    }
    let n = g.vertex_count();
    let mut partial = Partial::new(n, q);
    for (u, v) in g.edges() {
        match (partial.owner[u], partial.owner[v]) {
            (None, None) => partial.push(u, vec![v]),
            (Some(id), None) | (None, Some(id)) => {
                let (covered, free) = if partial.owner[u].is_some() { (u, v) } else { (v, u) };
                let star = partial.star(id);
                if star.center == covered && star.leaves.len() < q {
                    partial.stars[id].as_mut().expect("live").leaves.push(free);
                    partial.owner[free] = Some(id);
                }
            }
            (Some(_), Some(_)) => {}
        }
    }

    if q == 1 {
        return perfect_matching_cover(g, partial);
    }

    for v in 0..n {
        if partial.owner[v].is_some() {
            continue;
        }
        if let Some(u) = g.neighbors(v).find(|&u| partial.owner[u].is_none()) {
            partial.push(v.min(u), vec![v.max(u)]);
            continue;
        }
        if !partial.augment(g, v) {
            return Err(Error::Stuck(v));
        }
    }
    Ok(partial.finish(n))
}

fn perfect_matching_cover(g: &SimpleGraph, greedy: Partial) -> Result<StarDecomposition> {
    let n = g.vertex_count();
    let seed: Vec<(usize, usize)> = greedy
        .stars
        .iter()
        .flatten()
        .map(|s| (s.center, s.leaves[0]))
        .collect();
    let mate = maximum_matching(g, &seed);
    if let Some(v) = (0..n).find(|&v| mate[v].is_none()) {
        return Err(Error::Stuck(v));
    }
    let mut partial = Partial::new(n, 1);
    for (v, m) in mate.iter().enumerate() {
        let m = m.expect("perfect");
        if v < m {
            partial.push(v, vec![m]);
        }
    }
    Ok(partial.finish(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn c4_with_one_leaf_is_a_perfect_matching() {
        let d = star_decompose(&SimpleGraph::cycle(4), 1).unwrap();
        assert_eq!(d.stars.len(), 2);
        assert!(d.stars.iter().all(|s| s.leaves.len() == 1));
        assert!(d.covers_all());
        assert!(d.is_valid_for(&SimpleGraph::cycle(4)));
    }

    #[test]
    fn k4_with_three_leaves_is_one_star() {
        let d = star_decompose(&SimpleGraph::complete(4), 3).unwrap();
        assert_eq!(
            d.stars,
            vec![Star {
                center: 0,
                leaves: vec![1, 2, 3]
            }]
        );
    }

    #[test]
    fn claw_with_one_leaf_is_stuck() {
        let claw = SimpleGraph::complete_bipartite(1, 3);
        assert!(matches!(star_decompose(&claw, 1), Err(Error::Stuck(_))));
    }

    #[test]
    fn isolated_vertex_is_stuck() {
        let g = SimpleGraph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(star_decompose(&g, 2), Err(Error::Stuck(2))));
    }

    #[test]
    fn each_case_fires() {
        // (a): path 0-1 then 2 hangs off 1.
        let g = SimpleGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let d = star_decompose(&g, 2).unwrap();
        assert!(d.covers_all() && d.is_valid_for(&g));

        // (c): the greedy pass builds star 0-{1,2}; vertex 3 only sees leaf 2.
        let g = SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (2, 3)]).unwrap();
        let d = star_decompose(&g, 2).unwrap();
        assert!(d.covers_all() && d.is_valid_for(&g));
        assert!(d.stars.contains(&Star { center: 2, leaves: vec![3] }));
    }

    #[test]
    fn matching_brute_force_on_c4() {
        // The two perfect matchings of C4 are {01,23} and {03,12}.
        let d = star_decompose(&SimpleGraph::cycle(4), 1).unwrap();
        let mut pairs: Vec<(usize, usize)> = d
            .stars
            .iter()
            .map(|s| (s.center.min(s.leaves[0]), s.center.max(s.leaves[0])))
            .collect();
        pairs.sort_unstable();
        assert!(pairs == vec![(0, 1), (2, 3)] || pairs == vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn dense_random_graphs_decompose() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for q in 1..=3usize {
            for _ in 0..20 {
                let n = 40;
                let mut g = SimpleGraph::new(n);
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.gen_bool(0.7) {
                            g.add_edge(u, v);
                        }
                    }
                }
                let d = star_decompose(&g, q).unwrap();
                assert!(d.covers_all());
                assert!(d.is_valid_for(&g));
                let total: usize = d.stars.iter().map(Star::vertex_count).sum();
                assert_eq!(total, n);
            }
        }
    }
}
