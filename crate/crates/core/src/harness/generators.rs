//! Seeded random hosts and sequences.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::sequences::DegreeSequence;
use crate::unbalanced::UnbalancedBipartiteSeq;

/// `ceil(frac * n)`, immune to the rounding error in products like
/// `0.55 * 20`.
pub fn min_degree_target(n: usize, frac: f64) -> usize {
    (frac * n as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Samples `G(n, min_frac + 0.1)`, then tops up every vertex whose degree
/// is below `ceil(min_frac * n)` with edges to uniformly chosen
/// non-neighbours.
pub fn gen_host_min_degree(n: usize, min_frac: f64, seed: u64) -> Result<SimpleGraph> {
    let target = min_degree_target(n, min_frac);
    if n == 0 || target > n - 1 {
        return Err(Error::InvalidInput(format!(
            "minimum degree {target} impossible on {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = (min_frac + 0.1).clamp(0.0, 1.0);
    let mut g = SimpleGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    for v in 0..n {
        while g.degree(v) < target {
            let options: Vec<usize> = (0..n).filter(|&w| w != v && !g.has_edge(v, w)).collect();
            let w = *options.choose(&mut rng).expect("degree below n - 1");
            g.add_edge(v, w);
        }
    }
    Ok(g)
}

/// `K_{n/2-1, n/2+1}`: minimum degree `n/2 - 1` and no perfect matching.
pub fn gen_sharpness_host(n: usize) -> Result<SimpleGraph> {
    if n % 2 == 1 || n < 4 {
        return Err(Error::BadParity(n));
    }
    Ok(SimpleGraph::complete_bipartite(n / 2 - 1, n / 2 + 1))
}

/// Degrees of a random graph on `n` vertices in which each vertex stops
/// accepting edges at a private cap drawn from `1..=max_degree`.
pub fn gen_bounded_graphic_seq(n: usize, max_degree: usize, seed: u64) -> Result<DegreeSequence> {
    if max_degree == 0 {
        return Err(Error::InvalidInput("degree bound must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let caps: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_degree)).collect();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(&mut rng);
    let mut deg = vec![0; n];
    for (u, v) in pairs {
        if deg[u] < caps[u] && deg[v] < caps[v] {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    Ok(DegreeSequence::new(deg))
}

/// Degrees of a random bipartite graph with classes of sizes `s` and `t`
/// in which every vertex has degree in `1..=max_degree`. Needs
/// `q * s <= t <= max_degree * s`.
pub fn gen_unbalanced_seq(
    s: usize,
    t: usize,
    q: usize,
    max_degree: usize,
    seed: u64,
) -> Result<UnbalancedBipartiteSeq> {
    if s == 0 || q == 0 || q * s > t || t > max_degree * s {
        return Err(Error::BadShape(format!(
            "no {q}-unbalanced graph with classes {s}, {t} and degrees at most {max_degree}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deg_s = vec![0usize; s];
    let mut deg_t = vec![0usize; t];
    let mut edges = vec![vec![false; t]; s];
    // One edge per T vertex, spread so no S vertex exceeds the bound.
    let mut slots: Vec<usize> = (0..s).flat_map(|i| std::iter::repeat_n(i, max_degree)).collect();
    slots.shuffle(&mut rng);
    for (j, &i) in slots.iter().take(t).enumerate() {
        edges[i][j] = true;
        deg_s[i] += 1;
        deg_t[j] += 1;
    }
    for i in 0..s {
        if deg_s[i] == 0 {
            // Missed by the first pass: join the least-loaded T vertex.
            let j = (0..t)
                .filter(|&j| deg_t[j] < max_degree)
                .min_by_key(|&j| deg_t[j])
                .expect("t >= s");
            edges[i][j] = true;
            deg_s[i] += 1;
            deg_t[j] += 1;
        }
    }
    let density: f64 = rng.gen_range(0.0..0.6);
    for i in 0..s {
        for j in 0..t {
            if !edges[i][j] && deg_s[i] < max_degree && deg_t[j] < max_degree && rng.gen_bool(density) {
                edges[i][j] = true;
                deg_s[i] += 1;
                deg_t[j] += 1;
            }
        }
    }
    Ok(UnbalancedBipartiteSeq::new(deg_s, deg_t, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::is_graphic;
    use proptest::prelude::*;

    #[test]
    fn near_complete_bound_forces_clique() {
        let g = gen_host_min_degree(10, 0.9, 3).unwrap();
        assert_eq!(g.edge_count(), 45);
    }

    #[test]
    fn min_degree_rounding() {
        assert_eq!(min_degree_target(20, 0.55), 11);
        assert_eq!(min_degree_target(36, 0.6), 22);
        assert_eq!(min_degree_target(10, 0.5), 5);
    }

    #[test]
    fn sharpness_shapes() {
        let g = gen_sharpness_host(8).unwrap();
        assert_eq!(g, SimpleGraph::complete_bipartite(3, 5));
        assert_eq!(g.min_degree(), 3);
        assert_eq!(gen_sharpness_host(4).unwrap(), SimpleGraph::complete_bipartite(1, 3));
        assert!(matches!(gen_sharpness_host(9), Err(Error::BadParity(9))));
    }

    #[test]
    fn degree_one_can_give_a_perfect_matching() {
        let hits = (0..50)
            .filter(|&seed| gen_bounded_graphic_seq(4, 1, seed).unwrap().degrees() == [1, 1, 1, 1])
            .count();
        assert!(hits > 0);
    }

    #[test]
    fn mean_density_in_range() {
        let total: f64 = (0..100).map(|seed| gen_host_min_degree(30, 0.5, seed).unwrap().density()).sum();
        let mean = total / 100.0;
        assert!((0.5..=1.0).contains(&mean), "mean density {mean}");
    }

    #[test]
    fn thousand_graphic_samples() {
        for seed in 0..1000 {
            let seq = gen_bounded_graphic_seq(1 + (seed as usize % 40), 1 + (seed as usize % 5), seed).unwrap();
            assert!(is_graphic(&seq));
        }
    }

    proptest! {
        #[test]
        fn host_meets_min_degree(n in 2usize..50, frac in 0.0f64..0.95, seed: u64) {
            prop_assume!(min_degree_target(n, frac) < n);
            let g = gen_host_min_degree(n, frac, seed).unwrap();
            prop_assert!(g.min_degree() >= min_degree_target(n, frac));
        }

        #[test]
        fn graphic_seq_bounded(n in 1usize..60, d in 1usize..6, seed: u64) {
            let seq = gen_bounded_graphic_seq(n, d, seed).unwrap();
            prop_assert!(seq.max_degree() <= d);
            prop_assert!(is_graphic(&seq));
        }

        #[test]
        fn unbalanced_seq_is_valid(s in 1usize..6, q in 1usize..4, extra in 0usize..8, d in 1usize..5, seed: u64) {
            let t = q * s + extra;
            prop_assume!(q <= d && t <= d * s);
            let seq = gen_unbalanced_seq(s, t, q, d, seed).unwrap();
            prop_assert!(seq.validate(d).is_ok());
            prop_assert_eq!(seq.side_s.iter().sum::<usize>(), seq.side_t.iter().sum::<usize>());
        }
    }
}
