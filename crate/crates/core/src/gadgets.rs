//! Bounded-component realizations of bounded-degree sequences.
//!
//! The construction packs equal degrees into balanced complete bipartite
//! blocks `K_{i,i}` (type-1 gadgets), joins the leftover odd degrees by a
//! perfect matching, and completes every leftover vertex by rewiring edges
//! of a fixed perfect matching inside whole type-1 gadgets (delete `xy`,
//! add `vx` and `vy`). Gadgets touched by rewiring, together with the
//! leftover vertices, form the set `A`.
//!
//! Short sequences can run out of gadgets before every leftover vertex is
//! complete. The builder then looks for a 3-colourable realization by
//! random degree-preserving edge swaps and puts its whole support in `A`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::sequences::{is_graphic, realize_graphic, DegreeSequence};

/// Edge swaps tried by the fallback before it reports missing gadgets.
const SWAP_ATTEMPTS: usize = 20_000;
/// Search nodes per component for each colouring check inside the fallback.
const COLOUR_BUDGET: u64 = 50_000;

/// A type-1 gadget `K_{i,i}`; `left[j]`–`right[j]` is its fixed matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Block {
    pub(crate) left: Vec<usize>,
    pub(crate) right: Vec<usize>,
}

impl Block {
    fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.left.iter().chain(&self.right).copied().collect();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetRealization {
    pub graph: SimpleGraph,
    /// Vertex sets of the untouched `K_{i,i}` gadgets, in creation order.
    pub type1_components: Vec<Vec<usize>>,
    /// Leftover vertices plus every rewired gadget, sorted.
    pub set_a: Vec<usize>,
    /// Perfect matching added on the leftover odd-degree vertices.
    pub residual_matching: Vec<(usize, usize)>,
}

/// Outcome of checking a realization against its structural guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    /// `|A| <= 5Δ³`.
    pub a_size_bounded: bool,
    /// Components of `H[V-A]` are balanced complete bipartite on at most `2Δ` vertices.
    pub outside_balanced_complete: bool,
    /// `H[A]` is 3-colourable.
    pub a_three_colorable: bool,
    /// No edge joins `A` to `V-A`.
    pub no_cross_edges: bool,
    pub degrees_match: bool,
}

impl StructureReport {
    pub fn all_hold(&self) -> bool {
        self.a_size_bounded
            && self.outside_balanced_complete
            && self.a_three_colorable
            && self.no_cross_edges
            && self.degrees_match
    }
}

/// Packs `2i` active degrees of value `i` into `K_{i,i}` blocks, scanning
/// `i = Δ..1` and taking the lowest labels first. Returns the blocks and the
/// labels left active (positive degrees only).
pub(crate) fn extract_blocks(seq: &DegreeSequence) -> (Vec<Block>, Vec<usize>) {
    let delta = seq.max_degree();
    let mut by_value: Vec<Vec<usize>> = vec![Vec::new(); delta + 1];
    for (v, &d) in seq.degrees().iter().enumerate() {
        by_value[d].push(v);
    }
    let mut blocks = Vec::new();
    let mut active = Vec::new();
    for i in (1..=delta).rev() {
        let labels = &by_value[i];
        let full = labels.len() / (2 * i);
        for chunk in labels.chunks_exact(2 * i).take(full) {
            blocks.push(Block {
                left: chunk[..i].to_vec(),
                right: chunk[i..].to_vec(),
            });
        }
        active.extend_from_slice(&labels[full * 2 * i..]);
    }
    active.sort_unstable();
    (blocks, active)
}

/// Builds the gadget realization of a graphic sequence.
///
/// Zero-degree positions stay isolated and belong to neither `A` nor a
/// type-1 component. `InsufficientGadgets` is returned only when the
/// gadgets run out and the swap fallback finds no 3-colourable realization
/// whose support fits the `5Δ³` bound.
pub fn build_bounded_realization(seq: &DegreeSequence) -> Result<GadgetRealization> {
    if !is_graphic(seq) {
        return Err(Error::NotGraphic);
    }
    let n = seq.len();
    let pi = seq.degrees();
    let mut graph = SimpleGraph::new(n);

    let (blocks, active) = extract_blocks(seq);
    for b in &blocks {
        for &x in &b.left {
            for &y in &b.right {
                graph.add_edge(x, y);
            }
        }
    }

    // Odd leftovers, highest degree first, paired neighbour to neighbour.
    let mut odd: Vec<usize> = active.iter().copied().filter(|&v| pi[v] % 2 == 1).collect();
    odd.sort_by(|&a, &b| pi[b].cmp(&pi[a]).then(a.cmp(&b)));
    debug_assert!(odd.len().is_multiple_of(2), "odd leftovers come in pairs");
    let residual_matching: Vec<(usize, usize)> = odd
        .chunks_exact(2)
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect();
    for &(u, v) in &residual_matching {
        graph.add_edge(u, v);
    }

    let mut marked = vec![false; blocks.len()];
    let mut next_unmarked = 0usize;
    for &v in &active {
        let mut missing = pi[v] - graph.degree(v);
        debug_assert!(missing.is_multiple_of(2));
        let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
        while missing > 0 {
            let (x, y) = match pairs.pop_front() {
                Some(p) => p,
                None => {
                    if next_unmarked == blocks.len() {
                        return colourable_fallback(seq, v);
                    }
                    let b = &blocks[next_unmarked];
                    marked[next_unmarked] = true;
                    next_unmarked += 1;
                    pairs.extend(b.left.iter().copied().zip(b.right.iter().copied()));
                    continue;
                }
            };
            graph.remove_edge(x, y);
            graph.add_edge(v, x);
            graph.add_edge(v, y);
            missing -= 2;
        }
    }

    let mut set_a = active.clone();
    let mut type1_components = Vec::new();
    for (b, &m) in blocks.iter().zip(&marked) {
        if m {
            set_a.extend(b.vertices());
        } else {
            type1_components.push(b.vertices());
        }
    }
    set_a.sort_unstable();
    Ok(GadgetRealization {
        graph,
        type1_components,
        set_a,
        residual_matching,
    })
}

/// A realization with no type-1 components: `A` is every vertex of
/// positive degree, so only the size bound and 3-colourability matter.
fn colourable_fallback(seq: &DegreeSequence, stuck_at: usize) -> Result<GadgetRealization> {
    let support: Vec<usize> = (0..seq.len()).filter(|&v| seq.degrees()[v] > 0).collect();
    let stuck = Err(Error::InsufficientGadgets { vertex: stuck_at });
    if support.len() > 5 * seq.max_degree().pow(3) {
        return stuck;
    }
    let mut graph = realize_graphic(seq)?;
    let mut edges: Vec<(usize, usize)> = graph.edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seq.len() as u64 ^ (seq.sum() as u64) << 32);
    let mut dirty = true;
    for _ in 0..SWAP_ATTEMPTS {
        if dirty && colour_components(&graph, 3, COLOUR_BUDGET) == Some(true) {
            return Ok(GadgetRealization {
                graph,
                type1_components: Vec::new(),
                set_a: support,
                residual_matching: Vec::new(),
            });
        }
        dirty = false;
        let (i, j) = (rng.gen_range(0..edges.len()), rng.gen_range(0..edges.len()));
        let (a, b) = edges[i];
        let (c, d) = if rng.gen_bool(0.5) { edges[j] } else { (edges[j].1, edges[j].0) };
        if a == c || a == d || b == c || b == d || graph.has_edge(a, c) || graph.has_edge(b, d) {
            continue;
        }
        graph.remove_edge(a, b);
        graph.remove_edge(c, d);
        graph.add_edge(a, c);
        graph.add_edge(b, d);
        edges[i] = (a, c);
        edges[j] = (b, d);
        dirty = true;
    }
    stuck
}

/// Checks the structural guarantees of a realization of `seq`.
pub fn verify_bounded_structure(r: &GadgetRealization, seq: &DegreeSequence) -> StructureReport {
    let g = &r.graph;
    let n = g.vertex_count();
    let delta = seq.max_degree();
    let mut in_a = vec![false; n];
    for &v in &r.set_a {
        if v < n {
            in_a[v] = true;
        }
    }

    let degrees_match = n == seq.len() && g.degrees() == seq.degrees();
    let a_size_bounded = r.set_a.len() <= 5 * delta.pow(3);
    let no_cross_edges = g.edges().all(|(u, v)| in_a[u] == in_a[v]);

    let outside: Vec<usize> = (0..n)
        .filter(|&v| !in_a[v] && seq.degrees().get(v).is_some_and(|&d| d > 0))
        .collect();
    let outside_graph = g.induced(&outside);
    let outside_balanced_complete = outside_graph
        .components()
        .iter()
        .all(|comp| is_balanced_complete_bipartite(&outside_graph.induced(comp), 2 * delta));

    let a_graph = g.induced(&r.set_a);
    let a_three_colorable = a_graph
        .components()
        .iter()
        .all(|comp| is_colorable(&a_graph.induced(comp), 3));

    StructureReport {
        a_size_bounded,
        outside_balanced_complete,
        a_three_colorable,
        no_cross_edges,
        degrees_match,
    }
}

fn is_balanced_complete_bipartite(g: &SimpleGraph, max_size: usize) -> bool {
    let n = g.vertex_count();
    if n == 0 || n > max_size {
        return false;
    }
    let Some(side) = g.bipartition() else {
        return false;
    };
    let left = side.iter().filter(|&&s| !s).count();
    let right = n - left;
    left == right && g.edge_count() == left * right
}

/// Exact `k`-colourability, one component at a time, by backtracking in
/// BFS order.
pub fn is_colorable(g: &SimpleGraph, k: usize) -> bool {
    colour_components(g, k, u64::MAX).expect("unbounded search always decides")
}

/// `None` when some component needs more than `budget` search nodes.
fn colour_components(g: &SimpleGraph, k: usize, budget: u64) -> Option<bool> {
    for comp in g.components() {
        if comp.len() == 1 {
            continue;
        }
        let mut nodes = 0u64;
        match colour_component(g, &comp, k, budget, &mut nodes) {
            Some(true) => {}
            other => return other,
        }
    }
    Some(true)
}

fn colour_component(g: &SimpleGraph, comp: &[usize], k: usize, budget: u64, nodes: &mut u64) -> Option<bool> {
    if k == 0 {
        return Some(false);
    }
    let root = *comp.iter().max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v)))?;
    let mut order = Vec::with_capacity(comp.len());
    let mut seen = vec![false; g.vertex_count()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    fn go(
        g: &SimpleGraph,
        order: &[usize],
        color: &mut [usize],
        i: usize,
        k: usize,
        budget: u64,
        nodes: &mut u64,
    ) -> Option<bool> {
        if i == order.len() {
            return Some(true);
        }
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        let v = order[i];
        // Never open more than one fresh colour at a time.
        let used_max = order[..i].iter().map(|&u| color[u]).max().map_or(0, |m| m + 1);
        for c in 0..k.min(used_max + 1) {
            if g.neighbors(v).all(|w| color[w] != c) {
                color[v] = c;
                if go(g, order, color, i + 1, k, budget, nodes)? {
                    return Some(true);
                }
                color[v] = usize::MAX;
            }
        }
        Some(false)
    }
    let mut color = vec![usize::MAX; g.vertex_count()];
    go(g, &order, &mut color, 0, k, budget, nodes)
}
