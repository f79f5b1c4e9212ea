//! Exact search for some realization of a sequence inside a host, and the
//! small edit-budget variant built on top of it.

use serde::{Deserialize, Serialize};

use super::{embed_backtracking, EmbedOutcome, EmbeddingMap};
use crate::graph::SimpleGraph;
use crate::sequences::DegreeSequence;

/// A realization of the sequence together with its copy in the host.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceEmbedding {
    /// Pattern vertex `i` has degree `seq[i]`.
    pub pattern: SimpleGraph,
    pub map: EmbeddingMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceOutcome {
    Found(SequenceEmbedding),
    Absent,
    Timeout,
}

struct DegreeSearch<'a> {
    host: &'a SimpleGraph,
    order: Vec<usize>,
    pos: Vec<usize>,
    /// First processing index of each vertex's host component, and its size.
    comp_start: Vec<Option<usize>>,
    remaining: Vec<usize>,
    cnt: Vec<usize>,
    f: Vec<usize>,
    edges: Vec<(usize, usize)>,
    nodes: u64,
    budget: u64,
}

enum Step {
    Done,
    Dead,
    Timeout,
}

impl DegreeSearch<'_> {
    fn max_remaining(&self) -> Option<usize> {
        self.remaining.iter().rposition(|&c| c > 0)
    }

    fn remaining_sum(&self) -> usize {
        self.remaining.iter().enumerate().map(|(v, &c)| v * c).sum()
    }

    fn consistent(&self, i: usize) -> bool {
        let later = &self.order[i + 1..];
        let Some(max) = self.max_remaining() else {
            return later.is_empty();
        };
        let mut owed = 0;
        for &w in later {
            if self.cnt[w] > max {
                return false;
            }
            owed += self.cnt[w];
        }
        let total = self.remaining_sum();
        total >= owed && (total - owed).is_multiple_of(2)
    }

    fn go(&mut self, i: usize) -> Step {
        if i == self.order.len() {
            return Step::Done;
        }
        let v = self.order[i];
        if let Some(size) = self.comp_start[i] {
            // An all-odd pool cannot fill an odd component.
            let odd_only = self.remaining.iter().enumerate().all(|(val, &c)| c == 0 || val % 2 == 1);
            if odd_only && size % 2 == 1 {
                return Step::Dead;
            }
        }
        let values: Vec<usize> = (0..self.remaining.len())
            .rev()
            .filter(|&val| self.remaining[val] > 0 && val >= self.cnt[v])
            .collect();
        for val in values {
            self.remaining[val] -= 1;
            let cap = self.max_remaining().unwrap_or(0);
            let cand: Vec<usize> = self
                .host
                .neighbors(v)
                .filter(|&w| self.pos[w] > i && self.cnt[w] < cap)
                .collect();
            let r = val - self.cnt[v];
            if cand.len() >= r {
                self.f[v] = val;
                match self.combos(i, v, &cand, r, 0) {
                    Step::Dead => {}
                    other => {
                        self.remaining[val] += 1;
                        return other;
                    }
                }
            }
            self.remaining[val] += 1;
        }
        Step::Dead
    }

    fn combos(&mut self, i: usize, v: usize, cand: &[usize], r: usize, from: usize) -> Step {
        if r == 0 {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::Timeout;
            }
            if !self.consistent(i) {
                return Step::Dead;
            }
            return self.go(i + 1);
        }
        for k in from..cand.len() {
            if cand.len() - k < r {
                break;
            }
            let w = cand[k];
            self.cnt[w] += 1;
            self.edges.push((v, w));
            let step = self.combos(i, v, cand, r - 1, k + 1);
            if let Step::Done | Step::Timeout = step {
                return step;
            }
            self.cnt[w] -= 1;
            self.edges.pop();
        }
        Step::Dead
    }
}

/// Searches for a subgraph of `host` whose degrees, padded with zeros to
/// `v(host)`, are exactly `seq` as a multiset. This asks whether *some*
/// realization embeds, unlike [`embed_backtracking`] which fixes one.
pub fn embed_sequence(seq: &DegreeSequence, host: &SimpleGraph, budget: u64) -> SequenceOutcome {
    let n = host.vertex_count();
    if seq.len() > n {
        return SequenceOutcome::Absent;
    }
    let maxv = seq.max_degree();
    let mut remaining = vec![0usize; maxv + 1];
    for &d in seq.degrees() {
        remaining[d] += 1;
    }
    remaining[0] += n - seq.len();

    let mut order = Vec::with_capacity(n);
    let mut comp_start = Vec::with_capacity(n);
    for comp in host.components() {
        let mut c = comp.clone();
        c.sort_by_key(|&v| (host.degree(v), v));
        for (k, &v) in c.iter().enumerate() {
            order.push(v);
            comp_start.push((k == 0).then_some(c.len()));
        }
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut s = DegreeSearch {
        host,
        order,
        pos,
        comp_start,
        remaining,
        cnt: vec![0; n],
        f: vec![0; n],
        edges: Vec::new(),
        nodes: 0,
        budget,
    };
    match s.go(0) {
        Step::Timeout => SequenceOutcome::Timeout,
        Step::Dead => SequenceOutcome::Absent,
        Step::Done => {
            let mut used = vec![false; n];
            let mut mapping = Vec::with_capacity(seq.len());
            for &d in seq.degrees() {
                let h = (0..n).find(|&h| !used[h] && s.f[h] == d).expect("degree multiset matches");
                used[h] = true;
                mapping.push(h);
            }
            let mut label = vec![usize::MAX; n];
            for (i, &h) in mapping.iter().enumerate() {
                label[h] = i;
            }
            let mut pattern = SimpleGraph::new(seq.len());
            for &(a, b) in &s.edges {
                pattern.add_edge(label[a], label[b]);
            }
            SequenceOutcome::Found(SequenceEmbedding {
                pattern,
                map: EmbeddingMap { mapping },
            })
        }
    }
}

/// Result of the edit search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EditOutcome {
    Found {
        /// Toggled vertex pairs, `u < v`.
        edits: Vec<(usize, usize)>,
        edited: SimpleGraph,
        pattern: SimpleGraph,
        map: EmbeddingMap,
    },
    Absent,
    Timeout,
}

fn toggled(host: &SimpleGraph, edits: &[(usize, usize)]) -> SimpleGraph {
    let mut g = host.clone();
    for &(u, v) in edits {
        if !g.remove_edge(u, v) {
            g.add_edge(u, v);
        }
    }
    g
}

/// Tries every set of at most `k` toggled pairs, smaller sets first and
/// lexicographically within a size, until `probe` succeeds.
fn search_edits<F>(host: &SimpleGraph, k: usize, mut probe: F) -> EditOutcome
where
    F: FnMut(&SimpleGraph) -> Option<Option<(SimpleGraph, EmbeddingMap)>>,
{
    let n = host.vertex_count();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut timed_out = false;
    let mut chosen: Vec<usize> = Vec::new();
    for size in 0..=k {
        // Lexicographic enumeration of `size`-subsets of pair indices.
        chosen.clear();
        chosen.extend(0..size);
        if size > pairs.len() {
            break;
        }
        loop {
            let edits: Vec<(usize, usize)> = chosen.iter().map(|&i| pairs[i]).collect();
            let edited = toggled(host, &edits);
            match probe(&edited) {
                Some(Some((pattern, map))) => {
                    return EditOutcome::Found {
                        edits,
                        edited,
                        pattern,
                        map,
                    }
                }
                Some(None) => {}
                None => timed_out = true,
            }
            let Some(j) = (0..size).rev().find(|&j| chosen[j] < pairs.len() - size + j) else {
                break;
            };
            chosen[j] += 1;
            for t in j + 1..size {
                chosen[t] = chosen[t - 1] + 1;
            }
        }
    }
    if timed_out {
        EditOutcome::Timeout
    } else {
        EditOutcome::Absent
    }
}

/// Smallest-first search for a host within edit distance `k` into which
/// some realization of `seq` embeds.
pub fn embed_with_edits(host: &SimpleGraph, seq: &DegreeSequence, k: usize, budget: u64) -> EditOutcome {
    search_edits(host, k, |g| match embed_sequence(seq, g, budget) {
        SequenceOutcome::Found(e) => Some(Some((e.pattern, e.map))),
        SequenceOutcome::Absent => Some(None),
        SequenceOutcome::Timeout => None,
    })
}

/// As [`embed_with_edits`] for a fixed pattern graph; with `k = 0` this is
/// a single [`embed_backtracking`] call.
pub fn embed_pattern_with_edits(host: &SimpleGraph, pattern: &SimpleGraph, k: usize, budget: u64) -> EditOutcome {
    search_edits(host, k, |g| match embed_backtracking(pattern, g, budget) {
        EmbedOutcome::Found(m) => Some(Some((pattern.clone(), m))),
        EmbedOutcome::Absent => Some(None),
        EmbedOutcome::Timeout => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::check_embedding;
    use rand::{Rng, SeedableRng};

    fn found(out: &SequenceOutcome, seq: &DegreeSequence, host: &SimpleGraph) -> bool {
        match out {
            SequenceOutcome::Found(e) => {
                assert_eq!(e.pattern.degrees(), seq.degrees());
                assert!(check_embedding(&e.pattern, host, &e.map).is_ok());
                true
            }
            SequenceOutcome::Absent => false,
            SequenceOutcome::Timeout => panic!("unexpected timeout"),
        }
    }

    /// Every subgraph of the host, by edge subset.
    fn brute(seq: &DegreeSequence, host: &SimpleGraph) -> bool {
        let edges: Vec<(usize, usize)> = host.edges().collect();
        let n = host.vertex_count();
        let mut target = seq.degrees().to_vec();
        target.resize(n, 0);
        target.sort_unstable();
        (0u32..1 << edges.len()).any(|mask| {
            let mut deg = vec![0; n];
            for (i, &(u, v)) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    deg[u] += 1;
                    deg[v] += 1;
                }
            }
            deg.sort_unstable();
            deg == target
        })
    }

    #[test]
    fn agrees_with_subgraph_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..400 {
            let n = rng.gen_range(2..=6);
            let mut host = SimpleGraph::new(n);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.6) {
                        host.add_edge(u, v);
                    }
                }
            }
            let len = rng.gen_range(1..=n);
            let seq = DegreeSequence::new((0..len).map(|_| rng.gen_range(0..=3)).collect());
            let out = embed_sequence(&seq, &host, u64::MAX);
            assert_eq!(found(&out, &seq, &host), brute(&seq, &host), "{seq:?} in {:?}", host.edges().collect::<Vec<_>>());
        }
    }

    #[test]
    fn all_three_in_two_k4() {
        let host = SimpleGraph::complete(4).disjoint_union(&SimpleGraph::complete(4));
        let seq = DegreeSequence::new(vec![3; 8]);
        let out = embed_with_edits(&host, &seq, 0, 1_000_000);
        assert!(matches!(out, EditOutcome::Found { ref edits, .. } if edits.is_empty()));
    }

    #[test]
    fn one_edit_rescues_perfect_matching() {
        let host = SimpleGraph::complete(5).disjoint_union(&SimpleGraph::new(1));
        let seq = DegreeSequence::new(vec![1; 6]);
        assert_eq!(embed_with_edits(&host, &seq, 0, 1_000_000), EditOutcome::Absent);
        let EditOutcome::Found { edits, edited, pattern, map } = embed_with_edits(&host, &seq, 1, 1_000_000) else {
            panic!("one added edge suffices")
        };
        assert_eq!(edits.len(), 1);
        assert!(edits[0].1 == 5 && !host.has_edge(edits[0].0, edits[0].1));
        assert!(check_embedding(&pattern, &edited, &map).is_ok());
    }

    #[test]
    fn zero_edits_is_the_plain_oracle() {
        let pattern = SimpleGraph::cycle(4);
        for host in [SimpleGraph::complete(4), SimpleGraph::complete_bipartite(1, 3)] {
            let direct = embed_backtracking(&pattern, &host, 10_000).is_found();
            let via = matches!(embed_pattern_with_edits(&host, &pattern, 0, 10_000), EditOutcome::Found { .. });
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn odd_component_blocks_all_odd_sequences() {
        let host = SimpleGraph::complete(3).disjoint_union(&SimpleGraph::complete(5));
        for d in [1, 3] {
            let out = embed_sequence(&DegreeSequence::new(vec![d; 8]), &host, 1_000_000);
            assert_eq!(out, SequenceOutcome::Absent);
        }
    }
}
