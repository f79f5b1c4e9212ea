//! Graphic and bigraphic sequences, and zero-sum splitting of bounded
//! integer sequences.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::SimpleGraph;

/// Degrees indexed by vertex label.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeSequence(pub Vec<usize>);

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Self {
        DegreeSequence(degrees)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Δ(π)`, zero for the empty sequence.
    pub fn max_degree(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }

    /// Sorted copy, used for multiset comparisons.
    pub fn sorted(&self) -> Vec<usize> {
        let mut d = self.0.clone();
        d.sort_unstable();
        d
    }
}

impl From<Vec<usize>> for DegreeSequence {
    fn from(v: Vec<usize>) -> Self {
        DegreeSequence(v)
    }
}

/// Two-sided degree demand for a bipartite graph with classes of sizes
/// `side_a.len()` and `side_b.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteDemand {
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
}

impl BipartiteDemand {
    pub fn new(side_a: Vec<usize>, side_b: Vec<usize>) -> Self {
        BipartiteDemand { side_a, side_b }
    }

    pub fn sums_match(&self) -> bool {
        self.side_a.iter().sum::<usize>() == self.side_b.iter().sum::<usize>()
    }

    pub fn max_entry(&self) -> usize {
        self.side_a
            .iter()
            .chain(&self.side_b)
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// A realized bipartite demand: vertices `0..s` form class A and `s..s+t`
/// form class B, in demand order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteRealization {
    pub graph: SimpleGraph,
    pub side_a_len: usize,
}

impl BipartiteRealization {
    pub fn side_a(&self) -> std::ops::Range<usize> {
        0..self.side_a_len
    }

    pub fn side_b(&self) -> std::ops::Range<usize> {
        self.side_a_len..self.graph.vertex_count()
    }
}

/// Integers bounded by `bound` in absolute value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSequence {
    values: Vec<i64>,
    bound: i64,
}

impl IntSequence {
    pub fn new(values: Vec<i64>, bound: i64) -> Result<Self> {
        if bound <= 0 {
            return Err(Error::InvalidInput(format!("bound must be positive, got {bound}")));
        }
        if let Some(&value) = values.iter().find(|v| v.abs() > bound) {
            return Err(Error::OutOfBound { value, bound });
        }
        Ok(IntSequence { values, bound })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }
}

/// Erdős–Gallai test. The empty sequence is graphic.
pub fn is_graphic(seq: &DegreeSequence) -> bool {
    let mut d = seq.0.clone();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let n = d.len();
    if seq.sum() % 2 == 1 {
        return false;
    }
    if n > 0 && d[0] >= n && d[0] > 0 {
        return false;
    }
    let mut left = 0usize;
    for k in 1..=n {
        left += d[k - 1];
        let right = k * (k - 1) + d[k..].iter().map(|&x| x.min(k)).sum::<usize>();
        if left > right {
            return false;
        }
    }
    true
}

/// Havel–Hakimi realizer; ties break towards the lowest label.
pub fn realize_graphic(seq: &DegreeSequence) -> Result<SimpleGraph> {
    if !is_graphic(seq) {
        return Err(Error::NotGraphic);
    }
    let n = seq.len();
    let mut residual = seq.0.clone();
    let mut g = SimpleGraph::new(n);
    loop {
        // Highest residual degree, lowest label first.
        let Some(v) = (0..n)
            .filter(|&v| residual[v] > 0)
            .max_by(|&a, &b| residual[a].cmp(&residual[b]).then(b.cmp(&a)))
        else {
            break;
        };
        let mut others: Vec<usize> = (0..n).filter(|&u| u != v && residual[u] > 0).collect();
        others.sort_by(|&a, &b| residual[b].cmp(&residual[a]).then(a.cmp(&b)));
        let need = residual[v];
        if others.len() < need {
            return Err(Error::NotGraphic);
        }
        for &u in &others[..need] {
            g.add_edge(v, u);
            residual[u] -= 1;
        }
        residual[v] = 0;
    }
    Ok(g)
}

/// Checks `f(X) <= |X||Y| + f(B - Y)` for every `X ⊆ A`, `Y ⊆ B` of the
/// complete bipartite host `K_{s,t}` by exhaustive enumeration.
///
/// Unequal side sums cannot be realized and return `false`.
pub fn ffactor_condition_holds(demand: &BipartiteDemand) -> Result<bool> {
    let (s, t) = (demand.side_a.len(), demand.side_b.len());
    let bits = s + t;
    if bits > 22 {
        return Err(Error::BudgetExceeded { bits });
    }
    if !demand.sums_match() {
        return Ok(false);
    }
    let subset_sums = |side: &[usize]| -> Vec<usize> {
        let mut sums = vec![0usize; 1 << side.len()];
        for mask in 1usize..sums.len() {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + side[low];
        }
        sums
    };
    let f_a = subset_sums(&demand.side_a);
    let f_b = subset_sums(&demand.side_b);
    let total_b = f_b[f_b.len() - 1];
    for (x_mask, &f_x) in f_a.iter().enumerate() {
        let x_len = x_mask.count_ones() as usize;
        for (y_mask, &f_y) in f_b.iter().enumerate() {
            let y_len = y_mask.count_ones() as usize;
            if f_x > x_len * y_len + (total_b - f_y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Realizes a bipartite demand as a subgraph of `K_{s,t}` by maximum flow.
pub fn realize_bipartite(demand: &BipartiteDemand) -> Result<BipartiteRealization> {
    let (s, t) = (demand.side_a.len(), demand.side_b.len());
    if !demand.sums_match()
        || demand.side_a.iter().any(|&d| d > t)
        || demand.side_b.iter().any(|&d| d > s)
    {
        return Err(Error::NotBigraphic);
    }
    let source = s + t;
    let sink = s + t + 1;
    let mut net = FlowNetwork::new(s + t + 2);
    for (i, &d) in demand.side_a.iter().enumerate() {
        net.add_arc(source, i, d as u64);
    }
    for (j, &d) in demand.side_b.iter().enumerate() {
        net.add_arc(s + j, sink, d as u64);
    }
    let mut cross = Vec::with_capacity(s * t);
    for i in 0..s {
        for j in 0..t {
            cross.push((i, s + j, net.add_arc(i, s + j, 1)));
        }
    }
    let total: usize = demand.side_a.iter().sum();
    if net.max_flow(source, sink) != total as u64 {
        return Err(Error::NotBigraphic);
    }
    let mut graph = SimpleGraph::new(s + t);
    for (u, v, id) in cross {
        if net.flow_on(id) == 1 {
            graph.add_edge(u, v);
        }
    }
    Ok(BipartiteRealization {
        graph,
        side_a_len: s,
    })
}

/// Partitions the indices of a zero-sum sequence into zero-sum groups that
/// have no proper nonempty zero-sum subsequence. Every group has at most
/// `2K` elements.
///
/// Groups are returned sorted internally and ordered by their smallest index.
pub fn zero_sum_split(seq: &IntSequence) -> Result<Vec<Vec<usize>>> {
    let sum: i64 = seq.values.iter().sum();
    if sum != 0 {
        return Err(Error::NotZeroSum { sum });
    }
    let mut pending: Vec<Vec<usize>> = vec![(0..seq.values.len()).collect()];
    let mut groups = Vec::new();
    while let Some(part) = pending.pop() {
        if part.is_empty() {
            continue;
        }
        match proper_zero_sum_subset(&seq.values, &part, seq.bound) {
            Some(sub) => {
                let rest: Vec<usize> = part.iter().copied().filter(|i| !sub.contains(i)).collect();
                pending.push(sub);
                pending.push(rest);
            }
            None => groups.push(part),
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);
    Ok(groups)
}

/// A proper nonempty zero-sum subset of the zero-sum `part`, if any.
fn proper_zero_sum_subset(values: &[i64], part: &[usize], bound: i64) -> Option<Vec<usize>> {
    if part.len() < 2 {
        return None;
    }
    if let Some(&z) = part.iter().find(|&&i| values[i] == 0) {
        return Some(vec![z]);
    }
    if part.len() as i64 > 2 * bound {
        Some(pigeonhole_block(values, part))
    } else {
        dp_zero_subset(values, &part[..part.len() - 1])
    }
}

/// For a zero-free zero-sum `part` longer than `2K`: order it so that every
/// prefix sum stays in `[-K+1, K]`, then two equal prefix sums (or an
/// interior zero) bound a proper zero-sum block.
fn pigeonhole_block(values: &[i64], part: &[usize]) -> Vec<usize> {
    let mut pos: Vec<usize> = part.iter().copied().filter(|&i| values[i] > 0).collect();
    let mut neg: Vec<usize> = part.iter().copied().filter(|&i| values[i] < 0).collect();
    pos.reverse();
    neg.reverse();
    let mut order = Vec::with_capacity(part.len());
    let mut running = 0i64;
    let mut first_seen: HashMap<i64, usize> = HashMap::from([(0, 0)]);
    while order.len() < part.len() {
        let next = if running <= 0 { pos.pop() } else { neg.pop() }
            .expect("a zero-sum sequence always offers the balancing sign");
        running += values[next];
        order.push(next);
        let at = order.len();
        if at == part.len() {
            break;
        }
        if let Some(&start) = first_seen.get(&running) {
            return order[start..at].to_vec();
        }
        first_seen.insert(running, at);
    }
    unreachable!("a zero-sum sequence longer than 2K has a proper zero-sum block")
}

/// Subset-sum search for a nonempty zero-sum subset of `items`.
fn dp_zero_subset(values: &[i64], items: &[usize]) -> Option<Vec<usize>> {
    // sum -> (item position, previous sum); `None` previous means a singleton.
    let mut reach: HashMap<i64, (usize, Option<i64>)> = HashMap::new();
    for (pos, &i) in items.iter().enumerate() {
        let v = values[i];
        let mut fresh: Vec<(i64, Option<i64>)> = vec![(v, None)];
        fresh.extend(reach.keys().map(|&s| (s + v, Some(s))));
        for (sum, prev) in fresh {
            if reach.contains_key(&sum) {
                continue;
            }
            reach.insert(sum, (pos, prev));
            if sum == 0 {
                let mut out = Vec::new();
                let mut cursor = Some(0i64);
                while let Some(s) = cursor {
                    let (p, prev) = reach[&s];
                    out.push(items[p]);
                    cursor = prev;
                }
                return Some(out);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_graphs(n: usize) -> impl Iterator<Item = SimpleGraph> {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        (0u64..1 << pairs.len()).map(move |mask| {
            let mut g = SimpleGraph::new(n);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    g.add_edge(u, v);
                }
            }
            g
        })
    }

    #[test]
    fn small_graphic_examples() {
        assert!(is_graphic(&vec![2, 2, 2].into()));
        assert!(!is_graphic(&vec![3, 1].into()));
        assert!(!is_graphic(&vec![3, 3, 1, 1].into()));
        assert!(is_graphic(&vec![].into()));
        assert!(is_graphic(&vec![0, 0, 0].into()));
    }

    #[test]
    fn three_three_one_one_absent_from_enumeration() {
        let target = vec![1, 1, 3, 3];
        assert!(all_graphs(4).all(|g| {
            let mut d = g.degrees();
            d.sort_unstable();
            d != target
        }));
    }

    #[test]
    fn havel_hakimi_examples() {
        let g = realize_graphic(&vec![1, 1].into()).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);

        let c5 = realize_graphic(&vec![2; 5].into()).unwrap();
        assert_eq!(c5.degrees(), vec![2; 5]);
        assert_eq!(c5.components().len(), 1);

        // {2,2,1,1} forces a path on four vertices.
        let p4 = realize_graphic(&vec![2, 2, 1, 1].into()).unwrap();
        assert_eq!(p4.degrees(), vec![2, 2, 1, 1]);
        assert_eq!(p4.components().len(), 1);
        assert_eq!(p4.edge_count(), 3);

        assert!(matches!(realize_graphic(&vec![3, 1].into()), Err(Error::NotGraphic)));
    }

    #[test]
    fn graphic_iff_realizable_exhaustive_up_to_six() {
        // A sequence is graphic exactly when some labelled graph on n <= 6
        // vertices has it as its degree list.
        for n in 0..=6usize {
            let seen: std::collections::BTreeSet<Vec<usize>> =
                all_graphs(n).map(|g| g.degrees()).collect();
            let total = n.pow(n as u32);
            for code in 0..total {
                let d: Vec<usize> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
                let seq = DegreeSequence(d.clone());
                let expected = seen.contains(&d);
                assert_eq!(is_graphic(&seq), expected, "{d:?}");
                match realize_graphic(&seq) {
                    Ok(g) => assert_eq!(g.degrees(), d),
                    Err(_) => assert!(!expected),
                }
            }
        }
    }

    #[test]
    fn ffactor_examples() {
        assert!(ffactor_condition_holds(&BipartiteDemand::new(vec![0, 0], vec![0, 0])).unwrap());
        assert!(ffactor_condition_holds(&BipartiteDemand::new(vec![2, 2], vec![2, 2])).unwrap());
        let star_pair = BipartiteDemand::new(vec![3, 3], vec![1; 6]);
        assert!(ffactor_condition_holds(&star_pair).unwrap());
        assert!(realize_bipartite(&star_pair).is_ok());
        assert!(!ffactor_condition_holds(&BipartiteDemand::new(vec![2], vec![1])).unwrap());
        assert!(matches!(
            ffactor_condition_holds(&BipartiteDemand::new(vec![1; 12], vec![1; 11])),
            Err(Error::BudgetExceeded { bits: 23 })
        ));
    }

    #[test]
    fn bipartite_realizer_examples() {
        let r = realize_bipartite(&BipartiteDemand::new(vec![1], vec![1])).unwrap();
        assert_eq!(r.graph.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let r = realize_bipartite(&BipartiteDemand::new(vec![2, 2], vec![2, 2])).unwrap();
        assert_eq!(r.graph, SimpleGraph::complete_bipartite(2, 2));
        let r = realize_bipartite(&BipartiteDemand::new(vec![2; 8], vec![2; 8])).unwrap();
        assert_eq!(r.graph.degrees(), vec![2; 16]);
        assert!(matches!(
            realize_bipartite(&BipartiteDemand::new(vec![3], vec![1, 1])),
            Err(Error::NotBigraphic)
        ));
    }

    fn brute_zero_subset_exists(values: &[i64]) -> bool {
        let n = values.len();
        (1u32..(1 << n) - 1).any(|mask| {
            (0..n)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| values[i])
                .sum::<i64>()
                == 0
        })
    }

    fn check_split(values: &[i64], bound: i64) {
        let seq = IntSequence::new(values.to_vec(), bound).unwrap();
        let groups = zero_sum_split(&seq).unwrap();
        let mut all: Vec<usize> = groups.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..values.len()).collect::<Vec<_>>());
        for g in &groups {
            assert_eq!(g.iter().map(|&i| values[i]).sum::<i64>(), 0);
            assert!(g.len() as i64 <= 2 * bound, "group {g:?} too long");
            let vals: Vec<i64> = g.iter().map(|&i| values[i]).collect();
            if vals.len() <= 16 {
                assert!(!brute_zero_subset_exists(&vals), "group {vals:?} not minimal");
            }
        }
    }

    #[test]
    fn zero_sum_examples() {
        let seq = IntSequence::new(vec![1, -1, 1, -1], 1).unwrap();
        let groups = zero_sum_split(&seq).unwrap();
        assert_eq!(groups.len(), 2);
        for g in &groups {
            assert_eq!(g.len(), 2);
        }
        let zeros = IntSequence::new(vec![0, 0, 0], 3).unwrap();
        assert_eq!(zero_sum_split(&zeros).unwrap(), vec![vec![0], vec![1], vec![2]]);
        check_split(&[2, 2, -1, -1, -2, -2, 1, 1], 2);
        assert!(matches!(
            zero_sum_split(&IntSequence::new(vec![1, 1], 1).unwrap()),
            Err(Error::NotZeroSum { sum: 2 })
        ));
        assert!(IntSequence::new(vec![3], 2).is_err());
    }

    #[test]
    fn pigeonhole_path_on_long_inputs() {
        // Twenty-five values, well past 2K = 6.
        let mut values = vec![3i64; 10];
        values.extend(vec![-2i64; 15]);
        check_split(&values, 3);
    }

    proptest! {
        #[test]
        fn zero_sum_split_partitions(raw in proptest::collection::vec(-6i64..=6, 0..40), bound in 1i64..=6) {
            let mut values: Vec<i64> = raw.into_iter().map(|v| v.clamp(-bound, bound)).collect();
            // Balance to zero with bounded fix-ups.
            let mut sum: i64 = values.iter().sum();
            while sum != 0 {
                let step = (-sum).clamp(-bound, bound);
                values.push(step);
                sum += step;
            }
            check_split(&values, bound);
        }

        #[test]
        fn bipartite_realization_matches_demand(a in proptest::collection::vec(1usize..4, 1..7), b in proptest::collection::vec(1usize..4, 1..7)) {
            let demand = BipartiteDemand::new(a.clone(), b.clone());
            if let Ok(r) = realize_bipartite(&demand) {
                let degrees = r.graph.degrees();
                prop_assert_eq!(&degrees[..a.len()], &a[..]);
                prop_assert_eq!(&degrees[a.len()..], &b[..]);
                for (u, v) in r.graph.edges() {
                    prop_assert!(u < a.len() && v >= a.len());
                }
            }
        }

        #[test]
        fn large_sides_are_bigraphic(
            delta in 1usize..4,
            extra_s in 0usize..6,
            extra_t in 0usize..6,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s = 2 * delta * delta + extra_s;
            let t = 2 * delta * delta + extra_t;
            let mut a: Vec<usize> = (0..s).map(|_| rng.gen_range(1..=delta)).collect();
            let mut b: Vec<usize> = (0..t).map(|_| rng.gen_range(1..=delta)).collect();
            // Level the sums by raising entries on the lighter side.
            loop {
                let (sa, sb) = (a.iter().sum::<usize>(), b.iter().sum::<usize>());
                let lighter = match sa.cmp(&sb) {
                    std::cmp::Ordering::Equal => break,
                    std::cmp::Ordering::Less => &mut a,
                    std::cmp::Ordering::Greater => &mut b,
                };
                let Some(x) = lighter.iter_mut().find(|x| **x < delta) else { break };
                *x += 1;
            }
            let demand = BipartiteDemand::new(a, b);
            prop_assume!(demand.sums_match());
            prop_assert!(realize_bipartite(&demand).is_ok());
        }
    }
}
