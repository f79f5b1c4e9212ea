//! Exact backtracking search for edge-preserving injections.
//!
//! Vertex choice: among unplaced pattern vertices with a placed neighbour,
//! the one with the fewest candidates; when a new component starts, the
//! highest-degree vertex. Candidates are tried by ascending number of free
//! host neighbours. Every pruning rule here is a necessary condition, so an
//! exhausted search is a proof of absence.

use crate::graph::SimpleGraph;

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub(crate) fn new(n: usize) -> Self {
        Bitset {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub(crate) fn full(n: usize) -> Self {
        let mut b = Bitset::new(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub(crate) fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub(crate) fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub(crate) fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn and_assign(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    fn and_len(&self, other: &Bitset) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SearchOutcome {
    Found(Vec<usize>),
    Absent,
    Timeout,
}

/// An embedding problem. `allowed[u]` restricts the images of pattern
/// vertex `u`; `pinned` fixes some images outright.
pub(crate) struct Problem<'a> {
    pub(crate) pattern: &'a SimpleGraph,
    pub(crate) host: &'a SimpleGraph,
    pub(crate) allowed: Option<Vec<Bitset>>,
    pub(crate) pinned: Vec<(usize, usize)>,
    pub(crate) budget: u64,
}

impl<'a> Problem<'a> {
    pub(crate) fn new(pattern: &'a SimpleGraph, host: &'a SimpleGraph, budget: u64) -> Self {
        Problem {
            pattern,
            host,
            allowed: None,
            pinned: Vec::new(),
            budget,
        }
    }
}

struct State<'a> {
    pattern: &'a SimpleGraph,
    host_adj: Vec<Bitset>,
    allowed: Vec<Bitset>,
    free: Bitset,
    image: Vec<Option<usize>>,
    placed: usize,
    nodes: u64,
    budget: u64,
}

enum Step {
    Done,
    Dead,
    Timeout,
}

/// Runs the search, returning the outcome and the number of nodes visited.
pub(crate) fn solve(problem: &Problem<'_>) -> (SearchOutcome, u64) {
    let p = problem.pattern;
    let h = problem.host;
    let (pn, hn) = (p.vertex_count(), h.vertex_count());

    let host_adj: Vec<Bitset> = (0..hn)
        .map(|v| {
            let mut b = Bitset::new(hn);
            for w in h.neighbors(v) {
                b.insert(w);
            }
            b
        })
        .collect();
    let mut allowed: Vec<Bitset> = match &problem.allowed {
        Some(a) => a.clone(),
        None => vec![Bitset::full(hn); pn],
    };
    let mut usable = Bitset::new(hn);
    for a in &allowed {
        for v in a.iter() {
            usable.insert(v);
        }
    }
    // Host degree inside the usable set bounds the pattern degree.
    let usable_degree: Vec<usize> = (0..hn).map(|v| host_adj[v].and_len(&usable)).collect();
    for (u, a) in allowed.iter_mut().enumerate() {
        let need = p.degree(u);
        let keep: Vec<usize> = a.iter().filter(|&v| usable_degree[v] >= need).collect();
        let mut b = Bitset::new(hn);
        for v in keep {
            b.insert(v);
        }
        *a = b;
    }

    if !root_bounds_hold(p, h, &usable, &usable_degree, problem.allowed.is_none()) {
        return (SearchOutcome::Absent, 0);
    }

    let mut state = State {
        pattern: p,
        host_adj,
        allowed,
        free: usable,
        image: vec![None; pn],
        placed: 0,
        nodes: 0,
        budget: problem.budget,
    };
    for &(u, v) in &problem.pinned {
        if !state.allowed[u].contains(v) || !state.free.contains(v) {
            return (SearchOutcome::Absent, 0);
        }
        if p.neighbors(u)
            .any(|w| state.image[w].is_some_and(|iw| !state.host_adj[v].contains(iw)))
        {
            return (SearchOutcome::Absent, 0);
        }
        state.image[u] = Some(v);
        state.free.remove(v);
        state.placed += 1;
    }

    let outcome = match state.extend() {
        Step::Done => SearchOutcome::Found(
            state
                .image
                .iter()
                .map(|x| x.expect("complete assignment"))
                .collect(),
        ),
        Step::Dead => SearchOutcome::Absent,
        Step::Timeout => SearchOutcome::Timeout,
    };
    (outcome, state.nodes)
}

impl State<'_> {
    fn candidates(&self, u: usize) -> Bitset {
        let mut c = self.allowed[u].clone();
        c.and_assign(&self.free);
        for w in self.pattern.neighbors(u) {
            if let Some(iw) = self.image[w] {
                c.and_assign(&self.host_adj[iw]);
            }
        }
        c
    }

    /// Picks the next vertex; `None` signals a frontier vertex without
    /// candidates.
    fn choose(&self) -> Option<(usize, Bitset)> {
        let mut best: Option<(usize, Bitset, usize)> = None;
        let mut any_frontier = false;
        for u in 0..self.image.len() {
            if self.image[u].is_some() {
                continue;
            }
            if !self.pattern.neighbors(u).any(|w| self.image[w].is_some()) {
                continue;
            }
            any_frontier = true;
            let c = self.candidates(u);
            let count = c.len();
            if count == 0 {
                return None;
            }
            let better = match &best {
                None => true,
                Some((bu, _, bc)) => {
                    count < *bc
                        || (count == *bc && self.pattern.degree(u) > self.pattern.degree(*bu))
                }
            };
            if better {
                best = Some((u, c, count));
            }
        }
        if any_frontier {
            return best.map(|(u, c, _)| (u, c));
        }
        let u = (0..self.image.len())
            .filter(|&u| self.image[u].is_none())
            .max_by(|&a, &b| {
                self.pattern
                    .degree(a)
                    .cmp(&self.pattern.degree(b))
                    .then(b.cmp(&a))
            })?;
        let c = self.candidates(u);
        (c.len() > 0).then_some((u, c))
    }

    fn extend(&mut self) -> Step {
        if self.placed == self.image.len() {
            return Step::Done;
        }
        let Some((u, cands)) = self.choose() else {
            return Step::Dead;
        };
        let mut order: Vec<(usize, usize)> = cands
            .iter()
            .map(|v| (self.host_adj[v].and_len(&self.free), v))
            .collect();
        order.sort_unstable();
        for (_, v) in order {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::Timeout;
            }
            self.image[u] = Some(v);
            self.free.remove(v);
            self.placed += 1;
            match self.extend() {
                Step::Done => return Step::Done,
                Step::Timeout => return Step::Timeout,
                Step::Dead => {}
            }
            self.image[u] = None;
            self.free.insert(v);
            self.placed -= 1;
        }
        Step::Dead
    }
}

/// Necessary conditions checked once before searching.
fn root_bounds_hold(
    p: &SimpleGraph,
    h: &SimpleGraph,
    usable: &Bitset,
    usable_degree: &[usize],
    unrestricted: bool,
) -> bool {
    let usable_list: Vec<usize> = usable.iter().collect();
    if p.vertex_count() > usable_list.len() {
        return false;
    }
    if unrestricted {
        // Sorted degree domination.
        let mut pd = p.degrees();
        pd.sort_unstable_by(|a, b| b.cmp(a));
        let mut hd: Vec<usize> = usable_list.iter().map(|&v| usable_degree[v]).collect();
        hd.sort_unstable_by(|a, b| b.cmp(a));
        if pd.iter().zip(&hd).any(|(a, b)| a > b) {
            return false;
        }
    }
    let sub = h.induced(&usable_list);
    if p.edge_count() > sub.edge_count() {
        return false;
    }
    if p.matching_number() > sub.matching_number() {
        return false;
    }
    let items: Vec<usize> = p.components().iter().map(Vec::len).collect();
    let bins: Vec<usize> = sub.components().iter().map(Vec::len).collect();
    components_fit(items, bins)
}

/// Whether connected pieces of the given sizes can be packed into host
/// components of the given capacities. Gives up (answering true) after a
/// fixed amount of work.
pub(crate) fn components_fit(mut items: Vec<usize>, mut bins: Vec<usize>) -> bool {
    items.sort_unstable_by(|a, b| b.cmp(a));
    bins.sort_unstable_by(|a, b| b.cmp(a));
    if items.iter().sum::<usize>() > bins.iter().sum::<usize>() {
        return false;
    }
    fn go(items: &[usize], bins: &mut [usize], work: &mut u32) -> bool {
        let Some((&first, rest)) = items.split_first() else {
            return true;
        };
        *work += 1;
        if *work > 100_000 {
            return true;
        }
        let mut tried: Vec<usize> = Vec::new();
        for i in 0..bins.len() {
            if bins[i] < first || tried.contains(&bins[i]) {
                continue;
            }
            tried.push(bins[i]);
            bins[i] -= first;
            let ok = go(rest, bins, work);
            bins[i] += first;
            if ok {
                return true;
            }
        }
        false
    }
    let mut work = 0;
    go(&items, &mut bins, &mut work)
}
