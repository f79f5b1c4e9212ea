//! Realizing q-unbalanced bipartite degree sequences as disjoint unions of
//! small q-unbalanced bipartite components.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::sequences::{realize_bipartite, zero_sum_split, BipartiteDemand, DegreeSequence, IntSequence};

/// A bipartite degree demand split into a small class `S` and a large class
/// `T`. Vertex labels are `0..|S|` for `S` followed by `|S|..|S|+|T|` for `T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnbalancedBipartiteSeq {
    pub side_s: Vec<usize>,
    pub side_t: Vec<usize>,
    pub q: usize,
}

impl UnbalancedBipartiteSeq {
    pub fn new(side_s: Vec<usize>, side_t: Vec<usize>, q: usize) -> Self {
        UnbalancedBipartiteSeq { side_s, side_t, q }
    }

    pub fn len(&self) -> usize {
        self.side_s.len() + self.side_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_degree(&self) -> usize {
        self.side_s
            .iter()
            .chain(&self.side_t)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Degree of a global label.
    pub fn degree(&self, label: usize) -> usize {
        if label < self.side_s.len() {
            self.side_s[label]
        } else {
            self.side_t[label - self.side_s.len()]
        }
    }

    /// The positional degree sequence over all labels.
    pub fn to_degree_sequence(&self) -> DegreeSequence {
        DegreeSequence::new(self.side_s.iter().chain(&self.side_t).copied().collect())
    }

    /// Shape conditions for a q-unbalanced sequence with entries in `1..=max_degree`.
    pub fn validate(&self, max_degree: usize) -> Result<()> {
        let (s, t) = (self.side_s.len(), self.side_t.len());
        if self.q == 0 {
            return Err(Error::BadShape("q must be at least 1".into()));
        }
        if s == 0 {
            return Err(Error::BadShape("class S is empty".into()));
        }
        if let Some(&d) = self
            .side_s
            .iter()
            .chain(&self.side_t)
            .find(|&&d| d == 0 || d > max_degree)
        {
            return Err(Error::BadShape(format!("degree {d} outside [1, {max_degree}]")));
        }
        if self.q * s > t {
            return Err(Error::BadShape(format!("|T|={t} < q|S|={}", self.q * s)));
        }
        if t > max_degree * s {
            return Err(Error::BadShape(format!("|T|={t} > D|S|={}", max_degree * s)));
        }
        Ok(())
    }
}

/// One vertex of `S` grouped with `h` vertices of `T`, `q <= h <= D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tuple {
    pub s_vertex: usize,
    pub t_vertices: Vec<usize>,
    /// `Σ π(t_i) - π(s)`.
    pub bias: i64,
}

impl Tuple {
    pub fn vertex_count(&self) -> usize {
        1 + self.t_vertices.len()
    }
}

/// Splits `S ∪ T` into tuples, each `S` vertex taking as many `T` vertices
/// as it can (at most `D`) while leaving at least `q` for every later one.
pub fn form_tuples(seq: &UnbalancedBipartiteSeq, max_degree: usize) -> Result<Vec<Tuple>> {
    seq.validate(max_degree)?;
    let s = seq.side_s.len();
    let mut remaining_t = seq.side_t.len();
    let mut next_t = s;
    let mut tuples = Vec::with_capacity(s);
    for sv in 0..s {
        let remaining_s = s - sv;
        let h = max_degree.min(remaining_t - seq.q * (remaining_s - 1));
        let mut tuple = Tuple {
            s_vertex: sv,
            t_vertices: (next_t..next_t + h).collect(),
            bias: 0,
        };
        tuple.bias = tuple_bias(&tuple, seq);
        tuples.push(tuple);
        next_t += h;
        remaining_t -= h;
    }
    debug_assert_eq!(remaining_t, 0);
    Ok(tuples)
}

pub fn tuple_bias(t: &Tuple, seq: &UnbalancedBipartiteSeq) -> i64 {
    let t_sum: usize = t.t_vertices.iter().map(|&v| seq.degree(v)).sum();
    t_sum as i64 - seq.degree(t.s_vertex) as i64
}

/// A bipartite component. Local vertices `0..s_labels.len()` are the `S`
/// class, the rest the `T` class; `*_labels` give their global labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub s_labels: Vec<usize>,
    pub t_labels: Vec<usize>,
    pub graph: SimpleGraph,
}

impl Component {
    pub fn vertex_count(&self) -> usize {
        self.s_labels.len() + self.t_labels.len()
    }

    pub fn is_q_unbalanced(&self, q: usize) -> bool {
        q * self.s_labels.len() <= self.t_labels.len()
    }

    /// Global label of local vertex `i`.
    pub fn label(&self, i: usize) -> usize {
        let s = self.s_labels.len();
        if i < s {
            self.s_labels[i]
        } else {
            self.t_labels[i - s]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentList {
    pub components: Vec<Component>,
}

impl ComponentList {
    /// The disjoint union on global labels `0..n`.
    pub fn union_graph(&self, n: usize) -> SimpleGraph {
        let mut g = SimpleGraph::new(n);
        for c in &self.components {
            for (u, v) in c.graph.edges() {
                g.add_edge(c.label(u), c.label(v));
            }
        }
        g
    }

    pub fn max_vertex_count(&self) -> usize {
        self.components
            .iter()
            .map(Component::vertex_count)
            .max()
            .unwrap_or(0)
    }
}

/// How zero-bias tuple groups are combined before realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergePolicy {
    /// Close a merged group as soon as its demand is bigraphic.
    #[default]
    Feasibility,
    /// Close a merged group once both classes have at least `2Δ²` vertices,
    /// `Δ` being the group's maximum degree (the sufficient condition for
    /// bigraphicity).
    Threshold,
}

/// Realizes `seq` as a disjoint union of q-unbalanced bipartite components.
pub fn decompose_unbalanced(seq: &UnbalancedBipartiteSeq, max_degree: usize) -> Result<ComponentList> {
    decompose_unbalanced_with(seq, max_degree, MergePolicy::Feasibility)
}

pub fn decompose_unbalanced_with(
    seq: &UnbalancedBipartiteSeq,
    max_degree: usize,
    policy: MergePolicy,
) -> Result<ComponentList> {
    let tuples = form_tuples(seq, max_degree)?;
    let total_bias: i64 = tuples.iter().map(|t| t.bias).sum();
    if total_bias != 0 {
        return Err(Error::NotRealizable(format!(
            "class sums differ by {total_bias}"
        )));
    }
    let k = (max_degree * max_degree) as i64;
    let biases = IntSequence::new(tuples.iter().map(|t| t.bias).collect(), k)?;
    let mut groups: Vec<Vec<usize>> = zero_sum_split(&biases)?;
    let size = |g: &Vec<usize>| g.iter().map(|&i| tuples[i].vertex_count()).sum::<usize>();
    groups.sort_by(|a, b| size(a).cmp(&size(b)).then(a[0].cmp(&b[0])));

    let mut closed: Vec<(Vec<usize>, Component)> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    for g in groups {
        open.extend(g);
        let ready = match policy {
            MergePolicy::Feasibility => true,
            MergePolicy::Threshold => meets_threshold(&tuples, &open, seq),
        };
        if ready {
            if let Ok(c) = realize_group(&tuples, &open, seq) {
                closed.push((std::mem::take(&mut open), c));
            }
        }
    }
    // Fold any unrealizable remainder back into the most recent components.
    while !open.is_empty() {
        match realize_group(&tuples, &open, seq) {
            Ok(c) => {
                closed.push((std::mem::take(&mut open), c));
            }
            Err(_) => match closed.pop() {
                Some((members, _)) => open.extend(members),
                None => {
                    return Err(Error::NotRealizable(
                        "no bipartite realization of the whole demand".into(),
                    ))
                }
            },
        }
    }
    Ok(ComponentList {
        components: closed.into_iter().map(|(_, c)| c).collect(),
    })
}

fn meets_threshold(tuples: &[Tuple], members: &[usize], seq: &UnbalancedBipartiteSeq) -> bool {
    let s = members.len();
    let t: usize = members.iter().map(|&i| tuples[i].t_vertices.len()).sum();
    let delta = members
        .iter()
        .flat_map(|&i| std::iter::once(tuples[i].s_vertex).chain(tuples[i].t_vertices.iter().copied()))
        .map(|v| seq.degree(v))
        .max()
        .unwrap_or(0);
    s >= 2 * delta * delta && t >= 2 * delta * delta
}

fn realize_group(tuples: &[Tuple], members: &[usize], seq: &UnbalancedBipartiteSeq) -> Result<Component> {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    let s_labels: Vec<usize> = sorted.iter().map(|&i| tuples[i].s_vertex).collect();
    let t_labels: Vec<usize> = sorted
        .iter()
        .flat_map(|&i| tuples[i].t_vertices.iter().copied())
        .collect();
    let demand = BipartiteDemand::new(
        s_labels.iter().map(|&v| seq.degree(v)).collect(),
        t_labels.iter().map(|&v| seq.degree(v)).collect(),
    );
    let r = realize_bipartite(&demand)?;
    Ok(Component {
        s_labels,
        t_labels,
        graph: r.graph,
    })
}
