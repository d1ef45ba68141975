//! Labeled complete graphs, clusterings and the disagreement cost.
//!
//! Only the positive subgraph is stored; every pair that is not a positive
//! edge is negative.

use std::collections::HashMap;

use crate::error::GraphError;

/// Vertex ids are dense integers in `[0, n)`.
pub type Vertex = u32;

/// Label of an unordered pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Pos,
    Neg,
}

impl Label {
    pub fn symbol(self) -> char {
        match self {
            Label::Pos => '+',
            Label::Neg => '-',
        }
    }
}

/// Complete signed graph represented by its positive adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    pos_adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl LabeledGraph {
    /// Builds the graph from an edge list; duplicates (in either orientation) collapse.
    pub fn new<I>(n: usize, positive_edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut pos_adj = vec![Vec::new(); n];
        for (u, v) in positive_edges {
            check_pair(n, u, v)?;
            pos_adj[u as usize].push(v);
            pos_adj[v as usize].push(u);
        }
        let mut m2 = 0;
        for list in &mut pos_adj {
            list.sort_unstable();
            list.dedup();
            m2 += list.len();
        }
        Ok(Self { n, pos_adj, m: m2 / 2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of positive edges.
    pub fn num_pos_edges(&self) -> usize {
        self.m
    }

    pub fn num_pairs(&self) -> u64 {
        choose2(self.n as u64)
    }

    pub fn num_neg_edges(&self) -> u64 {
        self.num_pairs() - self.m as u64
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.pos_adj[v as usize].len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.pos_adj.iter().map(|l| l.len() as u32).collect()
    }

    /// Sorted positive neighbors of `v`.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.pos_adj[v as usize]
    }

    pub fn max_degree(&self) -> usize {
        self.pos_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Label lookup by binary search in the shorter list.
    pub fn label(&self, u: Vertex, v: Vertex) -> Result<Label, GraphError> {
        check_pair(self.n, u, v)?;
        Ok(if self.is_pos(u, v) { Label::Pos } else { Label::Neg })
    }

    /// Unchecked variant of [`label`](Self::label) for hot loops.
    #[inline]
    pub fn is_pos(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.pos_adj[u as usize].len() <= self.pos_adj[v as usize].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.pos_adj[a as usize].binary_search(&b).is_ok()
    }

    /// Positive edges with `u < v`, in lexicographic order.
    pub fn pos_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.pos_adj.iter().enumerate().flat_map(|(u, l)| {
            let u = u as Vertex;
            l.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        for (u, l) in self.pos_adj.iter().enumerate() {
            if !l.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("list of {u} not strictly sorted"));
            }
            for &v in l {
                if v as usize >= self.n || v as usize == u {
                    return Err(format!("bad neighbor {v} of {u}"));
                }
                if self.pos_adj[v as usize].binary_search(&(u as Vertex)).is_err() {
                    return Err(format!("asymmetric edge {u}-{v}"));
                }
            }
        }
        Ok(())
    }
}

fn check_pair(n: usize, u: Vertex, v: Vertex) -> Result<(), GraphError> {
    for w in [u, v] {
        if w as usize >= n {
            return Err(GraphError::OutOfRange { vertex: w, n });
        }
    }
    if u == v {
        return Err(GraphError::SelfLoop(u));
    }
    Ok(())
}

pub fn build_graph<I>(n: usize, positive_edges: I) -> Result<LabeledGraph, GraphError>
where
    I: IntoIterator<Item = (Vertex, Vertex)>,
{
    LabeledGraph::new(n, positive_edges)
}

pub fn edge_label(g: &LabeledGraph, u: Vertex, v: Vertex) -> Result<Label, GraphError> {
    g.label(u, v)
}

#[inline]
pub fn choose2(k: u64) -> u64 {
    if k < 2 {
        0
    } else if k % 2 == 0 {
        (k / 2) * (k - 1)
    } else {
        k * ((k - 1) / 2)
    }
}

/// Total map vertex -> cluster id. Equal ids mean same cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<u64>,
}

impl Clustering {
    pub fn new(assignment: Vec<u64>) -> Self {
        Self { assignment }
    }

    pub fn singletons(n: usize) -> Self {
        Self { assignment: (0..n as u64).collect() }
    }

    pub fn single_cluster(n: usize) -> Self {
        Self { assignment: vec![0; n] }
    }

    /// Builds from disjoint parts; vertices not covered become singletons.
    pub fn from_parts(n: usize, parts: &[Vec<Vertex>]) -> Self {
        let mut a: Vec<u64> = (0..n as u64).collect();
        for p in parts {
            if let Some(&m) = p.iter().min() {
                for &v in p {
                    a[v as usize] = m as u64;
                }
            }
        }
        Self { assignment: a }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn cluster_of(&self, v: Vertex) -> u64 {
        self.assignment[v as usize]
    }

    pub fn assignment(&self) -> &[u64] {
        &self.assignment
    }

    pub fn set(&mut self, v: Vertex, id: u64) {
        self.assignment[v as usize] = id;
    }

    /// Clusters as sorted member lists, ordered by smallest member.
    pub fn parts(&self) -> Vec<Vec<Vertex>> {
        let mut by_id: HashMap<u64, Vec<Vertex>> = HashMap::new();
        for (v, &id) in self.assignment.iter().enumerate() {
            by_id.entry(id).or_default().push(v as Vertex);
        }
        let mut parts: Vec<_> = by_id.into_values().collect();
        parts.sort_unstable_by_key(|p| p[0]);
        parts
    }

    pub fn num_clusters(&self) -> usize {
        let mut ids = self.assignment.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Relabels every cluster by its minimum member id.
    pub fn canonical(&self) -> Self {
        Self::from_parts(self.n(), &self.parts())
    }

    /// Same partition, ignoring ids.
    pub fn same_partition(&self, other: &Self) -> bool {
        self.n() == other.n() && self.parts() == other.parts()
    }
}

/// Disagreement cost split into its two sources.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostReport {
    pub total: u64,
    pub pos_cut: u64,
    pub neg_joined: u64,
}

/// Cost of `c` on `g` without touching negative pairs one by one.
pub fn clustering_cost(g: &LabeledGraph, c: &Clustering) -> CostReport {
    assert_eq!(g.n(), c.n(), "clustering must cover every vertex");
    let mut pos_inside = 0u64;
    let mut pos_cut = 0u64;
    for (u, v) in g.pos_edges() {
        if c.cluster_of(u) == c.cluster_of(v) {
            pos_inside += 1;
        } else {
            pos_cut += 1;
        }
    }
    let mut sizes: HashMap<u64, u64> = HashMap::new();
    for &id in c.assignment() {
        *sizes.entry(id).or_default() += 1;
    }
    let joined_pairs: u64 = sizes.values().map(|&s| choose2(s)).sum();
    let neg_joined = joined_pairs - pos_inside;
    CostReport { total: pos_cut + neg_joined, pos_cut, neg_joined }
}
