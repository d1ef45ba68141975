//! Access models: a query-counting adjacency-list oracle over G⁺, and
//! insertion-only / dynamic labeled edge streams.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{OracleError, StreamError};
use crate::graph::{choose2, Label, LabeledGraph, Vertex};

/// Adjacency-list access to G⁺ that counts every call.
///
/// Neighbor order is the sorted adjacency order and indices are 1-based.
#[derive(Debug)]
pub struct AdjacencyOracle<'g> {
    g: &'g LabeledGraph,
    degree_queries: AtomicU64,
    neighbor_queries: AtomicU64,
}

impl<'g> AdjacencyOracle<'g> {
    pub fn new(g: &'g LabeledGraph) -> Self {
        Self { g, degree_queries: AtomicU64::new(0), neighbor_queries: AtomicU64::new(0) }
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    pub fn degree_query(&self, v: Vertex) -> Result<usize, OracleError> {
        self.check(v)?;
        self.degree_queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.g.degree(v))
    }

    pub fn neighbor_query(&self, v: Vertex, i: usize) -> Result<Vertex, OracleError> {
        self.check(v)?;
        self.neighbor_queries.fetch_add(1, Ordering::Relaxed);
        lookup(self.g, v, i)
    }

    /// `(degree_queries, neighbor_queries)`.
    pub fn query_counts(&self) -> (u64, u64) {
        (self.degree_queries.load(Ordering::Relaxed), self.neighbor_queries.load(Ordering::Relaxed))
    }

    /// A batching handle whose counts are folded into the oracle on drop.
    pub fn session(&self) -> OracleSession<'_, 'g> {
        OracleSession { oracle: self, degree: 0, neighbor: 0 }
    }

    fn check(&self, v: Vertex) -> Result<(), OracleError> {
        if (v as usize) < self.g.n() {
            Ok(())
        } else {
            Err(OracleError::OutOfRange { vertex: v, n: self.g.n() })
        }
    }
}

fn lookup(g: &LabeledGraph, v: Vertex, i: usize) -> Result<Vertex, OracleError> {
    let nb = g.neighbors(v);
    if i == 0 || i > nb.len() {
        return Err(OracleError::IndexOutOfBounds { vertex: v, index: i, degree: nb.len() });
    }
    Ok(nb[i - 1])
}

/// Thread-local query counter; avoids an atomic per call in the hot loops.
pub struct OracleSession<'o, 'g> {
    oracle: &'o AdjacencyOracle<'g>,
    degree: u64,
    neighbor: u64,
}

impl OracleSession<'_, '_> {
    pub fn degree_query(&mut self, v: Vertex) -> Result<usize, OracleError> {
        self.oracle.check(v)?;
        self.degree += 1;
        Ok(self.oracle.g.degree(v))
    }

    #[inline]
    pub fn neighbor_query(&mut self, v: Vertex, i: usize) -> Result<Vertex, OracleError> {
        self.neighbor += 1;
        lookup(self.oracle.g, v, i)
    }
}

impl Drop for OracleSession<'_, '_> {
    fn drop(&mut self) {
        self.oracle.degree_queries.fetch_add(self.degree, Ordering::Relaxed);
        self.oracle.neighbor_queries.fetch_add(self.neighbor, Ordering::Relaxed);
    }
}

#[inline]
fn key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn check_range(n: usize, u: Vertex, v: Vertex) -> Result<(), StreamError> {
    use crate::error::GraphError;
    for w in [u, v] {
        if w as usize >= n {
            return Err(GraphError::OutOfRange { vertex: w, n }.into());
        }
    }
    if u == v {
        return Err(GraphError::SelfLoop(u).into());
    }
    Ok(())
}

/// Edges of G arriving one by one with their labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InsertionStream {
    pub n: usize,
    pub records: Vec<(Vertex, Vertex, Label)>,
}

impl InsertionStream {
    pub fn new(n: usize, records: Vec<(Vertex, Vertex, Label)>) -> Self {
        Self { n, records }
    }

    /// Every pair of `g` in lexicographic order.
    pub fn from_graph(g: &LabeledGraph) -> Self {
        let n = g.n() as Vertex;
        let mut records = Vec::with_capacity(g.num_pairs() as usize);
        for u in 0..n {
            for v in u + 1..n {
                let l = if g.is_pos(u, v) { Label::Pos } else { Label::Neg };
                records.push((u, v, l));
            }
        }
        Self { n: g.n(), records }
    }

    /// Only the positive edges of `g`.
    pub fn plus_only(g: &LabeledGraph) -> Self {
        Self { n: g.n(), records: g.pos_edges().map(|(u, v)| (u, v, Label::Pos)).collect() }
    }

    pub fn validate(&self) -> Result<(), StreamError> {
        let mut seen = HashSet::with_capacity(self.records.len());
        for &(u, v, _) in &self.records {
            check_range(self.n, u, v)?;
            if !seen.insert(key(u, v)) {
                return Err(StreamError::DuplicatePair(u, v));
            }
        }
        Ok(())
    }

    /// Graph made of the (+) records.
    pub fn to_graph(&self) -> Result<LabeledGraph, StreamError> {
        self.validate()?;
        let pos = self.records.iter().filter(|r| r.2 == Label::Pos).map(|&(u, v, _)| (u, v));
        Ok(LabeledGraph::new(self.n, pos)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UpdateOp {
    InsPos,
    RemPos,
    InsNeg,
    RemNeg,
}

impl UpdateOp {
    pub fn label(self) -> Label {
        match self {
            UpdateOp::InsPos | UpdateOp::RemPos => Label::Pos,
            UpdateOp::InsNeg | UpdateOp::RemNeg => Label::Neg,
        }
    }

    pub fn is_insert(self) -> bool {
        matches!(self, UpdateOp::InsPos | UpdateOp::InsNeg)
    }

    pub fn new(label: Label, insert: bool) -> Self {
        match (label, insert) {
            (Label::Pos, true) => UpdateOp::InsPos,
            (Label::Pos, false) => UpdateOp::RemPos,
            (Label::Neg, true) => UpdateOp::InsNeg,
            (Label::Neg, false) => UpdateOp::RemNeg,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamUpdate {
    pub u: Vertex,
    pub v: Vertex,
    pub op: UpdateOp,
}

impl StreamUpdate {
    pub fn new(u: Vertex, v: Vertex, op: UpdateOp) -> Self {
        Self { u, v, op }
    }
}

/// Insertions and removals of labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DynamicStream {
    pub n: usize,
    pub updates: Vec<StreamUpdate>,
}

impl DynamicStream {
    pub fn new(n: usize, updates: Vec<StreamUpdate>) -> Self {
        Self { n, updates }
    }

    /// Insertion-only stream re-encoded as label insertions.
    pub fn from_insertions(s: &InsertionStream) -> Self {
        let updates =
            s.records.iter().map(|&(u, v, l)| StreamUpdate::new(u, v, UpdateOp::new(l, true))).collect();
        Self { n: s.n, updates }
    }
}

/// Graph defined by the net effect of a valid dynamic stream.
pub fn finalize_dynamic(s: &DynamicStream, n: usize) -> Result<LabeledGraph, StreamError> {
    let mut state: HashMap<(Vertex, Vertex), Label> = HashMap::new();
    for up in &s.updates {
        check_range(n, up.u, up.v)?;
        let k = key(up.u, up.v);
        let want = up.op.label();
        if up.op.is_insert() {
            if state.contains_key(&k) {
                return Err(StreamError::DoubleInsertion(k.0, k.1));
            }
            state.insert(k, want);
        } else {
            match state.get(&k) {
                Some(&l) if l == want => {
                    state.remove(&k);
                }
                _ => return Err(StreamError::RemovalBeforeInsertion(k.0, k.1)),
            }
        }
    }
    if state.len() as u64 != choose2(n as u64) {
        let nv = n as Vertex;
        for u in 0..nv {
            for v in u + 1..nv {
                if !state.contains_key(&(u, v)) {
                    return Err(StreamError::Unlabeled(u, v));
                }
            }
        }
    }
    let pos = state.into_iter().filter(|&(_, l)| l == Label::Pos).map(|(k, _)| k);
    Ok(LabeledGraph::new(n, pos)?)
}
