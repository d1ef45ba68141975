//! Full-information sparse-dense decomposition.
//!
//! Everything here reads the whole graph. It is a usable backend for small
//! inputs and the ground truth the sampling path is checked against.

use std::collections::HashMap;

use crate::error::ContractError;
use crate::graph::{LabeledGraph, Vertex};
use crate::par;
use crate::util::{difference_count, intersect_count, tally};

/// Tightest constraint used by the laminarity argument.
pub const DEFAULT_CEILING: f64 = 1.0 / 360.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub eps: f64,
    pub delta: f64,
}

impl Params {
    /// Checked against [`DEFAULT_CEILING`].
    pub fn new(eps: f64, delta: f64) -> Result<Self, ContractError> {
        Self::with_ceiling(eps, delta, DEFAULT_CEILING)
    }

    /// `eps, delta` must lie in `(0, ceiling)`; `ceiling` itself must be in `(0, 1]`.
    pub fn with_ceiling(eps: f64, delta: f64, ceiling: f64) -> Result<Self, ContractError> {
        if !(ceiling > 0.0 && ceiling <= 1.0) {
            return Err(ContractError::BadParams(format!("ceiling {ceiling} not in (0, 1]")));
        }
        for (name, x) in [("eps", eps), ("delta", delta)] {
            if !(x > 0.0 && x < ceiling) {
                return Err(ContractError::BadParams(format!("{name} = {x} not in (0, {ceiling})")));
            }
        }
        Ok(Self { eps, delta })
    }

    /// No ceiling beyond `(0, 1)`; for evaluating definitions at inflated parameters.
    pub fn loose(eps: f64, delta: f64) -> Result<Self, ContractError> {
        Self::with_ceiling(eps, delta, 1.0)
    }

    /// ε′ = 7ε.
    pub fn eps_prime(&self) -> f64 {
        7.0 * self.eps
    }

    /// δ′ = 4ε (tied to ε, not δ).
    pub fn delta_prime(&self) -> f64 {
        4.0 * self.eps
    }

    /// ε″ = ε/7.
    pub fn eps_dprime(&self) -> f64 {
        self.eps / 7.0
    }

    /// δ″ = ε/4.
    pub fn delta_dprime(&self) -> f64 {
        self.eps / 4.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexClass {
    Light,
    LowSparse,
    Dense,
}

/// Partition of V into sparse vertices and disjoint almost-cliques.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub n: usize,
    pub sparse: Vec<Vertex>,
    pub cliques: Vec<Vec<Vertex>>,
    /// Max degree (in G⁺) over each clique's members.
    pub delta_of: Vec<usize>,
}

impl Decomposition {
    /// Cliques become sorted and ordered by smallest member; everything uncovered is sparse.
    pub fn from_cliques(n: usize, cliques: Vec<Vec<Vertex>>, degrees: &[u32]) -> Result<Self, ContractError> {
        let mut cliques: Vec<Vec<Vertex>> = cliques.into_iter().filter(|c| !c.is_empty()).collect();
        let mut covered = vec![false; n];
        for c in &mut cliques {
            c.sort_unstable();
            for &v in c.iter() {
                let slot = covered
                    .get_mut(v as usize)
                    .ok_or_else(|| ContractError::BadInstance(format!("vertex {v} out of range")))?;
                if *slot {
                    return Err(ContractError::BadInstance(format!("vertex {v} in two cliques")));
                }
                *slot = true;
            }
        }
        cliques.sort_unstable_by_key(|c| c[0]);
        let sparse = (0..n as Vertex).filter(|&v| !covered[v as usize]).collect();
        let delta_of =
            cliques.iter().map(|c| c.iter().map(|&v| degrees[v as usize] as usize).max().unwrap_or(0)).collect();
        Ok(Self { n, sparse, cliques, delta_of })
    }

    /// Like [`from_cliques`](Self::from_cliques) but also checks an explicit sparse list.
    pub fn new(
        n: usize,
        sparse: Vec<Vertex>,
        cliques: Vec<Vec<Vertex>>,
        degrees: &[u32],
    ) -> Result<Self, ContractError> {
        if cliques.iter().any(Vec::is_empty) {
            return Err(ContractError::BadInstance("empty clique".into()));
        }
        let d = Self::from_cliques(n, cliques, degrees)?;
        let mut s = sparse;
        s.sort_unstable();
        if s != d.sparse {
            return Err(ContractError::BadInstance("sparse set and cliques do not partition V".into()));
        }
        Ok(d)
    }

    pub fn all_sparse(n: usize) -> Self {
        Self { n, sparse: (0..n as Vertex).collect(), cliques: Vec::new(), delta_of: Vec::new() }
    }

    /// Clique index per vertex, `None` for sparse vertices.
    pub fn membership(&self) -> Vec<Option<usize>> {
        let mut m = vec![None; self.n];
        for (i, c) in self.cliques.iter().enumerate() {
            for &v in c {
                m[v as usize] = Some(i);
            }
        }
        m
    }
}

#[inline]
fn low_threshold(deg_v: usize, eps: f64) -> f64 {
    (1.0 + eps) * deg_v as f64
}

/// Low_ε(v): neighbors whose degree is at most (1+ε)·deg(v). Sorted.
pub fn low_set(g: &LabeledGraph, v: Vertex, eps: f64) -> Vec<Vertex> {
    let thr = low_threshold(g.degree(v), eps);
    g.neighbors(v).iter().copied().filter(|&u| g.degree(u) as f64 <= thr).collect()
}

fn isolated_from_low(g: &LabeledGraph, v: Vertex, low: &[Vertex], eps: f64) -> Vec<Vertex> {
    let thr = eps * g.degree(v) as f64;
    g.neighbors(v).iter().copied().filter(|&u| difference_count(low, g.neighbors(u)) as f64 >= thr).collect()
}

/// Isolated_ε(v): neighbors missing at least ε·deg(v) members of Low_ε(v). Sorted.
pub fn isolated_set(g: &LabeledGraph, v: Vertex, eps: f64) -> Vec<Vertex> {
    let low = low_set(g, v, eps);
    isolated_from_low(g, v, &low, eps)
}

/// Light, then low-sparse, then dense. Degree-0 vertices are light.
pub fn classify_vertex(g: &LabeledGraph, v: Vertex, p: Params) -> VertexClass {
    let d = g.degree(v) as f64;
    let low = low_set(g, v, p.eps);
    if low.len() as f64 <= (1.0 - p.delta) * d {
        return VertexClass::Light;
    }
    let thr = p.eps * d;
    let isolated_in_low = low.iter().filter(|&&u| difference_count(&low, g.neighbors(u)) as f64 >= thr).count();
    if isolated_in_low as f64 >= p.delta * d {
        VertexClass::LowSparse
    } else {
        VertexClass::Dense
    }
}

pub fn classify_all(g: &LabeledGraph, p: Params) -> Vec<VertexClass> {
    par::map_range(g.n(), |v| classify_vertex(g, v as Vertex, p))
}

/// Low(v) − Isolated(v), defined for dense vertices only.
pub fn kernel(g: &LabeledGraph, v: Vertex, p: Params) -> Result<Vec<Vertex>, ContractError> {
    if classify_vertex(g, v, p) != VertexClass::Dense {
        return Err(ContractError::NotDense(v));
    }
    Ok(kernel_unchecked(g, v, p.eps))
}

/// Low_ε(v) − Isolated_ε(v) without the density check.
pub fn kernel_unchecked(g: &LabeledGraph, v: Vertex, eps: f64) -> Vec<Vertex> {
    let low = low_set(g, v, eps);
    let thr = eps * g.degree(v) as f64;
    low.iter().copied().filter(|&u| (difference_count(&low, g.neighbors(u)) as f64) < thr).collect()
}

/// Single-threshold candidate set of a dense vertex.
pub fn exact_candidate_set(g: &LabeledGraph, v: Vertex, p: Params) -> Result<Vec<Vertex>, ContractError> {
    if classify_vertex(g, v, p) != VertexClass::Dense {
        return Err(ContractError::NotDense(v));
    }
    Ok(candidate_set_unchecked(g, v, p))
}

/// {u : |N(u) ∩ Low(v)| ≥ (1−6ε−6δ)deg(v) and deg(u) ≤ (1+2ε+2δ)deg(v)}.
pub fn candidate_set_unchecked(g: &LabeledGraph, v: Vertex, p: Params) -> Vec<Vertex> {
    let dv = g.degree(v) as f64;
    let need = (1.0 - 6.0 * p.eps - 6.0 * p.delta) * dv;
    let max_deg = (1.0 + 2.0 * p.eps + 2.0 * p.delta) * dv;
    let low = low_set(g, v, p.eps);
    if need <= 0.0 {
        // every vertex clears the intersection rule; only the degree gate bites
        return (0..g.n() as Vertex).filter(|&u| g.degree(u) as f64 <= max_deg).collect();
    }
    // |N(u) ∩ Low(v)| for every u, by walking the low neighbors' lists
    let hits = tally(low.iter().flat_map(|&w| g.neighbors(w).iter().copied()).collect());
    hits.into_iter()
        .filter(|&(u, k)| k as f64 >= need && g.degree(u) as f64 <= max_deg)
        .map(|(u, _)| u)
        .collect()
}

/// Outcome of root extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminarRoots {
    pub roots: Vec<Vec<Vertex>>,
    pub laminar: bool,
    /// Sets that partially overlapped or straddled earlier roots.
    pub violations: usize,
}

/// Maximal sets of a laminar collection.
///
/// Non-laminar input falls back to greedy-by-size: a set whose members are all
/// unassigned opens a root; once all sets are seen, unassigned members of the
/// offending sets join the root holding most of that set's assigned members.
pub fn laminar_roots(sets: &[Vec<Vertex>]) -> LaminarRoots {
    let mut order: Vec<Vec<Vertex>> = sets
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    order.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    order.dedup();

    let mut root_of: HashMap<Vertex, usize> = HashMap::new();
    let mut roots: Vec<Vec<Vertex>> = Vec::new();
    let mut deferred: Vec<usize> = Vec::new();
    for (idx, s) in order.iter().enumerate() {
        let owners: Vec<Option<usize>> = s.iter().map(|v| root_of.get(v).copied()).collect();
        if owners.iter().all(Option::is_none) {
            let r = roots.len();
            for &v in s {
                root_of.insert(v, r);
            }
            roots.push(s.clone());
            continue;
        }
        let first = owners[0];
        if first.is_some() && owners.iter().all(|&o| o == first) {
            continue; // nested inside an existing root
        }
        deferred.push(idx);
    }
    for &idx in &deferred {
        let s = &order[idx];
        let mut votes: HashMap<usize, usize> = HashMap::new();
        for v in s {
            if let Some(&r) = root_of.get(v) {
                *votes.entry(r).or_default() += 1;
            }
        }
        let Some(target) = votes.into_iter().max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0))).map(|x| x.0)
        else {
            continue;
        };
        for &v in s {
            if let std::collections::hash_map::Entry::Vacant(e) = root_of.entry(v) {
                e.insert(target);
                roots[target].push(v);
            }
        }
    }
    for r in &mut roots {
        r.sort_unstable();
    }
    roots.sort_unstable_by_key(|r| r[0]);
    LaminarRoots { roots, laminar: deferred.is_empty(), violations: deferred.len() }
}

/// Collection of candidate sets over all dense vertices, indexed by vertex.
pub fn candidate_collection(g: &LabeledGraph, p: Params) -> Vec<Option<Vec<Vertex>>> {
    par::map_range(g.n(), |v| {
        let v = v as Vertex;
        (classify_vertex(g, v, p) == VertexClass::Dense).then(|| candidate_set_unchecked(g, v, p))
    })
}

/// Roots of the dense vertices' candidate sets become the almost-cliques.
pub fn exact_decomposition(g: &LabeledGraph, p: Params) -> Decomposition {
    let sets: Vec<Vec<Vertex>> = candidate_collection(g, p).into_iter().flatten().collect();
    let roots = laminar_roots(&sets);
    Decomposition::from_cliques(g.n(), roots.roots, &g.degrees()).expect("roots are disjoint")
}

/// |Low(v) − N(u)| for every u in N(v); exposed for property checks.
pub fn low_minus_neighbors(g: &LabeledGraph, v: Vertex, eps: f64) -> Vec<(Vertex, usize)> {
    let low = low_set(g, v, eps);
    g.neighbors(v).iter().map(|&u| (u, difference_count(&low, g.neighbors(u)))).collect()
}

/// |N(u) ∩ S| for sorted `s`.
pub fn neighbors_in(g: &LabeledGraph, u: Vertex, s: &[Vertex]) -> usize {
    intersect_count(g.neighbors(u), s)
}
