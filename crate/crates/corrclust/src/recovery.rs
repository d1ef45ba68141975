//! Sampling-based recovery of the decomposition.
//!
//! Input is a [`SampleBundle`]: all degrees, `t` uniform neighbor samples per
//! vertex, and a degree-proportional vertex sample with full neighborhoods.
//! Testers rule out light and low-sparse sampled vertices; each survivor gets
//! an approximate candidate set; the roots of that collection are the cliques.

use rand::Rng;

use crate::access::AdjacencyOracle;
use crate::error::{ContractError, OracleError};
use crate::exact::{laminar_roots, Decomposition};
use crate::graph::Vertex;
use crate::par;
use crate::util::{purpose, stream_rng, tally_weighted};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

/// Recovery parameters. ε is checked after the 7ε inflation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryConfig {
    pub eps: f64,
    pub c: f64,
    pub log_base: LogBase,
    pub seed: u64,
    pub ceiling: f64,
    /// Vertex-sampler constant for the streaming paths; `None` means β = c.
    pub beta: Option<f64>,
}

pub const DEFAULT_C: f64 = 20.0;

impl RecoveryConfig {
    /// c = 20, natural log, ceiling 1 on the inflated ε′ = 7ε.
    pub fn new(eps: f64, seed: u64) -> Result<Self, ContractError> {
        Self { eps, c: DEFAULT_C, log_base: LogBase::Natural, seed, ceiling: 1.0, beta: None }.validated()
    }

    pub fn with_c(mut self, c: f64) -> Result<Self, ContractError> {
        self.c = c;
        self.validated()
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self, ContractError> {
        self.beta = Some(beta);
        self.validated()
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(self.c)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validated(self) -> Result<Self, ContractError> {
        if !(self.ceiling > 0.0 && self.ceiling <= 1.0) {
            return Err(ContractError::BadParams(format!("ceiling {} not in (0, 1]", self.ceiling)));
        }
        if !(self.eps > 0.0 && 7.0 * self.eps < self.ceiling) {
            return Err(ContractError::BadParams(format!(
                "eps = {} must satisfy 0 < 7·eps < {}",
                self.eps, self.ceiling
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(ContractError::BadParams(format!("c = {} must be positive", self.c)));
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b.is_finite()) {
                return Err(ContractError::BadParams(format!("beta = {b} must be positive")));
            }
        }
        Ok(self)
    }

    /// t = ⌈c·ε⁻²·log n⌉, at least 1.
    pub fn t(&self, n: usize) -> usize {
        let x = self.c * self.log_base.log(n as f64) / (self.eps * self.eps);
        (x.ceil() as usize).max(1)
    }

    /// c·log n, the vertex-sampling numerator.
    pub fn c_log_n(&self, n: usize) -> f64 {
        self.c * self.log_base.log(n as f64)
    }

    /// p_v = min(c·log n / deg, 1); degree 0 is always sampled.
    pub fn p_sample(&self, n: usize, deg: usize) -> f64 {
        if deg == 0 {
            1.0
        } else {
            (self.c_log_n(n) / deg as f64).min(1.0)
        }
    }
}

/// Everything the recovery algorithm reads.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBundle {
    pub n: usize,
    pub degrees: Vec<u32>,
    pub t: usize,
    pub c: f64,
    pub seed: u64,
    /// NS(v) as sorted `(neighbor, multiplicity)`; multiplicities sum to the sample count.
    pub ns: Vec<Vec<(Vertex, u32)>>,
    /// Full sorted neighborhood for sampled vertices.
    pub sampled: Vec<Option<Vec<Vertex>>>,
}

impl SampleBundle {
    /// Number of samples in NS(v) (t in the oracle and insertion-only paths).
    pub fn ns_len(&self, v: Vertex) -> u64 {
        self.ns[v as usize].iter().map(|&(_, k)| k as u64).sum()
    }

    pub fn is_sampled(&self, v: Vertex) -> bool {
        self.sampled[v as usize].is_some()
    }

    pub fn sample(&self) -> Vec<Vertex> {
        (0..self.n as Vertex).filter(|&v| self.is_sampled(v)).collect()
    }

    pub fn nbhd(&self, v: Vertex) -> Result<&[Vertex], ContractError> {
        self.sampled[v as usize].as_deref().ok_or(ContractError::NotSampled(v))
    }

    /// Σ|NS(v)| counted with multiplicity, plus Σ deg over the sample.
    pub fn stored_edges(&self) -> u64 {
        let ns: u64 = (0..self.n as Vertex).map(|v| self.ns_len(v)).sum();
        let nb: u64 = self.sampled.iter().flatten().map(|l| l.len() as u64).sum();
        ns + nb
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.degrees.len() != self.n || self.ns.len() != self.n || self.sampled.len() != self.n {
            return Err("length mismatch".into());
        }
        for v in 0..self.n {
            let d = self.degrees[v];
            if d == 0 && !self.ns[v].is_empty() {
                return Err(format!("vertex {v} has degree 0 but samples"));
            }
            if !self.ns[v].windows(2).all(|w| w[0].0 < w[1].0) {
                return Err(format!("NS({v}) not sorted"));
            }
            if let Some(nb) = &self.sampled[v] {
                if nb.len() != d as usize || !nb.windows(2).all(|w| w[0] < w[1]) {
                    return Err(format!("neighborhood of sampled {v} malformed"));
                }
            }
        }
        Ok(())
    }
}

/// Degrees, `t` uniform neighbor queries per vertex, and the vertex sample,
/// all through the oracle. Per-vertex RNG streams keep this schedule-free.
pub fn collect_bundle_from_oracle(o: &AdjacencyOracle, cfg: &RecoveryConfig) -> SampleBundle {
    let n = o.n();
    let t = cfg.t(n);
    let per_vertex = par::map_range(n, |v| -> Result<_, OracleError> {
        let v = v as Vertex;
        let mut s = o.session();
        let d = s.degree_query(v)?;
        let mut ns = Vec::new();
        if d > 0 {
            let mut rng = stream_rng(cfg.seed, purpose::NEIGHBOR_SAMPLES, v as u64);
            // slot i-1 holds the id returned for position i and its hit count
            let mut slots = vec![(0 as Vertex, 0u32); d];
            for _ in 0..t {
                let i = rng.random_range(1..=d);
                let u = s.neighbor_query(v, i)?;
                slots[i - 1].0 = u;
                slots[i - 1].1 += 1;
            }
            ns = slots.into_iter().filter(|p| p.1 > 0).collect();
        }
        let mut rng = stream_rng(cfg.seed, purpose::VERTEX_SAMPLE, v as u64);
        let p = cfg.p_sample(n, d);
        let nbhd = if rng.random::<f64>() < p {
            let mut nb = Vec::with_capacity(d);
            for i in 1..=d {
                nb.push(s.neighbor_query(v, i)?);
            }
            Some(nb)
        } else {
            None
        };
        Ok((d as u32, ns, nbhd))
    });
    let mut degrees = Vec::with_capacity(n);
    let mut ns_all = Vec::with_capacity(n);
    let mut sampled = Vec::with_capacity(n);
    for r in per_vertex {
        let (d, ns, nb) = r.expect("indices drawn within degree");
        degrees.push(d);
        ns_all.push(ns);
        sampled.push(nb);
    }
    SampleBundle { n, degrees, t, c: cfg.c, seed: cfg.seed, ns: ns_all, sampled }
}

fn low_count(b: &SampleBundle, nb: &[Vertex], dv: f64, eps: f64) -> usize {
    let thr = (1.0 + eps) * dv;
    nb.iter().filter(|&&u| b.degrees[u as usize] as f64 <= thr).count()
}

/// Exact (ε,ε)-lightness from the sampled neighborhood: |Low_ε(v)| ≤ (1−ε)·deg(v).
pub fn light_tester(b: &SampleBundle, v: Vertex, eps: f64) -> Result<bool, ContractError> {
    let nb = b.nbhd(v)?;
    let dv = b.degrees[v as usize] as f64;
    Ok(low_count(b, nb, dv, eps) as f64 <= (1.0 - eps) * dv)
}

fn low_set_of(b: &SampleBundle, nb: &[Vertex], dv: f64, eps: f64) -> Vec<Vertex> {
    let thr = (1.0 + eps) * dv;
    nb.iter().copied().filter(|&u| b.degrees[u as usize] as f64 <= thr).collect()
}

/// Samples of NS(u) landing in the sorted set `s`.
fn ns_hits(b: &SampleBundle, u: Vertex, s: &[Vertex]) -> u64 {
    b.ns[u as usize].iter().filter(|(w, _)| s.binary_search(w).is_ok()).map(|&(_, k)| k as u64).sum()
}

/// Marks u ∈ Low_{7ε}(v) isolated when deg(u) < (1−2ε)deg(v) or fewer than
/// (1−4ε)·|NS(u)| of its samples land in Low_{7ε}(v); v looks low-sparse when
/// at least 2ε·deg(v) are marked.
pub fn low_sparse_tester(b: &SampleBundle, v: Vertex, eps: f64) -> Result<bool, ContractError> {
    let nb = b.nbhd(v)?;
    let dv = b.degrees[v as usize] as f64;
    let low7 = low_set_of(b, nb, dv, 7.0 * eps);
    let marked = low7
        .iter()
        .filter(|&&u| {
            (b.degrees[u as usize] as f64) < (1.0 - 2.0 * eps) * dv
                || (ns_hits(b, u, &low7) as f64) < (1.0 - 4.0 * eps) * b.ns_len(u) as f64
        })
        .count();
    Ok(marked as f64 >= 2.0 * eps * dv)
}

fn is_dense_candidate(b: &SampleBundle, v: Vertex, eps: f64) -> bool {
    matches!(light_tester(b, v, eps), Ok(false)) && matches!(low_sparse_tester(b, v, eps), Ok(false))
}

/// D: sampled vertices that pass neither tester.
pub fn dense_candidates(b: &SampleBundle, eps: f64) -> Vec<Vertex> {
    let sample = b.sample();
    let keep = par::map_slice(&sample, |&v| is_dense_candidate(b, v, eps));
    sample.into_iter().zip(keep).filter(|p| p.1).map(|p| p.0).collect()
}

/// For each w, the vertices whose NS contains w, with multiplicity.
#[derive(Clone, Debug)]
pub struct ReverseIndex {
    rev: Vec<Vec<(Vertex, u32)>>,
}

impl ReverseIndex {
    pub fn build(b: &SampleBundle) -> Self {
        let mut rev = vec![Vec::new(); b.n];
        for (u, list) in b.ns.iter().enumerate() {
            for &(w, k) in list {
                rev[w as usize].push((u as Vertex, k));
            }
        }
        Self { rev }
    }
}

/// Coefficient 1 − 6ε′ − 6δ′ − ε with ε′ = 7ε, δ′ = 4ε, i.e. 1 − 67ε.
pub fn approx_coefficient(eps: f64) -> f64 {
    1.0 - 6.0 * 7.0 * eps - 6.0 * 4.0 * eps - eps
}

/// Degree gate 1 + 2ε′ + 2δ′ = 1 + 22ε.
pub fn approx_degree_gate(eps: f64) -> f64 {
    1.0 + 2.0 * 7.0 * eps + 2.0 * 4.0 * eps
}

fn approx_set_with(b: &SampleBundle, idx: &ReverseIndex, v: Vertex, eps: f64) -> Vec<Vertex> {
    let nb = b.sampled[v as usize].as_deref().expect("v sampled");
    let dv = b.degrees[v as usize] as f64;
    let lowp = low_set_of(b, nb, dv, 7.0 * eps);
    let coef = approx_coefficient(eps);
    let gate = approx_degree_gate(eps) * dv;
    let hits = tally_weighted(lowp.iter().flat_map(|&w| idx.rev[w as usize].iter().copied()).collect());
    let passes = |u: Vertex, h: u32| {
        let du = b.degrees[u as usize];
        let tu = b.ns_len(u);
        if tu == 0 || du as f64 > gate {
            return false; // no samples (isolated, or every sampler failed): stays sparse
        }
        h as f64 >= coef * tu as f64 * dv / du as f64
    };
    if coef <= 0.0 {
        // the intersection rule is vacuous; only the degree gate remains
        return (0..b.n as Vertex).filter(|&u| passes(u, 0)).collect();
    }
    hits.into_iter().filter(|&(u, h)| passes(u, h)).map(|(u, _)| u).collect()
}

/// Approximate (ε′,δ′)-candidate set of `v ∈ D`.
pub fn approx_candidate_set(b: &SampleBundle, v: Vertex, eps: f64) -> Result<Vec<Vertex>, ContractError> {
    if !b.is_sampled(v) {
        return Err(ContractError::NotSampled(v));
    }
    if !is_dense_candidate(b, v, eps) {
        return Err(ContractError::NotCandidate(v));
    }
    Ok(approx_set_with(b, &ReverseIndex::build(b), v, eps))
}

/// Output of the recovery algorithm with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    pub decomposition: Decomposition,
    pub dense: Vec<Vertex>,
    /// Whether the candidate collection was laminar.
    pub laminar: bool,
    pub laminar_violations: usize,
}

/// Testers, candidate sets, and root extraction.
pub fn recover_decomposition(b: &SampleBundle, cfg: &RecoveryConfig) -> Recovery {
    let eps = cfg.eps;
    let dense = dense_candidates(b, eps);
    let idx = ReverseIndex::build(b);
    let sets = par::map_slice(&dense, |&v| approx_set_with(b, &idx, v, eps));
    let roots = laminar_roots(&sets);
    let decomposition = Decomposition::from_cliques(b.n, roots.roots, &b.degrees).expect("roots are disjoint");
    Recovery { decomposition, dense, laminar: roots.laminar, laminar_violations: roots.violations }
}

/// Bernoulli(p_v) vertex sample alone, from the same stream the bundle uses.
pub fn draw_vertex_sample(degrees: &[u32], cfg: &RecoveryConfig) -> Vec<Vertex> {
    let n = degrees.len();
    (0..n as Vertex)
        .filter(|&v| {
            let mut rng = stream_rng(cfg.seed, purpose::VERTEX_SAMPLE, v as u64);
            rng.random::<f64>() < cfg.p_sample(n, degrees[v as usize] as usize)
        })
        .collect()
}
