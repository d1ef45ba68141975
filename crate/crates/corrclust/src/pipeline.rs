//! End-to-end clustering: oracle, insertion-only stream, and dynamic stream
//! front ends feeding one shared recovery step.

use std::time::{Duration, Instant};

use crate::access::{AdjacencyOracle, DynamicStream, InsertionStream, StreamUpdate, UpdateOp};
use crate::error::{GraphError, StreamError};
use crate::exact::Decomposition;
use crate::graph::{Clustering, Label, Vertex};
use crate::par;
use crate::recovery::{collect_bundle_from_oracle, recover_decomposition, Recovery, RecoveryConfig, SampleBundle};
use crate::sketch::{BucketConfig, BucketSampler, L0Bank, L0Outcome, ReservoirT, VertexSamplerState};
use crate::util::{purpose, stream_rng, tally};

/// Sparse vertices become singletons, each almost-clique one cluster.
pub fn cluster_from_decomposition(d: &Decomposition) -> Clustering {
    let mut parts: Vec<Vec<Vertex>> = d.sparse.iter().map(|&v| vec![v]).collect();
    parts.extend(d.cliques.iter().cloned());
    Clustering::from_parts(d.n, &parts)
}

/// Backend-specific counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStats {
    Exact,
    Query {
        degree_queries: u64,
        neighbor_queries: u64,
    },
    Stream {
        records: u64,
        skipped_minus: u64,
        /// Max over the pass of edges held by reservoirs plus the vertex sampler.
        peak_stored_edges: u64,
    },
    Dynamic {
        updates: u64,
        /// ℓ0 queries for NS that returned no sample.
        ns_failures: u64,
        /// Non-isolated vertices left with no NS sample at all (forced sparse).
        vertices_without_samples: u64,
        /// Bucket-caught vertices whose neighborhood did not fully recover.
        bucket_failures: u64,
        sketch_bytes: u64,
    },
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub clustering: Clustering,
    pub decomposition: Decomposition,
    pub stats: RunStats,
    /// Size of the vertex sample and of D; `None` for the exact backend.
    pub sample_size: Option<usize>,
    pub dense_candidates: Option<usize>,
    pub laminar: Option<bool>,
    pub wall_time: Duration,
    pub seed: u64,
    pub config: String,
}

fn config_echo(mode: &str, cfg: &RecoveryConfig) -> String {
    format!("mode={mode} eps={} c={} beta={} log={:?} seed={}", cfg.eps, cfg.c, cfg.beta(), cfg.log_base, cfg.seed)
}

fn finish(
    b: &SampleBundle,
    cfg: &RecoveryConfig,
    stats: RunStats,
    mode: &str,
    start: Instant,
) -> RunReport {
    let Recovery { decomposition, dense, laminar, .. } = recover_decomposition(b, cfg);
    RunReport {
        clustering: cluster_from_decomposition(&decomposition),
        decomposition,
        stats,
        sample_size: Some(b.sampled.iter().filter(|s| s.is_some()).count()),
        dense_candidates: Some(dense.len()),
        laminar: Some(laminar),
        wall_time: start.elapsed(),
        seed: cfg.seed,
        config: config_echo(mode, cfg),
    }
}

/// Query-model clustering: never touches a pair the oracle did not return.
pub fn sublinear_time_cluster(o: &AdjacencyOracle, cfg: &RecoveryConfig) -> RunReport {
    let start = Instant::now();
    let before = o.query_counts();
    let b = collect_bundle_from_oracle(o, cfg);
    let after = o.query_counts();
    let stats = RunStats::Query { degree_queries: after.0 - before.0, neighbor_queries: after.1 - before.1 };
    finish(&b, cfg, stats, "query", start)
}

/// Single-pass state of the insertion-only algorithm: degree counters, one
/// `t`-slot reservoir per vertex, and the vertex sampler.
#[derive(Debug)]
pub struct InsertionSketch {
    n: usize,
    cfg: RecoveryConfig,
    t: usize,
    degrees: Vec<u32>,
    reservoirs: Vec<ReservoirT<Vertex>>,
    sampler: VertexSamplerState,
    records: u64,
    skipped_minus: u64,
    reservoir_stored: u64,
    peak: u64,
}

impl InsertionSketch {
    pub fn new(n: usize, cfg: &RecoveryConfig) -> Self {
        let t = cfg.t(n);
        let reservoirs =
            (0..n).map(|v| ReservoirT::new(t, stream_rng(cfg.seed, purpose::RESERVOIR, v as u64))).collect();
        let sampler = VertexSamplerState::new(n, cfg.beta(), stream_rng(cfg.seed, purpose::VERTEX_SAMPLER, 0));
        Self {
            n,
            cfg: *cfg,
            t,
            degrees: vec![0; n],
            reservoirs,
            sampler,
            records: 0,
            skipped_minus: 0,
            reservoir_stored: 0,
            peak: 0,
        }
    }

    fn check(&self, u: Vertex, v: Vertex) -> Result<(), StreamError> {
        for z in [u, v] {
            if z as usize >= self.n {
                return Err(GraphError::OutOfRange { vertex: z, n: self.n }.into());
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        Ok(())
    }

    /// One stream record. (−) records are dropped before any accounting.
    pub fn push(&mut self, u: Vertex, v: Vertex, label: Label) -> Result<(), StreamError> {
        self.check(u, v)?;
        self.records += 1;
        if label == Label::Neg {
            self.skipped_minus += 1;
            return Ok(());
        }
        for (z, w) in [(u, v), (v, u)] {
            let zi = z as usize;
            self.degrees[zi] += 1;
            let r = &mut self.reservoirs[zi];
            let before = r.stored();
            r.offer(w);
            self.reservoir_stored += (r.stored() - before) as u64;
        }
        self.sampler.step(u, v);
        self.peak = self.peak.max(self.stored_edges());
        Ok(())
    }

    pub fn ingest(&mut self, s: &InsertionStream) -> Result<(), StreamError> {
        s.records.iter().try_for_each(|&(u, v, l)| self.push(u, v, l))
    }

    /// Edges held right now.
    pub fn stored_edges(&self) -> u64 {
        self.reservoir_stored + self.sampler.stored_edges() as u64
    }

    pub fn peak_stored_edges(&self) -> u64 {
        self.peak
    }

    pub fn stats(&self) -> RunStats {
        RunStats::Stream { records: self.records, skipped_minus: self.skipped_minus, peak_stored_edges: self.peak }
    }

    pub fn into_bundle(self) -> SampleBundle {
        let ns = self.reservoirs.into_iter().map(ReservoirT::into_counts).collect();
        let mut sampled = vec![None; self.n];
        for (v, nb) in self.sampler.into_sample() {
            sampled[v as usize] = Some(nb);
        }
        SampleBundle { n: self.n, degrees: self.degrees, t: self.t, c: self.cfg.c, seed: self.cfg.seed, ns, sampled }
    }
}

/// Single pass over a labeled insertion stream; `n` must be supplied.
pub fn streaming_cluster(s: &InsertionStream, n: usize, cfg: &RecoveryConfig) -> Result<RunReport, StreamError> {
    let start = Instant::now();
    let mut sk = InsertionSketch::new(n, cfg);
    sk.ingest(s)?;
    let stats = sk.stats();
    let b = sk.into_bundle();
    Ok(finish(&b, cfg, stats, "stream", start))
}

/// Same pipeline over a stream of G⁺ only; a (−) record is an error.
pub fn streaming_cluster_plus_only(
    s: &InsertionStream,
    n: usize,
    cfg: &RecoveryConfig,
) -> Result<RunReport, StreamError> {
    if let Some(&(u, v, _)) = s.records.iter().find(|r| r.2 == Label::Neg) {
        return Err(StreamError::NegativeInPlusOnly(u, v));
    }
    let mut r = streaming_cluster(s, n, cfg)?;
    r.config = config_echo("stream-plus", cfg);
    Ok(r)
}

/// Dynamic-stream knobs on top of the recovery parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicConfig {
    pub recovery: RecoveryConfig,
    /// β for the bucket sampler is `recovery.beta()`.
    pub bucket_copies: f64,
    pub bucket_reps: usize,
    /// Repetitions inside each NS ℓ0 sampler.
    pub ns_reps: usize,
}

impl DynamicConfig {
    pub fn new(recovery: RecoveryConfig) -> Self {
        let b = BucketConfig::default();
        Self { recovery, bucket_copies: b.copies, bucket_reps: b.reps, ns_reps: 1 }
    }

    fn bucket(&self) -> BucketConfig {
        BucketConfig { beta: self.recovery.beta(), copies: self.bucket_copies, reps: self.bucket_reps }
    }
}

/// Sketch state of the dynamic algorithm.
#[derive(Debug)]
pub struct DynamicSketch {
    n: usize,
    cfg: DynamicConfig,
    t: usize,
    degrees: Vec<i64>,
    ns: Vec<L0Bank>,
    buckets: BucketSampler,
    updates: u64,
}

impl DynamicSketch {
    pub fn new(n: usize, cfg: &DynamicConfig) -> Self {
        let rc = &cfg.recovery;
        let t = rc.t(n);
        let ns = par::map_range(n, |v| {
            L0Bank::new(n, t, cfg.ns_reps, &mut stream_rng(rc.seed, purpose::L0_BANK, v as u64))
        });
        let buckets = BucketSampler::build(n, cfg.bucket(), &mut stream_rng(rc.seed, purpose::BUCKETS, 0));
        Self { n, cfg: *cfg, t, degrees: vec![0; n], ns, buckets, updates: 0 }
    }

    /// O(1)-memory checks only; full label discipline is `finalize_dynamic`'s job.
    pub fn push(&mut self, up: StreamUpdate) -> Result<(), StreamError> {
        for z in [up.u, up.v] {
            if z as usize >= self.n {
                return Err(GraphError::OutOfRange { vertex: z, n: self.n }.into());
            }
        }
        if up.u == up.v {
            return Err(GraphError::SelfLoop(up.u).into());
        }
        self.updates += 1;
        let delta = match up.op {
            UpdateOp::InsPos => 1,
            UpdateOp::RemPos => -1,
            UpdateOp::InsNeg | UpdateOp::RemNeg => return Ok(()),
        };
        for (z, w) in [(up.u, up.v), (up.v, up.u)] {
            let d = &mut self.degrees[z as usize];
            *d += delta;
            if *d < 0 {
                return Err(StreamError::RemovalBeforeInsertion(up.u, up.v));
            }
            self.ns[z as usize].update(w, delta);
        }
        self.buckets.update(up);
        Ok(())
    }

    pub fn space_bytes(&self) -> u64 {
        (self.ns.iter().map(L0Bank::space_bytes).sum::<usize>() + self.buckets.space_bytes() + self.n * 8) as u64
    }

    /// Query every NS sampler once and extract the bucket sample.
    pub fn into_bundle(self) -> (SampleBundle, RunStats) {
        let degrees: Vec<u32> = self.degrees.iter().map(|&d| d as u32).collect();
        let per_vertex = par::map_slice(&self.ns, |bank| {
            let mut got = Vec::new();
            let mut fails = 0u64;
            for i in 0..bank.len() {
                match bank.query(i) {
                    L0Outcome::Sample { index, value: 1 } => got.push(index),
                    L0Outcome::Empty => {}
                    _ => fails += 1,
                }
            }
            (tally(got), fails)
        });
        let mut ns = Vec::with_capacity(self.n);
        let mut ns_failures = 0;
        let mut without = 0;
        for (v, (list, f)) in per_vertex.into_iter().enumerate() {
            ns_failures += f;
            if degrees[v] > 0 && list.is_empty() {
                without += 1;
            }
            ns.push(list);
        }
        let (caught, bucket_failures) = self.buckets.extract(&degrees);
        let mut sampled = vec![None; self.n];
        for (v, nb) in caught {
            sampled[v as usize] = Some(nb);
        }
        let space = self.space_bytes();
        let rc = self.cfg.recovery;
        let stats = RunStats::Dynamic {
            updates: self.updates,
            ns_failures,
            vertices_without_samples: without,
            bucket_failures: bucket_failures as u64,
            sketch_bytes: space,
        };
        (SampleBundle { n: self.n, degrees, t: self.t, c: rc.c, seed: rc.seed, ns, sampled }, stats)
    }
}

/// Clustering of the final graph of a dynamic labeled stream.
pub fn dynamic_streaming_cluster(s: &DynamicStream, n: usize, cfg: &DynamicConfig) -> Result<RunReport, StreamError> {
    let start = Instant::now();
    let mut sk = DynamicSketch::new(n, cfg);
    s.updates.iter().try_for_each(|&up| sk.push(up))?;
    let (b, stats) = sk.into_bundle();
    Ok(finish(&b, &cfg.recovery, stats, "dynamic", start))
}

/// A stream of G⁻ only, padded into a dynamic stream: every pair inserted as
/// (+) first, then each (−) pair removed from G⁺ and inserted as (−).
pub fn minus_stream_adapter(minus_edges: &[(Vertex, Vertex)], n: usize) -> DynamicStream {
    let mut minus: Vec<(Vertex, Vertex)> = minus_edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    minus.sort_unstable();
    minus.dedup();
    let mut updates = Vec::with_capacity(n * n.saturating_sub(1) / 2 + 2 * minus.len());
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            updates.push(StreamUpdate::new(u, v, UpdateOp::InsPos));
        }
    }
    for (u, v) in minus {
        updates.push(StreamUpdate::new(u, v, UpdateOp::RemPos));
        updates.push(StreamUpdate::new(u, v, UpdateOp::InsNeg));
    }
    DynamicStream::new(n, updates)
}

/// Exact-decomposition run wrapped in the same report shape.
pub fn exact_cluster(g: &crate::graph::LabeledGraph, p: crate::exact::Params) -> RunReport {
    let start = Instant::now();
    let d = crate::exact::exact_decomposition(g, p);
    RunReport {
        clustering: cluster_from_decomposition(&d),
        decomposition: d,
        stats: RunStats::Exact,
        sample_size: None,
        dense_candidates: None,
        laminar: None,
        wall_time: start.elapsed(),
        seed: 0,
        config: format!("mode=exact eps={} delta={}", p.eps, p.delta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::finalize_dynamic;
    use crate::graph::{build_graph, clustering_cost, LabeledGraph};

    fn cliques(sizes: &[u32]) -> LabeledGraph {
        let mut e = Vec::new();
        let mut off = 0;
        for &s in sizes {
            for a in off..off + s {
                for b in a + 1..off + s {
                    e.push((a, b));
                }
            }
            off += s;
        }
        build_graph(off as usize, e).unwrap()
    }

    #[test]
    fn decomposition_to_clusters() {
        let d = Decomposition::from_cliques(4, vec![vec![2, 3]], &[0, 0, 1, 1]).unwrap();
        let c = cluster_from_decomposition(&d);
        assert_eq!(c.parts(), vec![vec![0], vec![1], vec![2, 3]]);
        assert_eq!(c.assignment(), &[0, 1, 2, 2]);
        let d = Decomposition::from_cliques(3, vec![vec![0, 1, 2]], &[2, 2, 2]).unwrap();
        assert_eq!(cluster_from_decomposition(&d).num_clusters(), 1);
    }

    #[test]
    fn empty_graph_query_run() {
        let g = build_graph(9, []).unwrap();
        let o = AdjacencyOracle::new(&g);
        let r = sublinear_time_cluster(&o, &RecoveryConfig::new(0.1, 1).unwrap());
        assert_eq!(r.clustering.num_clusters(), 9);
        assert_eq!(r.stats, RunStats::Query { degree_queries: 9, neighbor_queries: 0 });
    }

    #[test]
    fn single_edge_stream_is_singletons() {
        let s = InsertionStream::new(2, vec![(0, 1, Label::Pos)]);
        let r = streaming_cluster(&s, 2, &RecoveryConfig::new(0.1, 1).unwrap()).unwrap();
        assert_eq!(r.clustering.num_clusters(), 2);
    }

    #[test]
    fn stream_errors() {
        let cfg = RecoveryConfig::new(0.1, 1).unwrap();
        let s = InsertionStream::new(2, vec![(0, 5, Label::Pos)]);
        assert!(streaming_cluster(&s, 2, &cfg).is_err());
        let s = InsertionStream::new(2, vec![(0, 1, Label::Neg)]);
        assert_eq!(streaming_cluster_plus_only(&s, 2, &cfg).unwrap_err(), StreamError::NegativeInPlusOnly(0, 1));
        let s = InsertionStream::new(4, vec![]);
        assert_eq!(streaming_cluster_plus_only(&s, 4, &cfg).unwrap().clustering.num_clusters(), 4);
    }

    #[test]
    fn plus_only_matches_full_stream() {
        let g = cliques(&[20, 25]);
        let cfg = RecoveryConfig::new(0.0145, 3).unwrap().with_c(2.0).unwrap();
        let full = InsertionStream::from_graph(&g);
        let plus = InsertionStream::plus_only(&g);
        let a = streaming_cluster(&full, g.n(), &cfg).unwrap();
        let b = streaming_cluster_plus_only(&plus, g.n(), &cfg).unwrap();
        assert_eq!(a.decomposition, b.decomposition);
        assert_eq!(clustering_cost(&g, &a.clustering).total, 0);
    }

    #[test]
    fn oracle_and_stream_share_recovery() {
        let g = cliques(&[22, 30]);
        let cfg = RecoveryConfig::new(0.0145, 4).unwrap().with_c(2.0).unwrap();
        let b = collect_bundle_from_oracle(&AdjacencyOracle::new(&g), &cfg);
        let r1 = recover_decomposition(&b, &cfg);
        let r2 = recover_decomposition(&b.clone(), &cfg);
        assert_eq!(r1, r2);
        let s = streaming_cluster(&InsertionStream::from_graph(&g), g.n(), &cfg).unwrap();
        assert_eq!(s.decomposition, r1.decomposition);
    }

    #[test]
    fn minus_adapter_examples() {
        let s = minus_stream_adapter(&[(0, 1)], 3);
        assert_eq!(s.updates.len(), 3 + 2);
        let g = finalize_dynamic(&s, 3).unwrap();
        assert!(!g.is_pos(0, 1) && g.is_pos(0, 2) && g.is_pos(1, 2));
        let g = finalize_dynamic(&minus_stream_adapter(&[], 5), 5).unwrap();
        assert_eq!(g.num_pos_edges(), 10);
    }

    #[test]
    fn dynamic_insert_delete_reinsert_negative() {
        let mut ups = Vec::new();
        for a in 0..6u32 {
            for b in a + 1..6 {
                ups.push(StreamUpdate::new(a, b, UpdateOp::InsPos));
            }
        }
        for a in 0..6u32 {
            for b in a + 1..6 {
                ups.push(StreamUpdate::new(a, b, UpdateOp::RemPos));
                ups.push(StreamUpdate::new(a, b, UpdateOp::InsNeg));
            }
        }
        let s = DynamicStream::new(6, ups);
        let mut cfg = DynamicConfig::new(RecoveryConfig::new(0.1, 2).unwrap().with_c(1.0).unwrap());
        cfg.bucket_copies = 2.0;
        let r = dynamic_streaming_cluster(&s, 6, &cfg).unwrap();
        assert_eq!(r.clustering.num_clusters(), 6);
    }

    #[test]
    fn dynamic_removal_before_insert_is_error() {
        let s = DynamicStream::new(3, vec![StreamUpdate::new(0, 1, UpdateOp::RemPos)]);
        let mut cfg = DynamicConfig::new(RecoveryConfig::new(0.1, 2).unwrap().with_c(1.0).unwrap());
        cfg.bucket_copies = 2.0;
        assert!(dynamic_streaming_cluster(&s, 3, &cfg).is_err());
    }

    #[test]
    fn dynamic_recovers_two_cliques() {
        let g = cliques(&[24, 26]);
        let cfg = DynamicConfig::new(RecoveryConfig::new(0.0145, 8).unwrap().with_c(1.0).unwrap());
        let s = DynamicStream::from_insertions(&InsertionStream::from_graph(&g));
        let r = dynamic_streaming_cluster(&s, g.n(), &cfg).unwrap();
        assert_eq!(clustering_cost(&g, &r.clustering).total, 0, "{:?}", r.stats);
    }
}
