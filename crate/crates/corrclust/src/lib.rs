//! Correlation clustering on complete signed graphs through a sparse–dense
//! decomposition of the positive graph.
//!
//! Four ways in: the exact decomposition on a fully known graph, and
//! sample-based recovery driven by an adjacency-list oracle, an
//! insertion-only stream, or a dynamic stream. All of them end in the same
//! clustering rule: every almost-clique is a cluster, every sparse vertex a
//! singleton.
//!
//! ```
//! use corrclust::{clustering_cost, exact_decomposition, cluster_from_decomposition, gen_planted, Params, PlantedSpec};
//!
//! let p = gen_planted(&PlantedSpec::new(vec![20, 20], 0.0, 0, 7)).unwrap();
//! let d = exact_decomposition(&p.graph, Params::loose(0.07, 0.07).unwrap());
//! assert_eq!(d.cliques.len(), 2);
//! let c = cluster_from_decomposition(&d);
//! assert_eq!(clustering_cost(&p.graph, &c).total, 0);
//! ```

pub mod access;
pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod io;
pub mod par;
pub mod pipeline;
pub mod recovery;
pub mod sketch;
pub mod util;
pub mod verify;

pub use access::{finalize_dynamic, AdjacencyOracle, DynamicStream, InsertionStream, StreamUpdate, UpdateOp};
pub use error::{ContractError, GraphError, OracleError, ParseError, StreamError};
pub use exact::{
    candidate_set_unchecked, classify_all, classify_vertex, exact_candidate_set, exact_decomposition, isolated_set,
    kernel, laminar_roots, low_set, Decomposition, LaminarRoots, Params, VertexClass,
};
pub use generate::{gen_matrix_index_instance, gen_or_instance, gen_planted, gen_random, Planted, PlantedSpec};
pub use graph::{build_graph, clustering_cost, edge_label, Clustering, CostReport, Label, LabeledGraph, Vertex};

pub use pipeline::{
    cluster_from_decomposition, dynamic_streaming_cluster, exact_cluster, minus_stream_adapter, streaming_cluster,
    streaming_cluster_plus_only, sublinear_time_cluster, DynamicConfig, RunReport, RunStats,
};
pub use recovery::{
    approx_candidate_set, collect_bundle_from_oracle, dense_candidates, light_tester, low_sparse_tester,
    recover_decomposition, LogBase, Recovery, RecoveryConfig, SampleBundle,
};

pub use verify::{
    brute_force_optimal, local_perturbation_cost_delta, verify_decomposition, VerifyMode, VerifyReport,
};
