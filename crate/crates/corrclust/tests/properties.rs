//! Randomized invariants, each checked against a naive oracle written here.

use std::collections::{BTreeMap, BTreeSet};

use corrclust::access::OracleSession;
use corrclust::exact::candidate_collection;
use corrclust::generate::gen_churn_stream;
use corrclust::io::{
    parse_bundle, parse_clustering, parse_decomposition, parse_dynamic, parse_graph, parse_stream, write_bundle,
    write_clustering, write_decomposition, write_dynamic, write_graph, write_stream,
};
use corrclust::sketch::l0::{L0Bank, L0Outcome};
use corrclust::sketch::reservoir::ReservoirT;
use corrclust::sketch::vertex_sampler::VertexSamplerState;
use corrclust::util::stream_rng;
use corrclust::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            build_graph(n, edges).unwrap()
        })
    })
}

fn graph_and_clustering(max_n: usize) -> impl Strategy<Value = (LabeledGraph, Clustering)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(0u64..n as u64, n).prop_map(Clustering::new))
    })
}

fn pairwise_cost(g: &LabeledGraph, c: &Clustering) -> (u64, u64) {
    let (mut cut, mut joined) = (0, 0);
    for u in 0..g.n() as Vertex {
        for v in u + 1..g.n() as Vertex {
            let same = c.cluster_of(u) == c.cluster_of(v);
            match (g.is_pos(u, v), same) {
                (true, false) => cut += 1,
                (false, true) => joined += 1,
                _ => {}
            }
        }
    }
    (cut, joined)
}

fn nbhd(g: &LabeledGraph, v: Vertex) -> BTreeSet<Vertex> {
    g.neighbors(v).iter().copied().collect()
}

/// Definitions evaluated directly on sets.
fn naive_class(g: &LabeledGraph, v: Vertex, eps: f64, delta: f64) -> VertexClass {
    let d = g.degree(v) as f64;
    let low: BTreeSet<Vertex> =
        nbhd(g, v).into_iter().filter(|&u| g.degree(u) as f64 <= (1.0 + eps) * d).collect();
    if low.len() as f64 <= (1.0 - delta) * d {
        return VertexClass::Light;
    }
    let isolated_low = low
        .iter()
        .filter(|&&u| {
            let nu = nbhd(g, u);
            low.iter().filter(|w| !nu.contains(w)).count() as f64 >= eps * d
        })
        .count();
    if isolated_low as f64 >= delta * d {
        VertexClass::LowSparse
    } else {
        VertexClass::Dense
    }
}

fn planted_strategy() -> impl Strategy<Value = Planted> {
    (proptest::collection::vec(1usize..30, 1..4), 0.0f64..0.2, 0usize..6, any::<u64>())
        .prop_map(|(sizes, noise, extra, seed)| gen_planted(&PlantedSpec::new(sizes, noise, extra, seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cost_matches_pairwise_evaluation((g, c) in graph_and_clustering(9)) {
        let r = clustering_cost(&g, &c);
        let (cut, joined) = pairwise_cost(&g, &c);
        prop_assert_eq!(r.pos_cut, cut);
        prop_assert_eq!(r.neg_joined, joined);
        prop_assert_eq!(r.total, r.pos_cut + r.neg_joined);
    }

    #[test]
    fn singleton_and_single_cluster_costs(g in graph_strategy(12)) {
        let n = g.n();
        let m = g.num_pos_edges() as u64;
        prop_assert_eq!(clustering_cost(&g, &Clustering::singletons(n)).total, m);
        let pairs = (n * n.saturating_sub(1) / 2) as u64;
        prop_assert_eq!(clustering_cost(&g, &Clustering::single_cluster(n)).total, pairs - m);
    }

    #[test]
    fn graph_structure_invariants(g in graph_strategy(14)) {
        prop_assert!(g.check_invariants().is_ok());
        for u in 0..g.n() as Vertex {
            for v in 0..g.n() as Vertex {
                if u != v {
                    let l = edge_label(&g, u, v).unwrap();
                    prop_assert_eq!(l == Label::Pos, g.neighbors(u).contains(&v));
                    prop_assert_eq!(l, edge_label(&g, v, u).unwrap());
                }
            }
        }
    }

    #[test]
    fn stream_replay_matches_oracle(g in graph_strategy(14), seed in any::<u64>()) {
        let s = generate::shuffled_stream(&g, seed);
        let replay = build_graph(g.n(), s.records.iter().filter(|r| r.2 == Label::Pos).map(|r| (r.0, r.1))).unwrap();
        let o = AdjacencyOracle::new(&replay);
        for v in 0..g.n() as Vertex {
            prop_assert_eq!(o.degree_query(v).unwrap(), g.degree(v));
            for (i, &w) in g.neighbors(v).iter().enumerate() {
                prop_assert_eq!(o.neighbor_query(v, i + 1).unwrap(), w);
            }
        }
        let (dq, nq) = o.query_counts();
        prop_assert_eq!(dq, g.n() as u64);
        prop_assert_eq!(nq, 2 * g.num_pos_edges() as u64);
    }

    #[test]
    fn session_counts_fold_into_oracle(g in graph_strategy(10)) {
        let o = AdjacencyOracle::new(&g);
        {
            let mut s: OracleSession = o.session();
            for v in 0..g.n() as Vertex {
                s.degree_query(v).unwrap();
                if g.degree(v) > 0 {
                    s.neighbor_query(v, 1).unwrap();
                }
            }
        }
        let with_nbrs = (0..g.n() as Vertex).filter(|&v| g.degree(v) > 0).count() as u64;
        prop_assert_eq!(o.query_counts(), (g.n() as u64, with_nbrs));
    }

    #[test]
    fn finalize_dynamic_ignores_interleaving(g in graph_strategy(10), q in 0.0f64..0.5, seed in any::<u64>()) {
        let s = gen_churn_stream(&g, q, seed);
        prop_assert_eq!(&finalize_dynamic(&s, g.n()).unwrap(), &g);
        // Regroup updates pair by pair in a random pair order, keeping each pair's own order.
        let mut per_pair: BTreeMap<(Vertex, Vertex), Vec<StreamUpdate>> = BTreeMap::new();
        for up in &s.updates {
            per_pair.entry((up.u.min(up.v), up.u.max(up.v))).or_default().push(*up);
        }
        let mut groups: Vec<_> = per_pair.into_values().collect();
        groups.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x5eed));
        let regrouped = DynamicStream::new(g.n(), groups.into_iter().flatten().collect());
        prop_assert_eq!(&finalize_dynamic(&regrouped, g.n()).unwrap(), &g);
    }

    #[test]
    fn classification_matches_definitions(p in planted_strategy(), eps in 0.01f64..0.3, delta in 0.01f64..0.3) {
        let g = &p.graph;
        let params = Params::loose(eps, delta).unwrap();
        let classes = classify_all(g, params);
        for v in 0..g.n() as Vertex {
            prop_assert_eq!(classes[v as usize], naive_class(g, v, eps, delta));
        }
    }

    #[test]
    fn exact_decomposition_partitions_v(p in planted_strategy(), eps in 0.01f64..0.1) {
        let g = &p.graph;
        let d = exact_decomposition(g, Params::loose(eps, eps).unwrap());
        let mut seen = vec![0u8; g.n()];
        for &v in d.sparse.iter().chain(d.cliques.iter().flatten()) {
            seen[v as usize] += 1;
        }
        prop_assert!(seen.iter().all(|&k| k == 1));
        prop_assert!(d.cliques.iter().all(|c| !c.is_empty()));
        for (c, &delta_k) in d.cliques.iter().zip(&d.delta_of) {
            prop_assert_eq!(delta_k, c.iter().map(|&v| g.degree(v)).max().unwrap());
        }
    }

    #[test]
    fn candidate_sets_contain_their_vertex(p in planted_strategy(), eps in 0.01f64..0.06) {
        let g = &p.graph;
        for (v, c) in candidate_collection(g, Params::loose(eps, eps).unwrap()).iter().enumerate() {
            if let Some(c) = c {
                prop_assert!(c.binary_search(&(v as Vertex)).is_ok());
            }
        }
    }

    #[test]
    fn laminar_roots_are_disjoint_maximal(sets in proptest::collection::vec(proptest::collection::btree_set(0u32..20, 0..8), 0..8)) {
        let sets: Vec<Vec<Vertex>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let r = laminar_roots(&sets);
        let mut seen = BTreeSet::new();
        for root in &r.roots {
            for &v in root {
                prop_assert!(seen.insert(v));
            }
        }
        let covered: BTreeSet<Vertex> = sets.iter().flatten().copied().collect();
        prop_assert_eq!(&seen, &covered);
        let laminar = sets.iter().all(|a| sets.iter().all(|b| {
            let (sa, sb): (BTreeSet<_>, BTreeSet<_>) = (a.iter().collect(), b.iter().collect());
            sa.is_disjoint(&sb) || sa.is_subset(&sb) || sb.is_subset(&sa)
        }));
        prop_assert_eq!(r.laminar, laminar);
        if laminar {
            // every input set sits inside exactly one root
            for s in sets.iter().filter(|s| !s.is_empty()) {
                prop_assert!(r.roots.iter().any(|root| s.iter().all(|v| root.contains(v))));
            }
        }
    }

    #[test]
    fn brute_force_beats_every_pipeline(g in graph_strategy(8), eps in 0.05f64..0.3) {
        let (best, opt) = brute_force_optimal(&g).unwrap();
        prop_assert_eq!(clustering_cost(&g, &best).total, opt);
        prop_assert!(opt <= g.num_pos_edges() as u64);
        let exact = exact_cluster(&g, Params::loose(eps, eps).unwrap());
        prop_assert!(opt <= clustering_cost(&g, &exact.clustering).total);
        let cfg = RecoveryConfig::new(eps.min(0.14), 1).unwrap();
        let o = AdjacencyOracle::new(&g);
        prop_assert!(opt <= clustering_cost(&g, &sublinear_time_cluster(&o, &cfg).clustering).total);
    }

    #[test]
    fn perturbation_delta_matches_recomputation((g, c) in graph_and_clustering(10), v in any::<prop::sample::Index>(), target in 0u64..12) {
        let v = v.index(g.n()) as Vertex;
        let before = clustering_cost(&g, &c).total as i64;
        let mut moved = c.clone();
        moved.set(v, target);
        let after = clustering_cost(&g, &moved).total as i64;
        prop_assert_eq!(local_perturbation_cost_delta(&g, &c, v, target), after - before);
    }

    #[test]
    fn generators_are_pure(sizes in proptest::collection::vec(1usize..15, 1..4), noise in 0.0f64..0.4, seed in any::<u64>()) {
        let spec = PlantedSpec::new(sizes, noise, 3, seed);
        let (a, b) = (gen_planted(&spec).unwrap(), gen_planted(&spec).unwrap());
        prop_assert_eq!(&a.graph, &b.graph);
        prop_assert_eq!(a.flipped, b.flipped);
        prop_assert_eq!(gen_random(20, 0.3, seed), gen_random(20, 0.3, seed));
    }

    #[test]
    fn planted_flips_bound_truth_cost(p in planted_strategy()) {
        prop_assert_eq!(clustering_cost(&p.graph, &p.truth).total, p.flipped);
    }

    #[test]
    fn file_formats_round_trip(p in planted_strategy(), seed in any::<u64>()) {
        let g = &p.graph;
        prop_assert_eq!(&parse_graph(&write_graph(g)).unwrap(), g);
        let s = generate::shuffled_stream(g, seed);
        prop_assert_eq!(parse_stream(&write_stream(&s)).unwrap().records, s.records.clone());
        let dy = gen_churn_stream(g, 0.2, seed);
        prop_assert_eq!(parse_dynamic(&write_dynamic(&dy)).unwrap().updates, dy.updates.clone());
        let c = p.truth.clone();
        prop_assert!(parse_clustering(&write_clustering(&c)).unwrap().same_partition(&c));
        let d = exact_decomposition(g, Params::loose(0.07, 0.07).unwrap());
        prop_assert_eq!(&parse_decomposition(&write_decomposition(&d)).unwrap().resolve(g).unwrap(), &d);
        let cfg = RecoveryConfig::new(0.1, seed).unwrap().with_c(2.0).unwrap();
        let b = collect_bundle_from_oracle(&AdjacencyOracle::new(g), &cfg);
        let b2 = parse_bundle(&write_bundle(&b)).unwrap();
        prop_assert_eq!(write_bundle(&b2), write_bundle(&b));
        prop_assert_eq!(recover_decomposition(&b2, &cfg).decomposition, recover_decomposition(&b, &cfg).decomposition);
    }

    #[test]
    fn bundle_invariants(p in planted_strategy(), seed in any::<u64>()) {
        let g = &p.graph;
        let cfg = RecoveryConfig::new(0.12, seed).unwrap().with_c(1.0).unwrap();
        let b = collect_bundle_from_oracle(&AdjacencyOracle::new(g), &cfg);
        prop_assert!(b.validate().is_ok());
        for v in 0..g.n() as Vertex {
            let expect = if g.degree(v) > 0 { b.t as u64 } else { 0 };
            prop_assert_eq!(b.ns_len(v), expect);
            for &(u, _) in &b.ns[v as usize] {
                prop_assert!(g.is_pos(u, v));
            }
            if let Ok(nb) = b.nbhd(v) {
                prop_assert_eq!(nb, g.neighbors(v));
            }
        }
    }

    #[test]
    fn light_tester_is_exact(p in planted_strategy(), eps in 0.01f64..0.14, seed in any::<u64>()) {
        let g = &p.graph;
        let cfg = RecoveryConfig::new(eps, seed).unwrap().with_c(50.0).unwrap();
        let b = collect_bundle_from_oracle(&AdjacencyOracle::new(g), &cfg);
        for v in b.sample() {
            let d = g.degree(v) as f64;
            let low = g.neighbors(v).iter().filter(|&&u| g.degree(u) as f64 <= (1.0 + eps) * d).count();
            prop_assert_eq!(light_tester(&b, v, eps).unwrap(), low as f64 <= (1.0 - eps) * d);
        }
    }

    #[test]
    fn recovery_is_deterministic(p in planted_strategy(), seed in any::<u64>()) {
        let g = &p.graph;
        let cfg = RecoveryConfig::new(0.05, seed).unwrap().with_c(1.0).unwrap();
        let a = sublinear_time_cluster(&AdjacencyOracle::new(g), &cfg);
        let b = sublinear_time_cluster(&AdjacencyOracle::new(g), &cfg);
        prop_assert_eq!(&a.decomposition, &b.decomposition);
        prop_assert_eq!(a.clustering.assignment(), b.clustering.assignment());
    }

    #[test]
    fn insertion_paths_agree_on_shared_bundle(p in planted_strategy(), seed in any::<u64>()) {
        // Two pushes of the same stream give the same bundle, and the pipeline's
        // decomposition is exactly recover_decomposition of that bundle.
        let g = &p.graph;
        let cfg = RecoveryConfig::new(0.05, seed).unwrap().with_c(1.0).unwrap();
        let s = generate::shuffled_stream(g, seed);
        let report = streaming_cluster(&s, g.n(), &cfg).unwrap();
        let mut sk = pipeline::InsertionSketch::new(g.n(), &cfg);
        sk.ingest(&s).unwrap();
        let b = sk.into_bundle();
        prop_assert_eq!(&report.decomposition, &recover_decomposition(&b, &cfg).decomposition);
    }

    #[test]
    fn l0_bank_is_linear(
        ups in proptest::collection::vec((0u32..64, -3i64..=3), 1..40),
        seed in any::<u64>(),
        perm_seed in any::<u64>(),
    ) {
        let build = |order: &[(u32, i64)]| {
            let mut b = L0Bank::new(64, 4, 2, &mut ChaCha8Rng::seed_from_u64(seed));
            for &(i, d) in order {
                b.update(i, d);
            }
            (0..4).map(|k| b.query(k)).collect::<Vec<_>>()
        };
        let mut shuffled = ups.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let a = build(&ups);
        prop_assert_eq!(&a, &build(&shuffled));
        let mut net = BTreeMap::new();
        for &(i, d) in &ups {
            *net.entry(i).or_insert(0i64) += d;
        }
        net.retain(|_, v| *v != 0);
        for out in a {
            match out {
                L0Outcome::Sample { index, value } => prop_assert_eq!(net.get(&index), Some(&value)),
                L0Outcome::Empty => prop_assert!(net.is_empty()),
                L0Outcome::Failed => prop_assert!(!net.is_empty()),
            }
        }
    }

    #[test]
    fn reservoir_slots_hold_offered_items(t in 0usize..8, k in 0u32..50, seed in any::<u64>()) {
        let mut r = ReservoirT::new(t, stream_rng(seed, 0, 0));
        for x in 0..k {
            r.offer(x);
        }
        prop_assert!(r.stored() <= t);
        let slots = r.slots().to_vec();
        prop_assert_eq!(slots.len(), if k == 0 { 0 } else { t });
        prop_assert!(slots.iter().all(|&x| x < k));
    }

    #[test]
    fn vertex_sampler_members_keep_full_neighborhoods(g in graph_strategy(14), beta in 0.1f64..2.0, seed in any::<u64>()) {
        let s = generate::shuffled_stream(&g, seed);
        let mut vs = VertexSamplerState::new(g.n(), beta, stream_rng(seed, 1, 0));
        let mut seen: Vec<Vec<Vertex>> = vec![Vec::new(); g.n()];
        for &(u, v, l) in &s.records {
            if l != Label::Pos {
                continue;
            }
            vs.step(u, v);
            seen[u as usize].push(v);
            seen[v as usize].push(u);
        }
        for (v, nb) in vs.into_sample() {
            let mut want = seen[v as usize].clone();
            want.sort_unstable();
            prop_assert_eq!(nb, want);
        }
    }
}
