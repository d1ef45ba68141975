//! Seeded instance generators: random and planted labeled graphs, the
//! single-edge OR instances, the Matrix-INDEX gadget, and stream shufflers.
//!
//! Everything here is a pure function of its arguments (seed included).

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::access::{DynamicStream, InsertionStream, StreamUpdate, UpdateOp};
use crate::error::ContractError;
use crate::graph::{choose2, Clustering, Label, LabeledGraph, Vertex};
use crate::util::{purpose, stream_rng};

/// Calls `f(u, v)` for every pair selected independently with probability `p`,
/// skipping ahead geometrically so sparse selections cost O(selected + n).
fn for_each_selected_pair<R: Rng>(n: usize, p: f64, rng: &mut R, mut f: impl FnMut(Vertex, Vertex)) {
    if p <= 0.0 || n < 2 {
        return;
    }
    if p >= 1.0 {
        for u in 0..n as Vertex {
            for v in u + 1..n as Vertex {
                f(u, v);
            }
        }
        return;
    }
    let geo = Geometric::new(p).expect("p in (0, 1)");
    let mut next = geo.sample(rng);
    for u in 0..n {
        let row = (n - 1 - u) as u64;
        while next < row {
            f(u as Vertex, (u as u64 + 1 + next) as Vertex);
            next += 1 + geo.sample(rng);
        }
        next -= row;
    }
}

/// Each pair is (+) independently with probability `p_plus`.
pub fn gen_random(n: usize, p_plus: f64, seed: u64) -> LabeledGraph {
    assert!((0.0..=1.0).contains(&p_plus), "p_plus must lie in [0, 1]");
    let mut rng = stream_rng(seed, purpose::GENERATOR, 0);
    let mut edges = Vec::new();
    for_each_selected_pair(n, p_plus, &mut rng, |u, v| edges.push((u, v)));
    LabeledGraph::new(n, edges).expect("generated pairs are valid")
}

/// Planted almost-cliques with independent label noise.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedSpec {
    pub sizes: Vec<usize>,
    /// Flip probability per pair, in [0, 1/2).
    pub noise: f64,
    /// Vertices outside every clique.
    pub extra: usize,
    pub seed: u64,
}

impl PlantedSpec {
    pub fn new(sizes: Vec<usize>, noise: f64, extra: usize, seed: u64) -> Self {
        Self { sizes, noise, extra, seed }
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum::<usize>() + self.extra
    }
}

#[derive(Clone, Debug)]
pub struct Planted {
    pub graph: LabeledGraph,
    /// Cliques, then one singleton per extra vertex.
    pub truth: Clustering,
    /// Pairs whose label was flipped; an upper bound on OPT.
    pub flipped: u64,
}

/// Cliques occupy consecutive id ranges in the order given; extras follow.
pub fn gen_planted(spec: &PlantedSpec) -> Result<Planted, ContractError> {
    if spec.sizes.iter().any(|&s| s == 0) {
        return Err(ContractError::BadParams("clique sizes must be ≥ 1".into()));
    }
    if !(0.0..0.5).contains(&spec.noise) {
        return Err(ContractError::BadParams(format!("noise {} not in [0, 1/2)", spec.noise)));
    }
    let n = spec.n();
    if n == 0 {
        return Err(ContractError::BadParams("empty instance".into()));
    }
    let mut part = vec![0u64; n];
    let mut off = 0;
    for &s in &spec.sizes {
        part[off..off + s].fill(off as u64);
        off += s;
    }
    for (v, slot) in part.iter_mut().enumerate().skip(off) {
        *slot = v as u64;
    }
    let mut rng = stream_rng(spec.seed, purpose::GENERATOR, 1);
    let mut flips: HashSet<(Vertex, Vertex)> = HashSet::new();
    for_each_selected_pair(n, spec.noise, &mut rng, |u, v| {
        flips.insert((u, v));
    });
    let mut edges = Vec::new();
    let mut off = 0;
    for &s in &spec.sizes {
        for a in off..off + s {
            for b in a + 1..off + s {
                let e = (a as Vertex, b as Vertex);
                if !flips.contains(&e) {
                    edges.push(e);
                }
            }
        }
        off += s;
    }
    for &(u, v) in &flips {
        if part[u as usize] != part[v as usize] {
            edges.push((u, v));
        }
    }
    let graph = LabeledGraph::new(n, edges).expect("valid pairs");
    Ok(Planted { graph, truth: Clustering::new(part), flipped: flips.len() as u64 })
}

/// All pairs (−) except the `i_star`-th pair (1-based, lexicographic over
/// u < v), which is (+) iff `bit`.
pub fn gen_or_instance(n: usize, i_star: u64, bit: bool) -> Result<LabeledGraph, ContractError> {
    let pairs = choose2(n as u64);
    if i_star == 0 || i_star > pairs {
        return Err(ContractError::BadParams(format!("pair index {i_star} not in [1, {pairs}]")));
    }
    let edges = if bit { vec![pair_at(n, i_star - 1)] } else { Vec::new() };
    Ok(LabeledGraph::new(n, edges).expect("valid pair"))
}

/// The `k`-th (0-based) pair in lexicographic order.
pub fn pair_at(n: usize, mut k: u64) -> (Vertex, Vertex) {
    for u in 0..n {
        let row = (n - 1 - u) as u64;
        if k < row {
            return (u as Vertex, (u as u64 + 1 + k) as Vertex);
        }
        k -= row;
    }
    panic!("pair index out of range");
}

/// X and Y of the helper split: Z in the given order minus its `i_prime`-th
/// (1-based) element, first ⌈(|Z|−1)/2⌉ into X.
pub fn concate_split(z: &[Vertex], i_prime: usize) -> (Vec<Vertex>, Vec<Vertex>) {
    assert!(i_prime >= 1 && i_prime <= z.len(), "special index out of range");
    let rest: Vec<Vertex> = z.iter().enumerate().filter(|(i, _)| i + 1 != i_prime).map(|(_, &v)| v).collect();
    let nx = rest.len().div_ceil(2);
    (rest[..nx].to_vec(), rest[nx..].to_vec())
}

/// X gets (+) to `comp1` and (−) to `comp2`; Y the reverse.
pub fn concate(z: &[Vertex], i_prime: usize, comp1: &[Vertex], comp2: &[Vertex]) -> Vec<(Vertex, Vertex, Label)> {
    let (x, y) = concate_split(z, i_prime);
    let mut out = Vec::with_capacity((x.len() + y.len()) * (comp1.len() + comp2.len()));
    for (side, plus, minus) in [(&x, comp1, comp2), (&y, comp2, comp1)] {
        for &v in side {
            out.extend(plus.iter().map(|&u| (v, u, Label::Pos)));
            out.extend(minus.iter().map(|&u| (v, u, Label::Neg)));
        }
    }
    out
}

/// Named vertex groups of a Matrix-INDEX instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Landmarks {
    pub n_blocks: usize,
    pub l: Vec<Vertex>,
    pub b: Vec<Vertex>,
    pub r: Vec<Vertex>,
    pub c1: Vec<Vertex>,
    pub c2: Vec<Vertex>,
    pub l_star: Vertex,
    pub b_star: Vertex,
    pub r_star: Vertex,
    /// The intended optimum: C₁'s side (with L(i*) iff M(i*,j*) = 0) and C₂'s side.
    pub cluster1: Vec<Vertex>,
    pub cluster2: Vec<Vertex>,
}

impl Landmarks {
    /// Cluster id 1 or 2 per vertex.
    pub fn intended_clustering(&self) -> Clustering {
        let n = self.cluster1.len() + self.cluster2.len();
        let mut a = vec![0u64; n];
        for &v in &self.cluster1 {
            a[v as usize] = 1;
        }
        for &v in &self.cluster2 {
            a[v as usize] = 2;
        }
        Clustering::new(a)
    }
}

struct LabelTable {
    n: usize,
    cells: Vec<Option<Label>>,
    conflicts: usize,
}

impl LabelTable {
    fn idx(&self, u: Vertex, v: Vertex) -> usize {
        let (a, b) = (u.min(v) as usize, u.max(v) as usize);
        a * self.n + b
    }

    fn set(&mut self, u: Vertex, v: Vertex, l: Label) {
        let i = self.idx(u, v);
        match self.cells[i] {
            Some(old) if old != l => self.conflicts += 1,
            _ => self.cells[i] = Some(l),
        }
    }

    fn set_all(&mut self, s: &[Vertex], t: &[Vertex], l: Label) {
        for &u in s {
            for &v in t {
                if u != v {
                    self.set(u, v, l);
                }
            }
        }
    }
}

/// The n = 203·N gadget: groups L, B, R of N and C₁, C₂ of 100·N vertices.
///
/// `m[i][j]` is row i, column j (0-based storage); `i_star`, `j_star` are
/// 1-based. The contradictory third-part rules are resolved so that B(j*) is
/// wired to C₁'s side and R(j*) to C₂'s side; Alice's L–(B∪R) labels are
/// never overridden; every pair left unlabeled by the rules is (−).
pub fn gen_matrix_index_instance(
    n_blocks: usize,
    m: &[Vec<bool>],
    i_star: usize,
    j_star: usize,
) -> Result<(LabeledGraph, Landmarks), ContractError> {
    let nb = n_blocks;
    if nb == 0 || nb % 2 == 0 {
        return Err(ContractError::BadParams(format!("N = {nb} must be odd")));
    }
    if m.len() != nb || m.iter().any(|row| row.len() != nb) {
        return Err(ContractError::BadParams("M must be N×N".into()));
    }
    if !(1..=nb).contains(&i_star) || !(1..=nb).contains(&j_star) {
        return Err(ContractError::BadParams("special indices must lie in [1, N]".into()));
    }
    let n = 203 * nb;
    let range = |lo: usize, len: usize| (lo as Vertex..(lo + len) as Vertex).collect::<Vec<_>>();
    let (l, b, r) = (range(0, nb), range(nb, nb), range(2 * nb, nb));
    let (c1, c2) = (range(3 * nb, 100 * nb), range(103 * nb, 100 * nb));
    let (l_star, b_star, r_star) = (l[i_star - 1], b[j_star - 1], r[j_star - 1]);
    let mut t = LabelTable { n, cells: vec![None; n * n], conflicts: 0 };

    // Alice
    for i in 0..nb {
        for j in 0..nb {
            let (plus, minus) = if m[i][j] { (r[j], b[j]) } else { (b[j], r[j]) };
            t.set(l[i], plus, Label::Pos);
            t.set(l[i], minus, Label::Neg);
        }
    }
    // two cliques, then B and R hooked onto them
    t.set_all(&c1, &c1, Label::Pos);
    t.set_all(&c2, &c2, Label::Pos);
    let (xb, yb) = concate_split(&b, j_star);
    let (xr, yr) = concate_split(&r, j_star);
    for (u, v, lab) in concate(&b, j_star, &c1, &c2).into_iter().chain(concate(&r, j_star, &c1, &c2)) {
        t.set(u, v, lab);
    }
    // everything positively attached to a clique is joined to each other
    let side1: Vec<Vertex> = c1.iter().chain(&xb).chain(&xr).copied().collect();
    let side2: Vec<Vertex> = c2.iter().chain(&yb).chain(&yr).copied().collect();
    t.set_all(&side1, &side1, Label::Pos);
    t.set_all(&side2, &side2, Label::Pos);
    // L hooked onto the cliques
    let (xl, yl) = concate_split(&l, i_star);
    for (u, v, lab) in concate(&l, i_star, &c1, &c2) {
        t.set(u, v, lab);
    }
    // the special vertices
    t.set_all(&[l_star], &c1, Label::Pos);
    t.set_all(&[l_star], &c2, Label::Pos);
    t.set_all(&[b_star], &side1, Label::Pos);
    t.set_all(&[b_star], &side2, Label::Neg);
    t.set_all(&[r_star], &side2, Label::Pos);
    t.set_all(&[r_star], &side1, Label::Neg);
    if t.conflicts > 0 {
        return Err(ContractError::BadInstance(format!("{} conflicting pair labels", t.conflicts)));
    }

    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if t.cells[t.idx(u, v)] == Some(Label::Pos) {
                edges.push((u, v));
            }
        }
    }
    let graph = LabeledGraph::new(n, edges).expect("valid pairs");

    let mut cluster1: Vec<Vertex> = side1.iter().chain(&xl).copied().chain([b_star]).collect();
    let mut cluster2: Vec<Vertex> = side2.iter().chain(&yl).copied().chain([r_star]).collect();
    if m[i_star - 1][j_star - 1] {
        cluster2.push(l_star);
    } else {
        cluster1.push(l_star);
    }
    cluster1.sort_unstable();
    cluster2.sort_unstable();
    let lm = Landmarks { n_blocks: nb, l, b, r, c1, c2, l_star, b_star, r_star, cluster1, cluster2 };
    Ok((graph, lm))
}

/// All pairs of `g` in a seeded random order.
pub fn shuffled_stream(g: &LabeledGraph, seed: u64) -> InsertionStream {
    let mut s = InsertionStream::from_graph(g);
    s.records.shuffle(&mut stream_rng(seed, purpose::GENERATOR, 2));
    s
}

/// A dynamic stream ending at `g` with churn.
///
/// Phase one inserts every pair, with the wrong label with probability `q`;
/// phase two repairs wrong labels and, with probability `q`, removes and
/// re-inserts a correct one. Each phase is shuffled.
pub fn gen_churn_stream(g: &LabeledGraph, q: f64, seed: u64) -> DynamicStream {
    assert!((0.0..=1.0).contains(&q), "churn probability must lie in [0, 1]");
    let mut rng = stream_rng(seed, purpose::GENERATOR, 3);
    let n = g.n() as Vertex;
    let mut first = Vec::new();
    let mut second = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let want = if g.is_pos(u, v) { Label::Pos } else { Label::Neg };
            let other = if want == Label::Pos { Label::Neg } else { Label::Pos };
            if rng.random_bool(q) {
                first.push(StreamUpdate::new(u, v, UpdateOp::new(other, true)));
                second.push(vec![
                    StreamUpdate::new(u, v, UpdateOp::new(other, false)),
                    StreamUpdate::new(u, v, UpdateOp::new(want, true)),
                ]);
            } else {
                first.push(StreamUpdate::new(u, v, UpdateOp::new(want, true)));
                if rng.random_bool(q) {
                    second.push(vec![
                        StreamUpdate::new(u, v, UpdateOp::new(want, false)),
                        StreamUpdate::new(u, v, UpdateOp::new(want, true)),
                    ]);
                }
            }
        }
    }
    first.shuffle(&mut rng);
    second.shuffle(&mut rng);
    first.extend(second.into_iter().flatten());
    DynamicStream::new(g.n(), first)
}
