use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::access::{StreamUpdate, UpdateOp};
use crate::graph::Vertex;
use crate::sketch::l0::{L0Bank, L0Outcome};

/// Degree-stratified vertex sample for dynamic streams.
///
/// Bucket `i` (1-based) holds vertices drawn uniformly with replacement, up to
/// min(n, 2β·n·ln n / 2^{i−1}) draws; each stored vertex keeps
/// `copies·2^i·ln n` ℓ0 samplers over its incident (+) edges.
#[derive(Clone, Debug)]
pub struct BucketSampler {
    n: usize,
    beta: f64,
    capacities: Vec<usize>,
    members: Vec<Vec<Vertex>>,
    /// Per vertex: (bucket index, its samplers).
    banks: Vec<Vec<(usize, L0Bank)>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BucketConfig {
    pub beta: f64,
    /// Multiplier in front of 2^i·ln n samplers per stored vertex.
    pub copies: f64,
    pub reps: usize,
}

impl Default for BucketConfig {
    fn default() -> Self {
        Self { beta: 20.0, copies: 100.0, reps: 1 }
    }
}

/// ⌈log₂ n⌉, at least 1.
pub fn bucket_count(n: usize) -> usize {
    let b = usize::BITS - n.max(2).saturating_sub(1).leading_zeros();
    b.max(1) as usize
}

/// Draw budget of bucket `i` (1-based): min(n, ⌊2β·n·ln n / 2^{i−1}⌋).
pub fn bucket_capacity(n: usize, beta: f64, i: usize) -> usize {
    let raw = 2.0 * beta * n as f64 * (n as f64).ln() / 2f64.powi(i as i32 - 1);
    (raw.floor() as usize).min(n)
}

/// Bucket that serves a vertex of degree `d ≥ 1`: smallest `i ≥ 1` with d ≤ 2^i.
pub fn bucket_for_degree(d: usize) -> usize {
    let mut i = 1;
    while (1usize << i) < d {
        i += 1;
    }
    i
}

impl BucketSampler {
    pub fn build(n: usize, cfg: BucketConfig, rng: &mut ChaCha8Rng) -> Self {
        let levels = bucket_count(n);
        let ln_n = (n as f64).ln().max(1.0);
        let mut capacities = Vec::with_capacity(levels);
        let mut members = Vec::with_capacity(levels);
        let mut banks: Vec<Vec<(usize, L0Bank)>> = vec![Vec::new(); n];
        for i in 1..=levels {
            let cap = bucket_capacity(n, cfg.beta, i);
            capacities.push(cap);
            // a full-size budget is clamped to storing every vertex: with-replacement
            // draws would otherwise miss some, which the capacity clamp does not intend
            let chosen: BTreeSet<Vertex> = if cap >= n {
                (0..n as Vertex).collect()
            } else {
                (0..cap).map(|_| rng.random_range(0..n as Vertex)).collect()
            };
            let k = (cfg.copies * 2f64.powi(i as i32) * ln_n).ceil() as usize;
            for &v in &chosen {
                banks[v as usize].push((i, L0Bank::new(n, k, cfg.reps, rng)));
            }
            members.push(chosen.into_iter().collect());
        }
        Self { n, beta: cfg.beta, capacities, members, banks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    /// Distinct vertices stored in bucket `i` (1-based).
    pub fn members(&self, i: usize) -> &[Vertex] {
        &self.members[i - 1]
    }

    pub fn space_bytes(&self) -> usize {
        self.banks.iter().flatten().map(|(_, b)| b.space_bytes()).sum()
    }

    /// (−) updates are ignored; (+) insertions add, removals subtract.
    pub fn update(&mut self, up: StreamUpdate) {
        let delta = match up.op {
            UpdateOp::InsPos => 1,
            UpdateOp::RemPos => -1,
            _ => return,
        };
        for (z, w) in [(up.u, up.v), (up.v, up.u)] {
            for (_, bank) in &mut self.banks[z as usize] {
                bank.update(w, delta);
            }
        }
    }

    /// Vertices caught by the bucket matching their final degree, with the
    /// neighborhoods their samplers recovered. A recovery is kept only when it
    /// accounts for the whole degree; `failures` counts the rest.
    pub fn extract(&self, degrees: &[u32]) -> (Vec<(Vertex, Vec<Vertex>)>, usize) {
        let mut out = Vec::new();
        let mut failures = 0;
        for v in 0..self.n {
            let d = degrees[v] as usize;
            if d == 0 {
                out.push((v as Vertex, Vec::new()));
                continue;
            }
            let want = bucket_for_degree(d);
            let Some((_, bank)) = self.banks[v].iter().find(|(i, _)| *i == want) else {
                continue;
            };
            let mut got = BTreeSet::new();
            for s in 0..bank.len() {
                if let L0Outcome::Sample { index, .. } = bank.query(s) {
                    got.insert(index);
                }
            }
            if got.len() == d {
                out.push((v as Vertex, got.into_iter().collect()));
            } else {
                failures += 1;
            }
        }
        (out, failures)
    }
}

pub fn bucket_sampler_build(n: usize, cfg: BucketConfig, rng: &mut ChaCha8Rng) -> BucketSampler {
    BucketSampler::build(n, cfg, rng)
}

pub fn bucket_sampler_update(b: &mut BucketSampler, up: StreamUpdate) {
    b.update(up)
}

pub fn bucket_sampler_extract(b: &BucketSampler, degrees: &[u32]) -> (Vec<(Vertex, Vec<Vertex>)>, usize) {
    b.extract(degrees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::stream_rng;

    #[test]
    fn counts_and_capacities() {
        assert_eq!(bucket_count(2), 1);
        assert_eq!(bucket_count(50), 6);
        assert_eq!(bucket_count(64), 6);
        assert_eq!(bucket_count(65), 7);
        assert_eq!(bucket_capacity(50, 1.0, 1), 50);
        assert_eq!(bucket_capacity(50, 1.0, 6), (2.0 * 50.0 * 50f64.ln() / 32.0).floor() as usize);
        assert_eq!(bucket_for_degree(1), 1);
        assert_eq!(bucket_for_degree(2), 1);
        assert_eq!(bucket_for_degree(3), 2);
        assert_eq!(bucket_for_degree(16), 4);
        assert_eq!(bucket_for_degree(17), 5);
    }

    #[test]
    fn small_n_stores_everyone() {
        let mut rng = stream_rng(1, 0, 0);
        let cfg = BucketConfig { beta: 20.0, copies: 1.0, reps: 1 };
        let b = BucketSampler::build(10, cfg, &mut rng);
        assert_eq!(b.members(1).len(), 10);
    }

    #[test]
    fn recovers_star_neighborhood() {
        let mut rng = stream_rng(2, 0, 0);
        let cfg = BucketConfig { beta: 2.0, copies: 20.0, reps: 1 };
        let mut b = BucketSampler::build(12, cfg, &mut rng);
        let mut deg = vec![0u32; 12];
        for i in 1..7 {
            b.update(StreamUpdate::new(0, i, UpdateOp::InsPos));
            deg[0] += 1;
            deg[i as usize] += 1;
        }
        b.update(StreamUpdate::new(0, 3, UpdateOp::RemPos));
        b.update(StreamUpdate::new(0, 3, UpdateOp::InsNeg));
        deg[0] -= 1;
        deg[3] -= 1;
        let (out, fails) = b.extract(&deg);
        assert_eq!(fails, 0);
        let center = out.iter().find(|(v, _)| *v == 0).unwrap();
        assert_eq!(center.1, vec![1, 2, 4, 5, 6]);
    }
}
