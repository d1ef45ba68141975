use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Vertex;

/// Degree-proportional vertex sample over an insertion-only edge stream.
///
/// Each vertex stays in `S_t` with probability min(β·ln n / deg_t, 1) and, while
/// it does, keeps every edge seen so far.
#[derive(Clone, Debug)]
pub struct VertexSamplerState {
    beta: f64,
    threshold: f64,
    in_s: Vec<bool>,
    nbrs: Vec<Vec<Vertex>>,
    deg: Vec<u32>,
    stored: usize,
    rng: ChaCha8Rng,
}

impl VertexSamplerState {
    /// S_1 = V with empty neighborhoods.
    pub fn new(n: usize, beta: f64, rng: ChaCha8Rng) -> Self {
        let threshold = beta * (n as f64).ln();
        Self { beta, threshold, in_s: vec![true; n], nbrs: vec![Vec::new(); n], deg: vec![0; n], stored: 0, rng }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// β·ln n.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.in_s[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.deg[v as usize]
    }

    /// Edges currently held across all members.
    pub fn stored_edges(&self) -> usize {
        self.stored
    }

    /// Update neighborhoods of members, then run the removal coins.
    ///
    /// Duplicate pairs are not detected here: that would need Θ(m) memory.
    pub fn step(&mut self, u: Vertex, v: Vertex) {
        for (z, w) in [(u, v), (v, u)] {
            let zi = z as usize;
            self.deg[zi] += 1;
            if self.in_s[zi] {
                self.nbrs[zi].push(w);
                self.stored += 1;
            }
        }
        for z in [u, v] {
            let zi = z as usize;
            let d = self.deg[zi];
            if self.in_s[zi] && d as f64 > self.threshold && self.rng.random_range(0..d) == 0 {
                self.in_s[zi] = false;
                self.stored -= self.nbrs[zi].len();
                self.nbrs[zi] = Vec::new();
            }
        }
    }

    /// Members with sorted neighborhoods.
    pub fn into_sample(self) -> Vec<(Vertex, Vec<Vertex>)> {
        self.in_s
            .into_iter()
            .zip(self.nbrs)
            .enumerate()
            .filter(|(_, (keep, _))| *keep)
            .map(|(v, (_, mut nb))| {
                nb.sort_unstable();
                (v as Vertex, nb)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::stream_rng;

    #[test]
    fn empty_stream_keeps_everything() {
        let s = VertexSamplerState::new(5, 2.0, stream_rng(0, 0, 0));
        let out = s.into_sample();
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|(_, nb)| nb.is_empty()));
    }

    #[test]
    fn below_threshold_is_certain() {
        // β ln n = 2 ln 100 ≈ 9.2, degree 9 never triggers a coin
        for seed in 0..50 {
            let mut s = VertexSamplerState::new(100, 2.0, stream_rng(seed, 0, 0));
            for i in 1..=9 {
                s.step(0, i);
            }
            assert!(s.contains(0));
            assert_eq!(s.stored_edges(), 18);
        }
    }

    #[test]
    fn members_hold_exact_neighborhoods() {
        let mut s = VertexSamplerState::new(60, 1.0, stream_rng(7, 0, 0));
        for i in 1..60 {
            s.step(0, i);
        }
        let sample = s.into_sample();
        for (v, nb) in sample {
            if v == 0 {
                assert_eq!(nb, (1..60).collect::<Vec<_>>());
            } else {
                assert_eq!(nb, vec![0]);
            }
        }
    }
}
