use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Vertex;

/// Collapses a list into sorted `(value, multiplicity)` pairs.
pub fn tally(mut xs: Vec<Vertex>) -> Vec<(Vertex, u32)> {
    xs.sort_unstable();
    let mut out: Vec<(Vertex, u32)> = Vec::new();
    for x in xs {
        match out.last_mut() {
            Some((y, k)) if *y == x => *k += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Merges `(key, count)` pairs with equal keys, summing counts.
pub fn tally_weighted(mut xs: Vec<(Vertex, u32)>) -> Vec<(Vertex, u32)> {
    xs.sort_unstable_by_key(|p| p.0);
    let mut out: Vec<(Vertex, u32)> = Vec::with_capacity(xs.len());
    for (x, c) in xs {
        match out.last_mut() {
            Some((y, k)) if *y == x => *k += c,
            _ => out.push((x, c)),
        }
    }
    out
}

/// Size of the intersection of two sorted slices.
pub fn intersect_count(a: &[Vertex], b: &[Vertex]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Elements of sorted `a` missing from sorted `b`.
pub fn difference_count(a: &[Vertex], b: &[Vertex]) -> usize {
    a.len() - intersect_count(a, b)
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream per (seed, purpose, index): reproducible under any schedule.
pub fn stream_rng(seed: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(purpose)));
    r.set_stream(index);
    r
}

/// Named RNG purposes so streams never collide.
pub mod purpose {
    pub const NEIGHBOR_SAMPLES: u64 = 1;
    pub const VERTEX_SAMPLE: u64 = 2;
    pub const RESERVOIR: u64 = 3;
    pub const VERTEX_SAMPLER: u64 = 4;
    pub const L0_BANK: u64 = 5;
    pub const BUCKETS: u64 = 6;
    pub const GENERATOR: u64 = 7;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tallies() {
        assert_eq!(tally(vec![3, 1, 3, 2, 3]), vec![(1, 1), (2, 1), (3, 3)]);
        assert_eq!(tally_weighted(vec![(4, 2), (1, 1), (4, 5)]), vec![(1, 1), (4, 7)]);
        assert!(tally(vec![]).is_empty());
    }

    #[test]
    fn set_ops() {
        assert_eq!(intersect_count(&[1, 3, 5, 7], &[2, 3, 7, 9]), 2);
        assert_eq!(difference_count(&[1, 3, 5, 7], &[2, 3, 7, 9]), 2);
        assert_eq!(intersect_count(&[], &[1]), 0);
    }
}
