//! ℓ0 samplers over signed index updates.
//!
//! Each repetition hashes indices to geometric levels (level ≥ j with
//! probability 2^-j) with a keyed splitmix64 mix. Pairwise-independent hashes
//! are not enough here: "the deepest index wins" is visibly biased under them
//! on structured supports. An index is accumulated only at its own level;
//! the deepest non-empty level then holds exactly the indices of maximal level,
//! and a 1-sparse check (count, index sum, fingerprint) recovers it when it is
//! alone. Repetitions are independent; the first success is returned.

use rand::Rng;

use crate::util::splitmix64;

/// Result of a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum L0Outcome {
    /// An index with nonzero net value, and that value.
    Sample { index: u32, value: i64 },
    /// The vector is zero.
    Empty,
    /// Nonzero vector, but no repetition isolated a single index.
    Failed,
}

/// Per-repetition failure probability used to size repetitions; the maximum
/// of i.i.d. geometric levels is shared with probability at most 1/3.
pub const REP_FAILURE: f64 = 1.0 / 3.0;

/// Repetitions needed for failure probability ≤ `delta_fail`.
pub fn reps_for_failure(delta_fail: f64) -> usize {
    assert!(delta_fail > 0.0 && delta_fail < 1.0, "failure probability must be in (0, 1)");
    (delta_fail.ln() / REP_FAILURE.ln()).ceil().max(1.0) as usize
}

/// Levels for a universe of `universe` indices.
pub fn levels_for(universe: usize) -> usize {
    let bits = usize::BITS - universe.max(2).saturating_sub(1).leading_zeros();
    (bits as usize + 4).min(32)
}

/// `k` independent samplers (each with `reps` repetitions) fed the same updates.
///
/// Cells are laid out by (sampler, repetition, level); one update touches one
/// cell per unit, so each cell keeps its three counters together.
#[derive(Clone, Debug)]
pub struct L0Bank {
    universe: u32,
    k: usize,
    reps: usize,
    levels: usize,
    hash_key: Vec<u64>,
    fp_key: u64,
    cells: Vec<Cell>,
}

/// 1-sparse recovery state: net count, Σ index·value, Σ fingerprint·value.
#[derive(Clone, Copy, Debug, Default)]
struct Cell {
    idx_sum: i64,
    fp_sum: u64,
    count: i32,
}

impl L0Bank {
    pub fn new<R: Rng + ?Sized>(universe: usize, k: usize, reps: usize, rng: &mut R) -> Self {
        assert!(universe >= 1 && universe <= u32::MAX as usize);
        assert!(reps >= 1);
        let levels = levels_for(universe);
        let units = k * reps;
        let hash_key = (0..units).map(|_| rng.random::<u64>()).collect();
        let fp_key = rng.random::<u64>();
        Self {
            universe: universe as u32,
            k,
            reps,
            levels,
            hash_key,
            fp_key,
            cells: vec![Cell::default(); units * levels],
        }
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Bytes of sketch state.
    pub fn space_bytes(&self) -> usize {
        self.cells.len() * std::mem::size_of::<Cell>() + self.hash_key.len() * 8
    }

    #[inline]
    fn fingerprint(&self, index: u32) -> u64 {
        splitmix64(index as u64 ^ self.fp_key)
    }

    /// Adds `delta` to coordinate `index` in every sampler.
    pub fn update(&mut self, index: u32, delta: i64) {
        debug_assert!(index < self.universe);
        let fp = self.fingerprint(index).wrapping_mul(delta as u64);
        let dx = delta * index as i64;
        let dc = delta as i32;
        let top = self.levels - 1;
        for (cells, &key) in self.cells.chunks_exact_mut(self.levels).zip(&self.hash_key) {
            let h = (splitmix64(index as u64 ^ key) >> 32) as u32;
            let c = &mut cells[(h.leading_zeros() as usize).min(top)];
            c.count += dc;
            c.idx_sum += dx;
            c.fp_sum = c.fp_sum.wrapping_add(fp);
        }
    }

    fn query_unit(&self, unit: usize) -> L0Outcome {
        let base = unit * self.levels;
        for lvl in (0..self.levels).rev() {
            let Cell { idx_sum: sum, fp_sum: fp, count: cnt } = self.cells[base + lvl];
            if cnt == 0 && sum == 0 && fp == 0 {
                continue;
            }
            if cnt != 0 && sum % cnt as i64 == 0 {
                let idx = sum / cnt as i64;
                if (0..self.universe as i64).contains(&idx)
                    && self.fingerprint(idx as u32).wrapping_mul(cnt as i64 as u64) == fp
                {
                    return L0Outcome::Sample { index: idx as u32, value: cnt as i64 };
                }
            }
            return L0Outcome::Failed;
        }
        L0Outcome::Empty
    }

    /// Query sampler `i`: first successful repetition wins.
    pub fn query(&self, i: usize) -> L0Outcome {
        let mut any_failed = false;
        for r in 0..self.reps {
            match self.query_unit(i * self.reps + r) {
                s @ L0Outcome::Sample { .. } => return s,
                L0Outcome::Failed => any_failed = true,
                L0Outcome::Empty => {}
            }
        }
        if any_failed {
            L0Outcome::Failed
        } else {
            L0Outcome::Empty
        }
    }
}

/// A single ℓ0 sampler.
#[derive(Clone, Debug)]
pub struct L0Sampler {
    bank: L0Bank,
    delta_fail: f64,
}

impl L0Sampler {
    pub fn new<R: Rng + ?Sized>(universe: usize, delta_fail: f64, rng: &mut R) -> Self {
        let reps = reps_for_failure(delta_fail);
        Self { bank: L0Bank::new(universe, 1, reps, rng), delta_fail }
    }

    pub fn delta_fail(&self) -> f64 {
        self.delta_fail
    }

    pub fn update(&mut self, index: u32, delta: i64) {
        self.bank.update(index, delta);
    }

    pub fn query(&self) -> L0Outcome {
        self.bank.query(0)
    }

    pub fn space_bytes(&self) -> usize {
        self.bank.space_bytes()
    }
}

pub fn l0_update(l: &mut L0Sampler, index: u32, delta: i64) {
    l.update(index, delta);
}
