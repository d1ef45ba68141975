use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// `t` independent single-slot reservoirs over one stream.
///
/// While at most `t` items have been offered the raw items are kept as-is
/// (that is no more memory than the slots themselves); the slots are drawn
/// from them on first demand. After that each offer replaces a
/// Binomial(t, 1/k) subset of slots chosen uniformly, which is the joint law
/// of `t` independent coins with bias 1/k.
#[derive(Clone, Debug)]
pub struct ReservoirT<T> {
    t: usize,
    seen: u64,
    buf: Vec<T>,
    slots: Vec<T>,
    materialized: bool,
    rng: ChaCha8Rng,
}

impl<T: Copy> ReservoirT<T> {
    pub fn new(t: usize, rng: ChaCha8Rng) -> Self {
        Self { t, seen: 0, buf: Vec::new(), slots: Vec::new(), materialized: false, rng }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn items_seen(&self) -> u64 {
        self.seen
    }

    /// Items currently held in memory (≤ t).
    pub fn stored(&self) -> usize {
        if self.materialized {
            self.slots.len()
        } else {
            self.buf.len()
        }
    }

    pub fn offer(&mut self, item: T) {
        self.seen += 1;
        if self.t == 0 {
            return;
        }
        if !self.materialized {
            if self.seen as usize <= self.t {
                self.buf.push(item);
                return;
            }
            self.materialize();
        }
        let k = self.seen;
        let p = 1.0 / k as f64;
        let r = Binomial::new(self.t as u64, p).expect("valid binomial").sample(&mut self.rng) as usize;
        if r == 0 {
            return;
        }
        if r == self.t {
            self.slots.fill(item);
            return;
        }
        for s in index::sample(&mut self.rng, self.t, r) {
            self.slots[s] = item;
        }
    }

    fn materialize(&mut self) {
        if self.materialized {
            return;
        }
        self.materialized = true;
        if self.buf.is_empty() {
            return;
        }
        let k = self.buf.len();
        let buf = std::mem::take(&mut self.buf);
        self.slots = (0..self.t).map(|_| buf[self.rng.random_range(0..k)]).collect();
    }

    /// Slot contents; empty before the first offer.
    pub fn slots(&mut self) -> &[T] {
        self.materialize();
        &self.slots
    }

    /// Multiset of slot contents as `(item, multiplicity)`, drawn without
    /// expanding the slots when they were never materialized.
    pub fn into_counts(mut self) -> Vec<(T, u32)>
    where
        T: Ord,
    {
        if !self.materialized && !self.buf.is_empty() {
            // multinomial over the buffered items, one binomial split per item
            let mut left = self.t as u64;
            let mut out = Vec::new();
            let k = self.buf.len();
            for (i, &x) in self.buf.iter().enumerate() {
                let rest = (k - i) as f64;
                let c = if i + 1 == k {
                    left
                } else {
                    Binomial::new(left, 1.0 / rest).expect("valid").sample(&mut self.rng)
                };
                left -= c;
                if c > 0 {
                    out.push((x, c as u32));
                }
            }
            out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            let mut merged: Vec<(T, u32)> = Vec::with_capacity(out.len());
            for (x, c) in out {
                match merged.last_mut() {
                    Some((y, k)) if *y == x => *k += c,
                    _ => merged.push((x, c)),
                }
            }
            return merged;
        }
        let mut s = self.slots().to_vec();
        s.sort_unstable();
        let mut merged: Vec<(T, u32)> = Vec::new();
        for x in s {
            match merged.last_mut() {
                Some((y, k)) if *y == x => *k += 1,
                _ => merged.push((x, 1)),
            }
        }
        merged
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::stream_rng;

    #[test]
    fn single_item_fills_all_slots() {
        let mut r = ReservoirT::new(5, stream_rng(1, 0, 0));
        r.offer(42u32);
        assert_eq!(r.slots(), &[42; 5]);
        assert_eq!(r.into_counts(), vec![(42, 5)]);
    }

    #[test]
    fn empty_reservoir() {
        let mut r: ReservoirT<u32> = ReservoirT::new(3, stream_rng(1, 0, 0));
        assert!(r.slots().is_empty());
        assert_eq!(r.stored(), 0);
        assert!(r.into_counts().is_empty());
    }

    #[test]
    fn stored_never_exceeds_t() {
        let mut r = ReservoirT::new(4, stream_rng(3, 0, 0));
        for i in 0..100u32 {
            r.offer(i);
            assert!(r.stored() <= 4);
        }
        assert_eq!(r.slots().len(), 4);
        assert_eq!(r.items_seen(), 100);
    }

    #[test]
    fn two_items_one_slot_is_fair() {
        let trials = 20_000;
        let mut first = 0;
        for s in 0..trials {
            let mut r = ReservoirT::new(1, stream_rng(s, 9, 0));
            r.offer(0u32);
            r.offer(1u32);
            if r.slots()[0] == 0 {
                first += 1;
            }
        }
        let frac = first as f64 / trials as f64;
        assert!((frac - 0.5).abs() < 4.0 * (0.25f64 / trials as f64).sqrt(), "{frac}");
    }

    #[test]
    fn counts_sum_to_t() {
        for k in [1u32, 3, 7, 10, 25] {
            let mut r = ReservoirT::new(10, stream_rng(k as u64, 1, 1));
            for i in 0..k {
                r.offer(i);
            }
            let c = r.into_counts();
            assert_eq!(c.iter().map(|x| x.1).sum::<u32>(), 10);
            assert!(c.iter().all(|x| x.0 < k));
        }
    }
}
