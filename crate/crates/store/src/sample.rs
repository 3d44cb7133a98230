//! Seeded uniform sampling without replacement.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform integer in `[0, bound)` by the multiply-shift method on one 64-bit
/// draw, so the sequence depends only on the ChaCha8 stream.
fn below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    ((rng.next_u64() as u128 * bound as u128) >> 64) as u64
}

/// Reservoir sampling (Algorithm R) of `k` items with a ChaCha8 generator
/// seeded by `seed`. Input order matters; the result keeps input order.
pub fn reservoir_sample<T: Clone>(items: &[T], k: usize, seed: u64) -> Vec<T> {
    if k >= items.len() {
        return items.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<usize> = (0..k).collect();
    for i in k..items.len() {
        let j = below(&mut rng, i as u64 + 1) as usize;
        if j < k {
            slots[j] = i;
        }
    }
    slots.sort_unstable();
    slots.into_iter().map(|i| items[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturates() {
        assert_eq!(reservoir_sample(&[1, 2, 3], 5, 0), vec![1, 2, 3]);
    }

    #[test]
    fn deterministic_distinct_ordered() {
        let items: Vec<u32> = (0..1000).collect();
        let a = reservoir_sample(&items, 50, 9);
        assert_eq!(a, reservoir_sample(&items, 50, 9));
        assert_ne!(a, reservoir_sample(&items, 50, 10));
        assert_eq!(a.len(), 50);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn roughly_uniform() {
        let items: Vec<usize> = (0..10).collect();
        let mut hits = [0usize; 10];
        for seed in 0..4000 {
            for i in reservoir_sample(&items, 3, seed) {
                hits[i] += 1;
            }
        }
        // Each item is expected 1200 times.
        assert!(hits.iter().all(|&h| (1050..1350).contains(&h)), "{hits:?}");
    }
}
