//! The single random source used by every seeded corpus.
//!
//! Algorithm: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`), seeded with
//! `SeedableRng::seed_from_u64(seed)`. Integer draws use `Rng::gen_range`
//! from `rand` 0.8. Derived per-case seeds are `base_seed + case_index`
//! (wrapping), so any single case can be replayed in isolation.

use crate::exactlin::{ratio, Scalar, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CorpusRng = ChaCha8Rng;

pub fn from_seed(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of case `i` in a corpus with base seed `base`.
pub fn case_seed(base: u64, i: usize) -> u64 {
    base.wrapping_add(i as u64)
}

/// Small nonzero rational `±p/q` with `1 <= p <= 4`, `1 <= q <= 3`.
pub fn nonzero_scalar(rng: &mut CorpusRng) -> Scalar {
    let p: i64 = rng.gen_range(1..=4);
    let q: i64 = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        ratio(p, q)
    } else {
        ratio(-p, q)
    }
}

/// Small rational that is zero with probability `zero_prob`.
pub fn sparse_scalar(rng: &mut CorpusRng, zero_prob: f64) -> Scalar {
    if rng.gen_bool(zero_prob) {
        ratio(0, 1)
    } else {
        nonzero_scalar(rng)
    }
}

/// Random vector in dimension `n` with top index exactly `top`.
pub fn vector_with_top(rng: &mut CorpusRng, n: usize, top: usize, zero_prob: f64) -> Vector {
    let mut v = Vector::zeros(n);
    for i in 0..top {
        v.set(i, sparse_scalar(rng, zero_prob));
    }
    v.set(top, nonzero_scalar(rng));
    v
}
