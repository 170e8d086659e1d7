//! Inputs shared by the benchmarks.

use khkit::{BraidWord, IntMatrix, LinkDiagram};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(name, braid word)` pairs of increasing size.
pub const BRAIDS: &[(&str, &str)] = &[
    ("trefoil", "2: 1 1 1"),
    ("figure_eight", "3: 1 -2 1 -2"),
    ("cinquefoil", "2: 1 1 1 1 1"),
    ("eight_crossing", "3: 1 1 1 -2 1 1 1 -2"),
    ("ten_crossing", "4: 1 -2 3 1 -2 3 1 -2 3 -2"),
];

pub fn closure(word: &str) -> LinkDiagram {
    word.parse::<BraidWord>().expect("fixture braids parse").closure()
}

/// A sparse `n x n` integer matrix with about `per_row` entries per row in `-3..=3`.
pub fn sparse_matrix(n: usize, per_row: usize, seed: u64) -> IntMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    for r in 0..n {
        for _ in 0..per_row {
            let v: i64 = rng.gen_range(-3..=3);
            if v != 0 {
                triplets.push((r, rng.gen_range(0..n), v));
            }
        }
    }
    IntMatrix::from_triplets(n, n, &triplets)
}
