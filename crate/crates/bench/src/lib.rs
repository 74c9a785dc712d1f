//! Fixed inputs shared by the benchmarks.

use graphsimplex::{corpus, WeightedGraph};
use rand::rngs::StdRng;
use rand::SeedableRng;

/// A reproducible random weighted graph on `n` nodes.
pub fn fixture(n: usize, seed: u64) -> WeightedGraph {
    corpus::random_weighted(&mut StdRng::seed_from_u64(seed), n, 0.4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_reproducible() {
        assert_eq!(fixture(12, 7), fixture(12, 7));
        assert_eq!(fixture(5, 1).node_count(), 5);
    }
}
