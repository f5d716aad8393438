use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every seeded routine in the crate.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
