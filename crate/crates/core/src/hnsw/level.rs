use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Level for a uniform draw `u` in (0, 1]: `floor(-ln(u) / ln(M))`.
pub fn level_for_uniform(u: f64, m: usize) -> usize {
    debug_assert!(u > 0.0 && u <= 1.0);
    (-u.ln() / (m as f64).ln()).floor() as usize
}

/// Seeded level assignment. ChaCha8 is the level RNG of the on-disk format:
/// the same seed yields the same level sequence on every platform.
#[derive(Debug, Clone)]
pub struct LevelGenerator {
    rng: ChaCha8Rng,
    m: usize,
    draws: u64,
}

impl LevelGenerator {
    pub fn new(seed: u64, m: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            m,
            draws: 0,
        }
    }

    /// Generator positioned after `draws` prior draws.
    pub fn resumed(seed: u64, m: usize, draws: u64) -> Self {
        let mut g = Self::new(seed, m);
        for _ in 0..draws {
            g.next_uniform();
        }
        g
    }

    fn next_uniform(&mut self) -> f64 {
        self.draws += 1;
        // gen::<f64>() is uniform on [0, 1); flip it onto (0, 1].
        1.0 - self.rng.gen::<f64>()
    }

    pub fn next_level(&mut self) -> usize {
        let u = self.next_uniform();
        level_for_uniform(u, self.m)
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }
}
