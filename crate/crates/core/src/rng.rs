//! Deterministic, labelled random streams.
//!
//! A [`SeededRng`] is ChaCha20 keyed by `SHA-256("lrs-rng/v1" || seed || label)`.
//! Labels form a path (`parent/child#index`), so independent streams for
//! sub-tasks and individual trials are derived without coordination and
//! without depending on scheduling order.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    label: String,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"lrs-rng/v1");
        h.update(seed.to_le_bytes());
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        let key: [u8; 32] = h.finalize().into();
        SeededRng {
            seed,
            label: label.to_owned(),
            inner: ChaCha20Rng::from_seed(key),
        }
    }

    /// Independent child stream; does not advance `self`.
    pub fn derive(&self, label: &str) -> SeededRng {
        SeededRng::new(self.seed, &format!("{}/{}", self.label, label))
    }

    /// Indexed child stream, e.g. one per trial or per worker chunk.
    pub fn stream(&self, label: &str, index: u64) -> SeededRng {
        SeededRng::new(self.seed, &format!("{}/{}#{}", self.label, label, index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}
