//! Empirical statistical distance between adversary output distributions.

use std::collections::HashMap;
use std::hash::Hash;

use super::{serialize_shares_to_memory, run_game, Adversary, BitString};
use crate::encoding::encode;
use crate::error::Result;
use crate::field::{FieldElement, FieldParams};
use crate::rng::SeededRng;

/// Occurrence counts over an arbitrary key type.
#[derive(Debug, Clone)]
pub struct Histogram<K: Hash + Eq> {
    counts: HashMap<K, u64>,
    total: u64,
}

impl<K: Hash + Eq> Default for Histogram<K> {
    fn default() -> Self {
        Histogram {
            counts: HashMap::new(),
            total: 0,
        }
    }
}

impl<K: Hash + Eq> Histogram<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: K) {
        *self.counts.entry(key).or_default() += 1;
        self.total += 1;
    }

    /// Adds counts from another histogram; order of merges does not matter.
    pub fn merge(&mut self, other: Histogram<K>) {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_default() += c;
        }
        self.total += other.total;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, key: &K) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &u64)> {
        self.counts.iter()
    }
}

impl<K: Hash + Eq> FromIterator<K> for Histogram<K> {
    fn from_iter<I: IntoIterator<Item = K>>(iter: I) -> Self {
        let mut h = Histogram::new();
        for k in iter {
            h.add(k);
        }
        h
    }
}

/// `1/2 * sum_x |P(x) - Q(x)|` between the two empirical distributions.
///
/// Accumulated in integers so the result does not depend on hash iteration
/// order.
pub fn total_variation<K: Hash + Eq>(a: &Histogram<K>, b: &Histogram<K>) -> f64 {
    if a.total == 0 || b.total == 0 {
        return if a.total == b.total { 0.0 } else { 1.0 };
    }
    let (na, nb) = (a.total as u128, b.total as u128);
    let mut sum: u128 = 0;
    for (k, &ca) in &a.counts {
        sum += (ca as u128 * nb).abs_diff(b.count(k) as u128 * na);
    }
    for (k, &cb) in &b.counts {
        if !a.counts.contains_key(k) {
            sum += cb as u128 * na;
        }
    }
    sum as f64 / (2 * na * nb) as f64
}

/// A total-variation estimate with a confidence interval.
///
/// The half-width combines the bias bound `sqrt(k / N)` (Cauchy-Schwarz over
/// a union support of size `k`) with McDiarmid concentration
/// `sqrt(ln(2/delta) / N)`, where `N` is the smaller sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceEstimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub samples: u64,
    pub support: usize,
    pub confidence: f64,
}

impl DistanceEstimate {
    pub fn from_histograms<K: Hash + Eq>(a: &Histogram<K>, b: &Histogram<K>, delta: f64) -> Self {
        let estimate = total_variation(a, b);
        let support = a.support() + b.iter().filter(|(k, _)| a.count(k) == 0).count();
        let n = a.total().min(b.total()).max(1) as f64;
        let half = (support as f64 / n).sqrt() + ((2.0 / delta).ln() / n).sqrt();
        DistanceEstimate {
            estimate,
            lower: (estimate - half).max(0.0),
            upper: (estimate + half).min(1.0),
            samples: a.total().min(b.total()),
            support,
            confidence: 1.0 - delta,
        }
    }
}

/// Estimates the distance between the adversary's outputs when the game is
/// played on encodings of `secrets.0` versus encodings of `secrets.1`.
pub fn distinguishing_experiment(
    params: FieldParams,
    secrets: (FieldElement, FieldElement),
    make_adversary: &dyn Fn() -> Box<dyn Adversary>,
    lambda: usize,
    samples: u64,
    rng: &SeededRng,
) -> Result<DistanceEstimate> {
    let play = |secret: FieldElement, label: &str| -> Result<Histogram<BitString>> {
        let mut r = rng.derive(label);
        let mut h = Histogram::new();
        for _ in 0..samples {
            let enc = encode(secret, params, &mut r)?;
            let mut adversary = make_adversary();
            let out = run_game(
                serialize_shares_to_memory(&enc),
                adversary.as_mut(),
                lambda,
                super::DEFAULT_QUERY_CAP,
            )
            .map_err(|a| a.reason)?;
            h.add(out.output);
        }
        Ok(h)
    };
    let h0 = play(secrets.0, "secret-0")?;
    let h1 = play(secrets.1, "secret-1")?;
    Ok(DistanceEstimate::from_histograms(&h0, &h1, 0.05))
}
