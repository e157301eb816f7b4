//! Experiments comparing real refresh runs with reconstructed ones, and
//! measurements of restart rates and operation counts.
//!
//! `exp_refresh` runs the protocol and returns `(L', R', view_L, view_R)`.
//! `exp_reconstruct_refresh` samples `(L', R')` uniformly among
//! nonzero-coordinate pairs with the same inner product as the input, samples
//! `(V, V~)`, and reconstructs the views. The two are equal in distribution;
//! [`exact`] checks this with rational arithmetic on enumerable instances and
//! [`monte_carlo`] by sampling on larger ones.

pub mod exact;
pub mod monte_carlo;
pub mod restart;
pub mod scaling;
pub mod stats;

use rand::RngCore;

use crate::encoding::{sample_encoding_pair_with_secret, Encoding};
use crate::error::Result;
use crate::field::{FieldVector, NonZeroVector};
use crate::oracle::{LeakFreeOracle, OracleSampler};
use crate::reconstruct::{reconstruct, CommonRandomness};
use crate::refresh::{refresh, ViewL, ViewR};
use crate::channel::MemoryChannel;

pub use exact::{
    exact_distribution_reconstruct, exact_distribution_refresh, proof_marginals, verify_lemma2,
    ExactDistribution, Lemma2Report, MarginalReport, ENUMERATION_LIMIT,
};
pub use monte_carlo::{monte_carlo_lemma2, MonteCarloReport};
pub use restart::{estimate_restart_rate, RestartRateReport};
pub use scaling::{measure_scaling, ScalingPoint, ScalingReport};

/// `(L', R', view_L, view_R)`. Ordered and hashed by the full tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExperimentOutcome {
    pub l_prime: NonZeroVector,
    pub r_prime: NonZeroVector,
    pub view_l: ViewL,
    pub view_r: ViewR,
}

impl ExperimentOutcome {
    fn vectors(&self) -> [&FieldVector; 12] {
        let (l, r) = (&self.view_l, &self.view_r);
        [
            &self.l_prime,
            &self.r_prime,
            &l.l,
            &l.a,
            &l.v,
            &l.a_tilde,
            &l.v_tilde,
            &r.r,
            &r.b,
            &r.v,
            &r.b_tilde,
            &r.v_tilde,
        ]
    }

    /// Every coordinate of every component, in a fixed order.
    pub fn canonical_key(&self) -> Vec<u64> {
        self.vectors().iter().flat_map(|v| v.values()).collect()
    }

    /// [`canonical_key`](Self::canonical_key) bit-packed with `bits` per
    /// coordinate; an injective, compact key for large histograms.
    pub fn packed_key(&self, bits: usize) -> Box<[u64]> {
        pack(self.vectors().iter().flat_map(|v| v.values()), bits)
    }

    /// Packed `(L', R')` only.
    pub fn packed_shares(&self, bits: usize) -> Box<[u64]> {
        pack(
            self.l_prime.values().into_iter().chain(self.r_prime.values()),
            bits,
        )
    }
}

fn pack(values: impl Iterator<Item = u64>, bits: usize) -> Box<[u64]> {
    let mut words = Vec::new();
    let mut acc: u128 = 0;
    let mut filled = 0;
    for v in values {
        acc |= (v as u128) << filled;
        filled += bits;
        if filled >= 64 {
            words.push(acc as u64);
            acc >>= 64;
            filled -= 64;
        }
    }
    if filled > 0 {
        words.push(acc as u64);
    }
    words.into_boxed_slice()
}

/// Runs the refresh protocol with the uniform oracle.
pub fn exp_refresh(enc: &Encoding, rng: &mut dyn RngCore) -> Result<ExperimentOutcome> {
    exp_refresh_with(enc, &mut LeakFreeOracle, rng)
}

pub fn exp_refresh_with(
    enc: &Encoding,
    oracle: &mut dyn OracleSampler,
    rng: &mut dyn RngCore,
) -> Result<ExperimentOutcome> {
    let trace = refresh(enc, oracle, &mut MemoryChannel::new(), rng)?;
    let (l_prime, r_prime) = trace.output.into_parts();
    Ok(ExperimentOutcome {
        l_prime,
        r_prime,
        view_l: trace.view_l,
        view_r: trace.view_r,
    })
}

/// Samples fresh shares of the same secret plus common randomness and
/// reconstructs the views. No channel is involved.
pub fn exp_reconstruct_refresh(enc: &Encoding, rng: &mut dyn RngCore) -> Result<ExperimentOutcome> {
    let new = sample_encoding_pair_with_secret(enc.decode(), enc.params(), rng)?;
    let cr = CommonRandomness::sample(enc.params(), rng);
    let (view_l, view_r) = reconstruct(enc, &new, &cr)?;
    let (l_prime, r_prime) = new.into_parts();
    Ok(ExperimentOutcome {
        l_prime,
        r_prime,
        view_l,
        view_r,
    })
}
