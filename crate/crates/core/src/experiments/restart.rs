//! Per-attempt restart probability.
//!
//! Each trial draws fresh shares `L, R` uniformly from `((F \ {0})^n)^2`
//! and a fresh oracle sample, and runs a single attempt. By the union bound
//! the restart probability is at most `2n / p`.

use rayon::prelude::*;

use super::stats::{wilson_interval, Wilson};
use crate::channel::MemoryChannel;
use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::field::{FieldMode, FieldParams};
use crate::oracle;
use crate::refresh::{run_attempt, Attempt};
use crate::rng::SeededRng;

const CHUNK: u64 = 2_000;
pub const WILSON_Z: f64 = 1.96;
/// Multiples of the Wilson half-width allowed above the bound.
pub const SLACK_WIDTHS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RestartRateReport {
    pub params: FieldParams,
    pub attempts: u64,
    pub restarts: u64,
    pub rate: f64,
    pub wilson: Wilson,
    /// `2n / p`.
    pub bound: f64,
}

impl RestartRateReport {
    pub fn half_width(&self) -> f64 {
        self.wilson.width() / 2.0
    }

    pub fn within_bound(&self) -> bool {
        self.rate <= self.bound + SLACK_WIDTHS * self.half_width()
    }

    pub fn passed(&self) -> bool {
        self.within_bound() && self.rate <= 0.5
    }
}

pub fn estimate_restart_rate(
    params: FieldParams,
    attempts: u64,
    rng: &SeededRng,
) -> Result<RestartRateReport> {
    if params.mode() != FieldMode::Standard {
        return Err(Error::Precondition(
            "restart-rate estimation requires standard mode (p >= 4n)".into(),
        ));
    }
    let chunks = attempts.div_ceil(CHUNK);
    let restarts = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<u64> {
            let mut r = rng.stream("restart", c);
            let mut count = 0;
            for _ in 0..CHUNK.min(attempts - c * CHUNK) {
                let enc = Encoding::new(
                    params,
                    params.sample_nonzero_vector(&mut r),
                    params.sample_nonzero_vector(&mut r),
                )?;
                let sample = oracle::sample(params, &mut r);
                if let Attempt::Restart(_) = run_attempt(&enc, sample, &mut MemoryChannel::new())? {
                    count += 1;
                }
            }
            Ok(count)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(RestartRateReport {
        params,
        attempts,
        restarts,
        rate: restarts as f64 / attempts.max(1) as f64,
        wilson: wilson_interval(restarts, attempts, WILSON_Z),
        bound: 2.0 * params.dimension() as f64 / params.modulus() as f64,
    })
}
