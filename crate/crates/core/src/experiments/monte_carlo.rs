//! Sampling comparison of the two experiments on instances too large to
//! enumerate.
//!
//! Three histograms of `samples` outcomes each are built: refresh,
//! reconstruct, and a second independent reconstruct run that serves as the
//! same-distribution baseline. The test passes when the refresh/reconstruct
//! distance is within `threshold_factor` times the baseline distance. This
//! is done for the full outcome tuple and for the `(L', R')` projection; the
//! full tuple has a support much larger than any feasible sample, so its
//! distances sit near one on both sides and the projection is the sharper of
//! the two checks.

use rayon::prelude::*;

use super::{exp_reconstruct_refresh, exp_refresh, stats::chi_square_uniform};
use crate::encoding::{enumerate_constraint_set, Encoding};
use crate::error::Result;
use crate::leakage::{total_variation, Histogram};
use crate::rng::SeededRng;

const CHUNK: u64 = 10_000;
pub const DEFAULT_THRESHOLD_FACTOR: f64 = 3.0;
/// Largest constraint-set scan (pairs) used for the uniformity statistic.
const SHARES_SCAN_LIMIT: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub samples: u64,
    pub tv_full: f64,
    pub baseline_full: f64,
    pub tv_shares: f64,
    pub baseline_shares: f64,
    pub threshold_factor: f64,
    /// Support sizes seen across all three runs.
    pub support_full: usize,
    pub support_shares: usize,
    /// Chi-square z-score of the refresh-side `(L', R')` against uniform on
    /// the enumerated constraint set, when that set is small enough.
    pub shares_uniform_z: Option<f64>,
}

impl MonteCarloReport {
    pub fn full_ok(&self) -> bool {
        self.tv_full <= self.threshold_factor * self.baseline_full
    }

    pub fn shares_ok(&self) -> bool {
        self.tv_shares <= self.threshold_factor * self.baseline_shares
    }

    pub fn passed(&self) -> bool {
        self.full_ok() && self.shares_ok()
    }
}

#[derive(Default)]
struct Tally {
    full: Histogram<Box<[u64]>>,
    shares: Histogram<Box<[u64]>>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.full.merge(other.full);
        self.shares.merge(other.shares);
        self
    }
}

fn run(
    enc: &Encoding,
    samples: u64,
    rng: &SeededRng,
    label: &str,
    refresh_side: bool,
) -> Result<Tally> {
    let bits = enc.params().coord_bits();
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Tally> {
            let mut r = rng.stream(label, c);
            let mut t = Tally::default();
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let o = if refresh_side {
                    exp_refresh(enc, &mut r)?
                } else {
                    exp_reconstruct_refresh(enc, &mut r)?
                };
                t.full.add(o.packed_key(bits));
                t.shares.add(o.packed_shares(bits));
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
}

fn union_support(hs: [&Histogram<Box<[u64]>>; 3]) -> usize {
    let mut keys: std::collections::HashSet<&Box<[u64]>> = std::collections::HashSet::new();
    for h in hs {
        keys.extend(h.iter().map(|(k, _)| k));
    }
    keys.len()
}

pub fn monte_carlo_lemma2(enc: &Encoding, samples: u64, rng: &SeededRng) -> Result<MonteCarloReport> {
    let refresh = run(enc, samples, rng, "refresh", true)?;
    let recon = run(enc, samples, rng, "reconstruct", false)?;
    let null = run(enc, samples, rng, "baseline", false)?;

    let params = enc.params();
    let side = ((params.modulus() - 1) as u128).checked_pow(params.dimension() as u32);
    let shares_uniform_z = match side {
        Some(s) if s.saturating_mul(s) <= SHARES_SCAN_LIMIT => {
            let bits = params.coord_bits();
            let counts: Vec<u64> = enumerate_constraint_set(enc.decode(), params)
                .map(|e| {
                    let key = super::pack(
                        e.left().values().into_iter().chain(e.right().values()),
                        bits,
                    );
                    refresh.shares.count(&key)
                })
                .collect();
            Some(chi_square_uniform(&counts).z_score())
        }
        _ => None,
    };

    Ok(MonteCarloReport {
        samples,
        tv_full: total_variation(&refresh.full, &recon.full),
        baseline_full: total_variation(&recon.full, &null.full),
        tv_shares: total_variation(&refresh.shares, &recon.shares),
        baseline_shares: total_variation(&recon.shares, &null.shares),
        threshold_factor: DEFAULT_THRESHOLD_FACTOR,
        support_full: union_support([&refresh.full, &recon.full, &null.full]),
        support_shares: union_support([&refresh.shares, &recon.shares, &null.shares]),
        shares_uniform_z,
    })
}
