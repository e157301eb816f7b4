//! Field-operation counts of complete refreshes as a function of `n`.

use std::time::Instant;

use super::stats::{poly_fit, PolyFit};
use crate::encoding::Encoding;
use crate::error::{Error, Result};
use crate::field::{FieldMode, FieldParams};
use crate::refresh::refresh_default;
use crate::rng::SeededRng;

/// Allowed range of `ops(2n) / ops(n)`.
pub const RATIO_RANGE: (f64, f64) = (1.7, 2.3);
/// Largest R^2 gain of a quadratic over a linear fit still counted as none.
pub const QUADRATIC_GAIN_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPoint {
    pub n: usize,
    pub trials: u64,
    /// Mean party operations per successful refresh, restarts included.
    pub mean_ops: f64,
    pub mean_attempts: f64,
    /// Largest single-attempt count observed.
    pub max_attempt_ops: u64,
    pub mean_wall_ns: f64,
}

impl ScalingPoint {
    pub fn within_attempt_bound(&self) -> bool {
        self.max_attempt_ops <= 8 * self.n as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub p: u64,
    pub points: Vec<ScalingPoint>,
    pub linear: PolyFit,
    pub quadratic: PolyFit,
    /// `(n, m, ops(m) / ops(n))` for consecutive points.
    pub ratios: Vec<(usize, usize, f64)>,
}

impl ScalingReport {
    pub fn slope(&self) -> f64 {
        self.linear.coefficients[1]
    }

    pub fn intercept(&self) -> f64 {
        self.linear.coefficients[0]
    }

    pub fn bound_ok(&self) -> bool {
        self.points.iter().all(ScalingPoint::within_attempt_bound)
    }

    /// Ratios between doubled dimensions fall in [`RATIO_RANGE`].
    pub fn ratios_ok(&self) -> bool {
        self.ratios
            .iter()
            .filter(|(a, b, _)| *b == 2 * *a)
            .all(|&(_, _, r)| RATIO_RANGE.0 <= r && r <= RATIO_RANGE.1)
    }

    pub fn quadratic_gain(&self) -> f64 {
        self.quadratic.r_squared - self.linear.r_squared
    }

    pub fn passed(&self) -> bool {
        self.bound_ok() && self.ratios_ok() && self.quadratic_gain() <= QUADRATIC_GAIN_LIMIT
    }
}

fn measure_point(params: FieldParams, trials: u64, rng: &mut SeededRng) -> Result<ScalingPoint> {
    let (mut ops, mut attempts, mut max_attempt, mut wall) = (0u64, 0u64, 0u64, 0u128);
    for _ in 0..trials {
        let enc = Encoding::new(
            params,
            params.sample_nonzero_vector(rng),
            params.sample_nonzero_vector(rng),
        )?;
        let start = Instant::now();
        let trace = refresh_default(&enc, rng)?;
        wall += start.elapsed().as_nanos();
        ops += trace.total_ops().total();
        attempts += trace.attempts() as u64;
        max_attempt = trace.attempt_ops().map(|o| o.total()).fold(max_attempt, u64::max);
    }
    let t = trials.max(1) as f64;
    Ok(ScalingPoint {
        n: params.dimension(),
        trials,
        mean_ops: ops as f64 / t,
        mean_attempts: attempts as f64 / t,
        max_attempt_ops: max_attempt,
        mean_wall_ns: wall as f64 / t,
    })
}

pub fn measure_scaling(
    n_values: &[usize],
    p: u64,
    trials: u64,
    rng: &SeededRng,
) -> Result<ScalingReport> {
    if n_values.len() < 2 || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "n values must be strictly increasing, at least two".into(),
        ));
    }
    let points = n_values
        .iter()
        .map(|&n| {
            let params = FieldParams::with_mode(p, n, FieldMode::Standard)?;
            measure_point(params, trials, &mut rng.stream("scaling", n as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = points.iter().map(|q| q.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|q| q.mean_ops).collect();
    let ratios = points
        .windows(2)
        .map(|w| (w[0].n, w[1].n, w[1].mean_ops / w[0].mean_ops))
        .collect();
    Ok(ScalingReport {
        p,
        linear: poly_fit(&xs, &ys, 1),
        quadratic: poly_fit(&xs, &ys, 2.min(xs.len() - 1)),
        points,
        ratios,
    })
}
