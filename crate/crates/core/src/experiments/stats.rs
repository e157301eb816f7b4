//! Small statistics helpers used by the experiments and their tests.

/// Pearson chi-square statistic against the uniform distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
}

impl ChiSquare {
    /// Normal approximation `(X^2 - k) / sqrt(2k)`: the number of standard
    /// deviations above the expected value.
    pub fn z_score(&self) -> f64 {
        let k = self.dof.max(1) as f64;
        (self.statistic - k) / (2.0 * k).sqrt()
    }
}

pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let total: u64 = counts.iter().sum();
    let cells = counts.len();
    let expected = total as f64 / cells as f64;
    let statistic = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    ChiSquare {
        statistic,
        dof: cells.saturating_sub(1),
    }
}

/// Wilson score interval for a binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wilson {
    pub low: f64,
    pub high: f64,
}

impl Wilson {
    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Wilson {
    if trials == 0 {
        return Wilson { low: 0.0, high: 1.0 };
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Wilson {
        low: (centre - half).max(0.0),
        high: (centre + half).min(1.0),
    }
}

/// Least-squares polynomial fit of the given degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    /// Coefficients from the constant term upwards.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
}

#[allow(clippy::needless_range_loop)]
pub fn poly_fit(xs: &[f64], ys: &[f64], degree: usize) -> PolyFit {
    assert_eq!(xs.len(), ys.len());
    let m = degree + 1;
    // normal equations
    let mut a = vec![vec![0.0; m + 1]; m];
    for (&x, &y) in xs.iter().zip(ys) {
        let powers: Vec<f64> = (0..2 * m).map(|k| x.powi(k as i32)).collect();
        for (i, row) in a.iter_mut().enumerate() {
            for j in 0..m {
                row[j] += powers[i + j];
            }
            row[m] += powers[i] * y;
        }
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let d = a[col][col];
        if d.abs() < f64::EPSILON {
            continue;
        }
        for j in col..=m {
            a[col][j] /= d;
        }
        for i in 0..m {
            if i != col {
                let f = a[i][col];
                for j in col..=m {
                    a[i][j] -= f * a[col][j];
                }
            }
        }
    }
    let coefficients: Vec<f64> = a.iter().map(|row| row[m]).collect();
    let eval = |x: f64| {
        coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    };
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(&x, &y)| (y - eval(x)).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    PolyFit {
        coefficients,
        r_squared,
    }
}
