//! Discrete power-law fit of a degree sequence.
//!
//! For each candidate lower cutoff `xmin` the exponent is estimated with the
//! discrete maximum-likelihood approximation
//!
//! ```text
//! alpha = 1 + n / sum(ln(x_i / (xmin - 0.5)))
//! ```
//!
//! and the cutoff whose fitted tail CDF has the smallest Kolmogorov–Smirnov
//! distance to the empirical tail wins.

use serde::Serialize;

/// Minimum number of observations at or above `xmin`.
pub const MIN_TAIL: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PowerLawError {
    #[error("need at least {MIN_TAIL} positive observations in the tail, have {0}")]
    InsufficientTail(usize),
    #[error("all observations are equal")]
    DegenerateSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub xmin: u64,
    pub ks_statistic: f64,
    pub n_tail: usize,
}

// B_{2j} / (2j)! for j = 1..=7
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
];

/// Hurwitz zeta `sum_{k>=0} (a + k)^(-s)` for `s > 1`, `a > 0`, by
/// Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    const DIRECT: usize = 9;
    let mut sum = 0.0;
    for k in 0..DIRECT {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + DIRECT as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) times x^(-s-2j+1)
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += coeff * rising * power;
        let next = 2.0 * j as f64 + s + 1.0;
        rising *= next * (next + 1.0);
        power /= x * x;
    }
    sum
}

fn fit_tail(tail: &[u64], xmin: u64) -> (f64, f64) {
    let n = tail.len() as f64;
    let shift = xmin as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&x| (x as f64 / shift).ln()).sum();
    let alpha = 1.0 + n / log_sum;

    let norm = hurwitz_zeta(alpha, xmin as f64);
    let mut ks: f64 = 0.0;
    let mut i = 0;
    while i < tail.len() {
        let value = tail[i];
        let mut j = i;
        while j < tail.len() && tail[j] == value {
            j += 1;
        }
        let empirical = j as f64 / n;
        let model = 1.0 - hurwitz_zeta(alpha, value as f64 + 1.0) / norm;
        ks = ks.max((empirical - model).abs());
        i = j;
    }
    (alpha, ks)
}

/// Fits a discrete power law to the positive entries of `values`.
pub fn fit_power_law(values: &[u64]) -> Result<PowerLawFit, PowerLawError> {
    let mut xs: Vec<u64> = values.iter().copied().filter(|&x| x > 0).collect();
    xs.sort_unstable();
    if !xs.is_empty() && xs[0] == xs[xs.len() - 1] {
        return Err(PowerLawError::DegenerateSequence);
    }
    if xs.len() < MIN_TAIL {
        return Err(PowerLawError::InsufficientTail(xs.len()));
    }

    let mut best: Option<PowerLawFit> = None;
    let mut start = 0;
    while start < xs.len() {
        let xmin = xs[start];
        let tail = &xs[start..];
        // a tail of one repeated value carries no shape information
        if tail.len() < MIN_TAIL || tail[0] == tail[tail.len() - 1] {
            break;
        }
        let (alpha, ks) = fit_tail(tail, xmin);
        if best.is_none_or(|b| ks < b.ks_statistic) {
            best = Some(PowerLawFit { alpha, xmin, ks_statistic: ks, n_tail: tail.len() });
        }
        while start < xs.len() && xs[start] == xmin {
            start += 1;
        }
    }
    best.ok_or(PowerLawError::InsufficientTail(0))
}
