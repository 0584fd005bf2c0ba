use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Largest effective sample size that uses the exact distribution.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    NormalApproximation,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("every paired difference is zero")]
    DegenerateSample,
    #[error("difference {0} is not finite")]
    NonFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    pub n_effective: usize,
    pub method: Method,
}

/// Exact for up to [`EXACT_LIMIT`] nonzero differences, normal
/// approximation above.
pub fn wilcoxon_signed_rank(differences: &[f64]) -> Result<TestResult, StatsError> {
    let n = differences.iter().filter(|d| **d != 0.0).count();
    let method = if n <= EXACT_LIMIT {
        Method::Exact
    } else {
        Method::NormalApproximation
    };
    wilcoxon_with(differences, method)
}

/// Same test with the method forced.
pub fn wilcoxon_with(differences: &[f64], method: Method) -> Result<TestResult, StatsError> {
    if let Some(i) = differences.iter().position(|d| !d.is_finite()) {
        return Err(StatsError::NonFinite(i));
    }
    let mut nz: Vec<f64> = differences.iter().copied().filter(|&d| d != 0.0).collect();
    if nz.is_empty() {
        return Err(StatsError::DegenerateSample);
    }
    nz.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let n = nz.len();

    // Twice the average rank keeps tied ranks integral.
    let mut doubled = vec![0u64; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && nz[j + 1].abs() == nz[i].abs() {
            j += 1;
        }
        let r2 = (i + 1 + j + 1) as u64;
        for d in &mut doubled[i..=j] {
            *d = r2;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let w_plus2: u64 = nz
        .iter()
        .zip(&doubled)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total2: u64 = doubled.iter().sum();
    let w2 = w_plus2.min(total2 - w_plus2);
    let statistic = w2 as f64 / 2.0;

    let p_value = match method {
        Method::Exact => exact_p(&doubled, w2),
        Method::NormalApproximation => {
            let nf = n as f64;
            let mean = nf * (nf + 1.0) / 4.0;
            let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
            if var <= 0.0 {
                1.0
            } else {
                let z = ((statistic - mean).abs() - 0.5).max(0.0) / libm::sqrt(var);
                let p = libm::erfc(z / core::f64::consts::SQRT_2);
                p.clamp(f64::MIN_POSITIVE, 1.0)
            }
        }
    };
    Ok(TestResult {
        statistic,
        p_value,
        n_effective: n,
        method,
    })
}

/// `min(1, 2 P(T <= w))` under the null, where `T` is the positive-rank sum
/// over all `2^n` equally likely sign assignments. Counts are accumulated
/// by dynamic programming over doubled rank sums.
fn exact_p(doubled: &[u64], w2: u64) -> f64 {
    let total: usize = doubled.iter().sum::<u64>() as usize;
    let mut ways = vec![0f64; total + 1];
    ways[0] = 1.0;
    let mut reach = 0usize;
    for &r in doubled {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if ways[s] != 0.0 {
                ways[s + r] += ways[s];
            }
        }
        reach += r;
    }
    let tail: f64 = ways[..=w2 as usize].iter().sum();
    let all = libm::exp2(doubled.len() as f64);
    (2.0 * tail / all).min(1.0)
}

/// Holm step-down adjustment, returned in input order.
pub fn holm(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; m];
    let mut running: f64 = 0.0;
    for (pos, &i) in order.iter().enumerate() {
        let adj = ((m - pos) as f64 * p_values[i]).min(1.0);
        running = running.max(adj);
        out[i] = running;
    }
    out
}
