//! Factorials, exact for small arguments and as cached logarithms otherwise.

use std::sync::OnceLock;

use crate::summation::NeumaierSum;

/// Largest argument held by the log-factorial cache.
pub const CACHE_MAX: usize = 4096;

/// Largest `n` whose factorial is exactly representable as `f64`.
pub const EXACT_FACTORIAL_MAX: usize = 22;

static LN_FACTORIALS: OnceLock<Vec<f64>> = OnceLock::new();

fn table() -> &'static [f64] {
    LN_FACTORIALS.get_or_init(|| {
        let mut acc = NeumaierSum::new();
        let mut out = Vec::with_capacity(CACHE_MAX + 1);
        out.push(0.0);
        for i in 1..=CACHE_MAX {
            acc.add((i as f64).ln());
            out.push(acc.value());
        }
        out
    })
}

/// `ln(n!)`. Served from a table built on first use for `n <= CACHE_MAX`,
/// Stirling's series beyond.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= CACHE_MAX {
        return table()[n];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// `n!` as an exact `f64`, for `n <= EXACT_FACTORIAL_MAX`.
pub fn exact_factorial(n: usize) -> f64 {
    assert!(n <= EXACT_FACTORIAL_MAX, "{n}! is not exactly representable");
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}
