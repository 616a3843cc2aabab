//! Abel factors `u (u + k beta)^(k - 1)` and the Cheney–Sharma basis weights
//! built from them.
//!
//! Every weight in this crate is a normalized product of Abel factors,
//!
//! ```text
//! w = (1 + n beta)^(1 - n) * n! / (k_1! ... k_r!) * prod_i u_i (u_i + k_i beta)^(k_i - 1)
//! ```
//!
//! with `sum_i k_i = n` and `sum_i u_i = 1`: two parts for the univariate
//! operator, three for the bivariate one and five for the difference
//! expansion. A factor with `k_i = 0` is `1`, whatever `u_i` is.
//!
//! Two evaluation paths are provided. The direct path multiplies the factors
//! as written. The log-space path divides every base `u_i + k_i beta` by
//! `s = 1 + n beta` first, which turns the product into
//!
//! ```text
//! ln w = ln n! + ln s + sum_{k_i > 0} [ln u_i + (k_i - 1) ln((u_i + k_i beta) / s) - ln s - ln k_i!]
//! ```
//!
//! where every logarithm of a base is `<= 0` and the only large terms are the
//! log-factorials. The direct path is used for `n <= DIRECT_MAX_DEGREE` and
//! `n beta <= DIRECT_MAX_N_BETA`; everything else runs in log space.

use crate::error::{Error, Result};
use crate::factorial::{exact_factorial, ln_factorial, EXACT_FACTORIAL_MAX};
use crate::format::sig17;
use crate::model::{lattice_len, lattice_position, simplex_lattice, MultiIndex, OperatorParams, SimplexPoint};
use crate::summation::compensated_sum;

/// Largest degree evaluated on the direct path by [`WeightMethod::Auto`].
pub const DIRECT_MAX_DEGREE: usize = 20;
/// Largest `n beta` evaluated on the direct path by [`WeightMethod::Auto`].
pub const DIRECT_MAX_N_BETA: f64 = 5.0;

/// `u (u + k beta)^(k - 1)`, with the value `1` for `k = 0`.
///
/// Fails for negative or non-finite input, and when the direct product
/// overflows (use [`log_abel_factor`] then).
pub fn abel_factor(u: f64, k: usize, beta: f64) -> Result<f64> {
    if !(u >= 0.0 && u.is_finite()) {
        return Err(Error::InvalidArgument(format!("Abel base must be nonnegative, got {u}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidBeta(beta));
    }
    // exponent-zero branches come first so that 0^0 never reaches powi
    let value = match k {
        0 => 1.0,
        1 => u,
        _ if u == 0.0 => 0.0,
        _ => {
            let exp = i32::try_from(k - 1).map_err(|_| Error::Overflow)?;
            u * (u + k as f64 * beta).powi(exp)
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow)
    }
}

/// Natural logarithm of [`abel_factor`]; `0` for `k = 0` and `-inf` when the
/// factor vanishes. Negative input yields `NaN`.
pub fn log_abel_factor(u: f64, k: usize, beta: f64) -> f64 {
    if u < 0.0 || beta < 0.0 {
        return f64::NAN;
    }
    match k {
        0 => 0.0,
        _ if u == 0.0 => f64::NEG_INFINITY,
        1 => u.ln(),
        _ => u.ln() + (k - 1) as f64 * (u + k as f64 * beta).ln(),
    }
}

/// How the basis weights are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMethod {
    /// Direct products for small `n` and `n beta`, log space otherwise.
    #[default]
    Auto,
    /// Plain products of Abel factors. Requires `n <= 22`.
    Direct,
    /// Products assembled as sums of normalized logarithms.
    LogSpace,
}

impl WeightMethod {
    fn uses_log(self, params: OperatorParams) -> Result<bool> {
        match self {
            WeightMethod::Auto => Ok(params.n() > DIRECT_MAX_DEGREE
                || params.n() as f64 * params.beta() > DIRECT_MAX_N_BETA),
            WeightMethod::Direct if params.n() > EXACT_FACTORIAL_MAX => Err(Error::InvalidArgument(
                format!("direct evaluation supports n <= {EXACT_FACTORIAL_MAX}"),
            )),
            WeightMethod::Direct => Ok(false),
            WeightMethod::LogSpace => Ok(true),
        }
    }
}

/// Builds normalized Abel products for a fixed `(n, beta)`.
///
/// Callers fill one [`AbelProduct::part`] table per base `u_i` and combine one
/// entry from each with [`AbelProduct::term`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct AbelProduct {
    params: OperatorParams,
    log: bool,
    /// `ln n! + ln s` on the log path, `n! / s^(n-1)` on the direct path.
    constant: f64,
}

impl AbelProduct {
    pub(crate) fn new(params: OperatorParams, method: WeightMethod) -> Result<Self> {
        let log = method.uses_log(params)?;
        let n = params.n();
        let constant = if log {
            ln_factorial(n) + params.scale().ln()
        } else {
            let exp = i32::try_from(n - 1).map_err(|_| Error::Overflow)?;
            exact_factorial(n) / params.scale().powi(exp)
        };
        Ok(Self { params, log, constant })
    }

    /// Entries `k = 0..=max_k` of the part with base `u`: `abel_factor(u, k) / k!`
    /// on the direct path, its normalized logarithm on the log path.
    pub(crate) fn part(&self, u: f64, max_k: usize) -> Result<Vec<f64>> {
        let beta = self.params.beta();
        if self.log {
            let ln_s = self.params.scale().ln();
            let s = self.params.scale();
            let ln_u = u.ln();
            Ok((0..=max_k)
                .map(|k| match k {
                    0 => 0.0,
                    _ if u == 0.0 => f64::NEG_INFINITY,
                    1 => ln_u - ln_s,
                    _ => {
                        ln_u + (k - 1) as f64 * ((u + k as f64 * beta) / s).ln()
                            - ln_s
                            - ln_factorial(k)
                    }
                })
                .collect())
        } else {
            (0..=max_k).map(|k| Ok(abel_factor(u, k, beta)? / exact_factorial(k))).collect()
        }
    }

    /// Weight assembled from one entry of each part table.
    #[inline]
    pub(crate) fn term<const N: usize>(&self, entries: [f64; N]) -> f64 {
        if self.log {
            (self.constant + entries.iter().sum::<f64>()).exp()
        } else {
            entries.iter().fold(self.constant, |acc, e| acc * e)
        }
    }
}

/// Weights `w_k`, `k = 0..=n`, of the univariate operator at a point of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateWeights {
    params: OperatorParams,
    x: f64,
    weights: Vec<f64>,
}

impl UnivariateWeights {
    pub fn params(&self) -> OperatorParams {
        self.params
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// `sum_k values[k] * w_k` with compensated summation.
    pub fn apply(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.weights.len());
        compensated_sum(self.weights.iter().zip(values).map(|(w, v)| w * v))
    }

    /// CSV with header `k,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,weight\n");
        for (k, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("{k},{}\n", sig17(*w)));
        }
        out
    }
}

/// Weights of the bivariate operator over [`simplex_lattice`]`(n)`, stored in
/// lattice order.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateWeights {
    params: OperatorParams,
    point: SimplexPoint,
    weights: Vec<f64>,
}

impl BivariateWeights {
    pub fn params(&self) -> OperatorParams {
        self.params
    }

    pub fn point(&self) -> SimplexPoint {
        self.point
    }

    /// Weights in lattice order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, k: MultiIndex) -> Option<f64> {
        let n = self.params.n();
        (k.order() <= n).then(|| self.weights[lattice_position(n, k)])
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        let n = self.params.n();
        (0..=n)
            .flat_map(move |k1| (0..=n - k1).map(move |k2| MultiIndex::new(k1, k2)))
            .zip(self.weights.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    pub fn min(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `sum_k values[k] * w_k` for values given in lattice order.
    pub fn apply(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.weights.len());
        compensated_sum(self.weights.iter().zip(values).map(|(w, v)| w * v))
    }

    /// CSV with header `k1,k2,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k1,k2,weight\n");
        for (k, w) in self.iter() {
            out.push_str(&format!("{},{},{}\n", k.k1, k.k2, sig17(w)));
        }
        out
    }
}

pub fn univariate_weights(params: OperatorParams, x: f64) -> Result<UnivariateWeights> {
    univariate_weights_with(params, x, WeightMethod::Auto)
}

pub fn univariate_weights_with(
    params: OperatorParams,
    x: f64,
    method: WeightMethod,
) -> Result<UnivariateWeights> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutsideInterval(x));
    }
    let n = params.n();
    let product = AbelProduct::new(params, method)?;
    let head = product.part(x, n)?;
    let tail = product.part(1.0 - x, n)?;
    let weights = (0..=n).map(|k| product.term([head[k], tail[n - k]])).collect();
    Ok(UnivariateWeights { params, x, weights })
}

pub fn bivariate_weights(params: OperatorParams, x: SimplexPoint) -> Result<BivariateWeights> {
    bivariate_weights_with(params, x, WeightMethod::Auto)
}

pub fn bivariate_weights_with(
    params: OperatorParams,
    x: SimplexPoint,
    method: WeightMethod,
) -> Result<BivariateWeights> {
    let n = params.n();
    let product = AbelProduct::new(params, method)?;
    let first = product.part(x.x1(), n)?;
    let second = product.part(x.x2(), n)?;
    let tail = product.part(x.tail(), n)?;
    let mut weights = Vec::with_capacity(lattice_len(n));
    for k1 in 0..=n {
        for k2 in 0..=n - k1 {
            weights.push(product.term([first[k1], second[k2], tail[n - k1 - k2]]));
        }
    }
    debug_assert_eq!(weights.len(), simplex_lattice(n).map(|l| l.len()).unwrap_or(0));
    Ok(BivariateWeights { params, point: x, weights })
}
