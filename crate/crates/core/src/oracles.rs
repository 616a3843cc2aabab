//! Brute-force references for cross-checking the operators.
//!
//! Nothing here calls into [`crate::abel`] or [`crate::operators`]: binomials,
//! powers and Abel factors are recomputed from scratch with naive
//! arithmetic.

use crate::error::{Error, Result};
use crate::model::{FunctionDescriptor, OperatorParams, SimplexPoint};

/// Largest degree accepted by [`direct_sum_g`].
pub const DIRECT_SUM_MAX_DEGREE: usize = 30;
/// Largest `n beta` accepted by [`direct_sum_g`].
pub const DIRECT_SUM_MAX_N_BETA: f64 = 5.0;

/// `base^exp` by repeated multiplication, `0^0 = 1`.
fn power(base: f64, exp: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// `C(m, k)` by the multiplicative formula.
fn binomial(m: usize, k: usize) -> f64 {
    let k = k.min(m - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (m - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `n! / (a! b! c!)` with `a + b + c = n`, as a product of two binomials.
fn trinomial(n: usize, a: usize, b: usize) -> f64 {
    binomial(n, a) * binomial(n - a, b)
}

/// `u (u + k beta)^(k - 1)`; the `k = 0` term is `1`.
fn abel(u: f64, k: usize, beta: f64) -> f64 {
    if k == 0 {
        1.0
    } else {
        u * power(u + k as f64 * beta, k - 1)
    }
}

fn check_finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow)
    }
}

/// Relative residual `|L - R| / max(1, |L|)` of the Abel–Jensen identity
///
/// ```text
/// L = (u + v)(u + v + m beta)^(m - 1)
/// R = sum_{k=0}^{m} C(m, k) u (u + k beta)^(k - 1) v (v + (m - k) beta)^(m - k - 1)
/// ```
///
/// evaluated term by term without log-space tricks.
pub fn abel_jensen_residual(u: f64, v: f64, beta: f64, m: usize) -> Result<f64> {
    if !(u >= 0.0 && v >= 0.0 && beta >= 0.0) || !(u + v + beta).is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Abel-Jensen inputs must be finite and nonnegative (u={u}, v={v}, beta={beta})"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let lhs = check_finite((u + v) * power(u + v + m as f64 * beta, m - 1))?;
    let mut rhs = 0.0;
    for k in 0..=m {
        rhs += binomial(m, k) * abel(u, k, beta) * abel(v, m - k, beta);
    }
    let rhs = check_finite(rhs)?;
    Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
}

/// Bivariate Bernstein polynomial of `f` on the simplex,
/// `sum_{|k| <= n} f(k / n) n! / (k1! k2! (n - |k|)!) x1^k1 x2^k2 (1 - |x|)^(n - |k|)`.
pub fn bernstein_simplex(f: &FunctionDescriptor, n: usize, x: SimplexPoint) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let (x1, x2) = (x.x1(), x.x2());
    let x3 = 1.0 - x1 - x2;
    let nf = n as f64;
    let mut total = 0.0;
    for k1 in 0..=n {
        for k2 in 0..=n - k1 {
            let k3 = n - k1 - k2;
            let basis = trinomial(n, k1, k2) * power(x1, k1) * power(x2, k2) * power(x3, k3);
            let node = SimplexPoint::new(k1 as f64 / nf, k2 as f64 / nf)?;
            total += f.eval(node) * basis;
        }
    }
    Ok(total)
}

/// `G(f; x)` summed straight from its defining formula in plain floating
/// point. Restricted to `n <= 30` and `n beta <= 5`.
pub fn direct_sum_g(f: &FunctionDescriptor, params: OperatorParams, x: SimplexPoint) -> Result<f64> {
    let n = params.n();
    let beta = params.beta();
    if n > DIRECT_SUM_MAX_DEGREE || n as f64 * beta > DIRECT_SUM_MAX_N_BETA {
        return Err(Error::OracleRange(format!(
            "direct summation needs n <= {DIRECT_SUM_MAX_DEGREE} and n*beta <= {DIRECT_SUM_MAX_N_BETA}, got n={n}, beta={beta}"
        )));
    }
    let (x1, x2) = (x.x1(), x.x2());
    let x3 = 1.0 - x1 - x2;
    let nf = n as f64;
    let mut total = 0.0;
    for k1 in 0..=n {
        for k2 in 0..=n - k1 {
            let k3 = n - k1 - k2;
            let basis = trinomial(n, k1, k2) * abel(x1, k1, beta) * abel(x2, k2, beta) * abel(x3, k3, beta);
            let node = SimplexPoint::new(k1 as f64 / nf, k2 as f64 / nf)?;
            total += f.eval(node) * basis;
        }
    }
    check_finite(total / power(1.0 + nf * beta, n - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x1: f64, x2: f64) -> SimplexPoint {
        SimplexPoint::new(x1, x2).unwrap()
    }

    #[test]
    fn helpers() {
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(7, 0), 1.0);
        assert_eq!(trinomial(4, 1, 2), 12.0);
        assert_eq!(power(0.0, 0), 1.0);
        assert_eq!(power(2.0, 10), 1024.0);
    }

    #[test]
    fn abel_jensen_degree_one_is_exact() {
        for (u, v, beta) in [(0.3, 0.5, 0.2), (0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (0.123, 0.877, 7.5)] {
            assert_eq!(abel_jensen_residual(u, v, beta, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn abel_jensen_binomial_case() {
        for m in 1..=30 {
            assert!(abel_jensen_residual(0.37, 0.51, 0.0, m).unwrap() <= 1e-13);
        }
    }

    #[test]
    fn abel_jensen_generic() {
        assert!(abel_jensen_residual(0.3, 0.5, 0.2, 10).unwrap() <= 1e-12);
    }

    #[test]
    fn abel_jensen_overflow_and_domain() {
        assert!(matches!(abel_jensen_residual(1.0, 1.0, 1e10, 60), Err(Error::Overflow)));
        assert!(abel_jensen_residual(-1.0, 0.5, 0.1, 3).is_err());
        assert!(abel_jensen_residual(0.5, 0.5, 0.1, 0).is_err());
    }

    #[test]
    fn bernstein_examples() {
        let c: FunctionDescriptor = "const:1.75".parse().unwrap();
        assert!((bernstein_simplex(&c, 9, pt(0.2, 0.3)).unwrap() - 1.75).abs() < 1e-14);
        let p1: FunctionDescriptor = "proj:1".parse().unwrap();
        assert!((bernstein_simplex(&p1, 3, pt(0.2, 0.5)).unwrap() - 0.2).abs() < 1e-15);
        let p2: FunctionDescriptor = "proj:2".parse().unwrap();
        assert!((bernstein_simplex(&p2, 2, pt(0.3, 0.2)).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn direct_sum_examples() {
        let one: FunctionDescriptor = "const:1".parse().unwrap();
        let p = OperatorParams::new(10, 0.1).unwrap();
        assert!((direct_sum_g(&one, p, pt(0.3, 0.3)).unwrap() - 1.0).abs() < 1e-12);
        let e = FunctionDescriptor::ExpSum;
        let x = pt(0.25, 0.35);
        let p0 = OperatorParams::new(12, 0.0).unwrap();
        assert!((direct_sum_g(&e, p0, x).unwrap() - bernstein_simplex(&e, 12, x).unwrap()).abs() < 1e-12);
        let p4 = OperatorParams::new(4, 0.5).unwrap();
        assert!((direct_sum_g(&e, p4, x).unwrap() - 1.9602251087174998944).abs() < 1e-14);
    }

    #[test]
    fn direct_sum_refuses_unsafe_range() {
        let one: FunctionDescriptor = "const:1".parse().unwrap();
        let x = pt(0.1, 0.1);
        assert!(matches!(direct_sum_g(&one, OperatorParams::new(31, 0.0).unwrap(), x), Err(Error::OracleRange(_))));
        assert!(matches!(direct_sum_g(&one, OperatorParams::new(10, 0.6).unwrap(), x), Err(Error::OracleRange(_))));
    }
}
