//! Domain types shared by every other module: lattice indices, points of the
//! simplex, operator parameters and the closed registry of test functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack accepted when constructing a [`SimplexPoint`]. Coordinates within
/// this distance of the simplex are clamped onto its boundary.
pub const SIMPLEX_SLACK: f64 = 1e-12;

/// Lattice point `k = (k1, k2)` indexing the basis function attached to the
/// node `k / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    pub k1: usize,
    pub k2: usize,
}

impl MultiIndex {
    pub const fn new(k1: usize, k2: usize) -> Self {
        Self { k1, k2 }
    }

    /// `|k| = k1 + k2`.
    pub const fn order(self) -> usize {
        self.k1 + self.k2
    }

    /// The node `k / n` as a point of the simplex.
    pub fn node(self, n: usize) -> SimplexPoint {
        debug_assert!(self.order() <= n);
        let n = n as f64;
        SimplexPoint::clamped(self.k1 as f64 / n, self.k2 as f64 / n)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k1, self.k2)
    }
}

/// Coordinate axis of the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    First,
    Second,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::First, Axis::Second];

    pub fn pick(self, k: MultiIndex) -> usize {
        match self {
            Axis::First => k.k1,
            Axis::Second => k.k2,
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Axis::First),
            "2" => Ok(Axis::Second),
            other => Err(Error::InvalidArgument(format!("axis must be 1 or 2, got `{other}`"))),
        }
    }
}

/// Number of lattice points with `k1 + k2 <= n`.
pub const fn lattice_len(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

/// Position of `k` inside [`simplex_lattice`]`(n)`.
pub const fn lattice_position(n: usize, k: MultiIndex) -> usize {
    // rows k1' < k1 hold n - k1' + 1 entries each
    k.k1 * (n + 1) - k.k1 * k.k1.saturating_sub(1) / 2 + k.k2
}

/// All `k` with `k1 + k2 <= n`, `k1` outer and `k2` inner.
pub fn simplex_lattice(n: usize) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(Error::InvalidDegree(n));
    }
    let mut out = Vec::with_capacity(lattice_len(n));
    for k1 in 0..=n {
        out.extend((0..=n - k1).map(|k2| MultiIndex::new(k1, k2)));
    }
    Ok(out)
}

/// A point `x = (x1, x2)` of the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    x1: f64,
    x2: f64,
}

impl SimplexPoint {
    pub const ORIGIN: SimplexPoint = SimplexPoint { x1: 0.0, x2: 0.0 };
    pub const VERTICES: [SimplexPoint; 3] = [
        SimplexPoint { x1: 0.0, x2: 0.0 },
        SimplexPoint { x1: 1.0, x2: 0.0 },
        SimplexPoint { x1: 0.0, x2: 1.0 },
    ];

    /// Validates `(x1, x2)`. Coordinates that miss the simplex by no more
    /// than [`SIMPLEX_SLACK`] are clamped onto it.
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !x1.is_finite()
            || !x2.is_finite()
            || x1 < -SIMPLEX_SLACK
            || x2 < -SIMPLEX_SLACK
            || x1 + x2 > 1.0 + SIMPLEX_SLACK
        {
            return Err(Error::OutsideSimplex(x1, x2));
        }
        Ok(Self::clamped(x1, x2))
    }

    fn clamped(x1: f64, x2: f64) -> Self {
        let x1 = x1.clamp(0.0, 1.0);
        let x2 = x2.max(0.0);
        let x2 = if x1 + x2 > 1.0 { 1.0 - x1 } else { x2 };
        Self { x1, x2 }
    }

    pub fn x1(self) -> f64 {
        self.x1
    }

    pub fn x2(self) -> f64 {
        self.x2
    }

    pub fn coord(self, axis: Axis) -> f64 {
        match axis {
            Axis::First => self.x1,
            Axis::Second => self.x2,
        }
    }

    /// `|x| = x1 + x2`.
    pub fn norm1(self) -> f64 {
        self.x1 + self.x2
    }

    /// Barycentric weight of the third vertex, `1 - |x|`, never negative.
    pub fn tail(self) -> f64 {
        (1.0 - (self.x1 + self.x2)).max(0.0)
    }

    /// `y - x` for `x <= y`.
    pub fn difference(self, lower: SimplexPoint) -> Result<SimplexPoint> {
        if !componentwise_leq(lower, self) {
            return Err(Error::NotOrdered(lower.x1, lower.x2, self.x1, self.x2));
        }
        SimplexPoint::new(self.x1 - lower.x1, self.x2 - lower.x2)
    }

    /// `x + y`, which must stay in the simplex.
    pub fn sum(self, other: SimplexPoint) -> Result<SimplexPoint> {
        SimplexPoint::new(self.x1 + other.x1, self.x2 + other.x2)
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{:?})", self.x1, self.x2)
    }
}

/// `x <= y` in the componentwise order.
pub fn componentwise_leq(x: SimplexPoint, y: SimplexPoint) -> bool {
    x.x1 <= y.x1 && x.x2 <= y.x2
}

/// Degree `n >= 1` and Cheney–Sharma parameter `beta >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    n: usize,
    beta: f64,
}

impl OperatorParams {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDegree(n));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidBeta(beta));
        }
        Ok(Self { n, beta })
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn beta(self) -> f64 {
        self.beta
    }

    /// `1 + n beta`, the base of the normalizer `(1 + n beta)^(1 - n)`.
    pub fn scale(self) -> f64 {
        1.0 + self.n as f64 * self.beta
    }
}

/// Lipschitz class `Lip_M(mu, S)`: `|f(x) - f(y)| <= M (|x1 - y1|^mu + |x2 - y2|^mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzSpec {
    mu: f64,
    constant: f64,
}

impl LipschitzSpec {
    pub fn new(mu: f64, constant: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::InvalidArgument(format!("order mu must lie in (0, 1], got {mu}")));
        }
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Lipschitz constant must be positive, got {constant}"
            )));
        }
        Ok(Self { mu, constant })
    }

    pub fn mu(self) -> f64 {
        self.mu
    }

    pub fn constant(self) -> f64 {
        self.constant
    }

    /// Right-hand side `M * sum_i |x_i - y_i|^mu`.
    pub fn bound(self, x: SimplexPoint, y: SimplexPoint) -> f64 {
        self.constant * holder_distance(x, y, self.mu)
    }
}

/// `|x1 - y1|^mu + |x2 - y2|^mu`.
pub fn holder_distance(x: SimplexPoint, y: SimplexPoint, mu: f64) -> f64 {
    (x.x1 - y.x1).abs().powf(mu) + (x.x2 - y.x2).abs().powf(mu)
}

/// Polynomial term `coeff * x1^i * x2^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub i: u32,
    pub j: u32,
    pub coeff: f64,
}

/// Closed registry of functions on the simplex that the operators can be
/// applied to.
///
/// Descriptors parse from and print to the command line grammar
/// `const:<c> | proj:1 | proj:2 | poly:i,j,c[;i,j,c]... | absdist:<a1>,<a2>,<mu>
/// | sqrtsum | minsum:<cap> | expsum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FunctionDescriptor {
    Const(f64),
    Proj(Axis),
    PolyTerms(Vec<PolyTerm>),
    /// `|x1 - a1|^mu + |x2 - a2|^mu`.
    AbsDist { a1: f64, a2: f64, mu: f64 },
    /// `sqrt(x1 + x2)`.
    SqrtSum,
    /// `min(cap, x1 + x2)`.
    MinSum(f64),
    /// `exp(x1 + x2)`.
    ExpSum,
}

impl FunctionDescriptor {
    /// Checks the invariants of the variant.
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidDescriptor { input: self.to_string(), reason: reason.to_owned() })
        };
        match *self {
            FunctionDescriptor::Const(c) if !c.is_finite() => bad("constant must be finite"),
            FunctionDescriptor::PolyTerms(ref terms) => {
                if terms.is_empty() {
                    bad("polynomial needs at least one term")
                } else if terms.iter().any(|t| !t.coeff.is_finite()) {
                    bad("coefficients must be finite")
                } else {
                    Ok(())
                }
            }
            FunctionDescriptor::AbsDist { a1, a2, mu } => {
                if !(mu > 0.0 && mu <= 1.0) {
                    bad("mu must lie in (0, 1]")
                } else if !(a1 >= 0.0 && a2 >= 0.0 && a1 + a2 <= 1.0) {
                    bad("center must lie in the simplex")
                } else {
                    Ok(())
                }
            }
            FunctionDescriptor::MinSum(cap) if !(cap > 0.0 && cap.is_finite()) => {
                bad("cap must be positive")
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: SimplexPoint) -> f64 {
        let (x1, x2) = (x.x1, x.x2);
        match *self {
            FunctionDescriptor::Const(c) => c,
            FunctionDescriptor::Proj(axis) => x.coord(axis),
            FunctionDescriptor::PolyTerms(ref terms) => terms
                .iter()
                .map(|t| t.coeff * x1.powi(t.i as i32) * x2.powi(t.j as i32))
                .sum(),
            FunctionDescriptor::AbsDist { a1, a2, mu } => {
                (x1 - a1).abs().powf(mu) + (x2 - a2).abs().powf(mu)
            }
            FunctionDescriptor::SqrtSum => (x1 + x2).sqrt(),
            FunctionDescriptor::MinSum(cap) => cap.min(x1 + x2),
            FunctionDescriptor::ExpSum => (x1 + x2).exp(),
        }
    }

    /// Restriction to one variable, `t -> f(t, 0)`, as used by the univariate
    /// operator.
    pub fn eval_univariate(&self, t: f64) -> f64 {
        self.eval(SimplexPoint::clamped(t, 0.0))
    }
}

impl fmt::Display for FunctionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionDescriptor::Const(c) => write!(f, "const:{c}"),
            FunctionDescriptor::Proj(Axis::First) => f.write_str("proj:1"),
            FunctionDescriptor::Proj(Axis::Second) => f.write_str("proj:2"),
            FunctionDescriptor::PolyTerms(terms) => {
                f.write_str("poly:")?;
                for (idx, t) in terms.iter().enumerate() {
                    if idx > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{},{},{}", t.i, t.j, t.coeff)?;
                }
                Ok(())
            }
            FunctionDescriptor::AbsDist { a1, a2, mu } => write!(f, "absdist:{a1},{a2},{mu}"),
            FunctionDescriptor::SqrtSum => f.write_str("sqrtsum"),
            FunctionDescriptor::MinSum(cap) => write!(f, "minsum:{cap}"),
            FunctionDescriptor::ExpSum => f.write_str("expsum"),
        }
    }
}

impl FromStr for FunctionDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::InvalidDescriptor {
            input: s.to_owned(),
            reason: reason.to_owned(),
        };
        let real = |v: &str| -> Result<f64> {
            v.trim().parse::<f64>().map_err(|_| fail(&format!("`{v}` is not a number")))
        };
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name.trim(), Some(arg)),
            None => (s.trim(), None),
        };
        let parsed = match (name, arg) {
            ("const", Some(c)) => FunctionDescriptor::Const(real(c)?),
            ("proj", Some(axis)) => match axis.trim() {
                "1" => FunctionDescriptor::Proj(Axis::First),
                "2" => FunctionDescriptor::Proj(Axis::Second),
                _ => return Err(fail("axis must be 1 or 2")),
            },
            ("poly", Some(body)) => {
                let terms = body
                    .split(';')
                    .map(|term| {
                        let parts: Vec<&str> = term.split(',').collect();
                        let [i, j, c] = parts[..] else {
                            return Err(fail("each term is i,j,c"));
                        };
                        let exp = |e: &str| {
                            e.trim().parse::<u32>().map_err(|_| fail("exponents are nonnegative integers"))
                        };
                        Ok(PolyTerm { i: exp(i)?, j: exp(j)?, coeff: real(c)? })
                    })
                    .collect::<Result<Vec<_>>>()?;
                FunctionDescriptor::PolyTerms(terms)
            }
            ("absdist", Some(body)) => {
                let parts: Vec<&str> = body.split(',').collect();
                let [a1, a2, mu] = parts[..] else {
                    return Err(fail("expected absdist:<a1>,<a2>,<mu>"));
                };
                FunctionDescriptor::AbsDist { a1: real(a1)?, a2: real(a2)?, mu: real(mu)? }
            }
            ("sqrtsum", None) => FunctionDescriptor::SqrtSum,
            ("minsum", Some(cap)) => FunctionDescriptor::MinSum(real(cap)?),
            ("expsum", None) => FunctionDescriptor::ExpSum,
            _ => return Err(fail("unknown function")),
        };
        parsed.validate().map_err(|e| match e {
            Error::InvalidDescriptor { reason, .. } => fail(&reason),
            other => other,
        })?;
        Ok(parsed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x1: f64, x2: f64) -> SimplexPoint {
        SimplexPoint::new(x1, x2).unwrap()
    }

    #[test]
    fn lattice_small_degrees() {
        let one = simplex_lattice(1).unwrap();
        assert_eq!(one, vec![MultiIndex::new(0, 0), MultiIndex::new(0, 1), MultiIndex::new(1, 0)]);
        let two = simplex_lattice(2).unwrap();
        assert_eq!(two.len(), 6);
        assert_eq!(*two.last().unwrap(), MultiIndex::new(2, 0));
        assert!(matches!(simplex_lattice(0), Err(Error::InvalidDegree(0))));
    }

    #[test]
    fn lattice_len_matches_counting_loop() {
        for n in 1..=200 {
            let mut count = 0;
            for k1 in 0..=n {
                for k2 in 0..=n {
                    if k1 + k2 <= n {
                        count += 1;
                    }
                }
            }
            let lattice = simplex_lattice(n).unwrap();
            assert_eq!(lattice.len(), count);
            assert_eq!(lattice.len(), lattice_len(n));
            assert!(lattice.iter().all(|k| k.order() <= n));
            assert!(lattice.windows(2).all(|w| w[0] < w[1]), "strictly increasing, hence distinct");
            if n == 50 {
                assert_eq!(lattice.len(), 1326);
            }
        }
    }

    #[test]
    fn lattice_position_agrees_with_enumeration() {
        for n in [1, 2, 7, 30] {
            for (pos, k) in simplex_lattice(n).unwrap().into_iter().enumerate() {
                assert_eq!(lattice_position(n, k), pos);
            }
        }
    }

    #[test]
    fn point_validation_and_clamping() {
        assert!(SimplexPoint::new(0.6, 0.5).is_err());
        assert!(SimplexPoint::new(-0.1, 0.5).is_err());
        assert!(SimplexPoint::new(f64::NAN, 0.0).is_err());
        let p = SimplexPoint::new(0.7, 0.3 + 5e-13).unwrap();
        assert!(p.norm1() <= 1.0);
        assert_eq!(p.tail(), 0.0);
        let q = SimplexPoint::new(-1e-13, 0.2).unwrap();
        assert_eq!(q.x1(), 0.0);
    }

    #[test]
    fn componentwise_order_examples() {
        assert!(componentwise_leq(pt(0.1, 0.2), pt(0.1, 0.3)));
        assert!(!componentwise_leq(pt(0.2, 0.1), pt(0.1, 0.3)));
        let x = pt(0.25, 0.5);
        assert!(componentwise_leq(x, x));
    }

    #[test]
    fn descriptor_eval_examples() {
        let c: FunctionDescriptor = "const:3.5".parse().unwrap();
        assert_eq!(c.eval(pt(0.1, 0.2)), 3.5);
        let p: FunctionDescriptor = "proj:1".parse().unwrap();
        assert_eq!(p.eval(pt(0.3, 0.4)), 0.3);
        let d: FunctionDescriptor = "absdist:0.5,0.5,1".parse().unwrap();
        assert_eq!(d.eval(SimplexPoint::ORIGIN), 1.0);
        let poly: FunctionDescriptor = "poly:2,0,1;1,1,-2".parse().unwrap();
        assert!((poly.eval(pt(0.5, 0.25)) - (0.25 - 0.25)).abs() < 1e-15);
        assert_eq!(FunctionDescriptor::SqrtSum.eval(SimplexPoint::ORIGIN), 0.0);
        assert_eq!(FunctionDescriptor::MinSum(0.3).eval(pt(0.4, 0.4)), 0.3);
        assert_eq!(FunctionDescriptor::ExpSum.eval(SimplexPoint::ORIGIN), 1.0);
    }

    #[test]
    fn descriptor_rejects_bad_input() {
        for bad in [
            "const:x",
            "proj:3",
            "poly:1,2",
            "poly:-1,0,1",
            "absdist:0.5,0.5,0",
            "absdist:0.5,0.5,1.5",
            "absdist:0.8,0.8,1",
            "minsum:0",
            "minsum:-1",
            "sqrtsum:1",
            "sinsum",
            "",
        ] {
            assert!(bad.parse::<FunctionDescriptor>().is_err(), "{bad} accepted");
        }
    }

    fn descriptor_strategy() -> impl Strategy<Value = FunctionDescriptor> {
        let real = -10.0f64..10.0;
        prop_oneof![
            real.clone().prop_map(FunctionDescriptor::Const),
            Just(FunctionDescriptor::Proj(Axis::First)),
            Just(FunctionDescriptor::Proj(Axis::Second)),
            prop::collection::vec((0u32..5, 0u32..5, real), 1..4).prop_map(|v| {
                FunctionDescriptor::PolyTerms(
                    v.into_iter().map(|(i, j, coeff)| PolyTerm { i, j, coeff }).collect(),
                )
            }),
            (0.0f64..0.5, 0.0f64..0.5, 0.01f64..=1.0)
                .prop_map(|(a1, a2, mu)| FunctionDescriptor::AbsDist { a1, a2, mu }),
            Just(FunctionDescriptor::SqrtSum),
            (0.01f64..5.0).prop_map(FunctionDescriptor::MinSum),
            Just(FunctionDescriptor::ExpSum),
        ]
    }

    fn point_strategy() -> impl Strategy<Value = SimplexPoint> {
        (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, b)| {
            if a + b > 1.0 {
                pt(1.0 - a, 1.0 - b)
            } else {
                pt(a, b)
            }
        })
    }

    proptest! {
        #[test]
        fn descriptor_text_round_trips(f in descriptor_strategy()) {
            let back: FunctionDescriptor = f.to_string().parse().unwrap();
            prop_assert_eq!(back, f);
        }

        #[test]
        fn descriptors_are_finite_on_simplex(f in descriptor_strategy(), x in point_strategy()) {
            prop_assert!(f.eval(x).is_finite());
        }

        #[test]
        fn minsum_is_capped(cap in 0.01f64..2.0, x in point_strategy()) {
            prop_assert!(FunctionDescriptor::MinSum(cap).eval(x) <= cap);
        }

        #[test]
        fn componentwise_order_is_partial(a in point_strategy(), b in point_strategy(), c in point_strategy()) {
            prop_assert!(componentwise_leq(a, a));
            if componentwise_leq(a, b) && componentwise_leq(b, a) {
                prop_assert_eq!(a, b);
            }
            if componentwise_leq(a, b) && componentwise_leq(b, c) {
                prop_assert!(componentwise_leq(a, c));
            }
        }
    }
}
