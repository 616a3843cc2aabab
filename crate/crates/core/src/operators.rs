//! The univariate operator `Q`, its non-tensor bivariate extension `G`, and
//! the ordered-pair difference expansion of `G`.

use crate::abel::{bivariate_weights, univariate_weights, AbelProduct, WeightMethod};
use crate::error::{Error, Result};
use crate::model::{
    componentwise_leq, lattice_len, lattice_position, Axis, FunctionDescriptor, MultiIndex,
    OperatorParams, SimplexPoint,
};
use crate::summation::NeumaierSum;

/// Values of a function at the lattice nodes `k / n`, in lattice order.
///
/// Sampling once and reusing the table is what makes repeated evaluation of
/// `G` at many points cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSamples {
    n: usize,
    values: Vec<f64>,
}

impl LatticeSamples {
    pub fn new(f: &FunctionDescriptor, n: usize) -> Self {
        Self::from_fn(n, |k| f.eval(k.node(n)))
    }

    /// Samples `k -> g(k_axis / n)`, a function of one coordinate.
    pub fn marginal(g: &FunctionDescriptor, axis: Axis, n: usize) -> Self {
        Self::from_fn(n, |k| g.eval_univariate(axis.pick(k) as f64 / n as f64))
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(MultiIndex) -> f64) -> Self {
        let mut values = Vec::with_capacity(lattice_len(n));
        for k1 in 0..=n {
            for k2 in 0..=n - k1 {
                values.push(f(MultiIndex::new(k1, k2)));
            }
        }
        Self { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, k: MultiIndex) -> f64 {
        self.values[lattice_position(self.n, k)]
    }

    /// `G(f; x)` for the sampled `f`.
    pub fn eval_g(&self, params: OperatorParams, x: SimplexPoint) -> Result<f64> {
        self.check_degree(params)?;
        Ok(bivariate_weights(params, x)?.apply(&self.values))
    }

    fn check_degree(&self, params: OperatorParams) -> Result<()> {
        if params.n() != self.n {
            return Err(Error::InvalidArgument(format!(
                "samples were taken for n = {}, operator has n = {}",
                self.n,
                params.n()
            )));
        }
        Ok(())
    }
}

/// `Q(f; x)` where `f` acts through its restriction `t -> f(t, 0)`.
pub fn eval_q(f: &FunctionDescriptor, params: OperatorParams, x: f64) -> Result<f64> {
    let weights = univariate_weights(params, x)?;
    let n = params.n() as f64;
    let values: Vec<f64> = (0..=params.n()).map(|k| f.eval_univariate(k as f64 / n)).collect();
    Ok(weights.apply(&values))
}

/// `G(f; x) = sum_{|k| <= n} f(k / n) w_k(x)`.
pub fn eval_g(f: &FunctionDescriptor, params: OperatorParams, x: SimplexPoint) -> Result<f64> {
    LatticeSamples::new(f, params.n()).eval_g(params, x)
}

/// `G` applied to `(t1, t2) -> g(t_axis)`, where `g` acts through its
/// restriction `t -> g(t, 0)`. Equals `Q(g; x_axis)`.
pub fn eval_g_marginal(
    g: &FunctionDescriptor,
    axis: Axis,
    params: OperatorParams,
    x: SimplexPoint,
) -> Result<f64> {
    LatticeSamples::marginal(g, axis, params.n()).eval_g(params, x)
}

/// `G(f; y) - G(f; x)` for `x <= y`, expressed as the sum over pairs
/// `(k, l)` with `|k| + |l| <= n` of `[f((k + l) / n) - f(k / n)]` times the
/// five-part Abel kernel in `x`, `y - x` and `1 - |y|`.
pub fn difference_expansion(
    f: &FunctionDescriptor,
    params: OperatorParams,
    x: SimplexPoint,
    y: SimplexPoint,
) -> Result<f64> {
    let kernel = DifferenceKernel::new(params, x, y)?;
    Ok(kernel.apply(&LatticeSamples::new(f, params.n())))
}

#[derive(Debug, Clone, Copy)]
struct KernelTerm {
    /// lattice position of `k + l`
    upper: u32,
    /// lattice position of `k`
    lower: u32,
    weight: f64,
}

/// Kernel of the difference expansion for a fixed ordered pair `x <= y`.
///
/// Enumerating the `O(n^4)` index pairs is the expensive part, so the
/// kernel is built once and applied to any number of sampled functions.
#[derive(Debug, Clone)]
pub struct DifferenceKernel {
    params: OperatorParams,
    terms: Vec<KernelTerm>,
}

impl DifferenceKernel {
    pub fn new(params: OperatorParams, x: SimplexPoint, y: SimplexPoint) -> Result<Self> {
        Self::with_method(params, x, y, WeightMethod::Auto)
    }

    pub fn with_method(
        params: OperatorParams,
        x: SimplexPoint,
        y: SimplexPoint,
        method: WeightMethod,
    ) -> Result<Self> {
        if !componentwise_leq(x, y) {
            return Err(Error::NotOrdered(x.x1(), x.x2(), y.x1(), y.x2()));
        }
        let d = y.difference(x)?;
        let n = params.n();
        let product = AbelProduct::new(params, method)?;
        let px1 = product.part(x.x1(), n)?;
        let px2 = product.part(x.x2(), n)?;
        let pd1 = product.part(d.x1(), n)?;
        let pd2 = product.part(d.x2(), n)?;
        let ptail = product.part(y.tail(), n)?;

        let mut terms = Vec::new();
        for k1 in 0..=n {
            for k2 in 0..=n - k1 {
                let k = MultiIndex::new(k1, k2);
                let rest = n - k.order();
                for l1 in 0..=rest {
                    for l2 in 0..=rest - l1 {
                        let m = rest - l1 - l2;
                        let weight = product.term([px1[k1], px2[k2], pd1[l1], pd2[l2], ptail[m]]);
                        if weight == 0.0 {
                            continue;
                        }
                        terms.push(KernelTerm {
                            upper: lattice_position(n, MultiIndex::new(k1 + l1, k2 + l2)) as u32,
                            lower: lattice_position(n, k) as u32,
                            weight,
                        });
                    }
                }
            }
        }
        Ok(Self { params, terms })
    }

    /// Number of nonzero kernel entries.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of all kernel weights; equals `1` by the Abel–Jensen identity.
    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum::<NeumaierSum>().value()
    }

    pub fn apply(&self, samples: &LatticeSamples) -> f64 {
        assert_eq!(samples.n(), self.params.n(), "samples taken at a different degree");
        let v = samples.values();
        self.terms
            .iter()
            .map(|t| t.weight * (v[t.upper as usize] - v[t.lower as usize]))
            .sum::<NeumaierSum>()
            .value()
    }
}
