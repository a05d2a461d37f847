//! Separable Gauss-Legendre quadrature on axis-aligned boxes and an exact rational counterpart.
//!
//! Integrands are sparse polynomials, optionally multiplied by a derivative of a product
//! cutoff `χ = Π_i w_i(x_i)`; every term factors into one-dimensional integrals.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CfxError, Result};
use crate::poly::{Poly, Vars};
use crate::scalar::{Cx, Real};

type Q = BigRational;

/// Axis-aligned box with a per-axis minimum node count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: Vec<usize>,
}

impl Region {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != resolution.len() || lo.is_empty() {
            return Err(CfxError::Dimension("region bounds and resolution lengths differ".into()));
        }
        for i in 0..lo.len() {
            if !(lo[i].is_finite() && hi[i].is_finite() && lo[i] < hi[i]) {
                return Err(CfxError::Invalid(format!("axis {i}: need finite lo < hi")));
            }
            if resolution[i] < 2 {
                return Err(CfxError::Invalid(format!("axis {i}: resolution must be at least 2")));
            }
        }
        Ok(Region { lo, hi, resolution })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64, resolution: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], vec![resolution; dim])
    }

    pub fn unit(dim: usize) -> Self {
        Self::cube(dim, 0.0, 1.0, 2).expect("unit box is valid")
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// `other` lies in the interior of `self`.
    pub fn contains_strictly(&self, other: &Region) -> bool {
        self.dim() == other.dim() && (0..self.dim()).all(|i| self.lo[i] < other.lo[i] && other.hi[i] < self.hi[i])
    }

    /// Bounds as exact rationals (binary floats convert exactly).
    pub fn exact_bounds(&self) -> (Vec<Q>, Vec<Q>) {
        let conv = |v: &f64| BigRational::from_float(*v).expect("finite");
        (self.lo.iter().map(conv).collect(), self.hi.iter().map(conv).collect())
    }
}

fn gl_rule(nodes: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(nodes).expect("positive")).as_node_weight_pairs().to_vec()
}

/// `χ = Π_i w_i(x_i)` with ascending rational coefficient lists.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableCutoff {
    pub factors: Vec<Vec<Q>>,
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_deriv(a: &[Q], times: usize) -> Vec<Q> {
    let mut v = a.to_vec();
    for _ in 0..times {
        if v.len() <= 1 {
            return vec![Q::zero()];
        }
        v = v.iter().enumerate().skip(1).map(|(k, c)| c * Q::from_integer(BigInt::from(k))).collect();
    }
    v
}

impl SeparableCutoff {
    /// `Π_i ((x_i − a_i)(b_i − x_i))²`: vanishes with its first derivatives on every face.
    pub fn bump(region: &Region) -> Self {
        let (lo, hi) = region.exact_bounds();
        let factors = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| {
                // (x − a)(b − x) = −ab + (a + b)x − x²
                let q = vec![-(a * b), a + b, -Q::one()];
                poly_mul(&q, &q)
            })
            .collect();
        SeparableCutoff { factors }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factor_derivative(&self, axis: usize, times: usize) -> Vec<Q> {
        poly_deriv(&self.factors[axis], times)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.factors
            .iter()
            .zip(x)
            .map(|(w, &v)| w.iter().rev().fold(0.0, |acc, c| acc * v + c.to_f64().unwrap_or(f64::NAN)))
            .product()
    }
}

/// Polynomial ring `x_1..x_m, t_1..t_3` extended by jet symbols `χ`, `χ_{;i}`, `χ_{;ij}` (`i ≤ j`)
/// standing for the derivatives of a cutoff; integrands are linear in the jet symbols.
#[derive(Debug, Clone)]
pub struct JetVars {
    pub base: Arc<Vars>,
    pub vars: Arc<Vars>,
    /// Derivative multi-index per jet symbol, as a sorted list of axes.
    pub orders: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl JetVars {
    pub fn new(base: &Arc<Vars>) -> Self {
        let d = base.len();
        let mut orders = vec![vec![]];
        for i in 0..d {
            orders.push(vec![i]);
        }
        for i in 0..d {
            for j in i..d {
                orders.push(vec![i, j]);
            }
        }
        let names = base.names().iter().cloned().chain(orders.iter().map(|o| {
            if o.is_empty() {
                "chi".to_string()
            } else {
                format!("chi;{}", o.iter().map(|i| base.names()[*i].clone()).collect::<Vec<_>>().join(","))
            }
        }));
        let vars = Vars::new(names);
        let index = orders.iter().enumerate().map(|(k, o)| (o.clone(), d + k)).collect();
        JetVars { base: base.clone(), vars, orders, index }
    }

    pub fn jet(&self, order: &[usize]) -> Option<usize> {
        let mut o = order.to_vec();
        o.sort_unstable();
        self.index.get(&o).copied()
    }

    pub fn chi(&self) -> Poly<Q> {
        Poly::var(&self.vars, self.base.len())
    }

    pub fn lift(&self, p: &Poly<Q>) -> Poly<Q> {
        p.relabel(&self.vars, &(0..self.base.len()).collect::<Vec<_>>())
    }

    /// Prolongs `Σ_j c_j ∂_j` so that it acts on jet symbols as on the derivatives they stand for.
    pub fn prolong(&self, v: &crate::op::VectorField<Q>) -> crate::op::VectorField<Q> {
        let d = self.base.len();
        let map: Vec<usize> = (0..d).collect();
        let mut coeffs: Vec<Poly<Q>> = (0..d).map(|j| v.coeff(j).relabel(&self.vars, &map)).collect();
        for order in &self.orders {
            let mut c = Poly::zero(&self.vars);
            if order.len() < 2 {
                for j in 0..d {
                    let cj = v.coeff(j);
                    if cj.is_zero() {
                        continue;
                    }
                    let mut next = order.clone();
                    next.push(j);
                    let k = self.jet(&next).expect("order at most two");
                    c += &(&cj.relabel(&self.vars, &map) * &Poly::var(&self.vars, k));
                }
            }
            coeffs.push(c);
        }
        crate::op::VectorField::from_coeffs(&self.vars, coeffs)
    }
}

/// One-dimensional Gauss integrals `∫_a^b x^e w(x) dx`, cached per `(axis, exponent, weight)`.
struct AxisIntegrals<'a> {
    region: &'a Region,
    cache: HashMap<(usize, u32, usize), f64>,
}

impl<'a> AxisIntegrals<'a> {
    fn new(region: &'a Region) -> Self {
        AxisIntegrals { region, cache: HashMap::new() }
    }

    fn get(&mut self, axis: usize, e: u32, weight_key: usize, weight: &[f64]) -> f64 {
        if let Some(v) = self.cache.get(&(axis, e, weight_key)) {
            return *v;
        }
        let (a, b) = (self.region.lo[axis], self.region.hi[axis]);
        let deg = e as usize + weight.len().saturating_sub(1);
        let nodes = self.region.resolution[axis].max(deg / 2 + 1);
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        let v = gl_rule(nodes)
            .iter()
            .map(|&(t, w)| {
                let x = mid + half * t;
                let wx = weight.iter().rev().fold(0.0, |acc, c| acc * x + c);
                w * x.powi(e as i32) * wx
            })
            .sum::<f64>()
            * half;
        self.cache.insert((axis, e, weight_key), v);
        v
    }
}

fn to_f64s(c: &[Q]) -> Vec<f64> {
    c.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect()
}

/// `∫_region p dV` by the separable Gauss rule; exact up to rounding for polynomial `p`.
pub fn integrate_poly<R: Real>(p: &Poly<R>, region: &Region) -> Result<Complex<f64>> {
    integrate_with(p, region, None, None)
}

/// Integral over the face `x_axis = value` of a box (surface measure of the remaining axes).
pub fn integrate_face<R: Real>(p: &Poly<R>, region: &Region, axis: usize, value: f64) -> Result<Complex<f64>> {
    integrate_with(p, region, Some((axis, value)), None)
}

/// `∫_region p dV` where `p` is linear in the jet symbols of `jets` and `χ` is the cutoff.
pub fn integrate_jet(p: &Poly<Q>, region: &Region, jets: &JetVars, chi: &SeparableCutoff) -> Result<Complex<f64>> {
    integrate_with(p, region, None, Some((jets, chi)))
}

fn integrate_with<R: Real>(
    p: &Poly<R>,
    region: &Region,
    face: Option<(usize, f64)>,
    jet: Option<(&JetVars, &SeparableCutoff)>,
) -> Result<Complex<f64>> {
    let d = region.dim();
    let base_len = jet.map_or(p.vars().len(), |(j, _)| j.base.len());
    if base_len != d {
        return Err(CfxError::Dimension(format!("polynomial in {base_len} coordinates, region of dimension {d}")));
    }
    let mut axes = AxisIntegrals::new(region);
    // weight polynomials per (axis, derivative order), keyed 0 = constant 1
    let mut weights: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    let mut total = Complex::new(0.0, 0.0);
    for (exp, c) in p.terms() {
        let mut order: Vec<usize> = Vec::new();
        if let Some((jv, _)) = jet {
            let mut found = 0;
            for (k, &e) in exp.iter().enumerate().skip(d) {
                if e > 0 {
                    found += e;
                    order = jv.orders[k - d].clone();
                }
            }
            if found != 1 {
                return Err(CfxError::Invalid("integrand must be linear in the cutoff jet".into()));
            }
        }
        let mut prod = 1.0;
        for axis in 0..d {
            let e = exp[axis] as u32;
            if let Some((fa, v)) = face {
                if fa == axis {
                    prod *= v.powi(e as i32);
                    continue;
                }
            }
            match jet {
                Some((_, chi)) => {
                    let times = order.iter().filter(|&&a| a == axis).count();
                    let w = weights.entry((axis, times)).or_insert_with(|| to_f64s(&chi.factor_derivative(axis, times))).clone();
                    prod *= axes.get(axis, e, times + 1, &w);
                }
                None => prod *= axes.get(axis, e, 0, &[1.0]),
            }
            if prod == 0.0 {
                break;
            }
        }
        let cf = crate::scalar::cast::<R, f64>(c);
        total += cf * prod;
    }
    Ok(total)
}

fn pow_q(x: &Q, e: usize) -> Q {
    let mut r = Q::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

/// `∫_a^b x^e w(x) dx` exactly.
fn exact_1d(a: &Q, b: &Q, e: usize, w: &[Q]) -> Q {
    let mut s = Q::zero();
    for (k, c) in w.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let m = e + k + 1;
        s += c * (pow_q(b, m) - pow_q(a, m)) / Q::from_usize(m).expect("small");
    }
    s
}

/// Exact rational counterpart of [`integrate_poly`] / [`integrate_jet`].
pub fn integrate_exact(p: &Poly<Q>, lo: &[Q], hi: &[Q], jet: Option<(&JetVars, &SeparableCutoff)>) -> Result<Cx<Q>> {
    let d = lo.len();
    let mut total = Cx::new(Q::zero(), Q::zero());
    for (exp, c) in p.terms() {
        let mut order: Vec<usize> = Vec::new();
        if let Some((jv, _)) = jet {
            let hits: Vec<usize> = (d..exp.len()).filter(|&k| exp[k] > 0).collect();
            if hits.len() != 1 || exp[hits[0]] != 1 {
                return Err(CfxError::Invalid("integrand must be linear in the cutoff jet".into()));
            }
            order = jv.orders[hits[0] - d].clone();
        }
        let mut prod = Q::one();
        for axis in 0..d {
            let w = match jet {
                Some((_, chi)) => chi.factor_derivative(axis, order.iter().filter(|&&a| a == axis).count()),
                None => vec![Q::one()],
            };
            prod *= exact_1d(&lo[axis], &hi[axis], exp[axis] as usize, &w);
        }
        total += c.clone() * Cx::new(prod, Q::zero());
    }
    Ok(total)
}
