//! Exterior forms over `ω^0..ω^{m-1}` with polynomial coefficients.
//!
//! Basis multi-indices are stored as bit masks; bit `i` stands for `ω^i`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::error::{CfxError, Result};
use crate::poly::{Poly, Vars};
use crate::scalar::{Cx, Real};

pub type Mask = u32;

pub fn mask_of(idx: &[usize]) -> Mask {
    idx.iter().fold(0, |m, &i| m | (1 << i))
}

pub fn indices_of(mask: Mask) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `ω^a ∧ ω^b` relative to the sorted basis element, for disjoint masks.
pub fn merge_sign(a: Mask, b: Mask) -> i64 {
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All masks of `deg` bits below `dim`, in increasing lexicographic order of index tuples.
pub fn masks(dim: usize, deg: usize) -> Vec<Mask> {
    let mut out = Vec::new();
    fn rec(start: usize, dim: usize, left: usize, cur: Mask, out: &mut Vec<Mask>) {
        if left == 0 {
            out.push(cur);
            return;
        }
        for i in start..dim {
            rec(i + 1, dim, left - 1, cur | (1 << i), out);
        }
    }
    if deg <= dim {
        rec(0, dim, deg, 0, &mut out);
    }
    out
}

#[derive(Clone, PartialEq)]
pub struct ExtForm<R: Real> {
    vars: Arc<Vars>,
    dim: usize,
    degree: usize,
    comps: BTreeMap<Mask, Poly<R>>,
}

impl<R: Real> ExtForm<R> {
    pub fn zero(vars: &Arc<Vars>, dim: usize, degree: usize) -> Self {
        assert!(dim <= 32, "form dimension above 32");
        ExtForm { vars: vars.clone(), dim, degree, comps: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, p: Poly<R>) -> Self {
        let mut f = Self::zero(p.vars(), dim, 0);
        f.add_to(0, p);
        f
    }

    /// `coeff · ω^{i_1}∧…∧ω^{i_r}` for any index order; repeated indices give zero.
    pub fn basis(vars: &Arc<Vars>, dim: usize, idx: &[usize], coeff: Poly<R>) -> Result<Self> {
        let mut f = Self::zero(vars, dim, idx.len());
        let mut mask: Mask = 0;
        let mut sign = 1;
        for &i in idx {
            if i >= dim {
                return Err(CfxError::OutOfRange(format!("index {i} for dimension {dim}")));
            }
            if mask & (1 << i) != 0 {
                return Ok(f);
            }
            sign *= merge_sign(mask, 1 << i);
            mask |= 1 << i;
        }
        let coeff = if sign < 0 { -coeff } else { coeff };
        f.add_to(mask, coeff);
        Ok(f)
    }

    /// `ω^A ⌟ Ω_m`, the degree `m-1` form with `ω^A ∧ ω^{Â} = Ω_m`.
    pub fn hat(vars: &Arc<Vars>, dim: usize, a: usize) -> Self {
        let full: Mask = ((1u64 << dim) - 1) as Mask;
        let rest = full & !(1 << a);
        let sign = merge_sign(1 << a, rest);
        let mut f = Self::zero(vars, dim, dim - 1);
        let one = Poly::one(vars);
        f.add_to(rest, if sign < 0 { -one } else { one });
        f
    }

    /// `Ω_m = ω^0∧…∧ω^{m-1}`.
    pub fn volume(vars: &Arc<Vars>, dim: usize) -> Self {
        let mut f = Self::zero(vars, dim, dim);
        f.add_to(((1u64 << dim) - 1) as Mask, Poly::one(vars));
        f
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> &BTreeMap<Mask, Poly<R>> {
        &self.comps
    }

    pub fn component(&self, mask: Mask) -> Poly<R> {
        self.comps.get(&mask).cloned().unwrap_or_else(|| Poly::zero(&self.vars))
    }

    pub fn component_at(&self, idx: &[usize]) -> Poly<R> {
        self.component(mask_of(idx))
    }

    /// Coefficient of `Ω_m` for a top-degree form.
    pub fn top_coefficient(&self) -> Result<Poly<R>> {
        if self.degree != self.dim {
            return Err(CfxError::Dimension(format!(
                "form of degree {} is not top degree {}",
                self.degree, self.dim
            )));
        }
        Ok(self.component(((1u64 << self.dim) - 1) as Mask))
    }

    pub fn add_to(&mut self, mask: Mask, p: Poly<R>) {
        debug_assert_eq!(mask.count_ones() as usize, self.degree);
        if p.is_zero() {
            return;
        }
        match self.comps.get_mut(&mask) {
            Some(q) => {
                *q += &p;
                if q.is_zero() {
                    self.comps.remove(&mask);
                }
            }
            None => {
                self.comps.insert(mask, p);
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(CfxError::Dimension(format!("forms over C^{} and C^{}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(CfxError::Dimension(format!(
                "adding forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        if self.degree != other.degree {
            if other.is_zero() {
                return Ok(self.clone());
            }
            return Ok(other.clone());
        }
        let mut out = self.clone();
        for (m, p) in &other.comps {
            out.add_to(*m, p.clone());
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree + other.degree;
        let mut out = Self::zero(&self.vars, self.dim, degree);
        if degree > self.dim {
            return Ok(out);
        }
        for (ma, pa) in &self.comps {
            for (mb, pb) in &other.comps {
                if ma & mb != 0 {
                    continue;
                }
                let prod = pa * pb;
                let prod = if merge_sign(*ma, *mb) < 0 { -prod } else { prod };
                out.add_to(ma | mb, prod);
            }
        }
        Ok(out)
    }

    /// `ω^a ∧ self`.
    pub fn left_basis(&self, a: usize) -> Self {
        let mut out = Self::zero(&self.vars, self.dim, self.degree + 1);
        for (m, p) in &self.comps {
            if m & (1 << a) != 0 {
                continue;
            }
            let s = merge_sign(1 << a, *m);
            out.add_to(m | (1 << a), if s < 0 { -p.clone() } else { p.clone() });
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly<R>) -> Self {
        self.map(|q| q * p)
    }

    pub fn scale(&self, c: &Cx<R>) -> Self {
        self.map(|q| q.scale(c))
    }

    /// Applies a linear map to every coefficient.
    pub fn map(&self, f: impl Fn(&Poly<R>) -> Poly<R>) -> Self {
        let mut out = Self::zero(&self.vars, self.dim, self.degree);
        for (m, p) in &self.comps {
            out.add_to(*m, f(p));
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map(|p| p.conj())
    }

    /// Moves coefficients into `target`, variable `i` going to `map[i]`.
    pub fn relabel(&self, target: &Arc<Vars>, map: &[usize]) -> Self {
        let mut out = Self::zero(target, self.dim, self.degree);
        for (m, p) in &self.comps {
            out.add_to(*m, p.relabel(target, map));
        }
        out
    }

    pub fn cast<S: Real>(&self) -> ExtForm<S> {
        let mut out = ExtForm::zero(&self.vars, self.dim, self.degree);
        for (m, p) in &self.comps {
            out.add_to(*m, p.cast());
        }
        out
    }

    /// Largest total degree among the coefficients.
    pub fn poly_degree(&self) -> Option<u32> {
        self.comps.values().filter_map(|p| p.degree()).max()
    }
}

impl<R: Real> Add for &ExtForm<R> {
    type Output = ExtForm<R>;
    fn add(self, rhs: &ExtForm<R>) -> ExtForm<R> {
        self.try_add(rhs).expect("incompatible forms")
    }
}

impl<R: Real> Sub for &ExtForm<R> {
    type Output = ExtForm<R>;
    fn sub(self, rhs: &ExtForm<R>) -> ExtForm<R> {
        self.try_add(&-rhs).expect("incompatible forms")
    }
}

impl<R: Real> Add for ExtForm<R> {
    type Output = ExtForm<R>;
    fn add(self, rhs: ExtForm<R>) -> ExtForm<R> {
        &self + &rhs
    }
}

impl<R: Real> Sub for ExtForm<R> {
    type Output = ExtForm<R>;
    fn sub(self, rhs: ExtForm<R>) -> ExtForm<R> {
        &self - &rhs
    }
}

impl<R: Real> Neg for &ExtForm<R> {
    type Output = ExtForm<R>;
    fn neg(self) -> ExtForm<R> {
        self.map(|p| -p)
    }
}

impl<R: Real> Neg for ExtForm<R> {
    type Output = ExtForm<R>;
    fn neg(self) -> ExtForm<R> {
        -&self
    }
}

impl<R: Real> fmt::Display for ExtForm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(m, p)| {
                let idx: Vec<String> = indices_of(*m).iter().map(|i| i.to_string()).collect();
                if idx.is_empty() {
                    format!("({p})")
                } else {
                    format!("({p}) w^{{{}}}", idx.join(","))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<R: Real> fmt::Debug for ExtForm<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type F = ExtForm<BigRational>;
    type P = Poly<BigRational>;

    fn w(v: &Arc<Vars>, idx: &[usize]) -> F {
        F::basis(v, 4, idx, P::one(v)).unwrap()
    }

    #[test]
    fn antisymmetry_of_basis() {
        let v = Vars::xs(2);
        assert_eq!(w(&v, &[0]).wedge(&w(&v, &[1])).unwrap(), w(&v, &[0, 1]));
        assert_eq!(w(&v, &[1]).wedge(&w(&v, &[0])).unwrap(), -w(&v, &[0, 1]));
        assert!(w(&v, &[0]).wedge(&w(&v, &[0])).unwrap().is_zero());
    }

    #[test]
    fn bilinearity_example() {
        let v = Vars::xs(2);
        let x1 = P::var(&v, 0);
        let x2 = P::var(&v, 1);
        let f = F::basis(&v, 4, &[0], x1.clone()).unwrap();
        let g = &F::basis(&v, 4, &[1], x2.clone()).unwrap() + &w(&v, &[2]);
        let expect = &F::basis(&v, 4, &[0, 1], &x1 * &x2).unwrap() + &F::basis(&v, 4, &[0, 2], x1).unwrap();
        assert_eq!(f.wedge(&g).unwrap(), expect);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let v = Vars::xs(1);
        let a = F::basis(&v, 2, &[0], P::one(&v)).unwrap();
        let b = F::basis(&v, 4, &[0], P::one(&v)).unwrap();
        assert!(matches!(a.wedge(&b), Err(CfxError::Dimension(_))));
    }

    #[test]
    fn hat_completes_volume() {
        let v = Vars::xs(1);
        for a in 0..4 {
            let lhs = w(&v, &[a]).wedge(&F::hat(&v, 4, a)).unwrap();
            assert_eq!(lhs, F::volume(&v, 4));
        }
    }

    #[test]
    fn masks_enumerate_subsets() {
        assert_eq!(masks(4, 2).len(), 6);
        assert_eq!(masks(3, 0), vec![0]);
        assert!(masks(2, 3).is_empty());
        assert_eq!(indices_of(mask_of(&[3, 1])), vec![1, 3]);
    }

    fn arb_form(deg: usize) -> impl Strategy<Value = F> {
        prop::collection::vec((prop::sample::select(masks(5, deg)), -3i64..4, 0u8..3), 0..4).prop_map(move |ts| {
            let v = Vars::xs(1);
            let mut f = F::zero(&v, 5, deg);
            for (m, c, e) in ts {
                f.add_to(m, P::monomial(&v, vec![e], int(c)));
            }
            f
        })
    }

    proptest! {
        #[test]
        fn graded_commutativity(
            (f, g, p, q) in (0usize..3, 0usize..3)
                .prop_flat_map(|(p, q)| (arb_form(p), arb_form(q), Just(p), Just(q)))
        ) {
            let lhs = f.wedge(&g).unwrap();
            let rhs = g.wedge(&f).unwrap();
            let rhs = if (p * q) % 2 == 1 { -rhs } else { rhs };
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn associativity(f in arb_form(1), g in arb_form(2), h in arb_form(1)) {
            let a = f.wedge(&g).unwrap().wedge(&h).unwrap();
            let b = f.wedge(&g.wedge(&h).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
