//! Sparse multivariate polynomials with complex coefficients over a [`Real`] field.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CfxError, Result};
use crate::scalar::{cast, fmt_cx, is_zero, Cx, Real};

/// Default cap on total degree for generated and ingested polynomials.
pub const DEFAULT_MAX_DEGREE: u32 = 6;

/// Degree cap, overridable through `CFX_MAX_DEGREE`.
pub fn max_degree() -> u32 {
    std::env::var("CFX_MAX_DEGREE")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_DEGREE)
}

/// Ordered table of variable names shared by polynomials of one ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vars {
    names: Vec<String>,
}

impl Vars {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Self> {
        Arc::new(Vars { names: names.into_iter().map(Into::into).collect() })
    }

    /// `x_1..x_m`.
    pub fn xs(m: usize) -> Arc<Self> {
        Self::new((1..=m).map(|i| format!("x_{i}")))
    }

    /// `x_1..x_m, t_1, t_2, t_3`.
    pub fn group(m: usize) -> Arc<Self> {
        Self::new((1..=m).map(|i| format!("x_{i}")).chain((1..=3).map(|b| format!("t_{b}"))))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CfxError::UnknownVariable(name.to_string()))
    }
}

pub type Exp = Vec<u8>;

#[derive(Clone, PartialEq)]
pub struct Poly<R: Real> {
    vars: Arc<Vars>,
    terms: BTreeMap<Exp, Cx<R>>,
}

fn same_ring(a: &Arc<Vars>, b: &Arc<Vars>) {
    assert!(Arc::ptr_eq(a, b) || a == b, "polynomials over different variable tables");
}

impl<R: Real> Poly<R> {
    pub fn zero(vars: &Arc<Vars>) -> Self {
        Poly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Arc<Vars>, c: Cx<R>) -> Self {
        Self::monomial(vars, vec![0; vars.len()], c)
    }

    pub fn one(vars: &Arc<Vars>) -> Self {
        Self::constant(vars, Cx::one())
    }

    pub fn monomial(vars: &Arc<Vars>, exp: Exp, c: Cx<R>) -> Self {
        assert_eq!(exp.len(), vars.len(), "exponent length must match variable table");
        let mut terms = BTreeMap::new();
        if !is_zero(&c) {
            terms.insert(exp, c);
        }
        Poly { vars: vars.clone(), terms }
    }

    /// The coordinate function of variable `idx`.
    pub fn var(vars: &Arc<Vars>, idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Self::monomial(vars, e, Cx::one())
    }

    pub fn var_named(vars: &Arc<Vars>, name: &str) -> Result<Self> {
        Ok(Self::var(vars, vars.index(name)?))
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Exp, Cx<R>> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().map(|&v| v as u32).sum()).max()
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.iter().map(|&v| v as u32).sum::<u32>() == d)
    }

    /// The constant term, or `None` if the polynomial is not constant.
    pub fn as_constant(&self) -> Option<Cx<R>> {
        match self.terms.len() {
            0 => Some(Cx::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&v| v == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn check_degree(&self, cap: u32) -> Result<()> {
        match self.degree() {
            Some(d) if d > cap => Err(CfxError::Invalid(format!("degree {d} exceeds cap {cap}"))),
            _ => Ok(()),
        }
    }

    fn insert(&mut self, e: Exp, c: Cx<R>) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                if !is_zero(&c) {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() = o.get().clone() + c;
                if is_zero(o.get()) {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Cx<R>) -> Self {
        if is_zero(c) {
            return Self::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(e, v)| (e.clone(), v.clone() * c.clone())).collect();
        Poly { vars: self.vars.clone(), terms }
    }

    pub fn conj(&self) -> Self {
        let terms = self.terms.iter().map(|(e, v)| (e.clone(), v.conj())).collect();
        Poly { vars: self.vars.clone(), terms }
    }

    /// Exact partial derivative in variable `idx`.
    pub fn diff(&self, idx: usize) -> Self {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let p = e[idx];
            if p == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[idx] = p - 1;
            out.insert(e2, c.clone() * Complex::new(R::from_int(p as i64), R::zero()));
        }
        Poly { vars: self.vars.clone(), terms: out }
    }

    pub fn diff_named(&self, name: &str) -> Result<Self> {
        Ok(self.diff(self.vars.index(name)?))
    }

    pub fn eval(&self, point: &[Cx<R>]) -> Cx<R> {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = Cx::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t = t * point[i].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Evaluates at a real point in double precision.
    pub fn eval_f64(&self, point: &[f64]) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = 1.0;
            for (i, &p) in e.iter().enumerate() {
                if p > 0 {
                    t *= point[i].powi(p as i32);
                }
            }
            acc += Complex::new(c.re.to_f64_lossy(), c.im.to_f64_lossy()) * t;
        }
        acc
    }

    pub fn cast<S: Real>(&self) -> Poly<S> {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), cast::<R, S>(c))).collect();
        Poly { vars: self.vars.clone(), terms }
    }

    /// Re-expresses over `target`, sending variable `i` to `map[i]`.
    pub fn relabel(&self, target: &Arc<Vars>, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.vars.len());
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0u8; target.len()];
            for (i, &p) in e.iter().enumerate() {
                e2[map[i]] += p;
            }
            out.insert(e2, c.clone());
        }
        out
    }

    /// Substitutes `value` for variable `idx` (the variable stays in the table).
    pub fn substitute(&self, idx: usize, value: &Self) -> Self {
        let mut out = Self::zero(&self.vars);
        let mut powers = vec![Self::one(&self.vars)];
        for (e, c) in &self.terms {
            let p = e[idx] as usize;
            while powers.len() <= p {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut e2 = e.clone();
            e2[idx] = 0;
            out += &(&Self::monomial(&self.vars, e2, c.clone()) * &powers[p]);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            vars: self.vars.names().to_vec(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson { c: [c.re.to_ratio_string(), c.im.to_ratio_string()], e: e.clone() })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self> {
        let vars = Vars::new(j.vars.iter().cloned());
        let mut p = Self::zero(&vars);
        for t in &j.terms {
            if t.e.len() != vars.len() {
                return Err(CfxError::Parse(format!(
                    "exponent vector of length {} for {} variables",
                    t.e.len(),
                    vars.len()
                )));
            }
            let c = Complex::new(R::parse_ratio(&t.c[0])?, R::parse_ratio(&t.c[1])?);
            p.insert(t.e.clone(), c);
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub c: [String; 2],
    pub e: Vec<u8>,
}

/// Wire format `{"vars":[...], "terms":[{"c":["p/q","r/s"],"e":[...]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl<R: Real> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| {
                    let n = &self.vars.names()[i];
                    if p == 1 {
                        n.clone()
                    } else {
                        format!("{n}^{p}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", fmt_cx(c))?;
            } else {
                write!(f, "{}*{}", fmt_cx(c), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<R: Real> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a, R: Real> AddAssign<&'a Poly<R>> for Poly<R> {
    fn add_assign(&mut self, rhs: &'a Poly<R>) {
        same_ring(&self.vars, &rhs.vars);
        for (e, c) in &rhs.terms {
            self.insert(e.clone(), c.clone());
        }
    }
}

impl<'a, R: Real> SubAssign<&'a Poly<R>> for Poly<R> {
    fn sub_assign(&mut self, rhs: &'a Poly<R>) {
        same_ring(&self.vars, &rhs.vars);
        for (e, c) in &rhs.terms {
            self.insert(e.clone(), -c.clone());
        }
    }
}

impl<'a, R: Real> Add<&'a Poly<R>> for &'a Poly<R> {
    type Output = Poly<R>;
    fn add(self, rhs: &'a Poly<R>) -> Poly<R> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a, R: Real> Sub<&'a Poly<R>> for &'a Poly<R> {
    type Output = Poly<R>;
    fn sub(self, rhs: &'a Poly<R>) -> Poly<R> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<R: Real> Add for Poly<R> {
    type Output = Poly<R>;
    fn add(mut self, rhs: Poly<R>) -> Poly<R> {
        self += &rhs;
        self
    }
}

impl<R: Real> Sub for Poly<R> {
    type Output = Poly<R>;
    fn sub(mut self, rhs: Poly<R>) -> Poly<R> {
        self -= &rhs;
        self
    }
}

impl<R: Real> Neg for Poly<R> {
    type Output = Poly<R>;
    fn neg(self) -> Poly<R> {
        let terms = self.terms.into_iter().map(|(e, c)| (e, -c)).collect();
        Poly { vars: self.vars, terms }
    }
}

impl<R: Real> Neg for &Poly<R> {
    type Output = Poly<R>;
    fn neg(self) -> Poly<R> {
        -self.clone()
    }
}

impl<'a, R: Real> Mul<&'a Poly<R>> for &'a Poly<R> {
    type Output = Poly<R>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &'a Poly<R>) -> Poly<R> {
        same_ring(&self.vars, &rhs.vars);
        let mut out = Poly::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exp = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert(e, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<R: Real> Mul for Poly<R> {
    type Output = Poly<R>;
    fn mul(self, rhs: Poly<R>) -> Poly<R> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{imag_unit, int, rational};
    use num_rational::BigRational;
    use proptest::prelude::*;

    type P = Poly<BigRational>;

    fn ring() -> Arc<Vars> {
        Vars::group(4)
    }

    #[test]
    fn power_rule() {
        let v = ring();
        let x1 = P::var(&v, 0);
        let x2 = P::var(&v, 1);
        let p = &(&x1 * &x1) * &x2;
        let d = p.diff_named("x_1").unwrap();
        assert_eq!(d, (&x1 * &x2).scale(&int(2)));
        assert!(x1.diff_named("x_3").unwrap().is_zero());
        assert_eq!(x1.diff_named("y").unwrap_err(), CfxError::UnknownVariable("y".into()));
    }

    #[test]
    fn linearity_in_t() {
        let v = ring();
        let x1 = P::var_named(&v, "x_1").unwrap();
        let t1 = P::var_named(&v, "t_1").unwrap();
        let p = &(&x1 * &t1) + &(&t1 * &t1);
        assert_eq!(p.diff_named("t_1").unwrap(), &x1 + &t1.scale(&int(2)));
    }

    #[test]
    fn json_round_trip() {
        let v = ring();
        let p = &P::var(&v, 0).scale(&Complex::new(rational(1, 2), rational(-3, 1))) + &P::one(&v);
        let j = serde_json::to_string(&p.to_json()).unwrap();
        assert!(j.contains("\"1/2\""));
        let back = P::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn substitution_and_relabel() {
        let v = Vars::xs(2);
        let x = P::var(&v, 0);
        let y = P::var(&v, 1);
        let p = &x * &x;
        assert_eq!(p.substitute(0, &y), &y * &y);
        let w = Vars::xs(3);
        let q = x.relabel(&w, &[2, 0]);
        assert_eq!(q, P::var(&w, 2));
    }

    #[test]
    fn conj_and_display() {
        let v = Vars::xs(1);
        let p = P::var(&v, 0).scale(&imag_unit());
        assert_eq!(p.conj(), -p.clone());
        assert_eq!(format!("{p}"), "1i*x_1");
        assert_eq!(format!("{}", P::zero(&v)), "0");
    }

    fn arb_poly() -> impl Strategy<Value = P> {
        prop::collection::vec((prop::collection::vec(0u8..3, 3), -4i64..5, -4i64..5), 0..5).prop_map(|ts| {
            let v = Vars::xs(3);
            let mut p = P::zero(&v);
            for (e, a, b) in ts {
                p += &P::monomial(&v, e, Complex::new(rational(a, 1), rational(b, 1)));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn leibniz(p in arb_poly(), q in arb_poly(), i in 0usize..3) {
            let lhs = (&p * &q).diff(i);
            let rhs = &(&p.diff(i) * &q) + &(&p * &q.diff(i));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn ring_axioms(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert!((&p - &p).is_zero());
        }
    }
}
