//! First-order differential operators and the primed exterior differentials built from them.

use std::fmt;
use std::sync::Arc;

use crate::error::{CfxError, Result};
use crate::form::{merge_sign, ExtForm};
use crate::poly::{Poly, Vars};
use crate::scalar::{fmt_cx, Cx, Real};
use crate::spinor::Primed;

/// `Σ_i c_i ∂_{v_i}` with polynomial coefficients `c_i`.
#[derive(Clone, PartialEq)]
pub struct VectorField<R: Real> {
    vars: Arc<Vars>,
    coeffs: Vec<Poly<R>>,
}

impl<R: Real> VectorField<R> {
    pub fn zero(vars: &Arc<Vars>) -> Self {
        VectorField { vars: vars.clone(), coeffs: vec![Poly::zero(vars); vars.len()] }
    }

    pub fn partial(vars: &Arc<Vars>, idx: usize) -> Self {
        let mut v = Self::zero(vars);
        v.coeffs[idx] = Poly::one(vars);
        v
    }

    pub fn from_coeffs(vars: &Arc<Vars>, coeffs: Vec<Poly<R>>) -> Self {
        assert_eq!(coeffs.len(), vars.len());
        VectorField { vars: vars.clone(), coeffs }
    }

    /// Complex-linear combination of coordinate derivatives.
    pub fn constant(vars: &Arc<Vars>, terms: &[(usize, Cx<R>)]) -> Self {
        let mut v = Self::zero(vars);
        for (i, c) in terms {
            v.coeffs[*i] += &Poly::constant(vars, c.clone());
        }
        v
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.vars
    }

    pub fn coeff(&self, idx: usize) -> &Poly<R> {
        &self.coeffs[idx]
    }

    pub fn coeffs(&self) -> &[Poly<R>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn apply(&self, p: &Poly<R>) -> Poly<R> {
        let mut out = Poly::zero(&self.vars);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = p.diff(i);
            if !d.is_zero() {
                out += &(c * &d);
            }
        }
        out
    }

    pub fn apply_form(&self, f: &ExtForm<R>) -> ExtForm<R> {
        f.map(|p| self.apply(p))
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        VectorField { vars: self.vars.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        VectorField { vars: self.vars.clone(), coeffs }
    }

    pub fn scale(&self, c: &Cx<R>) -> Self {
        VectorField { vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect() }
    }

    pub fn neg(&self) -> Self {
        VectorField { vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|p| -p).collect() }
    }

    /// Coefficientwise complex conjugate; the conjugate of `Σ c_b X_b` for real fields `X_b`.
    pub fn conj(&self) -> Self {
        VectorField { vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|p| p.conj()).collect() }
    }

    /// `[X, Y]^i = X(Y^i) − Y(X^i)`.
    pub fn bracket(&self, other: &Self) -> Self {
        let coeffs =
            (0..self.coeffs.len()).map(|i| &self.apply(&other.coeffs[i]) - &other.apply(&self.coeffs[i])).collect();
        VectorField { vars: self.vars.clone(), coeffs }
    }

    pub fn relabel(&self, target: &Arc<Vars>, map: &[usize]) -> Self {
        let mut out = Self::zero(target);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[map[i]] += &c.relabel(target, map);
        }
        out
    }

    pub fn cast<S: Real>(&self) -> VectorField<S> {
        VectorField { vars: self.vars.clone(), coeffs: self.coeffs.iter().map(|c| c.cast()).collect() }
    }
}

impl<R: Real> fmt::Display for VectorField<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match c.as_constant() {
                Some(k) => format!("{}*d/d{}", fmt_cx(&k), self.vars.names()[i]),
                None => format!("({c})*d/d{}", self.vars.names()[i]),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl<R: Real> fmt::Debug for VectorField<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A `(rows × 2)` table of vector fields `W_A^{A'}` defining
/// `δ^{A'} f = Σ_A W_A^{A'} f_𝐀 ω^A ∧ ω^𝐀` on forms over `C^{rows}`.
#[derive(Clone, PartialEq, Debug)]
pub struct PrimedDifferential<R: Real> {
    rows: Vec<[VectorField<R>; 2]>,
}

impl<R: Real> PrimedDifferential<R> {
    pub fn new(rows: Vec<[VectorField<R>; 2]>) -> Self {
        PrimedDifferential { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, a: usize, p: Primed) -> &VectorField<R> {
        &self.rows[a][p.o()]
    }

    pub fn rows(&self) -> &[[VectorField<R>; 2]] {
        &self.rows
    }

    /// Upper-index operator `δ^{A'}`.
    pub fn upper(&self, p: Primed, f: &ExtForm<R>) -> Result<ExtForm<R>> {
        if f.dim() != self.rows.len() {
            return Err(CfxError::Dimension(format!(
                "form over C^{} for an operator on C^{}",
                f.dim(),
                self.rows.len()
            )));
        }
        let mut out = ExtForm::zero(f.vars(), f.dim(), f.degree() + 1);
        for (a, row) in self.rows.iter().enumerate() {
            let w = &row[p.o()];
            for (m, c) in f.components() {
                if m & (1 << a) != 0 {
                    continue;
                }
                let v = w.apply(c);
                if v.is_zero() {
                    continue;
                }
                let v = if merge_sign(1 << a, *m) < 0 { -v } else { v };
                out.add_to(m | (1 << a), v);
            }
        }
        Ok(out)
    }

    /// Lower-index operator: `δ_{0'} = −δ^{1'}`, `δ_{1'} = δ^{0'}`.
    pub fn lower(&self, p: Primed, f: &ExtForm<R>) -> Result<ExtForm<R>> {
        match p {
            Primed::P0 => Ok(-self.upper(Primed::P1, f)?),
            Primed::P1 => self.upper(Primed::P0, f),
        }
    }

    /// Entry `W_{A A'}` with the primed index lowered.
    pub fn lowered_entry(&self, a: usize, p: Primed) -> VectorField<R> {
        match p {
            Primed::P0 => self.rows[a][1].neg(),
            Primed::P1 => self.rows[a][0].clone(),
        }
    }
}

/// Lowered and raised two-spinor tables built from real fields `X_1..X_{4m}`:
/// row `2l` is `(X_{4l+1} + iX_{4l+2}, −X_{4l+3} − iX_{4l+4})`, row `2l+1` is
/// `(X_{4l+3} − iX_{4l+4}, X_{4l+1} − iX_{4l+2})`; raising uses `W^{0'} = W_{1'}`, `W^{1'} = −W_{0'}`.
pub fn quaternionic_rows<R: Real>(fields: &[VectorField<R>]) -> (PrimedDifferential<R>, PrimedDifferential<R>) {
    assert_eq!(fields.len() % 4, 0, "need four real fields per quaternionic coordinate");
    let i = crate::scalar::imag_unit::<R>();
    let mut lowered = Vec::new();
    for q in fields.chunks(4) {
        let (x1, x2, x3, x4) = (&q[0], &q[1], &q[2], &q[3]);
        lowered.push([x1.add(&x2.scale(&i)), x3.add(&x4.scale(&i)).neg()]);
        lowered.push([x3.sub(&x4.scale(&i)), x1.sub(&x2.scale(&i))]);
    }
    let raised = lowered.iter().map(|[l0, l1]| [l1.clone(), l0.neg()]).collect();
    (PrimedDifferential::new(lowered), PrimedDifferential::new(raised))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{imag_unit, int};
    use num_rational::BigRational;

    type V = VectorField<BigRational>;
    type P = Poly<BigRational>;

    #[test]
    fn bracket_of_heisenberg_fields() {
        // X = ∂_x − y/2 ∂_t, Y = ∂_y + x/2 ∂_t, [X, Y] = ∂_t
        let v = Vars::new(["x", "y", "t"]);
        let half = crate::scalar::ratio::<BigRational>(1, 2);
        let x = V::from_coeffs(&v, vec![P::one(&v), P::zero(&v), -P::var(&v, 1).scale(&half)]);
        let y = V::from_coeffs(&v, vec![P::zero(&v), P::one(&v), P::var(&v, 0).scale(&half)]);
        assert_eq!(x.bracket(&y), V::partial(&v, 2));
        assert_eq!(y.bracket(&x), V::partial(&v, 2).neg());
    }

    #[test]
    fn conjugate_and_apply() {
        let v = Vars::xs(2);
        let z = V::constant(&v, &[(0, int(1)), (1, imag_unit())]);
        let p = &P::var(&v, 0) + &P::var(&v, 1);
        let (one, i) = (int::<BigRational>(1), imag_unit::<BigRational>());
        assert_eq!(z.apply(&p), P::constant(&v, one.clone() + i.clone()));
        assert_eq!(z.conj().apply(&p), P::constant(&v, one - i));
    }

    #[test]
    fn primed_differential_sign() {
        // single row: δ^{0'} = ∂_x on C^1; δ^{0'}(x) = ω^0
        let v = Vars::xs(1);
        let d = PrimedDifferential::new(vec![[V::partial(&v, 0), V::zero(&v)]]);
        let f = ExtForm::scalar(1, P::var(&v, 0));
        let out = d.upper(Primed::P0, &f).unwrap();
        assert_eq!(out.component_at(&[0]), P::one(&v));
        assert!(d.upper(Primed::P1, &f).unwrap().is_zero());
        assert_eq!(d.lower(Primed::P1, &f).unwrap(), out);
    }
}
