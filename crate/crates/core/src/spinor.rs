//! Primed-index calculus: ε tables, the symmetric-power bases `S^a_σ` and `S̃^a_σ`,
//! tuple realizations and symmetrization.

use std::ops::Neg;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{CfxError, Result};
use crate::form::ExtForm;
use crate::poly::{Poly, Vars};
use crate::scalar::{binomial, factorial, int, ratio, rational, Real};

/// Primed index `0'` or `1'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Primed {
    P0,
    P1,
}

impl Primed {
    pub const ALL: [Primed; 2] = [Primed::P0, Primed::P1];

    /// `o(A')`: 0 for `0'`, 1 for `1'`.
    pub fn o(self) -> usize {
        match self {
            Primed::P0 => 0,
            Primed::P1 => 1,
        }
    }

    pub fn from_o(v: usize) -> Self {
        if v == 0 {
            Primed::P0
        } else {
            Primed::P1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonTable {
    pub lower: [[BigRational; 2]; 2],
    pub upper: [[BigRational; 2]; 2],
}

impl EpsilonTable {
    pub fn standard() -> Self {
        let z = || BigRational::zero();
        EpsilonTable {
            lower: [[z(), rational(1, 1)], [rational(-1, 1), z()]],
            upper: [[z(), rational(-1, 1)], [rational(1, 1), z()]],
        }
    }

    /// `ε^{A'B'} ε_{B'C'}` as a matrix; the identity for the standard table.
    pub fn upper_times_lower(&self) -> [[BigRational; 2]; 2] {
        let mut out = [[BigRational::zero(), BigRational::zero()], [BigRational::zero(), BigRational::zero()]];
        for (a, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                for b in 0..2 {
                    *cell += &self.upper[a][b] * &self.lower[b][c];
                }
            }
        }
        out
    }
}

/// `f^{A'} = f_{B'} ε^{B'A'}`: `(f_{0'}, f_{1'}) ↦ (f_{1'}, −f_{0'})`.
pub fn raise_primed<T: Clone + Neg<Output = T>>(lower: (T, T)) -> (T, T) {
    (lower.1.clone(), -lower.0)
}

/// `f_{A'} = f^{B'} ε_{B'A'}`: `(f^{0'}, f^{1'}) ↦ (−f^{1'}, f^{0'})`.
pub fn lower_primed<T: Clone + Neg<Output = T>>(upper: (T, T)) -> (T, T) {
    (-upper.1, upper.0)
}

/// A basis element `S^a_σ` (or `S̃^a_σ`) named by its indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisElement {
    pub a: usize,
    pub sigma: usize,
}

/// `∂_{A'} S^a_σ`: `S^a_{σ−1}` for `0'`, `S^{a−1}_{σ−1}` for `1'`; `None` when the result is zero.
pub fn sym_basis_derivative(a: usize, sigma: usize, p: Primed) -> Result<Option<BasisElement>> {
    if a > sigma {
        return Err(CfxError::OutOfRange(format!("a = {a} with sigma = {sigma}")));
    }
    if sigma == 0 {
        return Ok(None);
    }
    Ok(match p {
        Primed::P0 if a < sigma => Some(BasisElement { a, sigma: sigma - 1 }),
        Primed::P1 if a > 0 => Some(BasisElement { a: a - 1, sigma: sigma - 1 }),
        _ => None,
    })
}

/// `s_{A'} S̃^a_σ`: `S̃^a_{σ+1}` for `0'`, `S̃^{a+1}_{σ+1}` for `1'`.
pub fn tilde_basis_multiply(a: usize, sigma: usize, p: Primed) -> Result<BasisElement> {
    if a > sigma {
        return Err(CfxError::OutOfRange(format!("a = {a} with sigma = {sigma}")));
    }
    Ok(BasisElement { a: a + p.o(), sigma: sigma + 1 })
}

/// The polynomial ring in `s^{0'}, s^{1'}` realizing `⊙^σ C^2`.
pub fn spinor_vars() -> Arc<Vars> {
    Vars::new(["s^0'", "s^1'"])
}

/// `S^a_σ = (s^{0'})^{σ−a}/(σ−a)! · (s^{1'})^a/a!` as a polynomial.
pub fn s_basis_poly(vars: &Arc<Vars>, a: usize, sigma: usize) -> Poly<BigRational> {
    let c = ratio::<BigRational>(1, (factorial(sigma - a) * factorial(a)) as i64);
    Poly::monomial(vars, vec![(sigma - a) as u8, a as u8], c)
}

/// `s_{0'} = −s^{1'}`, `s_{1'} = s^{0'}` as polynomials.
pub fn lowered_s(vars: &Arc<Vars>, p: Primed) -> Poly<BigRational> {
    match p {
        Primed::P0 => -Poly::var(vars, 1),
        Primed::P1 => Poly::var(vars, 0),
    }
}

/// `S̃^a_σ = (s_{0'})^{σ−a} (s_{1'})^a` as a polynomial.
pub fn tilde_basis_poly(vars: &Arc<Vars>, a: usize, sigma: usize) -> Poly<BigRational> {
    &lowered_s(vars, Primed::P0).pow((sigma - a) as u32) * &lowered_s(vars, Primed::P1).pow(a as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    S,
    Tilde,
    Tuple,
}

/// A `⊙^σ C^2 ⊗ ∧^τ C^m`-valued section.
///
/// For `S`/`Tilde` the slots are the coefficients of `S^a_σ`/`S̃^a_σ`, `a = 0..=σ`.
/// For `Tuple` the slot with bit pattern `b` holds `f_{A'_1…A'_σ}` where `A'_i = o⁻¹(bit i of b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField<R: Real> {
    sigma: usize,
    basis: Basis,
    slots: Vec<ExtForm<R>>,
}

/// Bit pattern of the tuple `(A'_1, …, A'_σ)`.
pub fn tuple_bits(idx: &[Primed]) -> usize {
    idx.iter().enumerate().fold(0, |b, (i, p)| b | (p.o() << i))
}

fn count_ones(b: usize) -> usize {
    b.count_ones() as usize
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn permute_bits(b: usize, positions: &[usize], perm: &[usize]) -> usize {
    let mut out = b;
    for &pos in positions {
        out &= !(1 << pos);
    }
    for (i, &pos) in positions.iter().enumerate() {
        out |= ((b >> positions[perm[i]]) & 1) << pos;
    }
    out
}

impl<R: Real> SpinorField<R> {
    pub fn new(basis: Basis, sigma: usize, slots: Vec<ExtForm<R>>) -> Result<Self> {
        let want = match basis {
            Basis::Tuple => 1usize << sigma,
            _ => sigma + 1,
        };
        if slots.len() != want {
            return Err(CfxError::Dimension(format!("{} slots for sigma = {sigma} in {basis:?} basis", slots.len())));
        }
        let (d, t) = (slots[0].dim(), slots[0].degree());
        if slots.iter().any(|s| s.dim() != d || s.degree() != t) {
            return Err(CfxError::Dimension("slots of mixed form shape".into()));
        }
        Ok(SpinorField { sigma, basis, slots })
    }

    pub fn zero(basis: Basis, sigma: usize, vars: &Arc<Vars>, dim: usize, degree: usize) -> Self {
        let n = match basis {
            Basis::Tuple => 1usize << sigma,
            _ => sigma + 1,
        };
        SpinorField { sigma, basis, slots: vec![ExtForm::zero(vars, dim, degree); n] }
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn slots(&self) -> &[ExtForm<R>] {
        &self.slots
    }

    pub fn slot(&self, a: usize) -> &ExtForm<R> {
        &self.slots[a]
    }

    pub fn slot_mut(&mut self, a: usize) -> &mut ExtForm<R> {
        &mut self.slots[a]
    }

    pub fn dim(&self) -> usize {
        self.slots[0].dim()
    }

    /// Exterior degree τ.
    pub fn degree(&self) -> usize {
        self.slots[0].degree()
    }

    pub fn vars(&self) -> &Arc<Vars> {
        self.slots[0].vars()
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(|s| s.is_zero())
    }

    pub fn map(&self, f: impl Fn(&ExtForm<R>) -> ExtForm<R>) -> Self {
        SpinorField { sigma: self.sigma, basis: self.basis, slots: self.slots.iter().map(f).collect() }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.sigma != other.sigma || self.basis != other.basis {
            return Err(CfxError::Dimension("adding spinor fields of different type".into()));
        }
        let slots = self.slots.iter().zip(&other.slots).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(SpinorField { sigma: self.sigma, basis: self.basis, slots })
    }

    pub fn neg(&self) -> Self {
        self.map(|f| -f)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Averages the tuple entries over all permutations of `positions`.
    pub fn symmetrize_over(&self, positions: &[usize]) -> Result<Self> {
        if self.basis != Basis::Tuple {
            return Err(CfxError::Invalid("symmetrization needs the tuple basis".into()));
        }
        let perms = permutations(positions.len());
        let w = ratio::<R>(1, perms.len() as i64);
        let mut slots = Vec::with_capacity(self.slots.len());
        for b in 0..self.slots.len() {
            let mut acc = ExtForm::zero(self.vars(), self.dim(), self.degree());
            for p in &perms {
                acc = &acc + &self.slots[permute_bits(b, positions, p)];
            }
            slots.push(acc.scale(&w));
        }
        Ok(SpinorField { sigma: self.sigma, basis: Basis::Tuple, slots })
    }

    /// Full symmetrization `f_{(A'_1…A'_σ)}`.
    pub fn symmetrize(&self) -> Result<Self> {
        self.symmetrize_over(&(0..self.sigma).collect::<Vec<_>>())
    }

    /// Symmetrization of a tuple already symmetric in positions `1..σ`, by cyclic placement of
    /// the first index: `f_{(A'_1…A'_σ)} = (1/σ) Σ_s f_{A'_s A'_1…Â'_s…A'_σ}`.
    pub fn symmetrize_first(&self) -> Result<Self> {
        if self.basis != Basis::Tuple {
            return Err(CfxError::Invalid("symmetrization needs the tuple basis".into()));
        }
        if self.sigma == 0 {
            return Ok(self.clone());
        }
        let w = ratio::<R>(1, self.sigma as i64);
        let mut slots = Vec::with_capacity(self.slots.len());
        for b in 0..self.slots.len() {
            let mut acc = ExtForm::zero(self.vars(), self.dim(), self.degree());
            for s in 0..self.sigma {
                // move index s to the front, keeping the others in order
                let bit = (b >> s) & 1;
                let below = b & ((1 << s) - 1);
                let above = b & !((1 << (s + 1)) - 1);
                let moved = bit | (below << 1) | above;
                acc = &acc + &self.slots[moved];
            }
            slots.push(acc.scale(&w));
        }
        Ok(SpinorField { sigma: self.sigma, basis: Basis::Tuple, slots })
    }

    pub fn is_symmetric(&self) -> bool {
        self.basis != Basis::Tuple || self.symmetrize().map(|s| s == *self).unwrap_or(false)
    }

    /// Tuple realization: `f_{𝐀'} = f_a` (S basis) or `f^{𝐀'} = f^a` with `S̃` coefficient `f^a binom(σ,a)`.
    pub fn to_tuple(&self) -> Self {
        match self.basis {
            Basis::Tuple => self.clone(),
            Basis::S => {
                let slots = (0..1usize << self.sigma).map(|b| self.slots[count_ones(b)].clone()).collect();
                SpinorField { sigma: self.sigma, basis: Basis::Tuple, slots }
            }
            Basis::Tilde => {
                let slots = (0..1usize << self.sigma)
                    .map(|b| {
                        let a = count_ones(b);
                        self.slots[a].scale(&ratio(1, binomial(self.sigma, a) as i64))
                    })
                    .collect();
                SpinorField { sigma: self.sigma, basis: Basis::Tuple, slots }
            }
        }
    }

    /// Inverse of [`to_tuple`](Self::to_tuple); the input is symmetrized first.
    pub fn from_tuple(&self, target: Basis) -> Result<Self> {
        if self.basis != Basis::Tuple {
            return Err(CfxError::Invalid("expected tuple basis".into()));
        }
        let sym = self.symmetrize()?;
        let rep = |a: usize| sym.slots[(1usize << a) - 1].clone();
        let slots = match target {
            Basis::Tuple => return Ok(sym),
            Basis::S => (0..=self.sigma).map(rep).collect(),
            Basis::Tilde => {
                (0..=self.sigma).map(|a| rep(a).scale(&int(binomial(self.sigma, a) as i64))).collect()
            }
        };
        Ok(SpinorField { sigma: self.sigma, basis: target, slots })
    }

    /// `∂_{A'}` on an S-basis field.
    pub fn partial(&self, p: Primed) -> Result<Self> {
        if self.basis != Basis::S {
            return Err(CfxError::Invalid("∂_{A'} acts on the S basis".into()));
        }
        if self.sigma == 0 {
            return Err(CfxError::OutOfRange("∂_{A'} on sigma = 0".into()));
        }
        let mut out = SpinorField::zero(Basis::S, self.sigma - 1, self.vars(), self.dim(), self.degree());
        for (a, f) in self.slots.iter().enumerate() {
            if let Some(e) = sym_basis_derivative(a, self.sigma, p)? {
                out.slots[e.a] = &out.slots[e.a] + f;
            }
        }
        Ok(out)
    }

    /// `s_{A'}·` on a tilde-basis field.
    pub fn times_s(&self, p: Primed) -> Result<Self> {
        if self.basis != Basis::Tilde {
            return Err(CfxError::Invalid("s_{A'} acts on the tilde basis".into()));
        }
        let mut out = SpinorField::zero(Basis::Tilde, self.sigma + 1, self.vars(), self.dim(), self.degree());
        for (a, f) in self.slots.iter().enumerate() {
            let e = tilde_basis_multiply(a, self.sigma, p)?;
            out.slots[e.a] = &out.slots[e.a] + f;
        }
        Ok(out)
    }

    /// Reinterprets a `σ = 0` field in another basis (all bases coincide there).
    pub fn rebase_scalar(&self, target: Basis) -> Result<Self> {
        if self.sigma != 0 {
            return Err(CfxError::Invalid("rebasing needs sigma = 0".into()));
        }
        Ok(SpinorField { sigma: 0, basis: target, slots: self.slots.clone() })
    }

    pub fn cast<S: Real>(&self) -> SpinorField<S> {
        SpinorField { sigma: self.sigma, basis: self.basis, slots: self.slots.iter().map(|f| f.cast()).collect() }
    }
}

/// Value of an S- or tilde-basis field with constant 0-form slots as a polynomial in `s^{0'}, s^{1'}`.
pub fn field_symbol_poly(field: &SpinorField<BigRational>) -> Result<Poly<BigRational>> {
    let v = spinor_vars();
    let mut acc = Poly::zero(&v);
    for (a, f) in field.slots().iter().enumerate() {
        if f.degree() != 0 {
            return Err(CfxError::Invalid("symbol polynomial needs 0-forms".into()));
        }
        let c = f
            .component(0)
            .as_constant()
            .ok_or_else(|| CfxError::Invalid("symbol polynomial needs constant slots".into()))?;
        let b = match field.basis() {
            Basis::S => s_basis_poly(&v, a, field.sigma()),
            Basis::Tilde => tilde_basis_poly(&v, a, field.sigma()),
            Basis::Tuple => return Err(CfxError::Invalid("tuple basis has no direct polynomial".into())),
        };
        acc += &b.scale(&c);
    }
    Ok(acc)
}
