//! The k-Cauchy-Fueter complex on `H^{n+1}`: `∇` tables, `d^{A'}`, the operators `𝒟_j` in the
//! polynomial and tuple realizations, and symbol sequences.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::json;

use crate::error::{CfxError, Result};
use crate::form::{masks, ExtForm};
use crate::linalg::Matrix;
use crate::op::{quaternionic_rows, PrimedDifferential, VectorField};
use crate::poly::{Poly, Vars};
use crate::report::Report;
use crate::scalar::{ratio, re, Cx, Real};
use crate::spinor::{Basis, Primed, SpinorField};

/// `(n, k)` together with the level table `(σ_j, τ_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexSpec {
    pub n: usize,
    pub k: usize,
}

impl ComplexSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(CfxError::Invalid("n must be at least 1".into()));
        }
        if n > 7 {
            return Err(CfxError::Invalid(format!("n = {n} is beyond the supported range")));
        }
        Ok(ComplexSpec { n, k })
    }

    /// `σ_j = k − j` for `j ≤ k`, `j − k − 1` otherwise.
    pub fn sigma(&self, j: usize) -> usize {
        if j <= self.k {
            self.k - j
        } else {
            j - self.k - 1
        }
    }

    /// `τ_j = j` for `j ≤ k`, `j + 1` otherwise.
    pub fn tau(&self, j: usize) -> usize {
        if j <= self.k {
            j
        } else {
            j + 1
        }
    }

    /// Levels `j = 0..=2n+1`.
    pub fn levels(&self) -> usize {
        2 * self.n + 2
    }

    /// Dimension `2n + 2` of the form space.
    pub fn form_dim(&self) -> usize {
        2 * self.n + 2
    }

    pub fn basis(&self, j: usize) -> Basis {
        if j <= self.k {
            Basis::S
        } else {
            Basis::Tilde
        }
    }

    /// `dim 𝒱_j = (σ_j + 1) · binom(2n+2, τ_j)`.
    pub fn level_dim(&self, j: usize) -> usize {
        (self.sigma(j) + 1) * crate::scalar::binomial(self.form_dim(), self.tau(j)) as usize
    }

    pub fn table(&self) -> Vec<(usize, usize)> {
        (0..self.levels()).map(|j| (self.sigma(j), self.tau(j))).collect()
    }
}

/// The `∇_{ȦA'}` matrix and its raised form on `H^{n+1}`.
#[derive(Debug, Clone)]
pub struct NablaMatrix<R: Real> {
    pub n: usize,
    pub vars: Arc<Vars>,
    pub lowered: PrimedDifferential<R>,
    pub raised: PrimedDifferential<R>,
}

impl<R: Real> NablaMatrix<R> {
    pub fn new(n: usize) -> Self {
        let vars = Vars::xs(4 * (n + 1));
        let fields: Vec<VectorField<R>> = (0..vars.len()).map(|i| VectorField::partial(&vars, i)).collect();
        let (lowered, raised) = quaternionic_rows(&fields);
        NablaMatrix { n, vars, lowered, raised }
    }
}

/// The flat complex for a fixed `(n, k)`.
#[derive(Debug, Clone)]
pub struct FlatComplex<R: Real> {
    pub spec: ComplexSpec,
    pub nabla: NablaMatrix<R>,
}

impl<R: Real> FlatComplex<R> {
    pub fn new(spec: ComplexSpec) -> Self {
        FlatComplex { spec, nabla: NablaMatrix::new(spec.n) }
    }

    pub fn vars(&self) -> &Arc<Vars> {
        &self.nabla.vars
    }

    pub fn d_upper(&self, p: Primed, f: &ExtForm<R>) -> Result<ExtForm<R>> {
        self.nabla.raised.upper(p, f)
    }

    pub fn d_lower(&self, p: Primed, f: &ExtForm<R>) -> Result<ExtForm<R>> {
        self.nabla.raised.lower(p, f)
    }

    fn check_level(&self, j: usize) -> Result<()> {
        if j + 1 >= self.spec.levels() {
            return Err(CfxError::OutOfRange(format!("level {j} outside 0..={}", self.spec.levels() - 2)));
        }
        Ok(())
    }

    fn check_shape(&self, j: usize, f: &SpinorField<R>, basis: Basis) -> Result<()> {
        let s = &self.spec;
        if f.sigma() != s.sigma(j) || f.degree() != s.tau(j) || f.dim() != s.form_dim() || f.basis() != basis {
            return Err(CfxError::Dimension(format!(
                "section (σ={}, τ={}, {:?}) at level {j} expecting (σ={}, τ={}, {:?})",
                f.sigma(),
                f.degree(),
                f.basis(),
                s.sigma(j),
                s.tau(j),
                basis
            )));
        }
        Ok(())
    }

    pub fn zero_section(&self, j: usize) -> SpinorField<R> {
        SpinorField::zero(self.spec.basis(j), self.spec.sigma(j), self.vars(), self.spec.form_dim(), self.spec.tau(j))
    }

    /// `𝒟_j`: `∂_{A'}d^{A'}` for `j < k`, `d^{0'}d^{1'}` for `j = k`, `s_{A'}d^{A'}` for `j > k`.
    pub fn apply_dj(&self, j: usize, f: &SpinorField<R>) -> Result<SpinorField<R>> {
        self.check_level(j)?;
        self.check_shape(j, f, self.spec.basis(j))?;
        let k = self.spec.k;
        let d = |p: Primed| -> Result<SpinorField<R>> {
            let slots = f.slots().iter().map(|s| self.d_upper(p, s)).collect::<Result<Vec<_>>>()?;
            SpinorField::new(f.basis(), f.sigma(), slots)
        };
        if j < k {
            d(Primed::P0)?.partial(Primed::P0)?.try_add(&d(Primed::P1)?.partial(Primed::P1)?)
        } else if j == k {
            let g = self.d_upper(Primed::P0, &self.d_upper(Primed::P1, f.slot(0))?)?;
            SpinorField::new(Basis::Tilde, 0, vec![g])
        } else {
            d(Primed::P0)?.times_s(Primed::P0)?.try_add(&d(Primed::P1)?.times_s(Primed::P1)?)
        }
    }

    /// Tuple realization: `(𝒟f)_{𝐀'} = Σ d^{A'} f_{A'𝐀'}` for `j < k` and
    /// `(𝒟f)^{A'𝐀'} = d^{(A'} f^{𝐀')}` for `j > k`.
    pub fn apply_dj_tuple(&self, j: usize, f: &SpinorField<R>) -> Result<SpinorField<R>> {
        self.check_level(j)?;
        self.check_shape(j, f, Basis::Tuple)?;
        let k = self.spec.k;
        if j == k {
            return Err(CfxError::Invalid("the tuple realization is defined for j ≠ k".into()));
        }
        if j < k {
            let sigma = f.sigma() - 1;
            let slots = (0..1usize << sigma)
                .map(|b| {
                    let a = self.d_upper(Primed::P0, f.slot(b << 1))?;
                    let c = self.d_upper(Primed::P1, f.slot((b << 1) | 1))?;
                    Ok(&a + &c)
                })
                .collect::<Result<Vec<_>>>()?;
            SpinorField::new(Basis::Tuple, sigma, slots)
        } else {
            let sigma = f.sigma() + 1;
            let slots = (0..1usize << sigma)
                .map(|b| self.d_upper(Primed::from_o(b & 1), f.slot(b >> 1)))
                .collect::<Result<Vec<_>>>()?;
            SpinorField::new(Basis::Tuple, sigma, slots)?.symmetrize_first()
        }
    }

    /// `Π̇_j`: tuple realization to the level's polynomial basis.
    pub fn pi_dot(&self, j: usize, tuple: &SpinorField<R>) -> Result<SpinorField<R>> {
        self.check_shape(j, tuple, Basis::Tuple)?;
        tuple.from_tuple(self.spec.basis(j))
    }

    pub fn pi_dot_inv(&self, j: usize, f: &SpinorField<R>) -> Result<SpinorField<R>> {
        self.check_shape(j, f, self.spec.basis(j))?;
        Ok(f.to_tuple())
    }

    /// Flat Laplacian `Σ ∂²_{x_i}` of a polynomial.
    pub fn laplacian(&self, p: &Poly<R>) -> Poly<R> {
        let mut out = Poly::zero(p.vars());
        for i in 0..p.vars().len() {
            out += &p.diff(i).diff(i);
        }
        out
    }
}

/// Coordinates of a level: pairs `(slot a, basis mask)`.
fn level_coords(spec: &ComplexSpec, j: usize) -> Vec<(usize, u32)> {
    let ms = masks(spec.form_dim(), spec.tau(j));
    (0..=spec.sigma(j)).flat_map(|a| ms.iter().map(move |&m| (a, m))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    pub j: usize,
    pub v: Vec<BigRational>,
    pub matrix: Matrix<Cx<BigRational>>,
}

impl FlatComplex<BigRational> {
    /// `σ_j(v)`: `𝒟_j` with `∂_{x_i}` replaced by `v_i` (quadratically at `j = k`).
    pub fn symbol_at(&self, j: usize, v: &[BigRational]) -> Result<SymbolMatrix> {
        self.check_level(j)?;
        let vars = self.vars().clone();
        if v.len() != vars.len() {
            return Err(CfxError::Dimension(format!("v has {} entries, expected {}", v.len(), vars.len())));
        }
        let mut lin = Poly::zero(&vars);
        for (i, vi) in v.iter().enumerate() {
            lin += &Poly::var(&vars, i).scale(&re(vi.clone()));
        }
        // 𝒟_j(L e) = σ_j(v) e for first-order levels; 𝒟_k(L²/2 e) for the second-order one
        let carrier = if j == self.spec.k { (&lin * &lin).scale(&ratio(1, 2)) } else { lin };
        let src = level_coords(&self.spec, j);
        let dst = level_coords(&self.spec, j + 1);
        let mut m = Matrix::zeros(dst.len(), src.len());
        for (c, &(a, mask)) in src.iter().enumerate() {
            let mut f = self.zero_section(j);
            f.slot_mut(a).add_to(mask, carrier.clone());
            let g = self.apply_dj(j, &f)?;
            for (r, &(b, mb)) in dst.iter().enumerate() {
                let p = g.slot(b).component(mb);
                let val = p.as_constant().ok_or_else(|| CfxError::Invalid("non-constant symbol entry".into()))?;
                if !val.re.is_zero() || !val.im.is_zero() {
                    m.set(r, c, val);
                }
            }
        }
        Ok(SymbolMatrix { j, v: v.to_vec(), matrix: m })
    }

    /// Per-level ranks and the identity `rank σ_{j−1} + rank σ_j = dim 𝒱_j` at interior levels.
    pub fn check_exactness(&self, v: &[BigRational]) -> Result<Report> {
        if v.iter().all(|x| x.is_zero()) {
            return Err(CfxError::Invalid("exactness needs v ≠ 0".into()));
        }
        let levels = self.spec.levels();
        let ranks: Vec<usize> = (0..levels - 1)
            .map(|j| self.symbol_at(j, v).map(|s| s.matrix.rank()))
            .collect::<Result<_>>()?;
        let dims: Vec<usize> = (0..levels).map(|j| self.spec.level_dim(j)).collect();
        let mut r = Report::new("symbol-exactness", "symbol sequence exactness", 0)
            .param("n", self.spec.n)
            .param("k", self.spec.k)
            .param("v", v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        let mut per_level = Vec::new();
        // exactness at 𝒱_j for interior j, injectivity at 𝒱_0, surjectivity onto the last level
        for j in 0..levels {
            let incoming = if j == 0 { 0 } else { ranks[j - 1] };
            let outgoing = if j + 1 == levels { 0 } else { ranks[j] };
            let exact = incoming + outgoing == dims[j];
            per_level.push(json!({"level": j, "dim": dims[j], "rank_in": incoming, "rank_out": outgoing, "exact": exact}));
            if !exact {
                r.fail(format!("level {j}: {incoming} + {outgoing} != {}", dims[j]));
            }
        }
        for j in 0..levels.saturating_sub(2) {
            let a = self.symbol_at(j, v)?.matrix;
            let b = self.symbol_at(j + 1, v)?.matrix;
            if !b.mul(&a).is_zero() {
                r.fail(format!("σ_{}σ_{} ≠ 0", j + 1, j));
            }
        }
        Ok(r.with_details(json!({"dims": dims, "ranks": ranks, "levels": per_level})))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_field, random_form, random_poly, rng, PolyGen};
    use crate::scalar::{int, rational};

    type Q = BigRational;

    #[test]
    fn level_table() {
        let s = ComplexSpec::new(1, 1).unwrap();
        assert_eq!(s.table(), vec![(1, 0), (0, 1), (0, 3), (1, 4)]);
        let dims: Vec<usize> = (0..4).map(|j| s.level_dim(j)).collect();
        assert_eq!(dims, vec![2, 4, 4, 2]);
        assert!(ComplexSpec::new(0, 1).is_err());
    }

    #[test]
    fn nabla_rows_follow_the_pattern() {
        let nb = NablaMatrix::<Q>::new(1);
        let v = nb.vars.clone();
        let i = crate::scalar::imag_unit::<Q>();
        let row0 = &nb.lowered.rows()[0];
        assert_eq!(row0[0], VectorField::constant(&v, &[(0, int(1)), (1, i.clone())]));
        assert_eq!(row0[1], VectorField::constant(&v, &[(2, int(-1)), (3, -i.clone())]));
        // raised row 2l: (−∂_3 − i∂_4, −∂_1 − i∂_2); raised row 2l+1: (∂_1 − i∂_2, −∂_3 + i∂_4)
        let r = nb.raised.rows();
        assert_eq!(r[0][0], VectorField::constant(&v, &[(2, int(-1)), (3, -i.clone())]));
        assert_eq!(r[0][1], VectorField::constant(&v, &[(0, int(-1)), (1, -i.clone())]));
        assert_eq!(r[1][0], VectorField::constant(&v, &[(0, int(1)), (1, -i.clone())]));
        assert_eq!(r[1][1], VectorField::constant(&v, &[(2, int(-1)), (3, i)]));
    }

    #[test]
    fn d_upper_example() {
        let fc = FlatComplex::<Q>::new(ComplexSpec::new(1, 0).unwrap());
        let v = fc.vars().clone();
        let f = ExtForm::basis(&v, 4, &[0], Poly::var(&v, 0)).unwrap();
        let expect = ExtForm::basis(&v, 4, &[0, 1], Poly::constant(&v, int(-1))).unwrap();
        assert_eq!(fc.d_upper(Primed::P0, &f).unwrap(), expect);
        let c = ExtForm::scalar(4, Poly::constant(&v, int(5)));
        assert!(fc.d_upper(Primed::P0, &c).unwrap().is_zero());
        let wrong = ExtForm::scalar(2, Poly::var(&v, 0));
        assert!(fc.d_upper(Primed::P0, &wrong).is_err());
    }

    #[test]
    fn d_squares_vanish_and_anticommute() {
        let fc = FlatComplex::<Q>::new(ComplexSpec::new(1, 0).unwrap());
        let g = PolyGen::with_degree(3);
        for seed in 0..5 {
            let f = random_form(fc.vars(), 4, 1, &mut rng(seed), &g);
            for p in Primed::ALL {
                assert!(fc.d_upper(p, &fc.d_upper(p, &f).unwrap()).unwrap().is_zero());
            }
            let a = fc.d_upper(Primed::P0, &fc.d_upper(Primed::P1, &f).unwrap()).unwrap();
            let b = fc.d_upper(Primed::P1, &fc.d_upper(Primed::P0, &f).unwrap()).unwrap();
            assert!((&a + &b).is_zero());
        }
    }

    #[test]
    fn leibniz_rule() {
        let fc = FlatComplex::<Q>::new(ComplexSpec::new(1, 0).unwrap());
        let g = PolyGen::with_degree(2);
        let mut r = rng(11);
        for tau in 0..3 {
            let f = random_form(fc.vars(), 4, tau, &mut r, &g);
            let h = random_form(fc.vars(), 4, 1, &mut r, &g);
            for p in Primed::ALL {
                let lhs = fc.d_upper(p, &f.wedge(&h).unwrap()).unwrap();
                let a = fc.d_upper(p, &f).unwrap().wedge(&h).unwrap();
                let b = f.wedge(&fc.d_upper(p, &h).unwrap()).unwrap();
                let rhs = if tau % 2 == 0 { &a + &b } else { &a - &b };
                assert!((&lhs - &rhs).is_zero());
            }
        }
    }

    #[test]
    fn d0_on_square_for_k0() {
        // 𝒟_0 u = d^{0'}d^{1'}u with u = x_1², expanded by hand from the raised rows
        let fc = FlatComplex::<Q>::new(ComplexSpec::new(1, 0).unwrap());
        let v = fc.vars().clone();
        let u = &Poly::var(&v, 0) * &Poly::var(&v, 0);
        let f = SpinorField::new(Basis::S, 0, vec![ExtForm::scalar(4, u)]).unwrap();
        let out = fc.apply_dj(0, &f).unwrap();
        // d^{1'}u = −2x_1 ω^0 (row 0 entry −∂_1 − i∂_2); d^{0'} of that: Z_1^{0'} = ∂_1 − i∂_2 hits x_1
        // giving −2 ω^1∧ω^0 = 2 ω^{01}
        let expect = ExtForm::basis(&v, 4, &[0, 1], Poly::constant(&v, int(2))).unwrap();
        assert_eq!(out.slot(0), &expect);
        assert_eq!(out.sigma(), 0);
        assert_eq!(out.degree(), 2);
    }

    #[test]
    fn complex_law_n1_k2() {
        let spec = ComplexSpec::new(1, 2).unwrap();
        let fc = FlatComplex::<Q>::new(spec);
        let g = PolyGen::with_degree(3);
        for j in 0..spec.levels() - 2 {
            let f = random_field(spec.basis(j), spec.sigma(j), fc.vars(), 4, spec.tau(j), &mut rng(j as u64), &g);
            let out = fc.apply_dj(j + 1, &fc.apply_dj(j, &f).unwrap()).unwrap();
            assert!(out.is_zero(), "level {j}");
        }
    }

    #[test]
    fn tuple_realization_agrees() {
        let g = PolyGen::with_degree(3);
        for (k, levels) in [(2usize, vec![0usize, 1]), (0, vec![1, 2])] {
            let spec = ComplexSpec::new(1, k).unwrap();
            let fc = FlatComplex::<Q>::new(spec);
            for j in levels {
                let t = random_field(Basis::Tuple, spec.sigma(j), fc.vars(), 4, spec.tau(j), &mut rng(40 + j as u64), &g);
                let lhs = fc.pi_dot(j + 1, &fc.apply_dj_tuple(j, &t).unwrap()).unwrap();
                let rhs = fc.apply_dj(j, &fc.pi_dot(j, &t).unwrap()).unwrap();
                assert_eq!(lhs, rhs, "k {k} level {j}");
                assert_eq!(fc.pi_dot_inv(j, &fc.pi_dot(j, &t).unwrap()).unwrap(), t);
            }
        }
    }

    #[test]
    fn tuple_example_k2_j0() {
        let spec = ComplexSpec::new(1, 2).unwrap();
        let fc = FlatComplex::<Q>::new(spec);
        let v = fc.vars().clone();
        let mut f = SpinorField::zero(Basis::Tuple, 2, &v, 4, 0);
        *f.slot_mut(0) = ExtForm::scalar(4, Poly::var(&v, 0));
        let out = fc.apply_dj_tuple(0, &f).unwrap();
        assert_eq!(out.slot(0), &fc.d_upper(Primed::P0, f.slot(0)).unwrap());
        assert!(fc.apply_dj_tuple(2, &fc.zero_section(2)).is_err());
    }

    #[test]
    fn symbol_e1_example() {
        let fc = FlatComplex::<Q>::new(ComplexSpec::new(1, 1).unwrap());
        let mut v = vec![rational(0, 1); 8];
        v[0] = rational(1, 1);
        let ranks: Vec<usize> = (0..3).map(|j| fc.symbol_at(j, &v).unwrap().matrix.rank()).collect();
        assert_eq!(ranks, vec![2, 2, 2]);
        let rep = fc.check_exactness(&v).unwrap();
        assert!(rep.pass, "{}", rep.residual);
        let zero = vec![rational(0, 1); 8];
        assert!(fc.check_exactness(&zero).is_err());
        assert!(fc.symbol_at(0, &zero).unwrap().matrix.is_zero());
    }

    #[test]
    fn exactness_k0_diagonal_direction() {
        let fc = FlatComplex::<Q>::new(ComplexSpec::new(1, 0).unwrap());
        let mut v = vec![rational(0, 1); 8];
        v[0] = rational(1, 1);
        v[1] = rational(1, 1);
        assert!(fc.check_exactness(&v).unwrap().pass);
    }

    #[test]
    fn closed_sections_are_harmonic() {
        // solve 𝒟_0 f = 0 over homogeneous quadratics for n = 1, k = 1 and check Δ f_a = 0
        let spec = ComplexSpec::new(1, 1).unwrap();
        let fc = FlatComplex::<Q>::new(spec);
        let v = fc.vars().clone();
        let mut monos = Vec::new();
        for a in 0..8 {
            for b in a..8 {
                let mut e = vec![0u8; 8];
                e[a] += 1;
                e[b] += 1;
                monos.push(e);
            }
        }
        let unknowns: Vec<(usize, &Vec<u8>)> = (0..2).flat_map(|s| monos.iter().map(move |m| (s, m))).collect();
        let images: Vec<SpinorField<Q>> = unknowns
            .iter()
            .map(|(s, e)| {
                let mut f = fc.zero_section(0);
                *f.slot_mut(*s) = ExtForm::scalar(4, Poly::monomial(&v, (*e).clone(), int(1)));
                fc.apply_dj(0, &f).unwrap()
            })
            .collect();
        let mut keys = std::collections::BTreeSet::new();
        for img in &images {
            for (m, p) in img.slot(0).components() {
                for e in p.terms().keys() {
                    keys.insert((*m, e.clone()));
                }
            }
        }
        let keys: Vec<_> = keys.into_iter().collect();
        let mut mat = Matrix::zeros(keys.len(), unknowns.len());
        for (c, img) in images.iter().enumerate() {
            for (m, p) in img.slot(0).components() {
                for (e, val) in p.terms() {
                    let r = keys.iter().position(|k| k.0 == *m && &k.1 == e).unwrap();
                    mat.set(r, c, val.clone());
                }
            }
        }
        let kernel = mat.kernel();
        assert!(!kernel.is_empty());
        for vec in kernel {
            let mut f = fc.zero_section(0);
            for (c, (s, e)) in unknowns.iter().enumerate() {
                if !vec[c].re.is_zero() || !vec[c].im.is_zero() {
                    let t = ExtForm::scalar(4, Poly::monomial(&v, (*e).clone(), vec[c].clone()));
                    *f.slot_mut(*s) = f.slot(*s) + &t;
                }
            }
            assert!(fc.apply_dj(0, &f).unwrap().is_zero());
            for a in 0..2 {
                assert!(fc.laplacian(&f.slot(a).component(0)).is_zero());
            }
        }
        let _ = random_poly::<Q>(&v, &mut rng(0), &PolyGen::default());
    }
}
