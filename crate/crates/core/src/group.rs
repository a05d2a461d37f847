//! Step-two nilpotent groups of rigid quadratic hypersurfaces: structure matrices, right-type
//! classification, horizontal fields, stratification and condition (H).

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CfxError, Result};
use crate::linalg::Matrix;
use crate::op::VectorField;
use crate::poly::{Poly, PolyJson, Vars};
use crate::report::Report;
use crate::scalar::{rational, re, Real};

type Q = BigRational;
pub type QMatrix = Matrix<Q>;

fn small(rows: [[i64; 4]; 4]) -> QMatrix {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rational(v, 1)).collect()).collect())
}

/// The two commuting quaternion tables `I^β` and `J^β` acting on `R^4`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionBasis {
    pub i: [QMatrix; 3],
    pub j: [QMatrix; 3],
}

impl QuaternionBasis {
    pub fn standard() -> Self {
        let i = [
            small([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]),
            small([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]),
            small([[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]]),
        ];
        let j = [
            small([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]),
            small([[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]]),
            small([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]]),
        ];
        QuaternionBasis { i, j }
    }

    /// Literal relations `T^β² = −Id`, `T^1T^2 = T^3` (with cyclic and reversed companions) for
    /// both tables, and `[I^α, J^β] = 0`.
    pub fn relation_failures(&self) -> Vec<String> {
        let mut out = triple_failures("I", &self.i);
        out.extend(triple_failures("J", &self.j));
        for a in 0..3 {
            for b in 0..3 {
                if self.i[a].mul(&self.j[b]) != self.j[b].mul(&self.i[a]) {
                    out.push(format!("[I^{}, J^{}] ≠ 0", a + 1, b + 1));
                }
            }
        }
        out
    }

    /// The same relations for the negated table `−J^β`, i.e. `J^2J^1 = J^3`.
    pub fn reversed_j_failures(&self) -> Vec<String> {
        let neg: [QMatrix; 3] = std::array::from_fn(|b| self.j[b].scale(&rational(-1, 1)));
        triple_failures("−J", &neg)
    }
}

fn triple_failures(name: &str, t: &[QMatrix; 3]) -> Vec<String> {
    let neg_id = QMatrix::identity(4).scale(&rational(-1, 1));
    let mut out = Vec::new();
    for a in 0..3 {
        if t[a].mul(&t[a]) != neg_id {
            out.push(format!("({name}^{})² ≠ −Id", a + 1));
        }
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        if t[a].mul(&t[b]) != t[c] {
            out.push(format!("{name}^{}·{name}^{} ≠ {name}^{}", a + 1, b + 1, c + 1));
        }
        if t[b].mul(&t[a]) != t[c].scale(&rational(-1, 1)) {
            out.push(format!("{name}^{}·{name}^{} ≠ −{name}^{}", b + 1, a + 1, c + 1));
        }
    }
    out
}

/// `diag(T, T, …)` with `n` copies of a 4×4 block.
pub fn block_diag(t: &QMatrix, n: usize) -> QMatrix {
    let mut m = QMatrix::zeros(4 * n, 4 * n);
    for l in 0..n {
        for a in 0..4 {
            for b in 0..4 {
                m.set(4 * l + a, 4 * l + b, t.get(a, b).clone());
            }
        }
    }
    m
}

pub fn block(m: &QMatrix, l: usize, k: usize) -> QMatrix {
    let mut out = QMatrix::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            out.set(a, b, m.get(4 * l + a, 4 * k + b).clone());
        }
    }
    out
}

/// Group `𝒩_𝕊` of the hypersurface `Re q_{n+1} = Σ 𝕊_{jk} x_j x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    pub n: usize,
    pub s: QMatrix,
    pub b: [QMatrix; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PolyJson>,
}

impl GroupSpec {
    pub fn from_s(s: QMatrix) -> Result<Self> {
        if s.rows() != s.cols() || s.rows() == 0 || !s.rows().is_multiple_of(4) {
            return Err(CfxError::Dimension(format!("𝕊 is {}×{}, expected 4n×4n", s.rows(), s.cols())));
        }
        if s != s.transpose() {
            return Err(CfxError::Invalid("𝕊 must be symmetric".into()));
        }
        let n = s.rows() / 4;
        let qb = QuaternionBasis::standard();
        let b = std::array::from_fn(|beta| {
            let ib = block_diag(&qb.i[beta], n);
            s.mul(&ib).add(&ib.mul(&s))
        });
        Ok(GroupSpec { n, s, b })
    }

    /// `𝕊_{jk} = ½ ∂_j ∂_k φ` for a real homogeneous quadratic `φ` in `x_1..x_{4n}`.
    pub fn from_phi(phi: &Poly<Q>) -> Result<Self> {
        let m = phi.vars().len();
        if m == 0 || !m.is_multiple_of(4) {
            return Err(CfxError::Dimension(format!("φ has {m} variables, expected 4n")));
        }
        if !phi.is_zero() && !phi.is_homogeneous(2) {
            return Err(CfxError::Invalid("φ must be a homogeneous quadratic".into()));
        }
        if phi.terms().values().any(|c| !c.im.is_zero()) {
            return Err(CfxError::Invalid("φ must have real coefficients".into()));
        }
        let mut s = QMatrix::zeros(m, m);
        let half = rational(1, 2);
        for j in 0..m {
            for k in 0..m {
                if let Some(c) = phi.diff(j).diff(k).as_constant() {
                    s.set(j, k, c.re * half.clone());
                }
            }
        }
        Self::from_s(s)
    }

    pub fn from_json(v: &GroupJson) -> Result<Self> {
        match (&v.s, &v.phi) {
            (Some(rows), None) => {
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(|x| Q::parse_ratio(x)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                if rows.iter().any(|r| r.len() != rows.len()) {
                    return Err(CfxError::Dimension("𝕊 must be square".into()));
                }
                let g = Self::from_s(Matrix::from_rows(rows))?;
                if let Some(n) = v.n {
                    if n != g.n {
                        return Err(CfxError::Dimension(format!("n = {n} but 𝕊 has size {}", 4 * g.n)));
                    }
                }
                Ok(g)
            }
            (None, Some(p)) => {
                let phi = Poly::from_json(p)?;
                let g = Self::from_phi(&phi)?;
                if let Some(n) = v.n {
                    if n != g.n {
                        return Err(CfxError::Dimension(format!("n = {n} but φ has {} variables", 4 * g.n)));
                    }
                }
                Ok(g)
            }
            _ => Err(CfxError::Parse("group JSON needs exactly one of \"S\" or \"phi\"".into())),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: GroupJson = serde_json::from_str(text).map_err(|e| CfxError::Parse(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> GroupJson {
        let rows = (0..self.s.rows()).map(|i| self.s.row(i).iter().map(|x| x.to_string()).collect()).collect();
        GroupJson { n: Some(self.n), s: Some(rows), phi: None }
    }

    /// `φ = Σ_l (−3x²_{4l+1} + x²_{4l+2} + x²_{4l+3} + x²_{4l+4})`.
    pub fn right_qh(n: usize) -> Self {
        let mut s = QMatrix::zeros(4 * n, 4 * n);
        for l in 0..n {
            for (a, v) in [-3, 1, 1, 1].into_iter().enumerate() {
                s.set(4 * l + a, 4 * l + a, rational(v, 1));
            }
        }
        Self::from_s(s).expect("diagonal 𝕊")
    }

    /// `φ = |𝐪'|²`.
    pub fn left_qh(n: usize) -> Self {
        Self::from_s(QMatrix::identity(4 * n)).expect("identity 𝕊")
    }

    pub fn abelian(n: usize) -> Self {
        Self::from_s(QMatrix::zeros(4 * n, 4 * n)).expect("zero 𝕊")
    }

    pub fn named(name: &str, n: usize) -> Result<Self> {
        match name {
            "rightQH" => Ok(Self::right_qh(n)),
            "leftQH" => Ok(Self::left_qh(n)),
            "abelian" => Ok(Self::abelian(n)),
            _ => Err(CfxError::Invalid(format!("unknown built-in group '{name}'"))),
        }
    }

    /// `φ` as a polynomial in `x_1..x_{4n}` over the given variable table.
    pub fn phi(&self, vars: &Arc<Vars>) -> Poly<Q> {
        let mut p = Poly::zero(vars);
        for j in 0..4 * self.n {
            for k in 0..4 * self.n {
                let c = self.s.get(j, k);
                if !c.is_zero() {
                    p += &(&Poly::var(vars, j) * &Poly::var(vars, k)).scale(&re(c.clone()));
                }
            }
        }
        p
    }

    pub fn s_block(&self, l: usize, m: usize) -> QMatrix {
        block(&self.s, l, m)
    }

    pub fn b_block(&self, beta: usize, l: usize, m: usize) -> QMatrix {
        block(&self.b[beta], l, m)
    }

    /// `B^β = λ B'^β` for a common `λ > 0`.
    pub fn b_proportional_to(&self, other: &[QMatrix; 3]) -> Option<Q> {
        let mut ratio: Option<Q> = None;
        for beta in 0..3 {
            for i in 0..self.b[beta].rows() {
                for j in 0..self.b[beta].cols() {
                    let (x, y) = (self.b[beta].get(i, j), other[beta].get(i, j));
                    match (x.is_zero(), y.is_zero()) {
                        (true, true) => {}
                        (false, false) => {
                            let r = x / y;
                            match &ratio {
                                None => ratio = Some(r),
                                Some(q) if *q == r => {}
                                _ => return None,
                            }
                        }
                        _ => return None,
                    }
                }
            }
        }
        ratio.filter(|r| r.is_positive())
    }
}

/// Position of one block `B^β_{lm}` relative to `span{J^1, J^2, J^3, I_4}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockCertificate {
    pub l: usize,
    pub m: usize,
    pub beta: usize,
    pub in_span: bool,
    /// Coefficients on `J^1, J^2, J^3, I_4`.
    pub coefficients: Vec<String>,
    /// Frobenius-squared norm of the component orthogonal to the span.
    pub residual: String,
}

fn right_span() -> [QMatrix; 4] {
    let qb = QuaternionBasis::standard();
    [qb.j[0].clone(), qb.j[1].clone(), qb.j[2].clone(), QMatrix::identity(4)]
}

fn frobenius(a: &QMatrix, b: &QMatrix) -> Q {
    let mut acc = Q::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a.get(i, j) * b.get(i, j);
        }
    }
    acc
}

/// Solves the 16×4 system `Σ c_i M_i = B_{lm}^β` exactly; the orthogonal residual certifies failures.
pub fn block_certificate(b: &QMatrix, l: usize, m: usize, beta: usize) -> BlockCertificate {
    let span = right_span();
    let mut sys = QMatrix::zeros(16, 4);
    let mut rhs = Vec::with_capacity(16);
    for a in 0..4 {
        for c in 0..4 {
            for (i, mi) in span.iter().enumerate() {
                sys.set(4 * a + c, i, mi.get(a, c).clone());
            }
            rhs.push(b.get(a, c).clone());
        }
    }
    let solved = sys.solve(&rhs);
    // the span elements are mutually orthogonal with norm² 4
    let four = rational(4, 1);
    let coeffs: Vec<Q> = span.iter().map(|mi| frobenius(b, mi) / four.clone()).collect();
    let mut proj = QMatrix::zeros(4, 4);
    for (mi, c) in span.iter().zip(&coeffs) {
        proj = proj.add(&mi.scale(c));
    }
    let resid = b.sub(&proj);
    BlockCertificate {
        l,
        m,
        beta: beta + 1,
        in_span: solved.is_some(),
        coefficients: solved.unwrap_or(coeffs).iter().map(|c| c.to_string()).collect(),
        residual: frobenius(&resid, &resid).to_string(),
    }
}

/// Block-span route: every `B^β_{lm}` lies in `span{J^1, J^2, J^3, I_4}`.
pub fn right_type_certificates(g: &GroupSpec) -> Vec<BlockCertificate> {
    let mut out = Vec::new();
    for l in 0..g.n {
        for m in 0..g.n {
            for beta in 0..3 {
                out.push(block_certificate(&g.b_block(beta, l, m), l, m, beta));
            }
        }
    }
    out
}

pub fn is_right_type(g: &GroupSpec) -> bool {
    right_type_certificates(g).iter().all(|c| c.in_span)
}

/// The four linear forms whose vanishing on every `𝕊^{(lm)}` is `ℰ = 0`.
pub fn e_conditions(s: &QMatrix) -> [Q; 4] {
    let e = |a: usize, b: usize| s.get(a - 1, b - 1).clone();
    [
        e(1, 1) + e(2, 2) + e(3, 3) + e(4, 4),
        e(1, 2) - e(2, 1) + e(3, 4) - e(4, 3),
        e(1, 3) - e(3, 1) - e(2, 4) + e(4, 2),
        e(1, 4) - e(4, 1) + e(2, 3) - e(3, 2),
    ]
}

/// Curvature route: the four conditions hold on every block.
pub fn is_right_type_via_e(g: &GroupSpec) -> bool {
    (0..g.n).all(|l| (0..g.n).all(|m| e_conditions(&g.s_block(l, m)).iter().all(|c| c.is_zero())))
}

/// Entry-wise closed form of `B^1_{lm}` in terms of `𝕊^{(lm)}`.
pub fn b1_closed_form(s: &QMatrix) -> QMatrix {
    let e = |a: usize, b: usize| s.get(a - 1, b - 1).clone();
    Matrix::from_rows(vec![
        vec![e(2, 1) - e(1, 2), e(2, 2) + e(1, 1), e(2, 3) + e(1, 4), e(2, 4) - e(1, 3)],
        vec![-e(1, 1) - e(2, 2), -e(1, 2) + e(2, 1), -e(1, 3) + e(2, 4), -e(1, 4) - e(2, 3)],
        vec![-e(4, 1) - e(3, 2), -e(4, 2) + e(3, 1), -e(4, 3) + e(3, 4), -e(4, 4) - e(3, 3)],
        vec![e(3, 1) - e(4, 2), e(3, 2) + e(4, 1), e(3, 3) + e(4, 4), e(3, 4) - e(4, 3)],
    ])
}

/// Coefficients of `B^β_{lm}` on `J^1, J^2, J^3, I_4` valid when the four conditions hold.
pub fn right_type_expansion(s: &QMatrix) -> [[Q; 4]; 3] {
    let e = |a: usize, b: usize| s.get(a - 1, b - 1).clone();
    [
        [e(1, 1) + e(2, 2), e(1, 4) + e(2, 3), e(2, 4) - e(1, 3), e(2, 1) - e(1, 2)],
        [e(3, 2) - e(1, 4), e(1, 1) + e(3, 3), e(1, 2) + e(3, 4), e(3, 1) - e(1, 3)],
        [e(3, 1) + e(2, 4), e(3, 4) - e(2, 1), e(1, 1) + e(4, 4), e(4, 1) - e(1, 4)],
    ]
}

pub fn expansion_matrix(coeffs: &[Q; 4]) -> QMatrix {
    let span = right_span();
    let mut m = QMatrix::zeros(4, 4);
    for (mi, c) in span.iter().zip(coeffs) {
        m = m.add(&mi.scale(c));
    }
    m
}

/// `X_b = ∂_{x_b} + 2 Σ_β Σ_a (𝕊𝕀^β)_{ab} x_a ∂_{t_β}` on `x_1..x_{4n}, t_1..t_3`.
pub fn horizontal_fields(g: &GroupSpec) -> Vec<VectorField<Q>> {
    let m = 4 * g.n;
    let vars = Vars::group(m);
    let qb = QuaternionBasis::standard();
    let si: Vec<QMatrix> = (0..3).map(|beta| g.s.mul(&block_diag(&qb.i[beta], g.n))).collect();
    (0..m)
        .map(|b| {
            let mut coeffs = vec![Poly::zero(&vars); m + 3];
            coeffs[b] = Poly::one(&vars);
            for (beta, sib) in si.iter().enumerate() {
                let mut c = Poly::zero(&vars);
                for a in 0..m {
                    let v = sib.get(a, b);
                    if !v.is_zero() {
                        c += &Poly::var(&vars, a).scale(&re(v.clone() * rational(2, 1)));
                    }
                }
                coeffs[m + beta] = c;
            }
            VectorField::from_coeffs(&vars, coeffs)
        })
        .collect()
}

/// Checks `[X_a, X_b] = 2 Σ_β B^β_{ab} ∂_{t_β}` for all pairs.
pub fn check_brackets(g: &GroupSpec) -> Report {
    let xs = horizontal_fields(g);
    let m = 4 * g.n;
    let mut r = Report::new("bracket-table", "[X_a, X_b] = 2 B^β_ab ∂_t_β", 0).param("n", g.n);
    for a in 0..m {
        for b in 0..m {
            let lhs = xs[a].bracket(&xs[b]);
            let mut rhs = VectorField::zero(xs[a].vars());
            for beta in 0..3 {
                let v = g.b[beta].get(a, b);
                if !v.is_zero() {
                    rhs = rhs.add(&VectorField::partial(xs[a].vars(), m + beta).scale(&re(v.clone() * rational(2, 1))));
                }
            }
            if lhs != rhs {
                r.fail(format!("[X_{}, X_{}] = {lhs}", a + 1, b + 1));
            }
        }
    }
    r
}

/// `[𝔤_1, 𝔤_1] = 𝔤_2`: the vectors `(B^1_{ab}, B^2_{ab}, B^3_{ab})` span `R^3`.
pub fn is_stratified(g: &GroupSpec) -> bool {
    let m = 4 * g.n;
    let mut mat = QMatrix::zeros(3, m * m);
    for beta in 0..3 {
        for a in 0..m {
            for b in 0..m {
                mat.set(beta, a * m + b, g.b[beta].get(a, b).clone());
            }
        }
    }
    mat.rank() == 3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HMode {
    Exact,
    Sampled,
}

/// Condition (H) outcome: either degenerate at a witness `λ` or nondegenerate on every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionH {
    pub holds_on_grid: bool,
    pub witness: Option<Vec<String>>,
    pub determinant: Option<Poly<Q>>,
    pub samples: usize,
}

impl ConditionH {
    pub fn verdict(&self) -> &'static str {
        if self.holds_on_grid {
            "sampled-true"
        } else {
            "false"
        }
    }
}

/// `det M` for a matrix of polynomials by Laplace expansion over row subsets.
pub fn poly_determinant(m: &[Vec<Poly<Q>>], vars: &Arc<Vars>) -> Poly<Q> {
    let n = m.len();
    if n == 0 {
        return Poly::one(vars);
    }
    let mut dp: Vec<Option<Poly<Q>>> = vec![None; 1 << n];
    dp[0] = Some(Poly::one(vars));
    for mask in 0usize..(1 << n) {
        let Some(cur) = dp[mask].take() else { continue };
        if cur.is_zero() {
            continue;
        }
        let col = mask.count_ones() as usize;
        if col == n {
            dp[mask] = Some(cur);
            continue;
        }
        for r in 0..n {
            if mask & (1 << r) != 0 || m[r][col].is_zero() {
                continue;
            }
            let inversions = (mask >> (r + 1)).count_ones();
            let mut term = &cur * &m[r][col];
            if inversions % 2 == 1 {
                term = -term;
            }
            let next = mask | (1 << r);
            dp[next] = Some(match dp[next].take() {
                Some(p) => &p + &term,
                None => term,
            });
        }
        dp[mask] = Some(cur);
    }
    dp[(1 << n) - 1].take().unwrap_or_else(|| Poly::zero(vars))
}

/// `det(Σ λ_β B^β)` in `λ_1, λ_2, λ_3`.
pub fn h_determinant(g: &GroupSpec) -> Poly<Q> {
    let vars = Vars::new(["l_1", "l_2", "l_3"]);
    let m = 4 * g.n;
    let entries: Vec<Vec<Poly<Q>>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let mut p = Poly::zero(&vars);
                    for beta in 0..3 {
                        let v = g.b[beta].get(a, b);
                        if !v.is_zero() {
                            p += &Poly::var(&vars, beta).scale(&re(v.clone()));
                        }
                    }
                    p
                })
                .collect()
        })
        .collect();
    poly_determinant(&entries, &vars)
}

/// Points of the cube surface `max|λ_i| = 1` on a grid of step `2/res`.
fn cube_grid(res: i64) -> Vec<[Q; 3]> {
    let mut out = Vec::new();
    for a in -res..=res {
        for b in -res..=res {
            for c in -res..=res {
                if a.abs().max(b.abs()).max(c.abs()) == res {
                    out.push([rational(a, res), rational(b, res), rational(c, res)]);
                }
            }
        }
    }
    out
}

fn sphere_grid(res: usize) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    for i in 1..res {
        let th = std::f64::consts::PI * i as f64 / res as f64;
        for j in 0..2 * res {
            let ph = std::f64::consts::PI * j as f64 / res as f64;
            out.push([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
        }
    }
    for e in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] {
        out.push(e);
    }
    out
}

fn f64_det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Non-degeneracy of `B_λ` for `λ ≠ 0`. A zero or a sign change on the grid refutes it; otherwise
/// the verdict is `sampled-true` (no positivity certificate is attempted).
pub fn check_condition_h(g: &GroupSpec, mode: HMode, res: usize) -> ConditionH {
    let res = res.max(2);
    match mode {
        HMode::Exact => {
            let det = h_determinant(g);
            if det.is_zero() {
                return ConditionH {
                    holds_on_grid: false,
                    witness: Some(vec!["1".into(), "0".into(), "0".into()]),
                    determinant: Some(det),
                    samples: 0,
                };
            }
            let pts = cube_grid(res as i64);
            let mut sign = 0i8;
            for p in &pts {
                let v = det.eval(&p.iter().map(|x| re(x.clone())).collect::<Vec<_>>()).re;
                let s = if v.is_zero() { 0 } else if v.is_positive() { 1 } else { -1 };
                let witness = || Some(p.iter().map(|x| x.to_string()).collect());
                if s == 0 || (sign != 0 && s != sign) {
                    return ConditionH { holds_on_grid: false, witness: witness(), determinant: Some(det), samples: pts.len() };
                }
                sign = s;
            }
            ConditionH { holds_on_grid: true, witness: None, determinant: Some(det), samples: pts.len() }
        }
        HMode::Sampled => {
            let m = 4 * g.n;
            let bf: Vec<Vec<Vec<f64>>> = (0..3)
                .map(|beta| {
                    (0..m).map(|a| (0..m).map(|b| g.b[beta].get(a, b).to_f64().unwrap_or(f64::NAN)).collect()).collect()
                })
                .collect();
            let scale = bf.iter().flatten().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
            let pts = sphere_grid(res);
            let tol = 1e-9 * scale.powi(m as i32).max(f64::MIN_POSITIVE);
            let mut sign = 0.0f64;
            for p in &pts {
                let mat: Vec<Vec<f64>> = (0..m)
                    .map(|a| (0..m).map(|b| (0..3).map(|beta| p[beta] * bf[beta][a][b]).sum()).collect())
                    .collect();
                let d = f64_det(mat);
                if d.abs() <= tol || (sign != 0.0 && d.signum() != sign) {
                    return ConditionH {
                        holds_on_grid: false,
                        witness: Some(p.iter().map(|x| format!("{x:.6}")).collect()),
                        determinant: None,
                        samples: pts.len(),
                    };
                }
                sign = d.signum();
            }
            ConditionH { holds_on_grid: true, witness: None, determinant: None, samples: pts.len() }
        }
    }
}

impl ConditionH {
    pub fn to_report(&self, g: &GroupSpec, mode: HMode) -> Report {
        let mut r = Report::new("condition-H", "non-degeneracy of B_λ for λ ≠ 0", 0)
            .param("n", g.n)
            .param("mode", serde_json::to_value(mode).unwrap_or(Value::Null));
        if !self.holds_on_grid {
            r.fail(format!("degenerate at λ = {:?}", self.witness.clone().unwrap_or_default()));
        }
        r.with_details(json!({
            "verdict": self.verdict(),
            "witness": self.witness,
            "samples": self.samples,
            "determinant": self.determinant.as_ref().map(|d| d.to_string()),
        }))
    }
}

/// Full classification of a group.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub n: usize,
    pub right_type: bool,
    #[serde(rename = "right_type_via_E")]
    pub right_type_via_e: bool,
    pub stratified: bool,
    #[serde(rename = "condition_H")]
    pub condition_h: String,
    #[serde(rename = "condition_H_witness")]
    pub condition_h_witness: Option<Vec<String>>,
    pub block_certificates: Vec<BlockCertificate>,
}

impl Classification {
    pub fn consistent(&self) -> bool {
        self.right_type == self.right_type_via_e
    }
}

pub fn classify(g: &GroupSpec, mode: HMode) -> Classification {
    let certs = right_type_certificates(g);
    let h = check_condition_h(g, mode, 8);
    Classification {
        n: g.n,
        right_type: certs.iter().all(|c| c.in_span),
        right_type_via_e: is_right_type_via_e(g),
        stratified: is_stratified(g),
        condition_h: h.verdict().to_string(),
        condition_h_witness: h.witness,
        block_certificates: certs,
    }
}

/// Random symmetric `𝕊` with small rational entries; blocks are pushed into the right-type
/// subspace with probability `1/2` each so both verdicts occur.
pub fn random_s(n: usize, rng: &mut crate::random::TrialRng) -> QMatrix {
    use rand::Rng;
    let m = 4 * n;
    let mut s = QMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = rational(rng.gen_range(-3..=3), rng.gen_range(1..=2));
            s.set(i, j, v.clone());
            s.set(j, i, v);
        }
    }
    for l in 0..n {
        for k in l..n {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let mut blk = block(&s, l, k);
            let e = |b: &QMatrix, x: usize, y: usize| b.get(x - 1, y - 1).clone();
            let tr = e(&blk, 2, 2) + e(&blk, 3, 3) + e(&blk, 4, 4);
            blk.set(0, 0, -tr);
            if l != k {
                let v21 = e(&blk, 1, 2) + e(&blk, 3, 4) - e(&blk, 4, 3);
                blk.set(1, 0, v21);
                let v31 = e(&blk, 1, 3) - e(&blk, 2, 4) + e(&blk, 4, 2);
                blk.set(2, 0, v31);
                let v41 = e(&blk, 1, 4) + e(&blk, 2, 3) - e(&blk, 3, 2);
                blk.set(3, 0, v41);
            }
            for a in 0..4 {
                for b in 0..4 {
                    s.set(4 * l + a, 4 * k + b, blk.get(a, b).clone());
                    s.set(4 * k + b, 4 * l + a, blk.get(a, b).clone());
                }
            }
        }
    }
    s
}

/// `(λ_1² + λ_2² + λ_3²)^e` in the determinant variables.
pub fn lambda_norm_power(e: u32) -> Poly<Q> {
    let vars = Vars::new(["l_1", "l_2", "l_3"]);
    let mut q = Poly::zero(&vars);
    for i in 0..3 {
        q += &(&Poly::var(&vars, i) * &Poly::var(&vars, i));
    }
    q.pow(e)
}
