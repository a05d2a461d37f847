//! Quaternionic Monge-Ampère operator on right-type groups.

use std::sync::Arc;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde_json::json;

use crate::boundary::TangentFrame;
use crate::error::{CfxError, Result};
use crate::form::ExtForm;
use crate::poly::{Poly, Vars};
use crate::quadrature::{integrate_face, integrate_jet, integrate_poly, JetVars, Region, SeparableCutoff};
use crate::random::{derive_seed, rng, TrialRng};
use crate::report::Report;
use crate::scalar::{fmt_cx, int, Cx};
use crate::spinor::Primed;

type Q = BigRational;
type Form = ExtForm<Q>;

fn require_right_type(frame: &TangentFrame) -> Result<()> {
    if frame.is_right_type() {
        Ok(())
    } else {
        Err(CfxError::Precondition("the Monge-Ampère operator needs a right-type group (curvature form is nonzero)".into()))
    }
}

/// `𝔡_{0'}𝔡_{1'}` applied to a form.
pub fn triangle_form(frame: &TangentFrame, f: &Form) -> Result<Form> {
    frame.frak_d_lower(Primed::P0, &frame.frak_d_lower(Primed::P1, f)?)
}

/// `△u = 𝔡_{0'}𝔡_{1'}u`.
pub fn triangle(frame: &TangentFrame, u: &Poly<Q>) -> Result<Form> {
    require_right_type(frame)?;
    triangle_form(frame, &ExtForm::scalar(frame.dim(), u.clone()))
}

/// `β_n = Σ_l ω^{2l}∧ω^{2l+1}`.
pub fn beta(vars: &Arc<Vars>, n: usize) -> Form {
    let mut f = ExtForm::zero(vars, 2 * n, 2);
    for l in 0..n {
        f = &f + &ExtForm::basis(vars, 2 * n, &[2 * l, 2 * l + 1], Poly::one(vars)).expect("valid indices");
    }
    f
}

pub fn wedge_all(vars: &Arc<Vars>, dim: usize, fs: &[Form]) -> Result<Form> {
    let mut acc = ExtForm::scalar(dim, Poly::one(vars));
    for f in fs {
        acc = acc.wedge(f)?;
    }
    Ok(acc)
}

pub fn beta_power(vars: &Arc<Vars>, n: usize, p: usize) -> Form {
    wedge_all(vars, 2 * n, &vec![beta(vars, n); p]).expect("degrees fit")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaPower {
    pub form: Form,
    pub notice: Option<String>,
}

/// `△u_1∧…∧△u_p`; for `p > n` the zero form with a notice.
pub fn ma_power(frame: &TangentFrame, us: &[Poly<Q>]) -> Result<MaPower> {
    require_right_type(frame)?;
    let n = frame.n();
    if us.len() > n {
        return Ok(MaPower {
            form: ExtForm::zero(&frame.vars, frame.dim(), frame.dim()),
            notice: Some(format!("p = {} exceeds n = {n}; the wedge vanishes", us.len())),
        });
    }
    let ts = us.iter().map(|u| triangle(frame, u)).collect::<Result<Vec<_>>>()?;
    Ok(MaPower { form: wedge_all(&frame.vars, frame.dim(), &ts)?, notice: None })
}

/// Compares `△u_1∧R`, `𝔡_{0'}(𝔡_{1'}u_1∧R)`, `−𝔡_{1'}(𝔡_{0'}u_1∧R)`, `𝔡_{0'}𝔡_{1'}(u_1R)` and
/// `−𝔡_{1'}𝔡_{0'}(u_1R)` with `R = △u_2∧…∧△u_p`, plus closedness `𝔡_{A'}△u_i = 0`.
pub fn key_identity_check(frame: &TangentFrame, us: &[Poly<Q>], seed: u64) -> Result<Report> {
    require_right_type(frame)?;
    if us.is_empty() || us.len() > frame.n() {
        return Err(CfxError::Invalid(format!("need 1 ≤ p ≤ n = {} functions", frame.n())));
    }
    let dim = frame.dim();
    let mut r = Report::new("key-identity", "wedge of triangles equals d0'(d1'u1 ^ R) = -d1'(d0'u1 ^ R) = d0'd1'(u1 R)", seed)
        .param("n", frame.n())
        .param("p", us.len());
    let ts = us.iter().map(|u| triangle(frame, u)).collect::<Result<Vec<_>>>()?;
    for (i, t) in ts.iter().enumerate() {
        for p in Primed::ALL {
            let c = frame.frak_d_lower(p, t)?;
            if !c.is_zero() {
                r.fail(format!("d_{}' triangle(u_{}) = {c}", p.o(), i + 1));
            }
        }
    }
    let rest = wedge_all(&frame.vars, dim, &ts[1..])?;
    let u1 = ExtForm::scalar(dim, us[0].clone());
    let d = |p: Primed, f: &Form| frame.frak_d_lower(p, f);
    let e0 = ts[0].wedge(&rest)?;
    let e1 = d(Primed::P0, &d(Primed::P1, &u1)?.wedge(&rest)?)?;
    let e2 = -d(Primed::P1, &d(Primed::P0, &u1)?.wedge(&rest)?)?;
    let u1r = u1.wedge(&rest)?;
    let e3 = d(Primed::P0, &d(Primed::P1, &u1r)?)?;
    let e4 = -d(Primed::P1, &d(Primed::P0, &u1r)?)?;
    for (name, e) in [("d0'(d1'u1 ^ R)", &e1), ("-d1'(d0'u1 ^ R)", &e2), ("d0'd1'(u1 R)", &e3), ("-d1'd0'(u1 R)", &e4)] {
        let diff = e - &e0;
        if !diff.is_zero() {
            r.fail(format!("{name} differs: {diff}"));
        }
    }
    Ok(r.with_details(json!({"value": e0.to_string()})))
}

/// `∫_Ω F = ∫_Ω f dV` for `F = f Ω_{2n}`.
pub fn integrate_top(f: &Form, region: &Region) -> Result<Complex<f64>> {
    integrate_poly(&f.top_coefficient()?, region)
}

/// `T_A` with `T = Σ_A T_A ω^{Â}` and `ω^{Â} = ω^A ⌋ Ω_{2n} = (−1)^A ω^0∧…ω^{A−1}∧ω^{A+1}…`.
pub fn hat_components(t: &Form) -> Result<Vec<Poly<Q>>> {
    let dim = t.dim();
    if t.degree() + 1 != dim {
        return Err(CfxError::Dimension(format!("expected a form of degree {}", dim - 1)));
    }
    Ok((0..dim)
        .map(|a| {
            let idx: Vec<usize> = (0..dim).filter(|&b| b != a).collect();
            let c = t.component_at(&idx);
            if a % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect())
}

fn rel_residual(a: Complex<f64>, b: Complex<f64>, scale: f64) -> f64 {
    let s = scale.max(a.norm()).max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// `∫h𝔡^{A'}T + ∫𝔡^{A'}h∧T = Σ_A ∫_{∂Ω} hT_A Z_A^{A'}ρ dS` on a box, with `ρ = ±(x_i − c)` per face.
pub fn stokes_check(frame: &TangentFrame, h: &Poly<Q>, t: &Form, region: &Region, p: Primed, tol: f64) -> Result<Report> {
    let dim = frame.dim();
    if region.dim() != frame.vars.len() {
        return Err(CfxError::Dimension(format!("region must have dimension {}", frame.vars.len())));
    }
    let hf = ExtForm::scalar(dim, h.clone());
    let interior_a = integrate_top(&hf.wedge(&frame.frak_d(p, t)?)?, region)?;
    let interior_b = integrate_top(&frame.frak_d(p, &hf)?.wedge(t)?, region)?;
    let ta = hat_components(t)?;
    let mut boundary = Complex::new(0.0, 0.0);
    // sum of face magnitudes, the scale when the terms cancel
    let mut face_scale = 0.0;
    for (a, ta) in ta.iter().enumerate() {
        if ta.is_zero() {
            continue;
        }
        let z = frame.raised.entry(a, p);
        let g = h * ta;
        for axis in 0..region.dim() {
            let c = z.coeff(axis);
            if c.is_zero() {
                continue;
            }
            let integrand = &g * c;
            let hi = integrate_face(&integrand, region, axis, region.hi[axis])?;
            let lo = integrate_face(&integrand, region, axis, region.lo[axis])?;
            face_scale += hi.norm() + lo.norm();
            boundary += hi - lo;
        }
    }
    let lhs = interior_a + interior_b;
    let residual = rel_residual(lhs, boundary, interior_a.norm().max(interior_b.norm()).max(face_scale));
    let mut r = Report::new("stokes", "int h d^A' T + int d^A' h ^ T = boundary integral of h T_A Z_A^A' rho", 0)
        .param("primed", p.o())
        .param("tolerance", tol);
    if residual > tol || !residual.is_finite() {
        r.fail(format!("{residual:e}"));
    } else {
        r.residual = format!("{residual:e}");
    }
    Ok(r.with_details(json!({
        "int_h_dT": [interior_a.re, interior_a.im],
        "int_dh_T": [interior_b.re, interior_b.im],
        "boundary": [boundary.re, boundary.im],
        "relative_residual": residual,
    })))
}

/// Right `ℍ`-linear `η: ℍ^n → ℍ`, `η(q) = Σ_l a_l q_l`, stored as real quaternion coefficients
/// `a_l = (a_0, a_1, a_2, a_3)`; acts on `x_{4l+1..4l+4}` by `a_0 I_4 + Σ_β a_β J^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct RightLinearMap {
    pub blocks: Vec<[Q; 4]>,
}

impl RightLinearMap {
    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn coordinate(n: usize, l: usize) -> Self {
        let blocks = (0..n).map(|m| std::array::from_fn(|c| if m == l && c == 0 { Q::from_integer(1.into()) } else { Q::zero() })).collect();
        RightLinearMap { blocks }
    }

    pub fn random(n: usize, rng: &mut TrialRng, range: i64) -> Self {
        loop {
            let blocks: Vec<[Q; 4]> =
                (0..n).map(|_| std::array::from_fn(|_| Q::from_integer(rng.gen_range(-range..=range).into()))).collect();
            if blocks.iter().any(|b| b.iter().any(|c| !c.is_zero())) {
                return RightLinearMap { blocks };
            }
        }
    }

    /// Real `4 × 4n` matrix `L` with `y = Lx`.
    pub fn real_matrix(&self) -> Vec<Vec<Q>> {
        let qb = crate::group::QuaternionBasis::standard();
        let mut rows = vec![vec![Q::zero(); 4 * self.n()]; 4];
        for (l, a) in self.blocks.iter().enumerate() {
            for (c, row) in rows.iter_mut().enumerate() {
                for b in 0..4 {
                    let mut v = if c == b { a[0].clone() } else { Q::zero() };
                    for beta in 0..3 {
                        v += &a[beta + 1] * qb.j[beta].get(c, b);
                    }
                    row[4 * l + b] = v;
                }
            }
        }
        rows
    }

    /// `M` with `η^*ω̃^Ã = Σ_A M_{ÃA} ω^A`; block `l` is `[[a_0 + ia_1, a_2 − ia_3], [−a_2 − ia_3, a_0 − ia_1]]`.
    pub fn pullback_matrix(&self) -> [Vec<Cx<Q>>; 2] {
        let mut m0 = Vec::new();
        let mut m1 = Vec::new();
        for a in &self.blocks {
            let c = |re: &Q, im: &Q| Cx::new(re.clone(), im.clone());
            m0.push(c(&a[0], &a[1]));
            m0.push(c(&a[2], &-a[3].clone()));
            m1.push(c(&-a[2].clone(), &-a[3].clone()));
            m1.push(c(&a[0], &-a[1].clone()));
        }
        [m0, m1]
    }

    /// `(η^*ω̃^0, η^*ω̃^1)`.
    pub fn pullback(&self, vars: &Arc<Vars>) -> [Form; 2] {
        let dim = 2 * self.n();
        self.pullback_matrix().map(|row| {
            let mut f = ExtForm::zero(vars, dim, 1);
            for (a, c) in row.iter().enumerate() {
                f = &f + &ExtForm::basis(vars, dim, &[a], Poly::constant(vars, c.clone())).expect("index");
            }
            f
        })
    }

    /// `|η(q)|² = Σ_c (Lx)_c²` in the first `4n` variables.
    pub fn norm_squared(&self, vars: &Arc<Vars>) -> Poly<Q> {
        let mut u = Poly::zero(vars);
        for row in self.real_matrix() {
            let mut y = Poly::zero(vars);
            for (b, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    y += &Poly::var(vars, b).scale(&Cx::new(c.clone(), Q::zero()));
                }
            }
            u += &(&y * &y);
        }
        u
    }
}

/// `η_1^*ω̃^0∧η_1^*ω̃^1∧…∧η_p^*ω̃^0∧η_p^*ω̃^1`.
pub fn elementary_positive(vars: &Arc<Vars>, n: usize, maps: &[RightLinearMap]) -> Form {
    let mut acc = ExtForm::scalar(2 * n, Poly::one(vars));
    for m in maps {
        let [a, b] = m.pullback(vars);
        acc = acc.wedge(&a).and_then(|x| x.wedge(&b)).expect("degrees fit");
    }
    acc
}

/// Elementary strongly positive `2p`-forms from sampled right-linear maps.
#[derive(Debug, Clone)]
pub struct PositiveConeSample {
    pub p: usize,
    pub maps: Vec<Vec<RightLinearMap>>,
    pub generators: Vec<Form>,
}

impl PositiveConeSample {
    pub fn sample(vars: &Arc<Vars>, n: usize, p: usize, count: usize, seed: u64) -> Self {
        let mut maps = Vec::new();
        let mut generators = Vec::new();
        for s in 0..count {
            let mut r = rng(derive_seed(seed, &[s as u64]));
            let ms: Vec<RightLinearMap> = (0..p).map(|_| RightLinearMap::random(n, &mut r, 3)).collect();
            generators.push(elementary_positive(vars, n, &ms));
            maps.push(ms);
        }
        PositiveConeSample { p, maps, generators }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Positivity {
    PositiveOnSamples { samples: usize },
    NotPositive { sample: usize, witness: String },
}

impl Positivity {
    pub fn verdict(&self) -> &'static str {
        match self {
            Positivity::PositiveOnSamples { .. } => "positive-on-samples",
            Positivity::NotPositive { .. } => "not-positive",
        }
    }
}

/// Wedges a constant `2p`-form with sampled elementary strongly positive `(2n−2p)`-forms and looks
/// for a coefficient of `Ω_{2n}` that is not a nonnegative real. A semi-decision, not a proof.
pub fn positivity_check(f: &Form, samples: usize, seed: u64) -> Result<Positivity> {
    let dim = f.dim();
    if !dim.is_multiple_of(2) || !f.degree().is_multiple_of(2) {
        return Err(CfxError::Dimension("need an even form over C^{2n}".into()));
    }
    if f.components().values().any(|c| c.as_constant().is_none()) {
        return Err(CfxError::Invalid("positivity check needs constant coefficients".into()));
    }
    let (n, p) = (dim / 2, f.degree() / 2);
    let count = if p == n { 1 } else { samples.max(1) };
    let cone = PositiveConeSample::sample(f.vars(), n, n - p, count, seed);
    for (s, g) in cone.generators.iter().enumerate() {
        let c = f.wedge(g)?.top_coefficient()?.as_constant().unwrap_or_else(|| int(0));
        if !c.im.is_zero() || c.re < Q::zero() {
            let eta = if p == n { "1".to_string() } else { format!("sample {s}") };
            return Ok(Positivity::NotPositive { sample: s, witness: format!("eta = {eta}: coefficient {}", fmt_cx(&c)) });
        }
    }
    Ok(Positivity::PositiveOnSamples { samples: count })
}

/// `Σ_r |η_r(q)|²` over `rank` random right-linear maps: plurisubharmonic, `△u` strongly positive.
pub fn random_psh_quadratic(vars: &Arc<Vars>, n: usize, rank: usize, rng: &mut TrialRng) -> Poly<Q> {
    let mut u = Poly::zero(vars);
    for _ in 0..rank {
        u += &RightLinearMap::random(n, rng, 2).norm_squared(vars);
    }
    u
}

/// `Σ_{a ≤ 4n} x_a²`.
pub fn norm_squared(vars: &Arc<Vars>, n: usize) -> Poly<Q> {
    let mut u = Poly::zero(vars);
    for a in 0..4 * n {
        u += &(&Poly::var(vars, a) * &Poly::var(vars, a));
    }
    u
}

/// Sampled `sup_K |u|` on a tensor grid with `points` nodes per axis (endpoints included).
pub fn sup_norm(u: &Poly<Q>, region: &Region, points: usize) -> f64 {
    let d = region.dim();
    let pts = points.max(2);
    let uf: Poly<f64> = u.cast();
    let mut idx = vec![0usize; d];
    let mut best = 0.0f64;
    loop {
        let x: Vec<f64> = (0..d).map(|i| region.lo[i] + (region.hi[i] - region.lo[i]) * idx[i] as f64 / (pts - 1) as f64).collect();
        best = best.max(uf.eval_f64(&x).norm());
        let mut k = 0;
        while k < d {
            idx[k] += 1;
            if idx[k] < pts {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            return best;
        }
    }
}

/// Outcome of the Chern-Levine-Nirenberg experiment.
#[derive(Debug, Clone)]
pub struct ClnOutcome {
    pub mass_direct: f64,
    pub mass_by_parts: [f64; 2],
    pub mass_ibp: f64,
    pub mass_l: f64,
    pub sup_norms: Vec<f64>,
    pub empirical_c: f64,
    pub relative_disagreement: f64,
}

/// With `R = △u_2∧…∧△u_p∧β_n^{n−p}` and the product cutoff `χ` on `K`, evaluates
/// `∫χ△u_1∧R`, `−∫𝔡_{0'}χ∧𝔡_{1'}u_1∧R`, `−∫u_1𝔡_{1'}𝔡_{0'}χ∧R`, `∫u_1△χ∧R` by quadrature,
/// together with `‖△u_1∧…∧△u_p‖_L` and its ratio to `Π sup_K|u_i|`.
pub fn cln_experiment(frame: &TangentFrame, us: &[Poly<Q>], k: &Region, l: &Region, sup_points: usize) -> Result<ClnOutcome> {
    require_right_type(frame)?;
    let n = frame.n();
    let p = us.len();
    if p == 0 || p > n {
        return Err(CfxError::Invalid(format!("need 1 ≤ p ≤ n = {n} functions")));
    }
    if !k.contains_strictly(l) || k.dim() != frame.vars.len() {
        return Err(CfxError::Invalid("L must lie in the interior of K, both of group dimension".into()));
    }
    let dim = frame.dim();
    let ts = us.iter().map(|u| triangle(frame, u)).collect::<Result<Vec<_>>>()?;
    let mut rest_parts = ts[1..].to_vec();
    rest_parts.extend(std::iter::repeat_n(beta(&frame.vars, n), n - p));
    let rest = wedge_all(&frame.vars, dim, &rest_parts)?;
    let mass_l = integrate_top(&ts[0].wedge(&rest)?, l)?.re;

    let jets = JetVars::new(&frame.vars);
    let chi = SeparableCutoff::bump(k);
    let rows: Vec<[crate::op::VectorField<Q>; 2]> =
        frame.raised.rows().iter().map(|[a, b]| [jets.prolong(a), jets.prolong(b)]).collect();
    let ext = crate::op::PrimedDifferential::new(rows);
    let base_map: Vec<usize> = (0..frame.vars.len()).collect();
    let lift = |f: &Form| f.relabel(&jets.vars, &base_map);
    let rest_j = lift(&rest);
    let chi_f = ExtForm::scalar(dim, jets.chi());
    let u1 = ExtForm::scalar(dim, jets.lift(&us[0]));
    let d = |q: Primed, f: &Form| ext.lower(q, f);
    let t1 = lift(&ts[0]);
    let integ = |f: Form| -> Result<f64> { Ok(integrate_jet(&f.top_coefficient()?, k, &jets, &chi)?.re) };
    let direct = integ(chi_f.wedge(&t1)?.wedge(&rest_j)?)?;
    let by_parts_1 = -integ(d(Primed::P0, &chi_f)?.wedge(&d(Primed::P1, &u1)?)?.wedge(&rest_j)?)?;
    let by_parts_2 = -integ(u1.wedge(&d(Primed::P1, &d(Primed::P0, &chi_f)?)?)?.wedge(&rest_j)?)?;
    let ibp = integ(u1.wedge(&d(Primed::P0, &d(Primed::P1, &chi_f)?)?)?.wedge(&rest_j)?)?;
    let scale = direct.abs().max(ibp.abs());
    let dis = [by_parts_1, by_parts_2, ibp]
        .iter()
        .map(|v| if scale == 0.0 { 0.0 } else { (v - direct).abs() / scale })
        .fold(0.0, f64::max);
    let sup_norms: Vec<f64> = us.iter().map(|u| sup_norm(u, k, sup_points)).collect();
    let denom: f64 = sup_norms.iter().product();
    Ok(ClnOutcome {
        mass_direct: direct,
        mass_by_parts: [by_parts_1, by_parts_2],
        mass_ibp: ibp,
        mass_l,
        empirical_c: if denom > 0.0 { mass_l / denom } else { f64::INFINITY },
        sup_norms,
        relative_disagreement: dis,
    })
}

impl ClnOutcome {
    pub fn to_report(&self, tol: f64, seed: u64) -> Report {
        let mut r = Report::new("cln", "int chi tri u1 ^ R = int u1 tri chi ^ R (integration by parts twice)", seed)
            .param("tolerance", tol);
        if self.relative_disagreement > tol || !self.relative_disagreement.is_finite() {
            r.fail(format!("{:e}", self.relative_disagreement));
        } else {
            r.residual = format!("{:e}", self.relative_disagreement);
        }
        r.with_details(json!({
            "mass_direct": self.mass_direct,
            "mass_by_parts": self.mass_by_parts,
            "mass_ibp": self.mass_ibp,
            "mass_L": self.mass_l,
            "sup_norms": self.sup_norms,
            "empirical_C": self.empirical_c,
        }))
    }
}

/// Masses `M_j = ∫_L (△u_j)^n` for `u_j = q + (1/j)Σx²`, `j = 1..=jmax`.
pub fn convergence_masses(frame: &TangentFrame, q: &Poly<Q>, l: &Region, jmax: usize) -> Result<Vec<f64>> {
    require_right_type(frame)?;
    let n = frame.n();
    let base = norm_squared(&frame.vars, n);
    (1..=jmax)
        .map(|j| {
            let u = q + &base.scale(&Cx::new(Q::new(1.into(), (j as i64).into()), Q::zero()));
            let m = ma_power(frame, &vec![u; n])?;
            Ok(integrate_top(&m.form, l)?.re)
        })
        .collect()
}

/// Successive differences `M_j − M_{j+1}` decrease monotonically and fall below `tol` by `jmax`.
pub fn convergence_experiment(frame: &TangentFrame, q: &Poly<Q>, l: &Region, jmax: usize, tol: f64) -> Result<Report> {
    let masses = convergence_masses(frame, q, l, jmax)?;
    let diffs: Vec<f64> = masses.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    let monotone = diffs.windows(2).all(|w| w[1] <= w[0]);
    let last = diffs.last().copied().unwrap_or(0.0);
    let mut r = Report::new("ma-convergence", "masses of (tri u_j)^n with u_j = q + |x|^2 / j converge", 0)
        .param("jmax", jmax)
        .param("tolerance", tol);
    if !monotone {
        r.fail("successive differences are not monotone");
    } else if last >= tol {
        r.fail(format!("{last:e}"));
    } else {
        r.residual = format!("{last:e}");
    }
    Ok(r.with_details(json!({"masses": masses, "differences": diffs, "limit_estimate": masses.last()})))
}

pub fn to_f64(c: &Cx<Q>) -> Complex<f64> {
    Complex::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))
}
