//! Seeded verification suites shared by the command line and the acceptance run.
//! Trials run in parallel; each trial draws from its own seed derived from the master seed.

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::boundary::{bracket_identity, check_ambient_frame, check_curvature, check_x_x, hodge_diag, verify_anticommute, BoundaryComplex, TangentFrame};
use crate::error::{CfxError, Result};
use crate::flat::{ComplexSpec, FlatComplex};
use crate::group::GroupSpec;
use crate::random::{derive_seed, random_field, random_form, rng, PolyGen};
use crate::report::Report;
use crate::spinor::{Basis, Primed};

type Q = BigRational;

/// Largest `n` accepted by the suites.
pub const MAX_N: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub degree: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { trials: 10, seed: 0, degree: 3 }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(CfxError::OutOfRange(format!("n = {n} outside 1..={MAX_N}")));
    }
    Ok(())
}

/// Runs `trial` for every `(level, t)` in parallel and records the first failure in order.
fn run_trials<F>(report: &mut Report, levels: &[usize], cfg: &SuiteConfig, trial: F) -> Result<()>
where
    F: Fn(usize, u64) -> Result<Option<String>> + Sync,
{
    let jobs: Vec<(usize, usize)> = levels.iter().flat_map(|&j| (0..cfg.trials).map(move |t| (j, t))).collect();
    let outcomes: Vec<Result<Option<String>>> =
        jobs.par_iter().map(|&(j, t)| trial(j, derive_seed(cfg.seed, &[j as u64, t as u64]))).collect();
    for ((j, t), o) in jobs.iter().zip(outcomes) {
        if let Some(msg) = o? {
            report.fail(format!("level {j} trial {t}: {msg}"));
        }
    }
    Ok(())
}

fn truncate(s: String) -> String {
    if s.chars().count() > 300 {
        s.chars().take(300).collect::<String>() + "…"
    } else {
        s
    }
}

/// `𝒟_{j+1}𝒟_j = 0` on random sections of every level.
pub fn flat_complex_law(n: usize, k: usize, cfg: &SuiteConfig) -> Result<Report> {
    check_n(n)?;
    let spec = ComplexSpec::new(n, k)?;
    let fc = FlatComplex::<Q>::new(spec);
    let g = PolyGen::with_degree(cfg.degree);
    let levels: Vec<usize> = (0..spec.levels() - 2).collect();
    let mut r = Report::new("flat-complex-law", "D_{j+1} D_j = 0 on the k-Cauchy-Fueter complex", cfg.seed)
        .param("n", n)
        .param("k", k)
        .param("trials", cfg.trials)
        .param("degree", cfg.degree);
    run_trials(&mut r, &levels, cfg, |j, seed| {
        let f = random_field(spec.basis(j), spec.sigma(j), fc.vars(), spec.form_dim(), spec.tau(j), &mut rng(seed), &g);
        let out = fc.apply_dj(j + 1, &fc.apply_dj(j, &f)?)?;
        Ok((!out.is_zero()).then(|| truncate(format!("{:?}", out.slots().iter().map(|s| s.to_string()).collect::<Vec<_>>()))))
    })?;
    Ok(r.with_details(json!({"levels": spec.levels(), "table": spec.table()})))
}

/// Tuple and polynomial realizations agree under `Π̇`: `Π̇_{j+1}𝒟_j^{tuple} = 𝒟_jΠ̇_j` for `j ≠ k`.
pub fn flat_tuple_equivalence(n: usize, k: usize, cfg: &SuiteConfig) -> Result<Report> {
    check_n(n)?;
    let spec = ComplexSpec::new(n, k)?;
    let fc = FlatComplex::<Q>::new(spec);
    let g = PolyGen::with_degree(cfg.degree);
    let levels: Vec<usize> = (0..spec.levels() - 1).filter(|&j| j != k).collect();
    let mut r = Report::new("tuple-equivalence", "tuple and polynomial forms of D_j agree under Pi-dot", cfg.seed)
        .param("n", n)
        .param("k", k)
        .param("trials", cfg.trials);
    run_trials(&mut r, &levels, cfg, |j, seed| {
        let t = random_field(Basis::Tuple, spec.sigma(j), fc.vars(), spec.form_dim(), spec.tau(j), &mut rng(seed), &g);
        let lhs = fc.pi_dot(j + 1, &fc.apply_dj_tuple(j, &t)?)?;
        let rhs = fc.apply_dj(j, &fc.pi_dot(j, &t)?)?;
        let back = fc.pi_dot_inv(j, &fc.pi_dot(j, &t)?)?;
        Ok(if lhs != rhs {
            Some("realizations differ".to_string())
        } else if back != t {
            Some("Pi-dot inverse is not a left inverse".to_string())
        } else {
            None
        })
    })?;
    Ok(r.with_details(json!({"levels": levels})))
}

/// Flat `d^{A'}d^{A'} = 0`, `d^{0'}d^{1'} = −d^{1'}d^{0'}`.
pub fn flat_anticommute(n: usize, cfg: &SuiteConfig) -> Result<Report> {
    check_n(n)?;
    let fc = FlatComplex::<Q>::new(ComplexSpec::new(n, 0)?);
    let g = PolyGen::with_degree(cfg.degree);
    let dim = 2 * (n + 1);
    let mut r = Report::new("flat-anticommute", "d^A' d^A' = 0 and d^0' d^1' = -d^1' d^0'", cfg.seed)
        .param("n", n)
        .param("trials", cfg.trials);
    run_trials(&mut r, &[0], cfg, |_, seed| {
        let mut rr = rng(seed);
        let tau = rr.gen_range(0..3);
        let f = random_form::<Q>(fc.vars(), dim, tau, &mut rr, &g);
        for p in Primed::ALL {
            if !fc.d_upper(p, &fc.d_upper(p, &f)?)?.is_zero() {
                return Ok(Some(format!("d^{}' squared is nonzero", p.o())));
            }
        }
        let a = fc.d_upper(Primed::P0, &fc.d_upper(Primed::P1, &f)?)?;
        let b = fc.d_upper(Primed::P1, &fc.d_upper(Primed::P0, &f)?)?;
        Ok((!(&a + &b).is_zero()).then(|| truncate((&a + &b).to_string())))
    })?;
    Ok(r)
}

/// Random nonzero rational vector of length `m` with entries `p/q`, `|p| ≤ 3`, `1 ≤ q ≤ 3`.
pub fn random_direction(m: usize, seed: u64) -> Vec<Q> {
    let mut r = rng(seed);
    loop {
        let v: Vec<Q> = (0..m).map(|_| Q::new(r.gen_range(-3..=3).into(), r.gen_range(1..=3).into())).collect();
        if v.iter().any(|x| *x != Q::from_integer(0.into())) {
            return v;
        }
    }
}

/// Exactness of the symbol sequence at `e_1` and at `trials` random rational directions.
pub fn symbol_suite(n: usize, k: usize, cfg: &SuiteConfig) -> Result<Report> {
    check_n(n)?;
    let fc = FlatComplex::<Q>::new(ComplexSpec::new(n, k)?);
    let m = 4 * (n + 1);
    let mut e1 = vec![Q::from_integer(0.into()); m];
    e1[0] = Q::from_integer(1.into());
    let mut dirs = vec![e1];
    dirs.extend((0..cfg.trials).map(|t| random_direction(m, derive_seed(cfg.seed, &[t as u64]))));
    let reports = dirs.par_iter().map(|v| fc.check_exactness(v)).collect::<Result<Vec<_>>>()?;
    let mut r = Report::merge("symbol-exactness", "symbol sequence is exact at every level", cfg.seed, reports);
    r.params.insert("n".into(), n.into());
    r.params.insert("k".into(), k.into());
    r.params.insert("directions".into(), dirs.len().into());
    Ok(r)
}

/// `𝒟_{j+1}𝒟_j = 0` on the boundary complex, trials in parallel.
pub fn boundary_law(group: &GroupSpec, k: usize, cfg: &SuiteConfig) -> Result<Report> {
    check_n(group.n)?;
    let bc = BoundaryComplex::new(group, k)?;
    let g = PolyGen::with_degree(cfg.degree);
    let levels: Vec<usize> = (0..bc.spec.levels().saturating_sub(2)).collect();
    let mut r = Report::new("boundary-complex-law", "D_{j+1} D_j = 0 on the boundary complex", cfg.seed)
        .param("n", group.n)
        .param("k", k)
        .param("trials", cfg.trials)
        .param("right_type", bc.frame.is_right_type());
    run_trials(&mut r, &levels, cfg, |j, seed| {
        let f = bc.random_field(j, seed, &g);
        let out = bc.apply(&bc.apply(&f)?)?;
        Ok((!out.is_zero()).then(|| "nonzero composition".to_string()))
    })?;
    let branches: Vec<_> = levels.iter().map(|&j| json!([bc.branch_name(j), bc.branch_name(j + 1)])).collect();
    Ok(r.with_details(json!({"compositions": branches})))
}

/// Which boundary families to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCheck {
    All,
    Complex,
    Anticommute,
    Bracket,
    Hodge,
    Frame,
}

impl BoundaryCheck {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => BoundaryCheck::All,
            "complex" => BoundaryCheck::Complex,
            "anticommute" => BoundaryCheck::Anticommute,
            "bracket" => BoundaryCheck::Bracket,
            "hodge" => BoundaryCheck::Hodge,
            "frame" => BoundaryCheck::Frame,
            other => return Err(CfxError::Invalid(format!("unknown check '{other}'"))),
        })
    }

    fn runs(self, c: BoundaryCheck) -> bool {
        self == BoundaryCheck::All || self == c
    }
}

/// Boundary suites: frame tangency and curvature, complex law, anticommutation with the stated
/// and opposite curvature sign, bracket identity, and the Hodge diagonal on right-type groups.
pub fn verify_boundary(group: &GroupSpec, k: usize, cfg: &SuiteConfig, which: BoundaryCheck) -> Result<Report> {
    check_n(group.n)?;
    let frame = TangentFrame::new(group);
    let mut parts = Vec::new();
    if which.runs(BoundaryCheck::Frame) {
        parts.push(check_ambient_frame(&frame));
        parts.push(check_curvature(&frame));
    }
    if which.runs(BoundaryCheck::Complex) {
        parts.push(boundary_law(group, k, cfg)?);
    }
    if which.runs(BoundaryCheck::Anticommute) {
        let out = verify_anticommute(&frame, cfg.trials, cfg.seed, cfg.degree)?;
        if frame.is_right_type() {
            parts.push(out.plain);
        } else {
            parts.push(out.stated);
            parts.push(out.opposite_sign);
        }
    }
    if which.runs(BoundaryCheck::Bracket) {
        let (stated, opposite) = bracket_identity(&frame);
        parts.push(stated);
        if !frame.is_right_type() {
            parts.push(opposite);
        } else {
            parts.push(check_x_x(&frame));
        }
    }
    if which.runs(BoundaryCheck::Hodge) && frame.is_right_type() && k >= 1 {
        parts.push(hodge_diag(&frame, k, cfg.trials, cfg.seed, cfg.degree)?);
    }
    let mut r = Report::merge("verify-boundary", "boundary complex suites", cfg.seed, parts);
    r.params.insert("n".into(), group.n.into());
    r.params.insert("k".into(), k.into());
    r.params.insert("trials".into(), cfg.trials.into());
    r.params.insert("right_type".into(), frame.is_right_type().into());
    Ok(r)
}

/// Flat suites: complex law, tuple equivalence, anticommutation.
pub fn verify_flat(n: usize, k: usize, cfg: &SuiteConfig) -> Result<Report> {
    let parts = vec![flat_complex_law(n, k, cfg)?, flat_tuple_equivalence(n, k, cfg)?, flat_anticommute(n, cfg)?];
    let mut r = Report::merge("verify-flat", "flat complex suites", cfg.seed, parts);
    r.params.insert("n".into(), n.into());
    r.params.insert("k".into(), k.into());
    r.params.insert("trials".into(), cfg.trials.into());
    Ok(r)
}
