//! Acceptance run: one verdict line per criterion, indented lines for the sub-checks.
//!
//! Criteria 4 and 6 contain statements that are false for the given data; they print FAIL
//! with the evidence. The process exits nonzero only when a verdict differs from `EXPECTED`.

use std::process::ExitCode;
use std::time::Instant;

use cfx::boundary::{bracket_identity, hodge_diag, verify_anticommute, TangentFrame};
use cfx::flat::{ComplexSpec, FlatComplex};
use cfx::group::{classify, is_right_type, is_right_type_via_e, random_s, GroupSpec, HMode, QuaternionBasis};
use cfx::monge_ampere::{
    beta, cln_experiment, convergence_experiment, key_identity_check, norm_squared, random_psh_quadratic, stokes_check,
    triangle, wedge_all,
};
use cfx::form::ExtForm;
use cfx::quadrature::Region;
use cfx::random::{derive_seed, random_form, random_poly, rng, PolyGen};
use cfx::report::Report;
use cfx::spinor::Primed;
use cfx::suite::{boundary_law, flat_complex_law, flat_tuple_equivalence, symbol_suite, SuiteConfig};
use cfx::{QPoly, Rational};

const SEED: u64 = 0;

/// Expected verdict per criterion.
const EXPECTED: [bool; 10] = [true, true, true, false, true, false, true, true, true, true];

struct Criterion {
    pass: bool,
    lines: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { pass: true, lines: Vec::new() }
    }

    fn check(&mut self, label: &str, ok: bool, note: impl AsRef<str>) {
        self.pass &= ok;
        let note = note.as_ref();
        let tail = if note.is_empty() { String::new() } else { format!(" ({note})") };
        self.lines.push(format!("    [{}] {label}{tail}", if ok { "ok" } else { "FAIL" }));
    }

    fn report(&mut self, label: &str, r: &Report) {
        let note = if r.pass { format!("residual {}", r.residual) } else { short(&r.residual) };
        self.check(label, r.pass, note);
    }

    /// A sub-check whose failure is the documented outcome; it still fails the criterion.
    fn expect_fail(&mut self, label: &str, r: &Report) {
        self.pass &= r.pass;
        let state = if r.pass { "ok" } else { "FAIL" };
        self.lines.push(format!("    [{state}] {label} (residual {})", short(&r.residual)));
    }
}

fn short(s: &str) -> String {
    if s.chars().count() > 120 {
        s.chars().take(120).collect::<String>() + "…"
    } else {
        s.to_string()
    }
}

type Run = fn() -> cfx::Result<Criterion>;

const FLAT_SET: [(usize, usize); 5] = [(1, 0), (1, 1), (1, 2), (2, 1), (2, 2)];

fn c1() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    let cfg = SuiteConfig { trials: 20, seed: SEED, degree: 3 };
    for (n, k) in FLAT_SET {
        c.report(&format!("n={n} k={k} compositions vanish"), &flat_complex_law(n, k, &cfg)?);
    }
    Ok(c)
}

fn c2() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    let cfg = SuiteConfig { trials: 20, seed: SEED, degree: 3 };
    for (n, k) in FLAT_SET {
        c.report(&format!("n={n} k={k} tuple and polynomial operators agree"), &flat_tuple_equivalence(n, k, &cfg)?);
    }
    Ok(c)
}

fn c3() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    let fc = FlatComplex::<Rational>::new(ComplexSpec::new(1, 1)?);
    let mut e1 = vec![Rational::from_integer(0.into()); 8];
    e1[0] = Rational::from_integer(1.into());
    let r = fc.check_exactness(&e1)?;
    let d = r.details.clone().unwrap_or_default();
    let shape = d["dims"] == serde_json::json!([2, 4, 4, 2]) && d["ranks"] == serde_json::json!([2, 2, 2]);
    c.check("n=1 k=1 v=e1 dims (2,4,4,2) ranks (2,2,2)", shape && r.pass, format!("dims {} ranks {}", d["dims"], d["ranks"]));
    let cfg = SuiteConfig { trials: 10, seed: SEED, degree: 0 };
    for (n, k) in [(1, 0), (1, 1), (2, 1)] {
        c.report(&format!("n={n} k={k} e1 and 10 random directions exact"), &symbol_suite(n, k, &cfg)?);
    }
    Ok(c)
}

fn c4() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    for n in 1..=2 {
        let r = classify(&GroupSpec::right_qh(n), HMode::Sampled);
        c.check(&format!("rightQH n={n} is right-type"), r.right_type && r.consistent(), "");
        let l = classify(&GroupSpec::left_qh(n), HMode::Sampled);
        c.check(&format!("leftQH n={n} is not right-type"), !l.right_type && l.consistent(), "");
    }
    let mut disagree = 0;
    let mut trues = 0;
    for t in 0..200u64 {
        let n = 1 + (t % 3) as usize;
        let mut r = rng(derive_seed(SEED, &[4, t]));
        let g = GroupSpec::from_s(random_s(n, &mut r))?;
        let a = is_right_type(&g);
        trues += a as usize;
        disagree += (a != is_right_type_via_e(&g)) as usize;
    }
    c.check("200 random S: span route = curvature route", disagree == 0, format!("{disagree} disagreements, {trues} right-type"));
    let qb = QuaternionBasis::standard();
    let fails = qb.relation_failures();
    let i_fails: Vec<_> = fails.iter().filter(|f| f.contains('I') && !f.contains('J')).collect();
    let j_fails: Vec<_> = fails.iter().filter(|f| !(f.contains('I') && !f.contains('J'))).collect();
    c.check("I table: squares −Id, I^1 I^2 = I^3 cyclic", i_fails.is_empty(), "");
    c.check(
        "J table: same literal relations",
        j_fails.is_empty(),
        if j_fails.is_empty() { String::new() } else { j_fails.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("; ") },
    );
    let rev = qb.reversed_j_failures();
    c.lines.push(format!("    [{}] J table with reversed orientation, plus [I, J] = 0 (informational)", if rev.is_empty() { "ok" } else { "FAIL" }));
    Ok(c)
}

fn c5() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    let cfg = SuiteConfig { trials: 10, seed: SEED, degree: 3 };
    for (name, g) in [("rightQH", GroupSpec::right_qh(2)), ("leftQH", GroupSpec::left_qh(2))] {
        for k in [1, 2] {
            let r = boundary_law(&g, k, &cfg)?;
            let branches = r.details.as_ref().map(|d| d["compositions"].to_string()).unwrap_or_default();
            c.check(&format!("{name} n=2 k={k} compositions vanish"), r.pass, format!("{} {branches}", short(&r.residual)));
        }
    }
    Ok(c)
}

fn c6() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    let left = TangentFrame::new(&GroupSpec::left_qh(2));
    let out = verify_anticommute(&left, 10, SEED, 3)?;
    c.expect_fail("leftQH: dd f + E∧T f = 0 as stated", &out.stated);
    c.lines.push(format!(
        "    [{}] leftQH: dd f − E∧T f = 0, opposite sign (informational)",
        if out.opposite_sign.pass { "ok" } else { "FAIL" }
    ));
    let (stated, opposite) = bracket_identity(&left);
    c.expect_fail("leftQH: bracket identity with the stated sign", &stated);
    c.lines.push(format!(
        "    [{}] leftQH: bracket identity with the opposite sign (informational)",
        if opposite.pass { "ok" } else { "FAIL" }
    ));
    for n in [1, 2] {
        let right = TangentFrame::new(&GroupSpec::right_qh(n));
        let out = verify_anticommute(&right, 10, SEED, 3)?;
        c.report(&format!("rightQH n={n}: anticommutation residuals zero"), &out.plain);
    }
    Ok(c)
}

fn c7() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    for n in [1, 2] {
        let frame = TangentFrame::new(&GroupSpec::right_qh(n));
        for k in [1, 2] {
            c.report(&format!("rightQH n={n} k={k} diagonal"), &hodge_diag(&frame, k, 10, SEED, 3)?);
        }
    }
    Ok(c)
}

fn c8() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    let frame = TangentFrame::new(&GroupSpec::right_qh(2));
    for t in 0..5u64 {
        let mut r = rng(derive_seed(SEED, &[8, t]));
        let us: Vec<QPoly> = (0..2).map(|_| random_psh_quadratic(&frame.vars, 2, 3, &mut r)).collect();
        c.report(&format!("trial {t}: five expressions agree"), &key_identity_check(&frame, &us, SEED)?);
    }
    Ok(c)
}

fn c9() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    let g4 = PolyGen::with_degree(4);
    for n in [1, 2] {
        let frame = TangentFrame::new(&GroupSpec::right_qh(n));
        let unit = Region::unit(frame.vars.len());
        let dim = frame.dim();
        let trials = if n == 1 { 5 } else { 2 };
        for t in 0..trials {
            let mut r = rng(derive_seed(SEED, &[9, n as u64, t]));
            let h: QPoly = random_poly(&frame.vars, &mut r, &g4);
            let tf = random_form::<Rational>(&frame.vars, dim, dim - 1, &mut r, &g4);
            for p in Primed::ALL {
                let rep = stokes_check(&frame, &h, &tf, &unit, p, 1e-9)?;
                c.report(&format!("Stokes rightQH n={n} trial {t} index {p:?}"), &rep);
            }
        }
    }
    let frame = TangentFrame::new(&GroupSpec::right_qh(2));
    let k = Region::cube(11, -1.0, 1.0, 2)?;
    let l = Region::cube(11, -0.5, 0.5, 2)?;
    for p in [1, 2] {
        let mut r = rng(derive_seed(SEED, &[9, 100, p as u64]));
        let us: Vec<QPoly> = (0..p).map(|_| random_psh_quadratic(&frame.vars, 2, 3, &mut r)).collect();
        let out = cln_experiment(&frame, &us, &k, &l, 3)?;
        c.check(
            &format!("cutoff integration by parts p={p}"),
            out.relative_disagreement <= 1e-6,
            format!("relative disagreement {:e}, empirical C {:.4}", out.relative_disagreement, out.empirical_c),
        );
        // structured T = 𝔡_{1'}u_1 ∧ △u_2 ∧ … ∧ β^{n−p} on the unit box
        let mut factors = vec![frame.frak_d_lower(Primed::P1, &ExtForm::scalar(4, us[0].clone()))?];
        for u in &us[1..] {
            factors.push(triangle(&frame, u)?);
        }
        factors.extend(std::iter::repeat_n(beta(&frame.vars, 2), 2 - p));
        let tf = wedge_all(&frame.vars, 4, &factors)?;
        let rep = stokes_check(&frame, &us[0], &tf, &Region::unit(11), Primed::P1, 1e-9)?;
        c.report(&format!("Stokes with h = u_1, T built from u, p={p}"), &rep);
    }
    Ok(c)
}

fn c10() -> cfx::Result<Criterion> {
    let mut c = Criterion::new();
    let frame = TangentFrame::new(&GroupSpec::right_qh(2));
    let q = norm_squared(&frame.vars, 2);
    let l = Region::cube(11, -0.25, 0.25, 2)?;
    let r = convergence_experiment(&frame, &q, &l, 64, 1e-4)?;
    let d = r.details.clone().unwrap_or_default();
    let diffs = d["differences"].as_array().cloned().unwrap_or_default();
    let first = diffs.first().and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    c.check(
        "q = |x|^2, L = [-1/4, 1/4]^11: differences monotone, below 1e-4 by j = 64",
        r.pass,
        format!("M_1 - M_2 = {first:e}, M_63 - M_64 = {}, limit {}", r.residual, d["limit_estimate"]),
    );
    Ok(c)
}

fn main() -> ExitCode {
    let criteria: [(&str, Run); 10] = [
        ("flat complex law", c1),
        ("tuple and polynomial operators agree", c2),
        ("symbol exactness", c3),
        ("right-type classification", c4),
        ("boundary complex law", c5),
        ("curvature sign on leftQH, anticommutation on rightQH", c6),
        ("Hodge diagonal", c7),
        ("key identity", c8),
        ("Stokes quadrature and cutoff integration by parts", c9),
        ("Monge-Ampère mass convergence", c10),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let c = match f() {
            Ok(c) => c,
            Err(e) => Criterion { pass: false, lines: vec![format!("    [FAIL] error: {e}")] },
        };
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {name} [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
        for l in &c.lines {
            println!("{l}");
        }
        if c.pass != EXPECTED[i] {
            unexpected.push(i + 1);
        }
    }
    let passed = criteria.len() - EXPECTED.iter().filter(|e| !**e).count();
    if unexpected.is_empty() {
        println!("acceptance: {passed}/10 pass; criteria 4 and 6 fail as documented");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: verdicts differ from expectation for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
