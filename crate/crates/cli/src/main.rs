//! `cfx`: verification front end.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input error, 3 precondition violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cfx::boundary::TangentFrame;
use cfx::form::ExtForm;
use cfx::group::{classify, GroupSpec, HMode};
use cfx::monge_ampere::{beta, cln_experiment, integrate_top, key_identity_check, ma_power, norm_squared, stokes_check, triangle, wedge_all};
use cfx::poly::{max_degree, Poly, PolyJson};
use cfx::quadrature::Region;
use cfx::report::Report;
use cfx::spinor::Primed;
use cfx::suite::{symbol_suite, verify_boundary, verify_flat, BoundaryCheck, SuiteConfig};
use cfx::{CfxError, Rational};

#[derive(Parser)]
#[command(name = "cfx", version, about = "Exact checks for the k-Cauchy-Fueter complex, its boundary complex and the quaternionic Monge-Ampère operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed; per-trial seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Right-type, stratification and condition (H) for a group.
    Classify {
        /// Group JSON file with "S" or "phi".
        input: Option<PathBuf>,
        /// Named group instead of a file: rightQH, leftQH, abelian.
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Condition (H) evaluation: exact determinant or sampled floats.
        #[arg(long, default_value = "exact")]
        mode: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the exact verification suites.
    Verify {
        #[arg(value_parser = ["flat", "boundary"])]
        target: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "rightQH")]
        group: String,
        /// Group JSON file (overrides --group).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        /// Boundary family: all, complex, anticommute, bracket, hodge, frame.
        #[arg(long, default_value = "all")]
        check: String,
        #[command(flatten)]
        common: Common,
    },
    /// Dimensions and ranks of the symbol sequence.
    Symbol {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Direction as comma-separated rationals; random directions when omitted.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Monge-Ampère masses, Stokes residual, key identity and the CLN comparison.
    Ma {
        #[arg(long, default_value = "rightQH")]
        group: String,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Polynomial JSON files for u_1, u_2, ...; defaults to the squared norm.
        #[arg(long = "u")]
        us: Vec<PathBuf>,
        /// Wedge power p (≤ n).
        #[arg(long)]
        power: Option<usize>,
        /// Cube bounds "lo,hi" in every coordinate.
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 2)]
        resolution: usize,
        /// Relative tolerance for quadrature comparisons.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        /// Sup-norm sampling points per axis.
        #[arg(long, default_value_t = 3)]
        sup_points: usize,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Input(String),
    Precondition(String),
}

impl From<CfxError> for Failure {
    fn from(e: CfxError) -> Self {
        match e {
            CfxError::Precondition(m) => Failure::Precondition(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<(Value, bool), Failure>;

fn load_group(name: &str, input: &Option<PathBuf>, n: usize) -> Result<GroupSpec, Failure> {
    match input {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            Ok(GroupSpec::parse(&text)?)
        }
        None => Ok(GroupSpec::named(name, n)?),
    }
}

fn check_degree(d: u32) -> Result<(), Failure> {
    let cap = max_degree();
    if d > cap {
        return Err(Failure::Input(format!("degree {d} exceeds cap {cap} (CFX_MAX_DEGREE)")));
    }
    Ok(())
}

fn report_value(r: &Report) -> (Value, bool) {
    (serde_json::to_value(r).expect("report serializes"), r.pass)
}

fn run_classify(input: Option<PathBuf>, group: Option<String>, n: usize, mode: &str, seed: u64) -> Outcome {
    let g = match (&input, &group) {
        (Some(_), Some(_)) => return Err(Failure::Input("give either a file or --group".into())),
        (None, None) => return Err(Failure::Input("a group file or --group is required".into())),
        _ => load_group(group.as_deref().unwrap_or(""), &input, n)?,
    };
    let mode = match mode {
        "exact" => HMode::Exact,
        "sampled" => HMode::Sampled,
        other => return Err(Failure::Input(format!("unknown mode '{other}'"))),
    };
    let c = classify(&g, mode);
    let mut v = serde_json::to_value(&c).expect("classification serializes");
    v["seed"] = json!(seed);
    v["consistent"] = json!(c.consistent());
    if !c.consistent() {
        v["error"] = json!("internal inconsistency: the two right-type routes disagree");
    }
    Ok((v, c.consistent()))
}

fn parse_direction(s: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse::<Rational>().map_err(|e| Failure::Input(format!("bad rational '{x}': {e}"))))
        .collect()
}

fn run_symbol(n: usize, k: usize, v: Option<String>, trials: usize, seed: u64) -> Outcome {
    let cfg = SuiteConfig { trials, seed, degree: 0 };
    let r = match v {
        Some(s) => {
            let v = parse_direction(&s)?;
            if v.len() != 4 * (n + 1) {
                return Err(Failure::Input(format!("direction needs {} entries", 4 * (n + 1))));
            }
            let fc = cfx::flat::FlatComplex::<Rational>::new(cfx::flat::ComplexSpec::new(n, k)?);
            let mut r = fc.check_exactness(&v)?;
            r.seed = seed;
            r
        }
        None => symbol_suite(n, k, &cfg)?,
    };
    Ok(report_value(&r))
}

fn parse_region(s: &str, dim: usize, res: usize) -> Result<Region, Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Failure::Input(format!("bad bound '{x}': {e}"))))
        .collect::<Result<_, _>>()?;
    if parts.len() != 2 {
        return Err(Failure::Input("region is \"lo,hi\"".into()));
    }
    Ok(Region::cube(dim, parts[0], parts[1], res)?)
}

fn load_poly(path: &PathBuf, frame: &TangentFrame) -> Result<Poly<Rational>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let pj: PolyJson = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let p = Poly::<Rational>::from_json(&pj)?;
    p.check_degree(max_degree())?;
    let map = pj.vars.iter().map(|name| frame.vars.index(name)).collect::<cfx::Result<Vec<_>>>()?;
    Ok(p.relabel(&frame.vars, &map))
}

#[allow(clippy::too_many_arguments)]
fn run_ma(
    group: &str,
    input: &Option<PathBuf>,
    n: usize,
    us: &[PathBuf],
    power: Option<usize>,
    region: &str,
    resolution: usize,
    tol: f64,
    sup_points: usize,
    seed: u64,
) -> Outcome {
    let g = load_group(group, input, n)?;
    let frame = TangentFrame::new(&g);
    let n = g.n;
    if !frame.is_right_type() {
        return Err(Failure::Precondition(
            "the group is not right-type: the curvature form is nonzero, so the tangential operators do not anticommute and the Monge-Ampère operator is undefined".into(),
        ));
    }
    let p = power.unwrap_or(n);
    if p == 0 || p > n {
        return Err(Failure::Input(format!("power must lie in 1..={n}")));
    }
    let base: Vec<Poly<Rational>> = if us.is_empty() {
        vec![norm_squared(&frame.vars, n)]
    } else {
        us.iter().map(|u| load_poly(u, &frame)).collect::<Result<_, _>>()?
    };
    let fs: Vec<Poly<Rational>> = (0..p).map(|i| base[i % base.len()].clone()).collect();
    let k = parse_region(region, frame.vars.len(), resolution)?;
    let (mid, half) = ((k.lo[0] + k.hi[0]) / 2.0, (k.hi[0] - k.lo[0]) / 4.0);
    let l = Region::cube(k.dim(), mid - half, mid + half, resolution)?;

    let dim = frame.dim();
    let mut parts = Vec::new();
    let key = key_identity_check(&frame, &fs, seed)?;
    parts.push(key);
    // Stokes with h = u_1 and T = 𝔡_{1'}u_1∧△u_2∧…∧β^{n−p}
    let ts = fs.iter().map(|u| triangle(&frame, u)).collect::<cfx::Result<Vec<_>>>()?;
    let mut factors = vec![frame.frak_d_lower(Primed::P1, &ExtForm::scalar(dim, fs[0].clone()))?];
    factors.extend(ts[1..].iter().cloned());
    factors.extend(std::iter::repeat_n(beta(&frame.vars, n), n - p));
    let t = wedge_all(&frame.vars, dim, &factors)?;
    for q in Primed::ALL {
        parts.push(stokes_check(&frame, &fs[0], &t, &k, q, tol.min(1e-9))?);
    }
    let cln = cln_experiment(&frame, &fs, &k, &l, sup_points)?;
    parts.push(cln.to_report(tol, seed));
    let mut r = Report::merge("ma", "Monge-Ampère masses, Stokes formula, key identity", seed, parts);
    let full = ma_power(&frame, &fs)?;
    let rest = wedge_all(&frame.vars, dim, &vec![beta(&frame.vars, n); n - p])?;
    let mass = integrate_top(&full.form.wedge(&rest)?, &k)?;
    r.params.insert("n".into(), n.into());
    r.params.insert("p".into(), p.into());
    r.params.insert("region".into(), json!([k.lo[0], k.hi[0]]));
    r.params.insert("inner_region".into(), json!([l.lo[0], l.hi[0]]));
    let mut v = serde_json::to_value(&r).expect("report serializes");
    v["mass"] = json!([mass.re, mass.im]);
    v["mass_direct"] = json!(cln.mass_direct);
    v["mass_ibp"] = json!(cln.mass_ibp);
    v["sup_norms"] = json!(cln.sup_norms);
    v["empirical_C"] = json!(cln.empirical_c);
    Ok((v, r.pass))
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per report (the top report and any nested sub-reports), or key/value rows otherwise.
fn to_csv(v: &Value) -> String {
    let mut out = String::new();
    if v.get("identity").is_some() {
        out.push_str("identity,target,pass,residual,seed\n");
        let mut rows = vec![v];
        if let Some(Value::Array(sub)) = v.get("details") {
            rows.extend(sub.iter().filter(|s| s.get("identity").is_some()));
        }
        for r in rows {
            let f = |k: &str| match &r[k] {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_escape(&f("identity")),
                csv_escape(&f("target")),
                f("pass"),
                csv_escape(&f("residual")),
                f("seed")
            ));
        }
        if let Some(Value::Array(levels)) = v.get("details").and_then(|d| d.get("levels")) {
            out.push_str("level,dim,rank_in,rank_out,exact\n");
            for l in levels {
                out.push_str(&format!("{},{},{},{},{}\n", l["level"], l["dim"], l["rank_in"], l["rank_out"], l["exact"]));
            }
        }
    } else if let Value::Object(map) = v {
        out.push_str("key,value\n");
        for (k, x) in map {
            if k == "block_certificates" {
                continue;
            }
            let s = match x {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{},{}\n", csv_escape(k), csv_escape(&s)));
        }
    }
    out
}

fn emit(v: &Value, common: &Common) -> Result<(), Failure> {
    let text = match common.format {
        Format::Json => serde_json::to_string_pretty(v).expect("json") + "\n",
        Format::Csv => to_csv(v),
    };
    match &common.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, common) = match cli.command {
        Command::Classify { input, group, n, mode, common } => (run_classify(input, group, n, &mode, common.seed), common),
        Command::Verify { target, n, k, group, input, trials, degree, check, common } => {
            let run = || -> Outcome {
                check_degree(degree)?;
                let cfg = SuiteConfig { trials, seed: common.seed, degree };
                let r = if target == "flat" {
                    verify_flat(n.unwrap_or(1), k, &cfg)?
                } else {
                    let g = load_group(&group, &input, n.unwrap_or(2))?;
                    verify_boundary(&g, k, &cfg, BoundaryCheck::parse(&check)?)?
                };
                Ok(report_value(&r))
            };
            (run(), common)
        }
        Command::Symbol { n, k, v, trials, common } => (run_symbol(n, k, v, trials, common.seed), common),
        Command::Ma { group, input, n, us, power, region, resolution, tolerance, sup_points, common } => (
            run_ma(&group, &input, n, &us, power, &region, resolution, tolerance, sup_points, common.seed),
            common,
        ),
    };
    match outcome {
        Ok((v, pass)) => {
            if let Err(Failure::Input(m)) = emit(&v, &common) {
                eprintln!("error: {m}");
                return ExitCode::from(2);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(m)) => {
            eprintln!("precondition violated: {m}");
            ExitCode::from(3)
        }
    }
}
