//! Seeded generators of random polynomials, forms and sections.

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::form::{masks, ExtForm};
use crate::poly::{Poly, Vars};
use crate::scalar::Real;
use crate::spinor::{Basis, SpinorField};

pub type TrialRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic sub-seed for a trial, independent of scheduling order.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut z = master;
    for &t in tags {
        z = splitmix(z ^ splitmix(t.wrapping_add(0x9E37_79B9_7F4A_7C15)));
    }
    z
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shape of random polynomials.
#[derive(Debug, Clone)]
pub struct PolyGen {
    pub max_degree: u32,
    pub terms: usize,
    pub coeff_bound: i64,
    /// Variables allowed to appear; all when `None`.
    pub support: Option<Vec<usize>>,
    /// Probability that a form component is nonzero.
    pub density: f64,
}

impl Default for PolyGen {
    fn default() -> Self {
        PolyGen { max_degree: 3, terms: 3, coeff_bound: 3, support: None, density: 0.5 }
    }
}

impl PolyGen {
    pub fn with_degree(max_degree: u32) -> Self {
        PolyGen { max_degree, ..Default::default() }
    }
}

pub fn random_poly<R: Real>(vars: &Arc<Vars>, rng: &mut TrialRng, g: &PolyGen) -> Poly<R> {
    let support: Vec<usize> = g.support.clone().unwrap_or_else(|| (0..vars.len()).collect());
    let mut p = Poly::zero(vars);
    for _ in 0..g.terms {
        let deg = rng.gen_range(0..=g.max_degree);
        let mut e = vec![0u8; vars.len()];
        for _ in 0..deg {
            if support.is_empty() {
                break;
            }
            e[support[rng.gen_range(0..support.len())]] += 1;
        }
        let (a, b) = loop {
            let a = rng.gen_range(-g.coeff_bound..=g.coeff_bound);
            let b = rng.gen_range(-g.coeff_bound..=g.coeff_bound);
            if a != 0 || b != 0 {
                break (a, b);
            }
        };
        p += &Poly::monomial(vars, e, Complex::new(R::from_int(a), R::from_int(b)));
    }
    p
}

pub fn random_form<R: Real>(vars: &Arc<Vars>, dim: usize, degree: usize, rng: &mut TrialRng, g: &PolyGen) -> ExtForm<R> {
    let mut f = ExtForm::zero(vars, dim, degree);
    let ms = masks(dim, degree);
    for &m in &ms {
        if rng.gen_bool(g.density) {
            f.add_to(m, random_poly(vars, rng, g));
        }
    }
    if f.is_zero() && !ms.is_empty() {
        let m = ms[rng.gen_range(0..ms.len())];
        f.add_to(m, random_poly(vars, rng, g));
    }
    f
}

/// Random section; tuple-basis sections are symmetric by construction.
pub fn random_field<R: Real>(
    basis: Basis,
    sigma: usize,
    vars: &Arc<Vars>,
    dim: usize,
    degree: usize,
    rng: &mut TrialRng,
    g: &PolyGen,
) -> SpinorField<R> {
    let inner = if basis == Basis::Tuple { Basis::S } else { basis };
    let slots = (0..=sigma).map(|_| random_form(vars, dim, degree, rng, g)).collect();
    let f = SpinorField::new(inner, sigma, slots).expect("consistent shapes");
    if basis == Basis::Tuple {
        f.to_tuple()
    } else {
        f
    }
}
