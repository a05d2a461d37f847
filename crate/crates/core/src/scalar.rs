//! Real scalar fields underlying the complex coefficient ring.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::error::{CfxError, Result};

/// A real field usable as the real/imaginary part of polynomial coefficients.
///
/// Implemented for `BigRational` (exact) and `f32`/`f64` (floating point).
pub trait Real:
    Num + Signed + Clone + Debug + Display + PartialOrd + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when arithmetic is exact, so equality tests are meaningful.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).unwrap() / Self::from_i64(den).unwrap()
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).unwrap()
    }

    /// Parses `"p"` or `"p/q"`.
    fn parse_ratio(s: &str) -> Result<Self>;

    /// Canonical string; rationals print as `p/q`.
    fn to_ratio_string(&self) -> String {
        format!("{self}")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<BigRational> {
        None
    }

    fn from_rational(q: &BigRational) -> Self;
}

impl Real for BigRational {
    const EXACT: bool = true;

    fn parse_ratio(s: &str) -> Result<Self> {
        BigRational::from_str(s.trim()).map_err(|_| CfxError::Parse(format!("bad rational '{s}'")))
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

fn parse_float_ratio(s: &str) -> Result<f64> {
    let bad = || CfxError::Parse(format!("bad number '{s}'"));
    match s.trim().split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            Ok(p / q)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

impl Real for f64 {
    const EXACT: bool = false;

    fn parse_ratio(s: &str) -> Result<Self> {
        parse_float_ratio(s)
    }

    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    const EXACT: bool = false;

    fn parse_ratio(s: &str) -> Result<Self> {
        parse_float_ratio(s).map(|v| v as f32)
    }

    fn from_rational(q: &BigRational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }
}

/// Complex coefficient over a real field.
pub type Cx<R> = Complex<R>;

pub fn re<R: Real>(v: R) -> Cx<R> {
    Complex::new(v, R::zero())
}

pub fn int<R: Real>(v: i64) -> Cx<R> {
    Complex::new(R::from_int(v), R::zero())
}

pub fn imag_unit<R: Real>() -> Cx<R> {
    Complex::new(R::zero(), R::one())
}

pub fn ratio<R: Real>(p: i64, q: i64) -> Cx<R> {
    Complex::new(R::from_ratio(p, q), R::zero())
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn is_zero<R: Real>(c: &Cx<R>) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

pub fn is_one<R: Real>(c: &Cx<R>) -> bool {
    c.re.is_one() && c.im.is_zero()
}

pub fn cast<R: Real, S: Real>(c: &Cx<R>) -> Cx<S> {
    match (c.re.to_rational(), c.im.to_rational()) {
        (Some(a), Some(b)) => Complex::new(S::from_rational(&a), S::from_rational(&b)),
        _ => Complex::new(
            S::from_f64(c.re.to_f64_lossy()).unwrap(),
            S::from_f64(c.im.to_f64_lossy()).unwrap(),
        ),
    }
}

/// Formats `a+bi` with rational parts.
pub fn fmt_cx<R: Real>(c: &Cx<R>) -> String {
    if c.im.is_zero() {
        c.re.to_ratio_string()
    } else if c.re.is_zero() {
        format!("{}i", c.im.to_ratio_string())
    } else if c.im.is_negative() {
        format!("({}-{}i)", c.re.to_ratio_string(), (-c.im.clone()).to_ratio_string())
    } else {
        format!("({}+{}i)", c.re.to_ratio_string(), c.im.to_ratio_string())
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_rationals() {
        let q = BigRational::parse_ratio("-3/6").unwrap();
        assert_eq!(q, rational(-1, 2));
        assert_eq!(q.to_ratio_string(), "-1/2");
        assert_eq!(f64::parse_ratio("1/4").unwrap(), 0.25);
        assert!(BigRational::parse_ratio("x").is_err());
    }

    #[test]
    fn complex_helpers() {
        let i = imag_unit::<BigRational>();
        assert_eq!(i.clone() * i, int(-1));
        assert_eq!(fmt_cx(&Complex::new(rational(1, 2), rational(-2, 1))), "(1/2-2i)");
        let c: Cx<f64> = cast(&ratio::<BigRational>(1, 4));
        assert_eq!(c.re, 0.25);
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(factorial(4), 24);
    }
}
