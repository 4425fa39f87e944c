//! Coefficient carriers.
//!
//! Supernumber coefficients live in one of two carriers: exact Gaussian
//! rationals ([`Exact`]) or binary64 complex numbers ([`Float`]). Mixing the two
//! is a type error. [`Dual`] wraps either carrier with a first-order
//! infinitesimal and is used to take exact directional derivatives of
//! functions on superspace.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, EvalError};
use crate::gindex::EvenMulti;
use crate::smoothfn::SmoothFunction;

pub type Rational = BigRational;
pub type Exact = Complex<BigRational>;
pub type Float = Complex64;

/// Default absolute tolerance for float-mode comparisons.
pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Whether equality tests on this carrier are exact.
    const EXACT: bool;
    const NAME: &'static str;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_exact(c: &Exact) -> Self;

    fn from_rational(r: &Rational) -> Self {
        Self::from_exact(&Complex::new(r.clone(), Rational::zero()))
    }

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn is_real(&self) -> bool;
    /// `|z|`, used by the metric.
    fn modulus(&self) -> f64;
    fn to_float(&self) -> Float;
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    /// Sign of the real part; `None` when the value is not real.
    fn real_sign(&self) -> Option<Ordering>;

    fn recip(&self) -> Result<Self, EvalError>;
    fn exp(&self) -> Result<Self, EvalError>;
    fn sin(&self) -> Result<Self, EvalError>;
    fn cos(&self) -> Result<Self, EvalError>;
    fn ln(&self) -> Result<Self, EvalError>;

    /// Evaluate a user-supplied smooth function on this carrier.
    fn eval_custom(f: &dyn SmoothFunction, q: &[Self]) -> Result<Self, EvalError>;

    fn parse(re: &str, im: &str) -> Result<Self, Error>;
    /// Text form of the real and imaginary parts.
    fn format(&self) -> (String, String);

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

/// Parses `"3"`, `"-1.25"`, `"2e-3"` or `"p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed scalar {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(p / q);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| bad())?
    };
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return Err(Error::Parse(format!("exponent out of range in {s:?}")));
    }
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

fn format_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let a = v.abs();
    if a != 0.0 && !(1e-6..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for Exact {
    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn zero() -> Self {
        Complex::new(Rational::zero(), Rational::zero())
    }

    fn one() -> Self {
        Complex::new(Rational::one(), Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn from_exact(c: &Exact) -> Self {
        c.clone()
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn modulus(&self) -> f64 {
        rational_to_f64(&self.re).hypot(rational_to_f64(&self.im))
    }

    fn to_float(&self) -> Float {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn real_sign(&self) -> Option<Ordering> {
        self.is_real().then(|| self.re.cmp(&Rational::zero()))
    }

    fn recip(&self) -> Result<Self, EvalError> {
        if Scalar::is_zero(self) {
            return Err(EvalError::domain("reciprocal", "division by zero"));
        }
        Ok(self.inv())
    }

    fn exp(&self) -> Result<Self, EvalError> {
        if Scalar::is_zero(self) {
            Ok(<Self as Scalar>::one())
        } else {
            Err(EvalError::inexact("exp"))
        }
    }

    fn sin(&self) -> Result<Self, EvalError> {
        if Scalar::is_zero(self) {
            Ok(<Self as Scalar>::zero())
        } else {
            Err(EvalError::inexact("sin"))
        }
    }

    fn cos(&self) -> Result<Self, EvalError> {
        if Scalar::is_zero(self) {
            Ok(<Self as Scalar>::one())
        } else {
            Err(EvalError::inexact("cos"))
        }
    }

    fn ln(&self) -> Result<Self, EvalError> {
        match self.real_sign() {
            Some(Ordering::Greater) if self.re.is_one() => Ok(<Self as Scalar>::zero()),
            Some(Ordering::Greater) => Err(EvalError::inexact("log")),
            _ => Err(EvalError::domain("log", "argument must be real and positive")),
        }
    }

    fn eval_custom(f: &dyn SmoothFunction, q: &[Self]) -> Result<Self, EvalError> {
        f.eval_exact(q)
    }

    fn parse(re: &str, im: &str) -> Result<Self, Error> {
        Ok(Complex::new(parse_rational(re)?, parse_rational(im)?))
    }

    fn format(&self) -> (String, String) {
        (self.re.to_string(), self.im.to_string())
    }
}

impl Scalar for Float {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn from_exact(c: &Exact) -> Self {
        c.to_float()
    }

    fn is_real(&self) -> bool {
        self.im == 0.0
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn to_float(&self) -> Float {
        *self
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }

    fn real_sign(&self) -> Option<Ordering> {
        if self.im != 0.0 {
            return None;
        }
        self.re.partial_cmp(&0.0)
    }

    fn recip(&self) -> Result<Self, EvalError> {
        if Scalar::is_zero(self) {
            return Err(EvalError::domain("reciprocal", "division by zero"));
        }
        Ok(self.inv())
    }

    fn exp(&self) -> Result<Self, EvalError> {
        Ok(Complex64::exp(*self))
    }

    fn sin(&self) -> Result<Self, EvalError> {
        Ok(Complex64::sin(*self))
    }

    fn cos(&self) -> Result<Self, EvalError> {
        Ok(Complex64::cos(*self))
    }

    fn ln(&self) -> Result<Self, EvalError> {
        match self.real_sign() {
            Some(Ordering::Greater) => Ok(Complex64::new(self.re.ln(), 0.0)),
            _ => Err(EvalError::domain("log", "argument must be real and positive")),
        }
    }

    fn eval_custom(f: &dyn SmoothFunction, q: &[Self]) -> Result<Self, EvalError> {
        f.eval_float(q)
    }

    fn parse(re: &str, im: &str) -> Result<Self, Error> {
        Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?))
    }

    fn format(&self) -> (String, String) {
        (format_f64(self.re), format_f64(self.im))
    }
}

fn parse_f64(s: &str) -> Result<f64, Error> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        return Ok(parse_f64(p)? / parse_f64(q)?);
    }
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("malformed scalar {s:?}")))
}

/// `re + eps·ε` with `ε² = 0`, commuting with everything.
#[derive(Debug, Clone, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: S) -> Self {
        Dual { re, eps: S::zero() }
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let eps = self.re.clone() * rhs.eps + self.eps * rhs.re.clone();
        Dual::new(self.re * rhs.re, eps)
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    const EXACT: bool = S::EXACT;
    const NAME: &'static str = "dual";

    fn zero() -> Self {
        Dual::constant(S::zero())
    }

    fn one() -> Self {
        Dual::constant(S::one())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }

    fn from_exact(c: &Exact) -> Self {
        Dual::constant(S::from_exact(c))
    }

    fn is_real(&self) -> bool {
        self.re.is_real() && self.eps.is_real()
    }

    fn modulus(&self) -> f64 {
        self.re.modulus()
    }

    fn to_float(&self) -> Float {
        self.re.to_float()
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.re.approx_eq(&other.re, tol) && self.eps.approx_eq(&other.eps, tol)
    }

    fn real_sign(&self) -> Option<Ordering> {
        self.re.real_sign()
    }

    fn recip(&self) -> Result<Self, EvalError> {
        let r = self.re.recip()?;
        let eps = -(self.eps.clone() * r.clone() * r.clone());
        Ok(Dual::new(r, eps))
    }

    fn exp(&self) -> Result<Self, EvalError> {
        let e = self.re.exp()?;
        Ok(Dual::new(e.clone(), self.eps.clone() * e))
    }

    fn sin(&self) -> Result<Self, EvalError> {
        Ok(Dual::new(self.re.sin()?, self.eps.clone() * self.re.cos()?))
    }

    fn cos(&self) -> Result<Self, EvalError> {
        Ok(Dual::new(self.re.cos()?, -(self.eps.clone() * self.re.sin()?)))
    }

    fn ln(&self) -> Result<Self, EvalError> {
        Ok(Dual::new(self.re.ln()?, self.eps.clone() * self.re.recip()?))
    }

    fn eval_custom(f: &dyn SmoothFunction, q: &[Self]) -> Result<Self, EvalError> {
        let base: Vec<S> = q.iter().map(|d| d.re.clone()).collect();
        let value = S::eval_custom(f, &base)?;
        let mut eps = S::zero();
        for (j, d) in q.iter().enumerate() {
            if d.eps.is_zero() {
                continue;
            }
            let df = f.partial(&EvenMulti::unit(q.len(), j))?;
            eps = eps + d.eps.clone() * df.eval(&base)?;
        }
        Ok(Dual::new(value, eps))
    }

    fn parse(re: &str, im: &str) -> Result<Self, Error> {
        Ok(Dual::constant(S::parse(re, im)?))
    }

    fn format(&self) -> (String, String) {
        self.re.format()
    }
}

/// Exact rational from a machine integer ratio.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact complex scalar `p/q`.
pub fn exact(p: i64, q: i64) -> Exact {
    Complex::new(ratio(p, q), Rational::zero())
}

/// Exact real part of an exact scalar, or an error when it has an imaginary part.
pub fn real_rational(c: &Exact) -> Option<&Rational> {
    c.im.is_zero().then_some(&c.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), ratio(-5, 4));
        assert_eq!(parse_rational("2e-3").unwrap(), ratio(1, 500));
        assert_eq!(parse_rational("0").unwrap(), ratio(0, 1));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn exact_round_trips_through_text() {
        let z = Complex::new(ratio(-7, 3), ratio(1, 9));
        let (re, im) = Scalar::format(&z);
        assert_eq!(<Exact as Scalar>::parse(&re, &im).unwrap(), z);
    }

    #[test]
    fn exact_transcendentals_only_at_special_points() {
        assert_eq!(Scalar::exp(&<Exact as Scalar>::zero()).unwrap(), exact(1, 1));
        assert!(matches!(
            Scalar::exp(&exact(1, 2)),
            Err(EvalError::Inexact { .. })
        ));
        assert!(matches!(
            Scalar::ln(&exact(-1, 1)),
            Err(EvalError::Domain { .. })
        ));
        assert_eq!(Scalar::ln(&exact(1, 1)).unwrap(), exact(0, 1));
    }

    #[test]
    fn dual_numbers_differentiate() {
        let x = Dual::new(Complex64::new(0.3, 0.0), Complex64::new(1.0, 0.0));
        let y = Scalar::sin(&x).unwrap() * x.clone();
        let expected = 0.3f64.cos() * 0.3 + 0.3f64.sin();
        assert!((y.eps.re - expected).abs() < 1e-15);
        let r = Scalar::recip(&x).unwrap();
        assert!((r.eps.re + 1.0 / 0.09).abs() < 1e-12);
    }
}
