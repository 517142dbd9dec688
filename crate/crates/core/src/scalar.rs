//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.
//!
//! `Rational` is re-exported from `num-rational`; it keeps values reduced to
//! lowest terms with a positive denominator, which is exactly the invariant
//! the rest of the crate relies on.

use crate::error::{Error, Result};
use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Exact rational scalar used for every coefficient in the crate.
pub type Rational = num_rational::BigRational;

/// Shorthand for small rationals in tests and examples.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for integer-valued rationals.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Parses `"p/q"` or `"p"` into an exact rational. Whitespace is not accepted.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let invalid = || Error::InvalidInstance(format!("cannot parse rational {s:?}"));
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num_str.parse().map_err(|_| invalid())?;
    let den: BigInt = den_str.parse().map_err(|_| invalid())?;
    if den.is_zero() {
        return Err(Error::InvalidInstance(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `"p/q"` form (lowest terms, positive denominator); integers as `"p"`.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal approximation with the given number of significant digits.
///
/// The value is truncated toward zero; callers that need a directed bound
/// should use exact brackets instead.
pub fn decimal_approx(r: &Rational, significant: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let abs = r.abs();
    // Find e with 10^e <= abs < 10^(e+1).
    let ten = BigInt::from(10);
    let mut e: i64 = 0;
    let mut scaled = abs.clone();
    let one = Rational::one();
    let ten_r = Rational::from_integer(ten.clone());
    while scaled >= ten_r {
        scaled /= &ten_r;
        e += 1;
    }
    while scaled < one {
        scaled *= &ten_r;
        e -= 1;
    }
    // digits = floor(abs * 10^(significant-1-e))
    let shift = significant as i64 - 1 - e;
    let shifted = if shift >= 0 {
        abs * Rational::from_integer(ten.pow(shift as u32))
    } else {
        abs / Rational::from_integer(ten.pow((-shift) as u32))
    };
    let digits = shifted.floor().numer().to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if e >= 0 && (e as usize) < significant {
        let point = e as usize + 1;
        out.push_str(&digits[..point]);
        if point < digits.len() {
            out.push('.');
            out.push_str(&digits[point..]);
        }
    } else if (-4..0).contains(&e) {
        out.push_str("0.");
        for _ in 0..(-e - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        out.push_str(&digits[..1]);
        out.push('.');
        out.push_str(&digits[1..]);
        out.push('e');
        out.push_str(&e.to_string());
    }
    out
}

/// Exact rational square root, when one exists.
pub fn rational_sqrt_exact(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let num_root = r.numer().sqrt();
    let den_root = r.denom().sqrt();
    if &(&num_root * &num_root) == r.numer() && &(&den_root * &den_root) == r.denom() {
        Some(Rational::new(num_root, den_root))
    } else {
        None
    }
}

/// Rational bracket `[lo, hi]` around `sqrt(r)` with `hi - lo <= tol`.
pub fn rational_sqrt_bounds(r: &Rational, tol: &Rational) -> Result<(Rational, Rational)> {
    if r.is_negative() {
        return Err(Error::NegativeRadicand);
    }
    if tol <= &Rational::zero() {
        return Err(Error::PreconditionFail("tolerance must be positive".into()));
    }
    if r.is_zero() {
        return Ok((Rational::zero(), Rational::zero()));
    }
    // sqrt(p/q) = sqrt(p*q)/q; isqrt on p*q*4^k gives a 2^-k-wide bracket.
    let k = bits_for_tolerance(tol, r.denom());
    let scaled = r.numer() * r.denom() * (BigInt::one() << (2 * k));
    let root = scaled.sqrt();
    let den = Rational::from_integer(r.denom() * (BigInt::one() << k));
    let lo = Rational::from_integer(root.clone()) / den.clone();
    let hi = Rational::from_integer(root + BigInt::one()) / den;
    Ok((lo, hi))
}

fn bits_for_tolerance(tol: &Rational, denom: &BigInt) -> u32 {
    // Need 1/(denom * 2^k) <= tol, i.e. 2^k >= 1/(tol * denom).
    let inv = Rational::one() / (tol * Rational::from_integer(denom.clone()));
    let ceil = inv.ceil();
    let bits = ceil.numer().bits() as u32;
    bits + 1
}

/// Gaussian rational: a complex number with exact rational parts.
#[derive(Clone, PartialEq, Eq)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|^2, always an exact nonnegative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact division; the divisor must be nonzero.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let n = rhs.norm_sqr();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let prod = self * &rhs.conj();
        Ok(Self { re: prod.re / &n, im: prod.im / &n })
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self { re: &self.re * factor, im: &self.im * factor }
    }
}

impl fmt::Debug for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&ComplexRational> for ComplexRational {
    fn add_assign(&mut self, rhs: &ComplexRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&ComplexRational> for ComplexRational {
    fn sub_assign(&mut self, rhs: &ComplexRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&ComplexRational> for ComplexRational {
    fn mul_assign(&mut self, rhs: &ComplexRational) {
        *self = &*self * rhs;
    }
}

/// Exactly ordered real scalars that support field arithmetic.
///
/// Implemented by `Rational` and by `QuadraticFieldElement`; lets the
/// Hermitian LDL factorization decide semidefiniteness over either field.
/// The ref-taking methods avoid cloning big coefficients in inner loops.
pub trait OrderedField: Clone + PartialEq + Zero + One {
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    /// Exact division; `other` must be nonzero.
    fn div_ref(&self, other: &Self) -> Result<Self>;
    fn neg_ref(&self) -> Self;
    /// Exact sign: -1, 0, or 1.
    fn sign(&self) -> i8;
}

impl OrderedField for Rational {
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn div_ref(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self / other)
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
    fn sign(&self) -> i8 {
        match self.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }
}

/// Converts a rational to f64 for display-only contexts.
pub fn to_f64_lossy(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
