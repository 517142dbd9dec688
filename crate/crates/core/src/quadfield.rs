//! Exact arithmetic in real quadratic extensions of the rationals.
//!
//! Values have the form a + b*sqrt(r) for rationals a, b and a fixed
//! nonnegative radicand r. Construction folds perfect-square radicands into
//! the rational part, so a nonzero b always multiplies an irrational root;
//! signs and comparisons are then decided exactly by case analysis, never by
//! floating point.
//!
//! Elements from different radicands do not mix: the arithmetic accepts a
//! rational operand (radicand folded away) on either side, and panics on two
//! distinct irrational radicands. Every computation in this crate works
//! inside a single extension at a time.

use crate::error::{Error, Result};
use crate::scalar::{decimal_approx, rational_sqrt_bounds, rational_sqrt_exact, OrderedField, Rational};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Element a + b*sqrt(r) of a real quadratic field.
///
/// Invariant: if b == 0 then r == 0; if b != 0 then r is positive and not a
/// perfect square, so sqrt(r) is irrational and the representation is unique.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadraticFieldElement {
    a: Rational,
    b: Rational,
    r: Rational,
}

impl QuadraticFieldElement {
    /// Builds a + b*sqrt(r); the radicand must be nonnegative.
    pub fn new(a: Rational, b: Rational, r: Rational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::NegativeRadicand);
        }
        if b.is_zero() || r.is_zero() {
            return Ok(Self::rational(a));
        }
        if let Some(root) = rational_sqrt_exact(&r) {
            return Ok(Self::rational(a + b * root));
        }
        Ok(Self { a, b, r })
    }

    /// Embeds a rational value.
    pub fn rational(a: Rational) -> Self {
        Self { a, b: Rational::zero(), r: Rational::zero() }
    }

    /// sqrt(r) as a field element.
    pub fn sqrt(r: Rational) -> Result<Self> {
        Self::new(Rational::zero(), Rational::one(), r)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_coeff(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &Rational {
        &self.r
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The exact rational value, if the element is rational.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.is_rational() { Some(self.a.clone()) } else { None }
    }

    /// Shared radicand for a binary operation. A rational operand adapts to
    /// the other side; two distinct irrational radicands are a caller bug.
    fn merged_radicand(&self, other: &Self) -> Rational {
        if self.b.is_zero() {
            other.r.clone()
        } else if other.b.is_zero() {
            self.r.clone()
        } else {
            assert_eq!(self.r, other.r, "operands live in different quadratic fields");
            self.r.clone()
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::rational(Rational::zero());
        }
        Self { a: &self.a * factor, b: &self.b * factor, r: self.r.clone() }
    }

    /// Exact division; the divisor must be nonzero.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if rhs.b.is_zero() {
            return Ok(self.scale(&(Rational::one() / &rhs.a)));
        }
        // 1/(a + b*sqrt(r)) = (a - b*sqrt(r)) / (a^2 - b^2 r); the denominator
        // is nonzero because sqrt(r) is irrational.
        let denom = &rhs.a * &rhs.a - &rhs.b * &rhs.b * &rhs.r;
        assert!(!denom.is_zero(), "irrational root cannot satisfy a^2 = b^2 r");
        let conj = Self { a: rhs.a.clone(), b: -rhs.b.clone(), r: rhs.r.clone() };
        Ok((self * &conj).scale(&(Rational::one() / denom)))
    }

    /// Exact sign: -1, 0, or 1.
    pub fn sign(&self) -> i8 {
        let sa = rational_sign(&self.a);
        if self.b.is_zero() {
            return sa;
        }
        let sb = rational_sign(&self.b);
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: compare a^2 against b^2 r. Equality cannot happen
        // for an irrational root.
        let diff = &self.a * &self.a - &self.b * &self.b * &self.r;
        let s = rational_sign(&diff);
        debug_assert!(s != 0);
        if sa > 0 { s } else { -s }
    }

    /// Rational bracket [lo, hi] around the exact value with hi - lo <= tol.
    pub fn bounds(&self, tol: &Rational) -> Result<(Rational, Rational)> {
        if self.b.is_zero() {
            return Ok((self.a.clone(), self.a.clone()));
        }
        let scaled_tol = tol / self.b.abs();
        let (root_lo, root_hi) = rational_sqrt_bounds(&self.r, &scaled_tol)?;
        if self.b.is_positive() {
            Ok((&self.a + &self.b * root_lo, &self.a + &self.b * root_hi))
        } else {
            Ok((&self.a + &self.b * root_hi, &self.a + &self.b * root_lo))
        }
    }

    /// Rational upper bound within tol of the exact value.
    pub fn upper_bound(&self, tol: &Rational) -> Result<Rational> {
        Ok(self.bounds(tol)?.1)
    }

    /// Rational lower bound within tol of the exact value.
    pub fn lower_bound(&self, tol: &Rational) -> Result<Rational> {
        Ok(self.bounds(tol)?.0)
    }

    /// Decimal approximation for reports; exact when the element is rational.
    pub fn approx_decimal(&self, significant: usize) -> String {
        if let Some(q) = self.to_rational() {
            return decimal_approx(&q, significant);
        }
        let tol = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(significant as u32 + 4));
        let (lo, _) = self.bounds(&tol).expect("nonnegative radicand by invariant");
        decimal_approx(&lo, significant)
    }
}

fn rational_sign(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

impl fmt::Debug for QuadraticFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.r)
        }
    }
}

impl Add for &QuadraticFieldElement {
    type Output = QuadraticFieldElement;
    fn add(self, rhs: &QuadraticFieldElement) -> QuadraticFieldElement {
        let r = self.merged_radicand(rhs);
        QuadraticFieldElement::new(&self.a + &rhs.a, &self.b + &rhs.b, r)
            .expect("radicand stays nonnegative")
    }
}

impl Sub for &QuadraticFieldElement {
    type Output = QuadraticFieldElement;
    fn sub(self, rhs: &QuadraticFieldElement) -> QuadraticFieldElement {
        self + &(-rhs)
    }
}

impl Neg for &QuadraticFieldElement {
    type Output = QuadraticFieldElement;
    fn neg(self) -> QuadraticFieldElement {
        QuadraticFieldElement { a: -self.a.clone(), b: -self.b.clone(), r: self.r.clone() }
    }
}

impl Mul for &QuadraticFieldElement {
    type Output = QuadraticFieldElement;
    fn mul(self, rhs: &QuadraticFieldElement) -> QuadraticFieldElement {
        let r = self.merged_radicand(rhs);
        let a = &self.a * &rhs.a + &self.b * &rhs.b * &r;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadraticFieldElement::new(a, b, r).expect("radicand stays nonnegative")
    }
}

impl Add for QuadraticFieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Sub for QuadraticFieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Mul for QuadraticFieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Neg for QuadraticFieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        -&self
    }
}

impl Zero for QuadraticFieldElement {
    fn zero() -> Self {
        Self::rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadraticFieldElement {
    fn one() -> Self {
        Self::rational(Rational::one())
    }
}

impl PartialOrd for QuadraticFieldElement {
    /// Exact order within a shared radicand; None across distinct fields.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if !self.b.is_zero() && !other.b.is_zero() && self.r != other.r {
            return None;
        }
        Some(match (self - other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }
}

impl OrderedField for QuadraticFieldElement {
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn div_ref(&self, other: &Self) -> Result<Self> {
        self.div(other)
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn sign(&self) -> i8 {
        QuadraticFieldElement::sign(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn q(a: (i64, i64), b: (i64, i64), r: (i64, i64)) -> QuadraticFieldElement {
        QuadraticFieldElement::new(rat(a.0, a.1), rat(b.0, b.1), rat(r.0, r.1)).unwrap()
    }

    #[test]
    fn perfect_squares_fold_into_rationals() {
        let x = q((1, 1), (2, 1), (9, 4));
        assert_eq!(x.to_rational(), Some(rat_int(4)));
        let y = QuadraticFieldElement::sqrt(rat(1, 4)).unwrap();
        assert_eq!(y.to_rational(), Some(rat(1, 2)));
        let z = QuadraticFieldElement::sqrt(rat(1, 2)).unwrap();
        assert!(z.to_rational().is_none());
        assert!(QuadraticFieldElement::sqrt(rat_int(-1)).is_err());
    }

    #[test]
    fn exact_signs() {
        assert_eq!(q((1, 1), (-1, 1), (2, 1)).sign(), -1); // 1 - sqrt(2)
        assert_eq!(q((2, 1), (-1, 1), (2, 1)).sign(), 1); // 2 - sqrt(2)
        assert_eq!(q((-1, 1), (1, 1), (2, 1)).sign(), 1); // sqrt(2) - 1
        assert_eq!(q((-2, 1), (1, 1), (2, 1)).sign(), -1); // sqrt(2) - 2
        assert_eq!(q((0, 1), (1, 1), (2, 1)).sign(), 1);
        assert_eq!(QuadraticFieldElement::zero().sign(), 0);
    }

    #[test]
    fn field_arithmetic() {
        let one_plus = q((1, 1), (1, 1), (2, 1));
        let one_minus = q((1, 1), (-1, 1), (2, 1));
        let prod = &one_plus * &one_minus;
        assert_eq!(prod.to_rational(), Some(rat_int(-1)));

        let inv = QuadraticFieldElement::one().div(&one_plus).unwrap();
        assert_eq!(inv, q((-1, 1), (1, 1), (2, 1))); // sqrt(2) - 1
        let back = &inv * &one_plus;
        assert_eq!(back.to_rational(), Some(rat_int(1)));

        assert!(QuadraticFieldElement::one().div(&QuadraticFieldElement::zero()).is_err());
    }

    #[test]
    fn rational_operands_adapt() {
        let half = QuadraticFieldElement::rational(rat(1, 2));
        let root = QuadraticFieldElement::sqrt(rat_int(2)).unwrap();
        let sum = &half + &root;
        assert_eq!(sum.rational_part(), &rat(1, 2));
        assert_eq!(sum.radicand(), &rat_int(2));
        let scaled = root.scale(&rat(3, 1));
        assert_eq!(scaled.radical_coeff(), &rat_int(3));
    }

    #[test]
    fn ordering_and_bounds() {
        // 1 + sqrt(1/2) against nearby rationals.
        let x = q((1, 1), (1, 1), (1, 2));
        let lo = QuadraticFieldElement::rational(rat(17, 10));
        let hi = QuadraticFieldElement::rational(rat(171, 100));
        assert!(lo < x && x < hi);

        let tol = rat(1, 1 << 30);
        let (blo, bhi) = x.bounds(&tol).unwrap();
        assert!(&bhi - &blo <= tol);
        assert!(QuadraticFieldElement::rational(blo) <= x);
        assert!(x <= QuadraticFieldElement::rational(bhi));

        assert_eq!(x.approx_decimal(12), "1.70710678118");
    }

    #[test]
    fn threshold_expansion() {
        // (1 + sqrt(e))^2 = 1 + e + 2 sqrt(e), here with e = 1/2.
        let root = QuadraticFieldElement::sqrt(rat(1, 2)).unwrap();
        let one = QuadraticFieldElement::one();
        let s = &one + &root;
        let sq = &s * &s;
        assert_eq!(sq.rational_part(), &rat(3, 2));
        assert_eq!(sq.radical_coeff(), &rat_int(2));
        assert_eq!(sq.radicand(), &rat(1, 2));
    }
}
