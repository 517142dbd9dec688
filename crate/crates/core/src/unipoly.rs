//! Exact univariate polynomials over the rationals.
//!
//! Covers the root-side needs of the crate: characteristic polynomials,
//! real-rootedness via Sturm sequences, largest-root isolation by exact
//! bisection, and the operational interlacing check. Counting is always done
//! on the squarefree part, so repeated roots are handled correctly.

use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;
use crate::scalar::{ComplexRational, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Univariate polynomial; `coeffs[k]` is the coefficient of x^k.
///
/// The zero polynomial is the empty coefficient vector; otherwise the last
/// coefficient is nonzero.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial c * x^k.
    pub fn monomial(k: usize, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self { coeffs }
    }

    /// x^k with unit coefficient.
    pub fn x_pow(k: usize) -> Self {
        Self::monomial(k, Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() { None } else { Some(self.coeffs.len() - 1) }
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(k.into()))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of the polynomial at x: -1, 0, or 1.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Exact euclidean division: self = q * divisor + r with deg r < deg divisor.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead = divisor.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd {
            let k = r.len() - 1;
            let factor = &r[k] / &lead;
            if !factor.is_zero() {
                q[k - dd] = factor.clone();
                for (i, dc) in divisor.coeffs.iter().enumerate() {
                    let idx = k - dd + i;
                    let sub = dc * &factor;
                    r[idx] -= sub;
                }
            }
            r.pop();
        }
        Ok((Self::from_coeffs(q), Self::from_coeffs(r)))
    }

    /// Monic greatest common divisor (Euclid with monic normalization).
    pub fn monic_gcd(a: &Self, b: &Self) -> Self {
        let mut f = a.clone();
        let mut g = b.clone();
        while !g.is_zero() {
            let (_, r) = f.divrem(&g).expect("nonzero divisor");
            f = g;
            g = r;
        }
        match f.leading() {
            None => f,
            Some(lead) => {
                let inv = Rational::one() / lead;
                f.scale(&inv)
            }
        }
    }

    /// Squarefree part p / gcd(p, p'), normalized monic.
    pub fn squarefree_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == Some(0) {
            return Ok(Self::one());
        }
        let g = Self::monic_gcd(self, &self.derivative());
        let (q, r) = self.divrem(&g)?;
        debug_assert!(r.is_zero());
        let lead = q.leading().expect("nonzero quotient").clone();
        Ok(q.scale(&(Rational::one() / lead)))
    }

    /// Rational Cauchy bound: every real root lies in [-B, B].
    pub fn cauchy_root_bound(&self) -> Result<Rational> {
        let d = self.degree().ok_or(Error::ZeroPolynomial)?;
        if d == 0 {
            return Ok(Rational::one());
        }
        let lead = self.coeffs[d].abs();
        let mut max = Rational::zero();
        for c in &self.coeffs[..d] {
            let ratio = c.abs() / &lead;
            if ratio > max {
                max = ratio;
            }
        }
        Ok(max + Rational::one())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + rhs.coeff(k));
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) - rhs.coeff(k));
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(coeffs)
    }
}

/// Integer polynomial with ascending coefficients, no trailing zeros.
///
/// Chain elements are positive constant multiples of the rational Sturm
/// remainders, so every sign pattern matches.
type IntPoly = Vec<BigInt>;

fn int_trim(v: &mut IntPoly) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Divides out the coefficient gcd, keeping signs.
fn int_primitive(mut v: IntPoly) -> IntPoly {
    int_trim(&mut v);
    let mut content = BigInt::zero();
    for c in &v {
        content = content.gcd(c);
        if content.is_one() {
            return v;
        }
    }
    if !content.is_zero() {
        for c in &mut v {
            *c /= &content;
        }
    }
    v
}

/// Clears denominators: a positive rational multiple of p with integer
/// coefficients.
fn to_integer_poly(p: &UniPoly) -> IntPoly {
    let mut lcm = BigInt::one();
    for c in p.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    p.coeffs().iter().map(|c| c.numer() * (&lcm / c.denom())).collect()
}

fn int_derivative(p: &IntPoly) -> IntPoly {
    p.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect()
}

/// Pseudo-remainder scaled to a positive multiple of the true remainder.
fn int_pseudo_rem(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let df = f.len() - 1;
    let dg = g.len() - 1;
    debug_assert!(dg >= 1 && df >= dg);
    let lead = &g[dg];
    let mut r = f.clone();
    for k in (dg..=df).rev() {
        let top = std::mem::replace(&mut r[k], BigInt::zero());
        for c in r.iter_mut() {
            *c *= lead;
        }
        if !top.is_zero() {
            for (i, gc) in g[..dg].iter().enumerate() {
                r[k - dg + i] -= &top * gc;
            }
        }
        r.truncate(k);
    }
    // The multiplier is lead^(df - dg + 1); restore the sign it may flip.
    if lead.sign() == num_bigint::Sign::Minus && (df - dg) % 2 == 0 {
        for c in &mut r {
            *c = -std::mem::take(c);
        }
    }
    int_trim(&mut r);
    r
}

/// Exact division, for pulling a common factor out of the whole chain.
fn int_exact_div(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let dg = g.len() - 1;
    let lead = &g[dg];
    let mut r: Vec<Rational> = f.iter().map(|c| Rational::from_integer(c.clone())).collect();
    let mut q = vec![Rational::zero(); f.len() - dg];
    for k in (dg..f.len()).rev() {
        let factor = &r[k] / Rational::from_integer(lead.clone());
        if !factor.is_zero() {
            for (i, gc) in g.iter().enumerate() {
                let sub = Rational::from_integer(gc.clone()) * &factor;
                r[k - dg + i] -= sub;
            }
        }
        q[k - dg] = factor;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    q.iter().map(|c| {
        debug_assert!(c.is_integer());
        c.numer().clone()
    }).collect()
}

/// Sign of p at a/b without forming rationals: sign of sum c_k a^k b^(d-k).
fn int_sign_at(p: &IntPoly, x: &Rational) -> i8 {
    let Some((lead, rest)) = p.split_last() else {
        return 0;
    };
    let a = x.numer();
    let b = x.denom();
    let mut acc = lead.clone();
    let mut b_pow = BigInt::one();
    for c in rest.iter().rev() {
        b_pow *= b;
        acc = acc * a + c * &b_pow;
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

fn int_sign_at_infinity(p: &IntPoly, positive: bool) -> i8 {
    match p.last() {
        None => 0,
        Some(lead) => {
            let d = p.len() - 1;
            let pos = lead.sign() == num_bigint::Sign::Plus;
            let flip = !positive && d % 2 == 1;
            if pos != flip { 1 } else { -1 }
        }
    }
}

/// Sturm chain of the squarefree part of a polynomial.
///
/// Sign-variation differences count distinct real roots on half-open
/// intervals (a, b]. Stored as primitive integer polynomials so chain
/// construction and evaluation stay denominator-free.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &UniPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let p0 = int_primitive(to_integer_poly(p));
        if p0.len() == 1 {
            return Ok(Self { chain: vec![vec![BigInt::one()]] });
        }
        let p1 = int_primitive(int_derivative(&p0));
        let mut chain = vec![p0, p1];
        while chain.last().expect("nonempty").len() > 1 {
            let n = chain.len();
            let r = int_pseudo_rem(&chain[n - 2], &chain[n - 1]);
            if r.is_empty() {
                break;
            }
            chain.push(int_primitive(r.into_iter().map(|c| -c).collect()));
        }
        // A nonconstant final element is the gcd with the derivative; divide
        // it out so the chain belongs to the squarefree part.
        let last = chain.last().expect("nonempty").clone();
        if last.len() > 1 {
            chain = chain
                .into_iter()
                .map(|f| int_primitive(int_exact_div(&f, &last)))
                .collect();
        }
        Ok(Self { chain })
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut count = 0;
        let mut last: Option<i8> = None;
        for s in signs {
            if s == 0 {
                continue;
            }
            if let Some(prev) = last {
                if prev != s {
                    count += 1;
                }
            }
            last = Some(s);
        }
        count
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| int_sign_at(p, x)))
    }

    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.chain.iter().map(|p| int_sign_at_infinity(p, positive)))
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }

    /// Number of distinct real roots in (lo, hi].
    pub fn count_in(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo) - self.variations_at(hi)
    }

    /// Number of distinct real roots in (lo, +inf).
    pub fn count_above(&self, lo: &Rational) -> usize {
        self.variations_at(lo) - self.variations_at_infinity(true)
    }

    /// Degree of the squarefree part.
    pub fn squarefree_degree(&self) -> usize {
        self.chain[0].len().saturating_sub(1)
    }
}

/// True iff every complex root of p is real, decided exactly.
///
/// The Sturm count of the squarefree part must reach its full degree.
pub fn is_real_rooted(p: &UniPoly) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let chain = SturmChain::new(p)?;
    Ok(chain.count_real_roots() == chain.squarefree_degree())
}

/// Isolating bracket for the largest real root of a polynomial.
///
/// The polynomial has exactly one distinct real root in (lo, hi], and it is
/// the largest one.
#[derive(Clone, Debug)]
pub struct RootBracket {
    pub lo: Rational,
    pub hi: Rational,
    pub poly: UniPoly,
    chain: SturmChain,
}

impl RootBracket {
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Shrinks the bracket until its width is at most `width`.
    pub fn refine(&mut self, width: &Rational) {
        while self.width() > *width {
            let mid = self.midpoint();
            if self.chain.count_in(&mid, &self.hi) >= 1 {
                self.lo = mid;
            } else {
                self.hi = mid;
            }
        }
    }

    /// Bracket pair as exact rationals.
    pub fn bounds(&self) -> (Rational, Rational) {
        (self.lo.clone(), self.hi.clone())
    }
}

/// Brackets the largest real root by exact Sturm-count bisection.
pub fn largest_root(p: &UniPoly, width: &Rational) -> Result<RootBracket> {
    let d = p.degree().ok_or(Error::ZeroPolynomial)?;
    if d == 0 {
        return Err(Error::PreconditionFail("largest_root needs degree >= 1".into()));
    }
    if width <= &Rational::zero() {
        return Err(Error::PreconditionFail("bracket width must be positive".into()));
    }
    let chain = SturmChain::new(p)?;
    if chain.count_real_roots() != chain.squarefree_degree() {
        return Err(Error::NotRealRooted);
    }
    let bound = p.cauchy_root_bound()?;
    let mut lo = -&bound - Rational::one();
    let mut hi = bound;
    let two = Rational::from_integer(2.into());
    // Keep at least one root in (lo, hi]; stop once only the largest is left
    // and the bracket is narrow enough.
    loop {
        let count = chain.count_in(&lo, &hi);
        debug_assert!(count >= 1);
        if count == 1 && &hi - &lo <= *width {
            break;
        }
        let mid = (&lo + &hi) / &two;
        if chain.count_in(&mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(RootBracket { lo, hi, poly: p.clone(), chain })
}

/// True iff x0 is strictly above every root: p and all derivatives positive.
pub fn is_above_roots_1d(p: &UniPoly, x0: &Rational) -> Result<bool> {
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    let mut q = p.clone();
    while !q.is_zero() {
        if q.sign_at(x0) <= 0 {
            return Ok(false);
        }
        q = q.derivative();
    }
    Ok(true)
}

/// Operational consequence of common interlacing: the smallest of the
/// children's largest roots does not exceed the mixture's largest root,
/// up to `width`.
pub fn check_common_interlacing_consequence(
    children: &[UniPoly],
    weights: &[Rational],
    width: &Rational,
) -> Result<bool> {
    if children.is_empty() || children.len() != weights.len() {
        return Err(Error::PreconditionFail(
            "children and weights must be nonempty and equal length".into(),
        ));
    }
    let mut total = Rational::zero();
    for w in weights {
        if !w.is_positive() {
            return Err(Error::PreconditionFail("weights must be positive".into()));
        }
        total += w;
    }
    if !total.is_one() {
        return Err(Error::PreconditionFail("weights must sum to 1".into()));
    }
    let deg = children[0].degree();
    for c in children {
        if !c.is_monic() || c.degree() != deg {
            return Err(Error::PreconditionFail("children must be monic of equal degree".into()));
        }
        if !is_real_rooted(c)? {
            return Err(Error::PreconditionFail("children must be real-rooted".into()));
        }
    }
    let mut mixture = UniPoly::zero();
    for (c, w) in children.iter().zip(weights) {
        mixture = &mixture + &c.scale(w);
    }
    if !is_real_rooted(&mixture)? {
        return Err(Error::InterlacingViolation("mixture is not real-rooted".into()));
    }
    let quarter = width / Rational::from_integer(4.into());
    let mix_bracket = largest_root(&mixture, &quarter)?;
    let mut min_child_lo: Option<Rational> = None;
    for c in children {
        let b = largest_root(c, &quarter)?;
        if min_child_lo.as_ref().is_none_or(|m| &b.lo < m) {
            min_child_lo = Some(b.lo);
        }
    }
    let min_lo = min_child_lo.expect("children nonempty");
    Ok(min_lo <= &mix_bracket.hi + width)
}

/// Monic characteristic polynomial det(xI - M), computed exactly.
///
/// The matrix is split into connected sparsity blocks first; each block goes
/// through the Faddeev-LeVerrier recursion over the Gaussian rationals.
pub fn char_poly(m: &HermitianMatrix) -> UniPoly {
    let mut result = UniPoly::one();
    for block in m.sparsity_components() {
        let sub: Vec<Vec<ComplexRational>> = block
            .iter()
            .map(|&j| block.iter().map(|&k| m.entry(j, k).clone()).collect())
            .collect();
        result = &result * &char_poly_block(&sub);
    }
    result
}

fn char_poly_block(a: &[Vec<ComplexRational>]) -> UniPoly {
    let n = a.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    // Faddeev-LeVerrier: M_1 = A, c_{n-k} = -tr(M_k)/k, M_{k+1} = A(M_k + c_{n-k} I).
    let mut mk = a.to_vec();
    for k in 1..=n {
        let mut tr = ComplexRational::zero();
        for j in 0..n {
            tr += &mk[j][j];
        }
        let c = tr.scale(&(-Rational::one() / Rational::from_integer(k.into())));
        assert!(c.is_real(), "characteristic polynomial of a Hermitian matrix is real");
        coeffs[n - k] = c.re.clone();
        if k == n {
            break;
        }
        for j in 0..n {
            let shifted = &mk[j][j] + &c;
            mk[j][j] = shifted;
        }
        mk = complex_mat_mul(a, &mk);
    }
    UniPoly::from_coeffs(coeffs)
}

fn complex_mat_mul(a: &[Vec<ComplexRational>], b: &[Vec<ComplexRational>]) -> Vec<Vec<ComplexRational>> {
    let n = a.len();
    let mut out = vec![vec![ComplexRational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                let prod = &a[i][k] * &b[k][j];
                out[i][j] += &prod;
            }
        }
    }
    out
}
