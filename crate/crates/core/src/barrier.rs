//! Barrier functions and the square-root threshold certificate.
//!
//! For the determinantal polynomial P(x, z) = det(xI + sum_k z_k A_k), the
//! barrier in direction i at a point above the roots is the logarithmic
//! derivative d/dz_i log P, equal to Tr(M^-1 A_i) for the pencil value M.
//! The certificate pipeline instantiates the proof point x = (1+sqrt(eps))^2,
//! t = -1-sqrt(eps) in an exact quadratic field, verifies the barrier bound
//! and the shift inequality that drive the argument, and confirms the
//! headline: the largest root of the mixed characteristic polynomial stays
//! below the threshold.
//!
//! Above-roots membership is implemented by the sufficient condition that the
//! pencil is positive definite; root tracking of the multivariate polynomial
//! is never attempted.

use crate::error::{Error, Result};
use crate::matrix::{
    hermitian_psd_status, is_psd, loewner_leq, solve_complex, HermitianMatrix, PsdStatus,
};
use crate::multilinear::mixed_char_poly;
use crate::quadfield::QuadraticFieldElement;
use crate::scalar::{ComplexRational, Rational};
use crate::unipoly::{largest_root, RootBracket, UniPoly};
use num_traits::{One, Signed, Zero};

/// Evaluation point (x, z_1..z_m) for the pencil xI + sum z_k A_k.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvaluationPoint {
    pub x: Rational,
    pub z: Vec<Rational>,
}

impl EvaluationPoint {
    pub fn new(x: Rational, z: Vec<Rational>) -> Self {
        Self { x, z }
    }

    /// The all-equal point (x, t, t, ..., t).
    pub fn uniform(x: Rational, t: &Rational, m: usize) -> Self {
        Self { x, z: vec![t.clone(); m] }
    }

    fn shifted(&self, j: usize, delta: &Rational) -> Self {
        let mut z = self.z.clone();
        z[j] = &z[j] + delta;
        Self { x: self.x.clone(), z }
    }
}

/// Exact certificate that the largest root of the mixed characteristic
/// polynomial lies below (1 + sqrt(eps))^2.
///
/// The threshold and its companions are carried exactly in Q(sqrt(eps)).
/// `phi_upper` is the barrier bound eps/(x + t) used by the proof; it is an
/// element of the same field because a strictly rational upper bound would
/// break the exact relation delta = 1/(1 - phi).
#[derive(Clone, Debug)]
pub struct BarrierCertificate {
    pub eps: Rational,
    /// (1 + sqrt(eps))^2, the root threshold.
    pub x_threshold: QuadraticFieldElement,
    /// -1 - sqrt(eps), the common starting coordinate.
    pub t_shift: QuadraticFieldElement,
    /// 1 + sqrt(eps), the per-variable shift budget.
    pub delta: QuadraticFieldElement,
    /// Upper bound on every directional barrier at the starting point.
    pub phi_upper: QuadraticFieldElement,
    /// Mixed characteristic polynomial of the input family.
    pub mu: UniPoly,
    /// Isolating bracket for the largest root of mu.
    pub largest_root_bracket: RootBracket,
    /// Rational upper approximation of the threshold, within the bracket width.
    pub threshold_upper: Rational,
    pub certified: bool,
}

/// Default bracket width 2^-40, matching the report tolerance.
pub fn default_bracket_width() -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(1u64 << 40))
}

/// Pencil value M = x I + sum_k z_k A_k as raw complex rows.
fn pencil_at(
    matrices: &[HermitianMatrix],
    point: &EvaluationPoint,
) -> Result<Vec<Vec<ComplexRational>>> {
    if matrices.is_empty() {
        return Err(Error::PreconditionFail("pencil needs at least one matrix".into()));
    }
    if point.z.len() != matrices.len() {
        return Err(Error::DimensionMismatch { expected: matrices.len(), got: point.z.len() });
    }
    let dim = matrices[0].dim();
    for a in matrices {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: a.dim() });
        }
    }
    let mut rows = vec![vec![ComplexRational::zero(); dim]; dim];
    for (r, row) in rows.iter_mut().enumerate() {
        for (c, value) in row.iter_mut().enumerate() {
            let mut acc = ComplexRational::zero();
            for (a, zk) in matrices.iter().zip(&point.z) {
                acc += &a.entry(r, c).scale(zk);
            }
            if r == c {
                acc += &ComplexRational::from_rational(point.x.clone());
            }
            *value = acc;
        }
    }
    Ok(rows)
}

fn rows_are_pd(rows: &[Vec<ComplexRational>]) -> bool {
    let entry = |j: usize, k: usize| (rows[j][k].re.clone(), rows[j][k].im.clone());
    hermitian_psd_status(rows.len(), entry) == PsdStatus::PositiveDefinite
}

/// True iff the pencil at the point is positive definite, the operational
/// stand-in for "above the roots".
pub fn is_above_roots_det(
    matrices: &[HermitianMatrix],
    point: &EvaluationPoint,
) -> Result<bool> {
    let rows = pencil_at(matrices, point)?;
    Ok(rows_are_pd(&rows))
}

/// Barrier value Tr(M^-1 A_i) at a point with positive definite pencil M,
/// computed by exact linear solves; no inverse is materialized.
pub fn barrier_value(
    matrices: &[HermitianMatrix],
    point: &EvaluationPoint,
    i: usize,
) -> Result<Rational> {
    if i >= matrices.len() {
        return Err(Error::PreconditionFail(format!(
            "direction {i} out of range for {} matrices",
            matrices.len()
        )));
    }
    let rows = pencil_at(matrices, point)?;
    if !rows_are_pd(&rows) {
        return Err(Error::NotAboveRoots);
    }
    let dim = rows.len();
    let a = &matrices[i];
    let b_cols: Vec<Vec<ComplexRational>> =
        (0..dim).map(|c| (0..dim).map(|r| a.entry(r, c).clone()).collect()).collect();
    let solution = solve_complex(&rows, &b_cols)
        .ok_or_else(|| Error::Internal("positive definite pencil failed to solve".into()))?;
    let mut trace = ComplexRational::zero();
    for (c, col) in solution.iter().enumerate() {
        trace += &col[c];
    }
    if !trace.is_real() {
        return Err(Error::Internal("barrier trace has a complex value".into()));
    }
    Ok(trace.re)
}

/// Determinant with selected columns taken from other matrices.
fn det_with_columns_replaced(
    base: &[Vec<ComplexRational>],
    replacements: &[(usize, &HermitianMatrix)],
) -> ComplexRational {
    let mut rows = base.to_vec();
    for &(col, a) in replacements {
        for (r, row) in rows.iter_mut().enumerate() {
            row[col] = a.entry(r, col).clone();
        }
    }
    crate::matrix::det_complex(&rows)
}

/// d/dz_j P at the point: sum over single column replacements.
fn pencil_derivative(base: &[Vec<ComplexRational>], a_j: &HermitianMatrix) -> ComplexRational {
    let dim = base.len();
    let mut acc = ComplexRational::zero();
    for c in 0..dim {
        acc += &det_with_columns_replaced(base, &[(c, a_j)]);
    }
    acc
}

/// d^2/dz_i dz_j P at the point: ordered pairs of distinct column replacements.
fn pencil_second_derivative(
    base: &[Vec<ComplexRational>],
    a_i: &HermitianMatrix,
    a_j: &HermitianMatrix,
) -> ComplexRational {
    let dim = base.len();
    let mut acc = ComplexRational::zero();
    for c1 in 0..dim {
        for c2 in 0..dim {
            if c1 == c2 {
                continue;
            }
            acc += &det_with_columns_replaced(base, &[(c1, a_i), (c2, a_j)]);
        }
    }
    acc
}

fn real_part(value: ComplexRational, what: &str) -> Result<Rational> {
    if !value.is_real() {
        return Err(Error::Internal(format!("{what} has a complex value")));
    }
    Ok(value.re)
}

/// Checks the barrier shift inequality: after applying (1 - d/dz_j) and
/// stepping z_j by delta, the barrier in direction i has not increased.
///
/// The shift budget must cover the barrier in the queried direction and in
/// the shifted one; the latter is what the imported inequality consumes, and
/// the two coincide in the uniform setting the certificate uses.
pub fn check_barrier_shift(
    matrices: &[HermitianMatrix],
    point: &EvaluationPoint,
    i: usize,
    j: usize,
    delta: &Rational,
) -> Result<bool> {
    if i >= matrices.len() || j >= matrices.len() {
        return Err(Error::PreconditionFail(format!(
            "directions ({i}, {j}) out of range for {} matrices",
            matrices.len()
        )));
    }
    let phi_i = barrier_value(matrices, point, i)?;
    let phi_j = barrier_value(matrices, point, j)?;
    for phi in [&phi_i, &phi_j] {
        if phi >= &Rational::one() {
            return Err(Error::PreconditionFail("barrier must be below 1".into()));
        }
        let needed = Rational::one() / (Rational::one() - phi);
        if delta < &needed {
            return Err(Error::PreconditionFail(format!(
                "shift {delta} is below the required {needed}"
            )));
        }
    }
    let shifted = point.shifted(j, delta);
    let base = pencil_at(matrices, &shifted)?;
    if !rows_are_pd(&base) {
        return Err(Error::NotAboveRoots);
    }
    let p = real_part(crate::matrix::det_complex(&base), "pencil determinant")?;
    let dp_j = real_part(pencil_derivative(&base, &matrices[j]), "pencil derivative")?;
    let dp_i = real_part(pencil_derivative(&base, &matrices[i]), "pencil derivative")?;
    let dp_ij = real_part(
        pencil_second_derivative(&base, &matrices[i], &matrices[j]),
        "pencil second derivative",
    )?;
    // Q = (1 - d/dz_j) P; the shifted point must stay above the roots of Q.
    let q = &p - &dp_j;
    if !q.is_positive() {
        return Err(Error::NotAboveRoots);
    }
    let phi_q_i = (dp_i - dp_ij) / q;
    Ok(phi_q_i <= phi_i)
}

/// Certifies the square-root threshold for a family of PSD matrices.
///
/// Hypotheses checked exactly: every A_i PSD, sum A_i below the identity,
/// Tr A_i <= eps. The certificate carries the threshold (1 + sqrt(eps))^2 and
/// the barrier data of the proof; `certified` asserts that the pencil at the
/// proof point is positive definite in the quadratic field, that the barrier
/// bound phi = eps/(x+t) is below 1 with delta >= 1/(1-phi), and that the
/// largest root of mu stays weakly below the rational upper approximation of
/// the threshold.
pub fn certify_threshold(
    dim: usize,
    matrices: &[HermitianMatrix],
    eps: &Rational,
) -> Result<BarrierCertificate> {
    certify_threshold_with_width(dim, matrices, eps, &default_bracket_width())
}

/// Certificate with a caller-chosen bracket width for the root isolation.
pub fn certify_threshold_with_width(
    dim: usize,
    matrices: &[HermitianMatrix],
    eps: &Rational,
    width: &Rational,
) -> Result<BarrierCertificate> {
    if eps.is_negative() {
        return Err(Error::HypothesisViolated("eps is negative".into()));
    }
    for (idx, a) in matrices.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: a.dim() });
        }
        if !is_psd(a) {
            return Err(Error::HypothesisViolated(format!(
                "matrix {idx} is not positive semidefinite"
            )));
        }
        if &a.trace() > eps {
            return Err(Error::HypothesisViolated(format!(
                "trace of matrix {idx} exceeds eps"
            )));
        }
    }
    let sum = HermitianMatrix::sum(dim, matrices.iter().cloned())?;
    if !loewner_leq(&sum, &HermitianMatrix::identity(dim))? {
        return Err(Error::HypothesisViolated(
            "sum of matrices is not below the identity".into(),
        ));
    }

    let root = QuadraticFieldElement::sqrt(eps.clone())?;
    let one = QuadraticFieldElement::one();
    let one_plus_root = &one + &root;
    let x_threshold = &one_plus_root * &one_plus_root;
    let t_shift = -&one_plus_root;
    let delta = one_plus_root.clone();

    // Pencil positivity at the proof point, decided in the quadratic field.
    let pencil_pd = {
        let entry = |j: usize, k: usize| {
            let s = sum.entry(j, k);
            let mut re = t_shift.scale(&s.re);
            let im = t_shift.scale(&s.im);
            if j == k {
                re = &re + &x_threshold;
            }
            (re, im)
        };
        hermitian_psd_status(dim, entry) == PsdStatus::PositiveDefinite
    };

    // Barrier bound phi = eps/(x + t); zero eps forces a zero family, where
    // the barrier vanishes identically.
    let phi_upper = if eps.is_zero() {
        QuadraticFieldElement::zero()
    } else {
        let x_plus_t = &x_threshold + &t_shift;
        QuadraticFieldElement::rational(eps.clone()).div(&x_plus_t)?
    };
    let phi_below_one = (&one - &phi_upper).sign() > 0;
    let delta_covers = phi_below_one && {
        let needed = one.div(&(&one - &phi_upper))?;
        (&delta - &needed).sign() >= 0
    };

    let mu = mixed_char_poly(dim, matrices)?;
    let largest_root_bracket = largest_root(&mu, width)?;
    let threshold_upper = x_threshold.upper_bound(width)?;
    let bound_holds = largest_root_bracket.hi <= &threshold_upper + width;

    Ok(BarrierCertificate {
        eps: eps.clone(),
        x_threshold,
        t_shift,
        delta,
        phi_upper,
        mu,
        largest_root_bracket,
        threshold_upper,
        certified: pencil_pd && phi_below_one && delta_covers && bound_holds,
    })
}
