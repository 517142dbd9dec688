//! Finite-support random vectors and expected characteristic polynomials.
//!
//! An instance is a tuple of independent random vectors, each given by an
//! explicit finite support with exact rational probabilities. The expected
//! characteristic polynomial of the rank-one sum can be computed two ways:
//! direct enumeration over all joint outcomes (the oracle, guarded), or the
//! mixed characteristic polynomial of the expectation matrices. Agreement of
//! the two routes is the determinant identity this crate is built around.

use crate::error::{Error, Result};
use crate::matrix::{loewner_leq, outer_product, HermitianMatrix, VectorC};
use crate::multilinear::mixed_char_poly;
use crate::scalar::Rational;
use crate::unipoly::{char_poly, UniPoly};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Enumeration refuses instances with more joint outcomes than this unless
/// the caller raises the guard explicitly.
pub const DEFAULT_ENUMERATION_GUARD: u64 = 1_000_000;

/// Outcome counts at or above this go through the thread pool.
const PARALLEL_THRESHOLD: u64 = 256;

/// One random vector: finite support with positive probabilities summing to 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RandomVectorSpec {
    support: Vec<(Rational, VectorC)>,
}

impl RandomVectorSpec {
    pub fn new(support: Vec<(Rational, VectorC)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidInstance("support must be nonempty".into()));
        }
        let dim = support[0].1.dim();
        let mut total = Rational::zero();
        for (prob, vector) in &support {
            if !prob.is_positive() {
                return Err(Error::InvalidInstance("probabilities must be positive".into()));
            }
            if vector.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: vector.dim() });
            }
            total += prob;
        }
        if !total.is_one() {
            return Err(Error::InvalidInstance(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { support })
    }

    /// Point mass on a single vector.
    pub fn deterministic(vector: VectorC) -> Self {
        Self { support: vec![(Rational::one(), vector)] }
    }

    pub fn dim(&self) -> usize {
        self.support[0].1.dim()
    }

    pub fn support(&self) -> &[(Rational, VectorC)] {
        &self.support
    }

    pub fn is_deterministic(&self) -> bool {
        self.support.len() == 1
    }

    /// E v v^*, an exact PSD matrix.
    pub fn expected_outer_product(&self) -> HermitianMatrix {
        let dim = self.dim();
        let mut acc = HermitianMatrix::zero(dim);
        for (prob, vector) in &self.support {
            acc = acc.add(&outer_product(vector).scale(prob)).expect("dims agree");
        }
        acc
    }

    /// E ||v||^2, an exact nonnegative rational.
    pub fn expected_norm_sqr(&self) -> Rational {
        self.support
            .iter()
            .map(|(prob, vector)| prob * vector.norm_sqr())
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// Tuple of independent random vectors in a common dimension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    dim: usize,
    specs: Vec<RandomVectorSpec>,
}

impl Instance {
    pub fn new(dim: usize, specs: Vec<RandomVectorSpec>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInstance("dimension must be positive".into()));
        }
        for spec in &specs {
            if spec.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: spec.dim() });
            }
        }
        Ok(Self { dim, specs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn specs(&self) -> &[RandomVectorSpec] {
        &self.specs
    }

    pub fn num_vectors(&self) -> usize {
        self.specs.len()
    }

    /// The expectation matrices E v_i v_i^*, in order.
    pub fn expected_matrices(&self) -> Vec<HermitianMatrix> {
        self.specs.iter().map(|s| s.expected_outer_product()).collect()
    }
}

/// Hypothesis-facing summary of an instance.
#[derive(Clone, Debug)]
pub struct InstanceStats {
    /// Sum of the expectation matrices, always PSD.
    pub expected_sum: HermitianMatrix,
    /// max_i E ||v_i||^2.
    pub eps: Rational,
    /// Whether the expected sum is below the identity in the Loewner order.
    pub sum_leq_identity: bool,
}

/// Exact hypothesis summary; instances violating the Loewner bound are
/// reported, not rejected, so callers can decide what to refuse.
pub fn instance_stats(inst: &Instance) -> InstanceStats {
    let mut expected_sum = HermitianMatrix::zero(inst.dim);
    let mut eps = Rational::zero();
    for spec in &inst.specs {
        expected_sum = expected_sum.add(&spec.expected_outer_product()).expect("dims agree");
        let norm = spec.expected_norm_sqr();
        if norm > eps {
            eps = norm;
        }
    }
    let identity = HermitianMatrix::identity(inst.dim);
    let sum_leq_identity = loewner_leq(&expected_sum, &identity).expect("dims agree");
    InstanceStats { expected_sum, eps, sum_leq_identity }
}

/// E det(xI - sum_i v_i v_i^*) by exact enumeration, default guard.
pub fn expected_char_poly_enumeration(inst: &Instance) -> Result<UniPoly> {
    expected_char_poly_enumeration_with_guard(inst, DEFAULT_ENUMERATION_GUARD)
}

/// Enumeration with a caller-chosen bound on the joint outcome count.
pub fn expected_char_poly_enumeration_with_guard(
    inst: &Instance,
    guard: u64,
) -> Result<UniPoly> {
    let families: Vec<Vec<(Rational, HermitianMatrix)>> = inst
        .specs
        .iter()
        .map(|spec| {
            spec.support
                .iter()
                .map(|(prob, vector)| (prob.clone(), outer_product(vector)))
                .collect()
        })
        .collect();
    enumerate_expected_char_poly(&HermitianMatrix::zero(inst.dim), &families, guard)
}

/// Expected characteristic polynomial by whichever exact route is open:
/// direct enumeration while the joint outcome count stays within `guard`,
/// otherwise the mixed characteristic polynomial of the expectation matrices.
/// Both routes compute the same polynomial.
pub fn expected_char_poly(inst: &Instance, guard: u64) -> Result<UniPoly> {
    let count: u128 = inst
        .specs
        .iter()
        .fold(1u128, |acc, spec| acc.saturating_mul(spec.support.len() as u128));
    if count <= guard as u128 {
        expected_char_poly_enumeration_with_guard(inst, guard)
    } else {
        mixed_char_poly(inst.dim, &inst.expected_matrices())
    }
}

/// Worker shared with the assignment search: expected characteristic
/// polynomial of base + sum of one draw from each family.
///
/// Outcomes are visited in lexicographic order of support indices; the
/// accumulated sum is exact, so the result does not depend on that order or
/// on how the range is split across threads.
pub(crate) fn enumerate_expected_char_poly(
    base: &HermitianMatrix,
    families: &[Vec<(Rational, HermitianMatrix)>],
    guard: u64,
) -> Result<UniPoly> {
    let mut count: u128 = 1;
    for family in families {
        if family.is_empty() {
            return Err(Error::InvalidInstance("support must be nonempty".into()));
        }
        count = count.saturating_mul(family.len() as u128);
    }
    if count > guard as u128 {
        return Err(Error::GuardExceeded {
            limit: guard,
            required: u64::try_from(count).unwrap_or(u64::MAX),
        });
    }
    let count = count as u64;
    let one_outcome = |index: u64| -> UniPoly {
        let mut rest = index;
        let mut weight = Rational::one();
        let mut total = base.clone();
        // Last family varies fastest: lexicographic order over indices.
        for family in families.iter().rev() {
            let choice = (rest % family.len() as u64) as usize;
            rest /= family.len() as u64;
            let (prob, matrix) = &family[choice];
            weight *= prob;
            total = total.add(matrix).expect("dims agree");
        }
        char_poly(&total).scale(&weight)
    };
    if count >= PARALLEL_THRESHOLD {
        Ok((0..count)
            .into_par_iter()
            .map(one_outcome)
            .reduce(UniPoly::zero, |a, b| &a + &b))
    } else {
        Ok((0..count).map(one_outcome).fold(UniPoly::zero(), |a, b| &a + &b))
    }
}

/// Checks that enumeration and the mixed characteristic polynomial of the
/// expectation matrices agree coefficient-by-coefficient.
pub fn verify_determinant_identity(inst: &Instance) -> Result<bool> {
    verify_determinant_identity_with_guard(inst, DEFAULT_ENUMERATION_GUARD)
}

/// Identity check with a caller-chosen enumeration guard.
pub fn verify_determinant_identity_with_guard(inst: &Instance, guard: u64) -> Result<bool> {
    let lhs = expected_char_poly_enumeration_with_guard(inst, guard)?;
    let rhs = mixed_char_poly(inst.dim, &inst.expected_matrices())?;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use crate::unipoly::is_real_rooted;

    fn poly(coeffs: &[(i64, i64)]) -> UniPoly {
        UniPoly::from_coeffs(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn uniform_basis_pair() -> Instance {
        let spec = RandomVectorSpec::new(vec![
            (rat(1, 2), VectorC::basis(2, 0)),
            (rat(1, 2), VectorC::basis(2, 1)),
        ])
        .unwrap();
        Instance::new(2, vec![spec.clone(), spec]).unwrap()
    }

    #[test]
    fn auto_route_matches_enumeration_under_any_guard() {
        let inst = uniform_basis_pair();
        let by_enumeration = expected_char_poly_enumeration(&inst).unwrap();
        // Guard 1 diverts through the mixed-characteristic route.
        assert_eq!(expected_char_poly(&inst, 1).unwrap(), by_enumeration);
        assert_eq!(expected_char_poly(&inst, 1000).unwrap(), by_enumeration);
    }

    #[test]
    fn stats_examples() {
        let inst = uniform_basis_pair();
        let stats = instance_stats(&inst);
        assert_eq!(stats.expected_sum, HermitianMatrix::identity(2));
        assert_eq!(stats.eps, rat_int(1));
        assert!(stats.sum_leq_identity);

        let det = Instance::new(
            1,
            vec![RandomVectorSpec::deterministic(VectorC::basis(1, 0))],
        )
        .unwrap();
        let stats = instance_stats(&det);
        assert_eq!(stats.expected_sum, HermitianMatrix::identity(1));
        assert_eq!(stats.eps, rat_int(1));
        assert!(stats.sum_leq_identity);

        let ones = Instance::new(
            2,
            vec![RandomVectorSpec::deterministic(
                VectorC::from_rationals(vec![rat_int(1), rat_int(1)]).unwrap(),
            )],
        )
        .unwrap();
        let stats = instance_stats(&ones);
        assert_eq!(
            stats.expected_sum,
            HermitianMatrix::from_rational_rows(vec![
                vec![rat_int(1), rat_int(1)],
                vec![rat_int(1), rat_int(1)],
            ])
            .unwrap()
        );
        assert_eq!(stats.eps, rat_int(2));
        assert!(!stats.sum_leq_identity);
    }

    #[test]
    fn enumeration_examples() {
        let det = Instance::new(
            1,
            vec![RandomVectorSpec::deterministic(VectorC::basis(1, 0))],
        )
        .unwrap();
        assert_eq!(expected_char_poly_enumeration(&det).unwrap(), poly(&[(-1, 1), (1, 1)]));

        let inst = uniform_basis_pair();
        assert_eq!(
            expected_char_poly_enumeration(&inst).unwrap(),
            poly(&[(1, 2), (-2, 1), (1, 1)])
        );

        let empty = Instance::new(3, vec![]).unwrap();
        assert_eq!(expected_char_poly_enumeration(&empty).unwrap(), UniPoly::x_pow(3));
    }

    #[test]
    fn enumeration_guard() {
        let spec = RandomVectorSpec::new(vec![
            (rat(1, 2), VectorC::basis(2, 0)),
            (rat(1, 2), VectorC::basis(2, 1)),
        ])
        .unwrap();
        let inst = Instance::new(2, vec![spec; 5]).unwrap();
        assert!(matches!(
            expected_char_poly_enumeration_with_guard(&inst, 16),
            Err(Error::GuardExceeded { limit: 16, required: 32 })
        ));
        assert!(expected_char_poly_enumeration_with_guard(&inst, 32).is_ok());
    }

    #[test]
    fn identity_examples() {
        assert!(verify_determinant_identity(&uniform_basis_pair()).unwrap());

        let det = Instance::new(
            2,
            vec![
                RandomVectorSpec::deterministic(
                    VectorC::from_rationals(vec![rat(1, 2), rat(1, 3)]).unwrap(),
                ),
                RandomVectorSpec::deterministic(
                    VectorC::from_rationals(vec![rat(-1, 4), rat(1, 1)]).unwrap(),
                ),
            ],
        )
        .unwrap();
        assert!(verify_determinant_identity(&det).unwrap());

        let stretched = Instance::new(
            1,
            vec![RandomVectorSpec::new(vec![
                (rat(1, 2), VectorC::basis(1, 0)),
                (rat(1, 2), VectorC::from_rationals(vec![rat_int(2)]).unwrap()),
            ])
            .unwrap()],
        )
        .unwrap();
        assert_eq!(
            expected_char_poly_enumeration(&stretched).unwrap(),
            poly(&[(-5, 2), (1, 1)])
        );
        assert!(verify_determinant_identity(&stretched).unwrap());
    }

    #[test]
    fn enumeration_is_monic_and_real_rooted() {
        let inst = uniform_basis_pair();
        let p = expected_char_poly_enumeration(&inst).unwrap();
        assert!(p.is_monic());
        assert_eq!(p.degree(), Some(2));
        assert!(is_real_rooted(&p).unwrap());
    }

    #[test]
    fn spec_validation() {
        assert!(RandomVectorSpec::new(vec![]).is_err());
        assert!(RandomVectorSpec::new(vec![(rat(1, 2), VectorC::basis(2, 0))]).is_err());
        assert!(RandomVectorSpec::new(vec![
            (rat(3, 2), VectorC::basis(2, 0)),
            (rat(-1, 2), VectorC::basis(2, 1)),
        ])
        .is_err());
        assert!(RandomVectorSpec::new(vec![
            (rat(1, 2), VectorC::basis(2, 0)),
            (rat(1, 2), VectorC::basis(3, 1)),
        ])
        .is_err());
        let spec = RandomVectorSpec::deterministic(VectorC::basis(2, 0));
        assert!(Instance::new(3, vec![spec]).is_err());
        assert!(Instance::new(0, vec![]).is_err());
    }
}
