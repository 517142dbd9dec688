//! Constructive search: greedy interlacing descent, exhaustive oracles, and
//! the block lifting behind vector partitioning.
//!
//! The greedy walks the specs in input order. At each step it scores every
//! support choice by the largest root of the conditional expected
//! characteristic polynomial (past choices fixed, future vectors still
//! random) and keeps the smallest. Interlacing guarantees that some choice
//! does not exceed the parent root; that is re-checked at every step.
//!
//! Lifting works at the Gram level. Each vector is replaced by a random
//! block embedding whose support is stored as outer products scaled by r,
//! so the sqrt(r) factor never has to appear as a vector entry.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expectation::{enumerate_expected_char_poly, Instance, DEFAULT_ENUMERATION_GUARD};
use crate::matrix::{is_psd, loewner_leq, outer_product, HermitianMatrix, VectorC};
use crate::multilinear::mixed_char_poly;
use crate::quadfield::QuadraticFieldElement;
use crate::scalar::{rat_int, Rational};
use crate::unipoly::{char_poly, largest_root, RootBracket, UniPoly};

/// The partition oracle refuses more block assignments than this unless the
/// caller raises the guard explicitly.
pub const DEFAULT_PARTITION_GUARD: u64 = 6561;

/// Bisection rounds spent separating near-tied candidates before the tie is
/// accepted as real and broken by index.
const MAX_SELECTION_REFINEMENTS: usize = 6;

/// Outcome counts at or above this go through the thread pool.
const PARALLEL_THRESHOLD: u64 = 256;

/// One concrete outcome: a support index per random vector.
#[derive(Clone, Debug)]
pub struct Assignment {
    /// Support index chosen for each spec, in spec order.
    pub chosen: Vec<usize>,
    /// The support vectors at the chosen indices.
    pub realized_vectors: Vec<VectorC>,
    /// Bracket for the operator norm of the realized rank-one sum. The sum
    /// is positive semidefinite, so its norm is its largest eigenvalue.
    pub realized_norm_bracket: (Rational, Rational),
}

/// A random positive semidefinite matrix of rank at most one with finite
/// support.
///
/// This is the Gram-level stand-in for a random vector whose entries may
/// involve square roots: downstream machinery only ever consumes the outer
/// product, which stays rational even when the vector does not.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RandomMatrixSpec {
    support: Vec<(Rational, HermitianMatrix)>,
}

impl RandomMatrixSpec {
    pub fn new(support: Vec<(Rational, HermitianMatrix)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidInstance("support must be nonempty".into()));
        }
        let dim = support[0].1.dim();
        let mut total = Rational::zero();
        for (prob, matrix) in &support {
            if !prob.is_positive() {
                return Err(Error::InvalidInstance("probabilities must be positive".into()));
            }
            if matrix.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: matrix.dim() });
            }
            if !is_psd(matrix) {
                return Err(Error::NotPsd);
            }
            if !rank_at_most_one(matrix) {
                return Err(Error::InvalidInstance(
                    "support matrices must have rank at most one".into(),
                ));
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

    pub fn dim(&self) -> usize {
        self.support[0].1.dim()
    }

    pub fn support(&self) -> &[(Rational, HermitianMatrix)] {
        &self.support
    }

    pub fn expected_matrix(&self) -> HermitianMatrix {
        let dim = self.dim();
        HermitianMatrix::sum(dim, self.support.iter().map(|(p, m)| m.scale(p)))
            .expect("support dims agree")
    }

    pub fn expected_trace(&self) -> Rational {
        self.support
            .iter()
            .map(|(p, m)| p * &m.trace())
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// The r-block embedding of a vector family, stored at the Gram level.
#[derive(Clone, Debug)]
pub struct LiftedSystem {
    pub r: usize,
    pub base_dim: usize,
    /// Spec i draws, uniformly over blocks k, the matrix r * w w^* where w
    /// is vector i embedded in block k.
    pub lifted_specs: Vec<RandomMatrixSpec>,
}

impl LiftedSystem {
    pub fn lifted_dim(&self) -> usize {
        self.r * self.base_dim
    }

    pub fn expected_matrices(&self) -> Vec<HermitianMatrix> {
        self.lifted_specs.iter().map(RandomMatrixSpec::expected_matrix).collect()
    }
}

/// An r-way split of the vector indices with certified block norms.
#[derive(Clone, Debug)]
pub struct Partition {
    /// Index sets, one per block, ascending within each block. Blocks may be
    /// empty; together they cover every vector index exactly once.
    pub blocks: Vec<Vec<usize>>,
    /// Operator-norm bracket of the outer-product sum over each block.
    pub block_norm_brackets: Vec<(Rational, Rational)>,
    /// (1/r)(1 + sqrt(r * delta))^2 exactly. The oracle fills this with the
    /// smallest delta the vectors satisfy.
    pub bound: QuadraticFieldElement,
    /// Rational upper approximation of `bound`.
    pub bound_upper: Rational,
}

/// Every 2x2 minor vanishes exactly when the matrix has rank at most one.
fn rank_at_most_one(m: &HermitianMatrix) -> bool {
    let d = m.dim();
    for r1 in 0..d {
        for r2 in r1 + 1..d {
            for c1 in 0..d {
                for c2 in c1 + 1..d {
                    let det = &(m.entry(r1, c1) * m.entry(r2, c2))
                        - &(m.entry(r1, c2) * m.entry(r2, c1));
                    if !det.re.is_zero() || !det.im.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn clamp_nonnegative(lo: Rational) -> Rational {
    if lo.is_negative() {
        Rational::zero()
    } else {
        lo
    }
}

fn outcome_count(families: &[Vec<(Rational, HermitianMatrix)>]) -> u128 {
    families.iter().fold(1u128, |acc, f| acc.saturating_mul(f.len() as u128))
}

/// Enumeration is cheaper than the mixed-characteristic route only while the
/// joint future support stays small; past this point the mixed route wins by
/// a widening margin.
const CONDITIONAL_ENUMERATION_CROSSOVER: u64 = 128;

/// Conditional expected characteristic polynomial: everything in `fixed` is
/// already chosen, every family in `future` is still random. Enumerates when
/// the joint future support is small, otherwise takes the
/// mixed-characteristic route on the expectations; the two agree by the
/// determinant identity.
fn conditional_expected_char_poly(
    dim: usize,
    fixed: &[HermitianMatrix],
    future: &[Vec<(Rational, HermitianMatrix)>],
    future_expectations: &[HermitianMatrix],
    guard: u64,
) -> Result<UniPoly> {
    if outcome_count(future) <= guard.min(CONDITIONAL_ENUMERATION_CROSSOVER) as u128 {
        let base = HermitianMatrix::sum(dim, fixed.iter().cloned())?;
        enumerate_expected_char_poly(&base, future, guard)
    } else {
        let matrices: Vec<HermitianMatrix> =
            fixed.iter().chain(future_expectations.iter()).cloned().collect();
        mixed_char_poly(dim, &matrices)
    }
}

fn argmin_midpoint(brackets: &[RootBracket]) -> (usize, Rational) {
    let mut min_idx = 0;
    let mut min_mid = brackets[0].midpoint();
    for (j, b) in brackets.iter().enumerate().skip(1) {
        let mid = b.midpoint();
        if mid < min_mid {
            min_idx = j;
            min_mid = mid;
        }
    }
    (min_idx, min_mid)
}

/// Index of the bracket with the smallest midpoint. Candidates within four
/// widths of the minimum are refined and re-compared a bounded number of
/// times, since exactly tied roots are possible; surviving ties resolve to
/// the lowest index.
fn select_min_bracket(brackets: &mut [RootBracket], width: &Rational) -> usize {
    let four = rat_int(4);
    let two = rat_int(2);
    let mut w = width.clone();
    for _ in 0..MAX_SELECTION_REFINEMENTS {
        let (min_idx, min_mid) = argmin_midpoint(brackets);
        let cutoff = &min_mid + &(&four * &w);
        let close: Vec<usize> = (0..brackets.len())
            .filter(|&j| j != min_idx && brackets[j].midpoint() <= cutoff)
            .collect();
        if close.is_empty() {
            return min_idx;
        }
        w = &w / &two;
        brackets[min_idx].refine(&w);
        for j in close {
            brackets[j].refine(&w);
        }
    }
    argmin_midpoint(brackets).0
}

struct GreedyOutcome {
    chosen: Vec<usize>,
    realized_bracket: RootBracket,
}

/// Descends the outcome tree one family at a time, always keeping the child
/// with the smallest largest root.
///
/// Per-step slack is width / (4 max(m, 1)): midpoint selection can pick a
/// root up to one bracket width above the true minimum, so m steps stay
/// within width / 4 of the expectation root overall.
fn greedy_core(
    dim: usize,
    families: &[Vec<(Rational, HermitianMatrix)>],
    expectations: &[HermitianMatrix],
    width: &Rational,
    guard: u64,
) -> Result<GreedyOutcome> {
    debug_assert_eq!(families.len(), expectations.len());
    let m = families.len();
    let step_width = width / &rat_int(4 * m.max(1) as i64);
    let root_poly = conditional_expected_char_poly(dim, &[], families, expectations, guard)?;
    let mut parent = largest_root(&root_poly, &step_width)?;
    let mut fixed: Vec<HermitianMatrix> = Vec::with_capacity(m);
    let mut chosen = Vec::with_capacity(m);
    for i in 0..m {
        let future = &families[i + 1..];
        let future_expectations = &expectations[i + 1..];
        let mut brackets = Vec::with_capacity(families[i].len());
        for (_, support_matrix) in &families[i] {
            fixed.push(support_matrix.clone());
            let child =
                conditional_expected_char_poly(dim, &fixed, future, future_expectations, guard)?;
            fixed.pop();
            brackets.push(largest_root(&child, &step_width)?);
        }
        let min_lo = brackets
            .iter()
            .map(|b| b.lo.clone())
            .min()
            .expect("support is nonempty");
        if min_lo > &parent.hi + &step_width {
            return Err(Error::InterlacingViolation(format!(
                "step {i}: every support choice pushes the largest root above the parent's"
            )));
        }
        let pick = select_min_bracket(&mut brackets, &step_width);
        fixed.push(families[i][pick].1.clone());
        chosen.push(pick);
        parent = brackets.swap_remove(pick);
    }
    let total = HermitianMatrix::sum(dim, fixed)?;
    let realized_bracket = largest_root(&char_poly(&total), &step_width)?;
    Ok(GreedyOutcome { chosen, realized_bracket })
}

/// Greedy outcome selection: the realized rank-one sum has largest root at
/// most the expected characteristic polynomial's largest root plus `width`.
pub fn greedy_interlacing_assignment(inst: &Instance, width: &Rational) -> Result<Assignment> {
    greedy_interlacing_assignment_with_guard(inst, width, DEFAULT_ENUMERATION_GUARD)
}

/// Greedy with a caller-chosen enumeration guard. Conditional polynomials
/// whose outcome count exceeds the guard switch to the mixed-characteristic
/// route instead of failing.
pub fn greedy_interlacing_assignment_with_guard(
    inst: &Instance,
    width: &Rational,
    guard: u64,
) -> Result<Assignment> {
    let families: Vec<Vec<(Rational, HermitianMatrix)>> = inst
        .specs()
        .iter()
        .map(|spec| {
            spec.support()
                .iter()
                .map(|(prob, vector)| (prob.clone(), outer_product(vector)))
                .collect()
        })
        .collect();
    let expectations = inst.expected_matrices();
    let out = greedy_core(inst.dim(), &families, &expectations, width, guard)?;
    let realized_vectors = out
        .chosen
        .iter()
        .zip(inst.specs())
        .map(|(&c, spec)| spec.support()[c].1.clone())
        .collect();
    let (lo, hi) = out.realized_bracket.bounds();
    Ok(Assignment {
        chosen: out.chosen,
        realized_vectors,
        realized_norm_bracket: (clamp_nonnegative(lo), hi),
    })
}

/// Exhaustive minimum of the realized largest root over all joint outcomes,
/// default guard.
pub fn brute_force_best_assignment(inst: &Instance, width: &Rational) -> Result<Assignment> {
    brute_force_best_assignment_with_guard(inst, width, DEFAULT_ENUMERATION_GUARD)
}

/// Exhaustive search over every joint outcome. Midpoints of largest-root
/// brackets at `width` are compared exactly; ties go to the lexicographically
/// first outcome.
pub fn brute_force_best_assignment_with_guard(
    inst: &Instance,
    width: &Rational,
    guard: u64,
) -> Result<Assignment> {
    let sizes: Vec<usize> = inst.specs().iter().map(|s| s.support().len()).collect();
    let count = sizes.iter().fold(1u128, |acc, &n| acc.saturating_mul(n as u128));
    if count > guard as u128 {
        return Err(Error::GuardExceeded {
            limit: guard,
            required: u64::try_from(count).unwrap_or(u64::MAX),
        });
    }
    let count = count as u64;
    let dim = inst.dim();
    let decode = |index: u64| -> Vec<usize> {
        // Last spec varies fastest, so index order is lexicographic order.
        let mut rest = index;
        let mut chosen = vec![0usize; sizes.len()];
        for (slot, &n) in chosen.iter_mut().zip(&sizes).rev() {
            *slot = (rest % n as u64) as usize;
            rest /= n as u64;
        }
        chosen
    };
    let score = |index: u64| -> Result<(Rational, u64)> {
        let chosen = decode(index);
        let total = HermitianMatrix::sum(
            dim,
            chosen
                .iter()
                .zip(inst.specs())
                .map(|(&c, spec)| outer_product(&spec.support()[c].1)),
        )?;
        let bracket = largest_root(&char_poly(&total), width)?;
        Ok((bracket.midpoint(), index))
    };
    let best = if count >= PARALLEL_THRESHOLD {
        (0..count)
            .into_par_iter()
            .map(|i| score(i).map(Some))
            .try_reduce(|| None, |a, b| Ok(min_scored(a, b)))?
    } else {
        let mut acc = None;
        for i in 0..count {
            acc = min_scored(acc, Some(score(i)?));
        }
        acc
    };
    let (_, best_index) = best.expect("at least one outcome exists");
    let chosen = decode(best_index);
    let realized_vectors: Vec<VectorC> = chosen
        .iter()
        .zip(inst.specs())
        .map(|(&c, spec)| spec.support()[c].1.clone())
        .collect();
    let total = HermitianMatrix::sum(dim, realized_vectors.iter().map(outer_product))?;
    let bracket = largest_root(&char_poly(&total), width)?;
    let (lo, hi) = bracket.bounds();
    Ok(Assignment {
        chosen,
        realized_vectors,
        realized_norm_bracket: (clamp_nonnegative(lo), hi),
    })
}

fn min_scored(
    a: Option<(Rational, u64)>,
    b: Option<(Rational, u64)>,
) -> Option<(Rational, u64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// Embeds each vector into r diagonal blocks and returns the random
/// block-choice system over dimension r * d, stored as scaled outer products.
pub fn lift_for_partition(vectors: &[VectorC], r: usize) -> Result<LiftedSystem> {
    if r == 0 {
        return Err(Error::InvalidInstance("the block count must be at least 1".into()));
    }
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInstance("at least one vector is required".into()))?;
    let base_dim = first.dim();
    for v in vectors {
        if v.dim() != base_dim {
            return Err(Error::DimensionMismatch { expected: base_dim, got: v.dim() });
        }
    }
    let r_rat = rat_int(r as i64);
    let prob = Rational::one() / &r_rat;
    let mut lifted_specs = Vec::with_capacity(vectors.len());
    for u in vectors {
        let support = (0..r)
            .map(|k| {
                let w = u.embed_in_block(r, k);
                (prob.clone(), outer_product(&w).scale(&r_rat))
            })
            .collect();
        let spec = RandomMatrixSpec::new(support)?;
        // Lifting identity: expected squared length is r times the original.
        assert_eq!(spec.expected_trace(), &r_rat * &u.norm_sqr());
        lifted_specs.push(spec);
    }
    // Lifting identity: the expected sum is r block copies of the base sum.
    let lifted_dim = r * base_dim;
    let base_sum = HermitianMatrix::sum(base_dim, vectors.iter().map(outer_product))?;
    let expected_sum = HermitianMatrix::sum(
        lifted_dim,
        lifted_specs.iter().map(RandomMatrixSpec::expected_matrix),
    )?;
    let block_copies = HermitianMatrix::sum(
        lifted_dim,
        (0..r).map(|k| base_sum.embed_in_block(r, k)),
    )?;
    assert_eq!(expected_sum, block_copies);
    Ok(LiftedSystem { r, base_dim, lifted_specs })
}

/// (1/r)(1 + sqrt(r * delta))^2 exactly, with a rational upper approximation
/// within `width`. With r = 1 this is the realized-norm threshold for a
/// single system.
pub fn partition_norm_bound(
    r: usize,
    delta: &Rational,
    width: &Rational,
) -> Result<(QuadraticFieldElement, Rational)> {
    if r == 0 {
        return Err(Error::InvalidInstance("the block count must be at least 1".into()));
    }
    let r_rat = rat_int(r as i64);
    let root = QuadraticFieldElement::sqrt(&r_rat * delta)?;
    let base = &QuadraticFieldElement::one() + &root;
    let bound = (&base * &base).scale(&(Rational::one() / &r_rat));
    let upper = bound.upper_bound(width)?;
    Ok((bound, upper))
}

fn build_partition(
    vectors: &[VectorC],
    assignment: &[usize],
    r: usize,
    delta: &Rational,
    width: &Rational,
) -> Result<Partition> {
    let dim = vectors[0].dim();
    let mut blocks = vec![Vec::new(); r];
    for (i, &k) in assignment.iter().enumerate() {
        blocks[k].push(i);
    }
    let quarter = width / &rat_int(4);
    let mut block_norm_brackets = Vec::with_capacity(r);
    for block in &blocks {
        let sum = HermitianMatrix::sum(dim, block.iter().map(|&i| outer_product(&vectors[i])))?;
        let bracket = largest_root(&char_poly(&sum), &quarter)?;
        let (lo, hi) = bracket.bounds();
        block_norm_brackets.push((clamp_nonnegative(lo), hi));
    }
    let (bound, bound_upper) = partition_norm_bound(r, delta, width)?;
    Ok(Partition { blocks, block_norm_brackets, bound, bound_upper })
}

/// Partitions the vectors into r blocks via greedy descent on the lifted
/// system, default guard.
pub fn partition_vectors(
    vectors: &[VectorC],
    r: usize,
    delta: &Rational,
    width: &Rational,
) -> Result<Partition> {
    partition_vectors_with_guard(vectors, r, delta, width, DEFAULT_ENUMERATION_GUARD)
}

/// Partitions the vectors into r blocks so that every block's outer-product
/// sum has norm within (1/r)(1 + sqrt(r * delta))^2 plus `width`.
///
/// Requires sum u_i u_i^* below the identity and every squared length at
/// most delta, both checked exactly.
pub fn partition_vectors_with_guard(
    vectors: &[VectorC],
    r: usize,
    delta: &Rational,
    width: &Rational,
    guard: u64,
) -> Result<Partition> {
    for (i, u) in vectors.iter().enumerate() {
        if u.norm_sqr() > *delta {
            return Err(Error::HypothesisViolated(format!(
                "squared length of vector {i} exceeds delta"
            )));
        }
    }
    let lifted = lift_for_partition(vectors, r)?;
    let base_sum =
        HermitianMatrix::sum(lifted.base_dim, vectors.iter().map(outer_product))?;
    if !loewner_leq(&base_sum, &HermitianMatrix::identity(lifted.base_dim))? {
        return Err(Error::HypothesisViolated(
            "sum of outer products is not below the identity".into(),
        ));
    }
    let families: Vec<Vec<(Rational, HermitianMatrix)>> =
        lifted.lifted_specs.iter().map(|s| s.support().to_vec()).collect();
    let expectations = lifted.expected_matrices();
    let inner_width = width / &rat_int(4);
    let out = greedy_core(lifted.lifted_dim(), &families, &expectations, &inner_width, guard)?;
    let partition = build_partition(vectors, &out.chosen, r, delta, width)?;
    let limit = &partition.bound_upper + width;
    for (k, (_, hi)) in partition.block_norm_brackets.iter().enumerate() {
        if *hi > limit {
            return Err(Error::Internal(format!(
                "block {k} norm exceeds the partition bound"
            )));
        }
    }
    Ok(partition)
}

/// Exhaustive partition optimum, default guard of 3^8 assignments.
pub fn brute_force_partition_oracle(
    vectors: &[VectorC],
    r: usize,
    width: &Rational,
) -> Result<Partition> {
    brute_force_partition_oracle_with_guard(vectors, r, width, DEFAULT_PARTITION_GUARD)
}

/// Minimizes the largest block norm over all r^m assignments. Block contents
/// repeat heavily across assignments, so norm brackets are memoized per index
/// subset. The reported bound uses the smallest delta the vectors satisfy,
/// making it comparable with the certified path's.
pub fn brute_force_partition_oracle_with_guard(
    vectors: &[VectorC],
    r: usize,
    width: &Rational,
    guard: u64,
) -> Result<Partition> {
    if r == 0 {
        return Err(Error::InvalidInstance("the block count must be at least 1".into()));
    }
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInstance("at least one vector is required".into()))?;
    let dim = first.dim();
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.dim() });
        }
    }
    let m = vectors.len();
    if m > 63 {
        return Err(Error::InvalidInstance(
            "the partition oracle handles at most 63 vectors".into(),
        ));
    }
    let count = (0..m).try_fold(1u64, |acc, _| {
        let next = acc.saturating_mul(r as u64);
        if next > guard {
            Err(Error::GuardExceeded { limit: guard, required: next })
        } else {
            Ok(next)
        }
    })?;
    let digits_of = |index: u64| -> Vec<usize> {
        // Last vector varies fastest, so index order is lexicographic order.
        let mut rest = index;
        let mut digits = vec![0usize; m];
        for slot in digits.iter_mut().rev() {
            *slot = (rest % r as u64) as usize;
            rest /= r as u64;
        }
        digits
    };
    let quarter = width / &rat_int(4);
    let two = rat_int(2);
    let mut memo: HashMap<u64, (Rational, Rational)> = HashMap::new();
    let mut block_bracket = |mask: u64| -> Result<(Rational, Rational)> {
        if let Some(found) = memo.get(&mask) {
            return Ok(found.clone());
        }
        let sum = HermitianMatrix::sum(
            dim,
            (0..m).filter(|i| mask >> i & 1 == 1).map(|i| outer_product(&vectors[i])),
        )?;
        let bracket = largest_root(&char_poly(&sum), &quarter)?;
        let (lo, hi) = bracket.bounds();
        let entry = (clamp_nonnegative(lo), hi);
        memo.insert(mask, entry.clone());
        Ok(entry)
    };
    let mut best: Option<(Rational, u64)> = None;
    for index in 0..count {
        let digits = digits_of(index);
        let mut masks = vec![0u64; r];
        for (i, &k) in digits.iter().enumerate() {
            masks[k] |= 1u64 << i;
        }
        let mut score = Rational::zero();
        for &mask in &masks {
            let (lo, hi) = block_bracket(mask)?;
            let mid = (&lo + &hi) / &two;
            if mid > score {
                score = mid;
            }
        }
        if best.as_ref().map_or(true, |(s, _)| score < *s) {
            best = Some((score, index));
        }
    }
    let (_, best_index) = best.expect("at least one assignment exists");
    let delta = vectors
        .iter()
        .map(VectorC::norm_sqr)
        .max()
        .expect("at least one vector exists");
    build_partition(vectors, &digits_of(best_index), r, &delta, width)
}
