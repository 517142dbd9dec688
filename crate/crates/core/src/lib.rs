//! Exact certification of spectral bounds for sums of rank-one Hermitian
//! matrices.
//!
//! Everything is computed over the rationals (or a real quadratic extension
//! where square roots are unavoidable), so every certificate produced here is
//! a proof, not a numerical estimate. The crate covers:
//!
//! * expected characteristic polynomials of independent rank-one sums, both
//!   by direct enumeration and through a truncated multilinear determinant;
//! * barrier-style certificates that the largest root of the expected
//!   polynomial stays below the square-root threshold;
//! * a greedy assignment search realizing that bound on a concrete outcome;
//! * partitioning a vector system into blocks with small operator norm.

pub mod error;
pub mod scalar;
pub mod matrix;
pub mod barrier;
pub mod expectation;
pub mod multilinear;
pub mod quadfield;
pub mod search;
pub mod unipoly;

pub use barrier::{
    barrier_value, certify_threshold, certify_threshold_with_width, check_barrier_shift,
    default_bracket_width, is_above_roots_det, BarrierCertificate, EvaluationPoint,
};
pub use error::{Error, Result};
pub use expectation::{
    expected_char_poly, expected_char_poly_enumeration, expected_char_poly_enumeration_with_guard,
    instance_stats, verify_determinant_identity, verify_determinant_identity_with_guard, Instance,
    InstanceStats, RandomVectorSpec, DEFAULT_ENUMERATION_GUARD,
};
pub use matrix::{
    is_pd, is_psd, loewner_leq, operator_norm, outer_product, trace_product_bound_holds,
    HermitianMatrix, VectorC,
};
pub use multilinear::{
    apply_one_minus_partials, mixed_char_injection_oracle, mixed_char_poly,
    mixed_char_with_audit, truncated_determinant, MixedCharResult, MultilinearDetElement,
};
pub use quadfield::QuadraticFieldElement;
pub use search::{
    brute_force_best_assignment, brute_force_best_assignment_with_guard,
    brute_force_partition_oracle, brute_force_partition_oracle_with_guard,
    greedy_interlacing_assignment, greedy_interlacing_assignment_with_guard, lift_for_partition,
    partition_norm_bound, partition_vectors, partition_vectors_with_guard, Assignment,
    LiftedSystem, Partition, RandomMatrixSpec, DEFAULT_PARTITION_GUARD,
};
pub use scalar::{
    decimal_approx, parse_rational, rational_sqrt_bounds, rational_sqrt_exact,
    rational_to_string, ComplexRational, Rational,
};
pub use unipoly::{
    char_poly, check_common_interlacing_consequence, is_above_roots_1d, is_real_rooted,
    largest_root, RootBracket, SturmChain, UniPoly,
};
