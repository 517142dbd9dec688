//! Mixed characteristic polynomials through a truncated multilinear algebra.
//!
//! The object of interest is mu(x) = prod_i (1 - d/dz_i) det(xI + sum_i z_i A_i)
//! evaluated at z = 0. Every monomial with a squared variable dies under that
//! operator, so the determinant is computed in Q[x][z_1..z_m]/(z_i^2): terms
//! are keyed by the subset of variables they carry. The coefficient ring has
//! zero divisors, which rules out fraction-free elimination; the determinant
//! is expanded division-free, row by row, memoized over column subsets.
//!
//! An independent injection-sum oracle recomputes mu for small instances so
//! the two routes can be checked against each other.

use crate::error::{Error, Result};
use crate::matrix::{components_of, det_complex, HermitianMatrix};
use crate::scalar::ComplexRational;
use crate::unipoly::{is_real_rooted, UniPoly};
use std::collections::BTreeMap;

/// Widest supported variable set; subset masks live in a u64.
pub const MAX_VARIABLES: usize = 24;

/// Largest connected block the determinant expansion will take on.
const MAX_COMPONENT: usize = 14;

/// Guards for the injection oracle, which enumerates d!/(d-|S|)! terms.
const ORACLE_MAX_DIM: usize = 6;
const ORACLE_MAX_VARS: usize = 8;

/// Element of Q[x][z_1..z_m]/(z_i^2): subset mask of {0..m-1} to the
/// coefficient of that squarefree monomial, a polynomial in x.
///
/// Absent masks mean zero. Zero polynomials are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultilinearDetElement {
    dim: usize,
    num_vars: usize,
    terms: BTreeMap<u64, UniPoly>,
}

impl MultilinearDetElement {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Coefficient of the monomial prod_{i in mask} z_i.
    pub fn coefficient(&self, mask: u64) -> UniPoly {
        self.terms.get(&mask).cloned().unwrap_or_else(UniPoly::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &UniPoly)> {
        self.terms.iter().map(|(&mask, poly)| (mask, poly))
    }
}

/// Mixed characteristic polynomial, optionally with the subset expansion it
/// was folded from (for audit output).
#[derive(Clone, Debug)]
pub struct MixedCharResult {
    pub mu: UniPoly,
    pub subset_terms: Option<MultilinearDetElement>,
}

fn validate_family(dim: usize, matrices: &[HermitianMatrix]) -> Result<()> {
    if dim == 0 {
        return Err(Error::PreconditionFail("dimension must be positive".into()));
    }
    if matrices.len() > MAX_VARIABLES {
        return Err(Error::GuardExceeded {
            limit: MAX_VARIABLES as u64,
            required: matrices.len() as u64,
        });
    }
    for a in matrices {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: a.dim() });
        }
    }
    Ok(())
}

/// det(xI + sum_i z_i A_i) in the truncated multilinear algebra, exact.
///
/// The pencil is split into connected components of the union sparsity graph
/// first; block determinants multiply back together in the quotient ring, so
/// the split is exact even when a variable spans several blocks.
pub fn truncated_determinant(
    dim: usize,
    matrices: &[HermitianMatrix],
) -> Result<MultilinearDetElement> {
    validate_family(dim, matrices)?;
    let components = components_of(dim, |j, k| {
        matrices.iter().any(|a| !a.entry(j, k).is_zero())
    });
    let mut acc = CxMultilinear::one();
    for comp in &components {
        if comp.len() > MAX_COMPONENT {
            return Err(Error::GuardExceeded {
                limit: MAX_COMPONENT as u64,
                required: comp.len() as u64,
            });
        }
        let block = component_determinant(comp, matrices);
        acc = acc.mul(&block);
    }
    let mut terms = BTreeMap::new();
    for (mask, (re, im)) in acc.terms {
        if !im.is_zero() {
            return Err(Error::Internal(
                "determinant of a Hermitian pencil has a complex coefficient".into(),
            ));
        }
        if !re.is_zero() {
            terms.insert(mask, re);
        }
    }
    Ok(MultilinearDetElement { dim, num_vars: matrices.len(), terms })
}

/// Folds the expansion into mu(x) = sum_S (-1)^|S| coeff_S(x).
///
/// Applying prod(1 - d/dz_i) at z = 0 picks out exactly the squarefree
/// coefficients with alternating signs. The result must be monic of the
/// pencil dimension and real-rooted; a failure of either is a bug upstream.
pub fn apply_one_minus_partials(e: &MultilinearDetElement) -> Result<MixedCharResult> {
    let mut mu = UniPoly::zero();
    for (mask, coeff) in &e.terms {
        let signed = if mask.count_ones() % 2 == 0 { coeff.clone() } else { -coeff };
        mu = &mu + &signed;
    }
    if mu.degree() != Some(e.dim) || !mu.is_monic() {
        return Err(Error::Internal("mixed characteristic polynomial is not monic".into()));
    }
    if !is_real_rooted(&mu)? {
        return Err(Error::MixedCharNotRealRooted);
    }
    Ok(MixedCharResult { mu, subset_terms: None })
}

/// Convenience route: truncated determinant, folded, audit terms retained.
pub fn mixed_char_with_audit(dim: usize, matrices: &[HermitianMatrix]) -> Result<MixedCharResult> {
    let e = truncated_determinant(dim, matrices)?;
    let mut result = apply_one_minus_partials(&e)?;
    result.subset_terms = Some(e);
    Ok(result)
}

/// Convenience route when only the polynomial is wanted.
pub fn mixed_char_poly(dim: usize, matrices: &[HermitianMatrix]) -> Result<UniPoly> {
    let e = truncated_determinant(dim, matrices)?;
    Ok(apply_one_minus_partials(&e)?.mu)
}

/// Independent oracle for mu on small instances.
///
/// Each subset coefficient is rebuilt as a sum over injections of S into
/// column indices: column j of xI is replaced by column j of the matrix the
/// injection assigns to it, and the surviving x-block contributes x^(d-|S|).
pub fn mixed_char_injection_oracle(
    dim: usize,
    matrices: &[HermitianMatrix],
) -> Result<UniPoly> {
    validate_family(dim, matrices)?;
    if dim > ORACLE_MAX_DIM {
        return Err(Error::GuardExceeded { limit: ORACLE_MAX_DIM as u64, required: dim as u64 });
    }
    if matrices.len() > ORACLE_MAX_VARS {
        return Err(Error::GuardExceeded {
            limit: ORACLE_MAX_VARS as u64,
            required: matrices.len() as u64,
        });
    }
    let m = matrices.len();
    let mut mu = UniPoly::zero();
    for mask in 0u64..(1 << m) {
        let vars: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        if vars.len() > dim {
            continue;
        }
        let mut total = ComplexRational::zero();
        let mut columns = Vec::with_capacity(vars.len());
        injection_sum(dim, matrices, &vars, &mut columns, &mut total);
        if !total.is_real() {
            return Err(Error::Internal("injection sum has a complex value".into()));
        }
        let signed = if vars.len() % 2 == 0 { total.re } else { -total.re };
        let term = UniPoly::monomial(dim - vars.len(), signed);
        mu = &mu + &term;
    }
    Ok(mu)
}

/// Enumerates injections var -> column, accumulating the replaced-column
/// minors. `columns[j]` is the column assigned to `vars[j]`.
fn injection_sum(
    dim: usize,
    matrices: &[HermitianMatrix],
    vars: &[usize],
    columns: &mut Vec<usize>,
    total: &mut ComplexRational,
) {
    if columns.len() == vars.len() {
        // Minor over the chosen columns: row t, column c taken from the
        // matrix whose variable was assigned column c.
        let mut chosen: Vec<(usize, usize)> =
            columns.iter().copied().zip(vars.iter().copied()).collect();
        chosen.sort_unstable();
        let minor: Vec<Vec<ComplexRational>> = chosen
            .iter()
            .map(|&(t, _)| chosen.iter().map(|&(c, var)| matrices[var].entry(t, c).clone()).collect())
            .collect();
        *total += &det_complex(&minor);
        return;
    }
    for c in 0..dim {
        if columns.contains(&c) {
            continue;
        }
        columns.push(c);
        injection_sum(dim, matrices, vars, columns, total);
        columns.pop();
    }
}

/// Truncated multilinear element with Gaussian-rational polynomial
/// coefficients, used only inside the determinant expansion.
#[derive(Clone)]
struct CxMultilinear {
    terms: BTreeMap<u64, (UniPoly, UniPoly)>,
}

impl CxMultilinear {
    fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0, (UniPoly::one(), UniPoly::zero()));
        Self { terms }
    }

    fn add_signed(&mut self, other: Self, negative: bool) {
        for (mask, (re, im)) in other.terms {
            let entry = self
                .terms
                .entry(mask)
                .or_insert_with(|| (UniPoly::zero(), UniPoly::zero()));
            if negative {
                entry.0 = &entry.0 - &re;
                entry.1 = &entry.1 - &im;
            } else {
                entry.0 = &entry.0 + &re;
                entry.1 = &entry.1 + &im;
            }
            if entry.0.is_zero() && entry.1.is_zero() {
                self.terms.remove(&mask);
            }
        }
    }

    /// Ring product; overlapping masks vanish under z_i^2 = 0.
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = CxMultilinear::zero();
        for (ma, (ra, ia)) in &self.terms {
            for (mb, (rb, ib)) in &rhs.terms {
                if ma & mb != 0 {
                    continue;
                }
                let re = &(ra * rb) - &(ia * ib);
                let im = &(ra * ib) + &(ia * rb);
                if re.is_zero() && im.is_zero() {
                    continue;
                }
                let entry = out
                    .terms
                    .entry(ma | mb)
                    .or_insert_with(|| (UniPoly::zero(), UniPoly::zero()));
                entry.0 = &entry.0 + &re;
                entry.1 = &entry.1 + &im;
                if entry.0.is_zero() && entry.1.is_zero() {
                    out.terms.remove(&(ma | mb));
                }
            }
        }
        out
    }
}

/// Determinant of the pencil restricted to one sparsity component, expanded
/// along rows with memoization over column subsets.
fn component_determinant(comp: &[usize], matrices: &[HermitianMatrix]) -> CxMultilinear {
    let n = comp.len();
    // Pencil entries for the local block: x on the diagonal plus z_i A_i.
    let entry_at = |row: usize, col: usize| -> CxMultilinear {
        let mut e = CxMultilinear::zero();
        if row == col {
            e.terms.insert(0, (UniPoly::x_pow(1), UniPoly::zero()));
        }
        for (i, a) in matrices.iter().enumerate() {
            let v = a.entry(comp[row], comp[col]);
            if !v.is_zero() {
                e.terms.insert(
                    1 << i,
                    (UniPoly::constant(v.re.clone()), UniPoly::constant(v.im.clone())),
                );
            }
        }
        e
    };
    let entries: Vec<Vec<CxMultilinear>> =
        (0..n).map(|r| (0..n).map(|c| entry_at(r, c)).collect()).collect();

    // masks grouped by popcount; layer r-1 is freed once layer r is done.
    let mut layers: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for mask in 0u64..(1 << n) {
        layers[mask.count_ones() as usize].push(mask);
    }
    let mut memo: Vec<Option<CxMultilinear>> = vec![None; 1 << n];
    memo[0] = Some(CxMultilinear::one());
    for r in 1..=n {
        for &t in &layers[r] {
            let mut acc = CxMultilinear::zero();
            let mut idx = 0;
            for c in 0..n {
                if t & (1 << c) == 0 {
                    continue;
                }
                let sub = memo[(t & !(1 << c)) as usize]
                    .as_ref()
                    .expect("previous layer is present");
                let term = entries[r - 1][c].mul(sub);
                acc.add_signed(term, (r - 1 + idx) % 2 == 1);
                idx += 1;
            }
            memo[t as usize] = Some(acc);
        }
        for &t in &layers[r - 1] {
            memo[t as usize] = None;
        }
    }
    memo[(1usize << n) - 1].take().expect("full mask is in the last layer")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::outer_product;
    use crate::matrix::VectorC;
    use crate::scalar::{rat, rat_int};

    fn poly(coeffs: &[(i64, i64)]) -> UniPoly {
        UniPoly::from_coeffs(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn empty_family() {
        let e = truncated_determinant(2, &[]).unwrap();
        assert_eq!(e.coefficient(0), UniPoly::x_pow(2));
        assert_eq!(e.terms().count(), 1);
        let r = apply_one_minus_partials(&e).unwrap();
        assert_eq!(r.mu, UniPoly::x_pow(2));
        assert_eq!(mixed_char_injection_oracle(2, &[]).unwrap(), UniPoly::x_pow(2));
    }

    #[test]
    fn one_dimensional_pencil() {
        let a = HermitianMatrix::from_rational_rows(vec![vec![rat_int(1)]]).unwrap();
        let e = truncated_determinant(1, &[a.clone()]).unwrap();
        assert_eq!(e.coefficient(0), UniPoly::x_pow(1));
        assert_eq!(e.coefficient(1), UniPoly::one());
        let r = apply_one_minus_partials(&e).unwrap();
        assert_eq!(r.mu, poly(&[(-1, 1), (1, 1)]));
        assert_eq!(mixed_char_injection_oracle(1, &[a]).unwrap(), poly(&[(-1, 1), (1, 1)]));
    }

    #[test]
    fn half_identity_pair() {
        let half = HermitianMatrix::scaled_identity(2, &rat(1, 2));
        let e = truncated_determinant(2, &[half.clone(), half.clone()]).unwrap();
        assert_eq!(e.coefficient(0), UniPoly::x_pow(2));
        assert_eq!(e.coefficient(0b01), UniPoly::x_pow(1));
        assert_eq!(e.coefficient(0b10), UniPoly::x_pow(1));
        assert_eq!(e.coefficient(0b11), UniPoly::constant(rat(1, 2)));
        let r = apply_one_minus_partials(&e).unwrap();
        assert_eq!(r.mu, poly(&[(1, 2), (-2, 1), (1, 1)]));
        assert_eq!(
            mixed_char_injection_oracle(2, &[half.clone(), half]).unwrap(),
            poly(&[(1, 2), (-2, 1), (1, 1)])
        );
    }

    #[test]
    fn identity_decomposition_collapses() {
        for d in 1..=4usize {
            let matrices: Vec<HermitianMatrix> =
                (0..d).map(|j| outer_product(&VectorC::basis(d, j))).collect();
            let mu = mixed_char_poly(d, &matrices).unwrap();
            // (x - 1)^d
            let mut expect = UniPoly::one();
            let linear = poly(&[(-1, 1), (1, 1)]);
            for _ in 0..d {
                expect = &expect * &linear;
            }
            assert_eq!(mu, expect);
        }
    }

    #[test]
    fn zero_matrices_give_power_of_x() {
        let zeros = vec![HermitianMatrix::zero(3); 4];
        assert_eq!(mixed_char_poly(3, &zeros).unwrap(), UniPoly::x_pow(3));
    }

    #[test]
    fn permutation_invariance() {
        let a = HermitianMatrix::from_rational_rows(vec![
            vec![rat_int(1), rat(1, 2)],
            vec![rat(1, 2), rat_int(2)],
        ])
        .unwrap();
        let b = HermitianMatrix::from_rational_rows(vec![
            vec![rat(1, 3), rat_int(0)],
            vec![rat_int(0), rat_int(1)],
        ])
        .unwrap();
        let c = outer_product(&VectorC::from_rationals(vec![rat(1, 2), rat(-1, 3)]).unwrap());
        let abc = mixed_char_poly(2, &[a.clone(), b.clone(), c.clone()]).unwrap();
        let cba = mixed_char_poly(2, &[c, b, a]).unwrap();
        assert_eq!(abc, cba);
    }

    #[test]
    fn oracle_agrees_with_truncated_route() {
        // Complex Hermitian PD input exercises both code paths' arithmetic.
        let i = |n: i64| ComplexRational::new(rat_int(0), rat_int(n));
        let re = |n: i64, d: i64| ComplexRational::from_rational(rat(n, d));
        let a = HermitianMatrix::new(vec![
            vec![re(2, 1), i(1), re(0, 1)],
            vec![i(-1), re(1, 1), re(1, 2)],
            vec![re(0, 1), re(1, 2), re(1, 1)],
        ])
        .unwrap();
        let b = HermitianMatrix::new(vec![
            vec![re(5, 2), re(0, 1), i(2)],
            vec![re(0, 1), re(3, 1), re(0, 1)],
            vec![i(-2), re(0, 1), re(2, 1)],
        ])
        .unwrap();
        assert!(crate::matrix::is_pd(&a) && crate::matrix::is_pd(&b));
        let fast = mixed_char_poly(3, &[a.clone(), b.clone()]).unwrap();
        let slow = mixed_char_injection_oracle(3, &[a, b]).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn guards_fire() {
        let a = HermitianMatrix::identity(7);
        assert!(matches!(
            mixed_char_injection_oracle(7, &[a]),
            Err(Error::GuardExceeded { .. })
        ));
        let b = HermitianMatrix::identity(2);
        assert!(matches!(
            mixed_char_injection_oracle(2, &vec![b; 9]),
            Err(Error::GuardExceeded { .. })
        ));
        let wrong = HermitianMatrix::identity(3);
        assert!(matches!(
            truncated_determinant(2, &[wrong]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn block_structure_multiplies_components() {
        // Two disjoint 1x1 blocks inside a 2x2 pencil share variable z_0:
        // det = (x + 2 z_0)(x + 3 z_0) -> truncated z_0^2 term drops.
        let a = HermitianMatrix::from_rational_rows(vec![
            vec![rat_int(2), rat_int(0)],
            vec![rat_int(0), rat_int(3)],
        ])
        .unwrap();
        let e = truncated_determinant(2, &[a]).unwrap();
        assert_eq!(e.coefficient(0), UniPoly::x_pow(2));
        assert_eq!(e.coefficient(1), poly(&[(0, 1), (5, 1)]));
        assert_eq!(e.terms().count(), 2);
    }
}
