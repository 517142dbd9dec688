//! Exact Hermitian matrices over the Gaussian rationals.
//!
//! Provides the order-theoretic predicates (semidefiniteness, Loewner
//! comparison) used by every certification path. All decisions are exact:
//! semidefiniteness is settled by an LDL^T sweep over the rationals, never by
//! floating-point eigenvalues.

use crate::error::{Error, Result};
use crate::scalar::{ComplexRational, OrderedField, Rational};
use num_traits::Zero;

/// Vector in C^d with exact Gaussian-rational entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorC {
    entries: Vec<ComplexRational>,
}

impl VectorC {
    /// Builds a vector; the dimension must be positive.
    pub fn new(entries: Vec<ComplexRational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::PreconditionFail("vector dimension must be positive".into()));
        }
        Ok(Self { entries })
    }

    /// Vector with the given real entries.
    pub fn from_rationals(entries: Vec<Rational>) -> Result<Self> {
        Self::new(entries.into_iter().map(ComplexRational::from_rational).collect())
    }

    /// Standard basis vector e_j.
    pub fn basis(dim: usize, j: usize) -> Self {
        assert!(j < dim && dim > 0);
        let mut entries = vec![ComplexRational::zero(); dim];
        entries[j] = ComplexRational::one();
        Self { entries }
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0);
        Self { entries: vec![ComplexRational::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[ComplexRational] {
        &self.entries
    }

    /// Squared Euclidean norm, an exact rational.
    pub fn norm_sqr(&self) -> Rational {
        self.entries.iter().map(|e| e.norm_sqr()).fold(Rational::zero(), |a, b| a + b)
    }

    /// Scales every entry by an exact rational factor.
    pub fn scale(&self, factor: &Rational) -> Self {
        Self { entries: self.entries.iter().map(|e| e.scale(factor)).collect() }
    }

    /// Embeds this vector into block `block` of `blocks` stacked copies of C^d.
    pub fn embed_in_block(&self, blocks: usize, block: usize) -> Self {
        assert!(block < blocks);
        let d = self.dim();
        let mut entries = vec![ComplexRational::zero(); blocks * d];
        for (j, e) in self.entries.iter().enumerate() {
            entries[block * d + j] = e.clone();
        }
        Self { entries }
    }
}

/// d x d Hermitian matrix with exact Gaussian-rational entries.
///
/// Construction checks conjugate symmetry, so diagonal entries are real by
/// the time a value exists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Vec<ComplexRational>>,
}

impl HermitianMatrix {
    /// Builds a Hermitian matrix, verifying `entries[j][k] == conj(entries[k][j])`.
    pub fn new(entries: Vec<Vec<ComplexRational>>) -> Result<Self> {
        let dim = entries.len();
        if dim == 0 {
            return Err(Error::PreconditionFail("matrix dimension must be positive".into()));
        }
        for (j, row) in entries.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            for k in 0..=j {
                if entries[j][k] != entries[k][j].conj() {
                    return Err(Error::NotHermitian { row: j, col: k });
                }
            }
        }
        Ok(Self { dim, entries })
    }

    /// Builds from real rational entries (must be symmetric).
    pub fn from_rational_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(ComplexRational::from_rational).collect())
                .collect(),
        )
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0);
        Self { dim, entries: vec![vec![ComplexRational::zero(); dim]; dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, &Rational::from_integer(1.into()))
    }

    /// r * I_dim.
    pub fn scaled_identity(dim: usize, r: &Rational) -> Self {
        assert!(dim > 0);
        let mut m = Self::zero(dim);
        for j in 0..dim {
            m.entries[j][j] = ComplexRational::from_rational(r.clone());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &ComplexRational {
        &self.entries[row][col]
    }

    pub fn rows(&self) -> &[Vec<ComplexRational>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|row| row.iter().all(|e| e.is_zero()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let entries =
            self.entries.iter().map(|row| row.iter().map(|e| e.scale(factor)).collect()).collect();
        Self { dim: self.dim, entries }
    }

    /// Exact trace; real because the diagonal of a Hermitian matrix is real.
    pub fn trace(&self) -> Rational {
        (0..self.dim).map(|j| self.entries[j][j].re.clone()).fold(Rational::zero(), |a, b| a + b)
    }

    /// Sums a sequence of equal-dimension Hermitian matrices.
    pub fn sum(dim: usize, terms: impl IntoIterator<Item = Self>) -> Result<Self> {
        let mut acc = Self::zero(dim);
        for t in terms {
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Places this matrix as diagonal block `block` of `blocks` copies.
    pub fn embed_in_block(&self, blocks: usize, block: usize) -> Self {
        assert!(block < blocks);
        let d = self.dim;
        let mut out = Self::zero(blocks * d);
        for j in 0..d {
            for k in 0..d {
                out.entries[block * d + j][block * d + k] = self.entries[j][k].clone();
            }
        }
        out
    }

    /// Connected components of the sparsity graph shared by `self`
    /// (indices joined when an off-diagonal entry is nonzero).
    pub(crate) fn sparsity_components(&self) -> Vec<Vec<usize>> {
        components_of(self.dim, |j, k| !self.entries[j][k].is_zero())
    }
}

/// Rank-one outer product v v^*.
pub fn outer_product(v: &VectorC) -> HermitianMatrix {
    let d = v.dim();
    let entries = (0..d)
        .map(|j| (0..d).map(|k| &v.entries[j] * &v.entries[k].conj()).collect())
        .collect();
    HermitianMatrix { dim: d, entries }
}

/// Union-find over matrix indices; used to split determinants into blocks.
pub(crate) fn components_of(dim: usize, connected: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..dim).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            if connected(j, k) {
                let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for j in 0..dim {
        let root = find(&mut parent, j);
        groups.entry(root).or_default().push(j);
    }
    groups.into_values().collect()
}

/// Outcome of the exact LDL^T sweep.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum PsdStatus {
    PositiveDefinite,
    PositiveSemidefiniteSingular,
    Indefinite,
}

/// Decides semidefiniteness of a Hermitian matrix with entries `(re, im)`
/// over an exactly ordered field.
///
/// Sequential pivoting is sound here: a zero diagonal pivot with a nonzero
/// residual row already witnesses indefiniteness, and a zero pivot with a
/// zero row lets the sweep skip to the trailing block.
pub(crate) fn hermitian_psd_status<F: OrderedField>(
    dim: usize,
    entry: impl Fn(usize, usize) -> (F, F),
) -> PsdStatus {
    let mut a: Vec<Vec<(F, F)>> = (0..dim).map(|j| (0..dim).map(|k| entry(j, k)).collect()).collect();
    let mut singular = false;
    for p in 0..dim {
        let pivot = a[p][p].0.clone();
        match pivot.sign() {
            -1 => return PsdStatus::Indefinite,
            0 => {
                // Hermitian + PSD forces the whole pivot row to vanish.
                for k in (p + 1)..dim {
                    if !a[p][k].0.is_zero() || !a[p][k].1.is_zero() {
                        return PsdStatus::Indefinite;
                    }
                }
                singular = true;
            }
            _ => {
                for j in (p + 1)..dim {
                    // l = conj(a[p][j]) / pivot; row_j -= l * row_p
                    let lre = a[p][j].0.div_ref(&pivot).expect("pivot is nonzero");
                    let lim = a[p][j].1.neg_ref().div_ref(&pivot).expect("pivot is nonzero");
                    for k in j..dim {
                        // a[j][k] -= l * a[p][k]
                        let (pre, pim) = a[p][k].clone();
                        let sub_re = lre.mul_ref(&pre).sub_ref(&lim.mul_ref(&pim));
                        let sub_im = lre.mul_ref(&pim) + lim.mul_ref(&pre);
                        a[j][k] = (a[j][k].0.sub_ref(&sub_re), a[j][k].1.sub_ref(&sub_im));
                    }
                }
            }
        }
    }
    if singular {
        PsdStatus::PositiveSemidefiniteSingular
    } else {
        PsdStatus::PositiveDefinite
    }
}

fn rational_entry(m: &HermitianMatrix) -> impl Fn(usize, usize) -> (Rational, Rational) + '_ {
    |j, k| {
        let e = m.entry(j, k);
        (e.re.clone(), e.im.clone())
    }
}

/// True iff M is positive semidefinite, decided exactly.
pub fn is_psd(m: &HermitianMatrix) -> bool {
    hermitian_psd_status(m.dim(), rational_entry(m)) != PsdStatus::Indefinite
}

/// True iff M is positive definite, decided exactly.
pub fn is_pd(m: &HermitianMatrix) -> bool {
    hermitian_psd_status(m.dim(), rational_entry(m)) == PsdStatus::PositiveDefinite
}

/// Loewner comparison: true iff N - M is positive semidefinite.
pub fn loewner_leq(m: &HermitianMatrix, n: &HermitianMatrix) -> Result<bool> {
    let diff = n.sub(m)?;
    Ok(is_psd(&diff))
}

/// Checks Tr(XY) <= bound * Tr(Y) for PSD X, Y with `bound >= ||X||`.
pub fn trace_product_bound_holds(
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    norm_x_upper: &Rational,
) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    if !is_psd(x) || !is_psd(y) {
        return Err(Error::NotPsd);
    }
    let mut trace_xy = Rational::zero();
    for j in 0..x.dim() {
        for k in 0..x.dim() {
            trace_xy += (x.entry(j, k) * y.entry(k, j)).re;
        }
    }
    Ok(trace_xy <= norm_x_upper * y.trace())
}

/// Largest eigenvalue of a PSD matrix, approximated within `tol`.
///
/// Delegates to the exact largest-root machinery on the characteristic
/// polynomial; the only approximation is the final bracket width.
pub fn operator_norm(m: &HermitianMatrix, tol: &Rational) -> Result<Rational> {
    let p = crate::unipoly::char_poly(m);
    let bracket = crate::unipoly::largest_root(&p, &(tol.clone() * Rational::new(1.into(), 2.into())))?;
    Ok(bracket.midpoint())
}

/// Exact determinant over the Gaussian rationals (Gaussian elimination).
pub(crate) fn det_complex(rows: &[Vec<ComplexRational>]) -> ComplexRational {
    let n = rows.len();
    let mut a: Vec<Vec<ComplexRational>> = rows.to_vec();
    let mut det = ComplexRational::one();
    for p in 0..n {
        let pivot_row = match (p..n).find(|&r| !a[r][p].is_zero()) {
            Some(r) => r,
            None => return ComplexRational::zero(),
        };
        if pivot_row != p {
            a.swap(p, pivot_row);
            det = &det * &ComplexRational::from_rational(Rational::from_integer((-1).into()));
        }
        let pivot = a[p][p].clone();
        det = &det * &pivot;
        for r in (p + 1)..n {
            if a[r][p].is_zero() {
                continue;
            }
            let factor = a[r][p].div(&pivot).expect("pivot is nonzero");
            for c in p..n {
                let sub = &factor * &a[p][c];
                a[r][c] -= &sub;
            }
        }
    }
    det
}

/// Solves M X = B exactly for square complex M; returns None if M is singular.
pub(crate) fn solve_complex(
    m_rows: &[Vec<ComplexRational>],
    b_cols: &[Vec<ComplexRational>],
) -> Option<Vec<Vec<ComplexRational>>> {
    let n = m_rows.len();
    let ncols = b_cols.len();
    // Augmented elimination: [M | b_0 ... b_{k-1}]
    let mut a: Vec<Vec<ComplexRational>> = (0..n)
        .map(|r| {
            let mut row = m_rows[r].clone();
            for b in b_cols {
                row.push(b[r].clone());
            }
            row
        })
        .collect();
    let width = n + ncols;
    for p in 0..n {
        let pivot_row = (p..n).find(|&r| !a[r][p].is_zero())?;
        a.swap(p, pivot_row);
        let pivot = a[p][p].clone();
        for c in p..width {
            a[p][c] = a[p][c].div(&pivot).expect("pivot is nonzero");
        }
        for r in 0..n {
            if r == p || a[r][p].is_zero() {
                continue;
            }
            let factor = a[r][p].clone();
            for c in p..width {
                let sub = &factor * &a[p][c];
                a[r][c] -= &sub;
            }
        }
    }
    // Columns of the solution, one per right-hand side.
    Some((0..ncols).map(|k| (0..n).map(|r| a[r][n + k].clone()).collect()).collect())
}
