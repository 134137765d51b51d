//! Banded symmetric matrices generated by symbols, and the families built
//! from them.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symbol::{CosineSymbol, FamilySymbol, QuotientSymbol, SpectralSymbol};

/// Samples used to check that a preconditioner symbol is non-negative.
const NONNEGATIVE_SAMPLES: usize = 4096;

/// Symmetric matrix stored as its main diagonal and `b` sub-diagonals.
///
/// `bands[k][j]` holds the entry at row `j + k`, column `j` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymmetricMatrix<T> {
    n: usize,
    bands: Vec<Vec<T>>,
}

impl<T: Real> BandedSymmetricMatrix<T> {
    /// Zero matrix of order `n` with room for `bandwidth` sub-diagonals.
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bandwidth = bandwidth.min(n.saturating_sub(1));
        let bands = (0..=bandwidth).map(|k| vec![T::zero(); n - k]).collect();
        Self { n, bands }
    }

    pub fn identity(n: usize) -> Self {
        Self { n, bands: vec![vec![T::one(); n]] }
    }

    /// Builds from explicit bands; `bands[k]` must have length `n − k`.
    pub fn from_bands(n: usize, bands: Vec<Vec<T>>) -> Result<Self> {
        if bands.is_empty() || bands.len() > n.max(1) {
            return Err(Error::InvalidParameter(format!(
                "{} bands for order {n}",
                bands.len()
            )));
        }
        for (k, band) in bands.iter().enumerate() {
            if band.len() != n - k {
                return Err(Error::SizeMismatch { expected: n - k, actual: band.len() });
            }
        }
        Ok(Self { n, bands })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    pub fn bands(&self) -> &[Vec<T>] {
        &self.bands
    }

    /// Entry `(row, col)`, 0-based, either triangle.
    pub fn get(&self, row: usize, col: usize) -> T {
        let (i, j) = if row >= col { (row, col) } else { (col, row) };
        let k = i - j;
        if k > self.bandwidth() {
            T::zero()
        } else {
            self.bands[k][j]
        }
    }

    /// Entry at row `row`, column `row − offset`.
    #[inline]
    pub(crate) fn lower(&self, row: usize, offset: usize) -> T {
        self.bands[offset][row - offset]
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn trace(&self) -> T {
        self.bands[0].iter().fold(T::zero(), |s, &v| s + v)
    }

    /// Per-row absolute sums, `max_i Σ_j |a_ij|`.
    pub fn norm_inf(&self) -> T {
        (0..self.n)
            .map(|i| self.row_abs_sum(i) + self.bands[0][i].abs())
            .fold(T::zero(), T::max)
    }

    fn row_abs_sum(&self, i: usize) -> T {
        let b = self.bandwidth();
        let mut s = T::zero();
        for k in 1..=b {
            if i >= k {
                s = s + self.bands[k][i - k].abs();
            }
            if i + k < self.n {
                s = s + self.bands[k][i].abs();
            }
        }
        s
    }

    /// Union of the Gershgorin discs as `(lower, upper)`.
    pub fn gershgorin(&self) -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..self.n {
            let r = self.row_abs_sum(i);
            let d = self.bands[0][i];
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    fn widen(&mut self, bandwidth: usize) {
        while self.bandwidth() < bandwidth {
            let k = self.bands.len();
            self.bands.push(vec![T::zero(); self.n - k]);
        }
    }
}

/// `T_n(f) = [f̂_{i−j}]`, truncated to the bands that fit in order `n`.
pub fn build_toeplitz<T: Real>(symbol: &CosineSymbol<T>, n: usize) -> Result<BandedSymmetricMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("matrix order must be at least 1".into()));
    }
    let m = symbol.degree();
    if m > n - 1 {
        log::warn!("symbol degree {m} exceeds order {n}; truncating bands");
    }
    let bandwidth = m.min(n - 1);
    let bands = (0..=bandwidth)
        .map(|k| vec![symbol.coeffs()[k]; n - k])
        .collect();
    Ok(BandedSymmetricMatrix { n, bands })
}

/// Symmetric sparse edit as 1-based `(row, col, value)` with `row ≥ col`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseCorrection<T> {
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> SparseCorrection<T> {
    /// Entries given in the upper triangle are mirrored into the lower.
    pub fn new(entries: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let entries = entries
            .into_iter()
            .map(|(i, j, v)| if i >= j { (i, j, v) } else { (j, i, v) })
            .collect();
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest index referenced, or 0 for an empty correction.
    pub fn max_index(&self) -> usize {
        self.entries.iter().map(|e| e.0).max().unwrap_or(0)
    }
}

/// Adds a symmetric correction, widening the band if an entry needs it.
pub fn apply_correction<T: Real>(
    matrix: &BandedSymmetricMatrix<T>,
    correction: &SparseCorrection<T>,
) -> Result<BandedSymmetricMatrix<T>> {
    let n = matrix.order();
    let mut out = matrix.clone();
    for &(row, col, _) in correction.entries() {
        if row == 0 || col == 0 || row > n || col > n {
            return Err(Error::Index { row, col, order: n });
        }
    }
    let needed = correction.entries().iter().map(|e| e.0 - e.1).max().unwrap_or(0);
    out.widen(needed);
    for &(row, col, v) in correction.entries() {
        let (i, j) = (row - 1, col - 1);
        let slot = &mut out.bands[i - j][j];
        *slot = *slot + v;
    }
    Ok(out)
}

/// Recipe for the matrices `A_n` of a Toeplitz-like sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorFamily<T> {
    /// `T_n(f)`.
    Toeplitz(CosineSymbol<T>),
    /// `T_n(f) + R_n`, the correction fixed independently of `n`.
    Corrected {
        symbol: CosineSymbol<T>,
        correction: SparseCorrection<T>,
    },
    /// `T_n(b)⁻¹ T_n(a)`, solved as the pencil `(T_n(a), T_n(b))`.
    Pencil { a: CosineSymbol<T>, b: CosineSymbol<T> },
}

/// A concrete member of a family.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator<T> {
    Single(BandedSymmetricMatrix<T>),
    Pencil {
        a: BandedSymmetricMatrix<T>,
        b: BandedSymmetricMatrix<T>,
    },
}

impl<T: Real> OperatorFamily<T> {
    pub fn toeplitz(symbol: CosineSymbol<T>) -> Self {
        OperatorFamily::Toeplitz(symbol)
    }

    pub fn corrected(symbol: CosineSymbol<T>, correction: SparseCorrection<T>) -> Self {
        OperatorFamily::Corrected { symbol, correction }
    }

    /// Requires `b ≥ 0` and not identically zero (checked by sampling).
    pub fn pencil(a: CosineSymbol<T>, b: CosineSymbol<T>) -> Result<Self> {
        let (lo, hi) = b.sampled_range(NONNEGATIVE_SAMPLES);
        if lo < -T::tol(1e-12) || !(hi > T::zero()) {
            return Err(Error::InvalidSymbol(format!(
                "preconditioner symbol must be non-negative and nonzero (range [{lo}, {hi}])"
            )));
        }
        Ok(OperatorFamily::Pencil { a, b })
    }

    /// `f`, `f` or `a/b` depending on the kind.
    pub fn distribution_symbol(&self) -> FamilySymbol<T> {
        match self {
            OperatorFamily::Toeplitz(f) | OperatorFamily::Corrected { symbol: f, .. } => {
                FamilySymbol::Cosine(f.clone())
            }
            OperatorFamily::Pencil { a, b } => {
                FamilySymbol::Quotient(QuotientSymbol::new(a.clone(), b.clone()))
            }
        }
    }

    pub fn materialize(&self, n: usize) -> Result<Operator<T>> {
        match self {
            OperatorFamily::Toeplitz(f) => Ok(Operator::Single(build_toeplitz(f, n)?)),
            OperatorFamily::Corrected { symbol, correction } => {
                let base = build_toeplitz(symbol, n)?;
                Ok(Operator::Single(apply_correction(&base, correction)?))
            }
            OperatorFamily::Pencil { a, b } => Ok(Operator::Pencil {
                a: build_toeplitz(a, n)?,
                b: build_toeplitz(b, n)?,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(c: &[f64]) -> CosineSymbol<f64> {
        CosineSymbol::from_f64(c).unwrap()
    }

    #[test]
    fn toeplitz_examples() {
        let t = build_toeplitz(&sym(&[2.0, -1.0]), 3).unwrap();
        assert_eq!(
            t.to_dense(),
            vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]
        );
        let t = build_toeplitz(&sym(&[6.0, -4.0, 1.0]), 3).unwrap();
        assert_eq!(
            t.to_dense(),
            vec![vec![6.0, -4.0, 1.0], vec![-4.0, 6.0, -4.0], vec![1.0, -4.0, 6.0]]
        );
        let t = build_toeplitz(&sym(&[5.0]), 2).unwrap();
        assert_eq!(t.to_dense(), vec![vec![5.0, 0.0], vec![0.0, 5.0]]);
        assert_eq!(t.bandwidth(), 0);
    }

    #[test]
    fn toeplitz_truncates_wide_symbol() {
        let t = build_toeplitz(&sym(&[6.0, -4.0, 1.0]), 2).unwrap();
        assert_eq!(t.bandwidth(), 1);
        assert_eq!(t.to_dense(), vec![vec![6.0, -4.0], vec![-4.0, 6.0]]);
        assert!(build_toeplitz(&sym(&[1.0]), 0).is_err());
    }

    #[test]
    fn neumann_corner() {
        let t = build_toeplitz(&sym(&[2.0, -1.0]), 3).unwrap();
        let c = apply_correction(&t, &SparseCorrection::new([(1, 1, -1.0)])).unwrap();
        assert_eq!(
            c.to_dense(),
            vec![vec![1.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]
        );
        let both = apply_correction(&t, &SparseCorrection::new([(1, 1, -1.0), (3, 3, -1.0)])).unwrap();
        assert_eq!(both.get(0, 0), 1.0);
        assert_eq!(both.get(2, 2), 1.0);
        let same = apply_correction(&t, &SparseCorrection::default()).unwrap();
        assert_eq!(same, t);
    }

    #[test]
    fn correction_widens_band_and_mirrors() {
        let t = build_toeplitz(&sym(&[2.0, -1.0]), 4).unwrap();
        let c = apply_correction(&t, &SparseCorrection::new([(1, 4, 0.5), (2, 2, 1.0), (2, 2, 1.0)])).unwrap();
        assert_eq!(c.bandwidth(), 3);
        assert_eq!(c.get(3, 0), 0.5);
        assert_eq!(c.get(0, 3), 0.5);
        assert_eq!(c.get(1, 1), 4.0);
    }

    #[test]
    fn correction_index_errors() {
        let t = build_toeplitz(&sym(&[2.0, -1.0]), 3).unwrap();
        assert!(matches!(
            apply_correction(&t, &SparseCorrection::new([(4, 1, 1.0)])),
            Err(Error::Index { row: 4, col: 1, order: 3 })
        ));
        assert!(apply_correction(&t, &SparseCorrection::new([(0, 0, 1.0)])).is_err());
        let fam = OperatorFamily::corrected(sym(&[2.0, -1.0]), SparseCorrection::new([(5, 5, -1.0)]));
        assert!(matches!(fam.materialize(3), Err(Error::Index { .. })));
    }

    #[test]
    fn pencil_materializes_both_matrices() {
        let fam = OperatorFamily::pencil(sym(&[4.0, -1.0, -1.0]), sym(&[3.0, 1.0])).unwrap();
        match fam.materialize(3).unwrap() {
            Operator::Pencil { a, b } => {
                assert_eq!(
                    a.to_dense(),
                    vec![vec![4.0, -1.0, -1.0], vec![-1.0, 4.0, -1.0], vec![-1.0, -1.0, 4.0]]
                );
                assert_eq!(b.to_dense(), vec![vec![3.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 3.0]]);
            }
            other => panic!("expected pencil, got {other:?}"),
        }
        assert!(matches!(fam.distribution_symbol(), FamilySymbol::Quotient(_)));
    }

    #[test]
    fn pencil_rejects_indefinite_preconditioner() {
        assert!(OperatorFamily::pencil(sym(&[2.0, -1.0]), sym(&[0.0, 1.0])).is_err());
        assert!(OperatorFamily::pencil(sym(&[2.0, -1.0]), sym(&[0.0])).is_err());
        // 2 - 2cos θ ≥ 0 with a zero at θ = 0 is allowed.
        assert!(OperatorFamily::pencil(sym(&[2.0, -1.0]), sym(&[2.0, -1.0])).is_ok());
    }

    #[test]
    fn order_one() {
        match OperatorFamily::toeplitz(sym(&[2.0, -1.0])).materialize(1).unwrap() {
            Operator::Single(m) => assert_eq!(m.to_dense(), vec![vec![2.0]]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gershgorin_and_norm() {
        let t = build_toeplitz(&sym(&[6.0, -4.0, 1.0]), 6).unwrap();
        assert_eq!(t.gershgorin(), (-4.0, 16.0));
        assert_eq!(t.norm_inf(), 16.0);
        assert_eq!(t.trace(), 36.0);
    }
}
