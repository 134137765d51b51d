//! Full spectra of banded symmetric matrices and symmetric-definite pencils.
//!
//! Both solvers run bisection on inertia counts. By Sylvester's law of
//! inertia the number of negative pivots in an LDLᵀ factorization of
//! `A − σI` (or `A − σB` with `B` positive definite) equals the number of
//! eigenvalues below `σ`. Intervals are split until each holds one
//! eigenvalue, which is then refined to machine precision.

mod jacobi;
mod ldlt;

pub use jacobi::{dense_cholesky, eig_dense_oracle, eig_pencil_dense_oracle, DENSE_ORACLE_LIMIT};

use crate::error::{Error, Result};
use crate::operators::{BandedSymmetricMatrix, Operator};
use crate::scalar::Real;
use ldlt::Workspace;

const MAX_DEPTH: usize = 400;

/// Eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    /// Sorts the values ascending; NaNs are rejected.
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("NaN eigenvalue".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalue `j`, 1-based.
    pub fn get(&self, j: usize) -> T {
        self.values[j - 1]
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

fn pivot_guard<T: Real>(norm: T) -> T {
    (T::tol(1e-14) * norm).max(T::min_positive_value() * T::lit(1e4))
}

/// Number of eigenvalues of `matrix` strictly below `shift`.
pub fn inertia_count<T: Real>(matrix: &BandedSymmetricMatrix<T>, shift: T) -> usize {
    let mut ws = Workspace::new(matrix.order(), matrix.bandwidth());
    let guard = pivot_guard(matrix.norm_inf() + shift.abs());
    shifted_count(&mut ws, matrix, shift, guard)
}

/// Number of generalized eigenvalues of `(a, b)` strictly below `shift`,
/// `b` positive definite.
pub fn inertia_count_pencil<T: Real>(
    a: &BandedSymmetricMatrix<T>,
    b: &BandedSymmetricMatrix<T>,
    shift: T,
) -> usize {
    let bw = a.bandwidth().max(b.bandwidth());
    let mut ws = Workspace::new(a.order(), bw);
    let guard = pivot_guard(a.norm_inf() + shift.abs() * b.norm_inf());
    pencil_count(&mut ws, a, b, shift, guard)
}

#[inline]
fn shifted_count<T: Real>(ws: &mut Workspace<T>, m: &BandedSymmetricMatrix<T>, shift: T, guard: T) -> usize {
    ws.negative_pivots(
        |i, off| {
            let v = m.lower(i, off);
            if off == 0 {
                v - shift
            } else {
                v
            }
        },
        guard,
    )
}

#[inline]
fn band_entry<T: Real>(m: &BandedSymmetricMatrix<T>, i: usize, off: usize) -> T {
    if off <= m.bandwidth() {
        m.lower(i, off)
    } else {
        T::zero()
    }
}

#[inline]
fn pencil_count<T: Real>(
    ws: &mut Workspace<T>,
    a: &BandedSymmetricMatrix<T>,
    b: &BandedSymmetricMatrix<T>,
    shift: T,
    guard: T,
) -> usize {
    ws.negative_pivots(|i, off| band_entry(a, i, off) - shift * band_entry(b, i, off), guard)
}

/// All eigenvalues of a banded symmetric matrix.
pub fn eig_banded<T: Real>(matrix: &BandedSymmetricMatrix<T>) -> Result<Spectrum<T>> {
    let n = matrix.order();
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let (lo, hi) = matrix.gershgorin();
    let mut ws = Workspace::new(n, matrix.bandwidth());
    let guard = pivot_guard(matrix.norm_inf());
    let mut count = |s: T| shifted_count(&mut ws, matrix, s, guard);
    let values = bisect_all(n, lo, hi, &mut count)?;
    Spectrum::new(values)
}

/// All eigenvalues of `A x = λ B x` with `B` positive definite.
pub fn eig_pencil<T: Real>(a: &BandedSymmetricMatrix<T>, b: &BandedSymmetricMatrix<T>) -> Result<Spectrum<T>> {
    let n = a.order();
    if b.order() != n {
        return Err(Error::SizeMismatch { expected: n, actual: b.order() });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let bw = a.bandwidth().max(b.bandwidth());
    let mut ws = Workspace::new(n, bw);

    let mut b_ws = Workspace::new(n, b.bandwidth());
    b_ws.positive_definite(|i, off| b.lower(i, off))?;
    let b_min = smallest_eigenvalue_bound(b, &mut b_ws)?;
    let (_, b_max) = b.gershgorin();
    let (a_lo, a_hi) = a.gershgorin();

    // Rayleigh quotients xᵀAx / xᵀBx lie between these ratios.
    let ratios = [a_lo / b_min, a_lo / b_max, a_hi / b_min, a_hi / b_max];
    let lo = ratios.iter().copied().fold(T::infinity(), T::min);
    let hi = ratios.iter().copied().fold(T::neg_infinity(), T::max);

    let guard = pivot_guard(a.norm_inf() + lo.abs().max(hi.abs()) * b.norm_inf());
    let mut count = |s: T| pencil_count(&mut ws, a, b, s, guard);
    let values = bisect_all(n, lo, hi, &mut count)?;
    Spectrum::new(values)
}

/// Spectrum of a materialized family member.
pub fn eig_operator<T: Real>(op: &Operator<T>) -> Result<Spectrum<T>> {
    match op {
        Operator::Single(m) => eig_banded(m),
        Operator::Pencil { a, b } => eig_pencil(a, b),
    }
}

/// A positive lower bound on `λ_min(b)`.
fn smallest_eigenvalue_bound<T: Real>(b: &BandedSymmetricMatrix<T>, ws: &mut Workspace<T>) -> Result<T> {
    let (g_lo, g_hi) = b.gershgorin();
    if g_lo > T::zero() {
        return Ok(g_lo);
    }
    // Largest σ > 0 with no eigenvalue below it.
    let guard = pivot_guard(b.norm_inf());
    let (mut lo, mut hi) = (T::zero(), g_hi);
    for _ in 0..80 {
        let mid = (lo + hi) / T::lit(2.0);
        if shifted_count(ws, b, mid, guard) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > T::zero() {
        Ok(lo)
    } else {
        Err(Error::NotPositiveDefinite { pivot: 0, value: 0.0 })
    }
}

/// Bisection over `[lo, hi]`, widened until the counts confirm it brackets
/// all `n` eigenvalues.
fn bisect_all<T: Real, C: FnMut(T) -> usize>(n: usize, lo: T, hi: T, count: &mut C) -> Result<Vec<T>> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter("non-finite eigenvalue bounds".into()));
    }
    let scale = lo.abs().max(hi.abs()).max(T::min_positive_value());
    let mut margin = scale * T::tol(1e-10) + T::min_positive_value();
    let (mut lo, mut hi) = (lo - margin, hi + margin);
    let mut tries = 0;
    while count(lo) != 0 || count(hi) != n {
        margin = margin * T::lit(16.0);
        lo = lo - margin;
        hi = hi + margin;
        tries += 1;
        if tries > 64 {
            return Err(Error::Convergence { iterations: tries });
        }
    }
    let scale = lo.abs().max(hi.abs());
    let mut slicer = Slicer {
        count,
        values: vec![T::nan(); n],
        abs_floor: scale * T::epsilon() * T::lit(1e-2),
    };
    slicer.slice(lo, hi, 0, n, 0)?;
    Ok(slicer.values)
}

struct Slicer<'c, T, C> {
    count: &'c mut C,
    values: Vec<T>,
    abs_floor: T,
}

impl<T: Real, C: FnMut(T) -> usize> Slicer<'_, T, C> {
    #[inline]
    fn converged(&self, lo: T, hi: T, mid: T) -> bool {
        let width = hi - lo;
        mid <= lo || mid >= hi || width <= T::lit(2.0) * T::epsilon() * lo.abs().max(hi.abs()) + self.abs_floor
    }

    /// Eigenvalues with indices `c_lo..c_hi` lie in `[lo, hi)`.
    fn slice(&mut self, mut lo: T, mut hi: T, c_lo: usize, c_hi: usize, depth: usize) -> Result<()> {
        if c_hi == c_lo {
            return Ok(());
        }
        let two = T::lit(2.0);
        if c_hi - c_lo == 1 {
            for _ in 0..MAX_DEPTH {
                let mid = (lo + hi) / two;
                if self.converged(lo, hi, mid) {
                    self.values[c_lo] = mid;
                    return Ok(());
                }
                if (self.count)(mid) > c_lo {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Err(Error::Convergence { iterations: MAX_DEPTH });
        }
        if depth >= MAX_DEPTH {
            return Err(Error::Convergence { iterations: depth });
        }
        let mid = (lo + hi) / two;
        if self.converged(lo, hi, mid) {
            // Cluster narrower than the working precision.
            for v in &mut self.values[c_lo..c_hi] {
                *v = mid;
            }
            return Ok(());
        }
        let c = (self.count)(mid).clamp(c_lo, c_hi);
        self.slice(lo, mid, c_lo, c, depth + 1)?;
        self.slice(mid, hi, c, c_hi, depth + 1)
    }
}
