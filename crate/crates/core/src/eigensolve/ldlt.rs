//! Unpivoted banded LDLᵀ, used for inertia counts and definiteness checks.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reusable storage for one factorization of order `n`, bandwidth `b`.
#[derive(Debug, Clone)]
pub(crate) struct Workspace<T> {
    bandwidth: usize,
    /// Row `i` holds `L[i][i-1-o]` at `i*bandwidth + o`.
    l: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> Workspace<T> {
    pub(crate) fn new(n: usize, bandwidth: usize) -> Self {
        Self {
            bandwidth,
            l: vec![T::zero(); n * bandwidth],
            d: vec![T::zero(); n],
        }
    }

    /// Factors the matrix whose entry at `(i, i − off)` is `entry(i, off)`,
    /// calling `pivot(i, d_i)` for each raw pivot. The value returned by
    /// `pivot` replaces `d_i` in later rows.
    #[inline]
    pub(crate) fn factor<E, P>(&mut self, entry: E, mut pivot: P)
    where
        E: Fn(usize, usize) -> T,
        P: FnMut(usize, T) -> T,
    {
        let bw = self.bandwidth;
        let n = self.d.len();
        let l = &mut self.l;
        let d = &mut self.d;
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            let row = i * bw;
            for j in j0..i {
                let mut s = entry(i, i - j);
                let jrow = j * bw;
                for k in j0..j {
                    s = s - l[row + (i - 1 - k)] * l[jrow + (j - 1 - k)] * d[k];
                }
                l[row + (i - 1 - j)] = s / d[j];
            }
            let mut di = entry(i, 0);
            for k in j0..i {
                let lik = l[row + (i - 1 - k)];
                di = di - lik * lik * d[k];
            }
            d[i] = pivot(i, di);
        }
    }

    /// Number of negative pivots; pivots smaller than `guard` in magnitude
    /// are replaced by `±guard`, zero counting as positive.
    pub(crate) fn negative_pivots<E>(&mut self, entry: E, guard: T) -> usize
    where
        E: Fn(usize, usize) -> T,
    {
        let mut count = 0usize;
        self.factor(entry, |_, di| {
            let di = if di.abs() < guard {
                if di < T::zero() {
                    -guard
                } else {
                    guard
                }
            } else {
                di
            };
            if di < T::zero() {
                count += 1;
            }
            di
        });
        count
    }

    /// Succeeds iff every pivot is strictly positive; returns the smallest.
    pub(crate) fn positive_definite<E>(&mut self, entry: E) -> Result<T>
    where
        E: Fn(usize, usize) -> T,
    {
        let mut failure: Option<(usize, T)> = None;
        let mut smallest = T::infinity();
        self.factor(entry, |i, di| {
            if failure.is_none() && !(di > T::zero()) {
                failure = Some((i, di));
            }
            smallest = smallest.min(di);
            // Keep the sweep finite once failed.
            if di > T::zero() {
                di
            } else {
                T::one()
            }
        });
        match failure {
            Some((pivot, value)) => Err(Error::NotPositiveDefinite { pivot, value: value.as_f64() }),
            None => Ok(smallest),
        }
    }
}
