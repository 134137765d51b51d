//! Small dense LU with partial pivoting.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub(crate) struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub(crate) fn factor(a: &[Vec<T>]) -> Result<Self> {
        let n = a.len();
        let mut lu: Vec<T> = Vec::with_capacity(n * n);
        for row in a {
            if row.len() != n {
                return Err(Error::SizeMismatch { expected: n, actual: row.len() });
            }
            lu.extend_from_slice(row);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&x, &y| {
                    lu[x * n + col]
                        .abs()
                        .partial_cmp(&lu[y * n + col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("nonempty range");
            let pivot = lu[pivot_row * n + col];
            if pivot == T::zero() || !pivot.is_finite() {
                return Err(Error::SingularSystem);
            }
            if pivot_row != col {
                for k in 0..n {
                    lu.swap(col * n + k, pivot_row * n + k);
                }
                perm.swap(col, pivot_row);
            }
            for r in col + 1..n {
                let factor = lu[r * n + col] / pivot;
                lu[r * n + col] = factor;
                for k in col + 1..n {
                    lu[r * n + k] = lu[r * n + k] - factor * lu[col * n + k];
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub(crate) fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] = x[i] - self.lu[i * n + k] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] = x[i] - self.lu[i * n + k] * x[k];
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_with_pivoting() {
        let a = vec![vec![0.0f64, 1.0], vec![2.0, 1.0]];
        let lu = Lu::factor(&a).unwrap();
        let x = lu.solve(&[1.0, 4.0]);
        assert!((x[0] - 1.5).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(Lu::factor(&a), Err(Error::SingularSystem)));
    }
}
