//! Dense reference eigensolver (cyclic Jacobi), independent of the banded
//! bisection path. Intended for cross-checks at modest order.

use super::Spectrum;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DENSE_ORACLE_LIMIT: usize = 512;

const MAX_SWEEPS: usize = 100;

fn check_square<T>(a: &[Vec<T>]) -> Result<usize> {
    let n = a.len();
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::Size { order: n, limit: DENSE_ORACLE_LIMIT });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    for row in a {
        if row.len() != n {
            return Err(Error::SizeMismatch { expected: n, actual: row.len() });
        }
    }
    Ok(n)
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.
pub fn eig_dense_oracle<T: Real>(matrix: &[Vec<T>]) -> Result<Spectrum<T>> {
    let n = check_square(matrix)?;
    let mut a: Vec<T> = matrix.iter().flat_map(|r| r.iter().copied()).collect();
    // Symmetrize so that a slightly asymmetric input is treated consistently.
    for i in 0..n {
        for j in 0..i {
            let v = (a[i * n + j] + a[j * n + i]) / T::lit(2.0);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    let frob2 = a.iter().fold(T::zero(), |s, &v| s + v * v);
    let stop = T::epsilon() * T::epsilon() * frob2 * T::lit(1e-4);

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[p * n + q] * a[p * n + q];
            }
        }
        if off <= stop || off == T::zero() {
            let diag = (0..n).map(|i| a[i * n + i]).collect();
            return Spectrum::new(diag);
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
    }
    Err(Error::Convergence { iterations: MAX_SWEEPS })
}

/// Annihilates `a[p][q]` with a two-sided rotation.
fn rotate<T: Real>(a: &mut [T], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == T::zero() {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (T::lit(2.0) * apq);
    let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
        T::one() / (T::lit(2.0) * theta)
    } else {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        a[k * n + p] = new_p;
        a[p * n + k] = new_p;
        a[k * n + q] = new_q;
        a[q * n + k] = new_q;
    }
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = T::zero();
    a[q * n + p] = T::zero();
}

/// Lower-triangular `L` with `B = L Lᵀ`.
pub fn dense_cholesky<T: Real>(b: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = b.len();
    let mut l = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = b[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return Err(Error::NotPositiveDefinite { pivot: i, value: s.as_f64() });
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Generalized eigenvalues of dense `(a, b)` via `L⁻¹ A L⁻ᵀ` and Jacobi.
pub fn eig_pencil_dense_oracle<T: Real>(a: &[Vec<T>], b: &[Vec<T>]) -> Result<Spectrum<T>> {
    let n = check_square(a)?;
    if check_square(b)? != n {
        return Err(Error::SizeMismatch { expected: n, actual: b.len() });
    }
    let l = dense_cholesky(b)?;
    // Y = L⁻¹ A by forward substitution on each column.
    let mut y = vec![vec![T::zero(); n]; n];
    for col in 0..n {
        for i in 0..n {
            let mut s = a[i][col];
            for k in 0..i {
                s = s - l[i][k] * y[k][col];
            }
            y[i][col] = s / l[i][i];
        }
    }
    // C = Y L⁻ᵀ, i.e. Cᵀ = L⁻¹ Yᵀ.
    let mut c = vec![vec![T::zero(); n]; n];
    for row in 0..n {
        for i in 0..n {
            let mut s = y[row][i];
            for k in 0..i {
                s = s - l[i][k] * c[row][k];
            }
            c[row][i] = s / l[i][i];
        }
    }
    eig_dense_oracle(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn diagonal() {
        let a = vec![vec![3.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]];
        assert_eq!(eig_dense_oracle(&a).unwrap().values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn laplacian_closed_form() {
        let n: usize = 5;
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2.0f64,
                        1 => -1.0,
                        _ => 0.0,
                    })
                    .collect()
            })
            .collect();
        let s = eig_dense_oracle(&a).unwrap();
        for (j, v) in s.values().iter().enumerate() {
            assert_abs_diff_eq!(*v, 2.0 - 2.0 * ((j + 1) as f64 * PI / 6.0).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn size_cap() {
        let a = vec![vec![0.0; DENSE_ORACLE_LIMIT + 1]; DENSE_ORACLE_LIMIT + 1];
        assert!(matches!(eig_dense_oracle(&a), Err(Error::Size { .. })));
    }

    #[test]
    fn pencil_identity_b() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let b = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = eig_pencil_dense_oracle(&a, &b).unwrap();
        assert_abs_diff_eq!(s.get(1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.get(2), 3.0, epsilon = 1e-15);
    }
}
