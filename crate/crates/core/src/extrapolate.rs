//! Carrying a sampled expansion from the base grid to any order, and the
//! resulting eigenvalue approximations.

use crate::eigensolve::Spectrum;
use crate::error::{Error, Result};
use crate::expansion::{ExpansionKind, ExpansionTable};
use crate::grids::{paired_eigenvalue, perfect_grid, standard_grid, Grid};
use crate::interp::{lagrange_eval, nearest_window};
use crate::scalar::Real;
use crate::symbol::{MonotonicityClass, SpectralSymbol};

/// How the eigenvalues are reconstructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// `f(θ + Σ d̃_k h^k)`.
    GridExpansion,
    /// `f(θ) + Σ c̃_k h^k`.
    EigenvalueExpansion,
}

impl Method {
    pub fn expansion_kind(self) -> ExpansionKind {
        match self {
            Method::GridExpansion => ExpansionKind::Grid,
            Method::EigenvalueExpansion => ExpansionKind::Eigenvalue,
        }
    }

    pub fn for_kind(kind: ExpansionKind) -> Self {
        match kind {
            ExpansionKind::Grid => Method::GridExpansion,
            ExpansionKind::Eigenvalue => Method::EigenvalueExpansion,
        }
    }

    /// Short label used in file names: `xi` or `theta`.
    pub fn label(self) -> &'static str {
        match self {
            Method::GridExpansion => "xi",
            Method::EigenvalueExpansion => "theta",
        }
    }
}

/// Interpolation degree for row `k` of an order-`alpha` table.
///
/// Row `k` carries about `α − k + 1` accurate orders, so later rows get
/// cheaper stencils.
pub fn stencil_degree(alpha: usize, k: usize) -> usize {
    (alpha + 1).saturating_sub(k).max(1)
}

/// Interpolates every row of `table` onto `target`, `α × n`.
///
/// Each value uses the `p_k + 1` nearest usable base samples; beyond the
/// outermost usable samples the edge stencil extrapolates.
pub fn resample<T: Real>(table: &ExpansionTable<T>, target: &Grid<T>) -> Result<Vec<Vec<T>>> {
    let alpha = table.alpha();
    let mut out = Vec::with_capacity(alpha);
    for k in 1..=alpha {
        let (xs, ys): (Vec<T>, Vec<T>) = (1..=table.n1())
            .filter(|&j| table.usable(k, j))
            .map(|j| (table.theta1()[j - 1], table.row(k)[j - 1]))
            .unzip();
        if xs.len() < 2 {
            return Err(Error::InsufficientSamples { k, available: xs.len() });
        }
        let width = stencil_degree(alpha, k) + 1;
        let row = target
            .points()
            .iter()
            .map(|&x| {
                let (lo, hi) = nearest_window(&xs, x, width);
                lagrange_eval(&xs[lo..hi], &ys[lo..hi], x)
            })
            .collect();
        out.push(row);
    }
    Ok(out)
}

/// `ξ̃_j = θ_j + Σ_{k=1}^{β} d̃_k(θ_j) h^k`, clamped into `[0, π]`.
pub fn assemble_grid<T: Real>(resampled: &[Vec<T>], target: &Grid<T>, beta: usize) -> Result<Grid<T>> {
    if beta == 0 || beta > resampled.len() {
        return Err(Error::InvalidParameter(format!(
            "beta must be in 1..={}, got {beta}",
            resampled.len()
        )));
    }
    let n = target.order();
    if resampled.iter().any(|r| r.len() != n) {
        return Err(Error::SizeMismatch { expected: n, actual: resampled[0].len() });
    }
    let h = target.h();
    let pi = T::PI();
    let mut points = Vec::with_capacity(n);
    let mut clamped = Vec::with_capacity(n);
    for (j, &theta) in target.points().iter().enumerate() {
        let raw = theta + correction(resampled, j, beta, h);
        let xi = raw.max(T::zero()).min(pi);
        clamped.push(xi != raw);
        points.push(xi);
    }
    Grid::new(points, clamped)
}

/// `Σ_{k=1}^{β} row_k[j] h^k` in Horner order.
fn correction<T: Real>(rows: &[Vec<T>], j: usize, beta: usize, h: T) -> T {
    let mut acc = T::zero();
    for k in (0..beta).rev() {
        acc = (acc + rows[k][j]) * h;
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumApproximation<T> {
    pub n: usize,
    pub beta: usize,
    pub method: Method,
    /// `ξ̃` for the grid method; the standard grid for the eigenvalue one.
    pub xi_tilde: Grid<T>,
    pub lambda_tilde: Vec<T>,
}

impl<T: Real> SpectrumApproximation<T> {
    pub fn theta(&self) -> Grid<T> {
        standard_grid(self.n)
    }
}

pub fn approximate_spectrum<T: Real, S: SpectralSymbol<T> + ?Sized>(
    symbol: &S,
    table: &ExpansionTable<T>,
    n: usize,
    beta: usize,
    method: Method,
) -> Result<SpectrumApproximation<T>> {
    if method.expansion_kind() != table.kind() {
        return Err(Error::KindMismatch);
    }
    if n == 0 {
        return Err(Error::InvalidParameter("target order must be at least 1".into()));
    }
    let theta = standard_grid(n);
    let resampled = resample(table, &theta)?;
    match method {
        Method::GridExpansion => {
            let xi = assemble_grid(&resampled, &theta, beta)?;
            let lambda_tilde = xi.points().iter().map(|&x| symbol.eval(x)).collect();
            Ok(SpectrumApproximation { n, beta, method, xi_tilde: xi, lambda_tilde })
        }
        Method::EigenvalueExpansion => {
            if beta == 0 || beta > table.alpha() {
                return Err(Error::InvalidParameter(format!("beta must be in 1..={}, got {beta}", table.alpha())));
            }
            let h = theta.h();
            let lambda_tilde = theta
                .points()
                .iter()
                .enumerate()
                .map(|(j, &t)| symbol.eval(t) + correction(&resampled, j, beta, h))
                .collect();
            Ok(SpectrumApproximation { n, beta, method, xi_tilde: theta, lambda_tilde })
        }
    }
}

/// Target indices whose angle lies in a base cell next to an unusable sample
/// of rows `1..=beta`. Errors there reflect the excluded data and are left
/// out of the summary maxima.
pub fn target_mask<T: Real>(table: &ExpansionTable<T>, target: &Grid<T>, beta: usize) -> Vec<bool> {
    let n1 = table.n1();
    let theta1 = table.theta1();
    let mut regions: Vec<(T, T)> = Vec::new();
    for k in 1..=beta.min(table.alpha()) {
        for j in 1..=n1 {
            if !table.usable(k, j) {
                let lo = if j == 1 { T::zero() } else { theta1[j - 2] };
                let hi = if j == n1 { T::PI() } else { theta1[j] };
                regions.push((lo, hi));
            }
        }
    }
    target
        .points()
        .iter()
        .map(|&x| regions.iter().any(|&(lo, hi)| x >= lo && x <= hi))
        .collect()
}

/// Per-index diagnostics against an exact spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport<T> {
    pub method: Method,
    pub beta: usize,
    pub theta: Vec<T>,
    /// Perfect grid `ξ` from the exact spectrum.
    pub xi: Vec<T>,
    /// Exact eigenvalue paired with each index.
    pub lambda: Vec<T>,
    /// `E^ξ = ξ − θ`.
    pub grid_error: Vec<T>,
    /// `E^{λ,θ} = λ − f(θ)`.
    pub symbol_error: Vec<T>,
    /// `Ẽ^ξ_β = ξ − ξ̃`; grid method only.
    pub approx_grid_error: Option<Vec<T>>,
    /// `λ − λ̃`, i.e. `Ẽ^{λ,ξ}_β` or `Ẽ^{λ,θ}_β` by method.
    pub approx_lambda_error: Vec<T>,
}

pub fn error_report<T: Real, S: SpectralSymbol<T> + ?Sized>(
    approx: &SpectrumApproximation<T>,
    exact: &Spectrum<T>,
    symbol: &S,
    class: MonotonicityClass,
) -> Result<ErrorReport<T>> {
    let n = approx.n;
    if exact.order() != n {
        return Err(Error::SizeMismatch { expected: n, actual: exact.order() });
    }
    let theta = standard_grid::<T>(n);
    let xi = perfect_grid(exact, symbol, class)?;
    let lambda: Vec<T> = (1..=n).map(|j| paired_eigenvalue(exact, j, class)).collect::<Result<_>>()?;
    let grid_error = xi.points().iter().zip(theta.points()).map(|(&x, &t)| x - t).collect();
    let symbol_error = lambda.iter().zip(theta.points()).map(|(&l, &t)| l - symbol.eval(t)).collect();
    let approx_grid_error = match approx.method {
        Method::GridExpansion => Some(
            xi.points()
                .iter()
                .zip(approx.xi_tilde.points())
                .map(|(&x, &xt)| x - xt)
                .collect(),
        ),
        Method::EigenvalueExpansion => None,
    };
    let approx_lambda_error = lambda.iter().zip(&approx.lambda_tilde).map(|(&l, &lt)| l - lt).collect();
    Ok(ErrorReport {
        method: approx.method,
        beta: approx.beta,
        theta: theta.points().to_vec(),
        xi: xi.points().to_vec(),
        lambda,
        grid_error,
        symbol_error,
        approx_grid_error,
        approx_lambda_error,
    })
}

/// `max |v_j|` over indices where `mask` is false (all, if `mask` is empty).
pub fn max_abs_unmasked<T: Real>(values: &[T], mask: &[bool]) -> T {
    values
        .iter()
        .enumerate()
        .filter(|(j, _)| !mask.get(*j).copied().unwrap_or(false))
        .fold(T::zero(), |m, (_, v)| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{ExpansionConfig, SampleFlag};
    use crate::grids::standard_point;
    use crate::symbol::CosineSymbol;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn table_from(rows: Vec<Vec<f64>>, kind: ExpansionKind) -> ExpansionTable<f64> {
        let alpha = rows.len();
        let n1 = rows[0].len();
        let cfg = ExpansionConfig::new(n1, alpha, kind).unwrap();
        let flags = vec![vec![SampleFlag::Valid; n1]; alpha];
        ExpansionTable::from_parts(cfg, rows, flags).unwrap()
    }

    fn closed_form_rows(n1: usize, alpha: usize) -> Vec<Vec<f64>> {
        (1..=alpha)
            .map(|k| (1..=n1).map(|j| (standard_point::<f64>(j, n1) - PI) / 2f64.powi(k as i32)).collect())
            .collect()
    }

    #[test]
    fn stencil_degrees() {
        assert_eq!(stencil_degree(4, 1), 4);
        assert_eq!(stencil_degree(4, 4), 1);
        assert_eq!(stencil_degree(3, 3), 1);
        assert_eq!(stencil_degree(1, 1), 1);
    }

    #[test]
    fn resample_reproduces_affine_rows() {
        let table = table_from(closed_form_rows(50, 4), ExpansionKind::Grid);
        for n in [7, 50, 333, 4000] {
            let target = standard_grid(n);
            let r = resample(&table, &target).unwrap();
            for k in 1..=4 {
                for (j, &t) in target.points().iter().enumerate() {
                    assert_abs_diff_eq!(r[k - 1][j], (t - PI) / 2f64.powi(k as i32), epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn resample_identity_on_nodes() {
        let rows = vec![(1..=30).map(|j| (j as f64).sin()).collect::<Vec<_>>()];
        let table = table_from(rows.clone(), ExpansionKind::Grid);
        let r = resample(&table, &standard_grid(30)).unwrap();
        assert_eq!(r[0], rows[0]);
    }

    #[test]
    fn insufficient_samples() {
        let cfg = ExpansionConfig::new(3, 1, ExpansionKind::Grid).unwrap();
        let flags = vec![vec![SampleFlag::Masked, SampleFlag::Masked, SampleFlag::Valid]];
        let t = ExpansionTable::from_parts(cfg, vec![vec![0.0; 3]], flags).unwrap();
        assert_eq!(
            resample(&t, &standard_grid(5)),
            Err(Error::InsufficientSamples { k: 1, available: 1 })
        );
    }

    #[test]
    fn zero_table_gives_symbol_sampling() {
        let f = CosineSymbol::from_f64(&[6.0, -4.0, 1.0]).unwrap();
        let table = table_from(vec![vec![0.0; 10]; 2], ExpansionKind::Grid);
        let a = approximate_spectrum(&f, &table, 25, 2, Method::GridExpansion).unwrap();
        let theta = standard_grid::<f64>(25);
        assert_eq!(a.xi_tilde.points(), theta.points());
        for (l, t) in a.lambda_tilde.iter().zip(theta.points()) {
            assert_eq!(*l, f.eval(*t));
        }
    }

    #[test]
    fn closed_form_grid_is_reconstructed() {
        // For the Neumann-Dirichlet Laplacian d_k(θ) = (θ − π)/2^k exactly, so
        // the truncation error is |θ − π| (h/2)^5 / (1 − h/2).
        let table = table_from(closed_form_rows(100, 4), ExpansionKind::Grid);
        let n = 1000;
        let theta = standard_grid::<f64>(n);
        let r = resample(&table, &theta).unwrap();
        let xi_t = assemble_grid(&r, &theta, 4).unwrap();
        let h = theta.h();
        for j in 1..=n {
            let xi = (j as f64 - 0.5) * PI / (n as f64 + 0.5);
            let bound = (PI - theta.point(j)) * (h / 2.0).powi(5) / (1.0 - h / 2.0);
            assert!((xi_t.point(j) - xi).abs() <= bound + 1e-15);
            assert!((xi_t.point(j) - xi).abs() <= 3.2e-14 * PI);
        }
    }

    #[test]
    fn beta_bounds_and_kind_mismatch() {
        let f = CosineSymbol::from_f64(&[2.0, -1.0]).unwrap();
        let table = table_from(vec![vec![0.0; 10]; 2], ExpansionKind::Grid);
        assert!(approximate_spectrum(&f, &table, 20, 3, Method::GridExpansion).is_err());
        assert!(approximate_spectrum(&f, &table, 20, 0, Method::GridExpansion).is_err());
        assert_eq!(
            approximate_spectrum(&f, &table, 20, 1, Method::EigenvalueExpansion),
            Err(Error::KindMismatch)
        );
    }

    #[test]
    fn clamps_into_range() {
        let target = standard_grid::<f64>(3);
        let rows = vec![vec![-100.0, 0.0, 100.0]];
        let g = assemble_grid(&rows, &target, 1).unwrap();
        assert_eq!(g.points(), &[0.0, PI / 2.0, PI]);
        assert_eq!(g.clamped(), &[true, false, true]);
    }

    #[test]
    fn masked_regions() {
        let cfg = ExpansionConfig::new(10, 2, ExpansionKind::Grid).unwrap();
        let mut flags = vec![vec![SampleFlag::Valid; 10]; 2];
        flags[1][0] = SampleFlag::Masked;
        flags[1][1] = SampleFlag::Masked;
        let t = ExpansionTable::from_parts(cfg, vec![vec![0.0; 10]; 2], flags).unwrap();
        let target = standard_grid::<f64>(100);
        let m1 = target_mask(&t, &target, 1);
        assert!(m1.iter().all(|&m| !m));
        let m2 = target_mask(&t, &target, 2);
        let theta3 = standard_point::<f64>(3, 10);
        for (j, &x) in target.points().iter().enumerate() {
            assert_eq!(m2[j], x <= theta3);
        }
        assert_eq!(max_abs_unmasked(&[5.0, 1.0, -2.0], &[true, false, false]), 2.0);
        assert_eq!(max_abs_unmasked(&[5.0, 1.0], &[]), 5.0);
    }
}
