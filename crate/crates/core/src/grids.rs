//! The standard sampling grid, the perfect grid recovered from a spectrum,
//! and the difference between them.

use crate::eigensolve::Spectrum;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symbol::{MonotonicityClass, SpectralSymbol};

/// Angles in `[0, π]` indexed `j = 1..n`, with grid parameter `h = 1/(n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    points: Vec<T>,
    /// Points that were snapped to an endpoint or into `[0, π]`.
    clamped: Vec<bool>,
}

impl<T: Real> Grid<T> {
    pub fn new(points: Vec<T>, clamped: Vec<bool>) -> Result<Self> {
        if points.len() != clamped.len() {
            return Err(Error::SizeMismatch { expected: points.len(), actual: clamped.len() });
        }
        Ok(Self { points, clamped })
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn h(&self) -> T {
        grid_parameter(self.order())
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// Point `j`, 1-based.
    pub fn point(&self, j: usize) -> T {
        self.points[j - 1]
    }

    pub fn clamped(&self) -> &[bool] {
        &self.clamped
    }

    pub fn any_clamped(&self) -> bool {
        self.clamped.iter().any(|&c| c)
    }
}

/// `h = 1/(n+1)`.
pub fn grid_parameter<T: Real>(n: usize) -> T {
    T::one() / T::from_count(n + 1)
}

/// `θ_{j,n} = jπ/(n+1)`.
pub fn standard_point<T: Real>(j: usize, n: usize) -> T {
    T::from_count(j) * T::PI() / T::from_count(n + 1)
}

pub fn standard_grid<T: Real>(n: usize) -> Grid<T> {
    let points = (1..=n).map(|j| standard_point(j, n)).collect();
    Grid { points, clamped: vec![false; n] }
}

/// `ξ_j` with `f(ξ_j) = λ_j`; for decreasing `f` the spectrum is read in
/// reverse so that the grid ascends.
pub fn perfect_grid<T: Real, S: SpectralSymbol<T> + ?Sized>(
    spectrum: &Spectrum<T>,
    symbol: &S,
    class: MonotonicityClass,
) -> Result<Grid<T>> {
    let n = spectrum.order();
    let mut points = Vec::with_capacity(n);
    let mut clamped = Vec::with_capacity(n);
    for j in 1..=n {
        let pre = symbol.invert(paired_eigenvalue(spectrum, j, class)?, class)?;
        points.push(pre.angle);
        clamped.push(pre.clamped);
    }
    Ok(Grid { points, clamped })
}

/// The eigenvalue paired with grid index `j` (1-based) by rank.
pub fn paired_eigenvalue<T: Real>(spectrum: &Spectrum<T>, j: usize, class: MonotonicityClass) -> Result<T> {
    let n = spectrum.order();
    match class {
        MonotonicityClass::Increasing => Ok(spectrum.get(j)),
        MonotonicityClass::Decreasing => Ok(spectrum.get(n + 1 - j)),
        MonotonicityClass::NonMonotone => Err(Error::NotMonotone),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridErrorKind {
    /// `ξ − θ`.
    Raw,
    /// `(ξ − θ)/h`.
    Scaled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridError<T> {
    pub values: Vec<T>,
    pub kind: GridErrorKind,
}

impl<T: Real> GridError<T> {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

pub fn grid_error<T: Real>(perfect: &Grid<T>, standard: &Grid<T>, scaled: bool) -> Result<GridError<T>> {
    if perfect.order() != standard.order() {
        return Err(Error::SizeMismatch { expected: standard.order(), actual: perfect.order() });
    }
    let h = standard.h();
    let values = perfect
        .points()
        .iter()
        .zip(standard.points())
        .map(|(&xi, &theta)| if scaled { (xi - theta) / h } else { xi - theta })
        .collect();
    let kind = if scaled { GridErrorKind::Scaled } else { GridErrorKind::Raw };
    Ok(GridError { values, kind })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::eig_banded;
    use crate::operators::OperatorFamily;
    use crate::operators::{Operator, SparseCorrection};
    use crate::symbol::CosineSymbol;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn neumann_dirichlet() -> OperatorFamily<f64> {
        OperatorFamily::corrected(
            CosineSymbol::from_f64(&[2.0, -1.0]).unwrap(),
            SparseCorrection::new([(1, 1, -1.0)]),
        )
    }

    fn spectrum(fam: &OperatorFamily<f64>, n: usize) -> Spectrum<f64> {
        match fam.materialize(n).unwrap() {
            Operator::Single(m) => eig_banded(&m).unwrap(),
            Operator::Pencil { .. } => unreachable!(),
        }
    }

    #[test]
    fn standard_grids() {
        let g = standard_grid::<f64>(3);
        assert_eq!(g.points(), &[PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]);
        assert_eq!(g.h(), 0.25);
        assert_eq!(standard_grid::<f64>(1).points(), &[PI / 2.0]);
        let g7 = standard_grid::<f64>(7);
        for j in 1..=7 {
            assert_abs_diff_eq!(g7.point(j), j as f64 * PI / 8.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dirichlet_grid_is_perfect() {
        let f = CosineSymbol::from_f64(&[2.0, -1.0]).unwrap();
        let fam = OperatorFamily::toeplitz(f.clone());
        for n in [1, 2, 5, 17, 64] {
            let xi = perfect_grid(&spectrum(&fam, n), &f, MonotonicityClass::Increasing).unwrap();
            let e = grid_error(&xi, &standard_grid(n), false).unwrap();
            assert!(e.max_abs() < 1e-12, "n={n}: {}", e.max_abs());
        }
    }

    #[test]
    fn neumann_dirichlet_order_three() {
        let fam = neumann_dirichlet();
        let f = CosineSymbol::from_f64(&[2.0, -1.0]).unwrap();
        let xi = perfect_grid(&spectrum(&fam, 3), &f, MonotonicityClass::Increasing).unwrap();
        for j in 1..=3 {
            assert_abs_diff_eq!(xi.point(j), (j as f64 - 0.5) * PI / 3.5, epsilon = 1e-13);
        }
        let raw = grid_error(&xi, &standard_grid(3), false).unwrap();
        assert_abs_diff_eq!(raw.values[0], -3.0 * PI / 28.0, epsilon = 1e-13);
        assert_abs_diff_eq!(raw.values[0], -0.336_599_2, epsilon = 1e-7);
        let scaled = grid_error(&xi, &standard_grid(3), true).unwrap();
        assert_abs_diff_eq!(scaled.values[0], -3.0 * PI / 7.0, epsilon = 1e-12);
    }

    #[test]
    fn neumann_dirichlet_closed_form_error() {
        let fam = neumann_dirichlet();
        let f = CosineSymbol::from_f64(&[2.0, -1.0]).unwrap();
        for n in [10, 100, 500] {
            let xi = perfect_grid(&spectrum(&fam, n), &f, MonotonicityClass::Increasing).unwrap();
            let theta = standard_grid(n);
            let e = grid_error(&xi, &theta, false).unwrap();
            let worst = e
                .values
                .iter()
                .zip(theta.points())
                .map(|(e, t)| (e - (t - PI) / (2 * n + 1) as f64).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-12, "n={n}: {worst}");
            assert!(xi.points().iter().all(|&p| (0.0..=PI).contains(&p)));
        }
    }

    #[test]
    fn decreasing_symbol_reverses_pairing() {
        let f = CosineSymbol::from_f64(&[2.0, 1.0]).unwrap();
        let fam = OperatorFamily::toeplitz(f.clone());
        let xi = perfect_grid(&spectrum(&fam, 9), &f, MonotonicityClass::Decreasing).unwrap();
        let e = grid_error(&xi, &standard_grid(9), false).unwrap();
        assert!(e.max_abs() < 1e-12);
        assert!(xi.points().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn size_mismatch() {
        assert!(matches!(
            grid_error(&standard_grid::<f64>(3), &standard_grid(4), false),
            Err(Error::SizeMismatch { .. })
        ));
    }
}
