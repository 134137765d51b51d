//! Sampled expansion functions from a doubling hierarchy of small matrices.
//!
//! For orders `n_k = 2^{k−1}(n₁+1) − 1` the grids nest: index
//! `j_k = 2^{k−1} j₁` of level `k` sits at the same angle as `j₁` of the
//! base level. Collecting the per-level errors at those shared angles and
//! solving the Vandermonde system `V D = E`, `V_{ik} = h_i^k`, yields the
//! expansion coefficients sampled on the base grid.

use std::collections::{BTreeMap, BTreeSet};

use crate::eigensolve::{eig_operator, Spectrum};
use crate::error::{Error, Result};
use crate::grids::{grid_parameter, paired_eigenvalue, standard_point};
use crate::linsolve::Lu;
use crate::operators::OperatorFamily;
use crate::scalar::Real;
use crate::symbol::{MonotonicityClass, SpectralSymbol};

/// Largest supported expansion order.
pub const MAX_ALPHA: usize = 8;

/// Which error is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExpansionKind {
    /// Grid error `ξ − θ`, coefficients `d_k`.
    Grid,
    /// Eigenvalue error `λ − f(θ)`, coefficients `c_k`.
    Eigenvalue,
}

impl ExpansionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExpansionKind::Grid => "grid",
            ExpansionKind::Eigenvalue => "eigenvalue",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionConfig {
    pub n1: usize,
    pub alpha: usize,
    pub kind: ExpansionKind,
    /// Base indices `j₁` (1-based) excluded per row `k`.
    masks: BTreeMap<usize, BTreeSet<usize>>,
}

impl ExpansionConfig {
    pub fn new(n1: usize, alpha: usize, kind: ExpansionKind) -> Result<Self> {
        if n1 == 0 {
            return Err(Error::InvalidParameter("n1 must be at least 1".into()));
        }
        if !(1..=MAX_ALPHA).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha must be in 1..={MAX_ALPHA}, got {alpha}")));
        }
        Ok(Self { n1, alpha, kind, masks: BTreeMap::new() })
    }

    /// Excludes base indices from row `k`.
    pub fn with_mask(mut self, k: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        if !(1..=self.alpha).contains(&k) {
            return Err(Error::InvalidParameter(format!("mask row {k} outside 1..={}", self.alpha)));
        }
        let set = self.masks.entry(k).or_default();
        for j in indices {
            if !(1..=self.n1).contains(&j) {
                return Err(Error::InvalidParameter(format!("mask index {j} outside 1..={}", self.n1)));
            }
            set.insert(j);
        }
        Ok(self)
    }

    pub fn with_kind(mut self, kind: ExpansionKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn masks(&self) -> &BTreeMap<usize, BTreeSet<usize>> {
        &self.masks
    }

    pub fn is_masked(&self, k: usize, j: usize) -> bool {
        self.masks.get(&k).is_some_and(|s| s.contains(&j))
    }
}

/// Orders `n_k = 2^{k−1}(n₁+1) − 1`, `k = 1..α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSchedule {
    n1: usize,
    orders: Vec<usize>,
}

impl LevelSchedule {
    pub fn new(n1: usize, alpha: usize) -> Self {
        let orders = (0..alpha).map(|e| (n1 + 1) * (1usize << e) - 1).collect();
        Self { n1, orders }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn alpha(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// `n_k`, 1-based level.
    pub fn order(&self, k: usize) -> usize {
        self.orders[k - 1]
    }

    pub fn h<T: Real>(&self, k: usize) -> T {
        grid_parameter(self.order(k))
    }

    /// `j_k = 2^{k−1} j₁`.
    pub fn index(&self, k: usize, j1: usize) -> usize {
        j1 << (k - 1)
    }
}

pub fn schedule(config: &ExpansionConfig) -> LevelSchedule {
    LevelSchedule::new(config.n1, config.alpha)
}

/// Spectra of `A_{n_k}` for every level.
pub fn level_spectra<T: Real>(family: &OperatorFamily<T>, schedule: &LevelSchedule) -> Result<Vec<Spectrum<T>>> {
    schedule
        .orders()
        .iter()
        .map(|&n| eig_operator(&family.materialize(n)?))
        .collect()
}

/// Errors at the shared sub-grid, `α × n₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMatrix<T> {
    pub kind: ExpansionKind,
    pub values: Vec<Vec<T>>,
    /// Base columns where some level's inversion was clamped.
    pub clamped: Vec<bool>,
}

pub fn error_matrix<T: Real>(
    family: &OperatorFamily<T>,
    schedule: &LevelSchedule,
    kind: ExpansionKind,
) -> Result<ErrorMatrix<T>> {
    let spectra = level_spectra(family, schedule)?;
    error_matrix_from_spectra(&family.distribution_symbol(), schedule, &spectra, kind)
}

/// As [`error_matrix`], reusing precomputed level spectra.
pub fn error_matrix_from_spectra<T: Real, S: SpectralSymbol<T> + ?Sized>(
    symbol: &S,
    schedule: &LevelSchedule,
    spectra: &[Spectrum<T>],
    kind: ExpansionKind,
) -> Result<ErrorMatrix<T>> {
    let alpha = schedule.alpha();
    let n1 = schedule.n1();
    if spectra.len() != alpha {
        return Err(Error::SizeMismatch { expected: alpha, actual: spectra.len() });
    }
    for (k, s) in spectra.iter().enumerate() {
        if s.order() != schedule.order(k + 1) {
            return Err(Error::SizeMismatch { expected: schedule.order(k + 1), actual: s.order() });
        }
    }
    let theta1: Vec<T> = (1..=n1).map(|j| standard_point(j, n1)).collect();
    let mut values = vec![vec![T::zero(); n1]; alpha];
    let mut clamped = vec![false; n1];
    match kind {
        ExpansionKind::Grid => {
            let class = symbol.classify_monotonicity();
            if !class.is_monotone() {
                return Err(Error::NotMonotone);
            }
            for k in 1..=alpha {
                for j1 in 1..=n1 {
                    let lambda = paired_eigenvalue(&spectra[k - 1], schedule.index(k, j1), class)?;
                    let pre = symbol.invert(lambda, class)?;
                    values[k - 1][j1 - 1] = pre.angle - theta1[j1 - 1];
                    clamped[j1 - 1] |= pre.clamped;
                }
            }
        }
        ExpansionKind::Eigenvalue => {
            let samples: Vec<T> = theta1.iter().map(|&t| symbol.eval(t)).collect();
            let class = symbol.classify_monotonicity();
            // Pairing by rank needs a direction; the grid is ascending.
            let class = if class == MonotonicityClass::Decreasing { class } else { MonotonicityClass::Increasing };
            for k in 1..=alpha {
                for j1 in 1..=n1 {
                    let lambda = paired_eigenvalue(&spectra[k - 1], schedule.index(k, j1), class)?;
                    values[k - 1][j1 - 1] = lambda - samples[j1 - 1];
                }
            }
        }
    }
    Ok(ErrorMatrix { kind, values, clamped })
}

/// `V_{ik} = h_i^k`, `i, k = 1..α`.
pub fn vandermonde<T: Real>(schedule: &LevelSchedule) -> Vec<Vec<T>> {
    (1..=schedule.alpha())
        .map(|i| {
            let h: T = schedule.h(i);
            (1..=schedule.alpha()).map(|k| h.powi(k as i32)).collect()
        })
        .collect()
}

/// Validity of an entry of the expansion table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleFlag {
    Valid,
    /// Excluded by a user mask; the solved value is kept.
    Masked,
    /// A level inversion clamped for this column; the value is NaN.
    Clamped,
}

impl SampleFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleFlag::Valid => "valid",
            SampleFlag::Masked => "masked",
            SampleFlag::Clamped => "clamped",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "valid" => Some(SampleFlag::Valid),
            "masked" => Some(SampleFlag::Masked),
            "clamped" => Some(SampleFlag::Clamped),
            _ => None,
        }
    }
}

/// Sampled expansion functions `D`, row `k` on the base grid `θ_{j,n₁}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTable<T> {
    config: ExpansionConfig,
    theta1: Vec<T>,
    values: Vec<Vec<T>>,
    flags: Vec<Vec<SampleFlag>>,
    residual: T,
}

impl<T: Real> ExpansionTable<T> {
    /// Reassembles a table, e.g. one loaded from disk.
    pub fn from_parts(config: ExpansionConfig, values: Vec<Vec<T>>, flags: Vec<Vec<SampleFlag>>) -> Result<Self> {
        let (alpha, n1) = (config.alpha, config.n1);
        if values.len() != alpha || flags.len() != alpha {
            return Err(Error::SizeMismatch { expected: alpha, actual: values.len().min(flags.len()) });
        }
        for (row, frow) in values.iter().zip(&flags) {
            if row.len() != n1 || frow.len() != n1 {
                return Err(Error::SizeMismatch { expected: n1, actual: row.len().min(frow.len()) });
            }
        }
        let theta1 = (1..=n1).map(|j| standard_point(j, n1)).collect();
        Ok(Self { config, theta1, values, flags, residual: T::zero() })
    }

    pub fn config(&self) -> &ExpansionConfig {
        &self.config
    }

    pub fn kind(&self) -> ExpansionKind {
        self.config.kind
    }

    pub fn alpha(&self) -> usize {
        self.config.alpha
    }

    pub fn n1(&self) -> usize {
        self.config.n1
    }

    pub fn theta1(&self) -> &[T] {
        &self.theta1
    }

    /// Row `k` (1-based).
    pub fn row(&self, k: usize) -> &[T] {
        &self.values[k - 1]
    }

    pub fn flags(&self, k: usize) -> &[SampleFlag] {
        &self.flags[k - 1]
    }

    /// Entry usable for interpolation in row `k`, base index `j` (1-based).
    pub fn usable(&self, k: usize, j: usize) -> bool {
        self.flags[k - 1][j - 1] == SampleFlag::Valid
    }

    /// Largest `‖V d − e‖∞ / ‖e‖∞` over the solved columns.
    pub fn residual(&self) -> T {
        self.residual
    }

    /// Largest magnitude over the usable entries of row `k`.
    pub fn row_max_abs(&self, k: usize) -> T {
        self.row(k)
            .iter()
            .zip(self.flags(k))
            .filter(|(_, f)| **f == SampleFlag::Valid)
            .fold(T::zero(), |m, (v, _)| m.max(v.abs()))
    }
}

/// Solves `V D = E` column by column.
pub fn solve_expansion<T: Real>(
    errors: &ErrorMatrix<T>,
    vandermonde: &[Vec<T>],
    config: &ExpansionConfig,
) -> Result<ExpansionTable<T>> {
    let (alpha, n1) = (config.alpha, config.n1);
    if errors.kind != config.kind {
        return Err(Error::KindMismatch);
    }
    if vandermonde.len() != alpha || errors.values.len() != alpha {
        return Err(Error::SizeMismatch { expected: alpha, actual: vandermonde.len().min(errors.values.len()) });
    }
    if errors.values.iter().any(|r| r.len() != n1) || errors.clamped.len() != n1 {
        return Err(Error::SizeMismatch { expected: n1, actual: errors.clamped.len() });
    }
    let lu = Lu::factor(vandermonde)?;
    let mut values = vec![vec![T::nan(); n1]; alpha];
    let mut flags = vec![vec![SampleFlag::Clamped; n1]; alpha];
    let mut residual = T::zero();
    for j in 0..n1 {
        if errors.clamped[j] {
            continue;
        }
        let rhs: Vec<T> = (0..alpha).map(|k| errors.values[k][j]).collect();
        let d = lu.solve(&rhs);
        let scale = rhs.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if scale > T::zero() {
            for (i, row) in vandermonde.iter().enumerate() {
                let r = row.iter().zip(&d).fold(T::zero(), |s, (&v, &x)| s + v * x) - rhs[i];
                residual = residual.max(r.abs() / scale);
            }
        }
        for k in 0..alpha {
            values[k][j] = d[k];
            flags[k][j] = if config.is_masked(k + 1, j + 1) { SampleFlag::Masked } else { SampleFlag::Valid };
        }
    }
    let theta1 = (1..=n1).map(|j| standard_point(j, n1)).collect();
    Ok(ExpansionTable { config: config.clone(), theta1, values, flags, residual })
}

/// Runs the whole training stage for one family.
pub fn compute_table<T: Real>(family: &OperatorFamily<T>, config: &ExpansionConfig) -> Result<ExpansionTable<T>> {
    let sched = schedule(config);
    let e = error_matrix(family, &sched, config.kind)?;
    solve_expansion(&e, &vandermonde(&sched), config)
}
