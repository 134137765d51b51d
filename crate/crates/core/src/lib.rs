//! Matrix-less approximation of the eigenvalues of Toeplitz-like matrices.
//!
//! Eigenvalues of a banded Toeplitz matrix `T_n(f)` are close to the symbol
//! sampled on the equispaced grid `θ_j = jπ/(n+1)`. For monotone `f` there is a
//! "perfect" grid `ξ_j` with `λ_j = f(ξ_j)` exactly, and the grid error
//! `ξ_j − θ_j` admits an expansion `Σ d_k(θ_j) h^k` in `h = 1/(n+1)`.
//!
//! The crate learns the sampled `d_k` from a handful of small matrices
//! ([`expansion`]), carries them to any order ([`extrapolate`]), and maps the
//! reconstructed grid back through the symbol. The older expansion of the
//! eigenvalue error itself, `λ_j − f(θ_j) ≈ Σ c_k(θ_j) h^k`, is available
//! through the same machinery as a baseline.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod eigensolve;
pub mod error;
pub mod expansion;
pub mod extrapolate;
pub mod grids;
mod interp;
mod linsolve;
pub mod operators;
pub mod scalar;
pub mod symbol;

pub use error::{Error, Result};
pub use scalar::Real;

pub use eigensolve::{eig_banded, eig_dense_oracle, eig_operator, eig_pencil, inertia_count, inertia_count_pencil};
pub use expansion::{ExpansionConfig, ExpansionKind, SampleFlag};
pub use extrapolate::Method;
pub use grids::{grid_error, perfect_grid, standard_grid};
pub use operators::{Operator, SparseCorrection};
pub use symbol::{MonotonicityClass, SpectralSymbol};

pub type CosineSymbol = symbol::CosineSymbol<f64>;
pub type QuotientSymbol = symbol::QuotientSymbol<f64>;
pub type FamilySymbol = symbol::FamilySymbol<f64>;
pub type BandedMatrix = operators::BandedSymmetricMatrix<f64>;
pub type OperatorFamily = operators::OperatorFamily<f64>;
pub type Spectrum = eigensolve::Spectrum<f64>;
pub type Grid = grids::Grid<f64>;
pub type GridError = grids::GridError<f64>;
pub type LevelSchedule = expansion::LevelSchedule;
pub type ErrorMatrix = expansion::ErrorMatrix<f64>;
pub type ExpansionTable = expansion::ExpansionTable<f64>;
pub type SpectrumApproximation = extrapolate::SpectrumApproximation<f64>;
pub type ErrorReport = extrapolate::ErrorReport<f64>;
