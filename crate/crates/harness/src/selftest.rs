//! Small-scale invariant checks of the whole stack.

use perfgrid::eigensolve::{eig_pencil_dense_oracle, DENSE_ORACLE_LIMIT};
use perfgrid::expansion::{solve_expansion, vandermonde, ErrorMatrix, LevelSchedule};
use perfgrid::extrapolate::resample;
use perfgrid::grids::standard_point;
use perfgrid::operators::build_toeplitz;
use perfgrid::{
    eig_banded, eig_dense_oracle, eig_operator, eig_pencil, standard_grid, BandedMatrix, CosineSymbol,
    ExpansionConfig, ExpansionKind, ExpansionTable, MonotonicityClass, OperatorFamily, SampleFlag, SparseCorrection,
    SpectralSymbol,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::artifact;

/// Seed of the random oracle cross-check.
pub const ORACLE_SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// Observed deviation and its bound.
    pub residual: f64,
    pub bound: f64,
    pub note: String,
}

impl SuiteResult {
    fn check(name: &'static str, residual: f64, bound: f64) -> Self {
        Self { name, passed: residual <= bound, residual, bound, note: String::new() }
    }

    fn failed(name: &'static str, note: impl Into<String>) -> Self {
        Self { name, passed: false, residual: f64::NAN, bound: f64::NAN, note: note.into() }
    }
}

impl std::fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "{status} {:<14} residual {:.3e} (bound {:.1e})", self.name, self.residual, self.bound)?;
        if !self.note.is_empty() {
            write!(f, " {}", self.note)?;
        }
        Ok(())
    }
}

/// Symmetric banded matrix with entries uniform in `[-1, 1]`.
pub fn random_banded(rng: &mut impl Rng, n: usize, bandwidth: usize) -> BandedMatrix {
    let bw = bandwidth.min(n.saturating_sub(1));
    let bands = (0..=bw).map(|k| (0..n - k).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    BandedMatrix::from_bands(n, bands).expect("band lengths match")
}

/// Largest eigenvalue deviation between the banded and dense solvers over
/// `count` random matrices of order `1..=max_order`.
pub fn oracle_cross_check(count: usize, max_order: usize, max_bandwidth: usize, seed: u64) -> perfgrid::Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let n = rng.gen_range(1..=max_order.min(DENSE_ORACLE_LIMIT));
        let bw = rng.gen_range(0..=max_bandwidth);
        let m = random_banded(&mut rng, n, bw);
        let a = eig_banded(&m)?;
        let b = eig_dense_oracle(&m.to_dense())?;
        for (x, y) in a.values().iter().zip(b.values()) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

/// Largest deviation between [`eig_pencil`] and the dense symmetrized solve of
/// `B⁻¹A`, with all eigenvalues returned for range checks.
pub fn pencil_cross_check(a: &CosineSymbol, b: &CosineSymbol, n: usize) -> perfgrid::Result<(f64, Vec<f64>)> {
    let (ma, mb) = (build_toeplitz(a, n)?, build_toeplitz(b, n)?);
    let banded = eig_pencil(&ma, &mb)?;
    let dense = eig_pencil_dense_oracle(&ma.to_dense(), &mb.to_dense())?;
    let worst = banded.values().iter().zip(dense.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok((worst, banded.into_values()))
}

fn oracle_suite() -> SuiteResult {
    match oracle_cross_check(50, 128, 4, ORACLE_SEED) {
        Ok(w) => SuiteResult::check("oracle", w, 1e-10),
        Err(e) => SuiteResult::failed("oracle", e.to_string()),
    }
}

fn inversion_suite() -> SuiteResult {
    let symbols = [CosineSymbol::from_f64(&[2.0, -1.0]), CosineSymbol::from_f64(&[6.0, -4.0, 1.0])];
    let mut worst = 0.0f64;
    for s in symbols {
        let s = s.expect("valid coefficients");
        for i in 1..200 {
            let t = std::f64::consts::PI * i as f64 / 200.0;
            match s.invert(s.eval(t), MonotonicityClass::Increasing) {
                Ok(p) => worst = worst.max((s.eval(p.angle) - s.eval(t)).abs()),
                Err(e) => return SuiteResult::failed("inversion", e.to_string()),
            }
        }
    }
    SuiteResult::check("inversion", worst, 1e-13)
}

fn closed_form_suite() -> SuiteResult {
    let run = || -> perfgrid::Result<f64> {
        let fam = OperatorFamily::corrected(CosineSymbol::from_f64(&[2.0, -1.0])?, SparseCorrection::new([(1, 1, -1.0)]));
        let n = 200;
        let s = eig_operator(&fam.materialize(n)?)?;
        Ok(s.values()
            .iter()
            .enumerate()
            .map(|(i, v)| (v - (2.0 - 2.0 * ((i as f64 + 0.5) * std::f64::consts::PI / (n as f64 + 0.5)).cos())).abs())
            .fold(0.0, f64::max))
    };
    match run() {
        Ok(w) => SuiteResult::check("closed-form", w, 1e-12),
        Err(e) => SuiteResult::failed("closed-form", e.to_string()),
    }
}

fn pencil_suite() -> SuiteResult {
    let run = || -> perfgrid::Result<(f64, Vec<f64>)> {
        pencil_cross_check(&CosineSymbol::from_f64(&[4.0, -1.0, -1.0])?, &CosineSymbol::from_f64(&[3.0, 1.0])?, 64)
    };
    match run() {
        Ok((w, values)) => {
            let mut r = SuiteResult::check("pencil", w, 1e-9);
            if !values.iter().all(|&v| v > 0.0 && v < 4.0) {
                r.passed = false;
                r.note = "eigenvalue outside (0, 4)".into();
            }
            r
        }
        Err(e) => SuiteResult::failed("pencil", e.to_string()),
    }
}

/// Dyadic `h` and coefficients make the synthetic errors exact.
pub fn vandermonde_recovery(n1: usize, alpha: usize) -> perfgrid::Result<f64> {
    let sched = LevelSchedule::new(n1, alpha);
    let d = |k: usize, j: usize| (k as f64 - 2.5) + (j as f64 / (n1 + 1) as f64) * (k as f64);
    let values = (1..=alpha)
        .map(|i| {
            let h = sched.h::<f64>(i);
            (1..=n1).map(|j| (1..=alpha).rev().fold(0.0, |acc, k| (acc + d(k, j)) * h)).collect()
        })
        .collect();
    let e = ErrorMatrix { kind: ExpansionKind::Grid, values, clamped: vec![false; n1] };
    let cfg = ExpansionConfig::new(n1, alpha, ExpansionKind::Grid)?;
    let t = solve_expansion(&e, &vandermonde(&sched), &cfg)?;
    let mut worst = 0.0f64;
    for k in 1..=alpha {
        for j in 1..=n1 {
            worst = worst.max((t.row(k)[j - 1] - d(k, j)).abs());
        }
    }
    Ok(worst)
}

fn vandermonde_suite() -> SuiteResult {
    match vandermonde_recovery(127, 4) {
        Ok(w) => SuiteResult::check("vandermonde", w, 1e-10),
        Err(e) => SuiteResult::failed("vandermonde", e.to_string()),
    }
}

fn resample_suite() -> SuiteResult {
    let run = || -> perfgrid::Result<f64> {
        let (n1, alpha) = (40, 3);
        let cfg = ExpansionConfig::new(n1, alpha, ExpansionKind::Grid)?;
        let line = |k: usize, t: f64| (t - std::f64::consts::PI) / 2f64.powi(k as i32);
        let rows = (1..=alpha).map(|k| (1..=n1).map(|j| line(k, standard_point(j, n1))).collect()).collect();
        let table = ExpansionTable::from_parts(cfg, rows, vec![vec![SampleFlag::Valid; n1]; alpha])?;
        let target = standard_grid::<f64>(777);
        let r = resample(&table, &target)?;
        let mut worst = 0.0f64;
        for k in 1..=alpha {
            for (j, &t) in target.points().iter().enumerate() {
                worst = worst.max((r[k - 1][j] - line(k, t)).abs());
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(w) => SuiteResult::check("resample", w, 1e-13),
        Err(e) => SuiteResult::failed("resample", e.to_string()),
    }
}

fn artifact_suite() -> SuiteResult {
    let run = || -> anyhow::Result<SuiteResult> {
        let fam = OperatorFamily::toeplitz(CosineSymbol::from_f64(&[6.0, -4.0, 1.0])?);
        let cfg = ExpansionConfig::new(20, 2, ExpansionKind::Grid)?.with_mask(2, [1])?;
        let table = perfgrid::expansion::compute_table(&fam, &cfg)?;
        let text = artifact::encode(&table);
        let back = artifact::decode(&text)?;
        let identical = artifact::encode(&back) == text;
        let body_start = text.find("\nk,").map_or(0, |i| i + 1);
        let mut tampered = text.clone().into_bytes();
        let last = tampered.len() - 2;
        tampered[last] = if tampered[last] == b'd' { b'x' } else { b'd' };
        let detected = matches!(
            artifact::decode(std::str::from_utf8(&tampered)?),
            Err(artifact::ArtifactError::Checksum { .. })
        );
        let mut r = SuiteResult::check("artifact", 0.0, 0.0);
        r.passed = identical && detected && body_start > 0;
        if !r.passed {
            r.note = format!("round trip {identical}, corruption detected {detected}");
        }
        Ok(r)
    };
    run().unwrap_or_else(|e| SuiteResult::failed("artifact", e.to_string()))
}

pub fn run_selftest() -> Vec<SuiteResult> {
    vec![
        inversion_suite(),
        oracle_suite(),
        closed_form_suite(),
        pencil_suite(),
        vandermonde_suite(),
        resample_suite(),
        artifact_suite(),
    ]
}
