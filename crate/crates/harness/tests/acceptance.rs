//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use anyhow::{ensure, Result};
use perfgrid::expansion::{level_spectra, LevelSchedule};
use perfgrid::grids::standard_point;
use perfgrid::{grid_error, perfect_grid, standard_grid, CosineSymbol};
use perfgrid_harness::config::preset;
use perfgrid_harness::figures::{run_figures, FIGURES};
use perfgrid_harness::pipeline::{ApproxSummary, Experiment};
use perfgrid_harness::selftest::{oracle_cross_check, pencil_cross_check, vandermonde_recovery, ORACLE_SEED};
use tempfile::TempDir;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

#[derive(Default)]
struct Runner {
    failures: usize,
}

impl Runner {
    /// Runs one criterion; exceeding `budget` seconds counts as a failure.
    fn run(&mut self, id: usize, name: &str, budget: f64, f: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && secs < budget, o.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        if !passed {
            self.failures += 1;
        }
        let status = if passed { "PASS" } else { "FAIL" };
        println!("criterion {id}: {status} {name}: {detail} [{secs:.1} s, budget {budget:.0} s]");
    }
}

/// Every CSV and SVG output of a preset: tables, exact spectra, validated
/// approximations and figures.
fn run_preset(name: &str, dir: &Path) -> Result<Vec<ApproxSummary>> {
    let cfg = preset(name)?;
    let mut exp = Experiment::new(cfg.clone(), Some(dir.to_path_buf()))?;
    exp.run_expand()?;
    for &n in &cfg.targets {
        exp.run_exact(n)?;
    }
    let summaries = exp.run_approx_all(&cfg.targets, &cfg.beta_list, true)?;
    run_figures(&mut exp, &FIGURES.collect::<Vec<_>>())?;
    exp.finish()?;
    Ok(summaries)
}

fn find<'a>(runs: &'a [ApproxSummary], method: &str, beta: usize) -> Result<&'a perfgrid_harness::pipeline::Validation> {
    runs.iter()
        .find(|s| s.method == method && s.beta == beta)
        .and_then(|s| s.validation.as_ref())
        .ok_or_else(|| anyhow::anyhow!("missing {method} beta={beta}"))
}

fn csv_bytes(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|x| x == "csv") {
            files.push((path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&path)?));
        }
    }
    files.sort();
    Ok(files)
}

fn closed_form_coefficients() -> Result<Outcome> {
    let mut exp = Experiment::new(preset("laplacian-nd")?, Some(TempDir::new()?.path().to_path_buf()))?;
    let grid = exp.tables()?.grid;
    ensure!(grid.n1() == 100 && grid.alpha() == 4);
    let tol = [1e-6, 1e-4, 1e-2, 1.0].map(|t| t * PI);
    let mut passed = true;
    let mut parts = Vec::new();
    for k in 1..=4 {
        let worst = (1..=100)
            .map(|j| (grid.row(k)[j - 1] - (standard_point::<f64>(j, 100) - PI) / 2f64.powi(k as i32)).abs())
            .fold(0.0, f64::max);
        passed &= worst <= tol[k - 1];
        parts.push(format!("k={k} {worst:.2e} <= {:.2e}", tol[k - 1]));
    }
    Ok(outcome(passed, parts.join(", ")))
}

fn exact_sampling_null_case() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [100, 500] {
        let mut cfg = preset("dirichlet")?;
        cfg.n1 = n;
        cfg.targets = vec![n];
        let mut exp = Experiment::new(cfg, Some(TempDir::new()?.path().to_path_buf()))?;
        let grid = exp.tables()?.grid;
        let d_max = (1..=grid.alpha()).map(|k| grid.row_max_abs(k)).fold(0.0, f64::max);
        let spectrum = exp.exact(n)?;
        let xi = perfect_grid(&spectrum, exp.symbol(), exp.class())?;
        let e_max = grid_error(&xi, &standard_grid(n), false)?.max_abs();
        passed &= d_max <= 1e-11 && e_max <= 1e-12;
        parts.push(format!("n={n} alpha={} max|d_k| {d_max:.2e} <= 1e-11, grid error {e_max:.2e} <= 1e-12", grid.alpha()));
    }
    Ok(outcome(passed, parts.join("; ")))
}

fn scaling_collapse() -> Result<Outcome> {
    let cfg = preset("bilaplacian")?;
    let family = cfg.operator_family()?;
    let symbol = family.distribution_symbol();
    let class = perfgrid::SpectralSymbol::classify_monotonicity(&symbol);
    let sched = LevelSchedule::new(100, 3);
    ensure!(sched.orders() == [100, 201, 403]);
    let spectra = level_spectra(&family, &sched)?;
    let mut scaled = Vec::new();
    for (k, s) in (1..=3).zip(&spectra) {
        let n = sched.order(k);
        scaled.push(grid_error(&perfect_grid(s, &symbol, class)?, &standard_grid(n), true)?.values);
    }
    let deviation = |k: usize, j1: usize| (scaled[k][sched.index(k + 1, j1) - 1] - scaled[k - 1][sched.index(k, j1) - 1]).abs();
    let ratios: Vec<f64> = (1..=sched.n1()).map(|j1| deviation(1, j1) / deviation(2, j1)).collect();
    let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let median = {
        let mut r = ratios.clone();
        r.sort_by(f64::total_cmp);
        r[r.len() / 2]
    };
    Ok(outcome(
        worst >= 1.8,
        format!("min ratio {worst:.3} >= 1.8 over {} shared indices (median {median:.3})", ratios.len()),
    ))
}

fn xi_dominance(runs: &[ApproxSummary]) -> Result<Outcome> {
    let xi = find(runs, "xi", 3)?;
    let theta = find(runs, "theta", 3)?;
    let raw = xi.symbol_error;
    let passed = xi.approx_lambda_error <= theta.approx_lambda_error && xi.approx_lambda_error * 10.0 <= raw;
    Ok(outcome(
        passed,
        format!(
            "n=4095 xi {:.3e} <= theta {:.3e}; raw symbol sampling {:.3e} ({:.0}x), {} masked",
            xi.approx_lambda_error,
            theta.approx_lambda_error,
            raw,
            raw / xi.approx_lambda_error,
            xi.masked
        ),
    ))
}

fn monotone_in_beta(runs: &[(&str, Vec<ApproxSummary>)]) -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, summaries) in runs {
        let errs = (1..=3)
            .map(|b| find(summaries, "xi", b)?.approx_grid_error.ok_or_else(|| anyhow::anyhow!("no grid error")))
            .collect::<Result<Vec<f64>>>()?;
        passed &= errs.windows(2).all(|w| w[1] <= w[0]);
        parts.push(format!("{name} {:.3e} >= {:.3e} >= {:.3e}", errs[0], errs[1], errs[2]));
    }
    Ok(outcome(passed, parts.join("; ")))
}

fn pencil_correctness() -> Result<Outcome> {
    let a = CosineSymbol::from_f64(&[4.0, -1.0, -1.0])?;
    let b = CosineSymbol::from_f64(&[3.0, 1.0])?;
    let (worst, values) = pencil_cross_check(&a, &b, 512)?;
    let (lo, hi) = (values[0], values[values.len() - 1]);
    let in_range = values.iter().all(|&v| v > 0.0 && v < 4.0);
    Ok(outcome(
        worst <= 1e-9 && in_range,
        format!("n=512 deviation {worst:.2e} <= 1e-9, spectrum in [{lo:.6}, {hi:.6}]"),
    ))
}

fn oracle_equivalence() -> Result<Outcome> {
    let worst = oracle_cross_check(50, 128, 4, ORACLE_SEED)?;
    Ok(outcome(worst <= 1e-10, format!("50 matrices, max deviation {worst:.2e} <= 1e-10")))
}

fn vandermonde_exactness() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for (n1, alpha) in [(31, 2), (63, 3), (127, 4), (255, 4)] {
        worst = worst.max(vandermonde_recovery(n1, alpha)?);
    }
    Ok(outcome(worst <= 1e-10, format!("max coefficient error {worst:.2e} <= 1e-10")))
}

fn determinism(first: &[(&str, &TempDir)]) -> Result<Outcome> {
    let mut files = 0;
    let mut mismatched = Vec::new();
    for &(name, dir) in first {
        let again = TempDir::new()?;
        run_preset(name, again.path())?;
        let (a, b) = (csv_bytes(dir.path())?, csv_bytes(again.path())?);
        ensure!(!a.is_empty(), "{name} wrote no CSV files");
        files += a.len();
        if a != b {
            mismatched.push(name.to_string());
        }
    }
    let detail = if mismatched.is_empty() {
        format!("{files} CSV files byte-identical across {} presets", first.len())
    } else {
        format!("differences in {}", mismatched.join(", "))
    };
    Ok(outcome(mismatched.is_empty(), detail))
}

fn main() {
    let mut runner = Runner::default();
    runner.run(1, "closed-form grid coefficients", 10.0, closed_form_coefficients);
    runner.run(2, "exact-sampling null case", 10.0, exact_sampling_null_case);
    runner.run(3, "scaled grid-error collapse", 30.0, scaling_collapse);

    let dirs: Vec<(&str, TempDir)> = ["laplacian-nd", "dirichlet", "bilaplacian", "preconditioned"]
        .into_iter()
        .map(|name| (name, TempDir::new().expect("tempdir")))
        .collect();
    let mut runs: Vec<(&str, Result<Vec<ApproxSummary>>)> = Vec::new();
    let mut bilaplacian_secs = 0.0;
    for (name, dir) in &dirs {
        let start = Instant::now();
        runs.push((name, run_preset(name, dir.path())));
        if *name == "bilaplacian" {
            bilaplacian_secs = start.elapsed().as_secs_f64();
        }
    }
    let summaries = |name: &str| match runs.iter().find(|(n, _)| *n == name).map(|(_, r)| r) {
        Some(Ok(s)) => Ok(s.clone()),
        Some(Err(e)) => Err(anyhow::anyhow!("{name} run failed: {e:#}")),
        None => Err(anyhow::anyhow!("{name} not run")),
    };

    runner.run(4, "xi method dominance", 180.0 - bilaplacian_secs, || xi_dominance(&summaries("bilaplacian")?));
    runner.run(5, "monotone improvement in beta", 180.0, || {
        monotone_in_beta(&[("bilaplacian", summaries("bilaplacian")?), ("preconditioned", summaries("preconditioned")?)])
    });
    runner.run(6, "pencil against dense oracle", 30.0, pencil_correctness);
    runner.run(7, "banded against dense oracle", 20.0, oracle_equivalence);
    runner.run(8, "Vandermonde exactness", 1.0, vandermonde_exactness);
    let first: Vec<(&str, &TempDir)> = dirs.iter().map(|(n, d)| (*n, d)).collect();
    runner.run(9, "determinism", 600.0, || determinism(&first));

    if runner.failures > 0 {
        println!("{} acceptance criteria failed", runner.failures);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
