//! Data series (CSV) and static plots (SVG) for the eight standard figures.
//!
//! | # | content |
//! |---|---------|
//! | 1 | nested grids of a doubling hierarchy, shared indices marked |
//! | 2 | raw and `h`-scaled grid errors `ξ − θ` on four levels |
//! | 3 | sampled grid coefficients `d̃_k`, with the closed form when known |
//! | 4 | `d̃_k` resampled to the first target, and grid errors per β |
//! | 5 | eigenvalue errors of both methods per β |
//! | 6 | the symbols, and grid errors per β |
//! | 7 | `c̃_k` next to `d̃_k` |
//! | 8 | eigenvalue errors of both methods per β |

use std::path::PathBuf;

use anyhow::{bail, Result};
use perfgrid::expansion::{level_spectra, LevelSchedule};
use perfgrid::extrapolate::{approximate_spectrum, error_report, resample, target_mask};
use perfgrid::grids::standard_point;
use perfgrid::{standard_grid, ExpansionTable, Method, SpectralSymbol};

use crate::cells;
use crate::config::{CorrectionEntry, FamilySpec, Format};
use crate::pipeline::Experiment;
use crate::plot::{Plot, Series};
use crate::report::{log10_abs, CsvTable};

pub const FIGURES: std::ops::RangeInclusive<usize> = 1..=8;

/// Writes the requested figures; returns the files written.
pub fn run_figures(exp: &mut Experiment, which: &[usize]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for &w in which {
        let written = match w {
            1 => nested_grids(exp)?,
            2 => level_grid_errors(exp)?,
            3 => grid_coefficients(exp)?,
            4 => {
                let mut f = resampled_coefficients(exp, 4)?;
                f.extend(grid_errors_by_beta(exp, 4)?);
                f
            }
            5 | 8 => eigenvalue_errors(exp, w)?,
            6 => {
                let mut f = symbols(exp)?;
                f.extend(grid_errors_by_beta(exp, 6)?);
                f
            }
            7 => both_expansions(exp)?,
            other => bail!("unknown figure {other}; expected {}..={}", FIGURES.start(), FIGURES.end()),
        };
        files.extend(written);
    }
    Ok(files)
}

fn emit(exp: &mut Experiment, stem: &str, csv: &CsvTable, plots: &[(&str, Plot)]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    if exp.config().writes(Format::Csv) {
        files.push(exp.write_csv(&format!("{stem}.csv"), csv)?);
    }
    if exp.config().writes(Format::Svg) {
        for (suffix, plot) in plots {
            let name = if suffix.is_empty() { format!("{stem}.svg") } else { format!("{stem}_{suffix}.svg") };
            files.push(exp.write_text(&name, &plot.to_svg())?);
        }
    }
    Ok(files)
}

fn first_target(exp: &Experiment) -> Result<usize> {
    match exp.config().targets.first() {
        Some(&n) => Ok(n),
        None => bail!("figure needs at least one target order"),
    }
}

fn nested_grids(exp: &mut Experiment) -> Result<Vec<PathBuf>> {
    let sched = LevelSchedule::new(3, 4);
    let mut csv = CsvTable::new(["level", "n", "j", "theta", "shared"]);
    let mut plot = Plot::new("Nested grids, n1 = 3", "theta", "level");
    let mut shared_pts = Vec::new();
    for k in [1, 2, 4] {
        let n = sched.order(k);
        let stride = 1 << (k - 1);
        let mut pts = Vec::new();
        for j in 1..=n {
            let t = standard_point::<f64>(j, n);
            let shared = j % stride == 0;
            csv.push(cells![k, n, j, t, shared]);
            pts.push((t, k as f64));
            if shared {
                shared_pts.push((t, k as f64));
            }
        }
        plot = plot.with(Series::scatter(format!("n = {n}"), pts));
    }
    plot = plot.with(Series::scatter("shared", shared_pts));
    emit(exp, "fig1_grids", &csv, &[("", plot)])
}

fn level_grid_errors(exp: &mut Experiment) -> Result<Vec<PathBuf>> {
    let sched = LevelSchedule::new(exp.config().n1, 4);
    let spectra = level_spectra(exp.family(), &sched)?;
    let mut csv = CsvTable::new(["level", "n", "j", "theta", "e_xi", "e_xi_scaled"]);
    let mut raw_plot = Plot::new("Grid error", "theta", "xi - theta");
    let mut scaled_plot = Plot::new("Scaled grid error", "theta", "(xi - theta) / h");
    for k in 1..=4 {
        let n = sched.order(k);
        let xi = perfgrid::perfect_grid(&spectra[k - 1], exp.symbol(), exp.class())?;
        let h = sched.h::<f64>(k);
        let (mut raw, mut scaled) = (Vec::new(), Vec::new());
        for j in 1..=n {
            let t = standard_point::<f64>(j, n);
            let e = xi.point(j) - t;
            csv.push(cells![k, n, j, t, e, e / h]);
            raw.push((t, e));
            scaled.push((t, e / h));
        }
        raw_plot = raw_plot.with(Series::line(format!("n = {n}"), raw));
        scaled_plot = scaled_plot.with(Series::line(format!("n = {n}"), scaled));
    }
    emit(exp, "fig2_grid_errors", &csv, &[("raw", raw_plot), ("scaled", scaled_plot)])
}

/// `d_k(θ) = (θ − π)/2^k` for the Laplacian with one Neumann end.
fn closed_form_coefficient(family: &FamilySpec) -> Option<fn(usize, f64) -> f64> {
    let neumann = FamilySpec::Corrected {
        f: vec![2.0, -1.0],
        correction: vec![CorrectionEntry { row: 1, col: 1, value: -1.0 }],
    };
    (family == &neumann).then_some(|k, t| (t - std::f64::consts::PI) / 2f64.powi(k as i32))
}

fn table_series(table: &ExpansionTable, prefix: &str) -> Vec<Series> {
    (1..=table.alpha())
        .map(|k| {
            let pts = (1..=table.n1())
                .map(|j| {
                    let v = if table.usable(k, j) { table.row(k)[j - 1] } else { f64::NAN };
                    (table.theta1()[j - 1], v)
                })
                .collect();
            Series::line(format!("{prefix}{k}"), pts)
        })
        .collect()
}

fn grid_coefficients(exp: &mut Experiment) -> Result<Vec<PathBuf>> {
    let table = exp.tables()?.grid;
    let reference = closed_form_coefficient(&exp.config().family);
    let mut csv = CsvTable::new(["k", "j", "theta", "d_tilde", "flag", "reference"]);
    let mut plot = Plot::new("Grid expansion coefficients", "theta", "d_k");
    for k in 1..=table.alpha() {
        for j in 1..=table.n1() {
            let t = table.theta1()[j - 1];
            let r = reference.map_or(f64::NAN, |d| d(k, t));
            csv.push(cells![k, j, t, table.row(k)[j - 1], table.flags(k)[j - 1].as_str(), r]);
        }
    }
    for s in table_series(&table, "d~") {
        plot = plot.with(s);
    }
    if let Some(d) = reference {
        for k in 1..=table.alpha() {
            let pts = table.theta1().iter().map(|&t| (t, d(k, t))).collect();
            plot = plot.with(Series::scatter(format!("d{k}"), pts));
        }
    }
    emit(exp, "fig3_coefficients", &csv, &[("", plot)])
}

fn resampled_coefficients(exp: &mut Experiment, fig: usize) -> Result<Vec<PathBuf>> {
    let table = exp.tables()?.grid;
    let n = first_target(exp)?;
    let target = standard_grid::<f64>(n);
    let rows = resample(&table, &target)?;
    let mut csv = CsvTable::new(["k", "j", "theta", "d_tilde"]);
    let mut plot = Plot::new(format!("Coefficients resampled to n = {n}"), "theta", "d_k");
    for s in table_series(&table, "d~") {
        plot = plot.with(s);
    }
    for (k, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            csv.push(cells![k + 1, j + 1, target.points()[j], v]);
        }
        let pts = target.points().iter().copied().zip(row.iter().copied()).collect();
        plot = plot.with(Series::line(format!("resampled {}", k + 1), pts).thinned(exp.config().thinning));
    }
    emit(exp, &format!("fig{fig}_resampled"), &csv, &[("", plot)])
}

fn grid_errors_by_beta(exp: &mut Experiment, fig: usize) -> Result<Vec<PathBuf>> {
    let table = exp.tables()?.grid;
    let n = first_target(exp)?;
    let betas = exp.config().beta_list.clone();
    let exact = exp.exact(n)?;
    let theta = standard_grid::<f64>(n);
    let mut header = vec!["j".to_string(), "theta".into(), "e_xi".into()];
    let mut errors = Vec::new();
    let mut masks = Vec::new();
    for &b in &betas {
        header.push(format!("e_tilde_xi_b{b}"));
        let approx = approximate_spectrum(exp.symbol(), &table, n, b, Method::GridExpansion)?;
        let r = error_report(&approx, &exact, exp.symbol(), exp.class())?;
        errors.push((r.grid_error.clone(), r.approx_grid_error.unwrap_or_default()));
        masks.push(target_mask(&table, &theta, b));
    }
    for &b in &betas {
        header.push(format!("masked_b{b}"));
    }
    let mut csv = CsvTable::new(header);
    for j in 0..n {
        let mut row = cells![j + 1, theta.points()[j], errors[0].0[j]];
        row.extend(errors.iter().map(|e| crate::report::fmt_float(e.1[j])));
        row.extend(masks.iter().map(|m| u8::from(m[j]).to_string()));
        csv.push(row);
    }
    let stride = exp.config().thinning;
    let series = |label: String, v: &[f64]| {
        Series::line(label, theta.points().iter().zip(v).map(|(&t, &e)| (t, log10_abs(e))).collect()).thinned(stride)
    };
    let mut plot = Plot::new(format!("Grid errors, n = {n}"), "theta", "log10 |error|");
    plot = plot.with(series("xi - theta".into(), &errors[0].0));
    for (b, e) in betas.iter().zip(&errors) {
        plot = plot.with(series(format!("beta = {b}"), &e.1));
    }
    emit(exp, &format!("fig{fig}_grid_errors"), &csv, &[("", plot)])
}

fn eigenvalue_errors(exp: &mut Experiment, fig: usize) -> Result<Vec<PathBuf>> {
    let tables = exp.tables()?;
    let n = first_target(exp)?;
    let betas = exp.config().beta_list.clone();
    let exact = exp.exact(n)?;
    let theta = standard_grid::<f64>(n);
    let mut header = vec!["j".to_string(), "theta".into(), "e_lambda_theta".into(), "e_lambda_xi".into()];
    let mut theta_errs = Vec::new();
    let mut xi_errs = Vec::new();
    let mut symbol_err = Vec::new();
    let mut residual_err = Vec::new();
    for &b in &betas {
        header.push(format!("e_tilde_lambda_theta_b{b}"));
        header.push(format!("e_tilde_lambda_xi_b{b}"));
        let at = approximate_spectrum(exp.symbol(), &tables.eigenvalue, n, b, Method::EigenvalueExpansion)?;
        let ax = approximate_spectrum(exp.symbol(), &tables.grid, n, b, Method::GridExpansion)?;
        let rt = error_report(&at, &exact, exp.symbol(), exp.class())?;
        let rx = error_report(&ax, &exact, exp.symbol(), exp.class())?;
        if symbol_err.is_empty() {
            symbol_err = rt.symbol_error.clone();
            // λ − f(ξ): zero up to inversion accuracy.
            residual_err = rx.xi.iter().zip(&rx.lambda).map(|(&x, &l)| l - exp.symbol().eval(x)).collect();
        }
        theta_errs.push(rt.approx_lambda_error);
        xi_errs.push(rx.approx_lambda_error);
    }
    let mut csv = CsvTable::new(header);
    for j in 0..n {
        let mut row = cells![j + 1, theta.points()[j], symbol_err[j], residual_err[j]];
        for (t, x) in theta_errs.iter().zip(&xi_errs) {
            row.push(crate::report::fmt_float(t[j]));
            row.push(crate::report::fmt_float(x[j]));
        }
        csv.push(row);
    }
    let stride = exp.config().thinning;
    let series = |label: String, v: &[f64]| {
        Series::line(label, theta.points().iter().zip(v).map(|(&t, &e)| (t, log10_abs(e))).collect()).thinned(stride)
    };
    let mut left = Plot::new(format!("Eigenvalue errors, theta method, n = {n}"), "theta", "log10 |error|")
        .with(series("lambda - f(theta)".into(), &symbol_err));
    let mut right = Plot::new(format!("Eigenvalue errors, xi method, n = {n}"), "theta", "log10 |error|")
        .with(series("lambda - f(theta)".into(), &symbol_err));
    for (i, &b) in betas.iter().enumerate() {
        left = left.with(series(format!("beta = {b}"), &theta_errs[i]));
        right = right.with(series(format!("beta = {b}"), &xi_errs[i]));
    }
    emit(exp, &format!("fig{fig}_eigenvalue_errors"), &csv, &[("theta", left), ("xi", right)])
}

fn symbols(exp: &mut Experiment) -> Result<Vec<PathBuf>> {
    const SAMPLES: usize = 513;
    let family = exp.family().clone();
    let parts: Vec<(&str, perfgrid::CosineSymbol)> = match &family {
        perfgrid::operators::OperatorFamily::Pencil { a, b } => vec![("a", a.clone()), ("b", b.clone())],
        _ => Vec::new(),
    };
    let mut header = vec!["theta".to_string()];
    header.extend(parts.iter().map(|(n, _)| n.to_string()));
    header.push("f".into());
    let mut csv = CsvTable::new(header);
    let grid: Vec<f64> = (0..SAMPLES).map(|i| std::f64::consts::PI * i as f64 / (SAMPLES - 1) as f64).collect();
    for &t in &grid {
        let mut row = vec![crate::report::fmt_float(t)];
        row.extend(parts.iter().map(|(_, s)| crate::report::fmt_float(s.eval(t))));
        row.push(crate::report::fmt_float(exp.symbol().eval(t)));
        csv.push(row);
    }
    let mut plot = Plot::new("Symbols", "theta", "value");
    for (name, s) in &parts {
        plot = plot.with(Series::line(*name, grid.iter().map(|&t| (t, s.eval(t))).collect()));
    }
    plot = plot.with(Series::line("f", grid.iter().map(|&t| (t, exp.symbol().eval(t))).collect()));
    emit(exp, "fig6_symbols", &csv, &[("", plot)])
}

fn both_expansions(exp: &mut Experiment) -> Result<Vec<PathBuf>> {
    let tables = exp.tables()?;
    let (c, d) = (&tables.eigenvalue, &tables.grid);
    let mut csv = CsvTable::new(["k", "j", "theta", "c_tilde", "d_tilde", "c_flag", "d_flag"]);
    for k in 1..=d.alpha() {
        for j in 1..=d.n1() {
            csv.push(cells![
                k,
                j,
                d.theta1()[j - 1],
                c.row(k)[j - 1],
                d.row(k)[j - 1],
                c.flags(k)[j - 1].as_str(),
                d.flags(k)[j - 1].as_str()
            ]);
        }
    }
    let left = table_series(c, "c~").into_iter().fold(Plot::new("Eigenvalue expansion", "theta", "c_k"), Plot::with);
    let right = table_series(d, "d~").into_iter().fold(Plot::new("Grid expansion", "theta", "d_k"), Plot::with);
    emit(exp, "fig7_expansions", &csv, &[("c", left), ("d", right)])
}
