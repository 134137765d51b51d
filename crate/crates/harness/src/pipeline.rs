//! Stages of an experiment: training tables, exact reference spectra and
//! matrix-less approximations, each written to the output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use perfgrid::expansion::{error_matrix_from_spectra, level_spectra, schedule, solve_expansion, vandermonde};
use perfgrid::extrapolate::{approximate_spectrum, error_report, max_abs_unmasked, target_mask};
use perfgrid::grids::{grid_error, perfect_grid};
use perfgrid::{
    eig_operator, standard_grid, ExpansionKind, ExpansionTable, FamilySymbol, Method, MonotonicityClass,
    OperatorFamily, SpectralSymbol, Spectrum,
};
use serde::Serialize;

use crate::artifact;
use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{log10_abs, CsvTable};
use crate::cells;

#[derive(Debug, Clone)]
pub struct Tables {
    /// `d̃_k`.
    pub grid: ExpansionTable,
    /// `c̃_k`.
    pub eigenvalue: ExpansionTable,
}

impl Tables {
    pub fn for_method(&self, method: Method) -> &ExpansionTable {
        match method {
            Method::GridExpansion => &self.grid,
            Method::EigenvalueExpansion => &self.eigenvalue,
        }
    }
}

/// Maxima over one approximation, against the exact spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validation {
    /// `max |ξ − θ|`.
    pub grid_error: f64,
    /// `max |λ − f(θ)|`, the raw symbol-sampling error.
    pub symbol_error: f64,
    /// `max |ξ − ξ̃|` over unmasked indices; grid method only.
    pub approx_grid_error: Option<f64>,
    /// `max |λ − λ̃|` over unmasked indices.
    pub approx_lambda_error: f64,
    /// Target indices left out of the maxima.
    pub masked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxSummary {
    pub n: usize,
    pub beta: usize,
    pub method: &'static str,
    pub path: PathBuf,
    pub validation: Option<Validation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Run record written as `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub name: String,
    pub config_hash: String,
    pub version: String,
    pub timings: Vec<StageTiming>,
    /// Paths relative to the output directory, in write order.
    pub outputs: Vec<String>,
}

pub struct Experiment {
    config: ExperimentConfig,
    family: OperatorFamily,
    symbol: FamilySymbol,
    class: MonotonicityClass,
    out_dir: PathBuf,
    tables: Option<Tables>,
    exact: BTreeMap<usize, Spectrum>,
    manifest: Manifest,
}

impl Experiment {
    /// `out_dir` overrides the directory named in the config.
    pub fn new(config: ExperimentConfig, out_dir: Option<PathBuf>) -> Result<Self, ConfigError> {
        config.validate()?;
        let family = config.operator_family()?;
        let symbol = family.distribution_symbol();
        let class = symbol.classify_monotonicity();
        let out_dir = out_dir.unwrap_or_else(|| config.output.dir.clone());
        let manifest = Manifest {
            name: config.name.clone(),
            config_hash: config.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timings: Vec::new(),
            outputs: Vec::new(),
        };
        Ok(Self { config, family, symbol, class, out_dir, tables: None, exact: BTreeMap::new(), manifest })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn family(&self) -> &OperatorFamily {
        &self.family
    }

    pub fn symbol(&self) -> &FamilySymbol {
        &self.symbol
    }

    pub fn class(&self) -> MonotonicityClass {
        self.class
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    fn timed<R>(&mut self, stage: impl Into<String>, f: impl FnOnce(&mut Self) -> Result<R>) -> Result<R> {
        let stage = stage.into();
        let start = Instant::now();
        let out = f(self).with_context(|| format!("stage `{stage}`"))?;
        self.manifest.timings.push(StageTiming { stage, seconds: start.elapsed().as_secs_f64() });
        Ok(out)
    }

    /// Path inside the output directory, created on demand and recorded.
    pub fn output_path(&mut self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir).with_context(|| format!("creating {}", self.out_dir.display()))?;
        self.manifest.outputs.push(name.to_string());
        Ok(self.out_dir.join(name))
    }

    pub fn write_csv(&mut self, name: &str, table: &CsvTable) -> Result<PathBuf> {
        let path = self.output_path(name)?;
        table.write(&path)?;
        Ok(path)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.output_path(name)?;
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Both expansion tables, trained on shared level spectra.
    pub fn tables(&mut self) -> Result<Tables> {
        if let Some(t) = &self.tables {
            return Ok(t.clone());
        }
        let tables = self.timed("train", |exp| {
            let grid_cfg = exp.config.expansion_config(ExpansionKind::Grid)?;
            let eig_cfg = grid_cfg.clone().with_kind(ExpansionKind::Eigenvalue);
            let sched = schedule(&grid_cfg);
            let spectra = level_spectra(&exp.family, &sched)?;
            let v = vandermonde(&sched);
            let solve = |cfg: &perfgrid::ExpansionConfig| -> Result<ExpansionTable> {
                let e = error_matrix_from_spectra(&exp.symbol, &sched, &spectra, cfg.kind)?;
                Ok(solve_expansion(&e, &v, cfg)?)
            };
            Ok(Tables { grid: solve(&grid_cfg)?, eigenvalue: solve(&eig_cfg)? })
        })?;
        self.tables = Some(tables.clone());
        Ok(tables)
    }

    /// Trains and writes `table_grid.csv` and `table_eigenvalue.csv`.
    pub fn run_expand(&mut self) -> Result<Tables> {
        let tables = self.tables()?;
        for t in [&tables.grid, &tables.eigenvalue] {
            let name = format!("table_{}.csv", t.kind().as_str());
            let path = self.output_path(&name)?;
            artifact::save(&path, t)?;
        }
        Ok(tables)
    }

    /// Exact spectrum of `A_n`, solved once per order.
    pub fn exact(&mut self, n: usize) -> Result<Spectrum> {
        if let Some(s) = self.exact.get(&n) {
            return Ok(s.clone());
        }
        if n > self.config.validation_cap {
            bail!(ConfigError::Invalid(format!(
                "order {n} exceeds the validation cap {}",
                self.config.validation_cap
            )));
        }
        let s = self.timed(format!("exact n={n}"), |exp| Ok(eig_operator(&exp.family.materialize(n)?)?))?;
        self.exact.insert(n, s.clone());
        Ok(s)
    }

    /// Writes `exact_n{n}.csv`: exact eigenvalues, perfect grid and raw errors.
    pub fn run_exact(&mut self, n: usize) -> Result<PathBuf> {
        let spectrum = self.exact(n)?;
        let xi = perfect_grid(&spectrum, &self.symbol, self.class)?;
        let theta = standard_grid::<f64>(n);
        let raw = grid_error(&xi, &theta, false)?;
        let scaled = grid_error(&xi, &theta, true)?;
        let mut csv = CsvTable::new(["j", "theta", "lambda", "xi", "e_xi", "e_xi_scaled", "e_lambda_theta", "clamped"]);
        for j in 1..=n {
            let lambda = perfgrid::grids::paired_eigenvalue(&spectrum, j, self.class)?;
            let t = theta.point(j);
            csv.push(cells![
                j,
                t,
                lambda,
                xi.point(j),
                raw.values[j - 1],
                scaled.values[j - 1],
                lambda - self.symbol.eval(t),
                xi.clamped()[j - 1]
            ]);
        }
        self.write_csv(&format!("exact_n{n}.csv"), &csv)
    }

    /// Writes `approx_{xi|theta}_n{n}_b{beta}.csv`.
    pub fn run_approx(&mut self, table: &ExpansionTable, n: usize, beta: usize, validate: bool) -> Result<ApproxSummary> {
        if n < table.n1() {
            bail!(ConfigError::Invalid(format!("target order {n} is below the training order {}", table.n1())));
        }
        let method = Method::for_kind(table.kind());
        let label = method.label();
        let approx = self.timed(format!("approx {label} n={n} beta={beta}"), |exp| {
            Ok(approximate_spectrum(&exp.symbol, table, n, beta, method)?)
        })?;
        let theta = approx.theta();
        let grid_method = method == Method::GridExpansion;
        let xi_tilde = |j: usize| if grid_method { approx.xi_tilde.point(j) } else { f64::NAN };
        let name = format!("approx_{label}_n{n}_b{beta}.csv");

        if !validate {
            let mut csv = CsvTable::new(["j", "theta", "xi_tilde", "lambda_tilde", "clamped"]);
            for j in 1..=n {
                let clamped = grid_method && approx.xi_tilde.clamped()[j - 1];
                csv.push(cells![j, theta.point(j), xi_tilde(j), approx.lambda_tilde[j - 1], clamped]);
            }
            let path = self.write_csv(&name, &csv)?;
            return Ok(ApproxSummary { n, beta, method: label, path, validation: None });
        }

        let exact = self.exact(n)?;
        let report = error_report(&approx, &exact, &self.symbol, self.class)?;
        let mask = target_mask(table, &theta, beta);
        let mut csv = CsvTable::new([
            "j",
            "theta",
            "xi_tilde",
            "lambda_tilde",
            "xi",
            "lambda",
            "e_xi",
            "e_lambda_theta",
            "e_tilde_xi",
            "e_tilde_lambda",
            "log10_e_xi",
            "log10_e_lambda_theta",
            "log10_e_tilde_xi",
            "log10_e_tilde_lambda",
            "masked",
        ]);
        for j in 1..=n {
            let i = j - 1;
            let e_tilde_xi = report.approx_grid_error.as_ref().map_or(f64::NAN, |v| v[i]);
            csv.push(cells![
                j,
                report.theta[i],
                xi_tilde(j),
                approx.lambda_tilde[i],
                report.xi[i],
                report.lambda[i],
                report.grid_error[i],
                report.symbol_error[i],
                e_tilde_xi,
                report.approx_lambda_error[i],
                log10_abs(report.grid_error[i]),
                log10_abs(report.symbol_error[i]),
                log10_abs(e_tilde_xi),
                log10_abs(report.approx_lambda_error[i]),
                mask[i]
            ]);
        }
        let path = self.write_csv(&name, &csv)?;
        let validation = Validation {
            grid_error: max_abs_unmasked(&report.grid_error, &[]),
            symbol_error: max_abs_unmasked(&report.symbol_error, &[]),
            approx_grid_error: report.approx_grid_error.as_ref().map(|v| max_abs_unmasked(v, &mask)),
            approx_lambda_error: max_abs_unmasked(&report.approx_lambda_error, &mask),
            masked: mask.iter().filter(|&&m| m).count(),
        };
        Ok(ApproxSummary { n, beta, method: label, path, validation: Some(validation) })
    }

    /// Every (target, β, method) combination of the config.
    pub fn run_approx_all(&mut self, targets: &[usize], betas: &[usize], validate: bool) -> Result<Vec<ApproxSummary>> {
        let tables = self.tables()?;
        let mut out = Vec::new();
        for &n in targets {
            for &beta in betas {
                for method in [Method::GridExpansion, Method::EigenvalueExpansion] {
                    out.push(self.run_approx(tables.for_method(method), n, beta, validate)?);
                }
            }
        }
        Ok(out)
    }

    /// Writes `manifest.json` and returns the record.
    pub fn finish(mut self) -> Result<Manifest> {
        std::fs::create_dir_all(&self.out_dir)?;
        self.manifest.outputs.push("manifest.json".into());
        let json = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(self.out_dir.join("manifest.json"), json + "\n")?;
        Ok(self.manifest)
    }
}
