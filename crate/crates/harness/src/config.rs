//! Declarative experiment descriptions, stored as TOML.

use std::path::PathBuf;

use perfgrid::{CosineSymbol, FamilySymbol, ExpansionConfig, ExpansionKind, OperatorFamily, SparseCorrection, SpectralSymbol};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Largest order solved exactly unless a config raises it.
pub const DEFAULT_VALIDATION_CAP: usize = 8191;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown preset `{0}` (available: {list})", list = PRESETS.join(", "))]
    UnknownPreset(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// How `A_n` is built from cosine coefficients `f̂_0, f̂_1, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Toeplitz { f: Vec<f64> },
    Corrected { f: Vec<f64>, correction: Vec<CorrectionEntry> },
    Pencil { a: Vec<f64>, b: Vec<f64> },
}

/// One entry of a sparse correction, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrectionEntry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSpec {
    pub k: usize,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), formats: vec![Format::Csv, Format::Svg] }
    }
}

fn default_thinning() -> usize {
    1
}

fn default_cap() -> usize {
    DEFAULT_VALIDATION_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub n1: usize,
    pub alpha: usize,
    /// Validation orders `n`, each at least `n1`.
    pub targets: Vec<usize>,
    pub beta_list: Vec<usize>,
    /// Plot-only stride over target indices.
    #[serde(default = "default_thinning")]
    pub thinning: usize,
    #[serde(default = "default_cap")]
    pub validation_cap: usize,
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub masks: Vec<MaskSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() {
            return Err(invalid("name must be nonempty"));
        }
        let family = self.operator_family()?;
        let class = family.distribution_symbol().classify_monotonicity();
        if !class.is_monotone() {
            return Err(invalid("distribution symbol is not monotone on [0, π]"));
        }
        self.expansion_config(ExpansionKind::Grid)?;
        if let FamilySpec::Corrected { correction, .. } = &self.family {
            let reach = correction.iter().map(|c| c.row.max(c.col)).max().unwrap_or(0);
            if reach > self.n1 {
                return Err(invalid(format!("correction index {reach} exceeds n1 = {}", self.n1)));
            }
            if correction.iter().any(|c| c.row == 0 || c.col == 0 || !c.value.is_finite()) {
                return Err(invalid("correction entries are 1-based with finite values"));
            }
        }
        if let Some(&n) = self.targets.iter().find(|&&n| n < self.n1) {
            return Err(invalid(format!("target order {n} is below n1 = {}", self.n1)));
        }
        if self.beta_list.is_empty() {
            return Err(invalid("beta_list must be nonempty"));
        }
        if let Some(&b) = self.beta_list.iter().find(|&&b| b == 0 || b > self.alpha) {
            return Err(invalid(format!("beta {b} outside 1..={}", self.alpha)));
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats must be nonempty"));
        }
        if self.thinning == 0 {
            return Err(invalid("thinning must be at least 1"));
        }
        Ok(())
    }

    pub fn operator_family(&self) -> Result<OperatorFamily, ConfigError> {
        let sym = |c: &[f64]| CosineSymbol::from_f64(c).map_err(|e| invalid(e.to_string()));
        match &self.family {
            FamilySpec::Toeplitz { f } => Ok(OperatorFamily::toeplitz(sym(f)?)),
            FamilySpec::Corrected { f, correction } => Ok(OperatorFamily::corrected(
                sym(f)?,
                SparseCorrection::new(correction.iter().map(|c| (c.row, c.col, c.value))),
            )),
            FamilySpec::Pencil { a, b } => {
                OperatorFamily::pencil(sym(a)?, sym(b)?).map_err(|e| invalid(e.to_string()))
            }
        }
    }

    pub fn symbol(&self) -> Result<FamilySymbol, ConfigError> {
        Ok(self.operator_family()?.distribution_symbol())
    }

    pub fn expansion_config(&self, kind: ExpansionKind) -> Result<ExpansionConfig, ConfigError> {
        let mut cfg = ExpansionConfig::new(self.n1, self.alpha, kind).map_err(|e| invalid(e.to_string()))?;
        for m in &self.masks {
            cfg = cfg.with_mask(m.k, m.indices.iter().copied()).map_err(|e| invalid(e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn writes(&self, format: Format) -> bool {
        self.output.formats.contains(&format)
    }
}

/// Built-in experiment names; `precond` is accepted for `preconditioned`.
pub const PRESETS: [&str; 4] = ["laplacian-nd", "dirichlet", "bilaplacian", "preconditioned"];

pub fn preset(name: &str) -> Result<ExperimentConfig, ConfigError> {
    let base = |name: &str, family, n1, alpha, targets: Vec<usize>| ExperimentConfig {
        name: name.to_string(),
        n1,
        alpha,
        beta_list: (1..=alpha).collect(),
        targets,
        thinning: 1,
        validation_cap: DEFAULT_VALIDATION_CAP,
        family,
        masks: Vec::new(),
        output: OutputSpec { dir: PathBuf::from("out").join(name), ..OutputSpec::default() },
    };
    let cfg = match name {
        "laplacian-nd" => base(
            name,
            FamilySpec::Corrected {
                f: vec![2.0, -1.0],
                correction: vec![CorrectionEntry { row: 1, col: 1, value: -1.0 }],
            },
            100,
            4,
            vec![1000],
        ),
        // Row k of the table carries roundoff in E scaled by h^-k; only the first row stays near zero.
        "dirichlet" => base(name, FamilySpec::Toeplitz { f: vec![2.0, -1.0] }, 100, 1, vec![100, 500]),
        "bilaplacian" => ExperimentConfig {
            masks: vec![MaskSpec { k: 2, indices: vec![1, 2] }, MaskSpec { k: 3, indices: vec![1, 2, 3] }],
            thinning: 50,
            ..base(name, FamilySpec::Toeplitz { f: vec![6.0, -4.0, 1.0] }, 100, 3, vec![4095])
        },
        "preconditioned" | "precond" => base(
            "preconditioned",
            FamilySpec::Pencil { a: vec![4.0, -1.0, -1.0], b: vec![3.0, 1.0] },
            100,
            4,
            vec![4095],
        ),
        _ => return Err(ConfigError::UnknownPreset(name.to_string())),
    };
    cfg.validate()?;
    Ok(cfg)
}
