//! Expansion tables on disk.
//!
//! ```text
//! # perfgrid-table 1
//! # kind: grid
//! # n1: 100
//! # alpha: 3
//! # masks: 2=1,2;3=1,2,3
//! # sha256: <hex digest of everything after this line>
//! k,j,theta,value,flag
//! 1,1,3.1104877758314785e-2,...,valid
//! ```

use std::fmt::Write as _;
use std::path::Path;

use perfgrid::{ExpansionConfig, ExpansionKind, ExpansionTable, SampleFlag};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::report::fmt_float;

const MAGIC: &str = "# perfgrid-table 1";

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a table artifact: {0}")]
    Format(String),
    #[error("checksum mismatch: header {expected}, body {actual}")]
    Checksum { expected: String, actual: String },
    #[error("inconsistent table: {0}")]
    Table(#[from] perfgrid::Error),
}

fn format_err(msg: impl Into<String>) -> ArtifactError {
    ArtifactError::Format(msg.into())
}

fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

fn masks_field(cfg: &ExpansionConfig) -> String {
    if cfg.masks().is_empty() {
        return "none".into();
    }
    cfg.masks()
        .iter()
        .map(|(k, set)| {
            let idx: Vec<String> = set.iter().map(|j| j.to_string()).collect();
            format!("{k}={}", idx.join(","))
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn encode(table: &ExpansionTable) -> String {
    let mut body = String::from("k,j,theta,value,flag\n");
    for k in 1..=table.alpha() {
        for j in 1..=table.n1() {
            let _ = writeln!(
                body,
                "{k},{j},{},{},{}",
                fmt_float(table.theta1()[j - 1]),
                fmt_float(table.row(k)[j - 1]),
                table.flags(k)[j - 1].as_str()
            );
        }
    }
    let cfg = table.config();
    format!(
        "{MAGIC}\n# kind: {}\n# n1: {}\n# alpha: {}\n# masks: {}\n# sha256: {}\n{body}",
        cfg.kind.as_str(),
        cfg.n1,
        cfg.alpha,
        masks_field(cfg),
        digest(&body)
    )
}

pub fn decode(text: &str) -> Result<ExpansionTable, ArtifactError> {
    let mut rest = text;
    let mut header = Vec::new();
    while let Some(line) = rest.strip_prefix('#') {
        let end = line.find('\n').ok_or_else(|| format_err("truncated header"))?;
        header.push(format!("#{}", &line[..end]));
        rest = &line[end + 1..];
    }
    if header.first().map(String::as_str) != Some(MAGIC) {
        return Err(format_err("missing magic line"));
    }
    let field = |name: &str| {
        let prefix = format!("# {name}: ");
        header
            .iter()
            .find_map(|h| h.strip_prefix(&prefix))
            .ok_or_else(|| format_err(format!("missing `{name}`")))
    };
    let expected = field("sha256")?.to_string();
    let actual = digest(rest);
    if expected != actual {
        return Err(ArtifactError::Checksum { expected, actual });
    }
    let kind = match field("kind")? {
        "grid" => ExpansionKind::Grid,
        "eigenvalue" => ExpansionKind::Eigenvalue,
        other => return Err(format_err(format!("unknown kind `{other}`"))),
    };
    let parse_usize = |s: &str| s.trim().parse::<usize>().map_err(|_| format_err(format!("bad integer `{s}`")));
    let n1 = parse_usize(field("n1")?)?;
    let alpha = parse_usize(field("alpha")?)?;
    let mut cfg = ExpansionConfig::new(n1, alpha, kind)?;
    let masks = field("masks")?;
    if masks != "none" {
        for part in masks.split(';') {
            let (k, list) = part.split_once('=').ok_or_else(|| format_err("bad mask entry"))?;
            let idx = list.split(',').map(parse_usize).collect::<Result<Vec<_>, _>>()?;
            cfg = cfg.with_mask(parse_usize(k)?, idx)?;
        }
    }

    let mut values = vec![vec![f64::NAN; n1]; alpha];
    let mut flags = vec![vec![SampleFlag::Clamped; n1]; alpha];
    let mut seen = vec![vec![false; n1]; alpha];
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    for record in reader.records() {
        let record = record.map_err(|e| format_err(e.to_string()))?;
        if record.len() != 5 {
            return Err(format_err("expected 5 columns"));
        }
        let k = parse_usize(&record[0])?;
        let j = parse_usize(&record[1])?;
        if !(1..=alpha).contains(&k) || !(1..=n1).contains(&j) || seen[k - 1][j - 1] {
            return Err(format_err(format!("bad or repeated entry ({k}, {j})")));
        }
        seen[k - 1][j - 1] = true;
        values[k - 1][j - 1] = record[3].parse().map_err(|_| format_err("bad value"))?;
        flags[k - 1][j - 1] =
            SampleFlag::parse(&record[4]).ok_or_else(|| format_err(format!("bad flag `{}`", &record[4])))?;
    }
    if seen.iter().flatten().any(|s| !s) {
        return Err(format_err("missing entries"));
    }
    Ok(ExpansionTable::from_parts(cfg, values, flags)?)
}

pub fn save(path: &Path, table: &ExpansionTable) -> Result<(), ArtifactError> {
    std::fs::write(path, encode(table))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<ExpansionTable, ArtifactError> {
    decode(&std::fs::read_to_string(path)?)
}
