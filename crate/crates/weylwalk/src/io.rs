//! The `weylwalk/1` walk file format and CSV emitters.
//!
//! Walk files are JSON with complex entries spelled as explicit [re, im]
//! pairs; parsing is purely structural, unitarity validation is a separate
//! explicit step so invalid walks can still be loaded and diagnosed. CSV
//! floats are printed with 17 significant digits so doubles round-trip
//! exactly.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::CanonicalForm;
use crate::evolve::{BoundReport, DispersionTable};
use crate::linalg::CMat;
use crate::packet::PacketTrace;
use crate::walk::{LatticeScale, ValidationReport, WalkSpec};

pub const FORMAT_VERSION: &str = "weylwalk/1";

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("unknown format version {found:?} (expected {FORMAT_VERSION:?}) at field `format`")]
    UnknownVersion { found: String },
    #[error("duplicate displacement {q:?} at field `coins[{index}].q`")]
    DuplicateDisplacement { q: Vec<i64>, index: usize },
    #[error("coin matrix has {found} entries, expected k² = {expected} at field `coins[{index}].matrix`")]
    MatrixShape { index: usize, expected: usize, found: usize },
    #[error("displacement has {found} components, expected d = {expected} at field `coins[{index}].q`")]
    DisplacementShape { index: usize, expected: usize, found: usize },
    #[error("invalid walk structure: {0}")]
    Structure(#[from] crate::error::WalkError),
}

#[derive(Debug, Serialize, Deserialize)]
struct WalkFile {
    format: String,
    d: usize,
    k: usize,
    scale: ScaleFile,
    coins: Vec<CoinFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScaleFile {
    a: f64,
    dt: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoinFile {
    q: Vec<i64>,
    /// k×k row-major, each entry an [re, im] pair.
    matrix: Vec<[f64; 2]>,
}

/// Parse a UTF-8 JSON walk definition. Structural checks only.
pub fn parse_walk(text: &str) -> Result<WalkSpec, ParseError> {
    let file: WalkFile = serde_json::from_str(text).map_err(|e| ParseError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.format != FORMAT_VERSION {
        return Err(ParseError::UnknownVersion { found: file.format });
    }
    let mut coins: BTreeMap<Vec<i64>, CMat> = BTreeMap::new();
    for (index, coin) in file.coins.iter().enumerate() {
        if coin.q.len() != file.d {
            return Err(ParseError::DisplacementShape {
                index,
                expected: file.d,
                found: coin.q.len(),
            });
        }
        if coin.matrix.len() != file.k * file.k {
            return Err(ParseError::MatrixShape {
                index,
                expected: file.k * file.k,
                found: coin.matrix.len(),
            });
        }
        if coins.contains_key(&coin.q) {
            return Err(ParseError::DuplicateDisplacement { q: coin.q.clone(), index });
        }
        let entries: Vec<C64> = coin.matrix.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        let m = CMat::from_shape_vec((file.k, file.k), entries).expect("length checked");
        coins.insert(coin.q.clone(), m);
    }
    let scale = LatticeScale::new(file.scale.a, file.scale.dt).map_err(ParseError::Structure)?;
    WalkSpec::new(file.d, file.k, coins, scale).map_err(ParseError::Structure)
}

/// Serialize a walk to the `weylwalk/1` JSON format. Coins round-trip
/// bit-exactly through `parse_walk`.
pub fn serialize_walk(spec: &WalkSpec) -> String {
    let file = WalkFile {
        format: FORMAT_VERSION.to_string(),
        d: spec.dim(),
        k: spec.internal_dim(),
        scale: ScaleFile { a: spec.scale().a, dt: spec.scale().dt },
        coins: spec
            .coins()
            .iter()
            .map(|(q, m)| CoinFile {
                q: q.clone(),
                matrix: m.iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serialization of plain data")
}

/// 17 significant digits: round-trip exact for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_row(fields: &[String]) -> String {
    let mut row = fields.join(",");
    row.push_str("\r\n");
    row
}

pub fn dispersion_csv(table: &DispersionTable) -> String {
    let mut header = vec!["s".to_string()];
    let d = table.rows.first().map(|r| r.p.len()).unwrap_or(0);
    for i in 0..d {
        header.push(format!("p{i}"));
    }
    for j in 0..table.k {
        header.push(format!("theta_over_dt_{j}"));
    }
    for j in 0..table.k {
        header.push(format!("continuum_{j}"));
    }
    let mut out = csv_row(&header);
    for row in &table.rows {
        let mut fields = vec![fmt_f64(row.s)];
        fields.extend(row.p.iter().map(|&x| fmt_f64(x)));
        fields.extend(row.theta_over_dt.iter().map(|&x| fmt_f64(x)));
        fields.extend(row.continuum.iter().map(|&x| fmt_f64(x)));
        out.push_str(&csv_row(&fields));
    }
    out
}

pub fn bound_csv(report: &BoundReport) -> String {
    let mut out = csv_row(&[
        "lambda".into(),
        "measured".into(),
        "analytic".into(),
        "coin_count".into(),
        "qmax".into(),
        "satisfied".into(),
    ]);
    out.push_str(&csv_row(&[
        fmt_f64(report.lambda),
        fmt_f64(report.measured),
        fmt_f64(report.analytic),
        report.coin_count.to_string(),
        fmt_f64(report.qmax),
        report.satisfied.to_string(),
    ]));
    out
}

pub fn packet_csv(trace: &PacketTrace) -> String {
    let d = trace.samples.first().map(|s| s.mean.len()).unwrap_or(0);
    let mut header = vec!["step".to_string(), "time".to_string()];
    for i in 0..d {
        header.push(format!("mean{i}"));
    }
    header.push("spread".to_string());
    for i in 0..d {
        header.push(format!("continuum_mean{i}"));
    }
    header.push("continuum_spread".to_string());
    let mut out = csv_row(&header);
    for s in &trace.samples {
        let mut fields = vec![s.step.to_string(), fmt_f64(s.time)];
        fields.extend(s.mean.iter().map(|&x| fmt_f64(x)));
        fields.push(fmt_f64(s.spread));
        fields.extend(s.mean_continuum.iter().map(|&x| fmt_f64(x)));
        fields.push(fmt_f64(s.spread_continuum));
        out.push_str(&csv_row(&fields));
    }
    out
}

pub fn validation_csv(report: &ValidationReport) -> String {
    let mut out = csv_row(&["displacement".into(), "residual".into()]);
    out.push_str(&csv_row(&["completeness".into(), fmt_f64(report.completeness)]));
    for (q, r) in &report.residuals {
        let label = q.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        out.push_str(&csv_row(&[label, fmt_f64(*r)]));
    }
    out
}

pub fn canonical_csv(cf: &CanonicalForm) -> String {
    let mut out = csv_row(&[
        "gamma1".into(),
        "gamma2".into(),
        "gamma3".into(),
        "handedness".into(),
        "effective_dim".into(),
        "beta".into(),
    ]);
    let beta = cf.beta.iter().map(|&b| fmt_f64(b)).collect::<Vec<_>>().join(" ");
    out.push_str(&csv_row(&[
        fmt_f64(cf.gamma[0]),
        fmt_f64(cf.gamma[1]),
        fmt_f64(cf.gamma[2]),
        cf.handedness.to_string(),
        cf.effective_dim.to_string(),
        beta,
    ]));
    out
}
