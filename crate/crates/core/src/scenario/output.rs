//! Flat result rows and their CSV/JSON encodings.

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use super::ScenarioError;
use crate::lhv::WeightedAssignment;

pub const SCHEMA_VERSION: u32 = 1;

/// Fixed CSV column order for quantum scenarios.
pub const RESULT_COLUMNS: [&str; 18] = [
    "scenario",
    "r",
    "eta1",
    "eta2",
    "d",
    "k",
    "lhs",
    "rhs_r1",
    "rhs_r3",
    "rhs_r4",
    "margin_r1",
    "margin_r3",
    "margin_r4",
    "viol_r1",
    "viol_r3",
    "viol_r4",
    "pt_min_eig",
    "trunc_loss",
];

/// One evaluated parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    /// Squeezing parameter, only for the TMSV family.
    pub r: Option<f64>,
    pub eta1: f64,
    pub eta2: f64,
    /// `"d"` when both modes share a dimension, `"d1xd2"` otherwise.
    pub d: String,
    pub k: u32,
    pub lhs: f64,
    pub rhs_r1: f64,
    pub rhs_r3: f64,
    pub rhs_r4: f64,
    pub margin_r1: f64,
    pub margin_r3: f64,
    pub margin_r4: f64,
    pub viol_r1: bool,
    pub viol_r3: bool,
    pub viol_r4: bool,
    pub pt_min_eig: f64,
    pub trunc_loss: f64,
}

#[derive(Serialize, Deserialize)]
struct VersionedRow<T> {
    schema_version: u32,
    #[serde(flatten)]
    row: T,
}

/// `%.{digits}g`-style rendering: shortest of fixed or scientific notation,
/// trailing zeros trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn num(x: f64) -> String {
    format_significant(x, 12)
}

impl ResultRow {
    fn csv_fields(&self) -> Vec<String> {
        vec![
            self.scenario.clone(),
            self.r.map(num).unwrap_or_default(),
            num(self.eta1),
            num(self.eta2),
            self.d.clone(),
            self.k.to_string(),
            num(self.lhs),
            num(self.rhs_r1),
            num(self.rhs_r3),
            num(self.rhs_r4),
            num(self.margin_r1),
            num(self.margin_r3),
            num(self.margin_r4),
            self.viol_r1.to_string(),
            self.viol_r3.to_string(),
            self.viol_r4.to_string(),
            num(self.pt_min_eig),
            num(self.trunc_loss),
        ]
    }
}

fn csv_error(e: csv::Error) -> ScenarioError {
    ScenarioError::Serialize(e.to_string())
}

fn csv_bytes(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, ScenarioError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for rec in records {
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| ScenarioError::Serialize(e.to_string()))
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, ScenarioError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| ScenarioError::Serialize(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn encode_rows(rows: &[ResultRow], format: OutputFormat) -> Result<Vec<u8>, ScenarioError> {
    match format {
        OutputFormat::Csv => csv_bytes(&RESULT_COLUMNS, rows.iter().map(ResultRow::csv_fields)),
        OutputFormat::Json => {
            let versioned: Vec<_> = rows
                .iter()
                .map(|row| VersionedRow {
                    schema_version: SCHEMA_VERSION,
                    row,
                })
                .collect();
            json_bytes(&versioned)
        }
    }
}

/// Parses a JSON row array, checking the schema version.
pub fn decode_json_rows(bytes: &[u8]) -> Result<Vec<ResultRow>, ScenarioError> {
    let rows: Vec<VersionedRow<ResultRow>> =
        serde_json::from_slice(bytes).map_err(|e| ScenarioError::Serialize(e.to_string()))?;
    rows.into_iter()
        .map(|v| {
            if v.schema_version == SCHEMA_VERSION {
                Ok(v.row)
            } else {
                Err(ScenarioError::Serialize(format!(
                    "unsupported schema_version {}",
                    v.schema_version
                )))
            }
        })
        .collect()
}

/// Outcome of a hidden-variable search as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvSearchReport {
    pub scenario: String,
    pub constrained: bool,
    pub variant: String,
    pub seed: u64,
    pub budget: u64,
    pub amplitude_bound: f64,
    pub intensity_max: f64,
    pub evaluations_used: u64,
    pub best_score: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub constraint_residual: f64,
    pub points: Vec<WeightedAssignment>,
}

pub const LHV_COLUMNS: [&str; 18] = [
    "scenario",
    "constrained",
    "variant",
    "seed",
    "budget",
    "evaluations_used",
    "best_score",
    "lhs",
    "rhs",
    "constraint_residual",
    "point",
    "weight",
    "x1",
    "y1",
    "n1",
    "x2",
    "y2",
    "n2",
];

impl LhvSearchReport {
    pub fn encode(&self, format: OutputFormat) -> Result<Vec<u8>, ScenarioError> {
        match format {
            OutputFormat::Json => json_bytes(&VersionedRow {
                schema_version: SCHEMA_VERSION,
                row: self,
            }),
            OutputFormat::Csv => {
                let records = self.points.iter().enumerate().map(|(i, p)| {
                    let a = &p.assignment;
                    vec![
                        self.scenario.clone(),
                        self.constrained.to_string(),
                        self.variant.clone(),
                        self.seed.to_string(),
                        self.budget.to_string(),
                        self.evaluations_used.to_string(),
                        num(self.best_score),
                        num(self.lhs),
                        num(self.rhs),
                        num(self.constraint_residual),
                        i.to_string(),
                        num(p.weight),
                        num(a.x1),
                        num(a.y1),
                        num(a.n1),
                        num(a.x2),
                        num(a.y2),
                        num(a.n2),
                    ]
                });
                csv_bytes(&LHV_COLUMNS, records)
            }
        }
    }
}
