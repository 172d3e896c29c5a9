//! Experiment reports and their JSON and CSV forms.

use serde::{Deserialize, Serialize};

use super::budget::BudgetCheck;
use super::config::{ExperimentConfig, ReportFormat};
use super::stats::{AcceptanceEstimate, StatsSummary};
use crate::error::Result;
use crate::oracles::LanguageId;

/// Results for one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRow {
    pub index: usize,
    /// RLE form.
    pub input: String,
    pub length: String,
    pub oracle: bool,
    pub accepts: u64,
    pub rejects: u64,
    pub inconclusive: u64,
    pub estimate: AcceptanceEstimate,
    /// Monte Carlo over sampled restart rounds, for quantum recognizers.
    pub sampled: Option<AcceptanceEstimate>,
    pub rounds_median: Option<String>,
    pub log2_expected_rounds: Option<f64>,
    pub stats: StatsSummary,
    pub budget: BudgetCheck,
    /// The likelier decision matches the oracle.
    pub agrees: bool,
}

/// A computed quantity checked against a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub name: String,
    pub exact: Option<String>,
    pub value: f64,
    pub bound: Option<String>,
    pub estimate: Option<AcceptanceEstimate>,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub inputs: usize,
    pub disagreements: usize,
    /// Disagreements on deterministic or exactly evaluated recognizers.
    pub hard_disagreements: usize,
    pub budget_failures: usize,
    pub inconclusive: usize,
    pub failed_checks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config: ExperimentConfig,
    pub language: Option<LanguageId>,
    pub rows: Vec<InputRow>,
    pub exact: Vec<ExactRow>,
    pub summary: Summary,
}

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

impl Report {
    pub fn exit_code(&self) -> i32 {
        let s = &self.summary;
        if s.disagreements > 0 {
            EXIT_DISAGREEMENT
        } else if s.budget_failures > 0 || s.inconclusive > 0 || s.failed_checks > 0 {
            EXIT_BUDGET
        } else {
            EXIT_OK
        }
    }
}

#[derive(Serialize)]
struct CsvInputRow<'a> {
    index: usize,
    input: &'a str,
    length: &'a str,
    oracle: bool,
    accepts: u64,
    rejects: u64,
    inconclusive: u64,
    mode: &'static str,
    estimate: f64,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    exact: Option<&'a str>,
    steps_max: String,
    steps_median: String,
    space_work_max: u64,
    space_counter_max: String,
    passes_max: u64,
    budget_check: &'static str,
    agrees: bool,
}

#[derive(Serialize)]
struct CsvExactRow<'a> {
    name: &'a str,
    exact: Option<&'a str>,
    value: f64,
    bound: Option<&'a str>,
    estimate: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    pass: bool,
}

/// Serialises `report`. CSV carries one line per input, or one per exact
/// quantity when the experiment has no inputs.
pub fn emit_report(report: &Report, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            if report.rows.is_empty() {
                for r in &report.exact {
                    wtr.serialize(CsvExactRow {
                        name: &r.name,
                        exact: r.exact.as_deref(),
                        value: r.value,
                        bound: r.bound.as_deref(),
                        estimate: r.estimate.as_ref().map(|e| e.value),
                        ci_low: r.estimate.as_ref().and_then(|e| e.ci).map(|c| c.0),
                        ci_high: r.estimate.as_ref().and_then(|e| e.ci).map(|c| c.1),
                        pass: r.pass,
                    })?;
                }
            } else {
                for r in &report.rows {
                    wtr.serialize(CsvInputRow {
                        index: r.index,
                        input: &r.input,
                        length: &r.length,
                        oracle: r.oracle,
                        accepts: r.accepts,
                        rejects: r.rejects,
                        inconclusive: r.inconclusive,
                        mode: match r.estimate.mode {
                            super::stats::EstimateMode::Exact => "exact",
                            super::stats::EstimateMode::MonteCarlo => "monte-carlo",
                        },
                        estimate: r.estimate.value,
                        ci_low: r.estimate.ci.map(|c| c.0),
                        ci_high: r.estimate.ci.map(|c| c.1),
                        exact: r.estimate.exact.as_deref(),
                        steps_max: r.stats.steps_max.to_string(),
                        steps_median: r.stats.steps_median.to_string(),
                        space_work_max: r.stats.space_work_max,
                        space_counter_max: r.stats.space_counter_max.to_string(),
                        passes_max: r.stats.passes_max,
                        budget_check: if r.budget.pass { "pass" } else { "fail" },
                        agrees: r.agrees,
                    })?;
                }
            }
            wtr.into_inner()
                .map_err(|e| crate::error::Error::Io(e.into_error()))
        }
    }
}
