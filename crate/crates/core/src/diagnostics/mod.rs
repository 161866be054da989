//! The testable conditions as executable diagnostics.
//!
//! Every verdict is three-valued: an asymptotic statement can only be
//! confirmed, refuted, or left open at a finite truncation.

mod carleson;
mod condition_d;
mod hoffman;
mod section6;
mod weight_class;

pub use carleson::{carleson_check, majorant_check, minimal_shadow_c0, CarlesonReport, TailModel, CARLESON_THRESHOLD};
pub use condition_d::{
    condition_d_search, DualConstraint, DualProblem, DualSearchOptions, DualSearchState, DualTraceRow,
};
pub use hoffman::{hoffman_split, hoffman_verify, HoffmanFit, HoffmanGrid};
pub use section6::{
    phi_section6_bracket, pointeval_incompatibility, section6_report, stage_bracket, IncompatibilityRow, PhiBracket,
    Section6Options, Section6Report, DEFAULT_J_FAR,
};
pub use weight_class::{series_tail_bracket, weight_class_check, WeightClassInput, WeightClassResult};

use serde::{Deserialize, Serialize};

/// Three-valued outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    Undecided,
}

/// One row of a per-point report. Columns that do not apply are left empty in CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub index: usize,
    pub n: Option<u32>,
    pub k: Option<i64>,
    pub re: f64,
    pub im: f64,
    pub phi_lambda: f64,
    /// Upper bound on the omitted part of `φ_Λ` (0 for a finite sequence).
    pub tail_bound: f64,
    /// `P[w](λ)`.
    pub majorant: Option<f64>,
    /// `P[w](λ) - φ_Λ(λ)`.
    pub deficit: Option<f64>,
}

/// Per-point rows plus global quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub rows: Vec<ReportRow>,
    /// `inf |B_λ(λ)|` over the truncation.
    pub inf_b: f64,
    /// `M = sup φ_Λ` over the truncation.
    pub m_sup: f64,
    pub separation: f64,
    pub verdict: Verdict,
}
