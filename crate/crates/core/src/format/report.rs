//! Report tree shared by the JSON and text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::{Check, Verdict, PartitionOutcome, PlanSummary, StructureReport, VerificationReport};
use crate::system::MultiIndex;

pub const FORMAT_VERSION: &str = "flatlin-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Success,
    Verified,
    Refuted,
    Failed,
    Inconclusive,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success | Status::Verified => 0,
            Status::Refuted | Status::Failed => 1,
            Status::Error => 2,
            Status::Inconclusive => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Success => "success",
            Status::Verified => "verified",
            Status::Refuted => "refuted",
            Status::Failed => "failed",
            Status::Inconclusive => "inconclusive",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub max_order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format_version: String,
    pub command: String,
    pub status: Status,
    pub exit_code: i32,
    pub system: Option<String>,
    pub output: Option<String>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub settings: Option<Settings>,
    pub k: Option<MultiIndex>,
    pub verification: Option<VerificationReport>,
    pub structure: Option<StructureReport>,
    pub plan: Option<PlanSummary>,
    pub partition: Option<PartitionOutcome>,
    pub error: Option<ErrorInfo>,
}

impl ReportDocument {
    pub fn new(command: &str, status: Status) -> Self {
        ReportDocument {
            format_version: FORMAT_VERSION.to_string(),
            command: command.to_string(),
            status,
            exit_code: status.exit_code(),
            system: None,
            output: None,
            n: None,
            m: None,
            settings: None,
            k: None,
            verification: None,
            structure: None,
            plan: None,
            partition: None,
            error: None,
        }
    }

    pub fn set_status(&mut self, status: Status) {
        self.status = status;
        self.exit_code = status.exit_code();
    }

    /// Structure from the verification if present, else the standalone one.
    pub fn structure(&self) -> Option<&StructureReport> {
        self.verification.as_ref().and_then(|v| v.structure.as_ref()).or(self.structure.as_ref())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

pub fn render_report(doc: &ReportDocument, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = doc.to_json();
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text(doc),
    }
}

fn render_checks(out: &mut String, checks: &[Check]) {
    if checks.is_empty() {
        return;
    }
    out.push_str("checks:\n");
    for c in checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        let _ = writeln!(out, "  [{mark}] {}  ({})", c.name, c.detail);
    }
}

fn render_table(out: &mut String, st: &StructureReport) {
    if st.table.is_empty() {
        return;
    }
    let m = st.m;
    let headers: Vec<String> = st.arrangement.permutation.iter().map(|&j| format!("y{}", j + 1)).collect();
    let cell = |row: usize, j: usize| -> String {
        let r = st.r_arranged.values.get(j).copied().unwrap_or(0);
        if row as i64 > r {
            String::new()
        } else {
            st.table[row].cells.get(j).cloned().unwrap_or_default()
        }
    };
    let mut widths: Vec<usize> = headers.iter().map(String::len).collect();
    for (i, _) in st.table.iter().enumerate() {
        for (j, w) in widths.iter_mut().enumerate().take(m) {
            *w = (*w).max(cell(i, j).len());
        }
    }
    out.push_str("derivative structure (arranged):\n");
    let mut head = format!("  {:>5}", "order");
    for (h, w) in headers.iter().zip(&widths) {
        let _ = write!(head, " | {h:<w$}");
    }
    let _ = writeln!(out, "{}", head.trim_end());
    for (i, row) in st.table.iter().enumerate() {
        let mut line = format!("  {:>5}", row.order);
        for (j, w) in widths.iter().enumerate() {
            let _ = write!(line, " | {:<w$}", cell(i, j));
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
}

fn render_structure(out: &mut String, st: &StructureReport) {
    let _ = writeln!(out, "K = {}", st.k);
    let perm: Vec<String> = st.arrangement.permutation.iter().map(|j| format!("y{}", j + 1)).collect();
    let _ = writeln!(out, "arrangement = ({})", perm.join(","));
    for r in &st.arrangement.rationale {
        let _ = writeln!(out, "  {r}");
    }
    let _ = writeln!(out, "rank d_u phi_[K] = {}", st.rank_u_k);
    if let Some(p) = &st.p {
        let _ = writeln!(out, "P = {p}");
    }
    if let Some(s) = st.s {
        let _ = writeln!(out, "s = {s}");
    }
    let _ = writeln!(out, "R = {}", st.r);
    if st.r_arranged != st.r {
        let _ = writeln!(out, "R (arranged) = {}", st.r_arranged);
    }
    let _ = writeln!(out, "d_diff = {}", st.d_diff);
    let _ = writeln!(out, "case = {}", st.case.label());
    if let Some(u) = &st.uhat1 {
        let _ = writeln!(out, "{u}");
    }
    render_table(out, st);
    render_checks(out, &st.checks);
}

fn render_plan(out: &mut String, p: &PlanSummary) {
    let _ = writeln!(out, "plan ({}):", p.case.label());
    for d in &p.definitions {
        let _ = writeln!(out, "  {d}");
    }
    let d = MultiIndex { role: crate::system::IndexRole::D, values: p.d.clone() };
    let _ = writeln!(out, "  prolonged = [{}]", p.prolonged.join(", "));
    let _ = writeln!(out, "  D = {d}");
    let _ = writeln!(out, "  |D| = {}, d_diff = {}", p.abs_d, p.d_diff);
    let c = &p.certificate;
    let _ = writeln!(out, "  K_ext = {}", c.k_ext);
    let _ = writeln!(out, "  sum K_ext = {} (dim {})", c.sum_k_ext, c.dim);
    let _ = writeln!(out, "  state map rank = {}, decoupling rank = {}", c.state_map_rank, c.decoupling_rank);
    let _ = writeln!(out, "  minimal = {}", p.minimal);
}

pub fn render_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", doc.format_version);
    let _ = writeln!(out, "command: {}", doc.command);
    if let Some(s) = &doc.system {
        match (doc.n, doc.m) {
            (Some(n), Some(m)) => {
                let _ = writeln!(out, "system: {s} (n = {n}, m = {m})");
            }
            _ => {
                let _ = writeln!(out, "system: {s}");
            }
        }
    }
    if let Some(o) = &doc.output {
        let _ = writeln!(out, "output: {o}");
    }
    let _ = writeln!(out, "status: {} (exit {})", doc.status.label(), doc.exit_code);
    if let Some(e) = &doc.error {
        let _ = writeln!(out, "error [{}]: {}", e.kind, e.message);
    }
    if let Some(st) = doc.structure() {
        render_structure(&mut out, st);
    } else if let Some(k) = &doc.k {
        let _ = writeln!(out, "K = {k}");
    }
    if let Some(v) = &doc.verification {
        let verdict = match v.verdict {
            Verdict::Verified => "verified",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        };
        let _ = writeln!(out, "verdict: {verdict}");
        if let Some(step) = v.failing_step {
            let _ = writeln!(out, "failing step: {step}");
        }
        if let (Some(rank), Some(abs)) = (v.rank_phi, v.abs_r) {
            let _ = writeln!(out, "rank d phi_[0,R-1] = {rank}, |R| = {abs}");
        }
        if !v.missing_states.is_empty() {
            let _ = writeln!(out, "missing states: {}", v.missing_states.join(", "));
        }
        if let Some(rec) = v.inputs_recoverable {
            let _ = writeln!(out, "inputs recoverable: {rec}");
        }
        if let Some(msg) = &v.message {
            let _ = writeln!(out, "message: {msg}");
        }
    }
    if let Some(p) = &doc.partition {
        let _ = writeln!(out, "partition holds: {}", p.holds);
        let _ = writeln!(out, "K = {}", p.k);
        let _ = writeln!(out, "R = {}", p.r);
        render_checks(&mut out, &p.checks);
        if let Some(plan) = &p.plan {
            render_plan(&mut out, plan);
        }
    }
    if let Some(p) = &doc.plan {
        render_plan(&mut out, p);
    }
    out
}
