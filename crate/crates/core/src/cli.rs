//! Command-line driver. `run_command` never panics outward: every path
//! ends in one of the exit codes 0 (success), 1 (refuted or a failed
//! check), 2 (input error) or 3 (inconclusive).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    check_partition, plan_minimal_prolongations, structure_analysis, verify_candidate, AnalysisOptions,
    PlanOptions, Verdict,
};
use crate::error::Error;
use crate::format::{parse_system_file, render_report, ErrorInfo, ReportDocument, ReportFormat, Settings, Status, SystemFile};
use crate::geometry::{SamplePlan, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};
use crate::system::{relative_degrees, DerivativeTable, FlatOutputCandidate, IndexRole, MultiIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Reldeg,
    Analyze,
    Verify,
    Plan,
    CheckPartition,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Reldeg => "reldeg",
            Command::Analyze => "analyze",
            Command::Verify => "verify",
            Command::Plan => "plan",
            Command::CheckPartition => "check-partition",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "reldeg" => Command::Reldeg,
            "analyze" => Command::Analyze,
            "verify" => Command::Verify,
            "plan" => Command::Plan,
            "check-partition" => Command::CheckPartition,
            other => return Err(Error::InvalidArgument(format!("unknown command `{other}`"))),
        })
    }
}

/// Everything a run needs besides the parsed system.
#[derive(Debug, Clone)]
pub struct RunRequest {
    pub command: Command,
    pub output: Option<String>,
    pub options: AnalysisOptions,
    /// Zero-based component indices.
    pub partition: Option<Vec<usize>>,
    pub r: Option<Vec<i64>>,
    pub keep_order: bool,
}

impl RunRequest {
    pub fn new(command: Command) -> Self {
        RunRequest {
            command,
            output: None,
            options: AnalysisOptions::default(),
            partition: None,
            r: None,
            keep_order: false,
        }
    }
}

fn error_doc(command: &str, e: &Error) -> ReportDocument {
    let status = if e.is_inconclusive() {
        Status::Inconclusive
    } else if e.is_check_failure() {
        Status::Failed
    } else {
        Status::Error
    };
    let mut doc = ReportDocument::new(command, status);
    doc.error = Some(ErrorInfo { kind: e.kind().to_string(), message: e.to_string() });
    doc
}

fn select<'a>(file: &'a SystemFile, name: Option<&str>) -> Result<&'a FlatOutputCandidate, Error> {
    match name {
        Some(n) => file
            .candidate(n)
            .ok_or_else(|| Error::InvalidArgument(format!("no output named `{n}`"))),
        None if file.candidates.len() == 1 => Ok(&file.candidates[0]),
        None if file.candidates.is_empty() => Err(Error::InvalidArgument("the file declares no output".into())),
        None => Err(Error::InvalidArgument("several outputs declared; choose one with --output".into())),
    }
}

/// Runs `req` on an already parsed system.
pub fn run_on_system(file: &SystemFile, req: &RunRequest) -> ReportDocument {
    let name = req.command.name();
    let sys = &file.model;
    let opts = &req.options;
    let mut doc = ReportDocument::new(name, Status::Success);
    doc.system = Some(sys.name().to_string());
    doc.n = Some(sys.n());
    doc.m = Some(sys.m());
    doc.settings = Some(Settings {
        seed: opts.plan.seed,
        samples: opts.plan.n_samples,
        tolerance: opts.plan.tolerance,
        max_order: opts.cap_for(sys.n()),
    });
    let fail = |mut doc: ReportDocument, e: Error| {
        let d = error_doc(name, &e);
        doc.set_status(d.status);
        doc.error = d.error;
        doc
    };
    let cand = match select(file, req.output.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail(doc, e),
    };
    doc.output = Some(cand.name().to_string());

    match req.command {
        Command::Reldeg => {
            let table = DerivativeTable::for_candidate(sys.clone(), cand, opts.cap_for(sys.n()));
            match relative_degrees(&table) {
                Ok(k) => doc.k = Some(k),
                Err(e) => return fail(doc, e),
            }
        }
        Command::Analyze => match structure_analysis(sys, cand, opts) {
            Ok(st) => {
                doc.k = Some(st.k.clone());
                if !st.checks_pass() {
                    doc.set_status(Status::Failed);
                }
                doc.structure = Some(st);
            }
            Err(e) => return fail(doc, e),
        },
        Command::Verify | Command::Plan => {
            let rep = match verify_candidate(sys, cand, opts) {
                Ok(r) => r,
                Err(e) => return fail(doc, e),
            };
            doc.k = rep.structure.as_ref().map(|s| s.k.clone());
            let verdict = rep.verdict;
            doc.set_status(match verdict {
                Verdict::Verified => Status::Verified,
                Verdict::Refuted => Status::Refuted,
                Verdict::Inconclusive => Status::Inconclusive,
            });
            if req.command == Command::Plan && verdict == Verdict::Verified {
                let popts = PlanOptions { keep_order: req.keep_order, ..PlanOptions::default() };
                match plan_minimal_prolongations(sys, cand, &rep, &popts, opts) {
                    Ok(p) => {
                        doc.set_status(if p.summary.minimal { Status::Success } else { Status::Failed });
                        doc.plan = Some(p.summary);
                    }
                    Err(e) => {
                        doc.verification = Some(rep);
                        return fail(doc, e);
                    }
                }
            }
            doc.verification = Some(rep);
        }
        Command::CheckPartition => {
            let (Some(part), Some(r)) = (&req.partition, &req.r) else {
                return fail(doc, Error::InvalidArgument("check-partition needs --partition and --R".into()));
            };
            let r = match MultiIndex::new(IndexRole::R, r.clone()) {
                Ok(r) => r,
                Err(e) => return fail(doc, e),
            };
            match check_partition(sys, cand, part, &r, opts) {
                Ok(out) => {
                    doc.k = Some(out.k.clone());
                    if !out.holds {
                        doc.set_status(Status::Failed);
                    }
                    doc.partition = Some(out);
                }
                Err(e) => return fail(doc, e),
            }
        }
    }
    doc
}

#[derive(Debug, Parser)]
#[command(name = "flatlin", version, about = "Static feedback linearization of flat systems via input prolongations")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Relative degrees K of a candidate.
    Reldeg(CommonArgs),
    /// Structure indices (K, P, s, R, d_diff) and identity checks.
    Analyze(CommonArgs),
    /// Full verification of a candidate flat output.
    Verify(CommonArgs),
    /// Input transformation and minimal prolongations.
    Plan {
        #[command(flatten)]
        common: CommonArgs,
        /// Plan in the file's component order.
        #[arg(long)]
        keep_order: bool,
    },
    /// Partition test for a given R.
    CheckPartition {
        #[command(flatten)]
        common: CommonArgs,
        /// One-based component indices, e.g. `1,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<usize>,
        /// Multi-index R, e.g. `4,3,4`.
        #[arg(long = "R", value_delimiter = ',', required = true, allow_negative_numbers = true)]
        r: Vec<i64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// System file.
    file: PathBuf,
    /// Output candidate name (optional when the file declares one).
    #[arg(long)]
    output: Option<String>,
    /// Sampling seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed, default_value = "0xF1A7")]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Highest derivative order (default 2n+4).
    #[arg(long)]
    max_order: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| e.to_string())
}

fn request_from(sub: Sub) -> (RunRequest, PathBuf, ReportFormat) {
    let (command, common, keep_order, partition, r) = match sub {
        Sub::Reldeg(c) => (Command::Reldeg, c, false, None, None),
        Sub::Analyze(c) => (Command::Analyze, c, false, None, None),
        Sub::Verify(c) => (Command::Verify, c, false, None, None),
        Sub::Plan { common, keep_order } => (Command::Plan, common, keep_order, None, None),
        Sub::CheckPartition { common, partition, r } => {
            (Command::CheckPartition, common, false, Some(partition), Some(r))
        }
    };
    let plan = SamplePlan { seed: common.seed, n_samples: common.samples, tolerance: common.tol, ..SamplePlan::default() };
    let req = RunRequest {
        command,
        output: common.output,
        options: AnalysisOptions { plan, cap: common.max_order },
        // One-based on the command line; zero maps to an out-of-range index.
        partition: partition.map(|p| p.into_iter().map(|j| j.checked_sub(1).unwrap_or(usize::MAX)).collect()),
        r,
        keep_order,
    };
    let format = match common.format {
        FormatArg::Text => ReportFormat::Text,
        FormatArg::Json => ReportFormat::Json,
    };
    (req, common.file, format)
}

fn validate(req: &RunRequest) -> Result<(), Error> {
    let p = &req.options.plan;
    if p.n_samples == 0 {
        return Err(Error::InvalidArgument("--samples must be at least 1".into()));
    }
    if !(p.tolerance.is_finite() && p.tolerance > 0.0) {
        return Err(Error::InvalidArgument("--tol must be a positive number".into()));
    }
    Ok(())
}

fn run_inner(argv: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let (req, path, format) = request_from(cli.command);
    let name = req.command.name();
    if let Err(e) = validate(&req) {
        return (2, render_report(&error_doc(name, &e), format));
    }
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            let err = Error::InvalidArgument(format!("cannot read {}: {e}", path.display()));
            return (2, render_report(&error_doc(name, &err), format));
        }
    };
    let doc = match parse_system_file(&text) {
        Ok(file) => run_on_system(&file, &req),
        Err(e) => error_doc(name, &e),
    };
    (doc.exit_code, render_report(&doc, format))
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code with the rendered report.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> (i32, String) {
    let argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    match catch_unwind(AssertUnwindSafe(|| run_inner(&argv))) {
        Ok(r) => r,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown".into());
            (2, format!("internal error: {msg}\n"))
        }
    }
}
