use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{jacobian_rank, span_inclusion};
use crate::symbolic::{Expr, VariableId};
use crate::system::{FlatOutputCandidate, SystemModel};

use super::structure::analyze;
use super::{named_point, AnalysisOptions, StructureReport, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub structure: Option<StructureReport>,
    /// Step of the procedure at which the candidate was refuted.
    pub failing_step: Option<u8>,
    /// Generic rank of `d phi_[0,R-1]` and the target `|R|`.
    pub rank_phi: Option<usize>,
    pub abs_r: Option<i64>,
    /// `span{dx} ⊆ span{d phi_[0,R-1]}`.
    pub states_in_span: Option<bool>,
    pub missing_states: Vec<String>,
    /// `span{du} ⊆ span{d phi_[0,R]}`; reported, not part of the verdict.
    pub inputs_recoverable: Option<bool>,
    pub witness: Option<BTreeMap<String, f64>>,
    pub message: Option<String>,
}

impl VerificationReport {
    fn inconclusive(message: String, structure: Option<StructureReport>) -> Self {
        VerificationReport {
            verdict: Verdict::Inconclusive,
            structure,
            failing_step: None,
            rank_phi: None,
            abs_r: None,
            states_in_span: None,
            missing_states: Vec::new(),
            inputs_recoverable: None,
            witness: None,
            message: Some(message),
        }
    }
}

/// Variables of `exprs` together with the given ones, states first.
fn jet_vars(sys: &SystemModel, exprs: &[Expr], extra: &[VariableId]) -> Vec<VariableId> {
    let mut others: BTreeSet<VariableId> = extra.iter().cloned().collect();
    for e in exprs {
        others.extend(e.free_vars().into_iter().filter(|v| !v.is_parameter()));
    }
    let mut vars: Vec<VariableId> = sys.states().to_vec();
    vars.extend(others.into_iter().filter(|v| !sys.states().contains(v)));
    vars
}

/// Runs the verification procedure. Three-input candidates follow the
/// full procedure; two-input candidates use `R = (n-k2, n-k1)`;
/// single-input candidates use `R = (n)`.
pub fn verify_candidate(
    sys: &Arc<SystemModel>,
    candidate: &FlatOutputCandidate,
    opts: &AnalysisOptions,
) -> Result<VerificationReport> {
    let structure = match analyze(sys, candidate, opts) {
        Ok(s) => s,
        Err(e) if e.is_inconclusive() => return Ok(VerificationReport::inconclusive(e.to_string(), None)),
        Err(e) => return Err(e),
    };
    match finish(sys, &structure, opts) {
        Ok(r) => Ok(r),
        Err(e) if e.is_inconclusive() => {
            Ok(VerificationReport::inconclusive(e.to_string(), Some(structure.report)))
        }
        Err(e) => Err(e),
    }
}

fn finish(
    sys: &Arc<SystemModel>,
    structure: &super::structure::Structure,
    opts: &AnalysisOptions,
) -> Result<VerificationReport> {
    let report = &structure.report;
    let pass = &structure.pass;
    let mut out = VerificationReport {
        verdict: Verdict::Verified,
        structure: Some(report.clone()),
        failing_step: None,
        rank_phi: None,
        abs_r: Some(report.r_arranged.abs()),
        states_in_span: None,
        missing_states: Vec::new(),
        inputs_recoverable: None,
        witness: None,
        message: None,
    };

    // Integer consistency of the indices; a negative differential
    // difference is left to the span test, which then names the states.
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| !c.passed && c.name != "d_diff >= 0")
        .map(|c| c.name.as_str())
        .collect();
    if !failed.is_empty() {
        out.verdict = Verdict::Refuted;
        out.failing_step = Some(7);
        out.message = Some(format!("index checks failed: {}", failed.join(", ")));
        return Ok(out);
    }

    let r = &report.r_arranged;
    let mut b = Vec::new();
    for j in 0..r.len() {
        for a in 0..r[j].max(0) as usize {
            b.push(pass.table.get(j, a)?);
        }
    }
    let vars = jet_vars(sys, &b, &[]);
    let rank = jacobian_rank(&b, &vars, &opts.plan)?;
    out.rank_phi = Some(rank.rank);
    let states: Vec<Expr> = sys.states().iter().map(Expr::var).collect();
    let span = span_inclusion(&states, &b, &vars, &opts.plan)?;
    out.states_in_span = Some(span.included);
    out.witness = span.witness.as_ref().map(named_point);
    if !span.included {
        for x in sys.states() {
            if !span_inclusion(&[Expr::var(x)], &b, &vars, &opts.plan)?.included {
                out.missing_states.push(x.name().to_string());
            }
        }
    }

    let mut top = b.clone();
    for j in 0..r.len() {
        top.push(pass.table.get(j, r[j].max(0) as usize)?);
    }
    let vars_top = jet_vars(sys, &top, sys.inputs());
    let inputs: Vec<Expr> = sys.inputs().iter().map(Expr::var).collect();
    out.inputs_recoverable = Some(span_inclusion(&inputs, &top, &vars_top, &opts.plan)?.included);

    let independent = rank.rank as i64 == r.abs();
    if !(independent && span.included) {
        out.verdict = Verdict::Refuted;
        out.failing_step = Some(8);
        let mut reasons = Vec::new();
        if !independent {
            reasons.push(format!("rank d phi_[0,R-1] = {} < |R| = {}", rank.rank, r.abs()));
        }
        if !span.included {
            reasons.push(format!("states not reconstructed: {}", out.missing_states.join(", ")));
        }
        out.message = Some(reasons.join("; "));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::testing::fixture;
    use crate::format::parse_system_file;

    #[test]
    fn bad_candidate_fails_at_step_8() {
        let f = fixture("example3_I");
        let rep = verify_candidate(&f.model, f.candidate("bad_candidate").unwrap(), &AnalysisOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Refuted);
        assert_eq!(rep.failing_step, Some(8));
        assert_eq!(rep.missing_states, vec!["x3".to_string()]);
    }

    #[test]
    fn corpus_verifies() {
        for name in ["academic", "example1", "example3_I", "example3_II", "two_input_chain", "rank2_synthetic"] {
            let f = fixture(name);
            let rep = verify_candidate(&f.model, f.candidate("y").unwrap(), &AnalysisOptions::default()).unwrap();
            assert_eq!(rep.verdict, Verdict::Verified, "{name}: {:?}", rep.message);
            assert_eq!(rep.rank_phi.map(|r| r as i64), rep.abs_r, "{name}");
            assert_eq!(rep.states_in_span, Some(true));
        }
    }

    #[test]
    fn low_cap_is_inconclusive() {
        let f = fixture("academic");
        let opts = AnalysisOptions { cap: Some(2), ..AnalysisOptions::default() };
        let rep = verify_candidate(&f.model, f.candidate("y").unwrap(), &opts).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn single_input_chain() {
        let f = parse_system_file("states x1 x2 x3\ninputs u\ndyn x1' = x2\ndyn x2' = x3\ndyn x3' = u\noutput y = x1\n").unwrap();
        let rep = verify_candidate(&f.model, &f.candidates[0], &AnalysisOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Verified);
        assert_eq!(rep.structure.unwrap().r.values, vec![3]);
    }

    #[test]
    fn too_many_inputs() {
        let f = parse_system_file(
            "states x1 x2 x3 x4\ninputs u1 u2 u3 u4\ndyn x1' = u1\ndyn x2' = u2\ndyn x3' = u3\ndyn x4' = u4\noutput y = x1; x2; x3; x4\n",
        )
        .unwrap();
        let r = verify_candidate(&f.model, &f.candidates[0], &AnalysisOptions::default());
        assert!(matches!(r, Err(crate::Error::UnsupportedInputCount(4))));
    }
}
