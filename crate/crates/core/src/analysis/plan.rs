use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::jacobian_rank;
use crate::symbolic::{Expr, VariableId};
use crate::system::{DerivativeTable, FlatOutputCandidate, MultiIndex, SystemModel};
use crate::transform::{apply_transformation, prolong, transform_system, InputTransformation, Rewriter};

use super::structure::{compute_s, run_pass};
use super::{check_sfl, AnalysisOptions, CaseTag, SflCertificate, Verdict, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanOptions {
    /// Plan in the given component order instead of the verified arrangement.
    pub keep_order: bool,
    /// In case ii, try the relabeling `uhat2 = u2` before the construction
    /// `uhat2 = phi2_[p2]` on the `uhat1`-extended system.
    pub identity_case_ii: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions { keep_order: false, identity_case_ii: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub case: CaseTag,
    pub arrangement: Vec<usize>,
    /// `uhat<j> = <expr>` lines, each over the variables of the system it
    /// was applied to.
    pub definitions: Vec<String>,
    pub replaced: Vec<String>,
    pub prolonged: Vec<String>,
    pub d: Vec<i64>,
    pub abs_d: i64,
    pub d_diff: i64,
    pub extended_states: Vec<String>,
    pub extended_inputs: Vec<String>,
    pub lineage: Vec<String>,
    pub certificate: SflCertificate,
    /// `K_ext = R` and `|D| = d_diff`.
    pub minimal: bool,
}

#[derive(Debug, Clone)]
pub struct ProlongationPlan {
    pub summary: PlanSummary,
    pub extended: Arc<SystemModel>,
    /// Candidate components over the extended system.
    pub components: Vec<Expr>,
}

pub(crate) struct Draft {
    pub case: CaseTag,
    pub arrangement: Vec<usize>,
    pub definitions: Vec<String>,
    pub replaced: Vec<String>,
    pub system: Arc<SystemModel>,
    pub components: Vec<Expr>,
    pub prolonged: Vec<String>,
    pub d: Vec<i64>,
}

/// Extended system, rewritten components, prolonged input names, orders.
pub(crate) type Built = (Arc<SystemModel>, Vec<Expr>, Vec<String>, Vec<i64>);

/// Transforms, rewrites the components and prolongs the listed new inputs
/// (zero orders are dropped).
pub(crate) fn build(
    sys: &SystemModel,
    components: &[Expr],
    t: &InputTransformation,
    subset: &[(VariableId, i64)],
) -> Result<Built> {
    let sys_t = Arc::new(transform_system(sys, t)?);
    let mut rw = Rewriter::new(&sys_t, t);
    let comps = components.iter().map(|c| rw.rewrite(c)).collect::<Result<Vec<_>>>()?;
    let kept: Vec<&(VariableId, i64)> = subset.iter().filter(|(_, d)| *d > 0).collect();
    if kept.is_empty() {
        return Ok((sys_t, comps, Vec::new(), Vec::new()));
    }
    let vars: Vec<VariableId> = kept.iter().map(|(v, _)| v.clone()).collect();
    let orders: Vec<usize> = kept.iter().map(|(_, d)| *d as usize).collect();
    let ext = prolong(sys_t, &vars, &orders)?;
    let names = vars.iter().map(|v| v.name().to_string()).collect();
    Ok((ext.system, comps, names, orders.iter().map(|&d| d as i64).collect()))
}

pub(crate) fn finalize(
    draft: Draft,
    r: &MultiIndex,
    d_diff: i64,
    opts: &AnalysisOptions,
) -> Result<ProlongationPlan> {
    let cert = check_sfl(&draft.system, &draft.components, Some(r), opts)?;
    let abs_d: i64 = draft.d.iter().sum();
    let minimal = cert.k_ext_equals_r == Some(true) && abs_d == d_diff;
    let summary = PlanSummary {
        case: draft.case,
        arrangement: draft.arrangement,
        definitions: draft.definitions,
        replaced: draft.replaced,
        prolonged: draft.prolonged,
        d: draft.d,
        abs_d,
        d_diff,
        extended_states: draft.system.states().iter().map(|v| v.name().to_string()).collect(),
        extended_inputs: draft.system.inputs().iter().map(|v| v.name().to_string()).collect(),
        lineage: draft.system.lineage().to_vec(),
        certificate: cert,
        minimal,
    };
    Ok(ProlongationPlan { summary, extended: draft.system, components: draft.components })
}

fn names(vs: &[VariableId]) -> Vec<String> {
    vs.iter().map(|v| v.name().to_string()).collect()
}

fn uhat(i: usize) -> VariableId {
    VariableId::transformed_input(i)
}

/// Plans the input transformation and prolongation orders that render the
/// system SFL with respect to a verified candidate, and certifies the
/// result on the extended system.
pub fn plan_minimal_prolongations(
    sys: &Arc<SystemModel>,
    candidate: &FlatOutputCandidate,
    report: &VerificationReport,
    popts: &PlanOptions,
    opts: &AnalysisOptions,
) -> Result<ProlongationPlan> {
    if report.verdict != Verdict::Verified {
        return Err(Error::InvalidArgument("planning requires a verified candidate".into()));
    }
    let st = report
        .structure
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("report carries no structure".into()))?;
    let m = sys.m();
    let mut arr: Vec<usize> = if popts.keep_order { (0..m).collect() } else { st.arrangement.permutation.clone() };
    let d_diff = st.d_diff;
    let mut r = st.r.permuted(&arr);
    let mut k = st.k.permuted(&arr);
    let mut diffs = &r - &k;
    if m == 3 && diffs[0] < diffs[1] && diffs[1] == diffs[2] {
        return Err(Error::ArrangementViolation(format!(
            "r1-k1 = {} is smaller than r2-k2 = r3-k3 = {}; with this ordering no input \
             transformation leads to minimal prolongations, relabel the components first",
            diffs[0], diffs[1]
        )));
    }
    let base = candidate.clone().attach(sys)?;
    let mut cand = base.rearranged(&arr);
    let cap = opts.cap_for(sys.n());
    let table = DerivativeTable::for_candidate(sys.clone(), &cand, cap);
    let top = |table: &DerivativeTable, k: &MultiIndex, j: usize| table.get(j, k[j] as usize);

    if d_diff == 0 {
        let draft = Draft {
            case: st.case,
            arrangement: arr,
            definitions: Vec::new(),
            replaced: Vec::new(),
            system: sys.clone(),
            components: cand.components().to_vec(),
            prolonged: Vec::new(),
            d: Vec::new(),
        };
        return finalize(draft, &r, d_diff, opts);
    }

    if m == 2 {
        let mut last = None;
        for j in 0..2 {
            let t = InputTransformation::solve(sys, vec![(uhat(1), top(&table, &k, j)?)], None, &opts.plan)?;
            let (system, components, prolonged, d) = build(sys, cand.components(), &t, &[(uhat(1), d_diff)])?;
            let draft = Draft {
                case: CaseTag::TwoInput,
                arrangement: arr.clone(),
                definitions: t.describe(),
                replaced: names(&t.replaced),
                system,
                components,
                prolonged,
                d,
            };
            match finalize(draft, &r, d_diff, opts) {
                Ok(p) => return Ok(p),
                Err(e) => last = Some(e),
            }
        }
        return Err(last.expect("two attempts"));
    }
    if m != 3 {
        return Err(Error::UnsupportedInputCount(m));
    }

    if st.rank_u_k == 2 {
        let pair = [top(&table, &k, 0)?, top(&table, &k, 1)?];
        let mut table = table;
        if jacobian_rank(&pair, sys.inputs(), &opts.plan)?.rank < 2 && diffs[1] == diffs[2] {
            arr.swap(1, 2);
            cand = base.rearranged(&arr);
            r = st.r.permuted(&arr);
            k = st.k.permuted(&arr);
            diffs = &r - &k;
            table = DerivativeTable::for_candidate(sys.clone(), &cand, cap);
        }
        let defs = vec![(uhat(1), top(&table, &k, 0)?), (uhat(2), top(&table, &k, 1)?)];
        let t = InputTransformation::solve(sys, defs, None, &opts.plan)?;
        let (system, components, prolonged, d) =
            build(sys, cand.components(), &t, &[(uhat(1), diffs[0]), (uhat(2), diffs[1])])?;
        let draft = Draft {
            case: CaseTag::RankTwo,
            arrangement: arr,
            definitions: t.describe(),
            replaced: names(&t.replaced),
            system,
            components,
            prolonged,
            d,
        };
        return finalize(draft, &r, d_diff, opts);
    }

    if diffs[0] == d_diff {
        let t = InputTransformation::solve(sys, vec![(uhat(1), top(&table, &k, 0)?)], None, &opts.plan)?;
        let (system, components, prolonged, d) = build(sys, cand.components(), &t, &[(uhat(1), d_diff)])?;
        let draft = Draft {
            case: CaseTag::CaseI,
            arrangement: arr,
            definitions: t.describe(),
            replaced: names(&t.replaced),
            system,
            components,
            prolonged,
            d,
        };
        return finalize(draft, &r, d_diff, opts);
    }

    plan_case_ii(sys, &cand, arr, &k, &r, d_diff, popts, opts)
}

#[allow(clippy::too_many_arguments)]
fn plan_case_ii(
    sys: &Arc<SystemModel>,
    cand: &FlatOutputCandidate,
    arr: Vec<usize>,
    k: &MultiIndex,
    r: &MultiIndex,
    d_diff: i64,
    popts: &PlanOptions,
    opts: &AnalysisOptions,
) -> Result<ProlongationPlan> {
    let pass = run_pass(sys, cand, opts)?;
    let (p2, p3) = pass.p.ok_or_else(|| Error::CaseIIConstructionFailed("no three-input structure".into()))?;
    let (u2, u3) = (pass.u2.clone().expect("u2"), pass.u3.clone().expect("u3"));
    let t1 = pass.t1.clone().expect("uhat1 transformation");
    let sys1 = pass.sys1.clone().expect("uhat1 system");
    let table1 = pass.table1.as_ref().expect("uhat1 table");
    let d1 = r[0] - k[0];
    let q = r[1] - p2 as i64;
    let s = compute_s(table1, p2, p3, &u2, &u3, opts)?;

    if popts.identity_case_ii && s as i64 == q {
        let defs = vec![(uhat(1), t1.definitions[0].1.clone()), (uhat(2), Expr::var(&u2))];
        let pivots = [t1.replaced[0].clone(), u2.clone()];
        let t = InputTransformation::solve(sys, defs, Some(&pivots), &opts.plan)?;
        let (system, components, prolonged, d) =
            build(sys, cand.components(), &t, &[(uhat(1), d1), (uhat(2), q)])?;
        let draft = Draft {
            case: CaseTag::CaseII,
            arrangement: arr.clone(),
            definitions: t.describe(),
            replaced: names(&t.replaced),
            system,
            components,
            prolonged,
            d,
        };
        if let Ok(plan) = finalize(draft, r, d_diff, opts) {
            return Ok(plan);
        }
    }

    // uhat2 = phi2_[p2], static on the uhat1-extended system.
    let fail = |e: Error| Error::CaseIIConstructionFailed(e.to_string());
    let comps1: Vec<Expr> = (0..3).map(|j| table1.get(j, 0)).collect::<Result<_>>()?;
    let (sys_e1, mut prolonged, mut d) = if d1 > 0 {
        let ext = prolong(sys1.clone(), &[uhat(1)], &[d1 as usize])?;
        (ext.system, vec![uhat(1).name().to_string()], vec![d1])
    } else {
        (sys1.clone(), Vec::new(), Vec::new())
    };
    let cap = opts.cap_for(sys_e1.n());
    let table_e1 = DerivativeTable::new(sys_e1.clone(), &comps1, cap);
    let phi2 = table_e1.get(1, p2)?;
    let t2 = InputTransformation::solve(&sys_e1, vec![(uhat(2), phi2)], Some(std::slice::from_ref(&u2)), &opts.plan)
        .map_err(fail)?;
    let (sys2, table2) = apply_transformation(&table_e1, &t2)?;
    let s2 = compute_s(&table2, p2, p3, &uhat(2), &u3, opts).map_err(fail)?;
    if s2 as i64 != q {
        return Err(Error::CaseIIConstructionFailed(format!(
            "with {} the offset s is {s2}, but r2-p2 = {q}",
            t2.describe()[0]
        )));
    }
    let comps2: Vec<Expr> = (0..3).map(|j| table2.get(j, 0)).collect::<Result<_>>()?;
    let system = if q > 0 {
        prolonged.push(uhat(2).name().to_string());
        d.push(q);
        prolong(sys2, &[uhat(2)], &[q as usize])?.system
    } else {
        sys2
    };
    let mut definitions = t1.describe();
    definitions.extend(t2.describe());
    let mut replaced = names(&t1.replaced);
    replaced.extend(names(&t2.replaced));
    let draft = Draft {
        case: CaseTag::CaseII,
        arrangement: arr,
        definitions,
        replaced,
        system,
        components: comps2,
        prolonged,
        d,
    };
    finalize(draft, r, d_diff, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::testing::fixture;
    use crate::analysis::verify_candidate;

    fn plan_with(name: &str, popts: PlanOptions) -> Result<ProlongationPlan> {
        let f = fixture(name);
        let opts = AnalysisOptions::default();
        let cand = f.candidate("y").unwrap();
        let rep = verify_candidate(&f.model, cand, &opts)?;
        plan_minimal_prolongations(&f.model, cand, &rep, &popts, &opts)
    }

    #[test]
    fn academic_case_ii() {
        let p = plan_with("academic", PlanOptions::default()).unwrap().summary;
        assert_eq!(p.case, CaseTag::CaseII);
        assert_eq!(p.definitions, vec!["uhat1 = x3 + x4*u1", "uhat2 = u2"]);
        assert_eq!(p.d, vec![3, 1]);
        assert_eq!(p.certificate.k_ext.values, vec![4, 3, 4]);
        assert_eq!(p.certificate.sum_k_ext, 11);
        assert!(p.minimal);
    }

    #[test]
    fn academic_without_identity_shortcut() {
        let popts = PlanOptions { identity_case_ii: false, ..PlanOptions::default() };
        let p = plan_with("academic", popts).unwrap().summary;
        assert_eq!(p.d, vec![3, 1]);
        assert!(p.minimal);
    }

    #[test]
    fn example1_case_i() {
        let p = plan_with("example1", PlanOptions::default()).unwrap().summary;
        assert_eq!(p.case, CaseTag::CaseI);
        assert_eq!(p.definitions, vec!["uhat1 = x3 + u1"]);
        assert_eq!(p.d, vec![2]);
        assert_eq!(p.arrangement, vec![1, 0, 2]);
        assert!(p.minimal);
    }

    #[test]
    fn example1_original_order_refused() {
        let popts = PlanOptions { keep_order: true, ..PlanOptions::default() };
        match plan_with("example1", popts) {
            Err(Error::ArrangementViolation(msg)) => assert!(msg.contains("r1-k1 = 1")),
            other => panic!("{:?}", other.map(|p| p.summary)),
        }
    }

    #[test]
    fn extended_system_dimensions() {
        let p = plan_with("academic", PlanOptions::default()).unwrap();
        assert_eq!(p.extended.n(), 11);
        assert_eq!(p.extended.m(), 3);
        assert_eq!(p.summary.extended_states.len(), 11);
    }

    #[test]
    fn refuted_report_is_rejected() {
        let f = fixture("example3_I");
        let opts = AnalysisOptions::default();
        let cand = f.candidate("bad_candidate").unwrap();
        let rep = verify_candidate(&f.model, cand, &opts).unwrap();
        let r = plan_minimal_prolongations(&f.model, cand, &rep, &PlanOptions::default(), &opts);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }
}
