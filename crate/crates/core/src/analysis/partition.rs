use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::jacobian_rank;
use crate::symbolic::{Expr, VariableId};
use crate::system::{relative_degrees, DerivativeTable, FlatOutputCandidate, IndexRole, MultiIndex, SystemModel};
use crate::transform::InputTransformation;

use super::plan::{build, finalize, Draft, PlanSummary};
use super::{AnalysisOptions, CaseTag, Check};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOutcome {
    pub holds: bool,
    pub k: MultiIndex,
    pub r: MultiIndex,
    pub checks: Vec<Check>,
    pub plan: Option<PlanSummary>,
}

/// Partition test for general input counts: `phi_1` (the components listed
/// in `partition`, zero-based) with `rank d_u phi_1_[K_1] = m_1`,
/// `R_1 > K_1` and `|R_1| - |K_1| = |R| - n`. When it holds, the plan
/// `uhat_1 = phi_1_[K_1]`, `D = R_1 - K_1` is built and certified.
pub fn check_partition(
    sys: &Arc<SystemModel>,
    candidate: &FlatOutputCandidate,
    partition: &[usize],
    r: &MultiIndex,
    opts: &AnalysisOptions,
) -> Result<PartitionOutcome> {
    let (n, m) = (sys.n(), sys.m());
    let candidate = candidate.clone().attach(sys)?;
    if r.len() != m {
        return Err(Error::InvalidArgument(format!("R has {} entries, expected {m}", r.len())));
    }
    let mut seen = vec![false; m];
    for &j in partition {
        if j >= m || std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidArgument(format!("invalid partition {partition:?}")));
        }
    }
    if partition.is_empty() {
        return Err(Error::EmptySubset);
    }
    let r = MultiIndex::new(IndexRole::R, r.values.clone())?;
    if r.abs() < n as i64 {
        return Err(Error::InconsistentR(format!("|R| = {} < n = {n}", r.abs())));
    }
    let table = DerivativeTable::for_candidate(sys.clone(), &candidate, opts.cap_for(n).max(r.values.iter().copied().max().unwrap_or(0) as usize));
    let mut lower = Vec::new();
    for j in 0..m {
        for a in 0..r[j] as usize {
            lower.push(table.get(j, a)?);
        }
    }
    let mut vars: Vec<VariableId> = sys.states().to_vec();
    let mut extra = std::collections::BTreeSet::new();
    for e in &lower {
        extra.extend(e.free_vars().into_iter().filter(|v| !v.is_state() && !v.is_parameter()));
    }
    vars.extend(extra);
    let rank = jacobian_rank(&lower, &vars, &opts.plan)?.rank;
    if (rank as i64) < r.abs() {
        return Err(Error::InconsistentR(format!("rank d phi_[0,R-1] = {rank} < |R| = {}", r.abs())));
    }

    let k = relative_degrees(&table)?;
    let k1 = MultiIndex { role: IndexRole::K, values: partition.iter().map(|&j| k[j]).collect() };
    let r1 = MultiIndex { role: IndexRole::R, values: partition.iter().map(|&j| r[j]).collect() };
    let tops: Vec<Expr> = partition.iter().map(|&j| table.get(j, k[j] as usize)).collect::<Result<_>>()?;
    let rank1 = jacobian_rank(&tops, sys.inputs(), &opts.plan)?.rank;
    let d_diff = r.abs() - n as i64;
    let mut checks = vec![
        Check::new("rank d_u phi_1_[K_1] = m_1", rank1 == partition.len(), format!("{rank1} vs {}", partition.len())),
        Check::new("R_1 > K_1", r1.strictly_dominates(&k1), format!("R_1 = {r1}, K_1 = {k1}")),
        Check::new(
            "|R_1|-|K_1| = |R|-n",
            r1.abs() - k1.abs() == d_diff,
            format!("{} vs {d_diff}", r1.abs() - k1.abs()),
        ),
    ];
    let mut plan = None;
    if checks.iter().all(|c| c.passed) {
        let defs = tops
            .iter()
            .enumerate()
            .map(|(i, e)| (VariableId::transformed_input(i + 1), e.clone()))
            .collect();
        let t = InputTransformation::solve(sys, defs, None, &opts.plan)?;
        let orders: Vec<(VariableId, i64)> = (0..partition.len())
            .map(|i| (VariableId::transformed_input(i + 1), r1[i] - k1[i]))
            .collect();
        let (system, components, prolonged, d) = build(sys, candidate.components(), &t, &orders)?;
        let draft = Draft {
            case: CaseTag::GeneralM,
            arrangement: (0..m).collect(),
            definitions: t.describe(),
            replaced: t.replaced.iter().map(|v| v.name().to_string()).collect(),
            system,
            components,
            prolonged,
            d,
        };
        match finalize(draft, &r, d_diff, opts) {
            Ok(p) => {
                checks.push(Check::new("extended system is SFL", true, format!("K_ext = {}", p.summary.certificate.k_ext)));
                plan = Some(p.summary);
            }
            Err(Error::NotSfl(msg)) => checks.push(Check::new("extended system is SFL", false, msg)),
            Err(e) => return Err(e),
        }
    }
    Ok(PartitionOutcome { holds: checks.iter().all(|c| c.passed), k, r, checks, plan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::testing::fixture;

    fn r(v: &[i64]) -> MultiIndex {
        MultiIndex { role: IndexRole::R, values: v.to_vec() }
    }

    #[test]
    fn rank_two_partition_holds() {
        let f = fixture("rank2_synthetic");
        let out = check_partition(&f.model, &f.candidates[0], &[0, 1], &r(&[3, 2, 2]), &AnalysisOptions::default())
            .unwrap();
        assert!(out.holds);
        let plan = out.plan.unwrap();
        assert_eq!(plan.d, vec![1, 1]);
        assert!(plan.minimal);
    }

    #[test]
    fn academic_single_component_fails() {
        let f = fixture("academic");
        let out =
            check_partition(&f.model, &f.candidates[0], &[0], &r(&[4, 3, 4]), &AnalysisOptions::default()).unwrap();
        assert!(!out.holds);
        let c = out.checks.iter().find(|c| c.name == "|R_1|-|K_1| = |R|-n").unwrap();
        assert!(!c.passed);
        assert_eq!(c.detail, "3 vs 4");
        assert!(out.plan.is_none());
    }

    #[test]
    fn inconsistent_r() {
        let f = fixture("academic");
        let opts = AnalysisOptions::default();
        let e = check_partition(&f.model, &f.candidates[0], &[0], &r(&[1, 1, 1]), &opts);
        assert!(matches!(e, Err(Error::InconsistentR(_))));
    }

    #[test]
    fn invalid_partitions() {
        let f = fixture("academic");
        let opts = AnalysisOptions::default();
        let c = &f.candidates[0];
        assert!(matches!(check_partition(&f.model, c, &[], &r(&[4, 3, 4]), &opts), Err(Error::EmptySubset)));
        assert!(matches!(
            check_partition(&f.model, c, &[0, 0], &r(&[4, 3, 4]), &opts),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            check_partition(&f.model, c, &[3], &r(&[4, 3, 4]), &opts),
            Err(Error::InvalidArgument(_))
        ));
    }
}
