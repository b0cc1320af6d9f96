use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{depends_on, jacobian_rank};
use crate::symbolic::{Expr, VariableId};
use crate::system::{relative_degrees, DerivativeTable, FlatOutputCandidate, IndexRole, MultiIndex, SystemModel};
use crate::transform::{apply_transformation, InputTransformation};

use super::identities::{three_input_checks, two_input_checks};
use super::{AnalysisOptions, CaseTag, Check};

/// One pass of the procedure for a fixed component order.
#[derive(Debug, Clone)]
pub(crate) struct Pass {
    pub table: DerivativeTable,
    pub k: MultiIndex,
    pub rank_u_k: usize,
    /// `uhat1 = phi1_[k1]` and the table in those coordinates, when the
    /// pivot could be solved.
    pub t1: Option<InputTransformation>,
    pub sys1: Option<Arc<SystemModel>>,
    pub table1: Option<DerivativeTable>,
    /// Three-input data: `(p2, p3)` and the inputs named `u2`, `u3`.
    pub p: Option<(usize, usize)>,
    pub u2: Option<VariableId>,
    pub u3: Option<VariableId>,
}

impl Pass {
    fn diff23(&self) -> Option<(i64, i64)> {
        let (p2, p3) = self.p?;
        Some((p2 as i64 - self.k[1], p3 as i64 - self.k[2]))
    }
}

/// Dependence of `e` on any derivative of the input family of `u`.
fn depends_on_family(e: &Expr, u: &VariableId) -> bool {
    e.free_vars()
        .iter()
        .any(|v| v.kind().family() == u.kind().family() && depends_on(e, v))
}

/// First order at which component `j` depends on one of `inputs`,
/// with the inputs it depends on there.
fn first_dependence(table: &DerivativeTable, j: usize, inputs: &[VariableId]) -> Result<(usize, Vec<VariableId>)> {
    let mut alpha = 0;
    loop {
        let e = table.get(j, alpha)?;
        let deps: Vec<VariableId> = inputs.iter().filter(|u| depends_on_family(&e, u)).cloned().collect();
        if !deps.is_empty() {
            return Ok((alpha, deps));
        }
        alpha += 1;
    }
}

pub(crate) fn run_pass(sys: &Arc<SystemModel>, candidate: &FlatOutputCandidate, opts: &AnalysisOptions) -> Result<Pass> {
    let cap = opts.cap_for(sys.n());
    let table = DerivativeTable::for_candidate(sys.clone(), candidate, cap);
    let k = relative_degrees(&table)?;
    let m = sys.m();
    let top: Vec<Expr> = (0..m).map(|j| table.get(j, k[j] as usize)).collect::<Result<_>>()?;
    let rank_u_k = jacobian_rank(&top, sys.inputs(), &opts.plan)?.rank;

    let uhat1 = VariableId::transformed_input(1);
    let solved = InputTransformation::solve(sys, vec![(uhat1.clone(), top[0].clone())], None, &opts.plan)
        .and_then(|t| apply_transformation(&table, &t).map(|(s, tb)| (t, s, tb)));
    let (t1, sys1, table1) = match solved {
        Ok((t, s, tb)) => (Some(t), Some(s), Some(tb)),
        Err(e) if m == 3 && rank_u_k < 3 => return Err(e),
        Err(_) => (None, None, None),
    };

    let mut pass = Pass {
        table,
        k,
        rank_u_k,
        t1,
        sys1,
        table1,
        p: None,
        u2: None,
        u3: None,
    };
    if m == 3 && rank_u_k < 3 {
        let sys1 = pass.sys1.as_ref().expect("solved above");
        let table1 = pass.table1.as_ref().expect("solved above");
        let remaining: Vec<VariableId> = sys1.inputs().iter().filter(|u| **u != uhat1).cloned().collect();
        let (p2, deps2) = first_dependence(table1, 1, &remaining)?;
        let u2 = deps2[0].clone();
        let u3 = remaining.iter().find(|u| **u != u2).expect("three inputs").clone();
        let (p3, _) = first_dependence(table1, 2, &remaining)?;
        pass.p = Some((p2, p3));
        pass.u2 = Some(u2);
        pass.u3 = Some(u3);
    }
    Ok(pass)
}

/// Smallest `s` with generic rank 2 of `d(phi2_[p2+s], phi3_[p3+s]) / d(u2_[s], u3)`.
pub(crate) fn compute_s(
    table: &DerivativeTable,
    p2: usize,
    p3: usize,
    u2: &VariableId,
    u3: &VariableId,
    opts: &AnalysisOptions,
) -> Result<usize> {
    let mut s = 0;
    loop {
        let rows = [table.get(1, p2 + s)?, table.get(2, p3 + s)?];
        let vars = [u2.with_order(u2.kind().order().unwrap_or(0) + s), u3.clone()];
        if jacobian_rank(&rows, &vars, &opts.plan)?.rank == 2 {
            return Ok(s);
        }
        s += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arrangement {
    /// `permutation[i]` is the original index of arranged component `i`.
    pub permutation: Vec<usize>,
    pub rationale: Vec<String>,
}

pub(crate) fn arrange(
    sys: &Arc<SystemModel>,
    candidate: &FlatOutputCandidate,
    opts: &AnalysisOptions,
) -> Result<(Arrangement, Pass)> {
    let m = sys.m();
    let identity: Vec<usize> = (0..m).collect();
    let mut pass = run_pass(sys, candidate, opts)?;
    let mut rationale = Vec::new();
    let mut perm = identity.clone();
    if let Some((d2, d3)) = pass.diff23() {
        if d2 > d3 {
            rationale.push(format!("p2-k2 = {d2} > p3-k3 = {d3}: swap components 2 and 3"));
            perm = vec![0, 2, 1];
            pass = run_pass(sys, &candidate.rearranged(&perm), opts)?;
        } else if d2 == d3 {
            rationale.push(format!(
                "p2-k2 = p3-k3 = {d2}: swap components 1 and 2, recompute with the original inputs"
            ));
            perm = vec![1, 0, 2];
            pass = run_pass(sys, &candidate.rearranged(&perm), opts)?;
            if let Some((e2, e3)) = pass.diff23() {
                if e2 > e3 {
                    rationale.push(format!("p2-k2 = {e2} > p3-k3 = {e3}: swap components 2 and 3"));
                    perm = vec![1, 2, 0];
                    pass = run_pass(sys, &candidate.rearranged(&perm), opts)?;
                }
            }
        } else {
            rationale.push(format!("p2-k2 = {d2} < p3-k3 = {d3}: order kept"));
        }
    } else if m == 3 {
        rationale.push("decoupling matrix has full rank: order kept".to_string());
    }
    Ok((Arrangement { permutation: perm, rationale }, pass))
}

/// Relabels components so that the arranged structure holds.
pub fn arrange_components(
    sys: &Arc<SystemModel>,
    candidate: &FlatOutputCandidate,
    opts: &AnalysisOptions,
) -> Result<Arrangement> {
    Ok(arrange(sys, candidate, opts)?.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureRow {
    pub order: usize,
    pub cells: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub n: usize,
    pub m: usize,
    pub arrangement: Arrangement,
    /// Relative degrees in the original component order.
    pub k: MultiIndex,
    pub k_arranged: MultiIndex,
    pub rank_u_k: usize,
    /// `(p2, p3)` in arranged order (three inputs only).
    pub p: Option<MultiIndex>,
    pub s: Option<usize>,
    /// `R` in the original component order.
    pub r: MultiIndex,
    pub r_arranged: MultiIndex,
    pub d_diff: i64,
    pub case: CaseTag,
    /// Input naming used by the arranged structure, e.g. `u2 -> u2`.
    pub input_roles: BTreeMap<String, String>,
    pub uhat1: Option<String>,
    pub checks: Vec<Check>,
    pub table: Vec<StructureRow>,
}

impl StructureReport {
    pub fn checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `R - K` in arranged order.
    pub fn differences_arranged(&self) -> MultiIndex {
        &self.r_arranged - &self.k_arranged
    }
}

/// `x` for states; `name`, `name[a]` or `name[a,b]` for input families.
fn classes(e: &Expr) -> String {
    let mut has_state = false;
    let mut families: BTreeMap<(bool, usize), (String, usize, usize)> = BTreeMap::new();
    for v in e.free_vars() {
        if v.is_state() {
            has_state = true;
        } else if let (Some(f), Some(o)) = (v.kind().family(), v.kind().order()) {
            if !depends_on(e, &v) {
                continue;
            }
            let entry = families.entry(f).or_insert((v.base_name().to_string(), o, o));
            entry.1 = entry.1.min(o);
            entry.2 = entry.2.max(o);
        }
    }
    let mut parts = Vec::new();
    if has_state {
        parts.push("x".to_string());
    }
    for (name, lo, hi) in families.into_values() {
        parts.push(match (lo, hi) {
            (0, 0) => name,
            (a, b) if a == b => format!("{name}[{a}]"),
            (a, b) => format!("{name}[{a},{b}]"),
        });
    }
    if parts.is_empty() {
        "const".to_string()
    } else {
        parts.join(" ")
    }
}

fn structure_table(pass: &Pass, r: &MultiIndex) -> Result<Vec<StructureRow>> {
    let table = pass.table1.as_ref().unwrap_or(&pass.table);
    let top = r.values.iter().copied().max().unwrap_or(0).max(0) as usize;
    let top = top.min(table.cap());
    let mut rows = Vec::with_capacity(top + 1);
    for order in 0..=top {
        let cells = (0..pass.k.len())
            .map(|j| table.get(j, order).map(|e| classes(&e)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(StructureRow { order, cells });
    }
    Ok(rows)
}

pub(crate) struct Structure {
    pub report: StructureReport,
    pub pass: Pass,
}

pub(crate) fn analyze(
    sys: &Arc<SystemModel>,
    candidate: &FlatOutputCandidate,
    opts: &AnalysisOptions,
) -> Result<Structure> {
    let (n, m) = (sys.n(), sys.m());
    if !(1..=3).contains(&m) {
        return Err(Error::UnsupportedInputCount(m));
    }
    let candidate = candidate.clone().attach(sys)?;
    let (arrangement, pass) = arrange(sys, &candidate, opts)?;
    let k = &pass.k;
    let ni = n as i64;
    let mut p = None;
    let mut s = None;
    let mut input_roles = BTreeMap::new();
    let (r, case, checks) = match m {
        1 => {
            let r = MultiIndex { role: IndexRole::R, values: vec![ni] };
            let checks = vec![Check::new("R >= K", r.dominates(k), format!("R = {r}, K = {k}"))];
            (r, CaseTag::SingleInput, checks)
        }
        2 => {
            let r = MultiIndex { role: IndexRole::R, values: vec![ni - k[1], ni - k[0]] };
            let mut checks = vec![Check::new("R >= K", r.dominates(k), format!("R = {r}, K = {k}"))];
            checks.extend(two_input_checks(n, k, &r));
            (r, CaseTag::TwoInput, checks)
        }
        _ if pass.rank_u_k == 3 => {
            let r = k.clone().with_role(IndexRole::R);
            let checks = vec![Check::new("R >= K", true, format!("R = K = {k}"))];
            (r, CaseTag::FullRank, checks)
        }
        _ => {
            let (p2, p3) = pass.p.expect("three-input pass");
            let (u2, u3) = (pass.u2.clone().expect("u2"), pass.u3.clone().expect("u3"));
            let table1 = pass.table1.as_ref().expect("table in uhat1 coordinates");
            let sv = compute_s(table1, p2, p3, &u2, &u3, opts)?;
            let (p2i, p3i) = (p2 as i64, p3 as i64);
            let r = MultiIndex {
                role: IndexRole::R,
                values: vec![ni - k[2] - p2i, ni - k[0] - p3i, ni - k[0] - p2i],
            };
            let checks = three_input_checks(n, k, p2i, p3i, sv as i64, &r);
            let d_diff = r.abs() - ni;
            let case = if pass.rank_u_k == 2 {
                CaseTag::RankTwo
            } else if r[0] - k[0] == d_diff {
                CaseTag::CaseI
            } else {
                CaseTag::CaseII
            };
            if let Some(t1) = &pass.t1 {
                input_roles.insert("u1".to_string(), t1.replaced[0].name().to_string());
            }
            input_roles.insert("u2".to_string(), u2.name().to_string());
            input_roles.insert("u3".to_string(), u3.name().to_string());
            p = Some(MultiIndex { role: IndexRole::P, values: vec![p2i, p3i] });
            s = Some(sv);
            (r, case, checks)
        }
    };
    let d_diff = r.abs() - ni;
    let perm = &arrangement.permutation;
    let table = structure_table(&pass, &r)?;
    let report = StructureReport {
        n,
        m,
        k: k.unpermuted(perm),
        k_arranged: k.clone(),
        rank_u_k: pass.rank_u_k,
        p,
        s,
        r: r.unpermuted(perm),
        r_arranged: r,
        d_diff,
        case,
        input_roles,
        uhat1: pass.t1.as_ref().map(|t| t.describe()[0].clone()),
        checks,
        table,
        arrangement,
    };
    Ok(Structure { report, pass })
}

/// Arrangement, indices `K, P, s, R`, `d_diff` and the integer identities.
pub fn structure_analysis(
    sys: &Arc<SystemModel>,
    candidate: &FlatOutputCandidate,
    opts: &AnalysisOptions,
) -> Result<StructureReport> {
    Ok(analyze(sys, candidate, opts)?.report)
}
