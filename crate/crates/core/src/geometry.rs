//! Generic-point linear algebra: Jacobian ranks and span inclusion at
//! seeded random sample points.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{self, evaluate, is_zero, partial, Expr, Point, VariableId};

pub const DEFAULT_SEED: u64 = 0xF1A7;
pub const DEFAULT_SAMPLES: usize = 7;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub n_samples: usize,
    pub max_retries: usize,
    pub tolerance: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            seed: DEFAULT_SEED,
            n_samples: DEFAULT_SAMPLES,
            max_retries: symbolic::SAMPLE_MAX_RETRIES,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl SamplePlan {
    pub fn with_seed(seed: u64) -> Self {
        SamplePlan { seed, ..Self::default() }
    }
}

/// Point `index` of the plan's stream.
pub fn sample_point(vars: &[VariableId], plan: &SamplePlan, index: u64) -> Point {
    symbolic::sample_point(vars, plan.seed, index)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankResult {
    pub rank: usize,
    pub samples_used: usize,
    /// Sample point at which the maximal rank was attained.
    pub witness: Option<Point>,
}

/// Symbolic Jacobian `d exprs / d vars`, row-major.
pub fn jacobian(exprs: &[Expr], vars: &[VariableId]) -> Vec<Vec<Expr>> {
    exprs
        .iter()
        .map(|e| {
            let fv = e.free_vars();
            vars.iter()
                .map(|v| if fv.contains(v) { partial(e, v) } else { Expr::zero() })
                .collect()
        })
        .collect()
}

/// Evaluates the Jacobian at successive sample points, calling `visit`
/// for each successfully evaluated matrix.
fn for_each_sample(
    matrices: &[&[Vec<Expr>]],
    plan: &SamplePlan,
    mut visit: impl FnMut(&Point, Vec<Vec<Vec<f64>>>),
) -> Result<usize> {
    let mut vars = BTreeSet::new();
    for m in matrices {
        for row in m.iter() {
            for e in row {
                vars.extend(e.free_vars());
            }
        }
    }
    let vars: Vec<VariableId> = vars.into_iter().collect();
    let mut accepted = 0;
    let mut failures = 0;
    let mut index = 0u64;
    'samples: while accepted < plan.n_samples.max(1) {
        let point = sample_point(&vars, plan, index);
        index += 1;
        let mut values = Vec::with_capacity(matrices.len());
        for m in matrices {
            let mut rows = Vec::with_capacity(m.len());
            for row in m.iter() {
                let mut r = Vec::with_capacity(row.len());
                for e in row {
                    match evaluate(e, &point) {
                        Ok(v) => r.push(v),
                        Err(_) => {
                            failures += 1;
                            if failures > plan.max_retries {
                                return Err(Error::SamplingExhausted(plan.max_retries));
                            }
                            continue 'samples;
                        }
                    }
                }
                rows.push(r);
            }
            values.push(rows);
        }
        failures = 0;
        accepted += 1;
        visit(&point, values);
    }
    Ok(accepted)
}

/// Numeric rank via Gaussian elimination with complete pivoting. A pivot
/// is accepted when it exceeds `tol * max(1, largest initial row norm)`.
pub fn numeric_rank(matrix: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(1.0_f64, f64::max);
    let threshold = tol * scale;
    let mut rank = 0;
    while rank < rows.min(cols) {
        let (mut pi, mut pj, mut best) = (rank, rank, 0.0);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, v) in row.iter().enumerate().skip(rank) {
                if v.abs() > best {
                    (pi, pj, best) = (i, j, v.abs());
                }
            }
        }
        if best <= threshold {
            break;
        }
        a.swap(rank, pi);
        for row in a.iter_mut() {
            row.swap(rank, pj);
        }
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[rank] / pivot_row[rank];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(rank) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Generic rank of `d exprs / d vars`: the maximum over the plan's samples.
pub fn jacobian_rank(exprs: &[Expr], vars: &[VariableId], plan: &SamplePlan) -> Result<RankResult> {
    if exprs.is_empty() || vars.is_empty() {
        return Ok(RankResult { rank: 0, samples_used: 0, witness: None });
    }
    let jac = jacobian(exprs, vars);
    let mut best: Option<(usize, Point)> = None;
    let used = for_each_sample(&[&jac], plan, |point, values| {
        let r = numeric_rank(&values[0], plan.tolerance);
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, point.clone()));
        }
    })?;
    let (rank, witness) = best.map_or((0, None), |(r, p)| (r, Some(p)));
    Ok(RankResult { rank, samples_used: used, witness })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanEvidence {
    pub included: bool,
    pub rank_b: usize,
    pub rank_ab: usize,
    pub witness: Option<Point>,
}

/// Compares the generic ranks of `J_B` and `J_B` stacked with `J_A`.
pub fn span_inclusion(
    a: &[Expr],
    b: &[Expr],
    vars: &[VariableId],
    plan: &SamplePlan,
) -> Result<SpanEvidence> {
    let jb = jacobian(b, vars);
    let ja = jacobian(a, vars);
    let mut best_b = 0;
    let mut best_ab: Option<(usize, Point)> = None;
    for_each_sample(&[&jb, &ja], plan, |point, values| {
        let rb = numeric_rank(&values[0], plan.tolerance);
        let mut stacked = values[0].clone();
        stacked.extend(values[1].iter().cloned());
        let rab = if stacked.is_empty() || vars.is_empty() {
            0
        } else {
            numeric_rank(&stacked, plan.tolerance)
        };
        best_b = best_b.max(rb);
        if best_ab.as_ref().is_none_or(|(r, _)| rab > *r) {
            best_ab = Some((rab, point.clone()));
        }
    })?;
    let (rank_ab, witness) = best_ab.map_or((0, None), |(r, p)| (r, Some(p)));
    Ok(SpanEvidence { included: rank_ab == best_b, rank_b: best_b, rank_ab, witness })
}

/// `span{dA} ⊆ span{dB}` over `vars`, at generic points.
pub fn span_included(a: &[Expr], b: &[Expr], vars: &[VariableId], plan: &SamplePlan) -> Result<bool> {
    Ok(span_inclusion(a, b, vars, plan)?.included)
}

/// Explicit dependence of `e` on `v`.
pub fn depends_on(e: &Expr, v: &VariableId) -> bool {
    e.free_vars().contains(v) && !is_zero(&partial(e, v))
}

/// Mean of `|e|` over the plan's samples; used to rank pivot candidates.
pub fn mean_abs(e: &Expr, plan: &SamplePlan) -> Result<f64> {
    let m = [vec![e.clone()]];
    let mut total = 0.0;
    let used = for_each_sample(&[&m], plan, |_, values| total += values[0][0][0].abs())?;
    Ok(total / used as f64)
}
