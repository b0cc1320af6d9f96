//! Static input transformations and prolongations.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{depends_on, jacobian_rank, mean_abs, SamplePlan};
use crate::symbolic::{is_zero, normalize, partial, substitute, Expr, VariableId};
use crate::system::{total_derivative, DerivativeTable, IndexRole, MultiIndex, Provenance, SystemModel};

/// `uhat^j = Phi^j(x, u)` for a subset of the inputs; the remaining
/// inputs are kept as they are.
#[derive(Debug, Clone)]
pub struct InputTransformation {
    /// New input variables with their definitions over the source system.
    pub definitions: Vec<(VariableId, Expr)>,
    /// Input replaced by each definition, in the same order.
    pub replaced: Vec<VariableId>,
    /// Replaced inputs in terms of states, new inputs and untouched inputs.
    pub inverse: BTreeMap<VariableId, Expr>,
}

/// Solves `uhat = a + b * pivot` for the pivot.
pub fn solve_affine_pivot(phi: &Expr, pivot: &VariableId, uhat: &VariableId) -> Result<Expr> {
    let b = partial(phi, pivot);
    if is_zero(&b) {
        return Err(Error::ZeroPivotCoefficient { expr: phi.to_string(), pivot: pivot.to_string() });
    }
    if depends_on(&b, pivot) {
        return Err(Error::NotAffineInPivot { expr: phi.to_string(), pivot: pivot.to_string() });
    }
    let a = normalize(&(phi.clone() - b.clone() * Expr::var(pivot)));
    Ok(normalize(&((Expr::var(uhat) - a) / b)))
}

impl InputTransformation {
    /// Builds the transformation by sequential affine pivoting. Pivots may
    /// be prescribed per definition; otherwise the eligible input with the
    /// largest mean coefficient magnitude is used, ties to the lowest index.
    pub fn solve(
        sys: &SystemModel,
        definitions: Vec<(VariableId, Expr)>,
        pivots: Option<&[VariableId]>,
        plan: &SamplePlan,
    ) -> Result<Self> {
        let mut replaced: Vec<VariableId> = Vec::new();
        let mut inverse: BTreeMap<VariableId, Expr> = BTreeMap::new();
        for (i, (uhat, phi)) in definitions.iter().enumerate() {
            let phi = substitute(phi, &inverse)?;
            let pivot = match pivots {
                Some(p) => p[i].clone(),
                None => choose_pivot(sys, &phi, &replaced, plan)?,
            };
            if sys.input_index(&pivot).is_none() {
                return Err(Error::NotAnInput(pivot.to_string()));
            }
            let g = solve_affine_pivot(&phi, &pivot, uhat)?;
            let step = BTreeMap::from([(pivot.clone(), g.clone())]);
            for v in inverse.values_mut() {
                *v = substitute(v, &step)?;
            }
            inverse.insert(pivot.clone(), g);
            replaced.push(pivot);
        }
        Ok(InputTransformation { definitions, replaced, inverse })
    }

    /// Relabeling `uhat^j = u^j` of a single input.
    pub fn identity(input: &VariableId, uhat: VariableId) -> Self {
        InputTransformation {
            definitions: vec![(uhat.clone(), Expr::var(input))],
            replaced: vec![input.clone()],
            inverse: BTreeMap::from([(input.clone(), Expr::var(&uhat))]),
        }
    }

    pub fn new_inputs(&self) -> impl Iterator<Item = &VariableId> {
        self.definitions.iter().map(|(v, _)| v)
    }

    /// `uhat1 = <expr>` lines.
    pub fn describe(&self) -> Vec<String> {
        self.definitions.iter().map(|(v, e)| format!("{v} = {e}")).collect()
    }

    /// Definitions followed by identities for the untouched inputs.
    pub fn full_map(&self, sys: &SystemModel) -> Vec<Expr> {
        let mut out: Vec<Expr> = self.definitions.iter().map(|(_, e)| e.clone()).collect();
        out.extend(sys.inputs().iter().filter(|u| !self.replaced.contains(u)).map(Expr::var));
        out
    }
}

fn choose_pivot(
    sys: &SystemModel,
    phi: &Expr,
    taken: &[VariableId],
    plan: &SamplePlan,
) -> Result<VariableId> {
    let mut best: Option<(f64, VariableId)> = None;
    let mut nonaffine = None;
    for u in sys.inputs().iter().filter(|u| !taken.contains(u)) {
        if !depends_on(phi, u) {
            continue;
        }
        let b = partial(phi, u);
        if depends_on(&b, u) {
            nonaffine.get_or_insert_with(|| u.clone());
            continue;
        }
        let score = mean_abs(&b, plan)?;
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, u.clone()));
        }
    }
    match (best, nonaffine) {
        (Some((_, u)), _) => Ok(u),
        (None, Some(u)) => Err(Error::NotAffineInPivot { expr: phi.to_string(), pivot: u.to_string() }),
        (None, None) => Err(Error::InvertibilityFailure(format!("`{phi}` depends on no free input"))),
    }
}

/// Generic rank of `d defs / d u` equals the input count.
pub fn check_invertible_map(defs: &[Expr], sys: &SystemModel, plan: &SamplePlan) -> Result<bool> {
    Ok(defs.len() == sys.m() && jacobian_rank(defs, sys.inputs(), plan)?.rank == sys.m())
}

pub fn check_invertible(t: &InputTransformation, sys: &SystemModel, plan: &SamplePlan) -> Result<bool> {
    check_invertible_map(&t.full_map(sys), sys, plan)
}

/// Rewrites expressions of the source system into the coordinates of a
/// transformed system. Derivatives `u_[b]` of replaced inputs become the
/// `b`-th total derivative of the inverse binding.
pub struct Rewriter<'a> {
    target: &'a SystemModel,
    t: &'a InputTransformation,
    derivatives: BTreeMap<VariableId, Vec<Expr>>,
}

impl<'a> Rewriter<'a> {
    pub fn new(target: &'a SystemModel, t: &'a InputTransformation) -> Self {
        let derivatives = t.inverse.iter().map(|(u, g)| (u.clone(), vec![g.clone()])).collect();
        Rewriter { target, t, derivatives }
    }

    fn binding(&mut self, v: &VariableId) -> Result<Option<Expr>> {
        let Some((family, order)) = v.kind().family().zip(v.kind().order()) else {
            return Ok(None);
        };
        let Some(u) = self.t.replaced.iter().find(|u| u.kind().family() == Some(family)) else {
            return Ok(None);
        };
        let base = u.kind().order().expect("input-like");
        if order < base {
            return Ok(None);
        }
        let row = self.derivatives.get_mut(u).expect("inverse present");
        while row.len() <= order - base {
            let next = total_derivative(row.last().expect("nonempty"), self.target)?;
            row.push(next);
        }
        Ok(Some(row[order - base].clone()))
    }

    pub fn rewrite(&mut self, e: &Expr) -> Result<Expr> {
        let mut bindings = BTreeMap::new();
        for v in e.free_vars() {
            if let Some(b) = self.binding(&v)? {
                bindings.insert(v, b);
            }
        }
        Ok(substitute(e, &bindings)?)
    }
}

/// System in the new inputs: transformed inputs first (in definition
/// order), then the untouched inputs in their original order.
pub fn transform_system(sys: &SystemModel, t: &InputTransformation) -> Result<SystemModel> {
    let mut inputs: Vec<VariableId> = t.new_inputs().cloned().collect();
    inputs.extend(sys.inputs().iter().filter(|u| !t.replaced.contains(u)).cloned());
    let rhs = sys.rhs().iter().map(|f| substitute(f, &t.inverse)).collect::<std::result::Result<Vec<_>, _>>()?;
    let note = t.describe().join(", ");
    sys.derived(sys.states().to_vec(), inputs, rhs, Provenance::Transformed, note)
}

/// Rewrites the system and every memoized entry of the table.
pub fn apply_transformation(
    table: &DerivativeTable,
    t: &InputTransformation,
) -> Result<(Arc<SystemModel>, DerivativeTable)> {
    let sys = Arc::new(transform_system(table.system(), t)?);
    let mut rw = Rewriter::new(&sys, t);
    let rows = (0..table.width())
        .map(|j| table.known(j).iter().map(|e| rw.rewrite(e)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let new_table = DerivativeTable::with_rows(sys.clone(), rows, table.cap());
    Ok((sys, new_table))
}

#[derive(Debug, Clone)]
pub struct ExtendedSystem {
    pub base: Arc<SystemModel>,
    pub subset: Vec<VariableId>,
    pub orders: MultiIndex,
    pub system: Arc<SystemModel>,
}

impl ExtendedSystem {
    /// `dim x_ext - dim x`.
    pub fn added(&self) -> usize {
        self.system.n() - self.base.n()
    }
}

/// Appends integrator chains `v_[a]' = v_[a+1]`, `a < d`, for each input
/// `v` of the subset; `v_[d]` takes the place of `v` among the inputs.
pub fn prolong(sys: Arc<SystemModel>, subset: &[VariableId], orders: &[usize]) -> Result<ExtendedSystem> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if subset.len() != orders.len() {
        return Err(Error::InvalidArgument(format!(
            "{} prolongation orders for {} inputs",
            orders.len(),
            subset.len()
        )));
    }
    let mut states = sys.states().to_vec();
    let mut rhs = sys.rhs().to_vec();
    let mut inputs = sys.inputs().to_vec();
    for (v, &d) in subset.iter().zip(orders) {
        if d == 0 {
            return Err(Error::NonpositiveOrder(v.to_string()));
        }
        let slot = sys.input_index(v).ok_or_else(|| Error::NotAnInput(v.to_string()))?;
        let base = v.kind().order().expect("inputs are input-like");
        for a in 0..d {
            states.push(v.with_order(base + a));
            rhs.push(Expr::var(&v.with_order(base + a + 1)));
        }
        inputs[slot] = v.with_order(base + d);
    }
    let note = subset
        .iter()
        .zip(orders)
        .map(|(v, d)| format!("{d}-fold prolongation of {v}"))
        .collect::<Vec<_>>()
        .join(", ");
    let system = Arc::new(sys.derived(states, inputs, rhs, Provenance::Prolonged, note)?);
    let orders = MultiIndex::new(IndexRole::D, orders.iter().map(|&d| d as i64).collect())?;
    Ok(ExtendedSystem { base: sys, subset: subset.to_vec(), orders, system })
}
