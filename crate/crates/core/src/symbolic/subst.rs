use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::error::SymbolicError;
use super::expr::Expr;
use super::normalize::normalize;
use super::variable::VariableId;

/// Simultaneous substitution followed by normalization.
pub fn substitute(
    e: &Expr,
    bindings: &BTreeMap<VariableId, Expr>,
) -> Result<Expr, SymbolicError> {
    if bindings.is_empty() {
        return Ok(e.clone());
    }
    check_acyclic(bindings)?;
    Ok(normalize(&replace(e, bindings)))
}

fn check_acyclic(bindings: &BTreeMap<VariableId, Expr>) -> Result<(), SymbolicError> {
    let deps: BTreeMap<VariableId, BTreeSet<VariableId>> = bindings
        .iter()
        .map(|(k, v)| {
            let bound = v.free_vars().into_iter().filter(|w| bindings.contains_key(w)).collect();
            (k.clone(), bound)
        })
        .collect();
    let mut done = BTreeSet::new();
    let mut on_stack = BTreeSet::new();
    fn visit(
        v: &VariableId,
        deps: &BTreeMap<VariableId, BTreeSet<VariableId>>,
        done: &mut BTreeSet<VariableId>,
        on_stack: &mut BTreeSet<VariableId>,
    ) -> Result<(), SymbolicError> {
        if done.contains(v) {
            return Ok(());
        }
        if !on_stack.insert(v.clone()) {
            return Err(SymbolicError::CyclicSubstitution(v.name().to_string()));
        }
        for d in &deps[v] {
            visit(d, deps, done, on_stack)?;
        }
        on_stack.remove(v);
        done.insert(v.clone());
        Ok(())
    }
    for k in deps.keys() {
        visit(k, &deps, &mut done, &mut on_stack)?;
    }
    Ok(())
}

fn replace(e: &Expr, b: &BTreeMap<VariableId, Expr>) -> Expr {
    match e {
        Expr::Num(_) => e.clone(),
        Expr::Var(v) => b.get(v).cloned().unwrap_or_else(|| e.clone()),
        Expr::Sum(xs) => Expr::Sum(xs.iter().map(|x| replace(x, b)).collect::<Vec<_>>().into()),
        Expr::Product(xs) => {
            Expr::Product(xs.iter().map(|x| replace(x, b)).collect::<Vec<_>>().into())
        }
        Expr::Pow(base, k) => Expr::Pow(Arc::new(replace(base, b)), *k),
        Expr::Func(f, a) => Expr::Func(*f, Arc::new(replace(a, b))),
    }
}
