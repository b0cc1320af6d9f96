use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{normalize, partial, Expr, VariableId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Original,
    Transformed,
    Prolonged,
}

/// `x' = f(x, u)`. States of an extended system may be input-like
/// variables (the integrator chains); its inputs are then the top-order
/// chain variables.
#[derive(Debug, Clone)]
pub struct SystemModel {
    name: String,
    states: Vec<VariableId>,
    inputs: Vec<VariableId>,
    params: Vec<VariableId>,
    rhs: Vec<Expr>,
    provenance: Provenance,
    lineage: Vec<String>,
}

impl SystemModel {
    pub fn new(
        name: &str,
        states: Vec<VariableId>,
        inputs: Vec<VariableId>,
        params: Vec<VariableId>,
        rhs: Vec<Expr>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidArgument("system has no states".into()));
        }
        if inputs.is_empty() {
            return Err(Error::InvalidArgument("system has no inputs".into()));
        }
        if rhs.len() != states.len() {
            return Err(Error::InvalidArgument(format!(
                "{} right-hand sides for {} states",
                rhs.len(),
                states.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for v in states.iter().chain(&inputs).chain(&params) {
            if !seen.insert(v.clone()) {
                return Err(Error::DuplicateState(v.name().to_string()));
            }
        }
        for v in &inputs {
            if !v.is_input_like() {
                return Err(Error::NotAnInput(v.name().to_string()));
            }
        }
        let rhs: Vec<Expr> = rhs.iter().map(normalize).collect();
        for f in &rhs {
            if let Some(v) = f.free_vars().into_iter().find(|v| !seen.contains(v)) {
                return Err(Error::ForeignVariable(v.name().to_string()));
            }
        }
        Ok(SystemModel {
            name: name.to_string(),
            states,
            inputs,
            params,
            rhs,
            provenance: Provenance::Original,
            lineage: Vec::new(),
        })
    }

    pub(crate) fn derived(
        &self,
        states: Vec<VariableId>,
        inputs: Vec<VariableId>,
        rhs: Vec<Expr>,
        provenance: Provenance,
        note: String,
    ) -> Result<Self> {
        let mut sys = SystemModel::new(&self.name, states, inputs, self.params.clone(), rhs)?;
        sys.provenance = provenance;
        sys.lineage = self.lineage.clone();
        sys.lineage.push(note);
        Ok(sys)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn m(&self) -> usize {
        self.inputs.len()
    }

    pub fn states(&self) -> &[VariableId] {
        &self.states
    }

    pub fn inputs(&self) -> &[VariableId] {
        &self.inputs
    }

    pub fn params(&self) -> &[VariableId] {
        &self.params
    }

    pub fn rhs(&self) -> &[Expr] {
        &self.rhs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Transformation chain that produced this system, one line per step.
    pub fn lineage(&self) -> &[String] {
        &self.lineage
    }

    pub fn state_index(&self, v: &VariableId) -> Option<usize> {
        self.states.iter().position(|s| s == v)
    }

    pub fn input_index(&self, v: &VariableId) -> Option<usize> {
        self.inputs.iter().position(|s| s == v)
    }

    /// Time derivative of a variable along the system, or `None` if the
    /// variable is foreign.
    fn variable_derivative(&self, v: &VariableId) -> Option<Expr> {
        if let Some(i) = self.state_index(v) {
            return Some(self.rhs[i].clone());
        }
        if v.is_parameter() {
            return self.params.contains(v).then(Expr::zero);
        }
        let (family, order) = (v.kind().family()?, v.kind().order()?);
        let covered = self
            .inputs
            .iter()
            .any(|u| u.kind().family() == Some(family) && u.kind().order().is_some_and(|b| b <= order));
        covered.then(|| Expr::var(&v.successor()))
    }
}

/// Lie derivative of `e` along the system, extended by `u_[a]' = u_[a+1]`.
pub fn total_derivative(e: &Expr, sys: &SystemModel) -> Result<Expr> {
    let mut terms = Vec::new();
    for v in e.free_vars() {
        let rate = sys
            .variable_derivative(&v)
            .ok_or_else(|| Error::ForeignVariable(v.name().to_string()))?;
        if rate.is_zero_literal() {
            continue;
        }
        let d = partial(e, &v);
        if !d.is_zero_literal() {
            terms.push(Expr::product(vec![rate, d]));
        }
    }
    Ok(normalize(&Expr::sum(terms)))
}

/// Flat-output candidate `phi = (phi^1, ..., phi^m)` over states and
/// order-zero inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatOutputCandidate {
    name: String,
    components: Vec<Expr>,
    /// `permutation[i]` is the original index of the component now at `i`.
    permutation: Vec<usize>,
}

impl FlatOutputCandidate {
    pub fn new(name: &str, components: Vec<Expr>) -> Self {
        let permutation = (0..components.len()).collect();
        FlatOutputCandidate {
            name: name.to_string(),
            components: components.iter().map(normalize).collect(),
            permutation,
        }
    }

    /// Checks arity and the `(x, u)` restriction against `sys`.
    pub fn attach(self, sys: &SystemModel) -> Result<Self> {
        if self.components.len() != sys.m() {
            return Err(Error::ArityMismatch {
                name: self.name.clone(),
                expected: sys.m(),
                found: self.components.len(),
            });
        }
        for c in &self.components {
            for v in c.free_vars() {
                let ok = sys.states().contains(&v) || sys.inputs().contains(&v) || sys.params().contains(&v);
                if !ok {
                    return Err(Error::ForeignVariable(v.name().to_string()));
                }
            }
        }
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Reorders components: the new component `i` is the current component
    /// `order[i]`. Permutations compose.
    pub fn rearranged(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.components.len(), "permutation length");
        FlatOutputCandidate {
            name: self.name.clone(),
            components: order.iter().map(|&i| self.components[i].clone()).collect(),
            permutation: order.iter().map(|&i| self.permutation[i]).collect(),
        }
    }

    pub fn with_components(&self, components: Vec<Expr>) -> Self {
        FlatOutputCandidate {
            name: self.name.clone(),
            components,
            permutation: self.permutation.clone(),
        }
    }
}
