use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::jacobian_rank;
use crate::symbolic::Expr;
use crate::system::{relative_degrees, DerivativeTable, MultiIndex, SystemModel};

use super::{named_point, AnalysisOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SflCertificate {
    pub k_ext: MultiIndex,
    pub sum_k_ext: i64,
    pub dim: usize,
    /// Generic rank of `phi_[0,K_ext-1]` with respect to the states.
    pub state_map_rank: usize,
    /// Generic rank of `d phi_[K_ext] / d u`.
    pub decoupling_rank: usize,
    /// `K_ext = R` componentwise.
    pub k_ext_equals_r: Option<bool>,
    pub witness: Option<BTreeMap<String, f64>>,
}

/// Certifies that `components` is a linearizing output of `system`:
/// relative degrees summing to the state dimension, a full-rank state map
/// and an invertible decoupling matrix.
pub fn check_sfl(
    system: &Arc<SystemModel>,
    components: &[Expr],
    r: Option<&MultiIndex>,
    opts: &AnalysisOptions,
) -> Result<SflCertificate> {
    let cap = opts.cap_for(system.n());
    let table = DerivativeTable::new(system.clone(), components, cap);
    let k_ext = relative_degrees(&table)?;
    let sum = k_ext.abs();
    let dim = system.n();
    if sum != dim as i64 {
        return Err(Error::NotSfl(format!("sum of relative degrees {sum} differs from state dimension {dim}")));
    }
    let mut lower = Vec::new();
    let mut top = Vec::new();
    for j in 0..components.len() {
        let kj = k_ext[j] as usize;
        lower.extend(table.range(j, kj.saturating_sub(1))?.into_iter().take(kj));
        top.push(table.get(j, kj)?);
    }
    let state_map = jacobian_rank(&lower, system.states(), &opts.plan)?;
    if state_map.rank != dim {
        return Err(Error::NotSfl(format!("state map has rank {} < {dim}", state_map.rank)));
    }
    let decoupling = jacobian_rank(&top, system.inputs(), &opts.plan)?;
    if decoupling.rank != system.m() {
        return Err(Error::NotSfl(format!(
            "decoupling matrix has rank {} < {}",
            decoupling.rank,
            system.m()
        )));
    }
    Ok(SflCertificate {
        k_ext_equals_r: r.map(|r| r.values == k_ext.values),
        sum_k_ext: sum,
        dim,
        state_map_rank: state_map.rank,
        decoupling_rank: decoupling.rank,
        witness: state_map.witness.as_ref().map(named_point),
        k_ext,
    })
}
