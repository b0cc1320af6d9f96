use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::symbolic::{is_zero, partial, Expr};

use super::model::{total_derivative, FlatOutputCandidate, SystemModel};
use super::multi_index::{IndexRole, MultiIndex};

/// Default derivative cap for a system with `n` states.
pub fn default_cap(n: usize) -> usize {
    2 * n + 4
}

/// Memoized time derivatives `phi^j_[a]` along a system.
///
/// Rows are extended on demand. The cache lock is held while a row grows,
/// so every entry is computed exactly once.
#[derive(Debug)]
pub struct DerivativeTable {
    sys: Arc<SystemModel>,
    cap: usize,
    rows: Mutex<Vec<Vec<Expr>>>,
}

impl Clone for DerivativeTable {
    fn clone(&self) -> Self {
        DerivativeTable {
            sys: self.sys.clone(),
            cap: self.cap,
            rows: Mutex::new(self.rows.lock().expect("table lock").clone()),
        }
    }
}

impl DerivativeTable {
    pub fn new(sys: Arc<SystemModel>, components: &[Expr], cap: usize) -> Self {
        let rows = components.iter().map(|c| vec![c.clone()]).collect();
        DerivativeTable { sys, cap, rows: Mutex::new(rows) }
    }

    pub fn for_candidate(sys: Arc<SystemModel>, candidate: &FlatOutputCandidate, cap: usize) -> Self {
        Self::new(sys, candidate.components(), cap)
    }

    /// Table whose rows are already known up to some order; used when
    /// rewriting a table into new coordinates.
    pub(crate) fn with_rows(sys: Arc<SystemModel>, rows: Vec<Vec<Expr>>, cap: usize) -> Self {
        DerivativeTable { sys, cap, rows: Mutex::new(rows) }
    }

    pub fn system(&self) -> &SystemModel {
        &self.sys
    }

    pub fn system_arc(&self) -> Arc<SystemModel> {
        self.sys.clone()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn width(&self) -> usize {
        self.rows.lock().expect("table lock").len()
    }

    /// Snapshot of the memoized entries of component `j`.
    pub fn known(&self, j: usize) -> Vec<Expr> {
        self.rows.lock().expect("table lock")[j].clone()
    }

    /// `phi^j_[alpha]`, with `j` zero-based.
    pub fn get(&self, j: usize, alpha: usize) -> Result<Expr> {
        if alpha > self.cap {
            return Err(Error::CapExceeded { order: alpha, cap: self.cap });
        }
        let mut rows = self.rows.lock().expect("table lock");
        let row = &mut rows[j];
        while row.len() <= alpha {
            let next = total_derivative(row.last().expect("row has phi^j"), &self.sys)?;
            row.push(next);
        }
        Ok(row[alpha].clone())
    }

    /// `phi^j_[0..=hi]`.
    pub fn range(&self, j: usize, hi: usize) -> Result<Vec<Expr>> {
        (0..=hi).map(|a| self.get(j, a)).collect()
    }
}

/// The `alpha`-th derivative of component `j` (zero-based).
pub fn candidate_derivative(table: &DerivativeTable, j: usize, alpha: usize) -> Result<Expr> {
    table.get(j, alpha)
}

/// Whether `e` explicitly depends on any input of the table's system.
pub(crate) fn depends_on_inputs(e: &Expr, sys: &SystemModel) -> bool {
    let vars = e.free_vars();
    sys.inputs().iter().any(|u| vars.contains(u) && !is_zero(&partial(e, u)))
}

/// First order at which each component depends on an input of the system.
pub fn relative_degrees(table: &DerivativeTable) -> Result<MultiIndex> {
    let sys = table.system();
    let mut k = Vec::with_capacity(table.width());
    for j in 0..table.width() {
        let mut alpha = 0;
        loop {
            let e = table.get(j, alpha)?;
            if depends_on_inputs(&e, sys) {
                break;
            }
            alpha += 1;
        }
        k.push(alpha);
    }
    Ok(MultiIndex::from_usizes(IndexRole::K, &k))
}
