//! Control systems, flat-output candidates, multi-indices and derivative tables.

mod model;
mod multi_index;
mod table;

pub use model::{total_derivative, FlatOutputCandidate, Provenance, SystemModel};
pub use multi_index::{IndexRole, MultiIndex};
pub use table::{candidate_derivative, default_cap, relative_degrees, DerivativeTable};
