//! Symbolic expressions: representation, parsing, printing, normalization,
//! differentiation, substitution and numeric evaluation.

mod diff;
mod error;
mod eval;
mod expr;
mod normalize;
mod number;
mod parse;
mod print;
mod sampling;
mod subst;
mod variable;

pub use diff::partial;
pub use error::SymbolicError;
pub use eval::{
    evaluate, is_zero, is_zero_with_seed, Point, ZERO_TEST_SAMPLES, ZERO_TEST_SEED,
    ZERO_TEST_THRESHOLD,
};
pub use expr::{Expr, Func};
pub use normalize::normalize;
pub use number::Number;
pub use parse::{is_valid_name, parse_expression, split_derivative_suffix, SymbolTable};
pub use sampling::{sample_point, sample_value, SAMPLE_MAX_RETRIES};
pub use subst::substitute;
pub use variable::{VarKind, VariableId};

/// Variables appearing in the normal form of `e`.
pub fn free_vars(e: &Expr) -> std::collections::BTreeSet<VariableId> {
    normalize(e).free_vars()
}
