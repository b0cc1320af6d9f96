use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolicError {
    #[error("syntax error at position {position}: expected {expected}, found {found}")]
    Syntax { position: usize, expected: String, found: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("cyclic substitution through `{0}`")]
    CyclicSubstitution(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}
