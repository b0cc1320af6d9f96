//! Plain-text system description.
//!
//! ```text
//! # comment
//! system academic
//! states x1 x2 x3
//! inputs u1 u2
//! params re            (optional)
//! dyn x1' = u1         (one per state)
//! output y = x1; x2    (one or more candidates, arity = input count)
//! ```
//!
//! Names in `states`/`inputs`/`params` may be separated by spaces or commas.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symbolic::{is_valid_name, parse_expression, split_derivative_suffix, Expr, SymbolTable, SymbolicError, VariableId};
use crate::system::{FlatOutputCandidate, SystemModel};

#[derive(Debug, Clone)]
pub struct SystemFile {
    pub model: Arc<SystemModel>,
    pub candidates: Vec<FlatOutputCandidate>,
    pub symbols: SymbolTable,
}

impl SystemFile {
    pub fn candidate(&self, name: &str) -> Option<&FlatOutputCandidate> {
        self.candidates.iter().find(|c| c.name() == name)
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::FileSyntax { line, column, message: message.into() }
}

/// Lifts an expression error to file coordinates; `offset` is the
/// zero-based column of the expression text within the line.
fn expr_error(e: SymbolicError, line: usize, offset: usize) -> Error {
    match e {
        SymbolicError::Syntax { position, expected, found } => {
            syntax(line, offset + position + 1, format!("expected {expected}, found {found}"))
        }
        SymbolicError::UnknownSymbol(s) => syntax(line, offset + 1, format!("unknown symbol `{s}`")),
        other => syntax(line, offset + 1, other.to_string()),
    }
}

fn names(rest: &str, line: usize, offset: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for tok in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        let col = offset + rest.find(tok).unwrap_or(0) + 1;
        if !is_valid_name(tok) || split_derivative_suffix(tok).is_some() {
            return Err(syntax(line, col, format!("invalid name `{tok}`")));
        }
        out.push(tok.to_string());
    }
    Ok(out)
}

pub fn parse_system_file(text: &str) -> Result<SystemFile> {
    let mut name: Option<String> = None;
    let mut states: Option<Vec<String>> = None;
    let mut inputs: Option<Vec<String>> = None;
    let mut params: Vec<String> = Vec::new();
    let mut dyns: Vec<(usize, usize, String, String)> = Vec::new();
    let mut outputs: Vec<(usize, usize, String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = line.len() - trimmed.len();
        let (keyword, rest) = trimmed.split_once(char::is_whitespace).unwrap_or((trimmed.trim_end(), ""));
        let rest_offset = indent + keyword.len() + 1;
        match keyword {
            "system" => {
                let n = rest.trim();
                if n.is_empty() {
                    return Err(syntax(line_no, rest_offset + 1, "expected a system name"));
                }
                name = Some(n.to_string());
            }
            "states" | "inputs" | "params" => {
                let list = names(rest, line_no, rest_offset)?;
                let slot = match keyword {
                    "states" => &mut states,
                    "inputs" => &mut inputs,
                    _ => {
                        params.extend(list);
                        continue;
                    }
                };
                if slot.is_some() {
                    return Err(syntax(line_no, indent + 1, format!("repeated `{keyword}` line")));
                }
                *slot = Some(list);
            }
            "dyn" | "output" => {
                let Some((lhs, rhs)) = rest.split_once('=') else {
                    return Err(syntax(line_no, rest_offset + rest.len() + 1, "expected `=`"));
                };
                let rhs_offset = rest_offset + lhs.len() + 1;
                let lhs = lhs.trim();
                let entry = (line_no, rhs_offset, lhs.to_string(), rhs.to_string());
                if keyword == "dyn" {
                    dyns.push(entry);
                } else {
                    outputs.push(entry);
                }
            }
            other => {
                return Err(syntax(line_no, indent + 1, format!("unknown keyword `{other}`")));
            }
        }
    }

    let states = states.ok_or_else(|| syntax(1, 1, "missing `states` line"))?;
    let inputs = inputs.ok_or_else(|| syntax(1, 1, "missing `inputs` line"))?;
    let state_vars: Vec<VariableId> = states.iter().enumerate().map(|(i, s)| VariableId::state(i + 1, s)).collect();
    let input_vars: Vec<VariableId> = inputs.iter().enumerate().map(|(j, s)| VariableId::input(j + 1, s)).collect();
    let param_vars: Vec<VariableId> = params.iter().map(|p| VariableId::parameter(p)).collect();

    let mut symbols = SymbolTable::new();
    for v in state_vars.iter().chain(&input_vars).chain(&param_vars) {
        if symbols.contains_name(v.name()) {
            return Err(Error::DuplicateState(v.name().to_string()));
        }
        symbols.insert(v.clone());
    }
    for j in 1..=input_vars.len() {
        let hat = VariableId::transformed_input(j);
        if !symbols.contains_name(hat.name()) {
            symbols.insert(hat);
        }
    }

    let mut rhs: BTreeMap<usize, Expr> = BTreeMap::new();
    for (line_no, offset, lhs, text) in &dyns {
        let target = lhs.strip_suffix('\'').map(str::trim).unwrap_or(lhs);
        let Some(i) = states.iter().position(|s| s == target) else {
            return Err(syntax(*line_no, 5, format!("`{lhs}` is not a declared state derivative")));
        };
        let e = parse_expression(text, &symbols).map_err(|e| expr_error(e, *line_no, *offset))?;
        if rhs.insert(i, e).is_some() {
            return Err(Error::DuplicateState(states[i].clone()));
        }
    }
    if let Some(i) = (0..states.len()).find(|i| !rhs.contains_key(i)) {
        return Err(syntax(1, 1, format!("missing `dyn` line for state `{}`", states[i])));
    }
    let model = SystemModel::new(
        name.as_deref().unwrap_or("unnamed"),
        state_vars,
        input_vars,
        param_vars,
        rhs.into_values().collect(),
    )?;
    let model = Arc::new(model);

    let mut candidates = Vec::new();
    for (line_no, offset, cname, text) in &outputs {
        if candidates.iter().any(|c: &FlatOutputCandidate| c.name() == cname) {
            return Err(syntax(*line_no, 8, format!("repeated output `{cname}`")));
        }
        let mut comps = Vec::new();
        let mut pos = *offset;
        for part in text.split(';') {
            let e = parse_expression(part, &symbols).map_err(|e| expr_error(e, *line_no, pos))?;
            comps.push(e);
            pos += part.len() + 1;
        }
        candidates.push(FlatOutputCandidate::new(cname, comps).attach(&model)?);
    }
    Ok(SystemFile { model, candidates, symbols })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# double integrator
system di
states x1 x2
inputs u
dyn x1' = x2
dyn x2' = u   # trailing comment
output y = x1
";

    #[test]
    fn parses_small_system() {
        let f = parse_system_file(SMALL).unwrap();
        assert_eq!(f.model.n(), 2);
        assert_eq!(f.model.m(), 1);
        assert_eq!(f.candidates[0].name(), "y");
    }

    #[test]
    fn arity_mismatch() {
        let text = SMALL.replace("output y = x1", "output y = x1; x2");
        assert!(matches!(parse_system_file(&text), Err(Error::ArityMismatch { expected: 1, found: 2, .. })));
    }

    #[test]
    fn duplicate_state() {
        let text = SMALL.replace("states x1 x2", "states x1 x1");
        assert!(matches!(parse_system_file(&text), Err(Error::DuplicateState(_))));
        let text = SMALL.replace("dyn x2' = u", "dyn x2' = u\ndyn x2' = x1");
        assert!(matches!(parse_system_file(&text), Err(Error::DuplicateState(_))));
    }

    #[test]
    fn syntax_error_location() {
        let text = SMALL.replace("dyn x2' = u", "dyn x2' = u *");
        match parse_system_file(&text) {
            Err(Error::FileSyntax { line, column, .. }) => {
                assert_eq!(line, 6);
                assert!(column > 10, "column {column}");
            }
            other => panic!("{other:?}"),
        }
        let text = SMALL.replace("system di", "sistem di");
        assert!(matches!(parse_system_file(&text), Err(Error::FileSyntax { line: 2, column: 1, .. })));
    }

    #[test]
    fn unknown_symbol() {
        let text = SMALL.replace("dyn x2' = u", "dyn x2' = v");
        assert!(matches!(parse_system_file(&text), Err(Error::FileSyntax { line: 6, .. })));
    }
}
