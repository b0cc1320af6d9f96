//! Infix expression grammar.
//!
//! ```text
//! expr    := prefix (infix)*
//! prefix  := number | name | name '(' expr ')' | '(' expr ')' | ('-' | '+') expr
//! infix   := ('+' | '-' | '*' | '/') expr | '^' integer-expr
//! name    := [A-Za-z][A-Za-z0-9_]*      (input names accept a `_d<k>` suffix)
//! ```
//!
//! Binding powers: `+ -` < `* /` < unary sign < `^` (right associative).

use std::collections::BTreeMap;

use super::error::SymbolicError;
use super::expr::{Expr, Func};
use super::normalize::normalize;
use super::number::Number;
use super::variable::VariableId;

/// Maps names to variables. Derivatives of input-like variables are
/// resolved from the `_d<k>` suffix and need not be registered.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    names: BTreeMap<String, VariableId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: VariableId) {
        self.names.insert(v.name().to_string(), v);
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.names.contains_key(name)
    }

    pub fn lookup(&self, name: &str) -> Option<VariableId> {
        if let Some(v) = self.names.get(name) {
            return Some(v.clone());
        }
        let (base, order) = split_derivative_suffix(name)?;
        let v = self.names.get(base)?;
        (v.is_input_like() && v.kind().order() == Some(0)).then(|| v.with_order(order))
    }
}

impl FromIterator<VariableId> for SymbolTable {
    fn from_iter<T: IntoIterator<Item = VariableId>>(iter: T) -> Self {
        let mut t = SymbolTable::new();
        iter.into_iter().for_each(|v| t.insert(v));
        t
    }
}

/// `u1_d2` -> `("u1", 2)`.
pub fn split_derivative_suffix(name: &str) -> Option<(&str, usize)> {
    let idx = name.rfind("_d")?;
    let digits = &name[idx + 2..];
    if idx == 0 || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((&name[..idx], digits.parse().ok()?))
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Float(f64),
    Name(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) => format!("number `{s}`"),
            Tok::Float(f) => format!("number `{f}`"),
            Tok::Name(n) => format!("name `{n}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SymbolicError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let mut is_float = false;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                is_float = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    is_float = true;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit = &text[start..i];
            let tok = if is_float {
                Tok::Float(lit.parse().map_err(|_| SymbolicError::Syntax {
                    position: start,
                    expected: "number".into(),
                    found: lit.into(),
                })?)
            } else {
                Tok::Int(lit.to_string())
            };
            out.push((start, tok));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Name(text[start..i].to_string())));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(SymbolicError::Syntax {
                    position: start,
                    expected: "expression".into(),
                    found: format!("`{c}`"),
                })
            }
        };
        out.push((start, tok));
        i += c.len_utf8();
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    symbols: &'a SymbolTable,
}

const BP_SUM: u8 = 1;
const BP_PRODUCT: u8 = 3;
const BP_UNARY: u8 = 5;
const BP_POW: u8 = 7;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn position(&self) -> usize {
        self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> SymbolicError {
        SymbolicError::Syntax {
            position: self.position(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SymbolicError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, SymbolicError> {
        let mut lhs = self.prefix()?;
        while let Tok::Op(c) = self.peek() {
            let op = *c;
            let (lbp, rbp) = match op {
                '+' | '-' => (BP_SUM, BP_SUM + 1),
                '*' | '/' => (BP_PRODUCT, BP_PRODUCT + 1),
                '^' => (BP_POW, BP_POW - 1),
                _ => unreachable!(),
            };
            if lbp < min_bp {
                break;
            }
            self.next();
            let at = self.position();
            let rhs = self.expr(rbp)?;
            lhs = match op {
                '+' => lhs + rhs,
                '-' => lhs - rhs,
                '*' => lhs * rhs,
                '/' => lhs / rhs,
                '^' => {
                    let k = normalize(&rhs).as_number().and_then(Number::as_integer).ok_or(
                        SymbolicError::Syntax {
                            position: at,
                            expected: "integer exponent".into(),
                            found: format!("`{rhs}`"),
                        },
                    )?;
                    Expr::pow(lhs, k)
                }
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, SymbolicError> {
        let at = self.position();
        match self.next() {
            Tok::Int(s) => {
                let n: num_bigint::BigInt = s.parse().map_err(|_| SymbolicError::Syntax {
                    position: at,
                    expected: "integer".into(),
                    found: s.clone(),
                })?;
                Ok(Expr::Num(Number::Rational(num_rational::BigRational::from_integer(n))))
            }
            Tok::Float(f) => Ok(Expr::float(f)),
            Tok::Op('-') => Ok(-self.expr(BP_UNARY)?),
            Tok::Op('+') => self.expr(BP_UNARY),
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Name(name) => {
                if *self.peek() == Tok::LParen {
                    if let Ok(f) = name.parse::<Func>() {
                        self.next();
                        let arg = self.expr(0)?;
                        self.expect(Tok::RParen, "`)`")?;
                        return Ok(Expr::func(f, arg));
                    }
                }
                self.symbols
                    .lookup(&name)
                    .map(|v| Expr::var(&v))
                    .ok_or(SymbolicError::UnknownSymbol(name))
            }
            other => {
                self.pos -= usize::from(other != Tok::End);
                Err(self.error("expression"))
            }
        }
    }
}

/// Parses `text` and returns its normal form.
pub fn parse_expression(text: &str, symbols: &SymbolTable) -> Result<Expr, SymbolicError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, symbols };
    let e = p.expr(0)?;
    if *p.peek() != Tok::End {
        return Err(p.error("operator or end of input"));
    }
    Ok(normalize(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        let mut t: SymbolTable = (1..=7).map(|i| VariableId::state(i, &format!("x{i}"))).collect();
        for j in 1..=3 {
            t.insert(VariableId::input(j, &format!("u{j}")));
        }
        t
    }

    #[test]
    fn sum_of_product() {
        let t = table();
        let e = parse_expression("x3 + x4*u1", &t).unwrap();
        let x3 = t.lookup("x3").unwrap();
        let x4 = t.lookup("x4").unwrap();
        let u1 = t.lookup("u1").unwrap();
        assert_eq!(e, normalize(&(Expr::var(&x3) + Expr::var(&x4) * Expr::var(&u1))));
        assert!(matches!(e, Expr::Sum(ref ts) if ts.len() == 2));
    }

    #[test]
    fn zero_literal() {
        assert_eq!(parse_expression("0", &table()).unwrap(), Expr::zero());
    }

    #[test]
    fn derivative_suffix_and_division() {
        let t = table();
        let e = parse_expression("(u1_d1 - x3)/x4", &t).unwrap();
        let u1d1 = t.lookup("u1_d1").unwrap();
        assert_eq!(u1d1.kind().order(), Some(1));
        assert!(e.free_vars().contains(&u1d1));
        assert!(t.lookup("x3_d1").is_none());
    }

    #[test]
    fn precedence() {
        let t = table();
        let a = parse_expression("-x1^2", &t).unwrap();
        let b = parse_expression("-(x1^2)", &t).unwrap();
        assert_eq!(a, b);
        let c = parse_expression("2^3^2", &t).unwrap();
        assert_eq!(c, Expr::int(512));
        let d = parse_expression("1/2/x1", &t).unwrap();
        assert_eq!(d, parse_expression("x1^-1 * 1/2", &t).unwrap());
    }

    #[test]
    fn literals() {
        let t = table();
        assert_eq!(parse_expression("3/4", &t).unwrap(), Expr::ratio(3, 4));
        assert_eq!(parse_expression("1.5", &t).unwrap(), Expr::float(1.5));
        assert_eq!(parse_expression("2.5e-3", &t).unwrap(), Expr::float(2.5e-3));
    }

    #[test]
    fn errors() {
        let t = table();
        assert_eq!(parse_expression("y9 + 1", &t), Err(SymbolicError::UnknownSymbol("y9".into())));
        match parse_expression("x1 + * x2", &t) {
            Err(SymbolicError::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_expression("(x1 + x2", &t).is_err());
        assert!(parse_expression("x1^x2", &t).is_err());
        assert!(parse_expression("x1 x2", &t).is_err());
        assert!(parse_expression("x1 # 2", &t).is_err());
        assert!(parse_expression("", &t).is_err());
    }

    #[test]
    fn functions() {
        let t = table();
        let e = parse_expression("sin(x1)^2 + cos(x1)^2", &t).unwrap();
        assert!(crate::symbolic::is_zero(&(e - Expr::one())));
        assert!(parse_expression("sin x1", &t).is_err());
    }

    #[test]
    fn suffix_splitting() {
        assert_eq!(split_derivative_suffix("u1_d12"), Some(("u1", 12)));
        assert_eq!(split_derivative_suffix("u1_d"), None);
        assert_eq!(split_derivative_suffix("_d1"), None);
        assert!(is_valid_name("theta_1"));
        assert!(!is_valid_name("1x"));
    }
}
