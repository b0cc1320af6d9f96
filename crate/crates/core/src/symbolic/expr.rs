use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops;
use std::str::FromStr;
use std::sync::Arc;

use super::number::Number;
use super::variable::VariableId;

/// Elementary functions understood by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Ln, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }
}

impl FromStr for Func {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Func::ALL.into_iter().find(|f| f.name() == s).ok_or(())
    }
}

/// Immutable symbolic expression. Children are reference counted, so
/// cloning is cheap and subtrees are shared.
///
/// Division is `Pow(_, -1)`; subtraction is a sum with a `-1` coefficient.
#[derive(Debug, Clone)]
pub enum Expr {
    Num(Number),
    Var(VariableId),
    Sum(Arc<[Expr]>),
    Product(Arc<[Expr]>),
    Pow(Arc<Expr>, i64),
    Func(Func, Arc<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Num(Number::zero())
    }

    pub fn one() -> Expr {
        Expr::Num(Number::one())
    }

    pub fn int(v: i64) -> Expr {
        Expr::Num(Number::int(v))
    }

    pub fn ratio(p: i64, q: i64) -> Expr {
        Expr::Num(Number::ratio(p, q))
    }

    pub fn float(v: f64) -> Expr {
        Expr::Num(Number::Float(v))
    }

    pub fn var(v: &VariableId) -> Expr {
        Expr::Var(v.clone())
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Sum(terms.into())
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        Expr::Product(factors.into())
    }

    pub fn pow(base: Expr, exp: i64) -> Expr {
        Expr::Pow(Arc::new(base), exp)
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::Func(f, Arc::new(arg))
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self {
            Expr::Num(n) => Some(n),
            _ => None,
        }
    }

    /// Structural zero test; see `is_zero` for the semantic one.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(n) if n.is_zero())
    }

    pub fn free_vars(&self) -> BTreeSet<VariableId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VariableId>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Expr::Pow(b, _) => b.collect_vars(out),
            Expr::Func(_, a) => a.collect_vars(out),
        }
    }

    pub fn contains_var(&self, v: &VariableId) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(w) => w == v,
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().any(|x| x.contains_var(v)),
            Expr::Pow(b, _) => b.contains_var(v),
            Expr::Func(_, a) => a.contains_var(v),
        }
    }

    /// Number of nodes, for diagnostics.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) => 1,
            Expr::Sum(xs) | Expr::Product(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
            Expr::Pow(b, _) => 1 + b.size(),
            Expr::Func(_, a) => 1 + a.size(),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(_) => 1,
            Expr::Func(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Product(_) => 4,
            Expr::Sum(_) => 5,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural total order used for canonical term ordering.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Expr::Num(a), Expr::Num(b)) => a.cmp(b),
            (Expr::Var(a), Expr::Var(b)) => a.cmp(b),
            (Expr::Func(f, a), Expr::Func(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
            (Expr::Pow(a, i), Expr::Pow(b, j)) => a.cmp(b).then_with(|| i.cmp(j)),
            (Expr::Product(a), Expr::Product(b)) | (Expr::Sum(a), Expr::Sum(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::print::write_expr(self, f)
    }
}

impl From<&VariableId> for Expr {
    fn from(v: &VariableId) -> Self {
        Expr::var(v)
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, rhs])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum(vec![self, -rhs])
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, rhs])
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::product(vec![self, Expr::pow(rhs, -1)])
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product(vec![Expr::int(-1), self])
    }
}
