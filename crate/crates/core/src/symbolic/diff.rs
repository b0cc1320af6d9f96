use super::expr::{Expr, Func};
use super::normalize::normalize;
use super::variable::VariableId;

/// Exact partial derivative of `e` with respect to `v`, normalized.
pub fn partial(e: &Expr, v: &VariableId) -> Expr {
    if !e.contains_var(v) {
        return Expr::zero();
    }
    normalize(&raw_partial(e, v))
}

fn raw_partial(e: &Expr, v: &VariableId) -> Expr {
    if !e.contains_var(v) {
        return Expr::zero();
    }
    match e {
        Expr::Num(_) => Expr::zero(),
        Expr::Var(_) => Expr::one(),
        Expr::Sum(xs) => Expr::sum(
            xs.iter().filter(|x| x.contains_var(v)).map(|x| raw_partial(x, v)).collect(),
        ),
        Expr::Product(xs) => {
            let terms = (0..xs.len())
                .filter(|&i| xs[i].contains_var(v))
                .map(|i| {
                    let mut fs: Vec<Expr> = xs.to_vec();
                    fs[i] = raw_partial(&xs[i], v);
                    Expr::product(fs)
                })
                .collect();
            Expr::sum(terms)
        }
        Expr::Pow(b, k) => Expr::product(vec![
            Expr::int(*k),
            Expr::pow(b.as_ref().clone(), k - 1),
            raw_partial(b, v),
        ]),
        Expr::Func(f, a) => {
            let a0 = a.as_ref().clone();
            let outer = match f {
                Func::Sin => Expr::func(Func::Cos, a0),
                Func::Cos => -Expr::func(Func::Sin, a0),
                Func::Tan => Expr::one() + Expr::pow(Expr::func(Func::Tan, a0), 2),
                Func::Exp => Expr::func(Func::Exp, a0),
                Func::Ln => Expr::pow(a0, -1),
                Func::Sqrt => Expr::ratio(1, 2) * Expr::pow(Expr::func(Func::Sqrt, a0), -1),
            };
            outer * raw_partial(a, v)
        }
    }
}
