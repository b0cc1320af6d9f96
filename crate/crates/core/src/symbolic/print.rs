use std::fmt::{self, Write};

use super::expr::Expr;
use super::number::Number;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Ctx {
    Top,
    Factor,
    Base,
}

pub(crate) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut s = String::new();
    render(e, Ctx::Top, &mut s)?;
    f.write_str(&s)
}

/// Splits a product or number into (negative sign, magnitude expression).
fn split_sign(e: &Expr) -> (bool, Expr) {
    match e {
        Expr::Num(n) if n.is_negative() => (true, Expr::Num(n.neg())),
        Expr::Product(fs) => match fs.first() {
            Some(Expr::Num(n)) if n.is_negative() => {
                let mag = n.neg();
                let mut rest: Vec<Expr> = fs[1..].to_vec();
                if !mag.is_one() {
                    rest.insert(0, Expr::Num(mag));
                }
                let e = if rest.len() == 1 { rest.pop().unwrap() } else { Expr::product(rest) };
                (true, e)
            }
            _ => (false, e.clone()),
        },
        _ => (false, e.clone()),
    }
}

fn render(e: &Expr, ctx: Ctx, out: &mut String) -> fmt::Result {
    match e {
        Expr::Num(n) => render_number(n, ctx, out),
        Expr::Var(v) => out.write_str(v.name()),
        Expr::Func(func, a) => {
            write!(out, "{}(", func.name())?;
            render(a, Ctx::Top, out)?;
            out.write_char(')')
        }
        Expr::Sum(ts) => {
            let paren = ctx != Ctx::Top;
            if paren {
                out.write_char('(')?;
            }
            for (i, t) in ts.iter().enumerate() {
                let (neg, mag) = split_sign(t);
                match (i, neg) {
                    (0, true) => out.write_char('-')?,
                    (0, false) => {}
                    (_, true) => out.write_str(" - ")?,
                    (_, false) => out.write_str(" + ")?,
                }
                let ctx = if neg && !matches!(mag, Expr::Num(_)) { Ctx::Factor } else { Ctx::Top };
                render(&mag, ctx, out)?;
            }
            if paren {
                out.write_char(')')?;
            }
            Ok(())
        }
        Expr::Product(_) | Expr::Pow(..) => {
            let (neg, mag) = split_sign(e);
            let paren = ctx == Ctx::Base || (neg && ctx != Ctx::Top);
            if paren {
                out.write_char('(')?;
            }
            if neg {
                out.write_char('-')?;
            }
            render_quotient(&mag, out)?;
            if paren {
                out.write_char(')')?;
            }
            Ok(())
        }
    }
}

fn render_number(n: &Number, ctx: Ctx, out: &mut String) -> fmt::Result {
    let s = n.to_string();
    let compound = n.is_negative() || s.contains('/');
    if compound && ctx != Ctx::Top {
        write!(out, "({s})")
    } else {
        out.write_str(&s)
    }
}

fn render_quotient(e: &Expr, out: &mut String) -> fmt::Result {
    let factors: Vec<Expr> = match e {
        Expr::Product(fs) => fs.to_vec(),
        other => vec![other.clone()],
    };
    let mut num = Vec::new();
    let mut den = Vec::new();
    for f in factors {
        match f {
            Expr::Pow(b, k) if k < 0 => {
                den.push(if k == -1 { b.as_ref().clone() } else { Expr::pow(b.as_ref().clone(), -k) })
            }
            other => num.push(other),
        }
    }
    if num.is_empty() {
        out.write_char('1')?;
    }
    for (i, f) in num.iter().enumerate() {
        if i > 0 {
            out.write_char('*')?;
        }
        match f {
            Expr::Num(n) if i == 0 && !n.is_negative() => write!(out, "{n}")?,
            _ => render_factor(f, out)?,
        }
    }
    for d in &den {
        out.write_char('/')?;
        match d {
            Expr::Product(_) => {
                out.write_char('(')?;
                render_quotient(d, out)?;
                out.write_char(')')?;
            }
            _ => render_factor(d, out)?,
        }
    }
    Ok(())
}

fn render_factor(f: &Expr, out: &mut String) -> fmt::Result {
    match f {
        Expr::Pow(b, k) => {
            render(b, Ctx::Base, out)?;
            if *k < 0 { write!(out, "^({k})") } else { write!(out, "^{k}") }
        }
        Expr::Product(_) => {
            out.write_char('(')?;
            render(f, Ctx::Top, out)?;
            out.write_char(')')
        }
        other => render(other, Ctx::Factor, out),
    }
}
