//! Canonical form.
//!
//! An expression is normalized by expanding it into a Laurent polynomial
//! over *atoms*: variables, function applications with normalized
//! arguments, and inverse powers of irreducible sums. Positive powers of
//! sums are always expanded. Sums used as denominators are scaled so that
//! their leading term has coefficient one, which lets `(a+b)/(a+b)` and
//! `(2a+2b)^-1 * (a+b)` cancel. No polynomial GCD is attempted.

use std::collections::BTreeMap;

use super::expr::{Expr, Func};
use super::number::Number;

type Monomial = Vec<(Expr, i64)>;

#[derive(Debug, Clone, Default)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, Number>,
}

impl Poly {
    fn constant(n: Number) -> Poly {
        let mut p = Poly::default();
        if !n.is_zero() {
            p.terms.insert(Vec::new(), n);
        }
        p
    }

    fn atom(e: Expr) -> Poly {
        let mut p = Poly::default();
        p.terms.insert(vec![(e, 1)], Number::one());
        p
    }

    fn single(&self) -> Option<(&Monomial, &Number)> {
        if self.terms.len() == 1 { self.terms.iter().next() } else { None }
    }

    fn add_term(&mut self, mono: Monomial, coeff: Number) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(c) => {
                let s = c.add(&coeff);
                if s.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(mono, coeff);
            }
        }
    }

    fn add_poly(&mut self, other: Poly) {
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
    }

    fn scale(&self, k: &Number) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul(k));
        }
        out
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mono = merge(ma, mb);
                out.add_poly(finish_monomial(ca.mul(cb), mono));
            }
        }
        out
    }

    fn pow(&self, k: i64) -> Poly {
        if k == 0 {
            return Poly::constant(Number::one());
        }
        if let Some((mono, c)) = self.single() {
            let coeff = match c.powi(k) {
                Some(c) => c,
                // 0^-k: kept as an opaque atom so evaluation reports the pole.
                None => return monomial_poly(vec![(Expr::zero(), k)]),
            };
            let mono: Monomial = mono.iter().map(|(a, e)| (a.clone(), e * k)).collect();
            return finish_monomial(coeff, mono);
        }
        if self.terms.is_empty() {
            return if k > 0 { Poly::default() } else { monomial_poly(vec![(Expr::zero(), k)]) };
        }
        if k > 0 {
            let mut result = Poly::constant(Number::one());
            let mut base = self.clone();
            let mut e = k;
            while e > 0 {
                if e & 1 == 1 {
                    result = result.mul(&base);
                }
                e >>= 1;
                if e > 0 {
                    base = base.mul(&base);
                }
            }
            result
        } else {
            let (c, q) = self.canonical_sum();
            let coeff = c.powi(k).expect("leading coefficient is nonzero");
            let mut p = Poly::default();
            p.terms.insert(vec![(from_poly(&q), k)], coeff);
            p
        }
    }

    /// Splits a multi-term polynomial into `c * q` with `q`'s leading
    /// coefficient equal to one.
    fn canonical_sum(&self) -> (Number, Poly) {
        let lead = self.terms.values().next().expect("nonempty").clone();
        let inv = match &lead {
            Number::Rational(r) => Number::Rational(r.recip()),
            Number::Float(f) => Number::Float(1.0 / f),
        };
        let mut q = self.scale(&inv);
        // Force the exact 1 so that float leading terms stay canonical too.
        if let Some(first) = q.terms.values_mut().next() {
            *first = Number::one();
        }
        (lead, q)
    }
}

fn monomial_poly(mono: Monomial) -> Poly {
    let mut p = Poly::default();
    p.terms.insert(mono, Number::one());
    p
}

fn merge(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Re-expands atoms whose exponent left the canonical range: sums raised
/// to a positive power and `sqrt(a)^k` with `|k| >= 2`.
fn finish_monomial(coeff: Number, mono: Monomial) -> Poly {
    let needs_work = mono.iter().any(|(a, e)| match a {
        Expr::Sum(_) => *e > 0,
        Expr::Func(Func::Sqrt, _) => e.abs() >= 2,
        _ => false,
    });
    let mut p = Poly::default();
    if !needs_work {
        p.add_term(mono, coeff);
        return p;
    }
    let mut plain = Vec::new();
    let mut result = Poly::constant(coeff);
    for (atom, e) in mono {
        match &atom {
            Expr::Sum(_) if e > 0 => result = result.mul(&to_poly(&atom).pow(e)),
            Expr::Func(Func::Sqrt, arg) if e.abs() >= 2 => {
                let half = e / 2;
                result = result.mul(&to_poly(arg).pow(half));
                let rest = e - 2 * half;
                if rest != 0 {
                    plain.push((atom.clone(), rest));
                }
            }
            _ => plain.push((atom, e)),
        }
    }
    result.mul(&monomial_poly(plain))
}

fn func_special_value(f: Func, arg: &Expr) -> Option<Expr> {
    let n = arg.as_number()?;
    match n {
        Number::Float(x) => {
            let v = match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Ln => x.ln(),
                Func::Sqrt => x.sqrt(),
            };
            v.is_finite().then(|| Expr::float(v))
        }
        Number::Rational(_) if n.is_zero() => match f {
            Func::Sin | Func::Tan | Func::Sqrt => Some(Expr::zero()),
            Func::Cos | Func::Exp => Some(Expr::one()),
            Func::Ln => None,
        },
        Number::Rational(_) if n.is_one() => match f {
            Func::Ln => Some(Expr::zero()),
            Func::Sqrt => Some(Expr::one()),
            _ => None,
        },
        _ => None,
    }
}

pub(crate) fn to_poly(e: &Expr) -> Poly {
    match e {
        Expr::Num(n) => Poly::constant(n.clone()),
        Expr::Var(_) => Poly::atom(e.clone()),
        Expr::Sum(xs) => {
            let mut p = Poly::default();
            for x in xs.iter() {
                p.add_poly(to_poly(x));
            }
            p
        }
        Expr::Product(xs) => product_poly(xs),
        Expr::Pow(..) => {
            let (b, k) = peel_pow(e, 1);
            if k < 0 && matches!(b, Expr::Sum(_)) {
                product_poly(std::slice::from_ref(e))
            } else {
                to_poly(b).pow(k)
            }
        }
        Expr::Func(f, a) => {
            let arg = normalize(a);
            match func_special_value(*f, &arg) {
                Some(v) => to_poly(&v),
                None => Poly::atom(Expr::func(*f, arg)),
            }
        }
    }
}

/// Collapses nested integer powers: `(b^i)^j = b^(i*j)`.
fn peel_pow(e: &Expr, k: i64) -> (&Expr, i64) {
    match e {
        Expr::Pow(b, j) => peel_pow(b, k * j),
        other => (other, k),
    }
}

/// Products collect sum-valued factors with their net exponent before
/// expanding, so that a sum cancels against its own inverse.
fn product_poly(factors: &[Expr]) -> Poly {
    let mut acc = Poly::constant(Number::one());
    let mut pending: BTreeMap<Expr, (Poly, i64)> = BTreeMap::new();
    let mut add_pending = |acc: &mut Poly, p: Poly, k: i64| {
        let (c, q) = p.canonical_sum();
        *acc = acc.scale(&c.powi(k).expect("nonzero leading coefficient"));
        let key = from_poly(&q);
        pending.entry(key).or_insert((q, 0)).1 += k;
    };
    for f in factors {
        let (base, k) = peel_pow(f, 1);
        let p = to_poly(base);
        if p.terms.len() > 1 {
            add_pending(&mut acc, p, k);
            continue;
        }
        let p = if k == 1 { p } else { p.pow(k) };
        // Pull inverse sums out of single-monomial factors.
        match p.single() {
            Some((mono, c)) if mono.iter().any(|(a, _)| matches!(a, Expr::Sum(_))) => {
                let mut rest = Vec::new();
                for (a, e) in mono {
                    if matches!(a, Expr::Sum(_)) {
                        add_pending(&mut acc, to_poly(a), *e);
                    } else {
                        rest.push((a.clone(), *e));
                    }
                }
                let mut m = Poly::default();
                m.terms.insert(rest, c.clone());
                acc = acc.mul(&m);
            }
            _ => acc = acc.mul(&p),
        }
        if acc.terms.is_empty() {
            return acc;
        }
    }
    for (key, (q, k)) in pending {
        if k > 0 {
            acc = acc.mul(&q.pow(k));
        } else if k < 0 {
            acc = acc.mul(&monomial_poly(vec![(key, k)]));
        }
    }
    acc
}

pub(crate) fn from_poly(p: &Poly) -> Expr {
    let mut terms: Vec<Expr> = p
        .terms
        .iter()
        .map(|(mono, c)| {
            let mut factors: Vec<Expr> = mono
                .iter()
                .map(|(a, e)| if *e == 1 { a.clone() } else { Expr::pow(a.clone(), *e) })
                .collect();
            if factors.is_empty() {
                return Expr::Num(c.clone());
            }
            if !c.is_one() {
                factors.insert(0, Expr::Num(c.clone()));
            }
            if factors.len() == 1 { factors.pop().unwrap() } else { Expr::product(factors) }
        })
        .collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().unwrap(),
        _ => Expr::sum(terms),
    }
}

/// Canonical form of `e`. Idempotent.
pub fn normalize(e: &Expr) -> Expr {
    from_poly(&to_poly(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::VariableId;

    fn x(i: usize) -> Expr {
        Expr::var(&VariableId::state(i, &format!("x{i}")))
    }

    #[test]
    fn like_terms_merge_and_cancel() {
        let e = x(3) + x(4) * x(1) - x(4) * x(1);
        assert_eq!(normalize(&e), normalize(&x(3)));
    }

    #[test]
    fn division_cancels_monomials() {
        // x3 + x4 * ((uh - x3) / x4) == uh
        let uh = Expr::var(&VariableId::transformed_input(1));
        let e = x(3) + x(4) * ((uh.clone() - x(3)) / x(4));
        assert_eq!(normalize(&e), uh);
    }

    #[test]
    fn sums_cancel_against_inverse() {
        let s = x(1) + x(2);
        let e = s.clone() * Expr::pow(Expr::int(2) * s, -1);
        assert_eq!(normalize(&e), Expr::ratio(1, 2));
    }

    #[test]
    fn expansion_of_squares() {
        let s = x(1) + x(2);
        let lhs = normalize(&Expr::pow(s, 2));
        let rhs = normalize(&(x(1) * x(1) + Expr::int(2) * x(1) * x(2) + x(2) * x(2)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sqrt_squares_reduce() {
        let e = Expr::pow(Expr::func(Func::Sqrt, x(1) + Expr::int(1)), 2);
        assert_eq!(normalize(&e), normalize(&(x(1) + Expr::int(1))));
    }

    #[test]
    fn flat_structure() {
        let n = normalize(&(x(1) + (x(2) + (x(3) * (x(4) * x(5))))));
        match &n {
            Expr::Sum(ts) => {
                assert!(ts.iter().all(|t| !matches!(t, Expr::Sum(_))));
                for t in ts.iter() {
                    if let Expr::Product(fs) = t {
                        assert!(fs.iter().all(|f| !matches!(f, Expr::Product(_))));
                    }
                }
            }
            other => panic!("expected sum, got {other:?}"),
        }
    }

    #[test]
    fn idempotent_on_nested_denominators() {
        let e = (x(1) - x(2)) / (x(3) + Expr::int(2) * x(1)) + Expr::func(Func::Sin, x(1) / x(2));
        let n1 = normalize(&e);
        assert_eq!(normalize(&n1), n1);
    }

    #[test]
    fn function_special_values() {
        assert_eq!(normalize(&Expr::func(Func::Cos, x(1) - x(1))), Expr::one());
        assert_eq!(normalize(&Expr::func(Func::Ln, Expr::one())), Expr::zero());
    }
}
