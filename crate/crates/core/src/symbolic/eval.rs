use std::collections::BTreeMap;

use super::error::SymbolicError;
use super::expr::{Expr, Func};
use super::normalize::normalize;
use super::sampling::{sample_point, SAMPLE_MAX_RETRIES};
use super::variable::VariableId;

pub type Point = BTreeMap<VariableId, f64>;

/// Number of sample points the probabilistic zero test requires.
pub const ZERO_TEST_SAMPLES: usize = 12;
/// Magnitude below which a sample value counts as zero.
pub const ZERO_TEST_THRESHOLD: f64 = 1e-10;
/// Default seed of the zero test stream.
pub const ZERO_TEST_SEED: u64 = 0x5EED_0000_2E80;

pub fn evaluate(e: &Expr, point: &Point) -> Result<f64, SymbolicError> {
    let v = eval_rec(e, point)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SymbolicError::Domain(format!("non-finite value in `{e}`")))
    }
}

fn eval_rec(e: &Expr, point: &Point) -> Result<f64, SymbolicError> {
    Ok(match e {
        Expr::Num(n) => n.to_f64(),
        Expr::Var(v) => *point
            .get(v)
            .ok_or_else(|| SymbolicError::UnboundVariable(v.name().to_string()))?,
        Expr::Sum(xs) => {
            let mut s = 0.0;
            for x in xs.iter() {
                s += eval_rec(x, point)?;
            }
            s
        }
        Expr::Product(xs) => {
            let mut p = 1.0;
            for x in xs.iter() {
                p *= eval_rec(x, point)?;
            }
            p
        }
        Expr::Pow(b, k) => {
            let base = eval_rec(b, point)?;
            if *k < 0 && base == 0.0 {
                return Err(SymbolicError::Domain("division by zero".into()));
            }
            base.powi(i32::try_from(*k).map_err(|_| SymbolicError::Domain("exponent overflow".into()))?)
        }
        Expr::Func(f, a) => {
            let x = eval_rec(a, point)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Ln if x <= 0.0 => {
                    return Err(SymbolicError::Domain(format!("ln of nonpositive value {x}")))
                }
                Func::Ln => x.ln(),
                Func::Sqrt if x < 0.0 => {
                    return Err(SymbolicError::Domain(format!("sqrt of negative value {x}")))
                }
                Func::Sqrt => x.sqrt(),
            }
        }
    })
}

/// Zero test: exact if normalization reaches the zero constant, otherwise
/// the expression must vanish numerically at every one of
/// [`ZERO_TEST_SAMPLES`] seeded sample points.
pub fn is_zero(e: &Expr) -> bool {
    is_zero_with_seed(e, ZERO_TEST_SEED)
}

pub fn is_zero_with_seed(e: &Expr, seed: u64) -> bool {
    let n = normalize(e);
    if n.is_zero_literal() {
        return true;
    }
    if n.as_number().is_some() {
        return false;
    }
    let vars: Vec<VariableId> = n.free_vars().into_iter().collect();
    let mut accepted = 0;
    let mut failures = 0;
    let mut index = 0u64;
    while accepted < ZERO_TEST_SAMPLES {
        let point = sample_point(&vars, seed, index);
        index += 1;
        match evaluate(&n, &point) {
            Ok(v) if v.abs() < ZERO_TEST_THRESHOLD => accepted += 1,
            Ok(_) => return false,
            Err(_) => {
                failures += 1;
                if failures > SAMPLE_MAX_RETRIES {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{partial, VariableId};

    fn x(i: usize) -> VariableId {
        VariableId::state(i, &format!("x{i}"))
    }

    #[test]
    fn arithmetic() {
        let u1 = VariableId::input(1, "u1");
        let e = Expr::var(&x(3)) + Expr::var(&x(4)) * Expr::var(&u1);
        let mut p = Point::new();
        p.insert(x(3), 1.0);
        p.insert(x(4), 2.0);
        p.insert(u1, 3.0);
        assert_eq!(evaluate(&e, &p).unwrap(), 7.0);
    }

    #[test]
    fn domain_errors() {
        let mut p = Point::new();
        p.insert(x(1), -1.0);
        assert!(matches!(
            evaluate(&Expr::func(Func::Ln, Expr::var(&x(1))), &p),
            Err(SymbolicError::Domain(_))
        ));
        assert!(matches!(
            evaluate(&Expr::func(Func::Sqrt, Expr::var(&x(1))), &p),
            Err(SymbolicError::Domain(_))
        ));
        p.insert(x(1), 0.0);
        assert!(evaluate(&Expr::pow(Expr::var(&x(1)), -1), &p).is_err());
        assert!(matches!(
            evaluate(&Expr::var(&x(2)), &p),
            Err(SymbolicError::UnboundVariable(_))
        ));
    }

    #[test]
    fn pythagorean_identity_is_zero() {
        let s = Expr::func(Func::Sin, Expr::var(&x(1)));
        let c = Expr::func(Func::Cos, Expr::var(&x(1)));
        let e = Expr::pow(s, 2) + Expr::pow(c, 2) - Expr::one();
        assert!(!normalize(&e).is_zero_literal());
        assert!(is_zero(&e));
    }

    #[test]
    fn derivative_of_input_free_expression() {
        let u1 = VariableId::input(1, "u1");
        let e = partial(&(Expr::var(&x(1)) / Expr::var(&x(3))), &u1) * Expr::var(&x(5));
        assert!(is_zero(&e));
        assert!(!is_zero(&Expr::var(&x(1))));
        assert!(!is_zero(&Expr::ratio(1, 1000)));
    }
}
